"""Exact arithmetic in the supported ground fields: Q, Q(sqrt d) and F_q(t)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import sympy

from .certified import down, iroot, up

Poly = Tuple[int, ...]  # coefficients over F_q, lowest degree first, no trailing zeros


class FieldError(ValueError):
    """Invalid field parameters or malformed element encodings."""


# ---------------------------------------------------------------------------
# F_q[t]


def ptrim(c: Sequence[int], q: int) -> Poly:
    c = [x % q for x in c]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def pdeg(a: Poly) -> int:
    return len(a) - 1  # deg 0 = -1


def padd(a: Poly, b: Poly, q: int) -> Poly:
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], q)


def psub(a: Poly, b: Poly, q: int) -> Poly:
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)], q)


def pscale(a: Poly, c: int, q: int) -> Poly:
    return ptrim([x * c for x in a], q)


def pshift(a: Poly, k: int) -> Poly:
    return (0,) * k + a if a else a


def pmul(a: Poly, b: Poly, q: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out, q)


def pdivmod(a: Poly, b: Poly, q: int) -> Tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = pow(b[-1], q - 2, q)
    quot = [0] * max(0, len(a) - len(b) + 1)
    db = len(b) - 1
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + db] * inv % q
        if c:
            quot[i] = c
            for j, y in enumerate(b):
                a[i + j] = (a[i + j] - c * y) % q
    return ptrim(quot, q), ptrim(a, q)


def pmonic(a: Poly, q: int) -> Poly:
    if not a:
        return a
    return pscale(a, pow(a[-1], q - 2, q), q)


def pgcd(a: Poly, b: Poly, q: int) -> Poly:
    while b:
        a, b = b, pdivmod(a, b, q)[1]
    return pmonic(a, q)


def ppow(a: Poly, n: int, q: int) -> Poly:
    out: Poly = (1,)
    for _ in range(n):
        out = pmul(out, a, q)
    return out


def peval(a: Poly, x: int, q: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % q
    return acc


def monic_polys(deg: int, q: int) -> Iterator[Poly]:
    for low in itertools.product(range(q), repeat=deg):
        yield tuple(low) + (1,)


def pfactor(a: Poly, q: int) -> Tuple[int, Dict[Poly, int]]:
    """Factor a nonzero polynomial as unit * prod(monic irreducible ** e) by trial division."""
    if not a:
        raise ZeroDivisionError("cannot factor 0")
    unit = a[-1]
    rest = pmonic(a, q)
    factors: Dict[Poly, int] = {}
    k = 1
    while 2 * k <= pdeg(rest):
        for g in monic_polys(k, q):
            while True:
                quo, rem = pdivmod(rest, g, q)
                if rem:
                    break
                factors[g] = factors.get(g, 0) + 1
                rest = quo
        k += 1
    if pdeg(rest) > 0:
        factors[rest] = factors.get(rest, 0) + 1
    return unit, factors


def poly_from_index(n: int, q: int) -> Poly:
    """The n-th polynomial in the base-q enumeration 0, 1, ..., t, t+1, ..."""
    digits = []
    while n:
        n, r = divmod(n, q)
        digits.append(r)
    return ptrim(digits, q)


def poly_str(a: Poly) -> str:
    if not a:
        return "0"
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        if i == 0:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(terms)


# ---------------------------------------------------------------------------
# elements


class RationalFunction:
    """num/den in F_q(t), q prime, with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den", "q")

    def __init__(self, num: Sequence[int], den: Sequence[int] = (1,), q: int = 2, *, _normalized=False):
        if _normalized:
            self.num, self.den, self.q = tuple(num), tuple(den), q
            return
        n, d = ptrim(num, q), ptrim(den, q)
        if not d:
            raise ZeroDivisionError("zero denominator")
        if not n:
            self.num, self.den, self.q = (), (1,), q
            return
        g = pgcd(n, d, q)
        if g != (1,):
            n, d = pdivmod(n, g, q)[0], pdivmod(d, g, q)[0]
        lead = pow(d[-1], q - 2, q)
        self.num, self.den, self.q = pscale(n, lead, q), pscale(d, lead, q), q

    @classmethod
    def const(cls, c: int, q: int) -> "RationalFunction":
        return cls((c % q,) if c % q else (), (1,), q, _normalized=True)

    @classmethod
    def poly(cls, p: Sequence[int], q: int) -> "RationalFunction":
        return cls(ptrim(p, q), (1,), q, _normalized=True)

    def _coerce(self, other) -> Optional["RationalFunction"]:
        if isinstance(other, RationalFunction):
            if other.q != self.q:
                raise FieldError("mixing different characteristics")
            return other
        if isinstance(other, int):
            return RationalFunction.const(other, self.q)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        q = self.q
        if self.den == o.den:
            return RationalFunction(padd(self.num, o.num, q), self.den, q)
        return RationalFunction(padd(pmul(self.num, o.den, q), pmul(o.num, self.den, q), q),
                                pmul(self.den, o.den, q), q)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(pscale(self.num, -1, self.q), self.den, self.q, _normalized=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        q = self.q
        if not self.num or not o.num:
            return RationalFunction.const(0, q)
        if self.den == (1,) and o.den == (1,):
            return RationalFunction(pmul(self.num, o.num, q), (1,), q, _normalized=True)
        return RationalFunction(pmul(self.num, o.num, q), pmul(self.den, o.den, q), q)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num, self.q)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = RationalFunction.const(1, self.q)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, (Fraction, float)) else None
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den, self.q))

    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def __repr__(self):
        if self.den == (1,):
            return f"RationalFunction({poly_str(self.num)} over F{self.q})"
        return f"RationalFunction(({poly_str(self.num)})/({poly_str(self.den)}) over F{self.q})"

    def __str__(self):
        if self.den == (1,):
            return poly_str(self.num)
        return f"({poly_str(self.num)})/({poly_str(self.den)})"


class QuadraticElement:
    """a + b*sqrt(d) with rational a, b and squarefree d != 0, 1."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    def _coerce(self, other) -> Optional["QuadraticElement"]:
        if isinstance(other, QuadraticElement):
            if other.d != self.d:
                raise FieldError("mixing different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticElement(other, 0, self.d)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticElement(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticElement(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticElement(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticElement(self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def conjugate(self) -> "QuadraticElement":
        return QuadraticElement(self.a, -self.b, self.d)

    def inverse(self) -> "QuadraticElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadraticElement(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadraticElement(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, QuadraticElement):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_zero(self) -> bool:
        return not (self.a or self.b)

    # real embedding sqrt(d) -> +sqrt(d); only meaningful for d > 0
    def real_sign(self) -> int:
        if self.d < 0:
            raise FieldError("no real embedding for imaginary quadratic elements")
        return _sign_a_plus_b_sqrt(self.a, self.b, self.d)

    def __abs__(self):
        return -self if self.real_sign() < 0 else self

    def __lt__(self, other):
        o = self._coerce(other)
        return (self - o).real_sign() < 0

    def __gt__(self, other):
        o = self._coerce(other)
        return (self - o).real_sign() > 0

    def __le__(self, other):
        return not self > other

    def __ge__(self, other):
        return not self < other

    def real_interval(self, bits: int):
        """Enclosure of a + b*sqrt(d) (positive root) with endpoints on the 2**-bits grid."""
        return sqrt_affine_interval(self.a, self.b, self.d, bits)

    def __repr__(self):
        return f"QuadraticElement({self.a}, {self.b}, d={self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        root = f"sqrt({self.d})"
        if self.a == 0:
            return f"{self.b}*{root}"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a} {sign} {abs(self.b)}*{root}"


def _sign_a_plus_b_sqrt(a: Fraction, b: Fraction, d: int) -> int:
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with d b^2
    diff = a * a - d * b * b
    if diff == 0:
        return 0
    return sa if diff > 0 else sb


def sqrt_affine_interval(a: Fraction, b: Fraction, d: int, bits: int):
    wp = bits + 4 + max(0, abs(b).numerator.bit_length() - abs(b).denominator.bit_length() + 1)
    s = 1 << wp
    r = iroot(d * s * s, 2)
    lo_s, hi_s = Fraction(r, s), Fraction(r if r * r == d * s * s else r + 1, s)
    if b >= 0:
        lo, hi = a + b * lo_s, a + b * hi_s
    else:
        lo, hi = a + b * hi_s, a + b * lo_s
    return down(lo, bits), up(hi, bits)


Element = Union[Fraction, QuadraticElement, RationalFunction]


# ---------------------------------------------------------------------------
# descriptor


@lru_cache(maxsize=None)
def _is_squarefree(n: int) -> bool:
    return all(e == 1 for e in sympy.factorint(abs(n)).values())


@dataclass(frozen=True)
class FieldInvariants:
    degree: int
    r1: Optional[int] = None
    r2: Optional[int] = None
    discriminant: Optional[int] = None
    roots_of_unity: Optional[int] = None
    genus: Optional[int] = None
    min_place_degree: Optional[int] = None
    effective_degree: Optional[int] = None
    rational_points: Optional[int] = None
    class_number: Optional[int] = None


@dataclass(frozen=True)
class FieldDescriptor:
    """Which ground field: kind in {"rational", "quadratic", "function"}; param is d or q."""

    kind: str
    param: Optional[int] = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.param is not None:
                raise FieldError("Q takes no parameter")
        elif self.kind == "quadratic":
            d = self.param
            if d is None or d in (0, 1) or not _is_squarefree(d):
                raise FieldError(f"d={d} must be a squarefree integer other than 0, 1")
        elif self.kind == "function":
            if self.param is None or not sympy.isprime(self.param):
                raise FieldError(f"q={self.param} must be prime")
        else:
            raise FieldError(f"unknown field kind {self.kind!r}")

    # constructors
    @classmethod
    def rational(cls) -> "FieldDescriptor":
        return cls("rational")

    @classmethod
    def quadratic(cls, d: int) -> "FieldDescriptor":
        return cls("quadratic", d)

    @classmethod
    def function(cls, q: int) -> "FieldDescriptor":
        return cls("function", q)

    @classmethod
    def parse(cls, text: str) -> "FieldDescriptor":
        """'rational' | 'Q' | 'quadratic:-1' | 'function:3' | 'F3(t)' | 'Q(sqrt(-1))'."""
        t = text.strip().replace(" ", "")
        if t in ("rational", "Q", "QQ"):
            return cls.rational()
        if t.startswith("quadratic:"):
            return cls.quadratic(int(t.split(":", 1)[1]))
        if t.startswith("function:"):
            return cls.function(int(t.split(":", 1)[1]))
        if t.startswith("Q(sqrt(") and t.endswith("))"):
            return cls.quadratic(int(t[7:-2]))
        if t.startswith("F") and t.endswith("(t)"):
            return cls.function(int(t[1:-3]))
        raise FieldError(f"cannot parse field {text!r}")

    def __str__(self):
        if self.kind == "rational":
            return "Q"
        if self.kind == "quadratic":
            return f"Q(sqrt({self.param}))"
        return f"F{self.param}(t)"

    @property
    def is_number_field(self) -> bool:
        return self.kind != "function"

    @property
    def d(self) -> int:
        return self.param  # type: ignore[return-value]

    @property
    def q(self) -> int:
        return self.param  # type: ignore[return-value]

    @property
    def degree(self) -> int:
        return 2 if self.kind == "quadratic" else 1

    def invariants(self) -> FieldInvariants:
        return field_invariants(self)

    # elements
    @property
    def zero(self) -> Element:
        return self.element(0)

    @property
    def one(self) -> Element:
        return self.element(1)

    def element(self, x) -> Element:
        if self.kind == "rational":
            if isinstance(x, (QuadraticElement, RationalFunction)):
                raise FieldError("not a rational number")
            return Fraction(x)
        if self.kind == "quadratic":
            if isinstance(x, QuadraticElement):
                if x.d != self.param:
                    raise FieldError("element of a different field")
                return x
            return QuadraticElement(Fraction(x), 0, self.param)
        if isinstance(x, RationalFunction):
            return x
        x = Fraction(x)
        return RationalFunction.const(x.numerator, self.param) / RationalFunction.const(x.denominator, self.param)

    def gen(self) -> Element:
        """sqrt(d) for quadratic fields, t for F_q(t)."""
        if self.kind == "quadratic":
            return QuadraticElement(0, 1, self.param)
        if self.kind == "function":
            return RationalFunction.poly((0, 1), self.param)
        raise FieldError("Q has no generator")

    def omega(self) -> Element:
        """Second element of the integral basis {1, omega} of O_K."""
        d = self.param
        if d % 4 == 1:
            return QuadraticElement(Fraction(1, 2), Fraction(1, 2), d)
        return QuadraticElement(0, 1, d)

    def is_zero(self, x: Element) -> bool:
        return not x

    # integral-basis coordinates for quadratic fields
    def to_integral_coords(self, x: QuadraticElement) -> Tuple[Fraction, Fraction]:
        if self.param % 4 == 1:
            return x.a - x.b, 2 * x.b
        return x.a, x.b

    def from_integral_coords(self, u, v) -> QuadraticElement:
        return self.element(u) + v * self.omega()

    def is_integral(self, x: Element) -> bool:
        if self.kind == "rational":
            return x.denominator == 1
        if self.kind == "quadratic":
            u, v = self.to_integral_coords(x)
            return u.denominator == 1 and v.denominator == 1
        return x.den == (1,)

    def roots_of_unity(self) -> List[Element]:
        if self.kind == "rational":
            return [Fraction(1), Fraction(-1)]
        if self.kind == "quadratic":
            K = self
            if self.param == -1:
                i = K.gen()
                return [K.one, i, -K.one, -i]
            if self.param == -3:
                z = QuadraticElement(Fraction(1, 2), Fraction(1, 2), -3)  # primitive 6th root
                out, acc = [], K.one
                for _ in range(6):
                    out.append(acc)
                    acc = acc * z
                return out
            return [K.one, -K.one]
        raise FieldError("function fields have the constants F_q^* instead")

    def constants(self) -> List[RationalFunction]:
        return [RationalFunction.const(c, self.param) for c in range(1, self.param)]

    # encodings
    def parse_element(self, enc) -> Element:
        return parse_element(self, enc)

    def format_element(self, x: Element):
        return format_element(self, x)


def field_invariants(f: FieldDescriptor) -> FieldInvariants:
    if f.kind == "rational":
        return FieldInvariants(degree=1, r1=1, r2=0, discriminant=1, roots_of_unity=2)
    if f.kind == "quadratic":
        d = f.param
        disc = d if d % 4 == 1 else 4 * d
        w = 4 if d == -1 else 6 if d == -3 else 2
        r1, r2 = (2, 0) if d > 0 else (0, 1)
        return FieldInvariants(degree=2, r1=r1, r2=r2, discriminant=disc, roots_of_unity=w)
    q = f.param
    return FieldInvariants(degree=1, genus=0, min_place_degree=1, effective_degree=1,
                           rational_points=q + 1, class_number=1)


# ---------------------------------------------------------------------------
# arithmetic entry point


def arith(f: FieldDescriptor, x: Element, y: Optional[Element], op: str):
    """add, sub, mul, div (binary) and conjugate, norm, trace (unary) in the field f."""
    x = f.element(x)
    if op in ("add", "sub", "mul", "div"):
        y = f.element(y)
        if op == "add":
            return x + y
        if op == "sub":
            return x - y
        if op == "mul":
            return x * y
        if not y:
            raise ZeroDivisionError("division by zero")
        return x / y
    if op == "conjugate":
        return x.conjugate() if f.kind == "quadratic" else x
    if op == "norm":
        return x.norm() if f.kind == "quadratic" else x
    if op == "trace":
        return x.trace() if f.kind == "quadratic" else x
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# text encodings


def _parse_fraction(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except ValueError as exc:
            raise FieldError(f"bad rational {s!r}") from exc
    raise FieldError(f"bad rational {s!r}")


def parse_element(f: FieldDescriptor, enc) -> Element:
    if f.kind == "rational":
        return _parse_fraction(enc)
    if f.kind == "quadratic":
        if isinstance(enc, str) and enc.strip().startswith("("):
            body = enc.strip()
            if not body.endswith(")"):
                raise FieldError(f"bad quadratic element {enc!r}")
            parts = body[1:-1].split(",")
            if len(parts) != 2:
                raise FieldError(f"bad quadratic element {enc!r}")
            return QuadraticElement(_parse_fraction(parts[0]), _parse_fraction(parts[1]), f.param)
        if isinstance(enc, list) and len(enc) == 2:
            return QuadraticElement(_parse_fraction(enc[0]), _parse_fraction(enc[1]), f.param)
        return QuadraticElement(_parse_fraction(enc), 0, f.param)
    q = f.param
    if isinstance(enc, dict):
        num = enc.get("num")
        den = enc.get("den", [1])
        if not isinstance(num, list) or not isinstance(den, list) or not all(
                isinstance(c, int) for c in num + den):
            raise FieldError(f"bad function-field element {enc!r}")
        if not ptrim(den, q):
            raise FieldError("zero denominator")
        return RationalFunction(num, den, q)
    if isinstance(enc, int):
        return RationalFunction.const(enc, q)
    if isinstance(enc, list) and all(isinstance(c, int) for c in enc):
        return RationalFunction.poly(enc, q)
    raise FieldError(f"bad function-field element {enc!r}")


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_element(f: FieldDescriptor, x: Element):
    if f.kind == "rational":
        return _fmt_fraction(Fraction(x))
    if f.kind == "quadratic":
        return f"({_fmt_fraction(x.a)}, {_fmt_fraction(x.b)})"
    return {"num": list(x.num) if x.num else [0], "den": list(x.den)}
