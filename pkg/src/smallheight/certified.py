"""Certified positive reals: exact closed forms with refinable dyadic enclosures.

A :class:`CertifiedReal` always carries an enclosure function ``bits -> (lo, hi)``
returning rational endpoints on the ``2**-bits`` grid. When the value is known in
closed form it also carries a :class:`ClosedForm`

    radicand ** (1/root) * pi ** pi_exp * e ** e_exp

with ``radicand`` a non-negative rational or a positive real-quadratic number
(embedded via the positive square root) and rational exponents. Closed forms make
equality decidable, which is what lets the height inequalities of the library be
certified even when they are tight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union

START_BITS = 64
MAX_BITS = 1024
_GUARD = 12

Interval = Tuple[Fraction, Fraction]


class UnresolvedComparison(ArithmeticError):
    """Enclosures still overlap at the maximal precision and equality is not provable."""


# ---------------------------------------------------------------------------
# integer / dyadic helpers


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def exact_root(x: Fraction, k: int) -> Optional[Fraction]:
    """The rational k-th root of x >= 0 if there is one."""
    if x < 0:
        return None
    a, b = x.numerator, x.denominator
    ra, rb = iroot(a, k), iroot(b, k)
    if ra ** k == a and rb ** k == b:
        return Fraction(ra, rb)
    return None


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def down(x: Fraction, bits: int) -> Fraction:
    return Fraction(_floor(x * (1 << bits)), 1 << bits)


def up(x: Fraction, bits: int) -> Fraction:
    return Fraction(_ceil(x * (1 << bits)), 1 << bits)


def _root_bounds(lo: Fraction, hi: Fraction, k: int, bits: int) -> Interval:
    scale = 1 << (k * bits)
    lo_n = max(0, _floor(lo * scale))
    hi_n = max(0, _ceil(hi * scale))
    r_lo = iroot(lo_n, k)
    r_hi = iroot(hi_n, k)
    if r_hi ** k < hi_n:
        r_hi += 1
    return Fraction(r_lo, 1 << bits), Fraction(r_hi, 1 << bits)


def _mul(a: Interval, b: Interval) -> Interval:
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(ps), max(ps)


def _inv(a: Interval) -> Interval:
    if a[0] <= 0 <= a[1]:
        raise ZeroDivisionError("interval contains zero")
    return 1 / a[1], 1 / a[0]


def _ipow(a: Interval, n: int) -> Interval:
    if n == 0:
        return Fraction(1), Fraction(1)
    if n < 0:
        return _inv(_ipow(a, -n))
    lo, hi = a
    if lo >= 0:
        return lo ** n, hi ** n
    if n % 2:
        return lo ** n, hi ** n
    m = max(-lo, hi)
    return (Fraction(0) if hi >= 0 else hi ** n), m ** n


def _outward(a: Interval, bits: int) -> Interval:
    return down(a[0], bits), up(a[1], bits)


@lru_cache(maxsize=64)
def _atan_inv(m: int, bits: int) -> Interval:
    # alternating series: consecutive partial sums bracket the value
    eps = Fraction(1, 1 << (bits + 4))
    s = Fraction(0)
    k = 0
    while True:
        term = Fraction(1, (2 * k + 1) * m ** (2 * k + 1))
        prev = s
        s = s + term if k % 2 == 0 else s - term
        if term < eps:
            return (min(prev, s), max(prev, s))
        k += 1


@lru_cache(maxsize=64)
def pi_bounds(bits: int) -> Interval:
    a = _atan_inv(5, bits + 8)
    b = _atan_inv(239, bits + 8)
    return down(16 * a[0] - 4 * b[1], bits), up(16 * a[1] - 4 * b[0], bits)


@lru_cache(maxsize=4096)
def exp_bounds(x: Fraction, bits: int) -> Interval:
    """Rigorous enclosure of exp(x) for rational x."""
    if x == 0:
        return Fraction(1), Fraction(1)
    s = 0
    ax = abs(x)
    while ax > Fraction(1, 2):
        ax /= 2
        s += 1
    y = x / (1 << s)
    magnitude = max(0, _ceil(x * 3 / 2)) if x > 0 else 0
    wp = bits + 2 * s + magnitude + 16
    term = Fraction(1)
    total = Fraction(1)
    k = 0
    tol = Fraction(1, 1 << (wp + 2))
    while True:
        k += 1
        term = term * y / k
        total += term
        tail = 2 * abs(term) * abs(y) / (k + 1)
        if tail < tol:
            break
    lo, hi = down(total - tail, wp), up(total + tail, wp)
    for _ in range(s):
        lo, hi = down(lo * lo, wp), up(hi * hi, wp)
    return down(lo, bits), up(hi, bits)


# ---------------------------------------------------------------------------
# closed forms


def _is_quadratic(r) -> bool:
    return not isinstance(r, (int, Fraction))


def _normalize_radicand(r):
    if _is_quadratic(r):
        if r.b == 0:
            return Fraction(r.a)
        return r
    return Fraction(r)


def _sign_real(r) -> int:
    """Sign of a rational or of a real-quadratic element under the positive embedding."""
    if not _is_quadratic(r):
        return (r > 0) - (r < 0)
    return r.real_sign()


def _radicand_interval(r, bits: int) -> Interval:
    if not _is_quadratic(r):
        return r, r
    return r.real_interval(bits)


@dataclass(frozen=True)
class ClosedForm:
    radicand: object  # Fraction or real QuadraticElement, >= 0
    root: int = 1
    pi_exp: Fraction = Fraction(0)
    e_exp: Fraction = Fraction(0)

    @staticmethod
    def make(radicand, root: int = 1, pi_exp=0, e_exp=0) -> "ClosedForm":
        radicand = _normalize_radicand(radicand)
        if _sign_real(radicand) < 0 and (root != 1 or pi_exp or e_exp):
            raise ValueError("only plain rationals may be negative")
        if root < 1:
            raise ValueError("root must be positive")
        if not _is_quadratic(radicand) and radicand > 0:
            # pull out the largest perfect power
            for g in sorted(_divisors(root), reverse=True):
                if g == 1:
                    break
                rr = exact_root(radicand, g)
                if rr is not None:
                    radicand, root = rr, root // g
                    break
        elif not _is_quadratic(radicand) and radicand == 0:
            root = 1
        return ClosedForm(radicand, root, Fraction(pi_exp), Fraction(e_exp))

    @property
    def rational(self) -> Optional[Fraction]:
        if self.root == 1 and not self.pi_exp and not self.e_exp and not _is_quadratic(self.radicand):
            return self.radicand
        return None

    def __mul__(self, other: "ClosedForm") -> Optional["ClosedForm"]:
        if _is_quadratic(self.radicand) and _is_quadratic(other.radicand):
            if self.radicand.d != other.radicand.d:
                return None
        sign = _sign_real(self.radicand) * _sign_real(other.radicand)
        a, b = abs(self.radicand), abs(other.radicand)
        m = self.root * other.root // math.gcd(self.root, other.root)
        pe, ee = self.pi_exp + other.pi_exp, self.e_exp + other.e_exp
        rad = a ** (m // self.root) * b ** (m // other.root)
        form = ClosedForm.make(rad, m, pe, ee)
        if sign < 0:
            if form.root != 1 or pe or ee:
                return None
            form = ClosedForm.make(-form.radicand)
        return form

    def pow(self, exponent: Fraction) -> "ClosedForm":
        exponent = Fraction(exponent)
        p, q = exponent.numerator, exponent.denominator
        rad = self.radicand
        if p < 0:
            rad = 1 / rad
            p = -p
        return ClosedForm.make(rad ** p, self.root * q, self.pi_exp * exponent, self.e_exp * exponent)

    def same_transcendentals(self, other: "ClosedForm") -> bool:
        return self.pi_exp == other.pi_exp and self.e_exp == other.e_exp

    def algebraic_cmp(self, other: "ClosedForm") -> int:
        """Exact sign of self - other, assuming equal transcendental parts."""
        sa, sb = _sign_real(self.radicand), _sign_real(other.radicand)
        if sa != sb or sa == 0:
            return (sa > sb) - (sa < sb)
        if sa < 0:
            return (self.radicand > other.radicand) - (self.radicand < other.radicand)
        m = self.root * other.root // math.gcd(self.root, other.root)
        a = self.radicand ** (m // self.root)
        b = other.radicand ** (m // other.root)
        if _is_quadratic(a) and _is_quadratic(b) and a.d != b.d:
            raise TypeError("radicands from different fields")
        return _sign_real(a - b)

    def provably_unequal(self, other: "ClosedForm") -> bool:
        if self.same_transcendentals(other):
            return self.algebraic_cmp(other) != 0
        # e^r and pi^r are transcendental for rational r != 0
        if (self.pi_exp == other.pi_exp) != (self.e_exp == other.e_exp):
            return _sign_real(self.radicand) != 0 or _sign_real(other.radicand) != 0
        return False

    def enclosure(self, bits: int) -> Interval:
        wp = bits + _GUARD
        lo, hi = _radicand_interval(self.radicand, wp + 4 * self.root)
        if self.root > 1:
            lo, hi = _root_bounds(lo, hi, self.root, wp)
        val = (lo, hi)
        if self.pi_exp:
            pe = self.pi_exp
            pb = _ipow(pi_bounds(wp + 8), pe.numerator)
            if pe.denominator > 1:
                pb = _root_bounds(pb[0], pb[1], pe.denominator, wp + 8)
            val = _outward(_mul(val, pb), wp)
        if self.e_exp:
            val = _outward(_mul(val, exp_bounds(self.e_exp, wp + 8)), wp)
        return _outward(val, bits)

    def __str__(self) -> str:
        parts = []
        rad = self.radicand
        if _is_quadratic(rad):
            base = f"({rad})"
            parts.append(base if self.root == 1 else f"{base}^(1/{self.root})")
        elif self.root == 1:
            if rad != 1 or (not self.pi_exp and not self.e_exp):
                parts.append(str(rad))
        else:
            coeff, rest = _extract_power(rad, self.root)
            if coeff != 1:
                parts.append(str(coeff))
            if rest != 1:
                parts.append(f"sqrt({rest})" if self.root == 2 else f"{rest}^(1/{self.root})")
        if self.pi_exp:
            parts.append("pi" if self.pi_exp == 1 else f"pi^({self.pi_exp})")
        if self.e_exp:
            parts.append("e" if self.e_exp == 1 else f"e^({self.e_exp})")
        return "*".join(parts) if parts else "1"


def _divisors(n: int):
    return [k for k in range(1, n + 1) if n % k == 0]


def _extract_power(x: Fraction, k: int) -> Tuple[Fraction, Fraction]:
    """Write x = c**k * rest with small primes pulled into c (cosmetic)."""
    c = Fraction(1)
    num, den = x.numerator, x.denominator
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        pk = p ** k
        while num % pk == 0:
            num //= pk
            c *= p
        while den % pk == 0:
            den //= pk
            c /= p
    return c, Fraction(num, den)


# ---------------------------------------------------------------------------


Number = Union[int, Fraction, "CertifiedReal"]


class CertifiedReal:
    """A real number with a refinable rigorous enclosure and an optional closed form."""

    __slots__ = ("form", "_encl", "_cache", "_refinable")

    def __init__(self, enclosure: Callable[[int], Interval], form: Optional[ClosedForm] = None,
                 refinable: bool = True):
        self.form = form
        self._encl = enclosure
        self._cache: dict = {}
        self._refinable = refinable

    # -- constructors -----------------------------------------------------
    @classmethod
    def closed(cls, form: ClosedForm) -> "CertifiedReal":
        return cls(form.enclosure, form)

    @classmethod
    def rational(cls, x) -> "CertifiedReal":
        return cls.closed(ClosedForm.make(Fraction(x)))

    @classmethod
    def radical(cls, radicand, root: int) -> "CertifiedReal":
        return cls.closed(ClosedForm.make(radicand, root))

    @classmethod
    def exp(cls, x: "CertifiedReal | Fraction | int") -> "CertifiedReal":
        if not isinstance(x, CertifiedReal):
            return cls.closed(ClosedForm.make(1, 1, 0, Fraction(x)))
        if x.exact is not None:
            return cls.closed(ClosedForm.make(1, 1, 0, x.exact))

        def encl(bits):
            lo, hi = x.interval(bits + 8)
            return down(exp_bounds(lo, bits + 4)[0], bits), up(exp_bounds(hi, bits + 4)[1], bits)

        return cls(encl)

    @classmethod
    def pi(cls) -> "CertifiedReal":
        return cls.closed(ClosedForm.make(1, 1, 1, 0))

    @classmethod
    def from_interval(cls, lo, hi) -> "CertifiedReal":
        """A fixed enclosure that cannot be refined (no exact value attached)."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("lo > hi")
        return cls(lambda bits: (lo, hi), None, refinable=False)

    # -- accessors --------------------------------------------------------
    @property
    def exact(self) -> Optional[Fraction]:
        return self.form.rational if self.form is not None else None

    def interval(self, bits: int = START_BITS) -> Interval:
        if bits not in self._cache:
            self._cache[bits] = self._encl(bits)
        return self._cache[bits]

    def __float__(self) -> float:
        lo, hi = self.interval(64)
        return float((lo + hi) / 2)

    def __repr__(self) -> str:
        if self.form is not None:
            return f"CertifiedReal({self.form})"
        lo, hi = self.interval(64)
        return f"CertifiedReal([{float(lo)!r}, {float(hi)!r}])"

    def __str__(self) -> str:
        return str(self.form) if self.form is not None else f"~{float(self):.12g}"

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _lift(x: Number) -> "CertifiedReal":
        return x if isinstance(x, CertifiedReal) else CertifiedReal.rational(x)

    def __mul__(self, other: Number) -> "CertifiedReal":
        other = self._lift(other)
        if self.form is not None and other.form is not None:
            try:
                form = self.form * other.form
            except (ValueError, TypeError):
                form = None
            if form is not None:
                return CertifiedReal.closed(form)
        a, b = self, other
        return CertifiedReal(lambda bits: _outward(_mul(a.interval(bits + _GUARD), b.interval(bits + _GUARD)), bits))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "CertifiedReal":
        return self * self._lift(other).pow(-1)

    def __rtruediv__(self, other: Number) -> "CertifiedReal":
        return self._lift(other) * self.pow(-1)

    def _like_terms(self, other: "CertifiedReal", sign: int) -> Optional["CertifiedReal"]:
        # x + y = x (1 + y/x) stays closed when y/x is rational
        if self.form is None or other.form is None or _sign_real(self.form.radicand) == 0:
            return None
        try:
            ratio = other.form * self.form.pow(-1)
        except (ValueError, TypeError, ZeroDivisionError):
            return None
        if ratio is None or ratio.rational is None:
            return None
        return self * (1 + sign * ratio.rational)

    def __add__(self, other: Number) -> "CertifiedReal":
        other = self._lift(other)
        if self.exact is not None and other.exact is not None:
            return CertifiedReal.rational(self.exact + other.exact)
        if self.exact == 0:
            return other
        if other.exact == 0:
            return self
        like = self._like_terms(other, 1)
        if like is not None:
            return like
        a, b = self, other

        def encl(bits):
            x, y = a.interval(bits + 2), b.interval(bits + 2)
            return down(x[0] + y[0], bits), up(x[1] + y[1], bits)

        return CertifiedReal(encl)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "CertifiedReal":
        other = self._lift(other)
        if self.exact is not None and other.exact is not None:
            return CertifiedReal.rational(self.exact - other.exact)
        if other.exact == 0:
            return self
        like = self._like_terms(other, -1)
        if like is not None:
            return like
        a, b = self, other

        def encl(bits):
            x, y = a.interval(bits + 2), b.interval(bits + 2)
            return down(x[0] - y[1], bits), up(x[1] - y[0], bits)

        return CertifiedReal(encl)

    def __rsub__(self, other: Number) -> "CertifiedReal":
        return self._lift(other) - self

    def pow(self, exponent) -> "CertifiedReal":
        exponent = Fraction(exponent)
        if self.form is not None:
            return CertifiedReal.closed(self.form.pow(exponent))
        p, q = exponent.numerator, exponent.denominator
        a = self

        def encl(bits):
            wp = bits + _GUARD + 4 * q
            lo, hi = a.interval(wp + 8 * abs(p))
            if lo < 0:
                raise ValueError("fractional power of a possibly negative value")
            if q > 1:
                lo, hi = _root_bounds(lo, hi, q, wp)
            return _outward(_ipow((lo, hi), p), bits)

        return CertifiedReal(encl)

    def __pow__(self, exponent) -> "CertifiedReal":
        return self.pow(exponent)

    def sqrt(self) -> "CertifiedReal":
        return self.pow(Fraction(1, 2))

    # -- comparison -------------------------------------------------------
    def __lt__(self, other):
        return certified_compare(self, self._lift(other)) < 0

    def __le__(self, other):
        return certified_compare(self, self._lift(other)) <= 0

    def __gt__(self, other):
        return certified_compare(self, self._lift(other)) > 0

    def __ge__(self, other):
        return certified_compare(self, self._lift(other)) >= 0

    def certified_eq(self, other) -> bool:
        return certified_compare(self, self._lift(other)) == 0


LESS, EQUAL, GREATER = -1, 0, 1


def set_start_bits(bits: int) -> None:
    """Initial precision for interval refinement in comparisons."""
    global START_BITS
    if not 1 <= bits <= MAX_BITS:
        raise ValueError(f"precision must lie in [1, {MAX_BITS}]")
    START_BITS = bits


def certified_compare(x: CertifiedReal, y: CertifiedReal, start_bits: Optional[int] = None,
                      max_bits: int = MAX_BITS) -> int:
    """Return -1, 0 or 1. Equality is only ever reported when it is proved exactly."""
    if start_bits is None:
        start_bits = START_BITS
    x = CertifiedReal._lift(x)
    y = CertifiedReal._lift(y)
    if x.exact is not None and y.exact is not None:
        return (x.exact > y.exact) - (x.exact < y.exact)
    if x.form is not None and y.form is not None and x.form.same_transcendentals(y.form):
        try:
            return x.form.algebraic_cmp(y.form)
        except TypeError:
            pass
    bits = start_bits
    while bits <= max_bits:
        xl, xh = x.interval(bits)
        yl, yh = y.interval(bits)
        if xh < yl:
            return LESS
        if xl > yh:
            return GREATER
        if not (x._refinable and y._refinable):
            break
        bits *= 2
    raise UnresolvedComparison(f"cannot separate {x!r} and {y!r} at {max_bits} bits")


def decimal_interval(x: CertifiedReal, digits: int = 20, bits: int = 128) -> Tuple[str, str]:
    """Outward-rounded decimal strings for the enclosure of x."""
    lo, hi = x.interval(max(bits, int(digits * 3.33) + 8))
    scale = 10 ** digits
    lo_i = _floor(lo * scale)
    hi_i = _ceil(hi * scale)
    return _fmt_fixed(lo_i, digits), _fmt_fixed(hi_i, digits)


def _fmt_fixed(n: int, digits: int) -> str:
    sign = "-" if n < 0 else ""
    n = abs(n)
    whole, frac = divmod(n, 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
