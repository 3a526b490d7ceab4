"""Places, absolute values, global heights H, cal-H and h, and twisted heights."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from . import fields as F
from .certified import CertifiedReal, ClosedForm, certified_compare
from .fields import FieldDescriptor, QuadraticElement, RationalFunction
from .linalg import INTEGERS, det, ring_hnf_rows


# ---------------------------------------------------------------------------
# field inference


def infer_field(values) -> FieldDescriptor:
    for x in values:
        if isinstance(x, QuadraticElement):
            return FieldDescriptor.quadratic(x.d)
        if isinstance(x, RationalFunction):
            return FieldDescriptor.function(x.q)
    return FieldDescriptor.rational()


def _coerce(x, field: Optional[FieldDescriptor]):
    xs = list(x)
    f = field or infer_field(xs)
    return [f.element(v) for v in xs], f


# ---------------------------------------------------------------------------
# places


@dataclass(frozen=True)
class Place:
    """A place of Q, Q(sqrt d) or F_q(t).

    kind: "inf" / "p" over Q; "arch" / "ideal" over Q(sqrt d); "ff_inf" / "ff" over F_q(t).
    For "arch", index 1 is sqrt(d) -> +sqrt(d) and 2 its conjugate (one complex place when d < 0).
    For "ideal", ``root`` identifies a split prime by the residue of omega; ``split`` is
    one of "split", "inert", "ramified".
    """

    kind: str
    p: Optional[int] = None
    index: Optional[int] = None
    root: Optional[int] = None
    split: Optional[str] = None
    poly: Optional[Tuple[int, ...]] = None
    local_degree: int = 1
    deg: int = 1

    @property
    def archimedean(self) -> bool:
        return self.kind in ("inf", "arch")

    def __str__(self):
        if self.kind == "inf":
            return "inf"
        if self.kind == "p":
            return f"p={self.p}"
        if self.kind == "arch":
            return f"arch{self.index}"
        if self.kind == "ideal":
            return f"ideal(p={self.p},{self.split}" + (f",omega={self.root})" if self.root is not None else ")")
        if self.kind == "ff_inf":
            return "inf"
        return f"({F.poly_str(self.poly)})"


def infinite_places(f: FieldDescriptor) -> List[Place]:
    if f.kind == "rational":
        return [Place("inf")]
    if f.kind == "quadratic":
        if f.d > 0:
            return [Place("arch", index=1), Place("arch", index=2)]
        return [Place("arch", index=1, local_degree=2)]
    return [Place("ff_inf")]


def _omega_minpoly(d: int) -> Tuple[int, int]:
    # omega^2 = b*omega + c
    if d % 4 == 1:
        return 1, (d - 1) // 4
    return 0, d


def primes_above(f: FieldDescriptor, p: int) -> List[Place]:
    """The prime ideals of O_K over the rational prime p."""
    if f.kind == "rational":
        return [Place("p", p=p)]
    if f.kind != "quadratic":
        raise F.FieldError("rational primes only make sense for number fields")
    disc = f.invariants().discriminant
    if disc % p == 0:
        return [Place("ideal", p=p, split="ramified", local_degree=2)]
    b, c = _omega_minpoly(f.d)
    if p == 2:
        roots = [r for r in range(2) if (r * r - b * r - c) % 2 == 0]
    else:
        half = pow(2, -1, p)
        roots = sorted({(b + s) * half % p
                        for s in sympy.sqrt_mod((b * b + 4 * c) % p, p, all_roots=True)})
    if roots:
        return [Place("ideal", p=p, root=r, split="split", local_degree=1) for r in roots]
    return [Place("ideal", p=p, split="inert", local_degree=2)]


def ff_place(poly: Sequence[int], q: int) -> Place:
    poly = F.pmonic(F.ptrim(poly, q), q)
    unit, fac = F.pfactor(poly, q)
    if len(fac) != 1 or list(fac.values()) != [1] or F.pdeg(poly) < 1:
        raise F.FieldError(f"{F.poly_str(poly)} is not irreducible over F_{q}")
    return Place("ff", poly=poly, deg=F.pdeg(poly))


def ord_p(n: int, p: int) -> int:
    if p < 2 or n == 0:
        raise ValueError("ord_p needs a prime p >= 2 and n != 0")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def ord_rational(x: Fraction, p: int) -> int:
    return ord_p(x.numerator, p) - ord_p(x.denominator, p)


def _integral_split(f: FieldDescriptor, x: QuadraticElement) -> Tuple[int, int, int]:
    """x = (U + V*omega)/m with integers U, V, m."""
    u, v = f.to_integral_coords(x)
    m = math.lcm(u.denominator, v.denominator)
    return int(u * m), int(v * m), m


def _hensel_root(b: int, c: int, r0: int, p: int, k: int) -> int:
    """Root of X^2 - bX - c in Z/p^k lifting the simple root r0 mod p."""
    r, mod = r0 % p, p
    while mod < p ** k:
        mod = min(mod * mod, p ** k)
        fr = r * r - b * r - c
        dfr = 2 * r - b
        r = (r - fr * pow(dfr, -1, mod)) % mod
    return r


def ord_place(x, v: Place, f: FieldDescriptor) -> int:
    """Order of a nonzero element at a non-archimedean place."""
    if v.kind == "p":
        return ord_rational(Fraction(x), v.p)
    if v.kind == "ff":
        q = f.q
        return _ord_poly(x.num, v.poly, q) - _ord_poly(x.den, v.poly, q)
    if v.kind == "ff_inf":
        return F.pdeg(x.den) - F.pdeg(x.num)
    if v.kind != "ideal":
        raise ValueError("archimedean place has no order")
    U, V, m = _integral_split(f, x)
    p = v.p
    n_y = U * U + (U * V if f.d % 4 == 1 else 0) - _omega_minpoly(f.d)[1] * V * V
    n_y = abs(n_y)
    if v.split == "inert":
        oy = ord_p(n_y, p) // 2
        return oy - ord_p(m, p)
    if v.split == "ramified":
        return ord_p(n_y, p) - 2 * ord_p(m, p)
    k = ord_p(n_y, p) + 1
    b, c = _omega_minpoly(f.d)
    r = _hensel_root(b, c, v.root, p, k)
    return min(ord_p((U + V * r) % p ** k or p ** k, p), k) - ord_p(m, p)


def _ord_poly(a, pi, q) -> int:
    k = 0
    while a:
        quo, rem = F.pdivmod(a, pi, q)
        if rem:
            break
        a = quo
        k += 1
    return k


def norm_of_ideal_place(v: Place) -> int:
    if v.split == "inert":
        return v.p * v.p
    return v.p


def abs_value(x, v: Place, field: Optional[FieldDescriptor] = None) -> CertifiedReal:
    """|x|_v, normalized to extend the usual absolute value on Q_p, R or the degree valuation."""
    f = field or infer_field([x])
    x = f.element(x)
    if not x:
        return CertifiedReal.rational(0)
    if v.kind == "inf":
        return CertifiedReal.rational(abs(x))
    if v.kind == "p":
        return CertifiedReal.rational(Fraction(v.p) ** (-ord_rational(x, v.p)))
    if v.kind == "arch":
        if f.d < 0:
            return CertifiedReal.radical(x.norm(), 2)
        y = x if v.index == 1 else x.conjugate()
        return CertifiedReal.closed(ClosedForm.make(abs(y)))
    if v.kind == "ideal":
        k = ord_place(x, v, f)
        if v.split == "ramified":
            return CertifiedReal.radical(Fraction(v.p) ** (-k), 2)
        return CertifiedReal.rational(Fraction(v.p) ** (-k))
    if v.kind == "ff_inf":
        return CertifiedReal.exp(F.pdeg(x.num) - F.pdeg(x.den))
    return CertifiedReal.exp(-v.deg * ord_place(x, v, f))


def local_height(x: Sequence, v: Place, field: Optional[FieldDescriptor] = None) -> CertifiedReal:
    """H_v(x) = max_i |x_i|_v ** d_v."""
    xs, f = _coerce(x, field)
    best = None
    for xi in xs:
        a = abs_value(xi, v, f)
        if best is None or certified_compare(a, best) > 0:
            best = a
    return best.pow(v.local_degree)


# ---------------------------------------------------------------------------
# product formula


@dataclass
class ProductFormulaResult:
    ok: bool
    factors: List[Tuple[Place, CertifiedReal]]
    detail: str = ""

    def __bool__(self):
        return self.ok


def relevant_places(a, f: FieldDescriptor) -> List[Place]:
    """Non-archimedean places where the nonzero element a has nonzero order."""
    if f.kind == "rational":
        a = Fraction(a)
        ps = set(sympy.factorint(abs(a.numerator))) | set(sympy.factorint(a.denominator))
        ps.discard(1)
        return [Place("p", p=p) for p in sorted(ps)]
    if f.kind == "quadratic":
        U, V, m = _integral_split(f, a)
        y = f.from_integral_coords(U, V)
        n_y = int(abs(y.norm()))
        ps = set(sympy.factorint(n_y)) | set(sympy.factorint(abs(m)))
        ps.discard(1)
        out = []
        for p in sorted(ps):
            for v in primes_above(f, p):
                if ord_place(a, v, f):
                    out.append(v)
        return out
    q = f.q
    out = []
    for part in (a.num, a.den):
        _, fac = F.pfactor(part, q)
        for pi in fac:
            out.append(Place("ff", poly=pi, deg=F.pdeg(pi)))
    return sorted(out, key=lambda v: (v.deg, v.poly))


def product_formula_check(a, field: Optional[FieldDescriptor] = None) -> ProductFormulaResult:
    """Exact check that prod_v |a|_v^{d_v} = 1 for a nonzero element a."""
    f = field or infer_field([a])
    a = f.element(a)
    if not a:
        raise ZeroDivisionError("product formula needs a nonzero element")
    factors = []
    if f.kind == "rational":
        prod = abs(a)
        factors.append((Place("inf"), CertifiedReal.rational(abs(a))))
        for v in relevant_places(a, f):
            val = Fraction(v.p) ** (-ord_rational(a, v.p))
            factors.append((v, CertifiedReal.rational(val)))
            prod *= val
        return ProductFormulaResult(prod == 1, factors, f"product={prod}")
    if f.kind == "quadratic":
        arch = abs(a.norm())  # prod over archimedean places of |a|_v^{d_v}
        for v in infinite_places(f):
            factors.append((v, abs_value(a, v, f).pow(v.local_degree)))
        fin = Fraction(1)
        for v in relevant_places(a, f):
            k = ord_place(a, v, f)
            val = Fraction(norm_of_ideal_place(v)) ** (-k)
            factors.append((v, CertifiedReal.rational(val)))
            fin *= val
        # independent route: norm of the principal ideal via HNF
        hnf_fin = finite_part([a], f)
        ok = fin * arch == 1 and hnf_fin == fin
        return ProductFormulaResult(ok, factors, f"finite={fin} hnf={hnf_fin} |N|={arch}")
    total = F.pdeg(a.num) - F.pdeg(a.den)
    factors.append((Place("ff_inf"), CertifiedReal.exp(total)))
    for v in relevant_places(a, f):
        k = ord_place(a, v, f)
        factors.append((v, CertifiedReal.exp(-v.deg * k)))
        total += -v.deg * k
    return ProductFormulaResult(total == 0, factors, f"exponent sum={total}")


# ---------------------------------------------------------------------------
# global heights


def ideal_norm(xs: Sequence[QuadraticElement], f: FieldDescriptor) -> Fraction:
    """Norm of the fractional ideal generated by the coordinates (HNF index route)."""
    om = f.omega()
    rows = []
    for x in xs:
        for y in (x, x * om):
            rows.append(f.to_integral_coords(y))
    den = 1
    for r in rows:
        for c in r:
            den = math.lcm(den, c.denominator)
    irows = [[int(c * den) for c in r] for r in rows]
    h = ring_hnf_rows(irows, INTEGERS)
    index = abs(h[0][0] * h[1][1])
    return Fraction(index, den * den)


def finite_part(x: Sequence, field: Optional[FieldDescriptor] = None, normalized: bool = False):
    """prod_{v finite} H_v(x) as an exact rational (before the 1/d root).

    With ``normalized=True`` return the 1/d-th root as a CertifiedReal, which is the
    finite contribution to H(x). Over F_q(t) the value is e^{...}, always returned as
    a CertifiedReal.
    """
    xs, f = _coerce(x, field)
    if not any(xs):
        raise ValueError("finite part of the zero vector")
    if f.kind == "rational":
        den = 1
        for v in xs:
            den = math.lcm(den, v.denominator)
        g = 0
        for v in xs:
            g = math.gcd(g, int(v * den))
        val = Fraction(den, g)
        return CertifiedReal.rational(val) if normalized else val
    if f.kind == "quadratic":
        val = 1 / ideal_norm([v for v in xs if v], f)
        return CertifiedReal.radical(val, 2) if normalized else val
    y, _ = _ff_clear(xs, f.q)
    g = ()
    for p in y:
        g = F.pgcd(g, p, f.q) if g else F.pmonic(p, f.q) if p else g
    den_deg = _ff_den_deg(xs, f.q)
    return CertifiedReal.exp(den_deg - F.pdeg(g))


def _ff_clear(xs, q):
    den = (1,)
    for v in xs:
        den = F.pdivmod(F.pmul(den, v.den, q), F.pgcd(den, v.den, q), q)[0]
    y = [F.pdivmod(F.pmul(v.num, den, q), v.den, q)[0] for v in xs]
    return y, den


def _ff_den_deg(xs, q):
    return F.pdeg(_ff_clear(xs, q)[1])


def ff_height_exponent(x: Sequence[RationalFunction], q: int) -> int:
    """log H(x) over F_q(t): max deg - deg gcd after clearing denominators."""
    y, _ = _ff_clear(x, q)
    g = ()
    for p in y:
        if p:
            g = F.pgcd(g, p, q) if g else F.pmonic(p, q)
    return max(F.pdeg(p) for p in y if p) - F.pdeg(g)


def _q_primitive(xs: Sequence[Fraction]) -> List[int]:
    den = 1
    for v in xs:
        den = math.lcm(den, v.denominator)
    y = [int(v * den) for v in xs]
    g = 0
    for v in y:
        g = math.gcd(g, v)
    return [v // g for v in y]


def _max_real(values: Sequence[QuadraticElement]) -> QuadraticElement:
    best = values[0]
    for v in values[1:]:
        if (v - best).real_sign() > 0:
            best = v
    return best


def height_H(x: Sequence, field: Optional[FieldDescriptor] = None) -> CertifiedReal:
    """Absolute multiplicative height H(x) of a nonzero vector."""
    xs, f = _coerce(x, field)
    if not any(xs):
        raise ValueError("H is undefined at the zero vector")
    if f.kind == "rational":
        y = _q_primitive(xs)
        return CertifiedReal.rational(max(abs(v) for v in y))
    if f.kind == "quadratic":
        inv_norm = 1 / ideal_norm([v for v in xs if v], f)
        if f.d < 0:
            return CertifiedReal.radical(inv_norm * max(v.norm() for v in xs), 2)
        s1 = _max_real([abs(v) for v in xs])
        s2 = _max_real([abs(v.conjugate()) for v in xs])
        return CertifiedReal.radical(s1 * s2 * inv_norm, 2)
    return CertifiedReal.exp(ff_height_exponent(xs, f.q))


def height_cal_H(x: Sequence, field: Optional[FieldDescriptor] = None) -> CertifiedReal:
    """Height with the Euclidean norm at archimedean places."""
    xs, f = _coerce(x, field)
    if not any(xs):
        raise ValueError("height of the zero vector")
    if f.kind == "rational":
        y = _q_primitive(xs)
        return CertifiedReal.radical(sum(v * v for v in y), 2)
    if f.kind == "quadratic":
        inv_norm = 1 / ideal_norm([v for v in xs if v], f)
        if f.d < 0:
            return CertifiedReal.radical(inv_norm * sum(v.norm() for v in xs), 2)
        s = sum((v * v for v in xs), QuadraticElement(0, 0, f.d))
        return CertifiedReal.radical(s.norm() * inv_norm * inv_norm, 4)
    return CertifiedReal.exp(ff_height_exponent(xs, f.q))


def height_h(x: Sequence, field: Optional[FieldDescriptor] = None) -> CertifiedReal:
    """Inhomogeneous height h(x) = H(1, x)."""
    xs, f = _coerce(x, field)
    return height_H([f.one] + xs, f)


def weil_height(a, field: Optional[FieldDescriptor] = None) -> CertifiedReal:
    f = field or infer_field([a])
    return height_h([a], f)


def delta(f: FieldDescriptor) -> int:
    return 1 if f.is_number_field else 0


@dataclass
class SumHeightCheck:
    ok: bool
    lhs: CertifiedReal
    rhs: CertifiedReal

    def __bool__(self):
        return self.ok


def sum_height_bound_check(xi: Sequence, xs: Sequence[Sequence],
                           field: Optional[FieldDescriptor] = None) -> SumHeightCheck:
    """h(sum xi_i x_i) <= L^delta h(xi) prod h(x_i)."""
    allv = list(xi) + [c for v in xs for c in v]
    f = field or infer_field(allv)
    xi = [f.element(c) for c in xi]
    vecs = [[f.element(c) for c in v] for v in xs]
    n = len(vecs[0])
    s = [f.zero] * n
    for c, v in zip(xi, vecs):
        s = [a + c * b for a, b in zip(s, v)]
    lhs = height_h(s, f)
    rhs = CertifiedReal.rational(len(xi) ** delta(f)) * height_h(xi, f)
    for v in vecs:
        rhs = rhs * height_h(v, f)
    return SumHeightCheck(certified_compare(lhs, rhs) <= 0, lhs, rhs)


# ---------------------------------------------------------------------------
# twisted heights


@dataclass
class TwistedOperator:
    """Adelic matrix given by finitely many local components; identity elsewhere."""

    N: int
    field: FieldDescriptor
    components: Dict[Place, list] = dc_field(default_factory=dict)

    def __post_init__(self):
        for v, m in self.components.items():
            m2 = [[self.field.element(c) for c in row] for row in m]
            if len(m2) != self.N or any(len(r) != self.N for r in m2):
                raise ValueError(f"component at {v} is not {self.N}x{self.N}")
            if not det(m2):
                raise ValueError(f"component at {v} is singular")
            self.components[v] = m2

    @classmethod
    def identity(cls, N: int, field: FieldDescriptor) -> "TwistedOperator":
        return cls(N, field, {})


def is_isometry(m, v: Place, f: FieldDescriptor) -> bool:
    """Whether the local component preserves the local sup-norm."""
    if v.archimedean:
        for row in m:
            nz = [c for c in row if c]
            if len(nz) != 1:
                return False
        for col in zip(*m):
            if sum(1 for c in col if c) != 1:
                return False
        one = CertifiedReal.rational(1)
        return all(certified_compare(abs_value(c, v, f), one) == 0 for row in m for c in row if c)
    one = CertifiedReal.rational(1)
    if any(certified_compare(abs_value(c, v, f), one) > 0 for row in m for c in row if c):
        return False
    return certified_compare(abs_value(det(m), v, f), one) == 0


def local_dilation(m, v: Place, f: FieldDescriptor) -> CertifiedReal:
    if is_isometry(m, v, f):
        return CertifiedReal.rational(1)
    total = CertifiedReal.rational(0)
    for row in m:
        for c in row:
            if c:
                total = total + abs_value(c, v, f)
    return total


def dilation(A: TwistedOperator) -> CertifiedReal:
    """C(A) = prod_v C_v(A)^{d_v/d}."""
    f = A.field
    out = CertifiedReal.rational(1)
    for v, m in A.components.items():
        out = out * local_dilation(m, v, f).pow(Fraction(v.local_degree, f.degree))
    return out


def twisted_height(A: TwistedOperator, x: Sequence) -> CertifiedReal:
    """H_A(x): H(x) corrected by H_v(A_v x)/H_v(x) at the stored places."""
    f = A.field
    xs = [f.element(c) for c in x]
    if not any(xs):
        raise ValueError("twisted height of the zero vector")
    out = height_H(xs, f)
    for v, m in A.components.items():
        ax = [sum((a * b for a, b in zip(row, xs)), f.zero) for row in m]
        ratio = local_height(ax, v, f) / local_height(xs, v, f)
        out = out * ratio.pow(Fraction(1, f.degree))
    return out


@dataclass
class TwistedCheck:
    ok: bool
    twisted: CertifiedReal
    dilation: CertifiedReal
    height: CertifiedReal

    def __bool__(self):
        return self.ok


def twisted_check(A: TwistedOperator, x: Sequence) -> TwistedCheck:
    """Certify H_A(x) <= C(A) H(x)."""
    ha = twisted_height(A, x)
    c = dilation(A)
    h = height_H([A.field.element(v) for v in x], A.field)
    return TwistedCheck(certified_compare(ha, c * h) <= 0, ha, c, h)
