"""Lattice point counts in cubes, Minkowski and FML lattices, and the grid sets S_R(K)."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence

from . import fields as F
from .certified import CertifiedReal, certified_compare, iroot
from .fields import FieldDescriptor, QuadraticElement, RationalFunction
from .heights import weil_height
from .linalg import INTEGERS, det_int, ring_hnf_rows


class PreconditionError(ValueError):
    """A lemma's hypotheses are not met by the given data."""


def _cr(x) -> CertifiedReal:
    return x if isinstance(x, CertifiedReal) else CertifiedReal.rational(x)


# ---------------------------------------------------------------------------
# full-rank lattices with an upper triangular basis


@dataclass
class CubeCount:
    exact: int
    lower: Optional[CertifiedReal]
    upper: Optional[CertifiedReal]
    ok: bool
    params: dict = dc_field(default_factory=dict)

    def __bool__(self):
        return self.ok


def count_upper_triangular(A: Sequence[Sequence], R, z: Optional[Sequence] = None) -> int:
    """|Lambda cap (C_R + z)| where the columns of the upper triangular A are a basis."""
    n = len(A)
    A = [[Fraction(c) for c in row] for row in A]
    z = [Fraction(c) for c in (z or [0] * n)]
    R = Fraction(R)
    k = [0] * n

    def rec(i):
        # coordinate i = A[i][i] k_i + sum_{j>i} A[i][j] k_j
        rest = sum((A[i][j] * k[j] for j in range(i + 1, n)), Fraction(0))
        a = A[i][i]
        lo = (z[i] - R - rest) / a
        hi = (z[i] + R - rest) / a
        if a < 0:
            lo, hi = hi, lo
        first = -((-lo.numerator) // lo.denominator)
        last = hi.numerator // hi.denominator
        if i == 0:
            return max(0, last - first + 1)
        total = 0
        for ki in range(first, last + 1):
            k[i] = ki
            total += rec(i - 1)
        k[i] = 0
        return total

    return rec(n - 1)


def cube_count_fullrank(A: Sequence[Sequence], R, z: Optional[Sequence] = None,
                        c=None) -> CubeCount:
    """Exact count together with the two-sided bound for an upper triangular basis."""
    n = len(A)
    for i in range(n):
        for j in range(i):
            if A[i][j] != 0:
                raise PreconditionError("basis matrix is not upper triangular")
    diag = [Fraction(A[i][i]) for i in range(n)]
    if any(x <= 0 for x in diag):
        raise PreconditionError("diagonal entries must be positive")
    c = Fraction(c) if c is not None else min(diag)
    if any(x < c for x in diag) or c <= 0:
        raise PreconditionError("diagonal entries must be >= c > 0")
    R = Fraction(R)
    delta = math.prod(diag)
    if 2 * R < max(delta / c ** (n - 1), c):
        raise PreconditionError("2R must be at least max(Delta / c^(n-1), c)")
    exact = count_upper_triangular(A, R, z)
    lower = (2 * R * c ** (n - 1) / delta - 1) * (2 * R / c - 1) ** (n - 1)
    upper = (2 * R * c ** (n - 1) / delta + 1) * (2 * R / c + 1) ** (n - 1)
    ok = lower <= exact <= upper
    return CubeCount(exact, _cr(lower), _cr(upper), ok, {"c": c, "Delta": delta, "R": R})


# ---------------------------------------------------------------------------
# sublattices of Z^n


def grassmann_max(basis: Sequence[Sequence[int]]) -> int:
    """Largest absolute k x k minor of a k x n integer basis."""
    k = len(basis)
    n = len(basis[0])
    best = 0
    for cols in itertools.combinations(range(n), k):
        best = max(best, abs(det_int([[row[j] for j in cols] for row in basis])))
    return best


def count_sublattice(basis: Sequence[Sequence[int]], R) -> int:
    """|Lambda cap C_R^n| for the lattice spanned by integer rows."""
    h = ring_hnf_rows(basis, INTEGERS)
    n = len(h[0])
    R = Fraction(R)
    pivots = [next(j for j, x in enumerate(row) if x) for row in h]
    k = len(h)

    def rec(i, partial):
        if i == k:
            return 1 if all(abs(x) <= R for x in partial) else 0
        p = pivots[i]
        a = h[i][p]
        base = partial[p]
        lo = (-R - base) / a
        hi = (R - base) / a
        if a < 0:
            lo, hi = hi, lo
        total = 0
        for c in range(-((-lo.numerator) // lo.denominator), hi.numerator // hi.denominator + 1):
            total += rec(i + 1, [x + c * y for x, y in zip(partial, h[i])])
        return total

    return rec(0, [0] * n)


def cube_count_sublattice(basis: Sequence[Sequence[int]], R) -> CubeCount:
    """Exact count with the bounds for a rank n-l sublattice of Z^n."""
    k = len(basis)
    n = len(basis[0])
    l = n - k
    if not 1 <= l <= n - 1:
        raise PreconditionError("need 1 <= l <= n - 1")
    from .linalg import rank
    if rank([[Fraction(c) for c in r] for r in basis]) != k:
        raise PreconditionError("basis rows are dependent")
    R = Fraction(R)
    delta = grassmann_max(basis)
    exact = count_sublattice(basis, R)
    upper = (2 * R / delta + 1) * (2 * R + 1) ** (k - 1)
    lower = None
    step = k * delta
    if R > 0 and R.denominator == 1 and R.numerator % step == 0:
        lower = (2 * R) ** k / (Fraction(k) ** k * delta)
    ok = exact <= upper and (lower is None or lower <= exact)
    return CubeCount(exact, _cr(lower) if lower is not None else None, _cr(upper), ok,
                     {"Delta": delta, "n": n, "l": l, "R": R})


# ---------------------------------------------------------------------------
# number fields


@dataclass
class MinkowskiLattice:
    field: FieldDescriptor
    basis_elements: list
    images: List[List[CertifiedReal]]
    det_squared: Fraction
    det: CertifiedReal
    ok: bool


def sigma(x, f: FieldDescriptor) -> List[CertifiedReal]:
    """Real embeddings first, then (Re, Im) of the complex embedding."""
    x = f.element(x)
    if f.kind == "rational":
        return [CertifiedReal.rational(x)]
    if f.d > 0:
        return [_signed_real(x), _signed_real(x.conjugate())]
    re = CertifiedReal.rational(x.a)
    im_val = CertifiedReal.radical(x.b * x.b * abs(f.d), 2)
    if x.b < 0:
        im_val = -1 * im_val
    return [re, im_val]


def _signed_real(x: QuadraticElement) -> CertifiedReal:
    from .certified import ClosedForm
    s = x.real_sign()
    if s >= 0:
        return CertifiedReal.closed(ClosedForm.make(x))
    return -1 * CertifiedReal.closed(ClosedForm.make(-x))


def minkowski_embed(f: FieldDescriptor) -> MinkowskiLattice:
    """sigma(O_K) with the determinant identity det^2 = |D| / 4^{r2} checked exactly."""
    inv = f.invariants()
    if f.kind == "rational":
        return MinkowskiLattice(f, [Fraction(1)], [[CertifiedReal.rational(1)]], Fraction(1),
                                CertifiedReal.rational(1), True)
    om = f.omega()
    basis = [f.one, om]
    images = [sigma(b, f) for b in basis]
    if f.d > 0:
        diff = om.conjugate() - om  # sigma1(1) sigma2(om) - sigma2(1) sigma1(om)
        det2 = (diff * diff).a
    else:
        det2 = om.b * om.b * abs(f.d)
    expected = Fraction(abs(inv.discriminant), 4 ** inv.r2)
    return MinkowskiLattice(f, basis, images, det2, CertifiedReal.radical(det2, 2), det2 == expected)


def _r_power(f: FieldDescriptor, R) -> Fraction:
    """R^(2d) as an exact rational."""
    d = f.degree
    R = _cr(R)
    val = R.pow(2 * d).exact
    if val is None:
        raise ValueError("R^(2d) must be rational for exact enumeration")
    return val


def in_S_R(x, f: FieldDescriptor, R2d: Fraction) -> bool:
    """x in O_K with |x|_v <= R at every archimedean place (R2d = R^(2d))."""
    x = f.element(x)
    if not f.is_integral(x):
        return False
    if f.kind == "rational":
        return x * x <= R2d
    if f.d < 0:
        return x.norm() ** 2 <= R2d
    x4 = x ** 4
    return (R2d - x4).real_sign() >= 0 and (R2d - x4.conjugate()).real_sign() >= 0


def _height_key(f):
    def cmp(a, b):
        c = certified_compare(a[0], b[0])
        if c:
            return c
        return (a[1] > b[1]) - (a[1] < b[1])
    return functools.cmp_to_key(cmp)


def _order_tag(x, f):
    if f.kind == "rational":
        return (abs(x), x < 0)
    u, v = f.to_integral_coords(x)
    return (abs(u) + abs(v), abs(v), u < 0, v < 0, abs(u))


def S_R_numberfield(f: FieldDescriptor, R) -> List:
    """All elements of S_R(K), ordered by Weil height and then a fixed coordinate order."""
    return list(_S_R_cached(f, _r_power(f, R)))


@functools.lru_cache(maxsize=64)
def _S_R_cached(f: FieldDescriptor, R2d: Fraction) -> tuple:
    # floating bounds only shape the candidate box (with a margin); membership is exact
    Rf = float(R2d) ** (1.0 / (2 * f.degree))
    out = []
    if f.kind == "rational":
        Rc = iroot(R2d.numerator // R2d.denominator + 1, 2) + 1
        out = [Fraction(a) for a in range(-Rc, Rc + 1) if in_S_R(a, f, R2d)]
    else:
        om = f.omega()
        if f.d > 0:
            w1 = float(om.a) + float(om.b) * math.sqrt(f.d)
            w2 = float(om.a) - float(om.b) * math.sqrt(f.d)
            vmax = int(2 * Rf / abs(w1 - w2)) + 2
            for v in range(-vmax, vmax + 1):
                lo = max(-Rf - v * w1, -Rf - v * w2)
                hi = min(Rf - v * w1, Rf - v * w2)
                for u in range(math.floor(lo) - 2, math.ceil(hi) + 3):
                    x = f.from_integral_coords(u, v)
                    if in_S_R(x, f, R2d):
                        out.append(x)
        else:
            im = float(om.b) * math.sqrt(-f.d)
            re = float(om.a)
            vmax = int(Rf / im) + 2
            for v in range(-vmax, vmax + 1):
                for u in range(math.floor(-Rf - v * re) - 2, math.ceil(Rf - v * re) + 3):
                    x = f.from_integral_coords(u, v)
                    if in_S_R(x, f, R2d):
                        out.append(x)
    keyed = [(weil_height(x, f), _order_tag(x, f), x) for x in out]
    keyed.sort(key=_height_key(f))
    return tuple(k[2] for k in keyed)


@dataclass
class GridSet:
    field: FieldDescriptor
    R: CertifiedReal
    elements: list
    heights: list = dc_field(default_factory=list)

    def __len__(self):
        return len(self.elements)


def enumerate_S_R_numberfield(f: FieldDescriptor, R) -> GridSet:
    elems = S_R_numberfield(f, R)
    return GridSet(f, _cr(R), elems, [weil_height(x, f) for x in elems])


@dataclass
class CountCheck:
    count: int
    lower: CertifiedReal
    upper: Optional[CertifiedReal]
    applicable: bool
    ok: Optional[bool]
    extra: dict = dc_field(default_factory=dict)

    def __bool__(self):
        return bool(self.ok)


def count_threshold(f: FieldDescriptor) -> CertifiedReal:
    inv = f.invariants()
    return CertifiedReal.radical(2 ** inv.r1 * abs(inv.discriminant), 2)


def lemma_count_check(f: FieldDescriptor, R, grid: Optional[GridSet] = None) -> CountCheck:
    """Strict two-sided bound on |S_R(K)| for R >= (2^{r1}|D|)^(1/2)."""
    inv = f.invariants()
    d = inv.degree
    g = grid or enumerate_S_R_numberfield(f, R)
    Rr = _cr(R)
    base = CertifiedReal.radical(Fraction(1, 2 ** inv.r1 * abs(inv.discriminant)), 2) * Rr.pow(d)
    lower = base
    upper = CertifiedReal.radical(2 ** (4 * d + 1), 2) * base
    applicable = certified_compare(Rr, count_threshold(f)) >= 0
    n = _cr(len(g))
    ok = None
    if applicable:
        ok = certified_compare(lower, n) < 0 and certified_compare(n, upper) < 0
    floor_ok = all(_conjugate_floor(x, f) for x in g.elements if x)
    return CountCheck(len(g), lower, upper, applicable, ok, {"conjugate_floor": floor_ok})


def _conjugate_floor(x, f) -> bool:
    half = CertifiedReal.radical(Fraction(1, 2), 2)
    return any(certified_compare(abs_cr(c), half) >= 0 for c in sigma(x, f))


def abs_cr(c: CertifiedReal) -> CertifiedReal:
    if c.form is not None:
        from .certified import _sign_real
        if _sign_real(c.form.radicand) < 0:
            return -1 * c
        return c
    lo, hi = c.interval()
    return -1 * c if hi < 0 else c


def count_integers_of_bounded_height(f: FieldDescriptor, R) -> CountCheck:
    """Check S_R(K) is inside {h <= R} element-wise and the strict lower bound on its size."""
    g = enumerate_S_R_numberfield(f, R)
    Rr = _cr(R)
    inside = all(certified_compare(h, Rr) <= 0 for h in g.heights)
    chk = lemma_count_check(f, R, g)
    ok = None
    if chk.applicable:
        ok = inside and certified_compare(chk.lower, _cr(len(g))) < 0
    return CountCheck(len(g), chk.lower, None, chk.applicable, ok, {"subset_of_height_ball": inside})


# ---------------------------------------------------------------------------
# function fields: FML lattices


@dataclass
class FMLLattice:
    q: int
    places: List[object]  # 0..q-1 then "inf"
    basis: List[List[int]]
    det_squared: int

    @property
    def n(self) -> int:
        return self.q + 1

    @property
    def det(self) -> CertifiedReal:
        return CertifiedReal.radical(self.det_squared, 2)


def fml_lattice(q: int) -> FMLLattice:
    """Lambda_Y for P^1 over F_q: the zero-sum lattice, basis phi(t - alpha)."""
    FieldDescriptor.function(q)  # validates q
    n = q + 1
    basis = []
    for a in range(q):
        v = [0] * n
        v[a] = 1
        v[-1] = -1
        basis.append(v)
    gram = [[sum(x * y for x, y in zip(u, w)) for w in basis] for u in basis]
    return FMLLattice(q, list(range(q)) + ["inf"], basis, det_int(gram))


class NotInRing(ValueError):
    """The function has a zero or pole outside the rational places."""


def phi_Y(f: RationalFunction) -> List[int]:
    """(ord_0 f, ..., ord_{q-1} f, ord_inf f)."""
    q = f.q
    if not f:
        raise NotInRing("0 is not in O_K(Y)")
    out = []
    rest_num, rest_den = f.num, f.den
    for a in range(q):
        lin = F.ptrim([-a, 1], q)
        k = 0
        while True:
            quo, rem = F.pdivmod(rest_num, lin, q)
            if rem:
                break
            rest_num, k = quo, k + 1
        while True:
            quo, rem = F.pdivmod(rest_den, lin, q)
            if rem:
                break
            rest_den, k = quo, k - 1
        out.append(k)
    if F.pdeg(rest_num) > 0 or F.pdeg(rest_den) > 0:
        raise NotInRing(f"{f} has an irreducible factor of degree >= 2")
    out.append(F.pdeg(f.den) - F.pdeg(f.num))
    return out


def divisor_to_function(k: Sequence[int], q: int, c: int = 1) -> RationalFunction:
    """c * prod (t - alpha)^{k_alpha}; the coordinate at infinity is forced by sum(k) = 0."""
    if len(k) != q + 1 or sum(k) != 0:
        raise ValueError("expected a zero-sum vector of length q + 1")
    num, den = (c % q,), (1,)
    for a in range(q):
        lin = F.ptrim([-a, 1], q)
        if k[a] > 0:
            num = F.pmul(num, F.ppow(lin, k[a], q), q)
        elif k[a] < 0:
            den = F.pmul(den, F.ppow(lin, -k[a], q), q)
    return RationalFunction(num, den, q)


def count_zero_sum_cube(n: int, m: int) -> int:
    """#{x in Z^n : sum x = 0, |x_i| <= m} by dynamic programming over partial sums."""
    counts = {0: 1}
    for _ in range(n):
        nxt: Dict[int, int] = {}
        for s, c in counts.items():
            for x in range(-m, m + 1):
                nxt[s + x] = nxt.get(s + x, 0) + c
        counts = nxt
    return counts.get(0, 0)


def count_one_sided(q: int, m: int) -> int:
    """#{f in O_K(Y) : ord_v f <= m at all rational places} = (q-1) C((q+1)m + q, q)."""
    if m < 0:
        return 0
    return (q - 1) * math.comb((q + 1) * m + q, q)


def _floor_cr(R) -> int:
    R = _cr(R)
    if R.exact is not None:
        return R.exact.numerator // R.exact.denominator
    lo, hi = R.interval(64)
    a, b = lo.numerator // lo.denominator, hi.numerator // hi.denominator
    bits = 64
    while a != b:
        bits *= 2
        lo, hi = R.interval(bits)
        a, b = lo.numerator // lo.denominator, hi.numerator // hi.denominator
        if bits > 1024:
            raise ValueError("cannot decide the integer part of R")
    return a


@dataclass
class FunctionFieldCount:
    q: int
    R: CertifiedReal
    direct_count: int
    lemma_count: int
    lower: Optional[CertifiedReal]
    upper: Optional[CertifiedReal]
    applicable: bool
    ok: Optional[bool]

    def __bool__(self):
        return bool(self.ok)


def count_f_threshold(q: int) -> CertifiedReal:
    n = q + 1
    return (n - 1) * CertifiedReal.radical(n, 2)


def enumerate_S_R_functionfield(q: int, R) -> FunctionFieldCount:
    """Direct one-sided count, the lattice-based count, and the two-sided bound on the latter."""
    FieldDescriptor.function(q)
    n = q + 1
    Rr = _cr(R)
    m = _floor_cr(Rr)
    direct = count_one_sided(q, m)
    lemma_n = count_zero_sum_cube(n, m) + q - 1
    applicable = certified_compare(Rr, count_f_threshold(q)) >= 0
    lower = upper = None
    ok = None
    if applicable:
        sq = CertifiedReal.radical(n, 2)
        inner = Rr / (n - 1) - sq
        lower = CertifiedReal.rational(2 ** (n - 1)) / sq * inner.pow(n - 1) + (q - 1)
        upper = (2 * Rr + 1).pow(n - 1) + (q - 1)
        ok = certified_compare(lower, _cr(lemma_n)) <= 0 and certified_compare(_cr(lemma_n), upper) <= 0
    return FunctionFieldCount(q, Rr, direct, lemma_n, lower, upper, applicable, ok)


def enumerate_S_R_functionfield_explicit(q: int, R) -> List[RationalFunction]:
    """Brute-force listing of the one-sided set (small q, R only; used as an oracle)."""
    m = _floor_cr(R)
    out = []
    lo = -m - q * m
    for k in itertools.product(range(lo, m + 1), repeat=q):
        kinf = -sum(k)
        if kinf <= m:
            for c in range(1, q):
                out.append(divisor_to_function(list(k) + [kinf], q, c))
    return out


def ff_grid_levels(q: int, R) -> Iterator[List[RationalFunction]]:
    """Elements of the one-sided S_R(K) grouped by Weil height e^s, s = 0, 1, 2, ..."""
    m = _floor_cr(R)
    s = 0
    while True:
        level = []
        for k in _vectors_with_level(q, s, m):
            kinf = -sum(k)
            if kinf > m:
                continue
            for c in range(1, q):
                level.append(divisor_to_function(list(k) + [kinf], q, c))
        if not level and s > (q + 1) * m + q:
            return
        yield level
        s += 1


def _vectors_with_level(q: int, s: int, m: int):
    """k in Z^q with max(positive mass, negative mass) = s and every k_i <= m, in lexicographic order."""
    k = [0] * q

    def rec(i, pos, neg):
        if i == q:
            if max(pos, neg) == s:
                yield tuple(k)
            return
        for x in range(-(s - neg), min(s - pos, m) + 1):
            k[i] = x
            if x > 0:
                yield from rec(i + 1, pos + x, neg)
            else:
                yield from rec(i + 1, pos, neg - x)
        k[i] = 0

    yield from rec(0, 0, 0)
