"""Combinatorial Nullstellensatz tools and the small-height avoidance solver."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .certified import CertifiedReal, certified_compare
from .fields import FieldDescriptor, RationalFunction, poly_from_index
from .heights import height_h, sum_height_bound_check
from .lattices import S_R_numberfield, count_one_sided, ff_grid_levels, _floor_cr
from .linalg import BudgetExhausted
from .polynomial import MultivariatePolynomial
from .siegel import (DEFAULT_BUDGET, SiegelBasis, corollary_bound, main_bound, siegel_basis)
from .subspaces import SubspaceBasis, dual_form, membership

DEFAULT_EVAL_BUDGET = 10 ** 6


class VContainedInVariety(ValueError):
    """Every polynomial of some family vanishes identically on V."""

    def __init__(self, family: int, msg: str = ""):
        super().__init__(msg or f"V is contained in the zero set of family {family}")
        self.family = family


class GridTooSmall(ValueError):
    pass


class GridExhausted(RuntimeError):
    """No nonvanishing grid point; impossible when the grid has M+1 elements per axis."""


@dataclass
class VarietyUnion:
    families: List[List[MultivariatePolynomial]]

    def __post_init__(self):
        if not self.families or any(not fam for fam in self.families):
            raise ValueError("every family needs at least one polynomial")
        for fam in self.families:
            for p in fam:
                if p.degree < 1:
                    raise ValueError("variety-defining polynomials must have degree >= 1")

    @property
    def M_i(self) -> List[int]:
        return [max(p.degree for p in fam) for fam in self.families]

    @property
    def M(self) -> int:
        return sum(self.M_i)

    @property
    def N(self) -> int:
        return self.families[0][0].N


# ---------------------------------------------------------------------------
# grid tools


def combine(xi: Sequence, basis: Sequence[Sequence], f: FieldDescriptor) -> list:
    """v(xi) = sum xi_i v_i."""
    x = [f.zero] * len(basis[0])
    for c, v in zip(xi, basis):
        if c:
            x = [a + c * f.element(b) for a, b in zip(x, v)]
    return x


def canonical_elements(f: FieldDescriptor, n: int) -> list:
    """First n elements of a fixed enumeration of K: 0, 1, 2, ... or 0, 1, t, t+1, t^2, ..."""
    if f.kind == "function":
        return [RationalFunction.poly(poly_from_index(i, f.q), f.q) for i in range(n)]
    return [f.element(i) for i in range(n)]


def is_identically_zero_on_V(P: MultivariatePolynomial, basis: Sequence[Sequence]) -> bool:
    """Grid test on S^L with |S| = deg P + 1 distinct canonical elements."""
    f = P.field
    if P.is_zero():
        return True
    S = canonical_elements(f, max(P.degree, 0) + 1)
    pv = P.restrict(basis)
    for xi in itertools.product(S, repeat=len(basis)):
        if pv(xi):
            return False
    return True


def grid_nonvanishing_witness(P: MultivariatePolynomial, basis: Sequence[Sequence],
                              S1: Sequence, check_size: bool = True):
    """First xi in S1^L (graded by h(xi), then lexicographic) with P(v(xi)) != 0, or None."""
    if check_size and len(S1) < P.degree + 1:
        raise GridTooSmall(f"|S1| = {len(S1)} < deg P + 1 = {P.degree + 1}")
    f = P.field
    pv = P.restrict(basis)
    src = ((s, height_h([s], f)) for s in _sorted_by_height(S1, f))
    for item in graded_tuples(src, len(basis), f):
        if pv(item.xi):
            return item.xi
    return None


def _sorted_by_height(S, f):
    keyed = [(height_h([s], f), i, s) for i, s in enumerate(S)]
    import functools

    def cmp(a, b):
        c = certified_compare(a[0], b[0])
        return c if c else (a[1] > b[1]) - (a[1] < b[1])

    keyed.sort(key=functools.cmp_to_key(cmp))
    return [k[2] for k in keyed]


class _Item:
    __slots__ = ("h", "idx", "xi")

    def __init__(self, h, idx, xi):
        self.h, self.idx, self.xi = h, idx, xi

    def __lt__(self, other):
        c = certified_compare(self.h, other.h)
        if c:
            return c < 0
        return self.idx < other.idx


def _tuples_with_max(k: int, L: int) -> Iterator[Tuple[int, ...]]:
    """All index tuples in [0..k]^L whose maximum is k."""
    for p in range(L):
        for before in itertools.product(range(k), repeat=p):
            for after in itertools.product(range(k + 1), repeat=L - p - 1):
                yield before + (k,) + after


def graded_tuples(source: Iterable[Tuple[object, CertifiedReal]], L: int,
                  f: FieldDescriptor) -> Iterator[_Item]:
    """Walk S^L in order (h(xi), index tuple) given S as (element, h(element)) pairs in graded order.

    Uses h(xi) >= max_i h(xi_i): a tuple is released only once every unloaded element has
    strictly larger height, so the order is exact even though S is loaded lazily.
    """
    it = iter(source)
    elems: list = []
    heap: List[_Item] = []
    pending = next(it, None)
    while heap or pending is not None:
        if heap and (pending is None or certified_compare(heap[0].h, pending[1]) < 0):
            yield heapq.heappop(heap)
            continue
        k = len(elems)
        elems.append(pending[0])
        pending = next(it, None)
        for idx in _tuples_with_max(k, L):
            xi = [elems[i] for i in idx]
            heapq.heappush(heap, _Item(height_h(xi, f), idx, xi))


# ---------------------------------------------------------------------------
# grid selection


@dataclass
class Grid:
    branch: str
    R: Optional[CertifiedReal]
    size: int
    source: object  # callable returning a fresh iterator of (element, h)
    zero_augmented: bool = False


def build_grid(f: FieldDescriptor, M: int) -> Grid:
    inv = f.invariants()
    if f.is_number_field:
        if inv.roots_of_unity <= M:
            R = CertifiedReal.radical(Fraction(2 ** inv.r1 * abs(inv.discriminant) * M * M),
                                      2 * inv.degree)
            elems = S_R_numberfield(f, R)
            pairs = [(x, height_h([x], f)) for x in elems]
            return Grid("count", R, len(elems), lambda: iter(pairs))
        units = f.roots_of_unity()
        one = CertifiedReal.rational(1)
        return Grid("units", None, len(units), lambda: iter([(u, one) for u in units]))
    q = f.q
    if q <= M:
        from .siegel import R_K
        R = R_K(f, M)
        m = _floor_cr(R)

        def gen():
            for s, level in enumerate(ff_grid_levels(q, R)):
                h = CertifiedReal.exp(s)
                for x in level:
                    yield x, h

        return Grid("fml", R, count_one_sided(q, m), gen)
    elems = f.constants()
    aug = len(elems) < M + 1
    if aug:
        elems = elems + [f.zero]
    one = CertifiedReal.rational(1)
    return Grid("units", None, len(elems), lambda: iter([(u, one) for u in elems]), aug)


# ---------------------------------------------------------------------------
# the solver


@dataclass
class AvoidanceCertificate:
    point: list
    xi: list
    basis: List[list]
    chosen: List[int]
    branch: str
    R: Optional[CertifiedReal]
    grid_size: int
    h_point: CertifiedReal
    h_xi: CertifiedReal
    bound: CertifiedReal
    verdict: str  # "certified" or "unresolved" or "failed"
    evaluations: int
    M: int
    L: int
    HV: CertifiedReal
    siegel: SiegelBasis
    checks: dict = dc_field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


def choose_indices(X: SubspaceBasis, Z: VarietyUnion) -> List[int]:
    out = []
    for i, fam in enumerate(Z.families):
        j = next((j for j, p in enumerate(fam) if not is_identically_zero_on_V(p, X.vectors)), None)
        if j is None:
            raise VContainedInVariety(i)
        out.append(j)
    return out


def solve(X: SubspaceBasis, Z: VarietyUnion, budget: int = DEFAULT_BUDGET,
          eval_budget: int = DEFAULT_EVAL_BUDGET) -> AvoidanceCertificate:
    f = X.field
    if Z.N != X.N:
        raise ValueError("polynomials and subspace live in different dimensions")
    M = Z.M
    chosen = choose_indices(X, Z)
    polys = [fam[j] for fam, j in zip(Z.families, chosen)]
    sb = siegel_basis(X, budget)
    if not sb.vectors:
        raise BudgetExhausted("no reduced basis found within the enumeration budget")
    basis = sb.vectors
    grid = build_grid(f, M)
    if grid.size < M + 1:
        raise GridTooSmall(f"grid has {grid.size} elements, need {M + 1}")

    evals = 0
    found = None
    zero_ok = False
    for item in graded_tuples(grid.source(), X.L, f):
        if not any(item.xi):
            x0 = [f.zero] * X.N
            evals += 1
            if all(p.evaluate(x0) for p in polys):
                zero_ok = True
            continue
        x = combine(item.xi, basis, f)
        evals += 1
        if evals > eval_budget:
            raise BudgetExhausted(f"more than {eval_budget} grid evaluations")
        if all(p.evaluate(x) for p in polys):
            found = (item, x)
            break
    zero_point = False
    if found is None:
        if not zero_ok:
            raise GridExhausted("every grid point vanishes; the grid guarantee was violated")
        zero_point = True
        xi = [f.zero] * X.L
        x = [f.zero] * X.N
        h_xi = height_h(xi, f)
    else:
        item, x = found
        xi, h_xi = item.xi, item.h

    HV = sb.HV
    bound = main_bound(f, X.L, M, HV)
    h_point = height_h(x, f)
    checks = {
        "membership": membership(x, X),
        "nonvanishing": all(p.evaluate(x) for p in polys),
        "grid_size_ok": grid.size >= M + 1,
        "zero_point": zero_point,
        "zero_augmented": grid.zero_augmented,
        "siegel_status": sb.status,
    }
    if not zero_point:
        chain = sum_height_bound_check(xi, basis, f)
        checks["sum_height"] = chain.ok
    try:
        verdict = "certified" if certified_compare(h_point, bound) <= 0 else "failed"
    except Exception:
        verdict = "unresolved"
    if not (checks["membership"] and checks["nonvanishing"]):
        verdict = "failed"
    return AvoidanceCertificate(
        point=x, xi=list(xi), basis=basis, chosen=chosen, branch=grid.branch, R=grid.R,
        grid_size=grid.size, h_point=h_point, h_xi=h_xi, bound=bound, verdict=verdict,
        evaluations=evals, M=M, L=X.L, HV=HV, siegel=sb, checks=checks)


def grid_minimal(cert: AvoidanceCertificate, Z: VarietyUnion, f: FieldDescriptor,
                 limit: int = 10 ** 5) -> Optional[bool]:
    """Exhaustive check that no nonvanishing grid point precedes the emitted xi.

    Returns None when |S1|^L exceeds ``limit``.
    """
    if cert.grid_size ** cert.L > limit:
        return None
    polys = [fam[j] for fam, j in zip(Z.families, cert.chosen)]
    grid = build_grid(f, cert.M)
    if cert.checks.get("zero_point"):
        targets = None
        pairs = list(grid.source())
    else:
        # tuples containing an element of larger height cannot precede xi
        targets = cert.h_xi
        pairs = list(itertools.takewhile(lambda p: certified_compare(p[1], targets) <= 0,
                                         grid.source()))
    for combo in itertools.product(range(len(pairs)), repeat=cert.L):
        xi = [pairs[i][0] for i in combo]
        if not any(xi):
            continue
        x = combine(xi, cert.basis, f)
        if not all(p.evaluate(x) for p in polys):
            continue
        if targets is None:
            return False  # a nonzero witness exists but the zero point was emitted
        if certified_compare(height_h(xi, f), targets) < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# subspace avoidance


def avoidance_forms(X: SubspaceBasis, subspaces: Sequence[SubspaceBasis]) -> List[list]:
    """One linear form per U_i vanishing on U_i but not on V, taken from a dual form of U_i."""
    forms = []
    for i, U in enumerate(subspaces):
        if U.N != X.N:
            raise ValueError("subspace dimension mismatch")
        rows = dual_form(U).rows
        pick = None
        for r in rows:
            if any(sum((a * b for a, b in zip(r, v)), X.field.zero) for v in X.vectors):
                pick = r
                break
        if pick is None:
            raise VContainedInVariety(i, f"V is contained in subspace {i}")
        forms.append(pick)
    return forms


def subspace_avoidance(X: SubspaceBasis, subspaces: Sequence[SubspaceBasis],
                       budget: int = DEFAULT_BUDGET) -> AvoidanceCertificate:
    f = X.field
    forms = avoidance_forms(X, subspaces)
    Z = VarietyUnion([[MultivariatePolynomial.linear_form(r, f)] for r in forms])
    cert = solve(X, Z, budget)
    cert.checks["forms"] = forms
    if f.is_number_field:
        cb = corollary_bound(f, X.L, len(subspaces), cert.HV)
        cert.checks["corollary_bound"] = cb
        cert.checks["corollary_ok"] = certified_compare(cert.h_point, cb) <= 0
        if not cert.checks["corollary_ok"] and cert.verdict == "certified":
            cert.verdict = "failed"
    cert.checks["outside_subspaces"] = all(not membership(cert.point, U) for U in subspaces)
    return cert
