"""Field constants, reduced bases of small height, and the main bound."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import List, Optional, Sequence

from . import fields as F
from .certified import CertifiedReal, ClosedForm, UnresolvedComparison, certified_compare
from .fields import FieldDescriptor, RationalFunction
from .heights import height_h, height_H
from .linalg import (INTEGERS, BudgetExhausted, enumerate_short, gram_form, lll, poly_ring,
                     rank, ring_kernel)
from .subspaces import SubspaceBasis, basis_lower_bound_ok, dual_form, subspace_height

DEFAULT_BUDGET = 10 ** 7


# ---------------------------------------------------------------------------
# constants


@dataclass
class FieldConstants:
    C: CertifiedReal
    E: CertifiedReal
    A: CertifiedReal
    R: Optional[CertifiedReal]
    delta: int
    branch: str  # which case of the A constant applies: "count", "fml", "units"


def C_K(f: FieldDescriptor, L: int) -> CertifiedReal:
    if not f.is_number_field:
        return CertifiedReal.rational(1)  # exp((g - 1 + m) L / m) with g = 0, m = 1
    inv = f.invariants()
    d, r2, D = inv.degree, inv.r2, abs(inv.discriminant)
    form = ClosedForm.make(Fraction(2 ** r2 * D) ** L, 2 * d, Fraction(-r2 * L, 2 * d))
    return CertifiedReal.closed(form)


def E_K(f: FieldDescriptor, L: int) -> CertifiedReal:
    return CertifiedReal.rational(1)  # exp(partial * g * L / d) with g = 0


def R_K(f: FieldDescriptor, M: int) -> Optional[CertifiedReal]:
    """The radius used for function fields of type q <= M; None when q > M."""
    if f.is_number_field:
        return None
    q = f.q
    if q > M:
        return None
    n, h = q + 1, 1
    # ((M - q + 2) h sqrt(n)) ** (1/(n-1))
    x = CertifiedReal.radical(Fraction((M - q + 2) * h) ** 2 * n, 2 * (n - 1))
    return Fraction(n - 1, 2) * x + h * (n - 1) * CertifiedReal.radical(n, 2)


def A_K(f: FieldDescriptor, L: int, M: int) -> CertifiedReal:
    return _A_and_branch(f, M)[0]


def _A_and_branch(f: FieldDescriptor, M: int):
    inv = f.invariants()
    if f.is_number_field:
        if inv.roots_of_unity <= M:
            rad = Fraction(M * M * 2 ** inv.r1 * abs(inv.discriminant))
            return CertifiedReal.radical(rad, 2 * inv.degree), "count"
        return CertifiedReal.rational(1), "units"
    if f.q <= M:
        return CertifiedReal.exp(R_K(f, M)), "fml"
    return CertifiedReal.rational(1), "units"


def constants(f: FieldDescriptor, L: int, M: int) -> FieldConstants:
    if L < 1 or M < 1:
        raise ValueError("L and M must be positive")
    A, branch = _A_and_branch(f, M)
    return FieldConstants(C=C_K(f, L), E=E_K(f, L), A=A, R=R_K(f, M),
                          delta=1 if f.is_number_field else 0, branch=branch)


def main_bound(f: FieldDescriptor, L: int, M: int, HV: CertifiedReal) -> CertifiedReal:
    """L^delta E^(1-delta) A C cal-H(V)."""
    c = constants(f, L, M)
    out = CertifiedReal.rational(L ** c.delta)
    if c.delta == 0:
        out = out * c.E
    return out * c.A * c.C * HV


def corollary_bound(f: FieldDescriptor, L: int, M: int, HV: CertifiedReal) -> CertifiedReal:
    """sqrt(2) L |D|^((L+1)/2d) M^(1/d) cal-H(V) for number fields."""
    inv = f.invariants()
    d, D = inv.degree, abs(inv.discriminant)
    rad = Fraction(2) ** d * Fraction(D) ** (L + 1) * Fraction(M) ** 2
    return L * CertifiedReal.radical(rad, 2 * d) * HV


# ---------------------------------------------------------------------------
# reduced bases


@dataclass
class SiegelBasis:
    vectors: List[list]
    H: List[CertifiedReal]
    h: List[CertifiedReal]
    product_h: CertifiedReal
    bound: CertifiedReal
    HV: CertifiedReal
    certified: bool
    status: str  # "certified", "failed", "budget exhausted"
    comparison: str = "exact"
    lower_bound_ok: Optional[bool] = None
    nodes: int = 0
    extra: dict = dc_field(default_factory=dict)


def _prod(vals) -> CertifiedReal:
    out = CertifiedReal.rational(1)
    for v in vals:
        out = out * v
    return out


def _rational_lattice(X: SubspaceBasis) -> List[List[int]]:
    """Z-basis of V intersected with Z^N."""
    N = X.N
    if X.L == N:
        return [[1 if i == j else 0 for j in range(N)] for i in range(N)]
    A = dual_form(X)
    irows = [[int(c) for c in r] for r in A.rows]
    return ring_kernel(irows, N, INTEGERS)


def _sup(v):
    return max(abs(c) for c in v)


def _canon(v):
    s = next(c for c in v if c)
    return tuple(-c for c in v) if s < 0 else tuple(v)


def _greedy_independent(cands: Sequence[Sequence], L: int, field: FieldDescriptor,
                        to_field=None) -> List[list]:
    chosen: List[list] = []
    chosen_k: List[list] = []
    for v in cands:
        vk = to_field(v) if to_field else [field.element(c) for c in v]
        if rank(chosen_k + [vk]) > len(chosen_k):
            chosen.append(list(v))
            chosen_k.append(vk)
            if len(chosen) == L:
                break
    return chosen


def siegel_basis_rational(X: SubspaceBasis, budget: int = DEFAULT_BUDGET) -> SiegelBasis:
    """Successive minima of V cap Z^N for the sup-norm, certified against cal-H(V)."""
    f = X.field
    if f.kind != "rational":
        raise ValueError("expected a subspace over Q")
    HV = subspace_height(X)
    basis = lll(_rational_lattice(X))
    N, L = X.N, X.L
    r = min(_sup(v) for v in basis)
    counter = [budget]
    chosen = None
    while chosen is None:
        seen = set()
        try:
            for _, vec in enumerate_short(basis, Fraction(N * r * r), budget=counter):
                if _sup(vec) <= r:
                    seen.add(_canon(vec))
        except BudgetExhausted:
            return _exhausted(X, HV, budget)
        cands = sorted(seen, key=lambda v: (_sup(v), sum(abs(c) for c in v), tuple(-c for c in v)))
        picked = _greedy_independent(cands, L, f)
        if len(picked) == L:
            chosen = picked
        else:
            r *= 2
    vecs = [[Fraction(c) for c in v] for v in chosen]
    hs = [height_h(v, f) for v in vecs]
    Hs = [height_H(v, f) for v in vecs]
    prod = _prod(hs)
    ok = prod.exact ** 2 <= HV.pow(2).exact  # both squares are rational
    lb = basis_lower_bound_ok(vecs, HV, f)
    return SiegelBasis(vecs, Hs, hs, prod, HV, HV, ok, "certified" if ok else "failed",
                       "exact", lb, budget - counter[0])


def _exhausted(X, HV, budget, bound=None):
    return SiegelBasis([], [], [], CertifiedReal.rational(0), bound or HV, HV, False,
                       "budget exhausted", "none", None, budget)


# -- function fields --------------------------------------------------------


def _poly_matrix_columns(X: SubspaceBasis) -> List[List[tuple]]:
    """V cap F_q[t]^N as a list of polynomial column vectors."""
    q = X.field.q
    N = X.N
    if X.L == N:
        return [[(1,) if i == j else () for i in range(N)] for j in range(N)]
    A = dual_form(X)
    rows = []
    for r in A.rows:
        den = (1,)
        for c in r:
            den = F.pdivmod(F.pmul(den, c.den, q), F.pgcd(den, c.den, q), q)[0]
        rows.append([F.pdivmod(F.pmul(c.num, den, q), c.den, q)[0] for c in r])
    return ring_kernel(rows, N, poly_ring(q))


def _col_deg(col):
    return max(F.pdeg(p) for p in col)


def _pivot(col):
    dg = _col_deg(col)
    return max(i for i, p in enumerate(col) if F.pdeg(p) == dg)


def weak_popov(cols: List[List[tuple]], q: int) -> List[List[tuple]]:
    """Column weak Popov form by leading-term cancellation (lowest column index kept on ties)."""
    cols = [list(c) for c in cols]
    while True:
        piv = {}
        clash = None
        for j, c in enumerate(cols):
            p = _pivot(c)
            if p in piv:
                clash = (piv[p], j)
                break
            piv[p] = j
        if clash is None:
            return cols
        a, b = clash
        p = _pivot(cols[a])
        da, db = _col_deg(cols[a]), _col_deg(cols[b])
        # reduce the column of larger degree, or the later column on a tie
        hi, lo = (a, b) if da > db else (b, a)
        dh, dl = _col_deg(cols[hi]), _col_deg(cols[lo])
        coef = cols[hi][p][-1] * pow(cols[lo][p][-1], q - 2, q) % q
        mult = F.pshift((coef,), dh - dl)
        cols[hi] = [F.psub(x, F.pmul(mult, y, q), q) for x, y in zip(cols[hi], cols[lo])]


def siegel_basis_function_field(X: SubspaceBasis) -> SiegelBasis:
    f = X.field
    if f.kind != "function":
        raise ValueError("expected a subspace over F_q(t)")
    q = f.q
    HV = subspace_height(X)
    cols = weak_popov(_poly_matrix_columns(X), q)
    cols.sort(key=_col_deg)
    vecs = [[RationalFunction.poly(p, q) for p in c] for c in cols]
    hs = [height_h(v, f) for v in vecs]
    Hs = [height_H(v, f) for v in vecs]
    prod = _prod(hs)
    deg_sum = sum(_col_deg(c) for c in cols)
    ok = deg_sum <= HV.form.e_exp
    lb = basis_lower_bound_ok(vecs, HV, f)
    return SiegelBasis(vecs, Hs, hs, prod, HV, HV, bool(ok), "certified" if ok else "failed",
                       "exact", lb, 0, {"degree_sum": deg_sum, "log_HV": int(HV.form.e_exp)})


# -- quadratic fields -------------------------------------------------------


def _quadratic_lattice(X: SubspaceBasis) -> List[List[int]]:
    """Z-basis of V cap O_K^N in integral-basis coordinates (u_1, v_1, ..., u_N, v_N)."""
    f = X.field
    N = X.N
    if X.L == N:
        return [[1 if i == j else 0 for j in range(2 * N)] for i in range(2 * N)]
    A = dual_form(X)
    om = f.omega()
    rows = []
    for r in A.rows:
        e1, e2 = [], []
        for a in r:
            for y in (a, a * om):
                c0, c1 = f.to_integral_coords(y)
                e1.append(c0)
                e2.append(c1)
        rows.extend([e1, e2])
    den = 1
    for r in rows:
        for c in r:
            den = math.lcm(den, c.denominator)
    irows = [[int(c * den) for c in r] for r in rows]
    return ring_kernel(irows, 2 * N, INTEGERS)


def trace_gram(f: FieldDescriptor, N: int):
    """Gram matrix of sum_j Tr(x_j * conj-or-id(y_j)) in integral-basis coordinates."""
    b = [f.one, f.omega()]
    g2 = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            y = b[j].conjugate() if f.d < 0 else b[j]
            g2[i][j] = (b[i] * y).trace()
    G = [[Fraction(0)] * (2 * N) for _ in range(2 * N)]
    for k in range(N):
        for i in range(2):
            for j in range(2):
                G[2 * k + i][2 * k + j] = g2[i][j]
    return G


def _to_elements(f, v):
    return [f.from_integral_coords(v[2 * k], v[2 * k + 1]) for k in range(len(v) // 2)]


def siegel_certify_quadratic(X: SubspaceBasis, candidate: Optional[Sequence[Sequence]] = None,
                             budget: int = DEFAULT_BUDGET) -> SiegelBasis:
    """Find and certify a basis with prod h <= C_K(L) cal-H(V) over Q(sqrt d)."""
    f = X.field
    if f.kind != "quadratic":
        raise ValueError("expected a subspace over Q(sqrt d)")
    HV = subspace_height(X)
    L = X.L
    bound = C_K(f, L) * HV
    if candidate is not None:
        return _certify_candidate(X, [[f.element(c) for c in v] for v in candidate], HV, bound)
    G = trace_gram(f, X.N)
    ip = gram_form(G)
    basis = lll(_quadratic_lattice(X), ip)
    radius = min(ip(v, v) for v in basis)
    counter = [budget]
    while True:
        seen = {}
        try:
            for _, vec in enumerate_short(basis, radius, ip, budget=counter):
                key = _canon(vec)
                if key not in seen:
                    elems = _to_elements(f, key)
                    seen[key] = (height_h(elems, f), elems)
        except BudgetExhausted:
            return _exhausted(X, HV, budget, bound)

        def cmp(a, b):
            c = certified_compare(seen[a][0], seen[b][0])
            return c if c else (a > b) - (a < b)

        cands = sorted(seen, key=functools.cmp_to_key(cmp))
        picked = _greedy_independent(cands, L, f, lambda v: seen[tuple(v)][1])
        if len(picked) == L:
            res = _certify_candidate(X, [seen[tuple(v)][1] for v in picked], HV, bound)
            res.nodes = budget - counter[0]
            if res.certified:
                return res
        radius *= 2


def _certify_candidate(X, vecs, HV, bound) -> SiegelBasis:
    f = X.field
    if rank(vecs) != X.L or any(not _in_span(v, X) for v in vecs):
        raise ValueError("candidate does not span V")
    hs = [height_h(v, f) for v in vecs]
    Hs = [height_H(v, f) for v in vecs]
    prod = _prod(hs)
    try:
        ok = certified_compare(prod, bound) <= 0
        comparison = "interval" if bound.exact is None else "exact"
    except UnresolvedComparison:
        return SiegelBasis(vecs, Hs, hs, prod, bound, HV, False, "unresolved", "unresolved")
    lb = basis_lower_bound_ok(vecs, HV, f)
    return SiegelBasis(vecs, Hs, hs, prod, bound, HV, ok, "certified" if ok else "failed",
                       comparison, lb)


def _in_span(v, X):
    from .subspaces import membership
    return membership(v, X)


def siegel_basis(X: SubspaceBasis, budget: int = DEFAULT_BUDGET) -> SiegelBasis:
    """Dispatch on the field of X."""
    if X.field.kind == "rational":
        return siegel_basis_rational(X, budget)
    if X.field.kind == "function":
        return siegel_basis_function_field(X)
    return siegel_certify_quadratic(X, budget=budget)
