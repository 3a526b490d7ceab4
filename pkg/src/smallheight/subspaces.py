"""Subspaces of K^N: basis matrices, Grassmann coordinates, dual forms and heights."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .certified import CertifiedReal, certified_compare
from .fields import FieldDescriptor
from .heights import height_cal_H, height_H, infer_field
from .linalg import det, kernel, rank, solve, transpose


class RankError(ValueError):
    """The given vectors are not linearly independent."""


class SubspaceBasis:
    """Columns x_1..x_L of an N x L matrix of full column rank."""

    def __init__(self, vectors: Sequence[Sequence], field: Optional[FieldDescriptor] = None):
        vecs = [list(v) for v in vectors]
        if not vecs:
            raise RankError("a subspace basis needs at least one vector")
        f = field or infer_field([c for v in vecs for c in v])
        self.field = f
        self.vectors = [[f.element(c) for c in v] for v in vecs]
        self.N = len(self.vectors[0])
        self.L = len(self.vectors)
        if any(len(v) != self.N for v in self.vectors):
            raise ValueError("basis vectors have different lengths")
        if self.L > self.N:
            raise RankError(f"L={self.L} exceeds N={self.N}")
        if rank(self.vectors) != self.L:
            raise RankError("basis vectors are linearly dependent")

    @property
    def matrix(self) -> List[list]:
        """The N x L matrix X with the basis vectors as columns."""
        return transpose(self.vectors)

    def __repr__(self):
        return f"SubspaceBasis(N={self.N}, L={self.L}, field={self.field})"


@dataclass
class GrassmannVector:
    subsets: List[Tuple[int, ...]]  # 0-based, lexicographic
    values: list

    def __len__(self):
        return len(self.values)


@dataclass
class DualForm:
    rows: List[list]
    N: int

    @property
    def shape(self):
        return len(self.rows), self.N


def grassmann(X: SubspaceBasis) -> GrassmannVector:
    """All L x L minors det(X_I), I running over L-subsets of rows in lexicographic order."""
    m = X.matrix
    subsets, values = [], []
    for I in itertools.combinations(range(X.N), X.L):
        subsets.append(I)
        values.append(det([m[i] for i in I]))
    return GrassmannVector(subsets, values)


def _normalize_rational_rows(rows):
    out = []
    for r in rows:
        den = 1
        for c in r:
            den = math.lcm(den, Fraction(c).denominator)
        y = [int(Fraction(c) * den) for c in r]
        g = 0
        for c in y:
            g = math.gcd(g, c)
        y = [c // g for c in y]
        if next(c for c in y if c) < 0:
            y = [-c for c in y]
        out.append([Fraction(c) for c in y])
    return out


def dual_form(X: SubspaceBasis) -> DualForm:
    """An (N-L) x N matrix A of rank N-L with V = ker A."""
    if X.L == X.N:
        return DualForm([], X.N)
    rows = kernel(X.vectors)
    if X.field.kind == "rational":
        rows = _normalize_rational_rows(rows)
    A = DualForm(rows, X.N)
    for r in rows:
        for v in X.vectors:
            if sum((a * b for a, b in zip(r, v)), X.field.zero):
                raise ArithmeticError("dual form does not annihilate the basis")
    return A


def dual_grassmann(A: DualForm) -> GrassmannVector:
    """det(_{I'}A) for I' the complement of each I (same order as grassmann)."""
    k = len(A.rows)
    L = A.N - k
    subsets, values = [], []
    for I in itertools.combinations(range(A.N), L):
        Ic = [j for j in range(A.N) if j not in I]
        subsets.append(tuple(Ic))
        values.append(det([[row[j] for j in Ic] for row in A.rows]) if k else 1)
    return GrassmannVector(subsets, values)


@dataclass
class DualityResult:
    gamma: object
    ok: bool

    def __bool__(self):
        return self.ok


def duality_check(X: SubspaceBasis, A: DualForm) -> DualityResult:
    """Recover gamma and verify det(X_I) = (-1)^{eps(I')} gamma det(_{I'}A) for all I."""
    f = X.field
    if X.L == X.N:
        return DualityResult(f.one, True)
    gx = grassmann(X)
    ga = dual_grassmann(A)
    gamma = None
    signs = []
    for Ic in ga.subsets:
        eps = sum(j + 1 for j in Ic)
        signs.append(-1 if eps % 2 else 1)
    for x, a, s in zip(gx.values, ga.values, signs):
        if x and a:
            gamma = x / (a * s)
            break
    if gamma is None:
        raise ArithmeticError("no index with both minors nonzero")
    ok = all(x == s * gamma * a for x, a, s in zip(gx.values, ga.values, signs))
    if not ok:
        raise ArithmeticError("inconsistent duality constant")
    return DualityResult(gamma, ok)


def subspace_height(X: SubspaceBasis) -> CertifiedReal:
    """Schmidt height of V: cal-H of the Grassmann vector."""
    return height_cal_H(grassmann(X).values, X.field)


def dual_height(A: DualForm, field: FieldDescriptor) -> CertifiedReal:
    if not A.rows:
        return CertifiedReal.rational(1)
    return height_cal_H(dual_grassmann(A).values, field)


def membership(x: Sequence, X: SubspaceBasis) -> bool:
    f = X.field
    xs = [f.element(c) for c in x]
    if len(xs) != X.N:
        raise ValueError("dimension mismatch")
    if not any(xs):
        return True
    return solve(X.matrix, xs) is not None


def coordinates(x: Sequence, X: SubspaceBasis) -> Optional[list]:
    f = X.field
    return solve(X.matrix, [f.element(c) for c in x])


def hyperplane(coeffs: Sequence, field: Optional[FieldDescriptor] = None) -> SubspaceBasis:
    """The subspace {x : sum q_i x_i = 0} as a SubspaceBasis."""
    f = field or infer_field(coeffs)
    q = [f.element(c) for c in coeffs]
    return SubspaceBasis(kernel([q]), f)


def basis_lower_bound_ok(vectors: Sequence[Sequence], hv: CertifiedReal,
                         field: FieldDescriptor) -> bool:
    """prod H(x_i) >= N^{-L/2} cal-H(V) for a basis x_1..x_L."""
    L, N = len(vectors), len(vectors[0])
    prod = CertifiedReal.rational(1)
    for v in vectors:
        prod = prod * height_H(v, field)
    rhs = hv * CertifiedReal.radical(Fraction(1, N ** L), 2)
    return certified_compare(prod, rhs) >= 0
