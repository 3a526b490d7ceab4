"""Exact linear algebra over fields, Euclidean rings (Z and F_q[t]) and integer lattices."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from . import fields as F
from .certified import iroot

Matrix = List[list]


class BudgetExhausted(RuntimeError):
    """An enumeration exceeded its node budget."""


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(r) for r in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    out = []
    for row in a:
        out.append([_dot(row, col) for col in bt])
    return out


def matvec(a: Sequence[Sequence], x: Sequence) -> list:
    return [_dot(row, x) for row in a]


def _dot(u, v):
    it = iter(zip(u, v))
    a, b = next(it)
    acc = a * b
    for a, b in it:
        acc = acc + a * b
    return acc


def columns(m: Sequence[Sequence]) -> Matrix:
    return transpose(m)


# ---------------------------------------------------------------------------
# field elimination


def rref(m: Sequence[Sequence]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns. Entries must support field ops."""
    a = [list(r) for r in m]
    if not a:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def det(m: Sequence[Sequence]):
    """Determinant by Gaussian elimination (field entries)."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    acc = None
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return a[0][0] * 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        piv = a[c][c]
        acc = piv if acc is None else acc * piv
        inv = 1 / piv
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return acc if sign > 0 else -acc


def det_int(m: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k]), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def kernel(m: Sequence[Sequence], ncols: Optional[int] = None, zero=None, one=None) -> Matrix:
    """Basis (list of vectors) of {x : m x = 0}."""
    if not m:
        n = ncols
        return [[one if i == j else zero for i in range(n)] for j in range(n)]
    a, piv = rref(m)
    n = len(a[0])
    z = a[0][0] * 0
    o = z + 1
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [z] * n
        v[f] = o
        for r, c in enumerate(piv):
            v[c] = -a[r][f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[list]:
    """Some x with a x = b, or None."""
    aug = [list(r) + [bi] for r, bi in zip(a, b)]
    r, piv = rref(aug)
    n = len(a[0])
    if n in piv:
        return None
    z = b[0] * 0
    x = [z] * n
    for i, c in enumerate(piv):
        x[c] = r[i][n]
    return x


# ---------------------------------------------------------------------------
# Euclidean rings


@dataclass(frozen=True)
class EuclideanRing:
    zero: object
    one: object
    size: Callable
    divmod: Callable
    add: Callable
    sub: Callable
    mul: Callable
    is_unit: Callable
    unit_inverse: Callable
    normal_unit: Callable  # unit u making u*x "positive"/monic


INTEGERS = EuclideanRing(
    zero=0, one=1,
    size=abs,
    divmod=lambda a, b: divmod(a, b),
    add=lambda a, b: a + b, sub=lambda a, b: a - b, mul=lambda a, b: a * b,
    is_unit=lambda a: a in (1, -1),
    unit_inverse=lambda a: a,
    normal_unit=lambda a: -1 if a < 0 else 1,
)


def poly_ring(q: int) -> EuclideanRing:
    return EuclideanRing(
        zero=(), one=(1,),
        size=F.pdeg,
        divmod=lambda a, b: F.pdivmod(a, b, q),
        add=lambda a, b: F.padd(a, b, q), sub=lambda a, b: F.psub(a, b, q),
        mul=lambda a, b: F.pmul(a, b, q),
        is_unit=lambda a: len(a) == 1,
        unit_inverse=lambda a: (pow(a[0], q - 2, q),),
        normal_unit=lambda a: (pow(a[-1], q - 2, q),) if a else (1,),
    )


def ring_kernel(m: Sequence[Sequence], n: int, ring: EuclideanRing) -> Matrix:
    """Basis of the free module {x in R^n : m x = 0} via unimodular column operations."""
    z = ring.zero
    a = [list(r) for r in m]
    u = [[ring.one if i == j else z for j in range(n)] for i in range(n)]  # columns tracked as rows of u^T
    ucols = [[u[i][j] for i in range(n)] for j in range(n)]
    acols = [[a[i][j] for i in range(len(a))] for j in range(n)]

    def colop(j, k, qt):
        # col_j -= qt * col_k
        acols[j] = [ring.sub(x, ring.mul(qt, y)) for x, y in zip(acols[j], acols[k])]
        ucols[j] = [ring.sub(x, ring.mul(qt, y)) for x, y in zip(ucols[j], ucols[k])]

    c = 0
    for i in range(len(a)):
        if c >= n:
            break
        while True:
            nz = [j for j in range(c, n) if acols[j][i] != z]
            if not nz:
                break
            best = min(nz, key=lambda j: (ring.size(acols[j][i]), j))
            acols[c], acols[best] = acols[best], acols[c]
            ucols[c], ucols[best] = ucols[best], ucols[c]
            done = True
            for j in range(c + 1, n):
                if acols[j][i] != z:
                    qt, _ = ring.divmod(acols[j][i], acols[c][i])
                    colop(j, c, qt)
                    if acols[j][i] != z:
                        done = False
            if done:
                c += 1
                break
    return [ucols[j] for j in range(c, n)]


def ring_hnf_rows(rows: Sequence[Sequence], ring: EuclideanRing) -> Matrix:
    """Row Hermite-style echelon basis of the row module (zero rows dropped)."""
    a = [list(r) for r in rows if any(x != ring.zero for x in r)]
    if not a:
        return []
    n = len(a[0])
    out = []
    for c in range(n):
        while True:
            nz = [i for i in range(len(a)) if a[i][c] != ring.zero]
            if not nz:
                break
            best = min(nz, key=lambda i: (ring.size(a[i][c]), i))
            piv = a[best]
            others = []
            for i in range(len(a)):
                if i == best:
                    continue
                r = a[i]
                if r[c] != ring.zero:
                    qt, _ = ring.divmod(r[c], piv[c])
                    r = [ring.sub(x, ring.mul(qt, y)) for x, y in zip(r, piv)]
                others.append(r)
            a = [piv] + others
            if all(r[c] == ring.zero for r in others):
                break
        if a and a[0][c] != ring.zero:
            piv = a.pop(0)
            unit = ring.normal_unit(piv[c])
            piv = [ring.mul(unit, x) for x in piv]
            out.append(piv)
        a = [r for r in a if any(x != ring.zero for x in r)]
        if not a:
            break
    # reduce entries above pivots
    for k in range(len(out)):
        c = next(j for j, x in enumerate(out[k]) if x != ring.zero)
        for i in range(k):
            if out[i][c] != ring.zero:
                qt, _ = ring.divmod(out[i][c], out[k][c])
                out[i] = [ring.sub(x, ring.mul(qt, y)) for x, y in zip(out[i], out[k])]
    return out


# ---------------------------------------------------------------------------
# integer lattices with a rational quadratic form


def gram_form(g: Sequence[Sequence[Fraction]]):
    def ip(x, y):
        s = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = g[i]
                for j, yj in enumerate(y):
                    if yj:
                        s += xi * row[j] * yj
        return s
    return ip


def euclid_ip(x, y):
    return sum(a * b for a, b in zip(x, y))


def _gso(b, ip):
    n = len(b)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar_norm = [Fraction(0)] * n
    gram = [[ip(b[i], b[j]) for j in range(n)] for i in range(n)]
    r = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = Fraction(gram[i][j])
            for k in range(j):
                s -= mu[j][k] * r[i][k]
            r[i][j] = s
            if j < i:
                mu[i][j] = s / bstar_norm[j]
            else:
                bstar_norm[i] = s
    return mu, bstar_norm


def lll(basis: Sequence[Sequence[int]], ip=euclid_ip, delta=Fraction(3, 4)) -> Matrix:
    """Exact LLL reduction of linearly independent integer rows under inner product ip."""
    b = [list(v) for v in basis]
    n = len(b)
    if n <= 1:
        return b
    mu, bn = _gso(b, ip)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            qj = round(mu[k][j])
            if qj:
                b[k] = [x - qj * y for x, y in zip(b[k], b[j])]
                for t in range(j):
                    mu[k][t] -= qj * mu[j][t]
                mu[k][j] -= qj
        if bn[k] >= (delta - mu[k][k - 1] ** 2) * bn[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, bn = _gso(b, ip)
            k = max(k - 1, 1)
    return b


def enumerate_short(basis: Sequence[Sequence[int]], bound: Fraction, ip=euclid_ip,
                    budget: Optional[List[int]] = None) -> Iterator[Tuple[List[int], List[int]]]:
    """Fincke-Pohst: all (coeffs, vector) with 0 < ip(v, v) <= bound, v in the lattice.

    ``budget`` is a one-element list used as a mutable node counter limit.
    """
    b = [list(v) for v in basis]
    n = len(b)
    if n == 0:
        return
    mu, bn = _gso(b, ip)
    bound = Fraction(bound)
    coeffs = [0] * n

    def rng(k, center, rem):
        # integers c with (c - center)^2 * bn[k] <= rem
        if rem < 0:
            return range(0)
        lim = rem / bn[k]
        s = Fraction(iroot(_floor_frac(lim * 4 ** 20), 2), 2 ** 20) if lim > 0 else Fraction(0)
        lo = _ceil_frac(center - s) - 1
        hi = _floor_frac(center + s) + 1
        while (lo - center) ** 2 * bn[k] > rem and lo <= hi:
            lo += 1
        while (hi - center) ** 2 * bn[k] > rem and hi >= lo:
            hi -= 1
        return range(lo, hi + 1)

    def rec(k, rem):
        if budget is not None:
            budget[0] -= 1
            if budget[0] < 0:
                raise BudgetExhausted("enumeration budget exhausted")
        center = -sum((mu[j][k] * coeffs[j] for j in range(k + 1, n)), Fraction(0))
        for c in rng(k, center, rem):
            coeffs[k] = c
            used = (c - center) ** 2 * bn[k]
            if k == 0:
                if any(coeffs):
                    vec = [sum(coeffs[i] * b[i][t] for i in range(n)) for t in range(len(b[0]))]
                    yield list(coeffs), vec
            else:
                yield from rec(k - 1, rem - used)
        coeffs[k] = 0

    yield from rec(n - 1, bound)


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def int_content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = _gcd(g, x)
    return g


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def clear_denominators(v: Sequence[Fraction]) -> List[int]:
    from math import lcm
    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    return [int(Fraction(x) * den) for x in v]


def primitive(v: Sequence) -> List[int]:
    """Primitive integer vector on the line through a rational vector; first nonzero entry positive."""
    y = clear_denominators(v)
    g = int_content(y)
    y = [x // g for x in y]
    s = next(x for x in y if x)
    return [-x for x in y] if s < 0 else y


def minors(m: Sequence[Sequence], k: int) -> Iterator[Tuple[Tuple[int, ...], object]]:
    """All k x k minors using row subsets in lexicographic order (columns = all)."""
    for rows_ in itertools.combinations(range(len(m)), k):
        yield rows_, det([m[i] for i in rows_])
