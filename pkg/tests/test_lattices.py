import itertools
import random
from fractions import Fraction

import pytest

from smallheight import lattices as LT
from smallheight.certified import CertifiedReal, certified_compare
from smallheight.fields import FieldDescriptor, RationalFunction


def eq(x, y):
    return certified_compare(x, CertifiedReal._lift(y)) == 0


def brute_cube(cols, R, z=None):
    """Points sum k_j col_j in [-R, R]^n + z, by a generous box search."""
    n = len(cols)
    z = z or [0] * n
    box = int(R) + 2 + sum(abs(c) for col in cols for c in col)
    total = 0
    for k in itertools.product(range(-box, box + 1), repeat=n):
        p = [sum(k[j] * cols[j][i] for j in range(n)) for i in range(n)]
        if all(abs(Fraction(p[i]) - Fraction(z[i])) <= R for i in range(n)):
            total += 1
    return total


def test_cube_examples():
    r = LT.cube_count_fullrank([[1, 0], [0, 1]], 1)
    assert (r.exact, r.lower.exact, r.upper.exact, r.ok) == (9, 1, 9, True)
    r = LT.cube_count_fullrank([[2, 0], [0, 1]], 2)
    assert (r.exact, r.lower.exact, r.upper.exact) == (15, 3, 15)
    r = LT.cube_count_fullrank([[1, 0], [0, 1]], 1, z=[Fraction(1, 2), 0])
    assert r.exact == 6 and r.ok


def test_cube_random_against_brute_force():
    rng = random.Random(5)
    for _ in range(12):
        n = rng.randint(1, 2)
        A = [[rng.randint(1, 4) if i == j else (rng.randint(-3, 3) if j > i else 0) for j in range(n)]
             for i in range(n)]
        Delta = 1
        for i in range(n):
            Delta *= A[i][i]
        R = max(rng.randint(1, 4), Delta)
        cols = [[A[i][j] for i in range(n)] for j in range(n)]
        r = LT.cube_count_fullrank(A, R)
        assert r.exact == brute_cube(cols, R)
        assert r.ok


def test_not_upper_triangular():
    with pytest.raises(LT.PreconditionError):
        LT.cube_count_fullrank([[1, 0], [1, 1]], 2)


def test_sublattice_examples():
    r = LT.cube_count_sublattice([[1, -1]], 3)
    assert (r.exact, r.lower.exact, r.upper.exact) == (7, 6, 7)
    r = LT.cube_count_sublattice([[1, -1]], 1)
    assert (r.exact, r.lower.exact, r.upper.exact) == (3, 2, 3)
    r = LT.cube_count_sublattice([[1, -1, 0], [0, 1, -1]], 2)
    # zero-sum triples in [-2, 2]^3
    brute = sum(1 for p in itertools.product(range(-2, 3), repeat=3) if sum(p) == 0)
    assert r.exact == brute == 19
    assert r.lower.exact == 4 and r.upper.exact == 25 and r.ok


def test_minkowski_determinants():
    for d in (-1, 2, -3, 5, -5):
        f = FieldDescriptor.quadratic(d)
        assert LT.minkowski_embed(f).ok


def test_S_R_rational():
    Q = FieldDescriptor.rational()
    assert sorted(LT.S_R_numberfield(Q, 2)) == [-2, -1, 0, 1, 2]
    chk = LT.lemma_count_check(Q, 2)
    assert chk.count == 5 and chk.ok
    assert eq(chk.lower, CertifiedReal.radical(2, 2))


def test_S_R_gaussian_circle():
    f = FieldDescriptor.quadratic(-1)
    chk = LT.lemma_count_check(f, 3)
    assert chk.count == 29 == sum(1 for a in range(-3, 4) for b in range(-3, 4) if a * a + b * b <= 9)
    assert chk.lower.exact == Fraction(9, 2)
    assert chk.ok


def test_S_R_eisenstein_lower():
    f = FieldDescriptor.quadratic(-3)
    chk = LT.count_integers_of_bounded_height(f, 3)
    assert chk.ok
    assert eq(chk.lower, CertifiedReal.radical(27, 2))
    assert chk.extra["subset_of_height_ball"]


def test_phi_Y():
    assert LT.phi_Y(RationalFunction((0, 1), q=2)) == [1, 0, -1]
    assert LT.phi_Y(RationalFunction.const(1, 2)) == [0, 0, 0]
    assert LT.divisor_to_function([1, 1, -2], 2) == RationalFunction((0, 1, 1), q=2)


def test_zero_sum_counts():
    for n, m in ((3, 4), (2, 3), (4, 1)):
        brute = sum(1 for p in itertools.product(range(-m, m + 1), repeat=n) if sum(p) == 0)
        assert LT.count_zero_sum_cube(n, m) == brute


def test_count_f_examples():
    res = LT.enumerate_S_R_functionfield(3, 9)
    assert res.lower.exact == 6
    assert res.ok
    res = LT.enumerate_S_R_functionfield(2, 4)
    assert res.lemma_count == LT.count_zero_sum_cube(3, 4) + 1
    assert res.upper.exact == 82
    assert res.ok


def test_count_f_guard():
    res = LT.enumerate_S_R_functionfield(3, 2)
    assert not res.applicable and res.ok is None


@pytest.mark.parametrize("q,R", [(2, 2), (3, 3), (2, 3)])
def test_one_sided_count_matches_explicit(q, R):
    assert len(LT.enumerate_S_R_functionfield_explicit(q, R)) == LT.enumerate_S_R_functionfield(q, R).direct_count
