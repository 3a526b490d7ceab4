import itertools
import random
from fractions import Fraction

import pytest
import sympy

from smallheight.certified import CertifiedReal, certified_compare
from smallheight.fields import FieldDescriptor
from smallheight.subspaces import (DualForm, RankError, SubspaceBasis, dual_form, duality_check,
                                   dual_height, grassmann, membership, subspace_height)


def B(rows, f=None):
    return SubspaceBasis(rows, f or FieldDescriptor.rational())


def test_grassmann_examples():
    assert grassmann(B([[1, 0], [0, 1]])).values == [1]
    assert grassmann(B([[1, -1]])).values == [1, -1]
    assert grassmann(B([[1, 0, 1], [0, 1, 1]])).values == [1, 1, -1]


def test_grassmann_against_sympy_minors():
    rng = random.Random(3)
    for _ in range(30):
        N, L = rng.randint(2, 5), rng.randint(1, 3)
        L = min(L, N)
        rows = [[rng.randint(-5, 5) for _ in range(N)] for _ in range(L)]
        M = sympy.Matrix(rows).T
        if M.rank() < L:
            continue
        gv = grassmann(B(rows))
        expected = [M.extract(list(I), list(range(L))).det() for I in itertools.combinations(range(N), L)]
        assert [int(v) for v in gv.values] == expected


def test_dual_form_examples():
    A = dual_form(B([[1, -1]]))
    assert len(A.rows) == 1
    r = A.rows[0]
    assert r[0] == r[1] != 0
    assert dual_form(B([[1, 0], [0, 1]])).rows == []
    A = dual_form(B([[1, 0, 0]]))
    span = sympy.Matrix(A.rows)
    assert span.rank() == 2 and all(row[0] == 0 for row in A.rows)


def test_duality_gamma():
    X = B([[1, -1]])
    A = DualForm([[Fraction(1), Fraction(1)]], 2)
    res = duality_check(X, A)
    assert res.ok and res.gamma == 1
    res2 = duality_check(X, DualForm([[Fraction(2), Fraction(2)]], 2))
    assert res2.ok and res2.gamma == Fraction(1, 2)
    full = duality_check(B([[1, 0], [0, 1]]), DualForm([], 2))
    assert full.ok and full.gamma == 1


def test_subspace_heights():
    assert certified_compare(subspace_height(B([[1, -1]])), CertifiedReal.radical(2, 2)) == 0
    assert subspace_height(B([[1, 0, 0], [0, 1, 0], [0, 0, 1]])).exact == 1
    assert certified_compare(subspace_height(B([[1, 0, 1], [0, 1, 1]])), CertifiedReal.radical(3, 2)) == 0


@pytest.mark.parametrize("field", ["Q", "Q(sqrt(-1))", "Q(sqrt(2))", "F2(t)"])
def test_height_duality(field):
    f = FieldDescriptor.parse(field)
    X = SubspaceBasis([[f.element(c) for c in r] for r in ([1, 2, 0, 1], [0, 1, 3, 1])], f)
    A = dual_form(X)
    assert duality_check(X, A).ok
    assert certified_compare(subspace_height(X), dual_height(A, f)) == 0


def test_membership():
    assert membership([1, -1], B([[1, -1]]))
    assert not membership([1, 1], B([[1, -1]]))
    assert membership([2, 2, 4], B([[1, 0, 1], [0, 1, 1]]))


def test_rank_deficient_basis_rejected():
    with pytest.raises(RankError):
        B([[1, 2], [2, 4]])
