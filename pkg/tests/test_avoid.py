import itertools

import pytest

from smallheight import avoid as AV
from smallheight.certified import CertifiedReal, certified_compare
from smallheight.fields import FieldDescriptor
from smallheight.heights import height_h
from smallheight.polynomial import MultivariatePolynomial as MP
from smallheight.subspaces import SubspaceBasis, membership

Q = FieldDescriptor.rational()
F2 = FieldDescriptor.function(2)
F3 = FieldDescriptor.function(3)


def eq(x, y):
    return certified_compare(x, CertifiedReal._lift(y)) == 0


def std(N, f=Q):
    return SubspaceBasis([[f.one if i == j else f.zero for j in range(N)] for i in range(N)], f)


def x1x2(f=Q):
    return MP(2, {(1, 1): f.one}, f)


def test_witness_first_nonzero():
    assert list(AV.grid_nonvanishing_witness(x1x2(), [[1, 0], [0, 1]], [0, 1, 2])) == [1, 1]


def test_witness_exhausted_on_diagonal():
    P = MP.variable(0, 2, Q) - MP.variable(1, 2, Q)
    assert AV.grid_nonvanishing_witness(P, [[1, 1]], [0, 1, 2]) is None


def test_grid_too_small():
    with pytest.raises(AV.GridTooSmall):
        AV.grid_nonvanishing_witness(x1x2(), [[1, 0], [0, 1]], [0, 1])


def test_tightness_example():
    P = MP(2, {(2, 0): 1, (1, 0): -1, (0, 2): 1, (0, 1): -1}, Q)
    assert all(P.evaluate(p) == 0 for p in itertools.product([0, 1], repeat=2))
    assert P.evaluate([2, 0]) == 2


def test_identically_zero():
    assert not AV.is_identically_zero_on_V(x1x2(), [[1, 0], [0, 1]])
    P = MP.variable(0, 2, Q) - MP.variable(1, 2, Q)
    assert AV.is_identically_zero_on_V(P, [[1, 1]])
    one = F2.one
    sq = MP(2, {(2, 0): one, (0, 2): one}, F2)
    assert AV.is_identically_zero_on_V(sq, [[one, one]])


def _verify(cert, X, Z):
    f = X.field
    assert cert.verdict == "certified"
    assert membership(cert.point, X)
    for fam in Z.families:
        assert any(P.evaluate(cert.point) for P in fam)
    assert certified_compare(height_h(cert.point, f), cert.bound) <= 0


def test_solve_q_x1x2():
    X, Z = std(2), AV.VarietyUnion([[x1x2()]])
    cert = AV.solve(X, Z)
    _verify(cert, X, Z)
    assert list(cert.point) == [1, 1]
    assert eq(cert.bound, CertifiedReal.radical(32, 2))
    assert AV.grid_minimal(cert, Z, Q)


def test_solve_linear_unit_branch():
    X, Z = std(2), AV.VarietyUnion([[MP.variable(0, 2, Q)]])
    cert = AV.solve(X, Z)
    _verify(cert, X, Z)
    assert cert.branch == "units"
    assert cert.bound.exact == 2
    assert [abs(c) for c in cert.point] == [1, 1]


def test_solve_f3_constant_grid():
    X, Z = std(2, F3), AV.VarietyUnion([[x1x2(F3)]])
    cert = AV.solve(X, Z)
    _verify(cert, X, Z)
    assert cert.bound.exact == 1
    assert cert.h_point.exact == 1


def test_solve_gaussian():
    f = FieldDescriptor.quadratic(-1)
    X = std(3, f)
    P = MP(3, {(1, 1, 0): f.one, (0, 0, 2): f.gen()}, f)
    Z = AV.VarietyUnion([[P], [MP.variable(2, 3, f)]])
    _verify(AV.solve(X, Z), X, Z)


def test_contained_raises():
    X = SubspaceBasis([[1, 1]], Q)
    P = MP.variable(0, 2, Q) - MP.variable(1, 2, Q)
    with pytest.raises(AV.VContainedInVariety):
        AV.solve(X, AV.VarietyUnion([[P]]))


def test_subspace_avoidance_line():
    cert = AV.subspace_avoidance(std(2), [SubspaceBasis([[1, 1]], Q)])
    assert list(cert.point) == [1, -1]
    assert cert.bound.exact == 2
    assert cert.checks["outside_subspaces"] and cert.checks["corollary_ok"]


def test_subspace_avoidance_two_axes():
    U1 = SubspaceBasis([[1, 0, 0]], Q)
    U2 = SubspaceBasis([[0, 1, 0]], Q)
    cert = AV.subspace_avoidance(std(3), [U1, U2])
    assert cert.checks["outside_subspaces"]
    assert certified_compare(cert.checks["corollary_bound"], CertifiedReal.radical(72, 2)) == 0
    assert not membership(cert.point, U1) and not membership(cert.point, U2)


def test_subspace_avoidance_contained():
    with pytest.raises(AV.VContainedInVariety):
        AV.subspace_avoidance(SubspaceBasis([[1, 1]], Q), [SubspaceBasis([[2, 2]], Q)])


def test_constant_polynomials_rejected():
    with pytest.raises(ValueError):
        AV.VarietyUnion([[MP(2, [], Q)]])
    with pytest.raises(ValueError):
        AV.VarietyUnion([[]])
