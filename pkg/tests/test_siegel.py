import random


from smallheight import siegel as SG
from smallheight.certified import CertifiedReal, certified_compare
from smallheight.fields import FieldDescriptor
from smallheight.subspaces import SubspaceBasis

Q = FieldDescriptor.rational()


def eq(x, y):
    return certified_compare(x, CertifiedReal._lift(y)) == 0


def test_constants_rational():
    assert SG.C_K(Q, 3).exact == 1


def test_constants_gaussian():
    f = FieldDescriptor.quadratic(-1)
    C = SG.C_K(f, 2)
    assert eq(C * C, CertifiedReal.rational(8) / CertifiedReal.pi())
    # four roots of unity exceed M = 3, so the unit branch applies
    assert SG.A_K(f, 2, 3).exact == 1
    # first branch formula (M^2 * 2^r1 * |D|)^(1/2d)
    assert eq(SG.A_K(f, 2, 4), CertifiedReal.radical(8, 2))
    assert certified_compare(SG.A_K(f, 2, 5), SG.A_K(f, 2, 4)) > 0


def test_R_K_function_field():
    f = FieldDescriptor.function(3)
    assert SG.R_K(f, 5).exact == 9
    assert eq(SG.A_K(f, 2, 5), CertifiedReal.exp(9))
    assert SG.R_K(f, 2) is None


def test_main_bound_examples():
    assert eq(SG.main_bound(Q, 2, 2, CertifiedReal.rational(1)), CertifiedReal.radical(32, 2))
    assert SG.main_bound(Q, 2, 1, CertifiedReal.rational(1)).exact == 2
    f3 = FieldDescriptor.function(3)
    assert eq(SG.main_bound(f3, 2, 5, CertifiedReal.rational(1)), CertifiedReal.exp(9))


def _check(X):
    sb = SG.siegel_basis(X)
    assert sb.certified, sb.status
    assert certified_compare(sb.product_h, sb.bound) <= 0
    assert sb.lower_bound_ok is not False
    return sb


def test_siegel_full_space():
    sb = _check(SubspaceBasis([[1, 0], [0, 1]], Q))
    assert sb.product_h.exact == 1


def test_siegel_diagonal_kernel():
    sb = _check(SubspaceBasis([[3, -3]], Q))
    assert [abs(c) for c in sb.vectors[0]] == [1, 1]


def test_siegel_rational_random():
    rng = random.Random(11)
    for _ in range(15):
        N = rng.randint(2, 5)
        L = rng.randint(1, N)
        rows = [[rng.randint(-9, 9) for _ in range(N)] for _ in range(L)]
        try:
            X = SubspaceBasis(rows, Q)
        except ValueError:
            continue
        _check(X)


def test_siegel_function_field_examples():
    f = FieldDescriptor.function(2)
    t = f.gen()
    sb = _check(SubspaceBasis([[t, t + 1]], f))
    assert eq(sb.product_h, CertifiedReal.exp(1))
    sb = _check(SubspaceBasis([[t * t, f.one], [f.zero, t]], f))
    assert sb.product_h.exact == 1


def test_siegel_gaussian():
    f = FieldDescriptor.quadratic(-1)
    i = f.gen()
    _check(SubspaceBasis([[i, f.element(-1)]], f))
    _check(SubspaceBasis([[f.one, f.zero], [f.zero, f.one]], f))


def test_siegel_real_quadratic_plane():
    f = FieldDescriptor.quadratic(2)
    X = SubspaceBasis([[f.element(c) for c in r] for r in ([1, -1, 0], [0, 1, -1])], f)
    _check(X)


def test_budget_exhaustion_reported():
    X = SubspaceBasis([[97, 89, 83, 79, 73]], Q)
    sb = SG.siegel_basis(X, budget=5)
    assert sb.status in ("budget exhausted", "certified")
