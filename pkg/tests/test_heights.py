import random
from fractions import Fraction

import pytest
import sympy

from smallheight import heights as HT
from smallheight.certified import CertifiedReal, certified_compare
from smallheight.fields import FieldDescriptor, QuadraticElement, RationalFunction


def eq(x, y):
    return certified_compare(x, CertifiedReal._lift(y)) == 0


def test_padic_abs(Q):
    (v2,) = HT.primes_above(Q, 2)
    assert HT.abs_value(Fraction(3, 2), v2, Q).exact == 2


def test_ff_infinite_abs(F2):
    (vinf,) = HT.infinite_places(F2)
    assert eq(HT.abs_value(F2.gen(), vinf, F2), CertifiedReal.exp(1))


def test_complex_abs(QI):
    (v,) = HT.infinite_places(QI)
    assert eq(HT.abs_value(QuadraticElement(1, 1, -1), v, QI), CertifiedReal.radical(2, 2))


def test_ord_p_guards():
    with pytest.raises(ValueError):
        HT.ord_p(0, 2)
    with pytest.raises(ValueError):
        HT.ord_p(6, -1)
    assert HT.ord_p(-24, 2) == 3


@pytest.mark.parametrize("a", [6, Fraction(-35, 12), 1])
def test_product_formula_rational(Q, a):
    assert HT.product_formula_check(a, Q).ok


def test_product_formula_function_field(F2):
    a = RationalFunction((0, 1), (1, 1), q=2)
    assert HT.product_formula_check(a, F2).ok


@pytest.mark.parametrize("d", [-1, 2, -3, 5, -5, 3])
def test_product_formula_quadratic_random(d):
    f = FieldDescriptor.quadratic(d)
    rng = random.Random(d)
    for _ in range(20):
        a = QuadraticElement(Fraction(rng.randint(-30, 30), rng.randint(1, 12)),
                             Fraction(rng.randint(-30, 30), rng.randint(1, 12)), d)
        if a:
            assert HT.product_formula_check(a, f).ok


def test_primes_above_split_types():
    f = FieldDescriptor.quadratic(-1)
    assert [v.split for v in HT.primes_above(f, 5)] == ["split", "split"]
    assert [v.split for v in HT.primes_above(f, 3)] == ["inert"]
    assert [v.split for v in HT.primes_above(f, 2)] == ["ramified"]


def test_heights_of_3_4(Q):
    assert HT.height_H([3, 4], Q).exact == 4
    assert HT.height_h([3, 4], Q).exact == 4
    assert HT.height_cal_H([3, 4], Q).exact == 5


def test_height_ff_constant_vector(F2):
    x = [RationalFunction((1, 0, 1), q=2)]
    assert HT.height_H(x, F2).exact == 1
    assert eq(HT.height_h(x, F2), CertifiedReal.exp(2))


def test_weil_heights(Q, QI):
    assert HT.weil_height(Fraction(3, 2), Q).exact == 3
    assert HT.weil_height(0, Q).exact == 1
    assert eq(HT.weil_height(QuadraticElement(1, 1, -1), QI), CertifiedReal.radical(2, 2))


def test_finite_part(Q, QI):
    assert HT.finite_part([3, 4], Q) == 1
    assert HT.finite_part([2, 2], Q) == Fraction(1, 2)
    fp = HT.finite_part([QuadraticElement(1, 1, -1), 2], QI, normalized=True)
    assert eq(fp, CertifiedReal.radical(Fraction(1, 2), 2))


def test_rational_heights_against_sympy(Q):
    rng = random.Random(7)
    for _ in range(200):
        x = [Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(rng.randint(1, 4))]
        if not any(x):
            continue
        den = sympy.ilcm(1, *[c.denominator for c in x])
        ints = [int(c * den) for c in x]
        g = sympy.igcd(0, *ints)
        prim = [abs(c // g) for c in ints]
        assert HT.height_H(x, Q).exact == max(prim)
        assert certified_compare(HT.height_cal_H(x, Q), CertifiedReal.radical(sum(c * c for c in prim), 2)) == 0
        full = [Fraction(1)] + x
        den = sympy.ilcm(1, *[c.denominator for c in full])
        ints = [int(c * den) for c in full]
        g = sympy.igcd(0, *ints)
        assert HT.height_h(x, Q).exact == max(abs(c // g) for c in ints)


def test_scaling_invariance(QI):
    x = [QuadraticElement(1, 2, -1), QuadraticElement(3, 0, -1)]
    lam = QuadraticElement(Fraction(2, 3), -5, -1)
    assert certified_compare(HT.height_H(x, QI), HT.height_H([lam * c for c in x], QI)) == 0


def test_absoluteness(Q):
    x = [3, Fraction(5, 2), -7]
    base = HT.height_H(x, Q)
    for d in (-1, 2, 5):
        f = FieldDescriptor.quadratic(d)
        assert certified_compare(HT.height_H([f.element(c) for c in x], f), base) == 0


@pytest.mark.parametrize("xi,xs,field", [
    ([1, 1], [[1, 0], [0, 1]], "Q"),
    ([2, 3], [[1, 0], [0, 1]], "Q"),
])
def test_sum_height(xi, xs, field):
    f = FieldDescriptor.parse(field)
    assert HT.sum_height_bound_check(xi, xs, f).ok


def test_sum_height_equality_case(F2):
    t = F2.gen()
    one, zero = F2.one, F2.zero
    res = HT.sum_height_bound_check([t, one], [[one, zero], [zero, one]], F2)
    assert res.ok
    assert certified_compare(res.lhs, res.rhs) == 0


def test_twisted_identity(Q):
    A = HT.TwistedOperator.identity(2, Q)
    assert HT.dilation(A).exact == 1
    assert certified_compare(HT.twisted_height(A, [1, 2]), HT.height_H([1, 2], Q)) == 0


def test_twisted_archimedean_component(Q):
    (vinf,) = HT.infinite_places(Q)
    A = HT.TwistedOperator(2, Q, {vinf: [[2, 0], [0, 1]]})
    res = HT.twisted_check(A, [1, 1])
    assert res.dilation.exact == 3
    assert res.twisted.exact == 2
    assert res.ok


def test_twisted_padic_component(Q):
    (v2,) = HT.primes_above(Q, 2)
    A = HT.TwistedOperator(2, Q, {v2: [[Fraction(1, 2), 0], [0, 1]]})
    res = HT.twisted_check(A, [1, 1])
    assert res.twisted.exact == 2
    assert res.dilation.exact == 3
    assert res.ok


def test_twisted_singular_rejected(Q):
    (vinf,) = HT.infinite_places(Q)
    with pytest.raises(ValueError):
        HT.TwistedOperator(2, Q, {vinf: [[1, 1], [1, 1]]})
