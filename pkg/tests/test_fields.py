from fractions import Fraction

import pytest

from smallheight.certified import CertifiedReal, UnresolvedComparison, certified_compare
from smallheight.fields import (FieldDescriptor, FieldError, QuadraticElement, RationalFunction,
                                arith, field_invariants)


def test_invariants_rational():
    inv = field_invariants(FieldDescriptor.rational())
    assert (inv.degree, inv.r1, inv.r2, inv.discriminant, inv.roots_of_unity) == (1, 1, 0, 1, 2)


def test_invariants_gaussian():
    inv = field_invariants(FieldDescriptor.quadratic(-1))
    assert (inv.degree, inv.r1, inv.r2, inv.discriminant, inv.roots_of_unity) == (2, 0, 1, -4, 4)


@pytest.mark.parametrize("d,disc,w", [(2, 8, 2), (-3, -3, 6), (5, 5, 2), (-5, -20, 2), (3, 12, 2)])
def test_discriminant_rule(d, disc, w):
    inv = field_invariants(FieldDescriptor.quadratic(d))
    assert inv.discriminant == disc
    assert inv.roots_of_unity == w


def test_invariants_function_field():
    inv = field_invariants(FieldDescriptor.function(3))
    assert (inv.genus, inv.effective_degree, inv.rational_points, inv.class_number) == (0, 1, 4, 1)


def test_roots_of_unity_are_units():
    for d in (-1, -3, 2):
        f = FieldDescriptor.quadratic(d)
        roots = f.roots_of_unity()
        assert len(roots) == field_invariants(f).roots_of_unity
        for z in roots:
            assert z.norm() == 1


def test_quadratic_norm_and_conjugate():
    assert QuadraticElement(2, 1, -1).norm() == 5
    c = QuadraticElement(1, 1, 2).conjugate()
    assert (c.a, c.b) == (1, -1)
    x = QuadraticElement(Fraction(3, 2), -7, 5)
    assert x * x.inverse() == 1


def test_function_field_arithmetic():
    a = RationalFunction((1, 1), q=2)
    assert a * a == RationalFunction((1, 0, 1), q=2)
    # reduced with monic denominator
    r = RationalFunction((2, 2), (2,), q=3)
    assert r.num == (1, 1) and r.den == (1,)


def test_arith_dispatch():
    f = FieldDescriptor.quadratic(-1)
    i = f.gen()
    assert arith(f, i, i, "mul") == -1
    assert arith(f, 1, 2 * i, "div") == QuadraticElement(0, Fraction(-1, 2), -1)
    assert arith(f, QuadraticElement(3, 4, -1), None, "norm") == 25
    with pytest.raises(ZeroDivisionError):
        arith(f, 1, 0, "div")


@pytest.mark.parametrize("text", ["Q", "Q(sqrt(-1))", "F3(t)", "quadratic:5", "function:2"])
def test_parse_field_roundtrip(text):
    f = FieldDescriptor.parse(text)
    assert FieldDescriptor.parse(str(f)) == f


@pytest.mark.parametrize("bad", ["Q(sqrt(4))", "F4(t)", "Z", "Q(sqrt(1))"])
def test_parse_field_rejects(bad):
    with pytest.raises(FieldError):
        FieldDescriptor.parse(bad)


def test_element_encodings():
    f = FieldDescriptor.quadratic(2)
    x = f.parse_element("(1/2, -3)")
    assert (x.a, x.b) == (Fraction(1, 2), -3)
    assert f.parse_element(f.format_element(x)) == x
    g = FieldDescriptor.function(3)
    y = g.parse_element({"num": [1, 2], "den": [0, 1]})
    assert g.parse_element(g.format_element(y)) == y


def test_compare_exact_equal():
    assert certified_compare(CertifiedReal.rational(Fraction(3, 2)), CertifiedReal.rational(Fraction(3, 2))) == 0


def test_compare_sqrt2_less_than_three_halves():
    assert certified_compare(CertifiedReal.radical(2, 2), CertifiedReal.rational(Fraction(3, 2))) < 0


def test_compare_unresolved():
    x = CertifiedReal.from_interval(1, 1 + Fraction(1, 2 ** 70))
    with pytest.raises(UnresolvedComparison):
        certified_compare(x, CertifiedReal.rational(1))


def test_closed_form_algebra():
    s2 = CertifiedReal.radical(2, 2)
    assert (s2 * s2).exact == 2
    assert certified_compare(s2 + s2, CertifiedReal.radical(8, 2)) == 0
    assert certified_compare(CertifiedReal.pi(), CertifiedReal.rational(Fraction(22, 7))) < 0
