import random
from fractions import Fraction

import sympy

from smallheight.fields import FieldDescriptor
from smallheight.polynomial import MultivariatePolynomial as MP

Q = FieldDescriptor.rational()
F2 = FieldDescriptor.function(2)


def x1x2(f=Q):
    return MP(2, {(1, 1): f.one}, f)


def test_evaluate():
    assert x1x2().evaluate([1, 1]) == 1


def test_restriction():
    pv = x1x2().restrict([[1, 1], [1, -1]])
    assert pv([1, 1]) == 0
    assert pv([1, 0]) == 1


def test_char2_evaluation():
    P = MP.variable(0, 2, F2) - MP.variable(1, 2, F2)
    t = F2.gen()
    assert P.evaluate([t, t + 1]) == 1


def test_normalization_and_degree():
    P = MP(2, [((1, 0), 1), ((1, 0), -1), ((0, 2), 3)], Q)
    assert list(P.terms) == [(0, 2)]
    assert P.degree == 2
    assert MP(2, [], Q).degree == -1
    assert (P - P).is_zero()


def test_expand_restriction_against_sympy():
    rng = random.Random(2)
    X = sympy.symbols("x0:3")
    Y = sympy.symbols("y0:2")
    for _ in range(20):
        terms = {tuple(rng.randint(0, 2) for _ in range(3)): rng.randint(-4, 4) for _ in range(3)}
        P = MP(3, terms, Q)
        basis = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(2)]
        sym = sum(c * sympy.prod(v ** k for v, k in zip(X, e)) for e, c in P.terms.items()) if P.terms else 0
        sub = {X[i]: sum(Y[j] * basis[j][i] for j in range(2)) for i in range(3)}
        expected = sympy.Poly(sympy.expand(sympy.sympify(sym).subs(sub, simultaneous=True)), *Y)
        got = P.expand_restriction(basis)
        assert {tuple(e): Fraction(int(c)) for e, c in expected.terms() if c} == dict(got.terms)


def test_json_roundtrip():
    P = MP(2, {(2, 0): Fraction(1, 2), (0, 1): -3}, Q)
    assert MP.from_json(P.to_json(), 2, Q) == P
    t = F2.gen()
    R = MP(1, {(3,): t + 1}, F2)
    assert MP.from_json(R.to_json(), 1, F2) == R
