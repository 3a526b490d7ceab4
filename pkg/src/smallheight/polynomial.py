"""Sparse multivariate polynomials over the ground fields."""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .fields import FieldDescriptor

Exps = Tuple[int, ...]


class MultivariatePolynomial:
    """sum c_e X^e, stored as {exponent tuple: nonzero coefficient}."""

    def __init__(self, N: int, terms, field: FieldDescriptor):
        self.N = N
        self.field = field
        acc: Dict[Exps, object] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exps, c in items:
            e = tuple(int(k) for k in exps)
            if len(e) != N or any(k < 0 for k in e):
                raise ValueError(f"bad exponent vector {exps}")
            acc[e] = acc.get(e, field.zero) + field.element(c)
        self.terms = {e: c for e, c in sorted(acc.items()) if c}

    # -- constructors --------------------------------------------------------
    @classmethod
    def constant(cls, c, N, field):
        return cls(N, [((0,) * N, c)], field)

    @classmethod
    def variable(cls, i, N, field):
        e = [0] * N
        e[i] = 1
        return cls(N, [(tuple(e), field.one)], field)

    @classmethod
    def linear_form(cls, coeffs: Sequence, field):
        N = len(coeffs)
        return cls(N, [(tuple(1 if j == i else 0 for j in range(N)), c)
                       for i, c in enumerate(coeffs)], field)

    # -- structure -------------------------------------------------------------
    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def var_degrees(self) -> List[int]:
        return [max((e[i] for e in self.terms), default=0) for i in range(self.N)]

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, MultivariatePolynomial) and self.N == other.N
                and self.terms == other.terms)

    def __repr__(self):
        return f"MultivariatePolynomial(N={self.N}, {len(self.terms)} terms, deg={self.degree})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"X{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"({c})" + ("*" + mono if mono else ""))
        return " + ".join(parts)

    # -- arithmetic ------------------------------------------------------------
    def _check(self, other):
        if self.N != other.N or self.field != other.field:
            raise ValueError("incompatible polynomials")

    def __add__(self, other):
        self._check(other)
        return MultivariatePolynomial(self.N, list(self.terms.items()) + list(other.terms.items()), self.field)

    def __neg__(self):
        return MultivariatePolynomial(self.N, [(e, -c) for e, c in self.terms.items()], self.field)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultivariatePolynomial):
            c = self.field.element(other)
            return MultivariatePolynomial(self.N, [(e, c * v) for e, v in self.terms.items()], self.field)
        self._check(other)
        out = []
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return MultivariatePolynomial(self.N, out, self.field)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = MultivariatePolynomial.constant(self.field.one, self.N, self.field)
        for _ in range(n):
            out = out * self
        return out

    # -- evaluation ------------------------------------------------------------
    def evaluate(self, x: Sequence):
        """Exact value at a point of K^N, with per-variable power caching."""
        f = self.field
        if len(x) != self.N:
            raise ValueError("dimension mismatch")
        xs = [f.element(c) for c in x]
        cache: List[List] = [[f.one] for _ in xs]
        total = f.zero
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    pw = cache[i]
                    while len(pw) <= k:
                        pw.append(pw[-1] * xs[i])
                    term = term * pw[k]
            total = total + term
        return total

    __call__ = evaluate

    def restrict(self, basis: Sequence[Sequence]):
        """P_V as a callable xi -> P(sum xi_i v_i), by composition."""
        f = self.field
        vecs = [[f.element(c) for c in v] for v in basis]

        def pv(xi):
            x = [f.zero] * self.N
            for c, v in zip(xi, vecs):
                c = f.element(c)
                if c:
                    x = [a + c * b for a, b in zip(x, v)]
            return self.evaluate(x)

        return pv

    def expand_restriction(self, basis: Sequence[Sequence]) -> "MultivariatePolynomial":
        """Symbolic P(v(Y)) as a polynomial in L variables (oracle mode)."""
        f = self.field
        L = len(basis)
        forms = []
        for i in range(self.N):
            forms.append(MultivariatePolynomial.linear_form([f.element(v[i]) for v in basis], f))
        powers: Dict[Tuple[int, int], MultivariatePolynomial] = {}

        def pw(i, k):
            if (i, k) not in powers:
                powers[(i, k)] = forms[i] ** k
            return powers[(i, k)]

        out = MultivariatePolynomial(L, [], f)
        for e, c in self.terms.items():
            term = MultivariatePolynomial.constant(c, L, f)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            out = out + term
        return out

    # -- serialization ---------------------------------------------------------
    def to_json(self) -> dict:
        return {"terms": [{"coeff": self.field.format_element(c), "exps": list(e)}
                          for e, c in self.terms.items()]}

    @classmethod
    def from_json(cls, obj: dict, N: int, field: FieldDescriptor) -> "MultivariatePolynomial":
        terms = []
        for t in obj["terms"]:
            terms.append((t["exps"], field.parse_element(t["coeff"])))
        return cls(N, terms, field)


def product(polys: Iterable[MultivariatePolynomial]) -> Optional[MultivariatePolynomial]:
    out = None
    for p in polys:
        out = p if out is None else out * p
    return out
