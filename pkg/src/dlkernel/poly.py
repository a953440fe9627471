"""Sparse multivariate polynomials with exact rational coefficients.

Atoms are variables or opaque terms (anything that is not +, * or a numeral).
Treating an opaque term as an indeterminate is sound for identity checking:
syntactically equal subterms always denote equal values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Tuple

from .syntax import Number, Plus, Term, Times, Variable

Monomial = Tuple[tuple, ...]


def atom_key(a) -> tuple:
    if isinstance(a, Variable):
        return (0, a.name, a.primed)
    from .parser import printTerm
    return (1, printTerm(a))


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Monomial, Fraction] = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @staticmethod
    def const(c) -> "Poly":
        return Poly({(): Fraction(c)})

    @staticmethod
    def atom(a) -> "Poly":
        return Poly({((a, 1),): Fraction(1)})

    def __add__(self, o: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, o: "Poly") -> "Poly":
        return self + (-o)

    def scale(self, k) -> "Poly":
        return Poly({m: c * k for m, c in self.terms.items()})

    def __mul__(self, o: "Poly") -> "Poly":
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    def __eq__(self, o) -> bool:
        return isinstance(o, Poly) and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_const(self) -> bool:
        return all(m == () for m in self.terms)

    @property
    def constant(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def atoms(self) -> set:
        return {a for m in self.terms for a, _ in m}

    def diff(self, a) -> "Poly":
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            for i, (b, e) in enumerate(m):
                if b == a:
                    rest = m[:i] + (((b, e - 1),) if e > 1 else ()) + m[i + 1:]
                    out[rest] = out.get(rest, 0) + c * e
        return Poly(out)

    def evaluate(self, value: Callable) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            p = c
            for a, e in m:
                p *= value(a) ** e
            total += p
        return total

    def substitute(self, a, q: "Poly") -> "Poly":
        """Replace atom ``a`` by polynomial ``q``."""
        out = Poly()
        for m, c in self.terms.items():
            term = Poly.const(c)
            for b, e in m:
                f = q if b == a else Poly.atom(b)
                for _ in range(e):
                    term = term * f
            out = out + term
        return out

    def degree_in(self, a) -> int:
        return max((e for m in self.terms for b, e in m if b == a), default=0)

    def coeff_of(self, a) -> "Poly":
        """Coefficient of a^1 when ``a`` occurs at most linearly."""
        out = {}
        for m, c in self.terms.items():
            rest = tuple(p for p in m if p[0] != a)
            if len(rest) != len(m):
                out[rest] = out.get(rest, 0) + c
        return Poly(out)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _mono_sort(mc[0]))

    def to_term(self) -> Term:
        """Canonical term: monomials in a fixed order, powers as repeated products."""
        if not self.terms:
            return Number(0)
        out = None
        for m, c in self.sorted_terms():
            factors = [a for a, e in m for _ in range(e)]
            t = None
            for f in factors:
                t = f if t is None else Times(t, f)
            if t is None:
                t = Number(c)
            elif c != 1:
                t = Times(Number(c), t)
            out = t if out is None else Plus(out, t)
        return out

    def __repr__(self) -> str:
        from .parser import printTerm
        return f"Poly({printTerm(self.to_term())})"


def _mono_sort(m: Monomial):
    return (-sum(e for _, e in m), [(atom_key(a), -e) for a, e in m])


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    d = dict(m1)
    for a, e in m2:
        d[a] = d.get(a, 0) + e
    return tuple(sorted(d.items(), key=lambda ae: atom_key(ae[0])))


def to_poly(t: Term, leaf: Callable = None) -> Poly:
    """Normal form of ``t``.  ``leaf`` maps non-arithmetic subterms to polynomials;
    the default keeps them as opaque atoms."""
    if isinstance(t, Number):
        return Poly.const(t.value)
    if isinstance(t, Plus):
        return to_poly(t.left, leaf) + to_poly(t.right, leaf)
    if isinstance(t, Times):
        return to_poly(t.left, leaf) * to_poly(t.right, leaf)
    if leaf is not None:
        return leaf(t)
    return Poly.atom(t)
