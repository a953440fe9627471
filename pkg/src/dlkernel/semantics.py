"""Exact rational evaluation of terms and quantifier-free formulas.

Function symbols are interpreted by polynomials in their placeholder
arguments (``._0``, ``._1``, ...).  ``f(x#)`` is interpreted by a polynomial
over state variables.  A differential ``(t)'`` is evaluated by expanding
``t`` to a polynomial and summing ``x' * d t/d x`` over its unprimed
variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping

from .poly import Poly, to_poly
from .statics import freeVarsFormula, freeVarsTerm
from .syntax import (
    ALL, And, Cmp, Differential, DotTerm, Equiv, Formula, FuncApp, FuncOfAll, Imply, Not,
    Number, Or, Plus, PredApp, Term, Times, Truth, Variable, walk,
)


class EvalError(ValueError):
    pass


class State(dict):
    """Map from variables to rationals; absent variables are 0."""

    def __missing__(self, key):
        return Fraction(0)

    @staticmethod
    def parse(text: str) -> "State":
        s = State()
        for part in filter(None, (p.strip() for p in text.split(","))):
            m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*)('?)\s*=\s*(\S+)", part)
            if not m:
                raise ValueError(f"bad binding {part!r}")
            s[Variable(m.group(1), bool(m.group(2)))] = Fraction(m.group(3))
        return s


@dataclass
class GroundInterp:
    """Polynomial meanings of function and predicate symbols."""

    functions: Dict[tuple, Term] = field(default_factory=dict)
    predicates: Dict[tuple, Formula] = field(default_factory=dict)

    def copy(self) -> "GroundInterp":
        return GroundInterp(dict(self.functions), dict(self.predicates))


EMPTY_INTERP = GroundInterp()


def expand(I: GroundInterp, t: Term, args=None, depth: int = 0) -> Poly:
    """Polynomial over state variables (and dots when ``args`` is None)."""
    if depth > 50:
        raise EvalError("interpretation is cyclic")

    def leaf(n):
        if isinstance(n, Variable):
            return Poly.atom(n)
        if isinstance(n, DotTerm):
            if args is None:
                return Poly.atom(n)
            if n.index >= len(args):
                raise EvalError(f"placeholder ._{n.index} has no argument")
            return args[n.index]
        if isinstance(n, FuncApp):
            key = (n.name, len(n.args))
            if key not in I.functions:
                raise EvalError(f"uninterpreted function symbol {n.name}/{len(n.args)}")
            vals = [expand(I, a, args, depth) for a in n.args]
            return expand(I, I.functions[key], vals, depth + 1)
        if isinstance(n, FuncOfAll):
            key = (n.name, ALL)
            if key not in I.functions:
                raise EvalError(f"uninterpreted function symbol {n.name}(x#)")
            return expand(I, I.functions[key], None, depth + 1)
        if isinstance(n, Differential):
            inner = expand(I, n.arg, args, depth)
            return differential(inner)
        raise EvalError(f"cannot evaluate {n!r}")

    return to_poly(t, leaf)


def differential(p: Poly) -> Poly:
    """Sum over unprimed variables x of x' times the partial derivative by x."""
    out = Poly()
    for a in sorted(p.atoms(), key=lambda a: (getattr(a, "name", ""), getattr(a, "primed", False))):
        if not isinstance(a, Variable):
            raise EvalError("differential of a non-polynomial term")
        if a.primed:
            raise EvalError("nested differential or differential symbol under a differential")
    for a in p.atoms():
        out = out + Poly.atom(a.prime()) * p.diff(a)
    return out


def _check_no_dots(e):
    if any(isinstance(n, DotTerm) for n in walk(e)):
        raise EvalError("placeholder in evaluated expression")


def evalTerm(I: GroundInterp, nu: Mapping, t: Term) -> Fraction:
    _check_no_dots(t)
    return expand(I, t).evaluate(lambda v: nu.get(v, Fraction(0)))


def partialDerivative(t: Term, x: Variable, I: GroundInterp = EMPTY_INTERP) -> Term:
    """Canonical polynomial term for the partial derivative of ``t`` by ``x``."""
    return expand(I, t).diff(x).to_term()


_CMP = {
    ">=": lambda a, b: a >= b, ">": lambda a, b: a > b, "=": lambda a, b: a == b,
    "<=": lambda a, b: a <= b, "<": lambda a, b: a < b, "!=": lambda a, b: a != b,
}


def evalFormulaQF(I: GroundInterp, nu: Mapping, f: Formula) -> bool:
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Cmp):
        return _CMP[f.rel](evalTerm(I, nu, f.left), evalTerm(I, nu, f.right))
    if isinstance(f, PredApp):
        key = (f.name, len(f.args))
        if key not in I.predicates:
            raise EvalError(f"uninterpreted predicate symbol {f.name}/{len(f.args)}")
        vals = [Number(evalTerm(I, nu, a)) for a in f.args]
        from .usubst import USubst, substitute
        inst = substitute(USubst({("dot", i, 0): v for i, v in enumerate(vals)}), I.predicates[key])
        return evalFormulaQF(I, nu, inst)
    if isinstance(f, Not):
        return not evalFormulaQF(I, nu, f.arg)
    if isinstance(f, And):
        return evalFormulaQF(I, nu, f.left) and evalFormulaQF(I, nu, f.right)
    if isinstance(f, Or):
        return evalFormulaQF(I, nu, f.left) or evalFormulaQF(I, nu, f.right)
    if isinstance(f, Imply):
        return (not evalFormulaQF(I, nu, f.left)) or evalFormulaQF(I, nu, f.right)
    if isinstance(f, Equiv):
        return evalFormulaQF(I, nu, f.left) == evalFormulaQF(I, nu, f.right)
    raise EvalError(f"not a quantifier-free, modality-free formula: {type(f).__name__}")


def _expand_formula(I: GroundInterp, f: Formula) -> Formula:
    if isinstance(f, Truth):
        return f
    if isinstance(f, Cmp):
        return Cmp(f.rel, expand(I, f.left).to_term(), expand(I, f.right).to_term())
    if isinstance(f, Not):
        return Not(_expand_formula(I, f.arg))
    if isinstance(f, (And, Or, Imply, Equiv)):
        return type(f)(_expand_formula(I, f.left), _expand_formula(I, f.right))
    if isinstance(f, PredApp):
        key = (f.name, len(f.args))
        if key not in I.predicates:
            raise EvalError(f"uninterpreted predicate symbol {f.name}")
        from .usubst import USubst, substitute
        args = {("dot", i, 0): expand(I, a).to_term() for i, a in enumerate(f.args)}
        return _expand_formula(I, substitute(USubst(args), I.predicates[key]))
    raise EvalError("predicate interpretations must be quantifier-free and modality-free")


def adjointGround(sigma, I: GroundInterp) -> GroundInterp:
    """Interpretation that reads each replaced symbol the way ``sigma`` rewrites it."""
    from .usubst import _repl_fv
    out = I.copy()
    for key, repl in sigma.items():
        kind, name, arity = key
        if kind not in ("func", "pred"):
            raise EvalError("ground adjoints cover function and predicate symbols only")
        if not _repl_fv(key, repl).is_empty:
            raise EvalError(f"replacement for {name} has free variables; its adjoint is state-dependent")
        if kind == "func":
            out.functions[(name, arity)] = expand(I, repl).to_term()
        else:
            out.predicates[(name, arity)] = _expand_formula(I, repl)
    return out
