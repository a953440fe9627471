"""Uniform renaming by transposition of two variables (and their primes)."""

from __future__ import annotations

from dataclasses import dataclass

from .statics import VarSet
from .syntax import (
    And, Assign, Box, Choice, Cmp, Diamond, Differential, DotFormula, DotTerm, Equiv,
    Exists, Forall, FuncApp, FuncOfAll, Imply, Loop, Not, Number, ODESystem, Or, Plus,
    PredApp, PredOfAll, Predicational, ProgConst, Seq, Test, Times, Truth, Variable,
)


@dataclass(frozen=True)
class Renaming:
    x: Variable
    y: Variable

    def __post_init__(self):
        if self.x.primed or self.y.primed:
            raise ValueError("renaming is given by unprimed variables")
        if self.x == self.y:
            raise ValueError("renaming a variable to itself")

    def swap(self, v: Variable) -> Variable:
        if v.name == self.x.name:
            return Variable(self.y.name, v.primed)
        if v.name == self.y.name:
            return Variable(self.x.name, v.primed)
        return v

    def swap_set(self, s: VarSet) -> VarSet:
        return VarSet(frozenset(self.swap(v) for v in s.elems), s.cofinite)


def uniformRename(r: Renaming, e):
    """Swap x with y and x' with y' everywhere in ``e``.  Symbols are untouched."""
    go = lambda n: uniformRename(r, n)  # noqa: E731
    if isinstance(e, Variable):
        return r.swap(e)
    if isinstance(e, (Number, DotTerm, FuncOfAll, Truth, PredOfAll, DotFormula, ProgConst)):
        return e
    if isinstance(e, FuncApp):
        return FuncApp(e.name, tuple(map(go, e.args)))
    if isinstance(e, PredApp):
        return PredApp(e.name, tuple(map(go, e.args)))
    if isinstance(e, (Plus, Times, And, Or, Imply, Equiv, Choice, Seq)):
        return type(e)(go(e.left), go(e.right))
    if isinstance(e, Differential):
        return Differential(go(e.arg))
    if isinstance(e, Cmp):
        return Cmp(e.rel, go(e.left), go(e.right))
    if isinstance(e, Predicational):
        return Predicational(e.name, go(e.arg))
    if isinstance(e, Not):
        return Not(go(e.arg))
    if isinstance(e, (Forall, Exists)):
        return type(e)(r.swap(e.var), go(e.body))
    if isinstance(e, (Box, Diamond)):
        return type(e)(go(e.prog), go(e.body))
    if isinstance(e, Assign):
        return Assign(r.swap(e.target), go(e.rhs))
    if isinstance(e, Test):
        return Test(go(e.cond))
    if isinstance(e, ODESystem):
        return ODESystem(tuple((r.swap(v), go(t)) for v, t in e.eqs), go(e.domain))
    if isinstance(e, Loop):
        return Loop(go(e.body))
    raise TypeError(f"cannot rename in {e!r}")
