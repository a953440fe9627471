"""Syntactic static semantics: signatures and free, bound, must-bound variables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .syntax import (
    ALL, And, Assign, Box, Choice, Cmp, Diamond, Differential, DotFormula, DotTerm,
    Equiv, Exists, Forall, FuncApp, FuncOfAll, Imply, Loop, Not, Number, ODESystem, Or,
    Plus, PredApp, PredOfAll, Predicational, ProgConst, Seq, Test, Times, Truth,
    Variable, walk,
)


def _key(v: Variable):
    return (v.name, v.primed)


@dataclass(frozen=True)
class VarSet:
    """A finite set of variables, or the complement of one (``cofinite``)."""

    elems: frozenset = frozenset()
    cofinite: bool = False

    @staticmethod
    def of(*vs: Variable) -> "VarSet":
        return VarSet(frozenset(vs))

    @staticmethod
    def finite(vs: Iterable[Variable]) -> "VarSet":
        return VarSet(frozenset(vs))

    @staticmethod
    def all() -> "VarSet":
        return VarSet(frozenset(), True)

    @property
    def is_all(self) -> bool:
        return self.cofinite and not self.elems

    @property
    def is_empty(self) -> bool:
        return not self.cofinite and not self.elems

    def __contains__(self, v: Variable) -> bool:
        return (v in self.elems) != self.cofinite

    def __or__(self, o: "VarSet") -> "VarSet":
        if not self.cofinite and not o.cofinite:
            return VarSet(self.elems | o.elems)
        if self.cofinite and o.cofinite:
            return VarSet(self.elems & o.elems, True)
        fin, co = (self, o) if o.cofinite else (o, self)
        return VarSet(co.elems - fin.elems, True)

    def __and__(self, o: "VarSet") -> "VarSet":
        if not self.cofinite and not o.cofinite:
            return VarSet(self.elems & o.elems)
        if self.cofinite and o.cofinite:
            return VarSet(self.elems | o.elems, True)
        fin, co = (self, o) if o.cofinite else (o, self)
        return VarSet(fin.elems - co.elems)

    def complement(self) -> "VarSet":
        return VarSet(self.elems, not self.cofinite)

    def __sub__(self, o: "VarSet") -> "VarSet":
        return self & o.complement()

    def __le__(self, o: "VarSet") -> bool:
        return (self - o).is_empty

    def primes(self) -> "VarSet":
        """The differential closure ``S ∪ S'``: adds x' for every unprimed x in S."""
        if not self.cofinite:
            return VarSet(self.elems | {v.prime() for v in self.elems if not v.primed})
        keep = {v for v in self.elems if not v.primed or v.base() in self.elems}
        return VarSet(frozenset(keep), True)

    def sorted(self) -> list:
        return sorted(self.elems, key=_key)

    def __str__(self) -> str:
        names = ",".join(str(v) for v in self.sorted())
        if self.cofinite:
            return "V" if not names else "V\\{" + names + "}"
        return "{" + names + "}"

    def to_json(self):
        names = [str(v) for v in self.sorted()]
        return {"all_except": names} if self.cofinite else names


EMPTY = VarSet()
ALLVARS = VarSet.all()


# --------------------------------------------------------------- signature

@dataclass(frozen=True)
class Signature:
    functions: frozenset = frozenset()
    predicates: frozenset = frozenset()
    quantifierSymbols: frozenset = frozenset()
    programConstants: frozenset = frozenset()

    def __or__(self, o: "Signature") -> "Signature":
        return Signature(self.functions | o.functions, self.predicates | o.predicates,
                         self.quantifierSymbols | o.quantifierSymbols,
                         self.programConstants | o.programConstants)

    def __str__(self) -> str:
        def fmt(s):
            return "{" + ", ".join(f"{n}/{a}" for n, a in sorted(s, key=lambda p: (p[0], str(p[1])))) + "}"
        return (f"functions={fmt(self.functions)} predicates={fmt(self.predicates)} "
                f"quantifiers={fmt(self.quantifierSymbols)} programs="
                + "{" + ", ".join(sorted(n for n, _ in self.programConstants)) + "}")


def signature(e) -> Signature:
    """Symbols occurring in ``e``.  Placeholders and numerals are not symbols."""
    fs, ps, qs, prs = set(), set(), set(), set()
    for n in walk(e):
        if isinstance(n, FuncApp):
            fs.add((n.name, len(n.args)))
        elif isinstance(n, FuncOfAll):
            fs.add((n.name, ALL))
        elif isinstance(n, PredApp):
            ps.add((n.name, len(n.args)))
        elif isinstance(n, PredOfAll):
            qs.add((n.name, 0))
        elif isinstance(n, Predicational):
            qs.add((n.name, 1))
        elif isinstance(n, ProgConst):
            prs.add((n.name, 0))
    return Signature(frozenset(fs), frozenset(ps), frozenset(qs), frozenset(prs))


def symbol_keys(e) -> set:
    """Substitution keys of everything replaceable in ``e``, placeholders included."""
    out = set()
    for n in walk(e):
        if isinstance(n, FuncApp):
            out.add(("func", n.name, len(n.args)))
        elif isinstance(n, FuncOfAll):
            out.add(("func", n.name, ALL))
        elif isinstance(n, PredApp):
            out.add(("pred", n.name, len(n.args)))
        elif isinstance(n, PredOfAll):
            out.add(("quant", n.name, 0))
        elif isinstance(n, Predicational):
            out.add(("quant", n.name, 1))
        elif isinstance(n, ProgConst):
            out.add(("prog", n.name, 0))
        elif isinstance(n, DotTerm):
            out.add(("dot", n.index, 0))
        elif isinstance(n, DotFormula):
            out.add(("dotf", "_", 0))
    return out


# ------------------------------------------------------------ free variables

def freeVarsTerm(t) -> VarSet:
    if isinstance(t, Variable):
        return VarSet.of(t)
    if isinstance(t, (Number, DotTerm)):
        return EMPTY
    if isinstance(t, FuncOfAll):
        return ALLVARS
    if isinstance(t, FuncApp):
        out = EMPTY
        for a in t.args:
            out = out | freeVarsTerm(a)
        return out
    if isinstance(t, (Plus, Times)):
        return freeVarsTerm(t.left) | freeVarsTerm(t.right)
    if isinstance(t, Differential):
        return freeVarsTerm(t.arg).primes()
    raise TypeError(f"not a term: {t!r}")


def freeVarsFormula(f) -> VarSet:
    if isinstance(f, (Truth, DotFormula)):
        return EMPTY
    if isinstance(f, Cmp):
        return freeVarsTerm(f.left) | freeVarsTerm(f.right)
    if isinstance(f, PredApp):
        out = EMPTY
        for a in f.args:
            out = out | freeVarsTerm(a)
        return out
    if isinstance(f, (PredOfAll, Predicational)):
        return ALLVARS
    if isinstance(f, Not):
        return freeVarsFormula(f.arg)
    if isinstance(f, (And, Or, Imply, Equiv)):
        return freeVarsFormula(f.left) | freeVarsFormula(f.right)
    if isinstance(f, (Forall, Exists)):
        return freeVarsFormula(f.body) - VarSet.of(f.var)
    if isinstance(f, (Box, Diamond)):
        return freeVarsProgram(f.prog) | (freeVarsFormula(f.body) - mustBoundVars(f.prog))
    raise TypeError(f"not a formula: {f!r}")


def freeVarsProgram(a) -> VarSet:
    if isinstance(a, ProgConst):
        return ALLVARS
    if isinstance(a, Assign):
        return freeVarsTerm(a.rhs)
    if isinstance(a, Test):
        return freeVarsFormula(a.cond)
    if isinstance(a, ODESystem):
        out = VarSet.finite(a.vars)
        for _, rhs in a.eqs:
            out = out | freeVarsTerm(rhs)
        return out | freeVarsFormula(a.domain)
    if isinstance(a, Choice):
        return freeVarsProgram(a.left) | freeVarsProgram(a.right)
    if isinstance(a, Seq):
        return freeVarsProgram(a.left) | (freeVarsProgram(a.right) - mustBoundVars(a.left))
    if isinstance(a, Loop):
        return freeVarsProgram(a.body)
    raise TypeError(f"not a program: {a!r}")


def freeVars(e) -> VarSet:
    from .syntax import Formula, Program, Term
    if isinstance(e, Term):
        return freeVarsTerm(e)
    if isinstance(e, Formula):
        return freeVarsFormula(e)
    if isinstance(e, Program):
        return freeVarsProgram(e)
    raise TypeError(f"no free variables for {e!r}")


# ----------------------------------------------------------- bound variables

def boundVars(a) -> VarSet:
    if isinstance(a, ProgConst):
        return ALLVARS
    if isinstance(a, Assign):
        return VarSet.of(a.target)
    if isinstance(a, Test):
        return EMPTY
    if isinstance(a, ODESystem):
        return VarSet.finite(a.vars).primes()
    if isinstance(a, (Choice, Seq)):
        return boundVars(a.left) | boundVars(a.right)
    if isinstance(a, Loop):
        return boundVars(a.body)
    raise TypeError(f"not a program: {a!r}")


def boundVarsFormula(f) -> VarSet:
    if isinstance(f, (Truth, Cmp, PredApp, PredOfAll, DotFormula)):
        return EMPTY
    if isinstance(f, Predicational):
        return ALLVARS
    if isinstance(f, Not):
        return boundVarsFormula(f.arg)
    if isinstance(f, (And, Or, Imply, Equiv)):
        return boundVarsFormula(f.left) | boundVarsFormula(f.right)
    if isinstance(f, (Forall, Exists)):
        return VarSet.of(f.var) | boundVarsFormula(f.body)
    if isinstance(f, (Box, Diamond)):
        return boundVars(f.prog) | boundVarsFormula(f.body)
    raise TypeError(f"not a formula: {f!r}")


def mustBoundVars(a) -> VarSet:
    if isinstance(a, (ProgConst, Loop, Test)):
        return EMPTY
    if isinstance(a, (Assign, ODESystem)):
        return boundVars(a)
    if isinstance(a, Choice):
        return mustBoundVars(a.left) & mustBoundVars(a.right)
    if isinstance(a, Seq):
        return mustBoundVars(a.left) | mustBoundVars(a.right)
    raise TypeError(f"not a program: {a!r}")
