"""Abstract syntax of differential dynamic logic.

Terms, formulas and hybrid programs are immutable dataclasses.  Structural
equality is plain dataclass equality: two trees are equal iff they agree
node for node.

Two node kinds go beyond the textbook grammar:

* ``FuncOfAll(f)`` is ``f(x#)``, a function symbol applied to the vector of
  all variables.  ``PredOfAll(p)`` is ``p(x#)``, handled as a quantifier
  symbol of arity 0.  Replacing either one never contributes free variables
  to a substitution.
* ``DotTerm(i)`` and ``DotFormula()`` are the reserved placeholders used
  inside substitution replacements.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

#: arity marker of symbols applied to the vector of all variables
ALL = "x#"

RELATIONS = (">=", ">", "=", "<=", "<", "!=")


class Node:
    __slots__ = ()

    def __str__(self) -> str:
        from .parser import pretty
        return pretty(self)


class Term(Node):
    __slots__ = ()


class Formula(Node):
    __slots__ = ()


class Program(Node):
    __slots__ = ()


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Variable(Term):
    name: str
    primed: bool = False

    def prime(self) -> "Variable":
        return Variable(self.name, True)

    def base(self) -> "Variable":
        return Variable(self.name, False)


@dataclass(frozen=True)
class Number(Term):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class FuncApp(Term):
    name: str
    args: tuple = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class FuncOfAll(Term):
    name: str


@dataclass(frozen=True)
class DotTerm(Term):
    index: int = 0


@dataclass(frozen=True)
class Plus(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Times(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Differential(Term):
    arg: Term


# ------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Truth(Formula):
    value: bool


@dataclass(frozen=True)
class Cmp(Formula):
    rel: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass(frozen=True)
class PredApp(Formula):
    name: str
    args: tuple = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class PredOfAll(Formula):
    name: str


@dataclass(frozen=True)
class Predicational(Formula):
    name: str
    arg: Formula


@dataclass(frozen=True)
class DotFormula(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imply(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Equiv(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: Variable
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: Variable
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    prog: Program
    body: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    prog: Program
    body: Formula


# ------------------------------------------------------------- programs

@dataclass(frozen=True)
class ProgConst(Program):
    name: str


@dataclass(frozen=True)
class Assign(Program):
    target: Variable
    rhs: Term


@dataclass(frozen=True)
class Test(Program):
    cond: Formula


@dataclass(frozen=True)
class ODESystem(Program):
    eqs: tuple
    domain: Formula = Truth(True)

    def __post_init__(self):
        eqs = tuple((v, t) for v, t in self.eqs)
        object.__setattr__(self, "eqs", eqs)

    @property
    def vars(self) -> tuple:
        return tuple(v for v, _ in self.eqs)


@dataclass(frozen=True)
class Choice(Program):
    left: Program
    right: Program


@dataclass(frozen=True)
class Seq(Program):
    left: Program
    right: Program


@dataclass(frozen=True)
class Loop(Program):
    body: Program


Expr = Union[Term, Formula, Program]

TRUE = Truth(True)
FALSE = Truth(False)


def structEq(a: Expr, b: Expr) -> bool:
    """Node-for-node identity of two trees."""
    return type(a) is type(b) and a == b


def children(e: Expr) -> list:
    """Immediate subexpressions in a fixed order (used for paths)."""
    if isinstance(e, (Plus, Times, And, Or, Imply, Equiv, Choice, Seq)):
        return [e.left, e.right]
    if isinstance(e, (FuncApp, PredApp)):
        return list(e.args)
    if isinstance(e, Differential):
        return [e.arg]
    if isinstance(e, (Not, Predicational)):
        return [e.arg]
    if isinstance(e, Cmp):
        return [e.left, e.right]
    if isinstance(e, (Forall, Exists)):
        return [e.var, e.body]
    if isinstance(e, (Box, Diamond)):
        return [e.prog, e.body]
    if isinstance(e, Assign):
        return [e.target, e.rhs]
    if isinstance(e, Test):
        return [e.cond]
    if isinstance(e, ODESystem):
        out = []
        for v, t in e.eqs:
            out += [v, t]
        return out + [e.domain]
    if isinstance(e, Loop):
        return [e.body]
    return []


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    stack = [e]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def size(e: Expr) -> int:
    return sum(1 for _ in walk(e))


# ------------------------------------------------------- well-formedness

@dataclass(frozen=True)
class Violation:
    path: tuple
    message: str

    def __str__(self) -> str:
        where = ".".join(map(str, self.path)) or "root"
        return f"{where}: {self.message}"


class WellFormedError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(map(str, self.violations)))


def _has_differential_content(t: Term) -> bool:
    return any(isinstance(n, Differential) or (isinstance(n, Variable) and n.primed)
               for n in walk(t))


def wellFormed(e: Expr, placeholders: bool = True) -> list:
    """All invariant violations of ``e`` with paths.  Empty means well-formed.

    With ``placeholders=False`` any dot is reported as well, which is the
    setting for formulas that a proof step may establish.
    """
    out: list = []
    arities: dict = {}

    def note_arity(kind, name, arity, path):
        seen = arities.setdefault((kind, name), arity)
        if seen != arity:
            out.append(Violation(path, f"{kind} symbol {name} used with arities {seen} and {arity}"))

    def check_var(v, path):
        if not isinstance(v, Variable) or not IDENT.match(v.name):
            out.append(Violation(path, f"bad variable {v!r}"))

    def go(n, path):
        if isinstance(n, Variable):
            check_var(n, path)
        elif isinstance(n, FuncApp):
            note_arity("function", n.name, len(n.args), path)
        elif isinstance(n, FuncOfAll):
            note_arity("function", n.name, ALL, path)
        elif isinstance(n, PredApp):
            note_arity("predicate", n.name, len(n.args), path)
        elif isinstance(n, PredOfAll):
            note_arity("quantifier", n.name, 0, path)
        elif isinstance(n, Predicational):
            note_arity("quantifier", n.name, 1, path)
        elif isinstance(n, ProgConst):
            note_arity("program", n.name, 0, path)
        elif isinstance(n, (DotTerm, DotFormula)) and not placeholders:
            out.append(Violation(path, "placeholder outside a substitution"))
        elif isinstance(n, Differential):
            if _has_differential_content(n.arg):
                out.append(Violation(path, "differential of a term with a differential symbol "
                                           "or differential (higher differential)"))
        elif isinstance(n, (Forall, Exists)):
            if n.var.primed:
                out.append(Violation(path, "quantified variable must be unprimed"))
        elif isinstance(n, ODESystem):
            if not n.eqs:
                out.append(Violation(path, "empty differential equation system"))
            names = [v for v, _ in n.eqs]
            if len(set(names)) != len(names):
                out.append(Violation(path, "duplicate left-hand side in ODE"))
            bound = {v.prime() for v in names}
            for i, (v, rhs) in enumerate(n.eqs):
                if v.primed:
                    out.append(Violation(path + (2 * i,), "ODE left-hand side must be unprimed"))
                for m in walk(rhs):
                    if isinstance(m, Differential):
                        out.append(Violation(path + (2 * i + 1,), "rhs contains differential"))
                        break
                    if isinstance(m, Variable) and m.primed:
                        out.append(Violation(path + (2 * i + 1,), "rhs contains differential symbol"))
                        break
            for m in walk(n.domain):
                if isinstance(m, Differential):
                    out.append(Violation(path + (2 * len(n.eqs),), "domain contains differential"))
                    break
                if isinstance(m, Variable) and m in bound:
                    out.append(Violation(path + (2 * len(n.eqs),),
                                         "domain contains differential symbol of an ODE variable"))
                    break
        for i, c in enumerate(children(n)):
            go(c, path + (i,))

    go(e, ())
    return out


def check_wellformed(e: Expr, placeholders: bool = True) -> Expr:
    bad = wellFormed(e, placeholders)
    if bad:
        raise WellFormedError(bad)
    return e


# ----------------------------------------------------------- shorthands

def var(name: str) -> Variable:
    primed = name.endswith("'")
    return Variable(name.rstrip("'"), primed)


def num(v) -> Number:
    return Number(Fraction(v))


def neg(t: Term) -> Term:
    """The term -t as the parser builds it."""
    if isinstance(t, Number):
        return Number(-t.value)
    return Times(Number(-1), t)
