"""The axiom base: each axiom is a single concrete formula, each rule a
finite list of premises and a conclusion.  All of them are instantiated by
uniform substitution only.

ODE axioms come in dimension 1 (``DW``) and generated liftings to
dimension n (``DW_2``, ``DW_3``, ...) over variables ``x1..xn``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from .parser import parseFormula, printFormula
from .syntax import Formula

DEFAULT_DIMENSION_BOUND = 4


class UnknownAxiom(KeyError):
    pass


@dataclass(frozen=True)
class Rule:
    name: str
    premises: Tuple[Formula, ...]
    conclusion: Formula

    def __str__(self):
        prem = ", ".join(printFormula(p) for p in self.premises)
        return f"{prem} |- {printFormula(self.conclusion)}"


_BASE = [
    ("<.>", "<a>p(x#) <-> !([a]!p(x#))"),
    ("[:=]", "[x:=f()]p(x) <-> p(f())"),
    ("[':=]", "[x':=f()]p(x') <-> p(f())"),
    ("[:=]=", "[x:=f()]p(x#) <-> \\forall x (x=f() -> p(x#))"),
    ("[?]", "[?q()]p() <-> (q() -> p())"),
    ("[++]", "[a++b]p(x#) <-> [a]p(x#) & [b]p(x#)"),
    ("[;]", "[a;b]p(x#) <-> [a][b]p(x#)"),
    ("[*]", "[{a}*]p(x#) <-> p(x#) & [a][{a}*]p(x#)"),
    ("K", "[a](p(x#) -> q(x#)) -> ([a]p(x#) -> [a]q(x#))"),
    ("I", "[{a}*](p(x#) -> [a]p(x#)) -> (p(x#) -> [{a}*]p(x#))"),
    ("V", "p() -> [a]p()"),
    ("Ai", "(\\forall x p(x)) -> p(f())"),
    ("A->", "\\forall x (p(x#) -> q(x#)) -> (\\forall x p(x#) -> \\forall x q(x#))"),
    ("VA", "p() -> \\forall x p()"),
    ("E", "\\exists x p(x#) <-> !\\forall x !p(x#)"),
]

_DIFF = [
    ("c'", "(f())'=0"),
    ("x'", "(x)'=x'"),
    ("+'", "(f(x#)+g(x#))'=(f(x#))'+(g(x#))'"),
    ("*'", "(f(x#)*g(x#))'=(f(x#))'*g(x#)+f(x#)*(g(x#))'"),
    ("o'", "[y:=g(x)][y':=1]((f(g(x)))'=(f(y))'*(g(x))')"),
]

# relation of the invariant -> relation required of its differentials
DI_RELATIONS = [(">=", ">="), (">", ">="), ("=", "="), ("!=", "="), ("<=", "<="), ("<", "<=")]

_RULES = [
    ("G", ["p(x#)"], "[a]p(x#)"),
    ("Agen", ["p(x#)"], "\\forall x p(x#)"),
    ("MP", ["p(x#) -> q(x#)", "p(x#)"], "q(x#)"),
    ("CQ", ["f(x#) = g(x#)"], "p(f(x#)) <-> p(g(x#))"),
    ("CE", ["p(x#) <-> q(x#)"], "C{p(x#)} <-> C{q(x#)}"),
]

ALIASES = {
    "[∪]": "[++]", "[u]": "[++]", "<>": "<.>", "[']": "DE", "DI": "DI>=",
    "∀i": "Ai", "∀→": "A->", "V∀": "VA", "∀gen": "Agen", "·'": "*'", "∘'": "o'",
    "x'": "x'", "c'": "c'",
}


def _ode_texts(n: int) -> list:
    """Axiom texts for ODE systems of dimension ``n``."""
    if n == 1:
        xs = ["x"]
    else:
        xs = [f"x{i}" for i in range(1, n + 1)]
    X = ",".join(xs)
    Xp = ",".join(v + "'" for v in xs)
    fs = [f"f({X})"] if n == 1 else [f"f{i}({X})" for i in range(1, n + 1)]
    ode = ", ".join(f"{v}'={f}" for v, f in zip(xs, fs))

    def sys(dom):
        return "{" + ode + " & " + dom + "}"

    q, p, r = f"q({X})", f"p({X})", f"r({X})"
    out = [
        ("DW", f"[{sys(q)}]{q}"),
        ("DC", f"[{sys(q)}]{r} -> ([{sys(q)}]{p} <-> [{sys(q + ' & ' + r)}]{p})"),
    ]
    assigns = "".join(f"[{v}':={f}]" for v, f in zip(xs, fs))
    pp = f"p({X},{Xp})"
    out.append(("DE", f"[{sys(q)}]{pp} <-> [{sys(q)}]{assigns}{pp}"))
    g, h = f"g({X})", f"h({X})"
    for rel, drel in DI_RELATIONS:
        out.append((
            f"DI{rel}",
            f"({q} -> [{sys(q)}]({g})'{drel}({h})') -> "
            f"([{sys(q)}]{g}{rel}{h} <-> [?{q}]{g}{rel}{h})",
        ))
    ghost = "{" + ode + f", y'=a({X})*y+b({X}) & {q}" + "}"
    out.append(("DG", f"[{sys(q)}]{p} <-> \\exists y [{ghost}]{p}"))
    cs = ["f()"] if n == 1 else [f"f{i}()" for i in range(1, n + 1)]
    const_ode = "{" + ", ".join(f"{v}'={c}" for v, c in zip(xs, cs)) + f" & {q}" + "}"
    moved = ",".join(f"{v}+{c}*s" for v, c in zip(xs, cs))
    sol = "".join(f"[{v}:={v}+{c}*t]" for v, c in zip(xs, cs))
    out.append((
        "DS",
        f"[{const_ode}]{p} <-> \\forall t (t>=0 -> "
        f"((\\forall s (0<=s & s<=t -> q({moved}))) -> {sol}{p}))",
    ))
    if n == 1:
        return out
    return [(f"{name}_{n}", text) for name, text in out]


class AxiomBase:
    def __init__(self, dimension_bound: int = DEFAULT_DIMENSION_BOUND):
        if dimension_bound < 1:
            raise ValueError("dimension bound must be at least 1")
        self.dimension_bound = dimension_bound
        self.axioms: Dict[str, Formula] = {}
        self.groups: Dict[str, list] = {"base": [], "ode": [], "rules": []}
        for name, text in _BASE + _DIFF:
            self._add("base", name, text)
        for n in range(1, dimension_bound + 1):
            for name, text in _ode_texts(n):
                self._add("ode", name, text)
        self.rules: Dict[str, Rule] = {}
        for name, prem, concl in _RULES:
            self.rules[name] = Rule(name, tuple(_parse(p) for p in prem), _parse(concl))
            self.groups["rules"].append(name)

    def _add(self, group, name, text):
        self.axioms[name] = _parse(text)
        self.groups[group].append(name)

    def canonical(self, name: str) -> str:
        return ALIASES.get(name, name)

    def lookup(self, name: str) -> Formula:
        try:
            return self.axioms[self.canonical(name)]
        except KeyError:
            raise UnknownAxiom(name) from None

    def rule(self, name: str) -> Rule:
        try:
            return self.rules[self.canonical(name)]
        except KeyError:
            raise UnknownAxiom(name) from None

    def listing(self, group: str) -> str:
        """Golden text of one group, one entry per line."""
        lines = []
        for name in self.groups[group]:
            if group == "rules":
                lines.append(f"{name}: {self.rules[name]}")
            else:
                lines.append(f"{name}: {printFormula(self.axioms[name])}")
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def _parse(text: str) -> Formula:
    return parseFormula(text)


@lru_cache(maxsize=8)
def axiom_base(dimension_bound: int = DEFAULT_DIMENSION_BOUND) -> AxiomBase:
    return AxiomBase(dimension_bound)


@dataclass(frozen=True)
class AxiomEntry:
    name: str
    formula: Formula
    provenance: str


@dataclass(frozen=True)
class RuleEntry:
    name: str
    premises: Tuple[Formula, ...]
    conclusion: Formula
    locallySound: bool = True


def axiomBase(dimension_bound: int = DEFAULT_DIMENSION_BOUND) -> List[AxiomEntry]:
    """Every stored axiom, in listing order."""
    base = axiom_base(dimension_bound)
    return [AxiomEntry(n, base.axioms[n], group)
            for group in ("base", "ode") for n in base.groups[group]]


def ruleBase(dimension_bound: int = DEFAULT_DIMENSION_BOUND) -> List[RuleEntry]:
    base = axiom_base(dimension_bound)
    return [RuleEntry(r.name, r.premises, r.conclusion) for r in base.rules.values()]


def lookup(name: str, dimension_bound: int = DEFAULT_DIMENSION_BOUND) -> Formula:
    return axiom_base(dimension_bound).lookup(name)
