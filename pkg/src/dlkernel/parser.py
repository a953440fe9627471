"""Concrete syntax: a recursive-descent parser and a minimal-parenthesis printer.

The printer emits ASCII only.  The parser also accepts the usual Unicode
spellings (``∀ ∃ ∪ ′ ¬ ∧ ∨ → ↔ ≥ ≤ ≠ ·``).  Binding strength, tightest
first: ``'``, ``^``, unary ``-``, ``*``, ``+ -``, comparisons, ``!``, ``&``,
``|``, ``->``, ``<->``.  The last two associate to the right; so do the
program operators ``;`` and ``++``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .syntax import (
    ALL, And, Assign, Box, Choice, Cmp, Diamond, Differential, DotFormula, DotTerm,
    Equiv, Exists, Forall, Formula, FuncApp, FuncOfAll, Imply, Loop, Not, Number,
    ODESystem, Or, Plus, PredApp, PredOfAll, Predicational, ProgConst, Program, Seq,
    Term, Test, Times, Truth, Variable, WellFormedError, neg, wellFormed,
)

KEYWORDS = {"true", "false"}

_UNICODE = {
    "∀": "\\forall ", "∃": "\\exists ", "∪": "++", "′": "'", "¬": "!", "∧": "&",
    "∨": "|", "→": "->", "↔": "<->", "≥": ">=", "≤": "<=", "≠": "!=", "·": "*",
    "−": "-", "⎵": "_",
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<kw>\\forall|\\exists)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<dot>\.(?:_\d+)?)
  | (?P<op><->|->|<=|>=|!=|:=|\+\+|~>|[-+*^'()\[\]{}<>=!&|,;?_\#:])
""", re.VERBOSE)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, span: SourceSpan, message: str, text: str = ""):
        self.span = span
        self.message = message
        super().__init__(f"{message} at {span.start}..{span.end}"
                         + (f" near {text[span.start:span.start + 20]!r}" if text else ""))


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    start: int
    end: int


def normalize_unicode(text: str) -> str:
    return "".join(_UNICODE.get(c, c) for c in text)


def tokenize(text: str) -> list:
    text = normalize_unicode(text)
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(SourceSpan(pos, pos + 1), f"unexpected character {text[pos]!r}", text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Tok(kind, m.group(), m.start(), m.end()))
        pos = m.end()
    toks.append(Tok("eof", "", len(text), len(text)))
    return toks


def _number(text: str) -> Fraction:
    if "/" in text:
        n, d = text.split("/")
        return Fraction(n) / Fraction(d)
    return Fraction(text)


class Parser:
    """Token-stream parser.  ``placeholders`` admits ``.`` and ``_``."""

    def __init__(self, text: str, placeholders: bool = False):
        self.text = normalize_unicode(text)
        self.toks = tokenize(self.text)
        self.i = 0
        self.placeholders = placeholders
        # inside <...> at bracket depth 0, '>' closes the diamond
        self.gt_closes = False

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text in texts

    def accept(self, *texts) -> bool:
        if self.at(*texts):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def at_rel(self) -> bool:
        return self.at(*RELS) and not (self.gt_closes and self.at(">"))

    def nested(self, closes: bool, parse):
        save, self.gt_closes = self.gt_closes, closes
        try:
            return parse()
        finally:
            self.gt_closes = save

    def fail(self, msg: str):
        t = self.tok
        raise ParseError(SourceSpan(t.start, t.end), msg, self.text)

    def done(self):
        if self.tok.kind != "eof":
            self.fail("trailing input")

    # -- terms
    def term(self) -> Term:
        t = self.product()
        while True:
            if self.accept("+"):
                t = Plus(t, self.product())
            elif self.accept("-"):
                t = Plus(t, neg(self.product()))
            else:
                return t

    def product(self) -> Term:
        t = self.unary()
        while self.accept("*"):
            t = Times(t, self.unary())
        return t

    def unary(self) -> Term:
        if self.accept("-"):
            return neg(self.unary())
        return self.power()

    def power(self) -> Term:
        base = self.primary()
        if self.accept("^"):
            if self.tok.kind != "num" or not self.tok.text.isdigit() or int(self.tok.text) < 1:
                self.fail("exponent must be a positive integer")
            n = int(self.tok.text)
            self.i += 1
            t = base
            for _ in range(n - 1):
                t = Times(t, base)
            return t
        return base

    def primary(self) -> Term:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Number(_number(t.text))
        if t.kind == "dot":
            if not self.placeholders:
                self.fail("placeholder '.' outside a substitution")
            self.i += 1
            return DotTerm(int(t.text[2:]) if len(t.text) > 1 else 0)
        if t.kind == "ident":
            if t.text in KEYWORDS:
                self.fail(f"keyword {t.text!r} is not a term")
            self.i += 1
            if self.at("("):
                self.i += 1
                if self.tok.kind == "ident" and self.peek().text == "#" and self.peek(2).text == ")":
                    if self.tok.text != "x":
                        self.fail("only x# denotes the vector of all variables")
                    self.i += 3
                    return FuncOfAll(t.text)
                args = []
                if not self.at(")"):
                    args.append(self.nested(False, self.term))
                    while self.accept(","):
                        args.append(self.nested(False, self.term))
                self.expect(")")
                return FuncApp(t.text, tuple(args))
            if self.at("'") and self.tok.start == t.end:
                self.i += 1
                return Variable(t.text, True)
            return Variable(t.text)
        if self.accept("("):
            inner = self.nested(False, self.term)
            self.expect(")")
            if self.accept("'"):
                return Differential(inner)
            return inner
        self.fail("expected a term")

    # -- formulas
    def formula(self) -> Formula:
        left = self.implication()
        if self.accept("<->"):
            return Equiv(left, self.formula())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Imply(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.accept("|"):
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary_formula()
        while self.accept("&"):
            f = And(f, self.unary_formula())
        return f

    def unary_formula(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary_formula())
        if self.at("\\forall", "\\exists"):
            q = Forall if self.tok.text == "\\forall" else Exists
            self.i += 1
            return self.quantifier(q)
        if self.accept("["):
            prog = self.nested(False, self.program)
            self.expect("]")
            return Box(prog, self.unary_formula())
        if self.accept("<"):
            prog = self.nested(True, self.program)
            self.expect(">")
            return Diamond(prog, self.unary_formula())
        return self.atom()

    def quantifier(self, q) -> Formula:
        # plain: \forall x body ; guarded: \forall t>=0 body ; bounded: \forall 0<=s<=t body
        nxt = self.peek()
        if self.tok.kind == "ident" and nxt.text in RELS and not (self.gt_closes and nxt.text == ">"):
            # \forall x <a>p() is plain; fall back when the guard reading fails
            save = self.i
            try:
                return self._guarded(q)
            except ParseError:
                self.i = save
        if self.tok.kind == "ident":
            x = self.variable()
            if x.primed:
                self.fail("quantified variable must be unprimed")
            return q(x, self.unary_formula())
        return self._guarded(q)

    def _guarded(self, q) -> Formula:
        if self.tok.kind == "ident":
            x = self.variable()
            rel = self.relation()
            bound = self.term()
            guard = Cmp(rel, x, bound)
        else:
            lo = self.term()
            rel1 = self.relation()
            x = self.variable()
            rel2 = self.relation()
            hi = self.term()
            guard = And(Cmp(rel1, lo, x), Cmp(rel2, x, hi))
        body = self.unary_formula()
        if q is Forall:
            return Forall(x, Imply(guard, body))
        return Exists(x, And(guard, body))

    def variable(self) -> Variable:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail("expected a variable")
        self.i += 1
        if self.at("'") and self.tok.start == t.end:
            self.i += 1
            return Variable(t.text, True)
        return Variable(t.text)

    def relation(self) -> str:
        if self.at(*RELS):
            r = self.tok.text
            self.i += 1
            return r
        self.fail("expected a comparison")

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "ident" and t.text in KEYWORDS:
            self.i += 1
            return Truth(t.text == "true")
        if self.at("_"):
            if not self.placeholders:
                self.fail("placeholder '_' outside a substitution")
            self.i += 1
            return DotFormula()
        if t.kind == "ident" and self.peek().text == "{":
            self.i += 2
            inner = self.nested(False, self.formula)
            self.expect("}")
            return Predicational(t.text, inner)
        if self.at("("):
            save = self.i
            try:
                return self.comparison_or_predicate()
            except ParseError:
                self.i = save
            self.i += 1
            inner = self.nested(False, self.formula)
            self.expect(")")
            return inner
        return self.comparison_or_predicate()

    def comparison_or_predicate(self) -> Formula:
        left = self.term()
        if self.at_rel():
            rel = self.relation()
            return Cmp(rel, left, self.term())
        if isinstance(left, FuncApp):
            return PredApp(left.name, left.args)
        if isinstance(left, FuncOfAll):
            return PredOfAll(left.name)
        self.fail("expected a comparison")

    # -- programs
    def program(self) -> Program:
        left = self.sequence()
        if self.accept("++"):
            return Choice(left, self.program())
        return left

    def sequence(self) -> Program:
        left = self.loop()
        if self.accept(";"):
            if self.at("]", ">", "}", "eof") or self.tok.kind == "eof":
                return left
            return Seq(left, self.sequence())
        return left

    def choice_no_seq(self) -> Program:
        left = self.loop()
        if self.accept("++"):
            return Choice(left, self.choice_no_seq())
        return left

    def loop(self) -> Program:
        if self.at("{"):
            if self.peek().kind == "ident" and self.peek(2).text == "'" and self.peek(3).text == "=":
                return self.nested(False, self.ode)
            self.i += 1
            inner = self.nested(False, self.program)
            self.expect("}")
            if self.accept("*"):
                return Loop(inner)
            return inner
        return self.atomic_program()

    def ode(self) -> Program:
        self.expect("{")
        eqs = []
        while True:
            v = self.variable()
            if not v.primed:
                self.fail("ODE left-hand side must be a differential symbol")
            self.expect("=")
            eqs.append((v.base(), self.term()))
            if not self.accept(","):
                break
        domain = Truth(True)
        if self.accept("&"):
            domain = self.formula()
        self.expect("}")
        return ODESystem(tuple(eqs), domain)

    def atomic_program(self) -> Program:
        if self.accept("?"):
            return Test(self.formula())
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail("expected a program")
        if self.peek().text == ":=" or (self.peek().text == "'" and self.peek(2).text == ":="):
            x = self.variable()
            self.expect(":=")
            return Assign(x, self.term())
        self.i += 1
        return ProgConst(t.text)


RELS = (">=", ">", "=", "<=", "<", "!=")


def _finish(p: Parser, result, placeholders: bool):
    p.done()
    bad = wellFormed(result, placeholders=placeholders)
    if bad:
        raise WellFormedError(bad)
    return result


def parseTerm(text: str, placeholders: bool = False) -> Term:
    p = Parser(text, placeholders)
    return _finish(p, p.term(), placeholders)


def parseFormula(text: str, placeholders: bool = False) -> Formula:
    p = Parser(text, placeholders)
    return _finish(p, p.formula(), placeholders)


def parseProgram(text: str, placeholders: bool = False) -> Program:
    p = Parser(text, placeholders)
    return _finish(p, p.program(), placeholders)


# ------------------------------------------------------------- printing
# term levels: 1 sum, 2 product, 3 unary, 4 atom
# formula levels: 1 equiv, 2 imply, 3 or, 4 and, 5 unary
# program levels: 1 choice, 2 seq, 3 loop/atom

def _num(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _is_negation(t: Term) -> bool:
    return (isinstance(t, Times) and t.left == Number(Fraction(-1))
            and not isinstance(t.right, Number))


def printTerm(t: Term, level: int = 1) -> str:
    if isinstance(t, Variable):
        return t.name + ("'" if t.primed else "")
    if isinstance(t, Number):
        s = _num(t.value)
        return s
    if isinstance(t, FuncApp):
        return f"{t.name}({','.join(printTerm(a) for a in t.args)})"
    if isinstance(t, FuncOfAll):
        return f"{t.name}({ALL})"
    if isinstance(t, DotTerm):
        return "." if t.index == 0 else f"._{t.index}"
    if isinstance(t, Differential):
        return f"({printTerm(t.arg)})'"
    if isinstance(t, Plus):
        left = printTerm(t.left, 1)
        r = t.right
        if isinstance(r, Number) and r.value < 0:
            s = f"{left}-{_num(-r.value)}"
        elif _is_negation(r):
            s = f"{left}-{printTerm(r.right, 2)}"
        else:
            s = f"{left}+{printTerm(r, 2)}"
        return s if level <= 1 else f"({s})"
    if isinstance(t, Times):
        if _is_negation(t):
            s = "-" + printTerm(t.right, 3)
            return s if level <= 3 else f"({s})"
        s = f"{printTerm(t.left, 2)}*{printTerm(t.right, 3)}"
        return s if level <= 2 else f"({s})"
    raise TypeError(f"not a term: {t!r}")


def printFormula(f: Formula, level: int = 1) -> str:
    def wrap(s, own):
        return s if level <= own else f"({s})"

    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Cmp):
        return wrap(f"{printTerm(f.left)}{f.rel}{printTerm(f.right)}", 5)
    if isinstance(f, PredApp):
        return f"{f.name}({','.join(printTerm(a) for a in f.args)})"
    if isinstance(f, PredOfAll):
        return f"{f.name}({ALL})"
    if isinstance(f, Predicational):
        return f"{f.name}{{{printFormula(f.arg)}}}"
    if isinstance(f, DotFormula):
        return "_"
    if isinstance(f, Not):
        return "!" + printFormula(f.arg, 5)
    if isinstance(f, And):
        return wrap(f"{printFormula(f.left, 4)} & {printFormula(f.right, 5)}", 4)
    if isinstance(f, Or):
        return wrap(f"{printFormula(f.left, 3)} | {printFormula(f.right, 4)}", 3)
    if isinstance(f, Imply):
        return wrap(f"{printFormula(f.left, 3)} -> {printFormula(f.right, 2)}", 2)
    if isinstance(f, Equiv):
        return wrap(f"{printFormula(f.left, 2)} <-> {printFormula(f.right, 1)}", 1)
    if isinstance(f, (Forall, Exists)):
        q = "\\forall" if isinstance(f, Forall) else "\\exists"
        return f"{q} {printTerm(f.var)} {printFormula(f.body, 5)}"
    if isinstance(f, Box):
        return f"[{printProgram(f.prog)}]{printFormula(f.body, 5)}"
    if isinstance(f, Diamond):
        return f"<{printProgram(f.prog)}>{printFormula(f.body, 5)}"
    raise TypeError(f"not a formula: {f!r}")


def printProgram(a: Program, level: int = 1) -> str:
    def wrap(s, own):
        return s if level <= own else "{" + s + "}"

    if isinstance(a, ProgConst):
        return a.name
    if isinstance(a, Assign):
        return f"{printTerm(a.target)}:={printTerm(a.rhs)}"
    if isinstance(a, Test):
        c = printFormula(a.cond, 5)
        # a bare '>' would close an enclosing diamond
        if ">" in c and not c.startswith("("):
            c = f"({c})"
        return "?" + c
    if isinstance(a, ODESystem):
        eqs = ", ".join(f"{printTerm(v)}'={printTerm(t)}" for v, t in a.eqs)
        if a.domain == Truth(True):
            return "{" + eqs + "}"
        return "{" + eqs + " & " + printFormula(a.domain) + "}"
    if isinstance(a, Choice):
        return wrap(f"{printProgram(a.left, 2)} ++ {printProgram(a.right, 1)}", 1)
    if isinstance(a, Seq):
        return wrap(f"{printProgram(a.left, 3)}; {printProgram(a.right, 2)}", 2)
    if isinstance(a, Loop):
        return "{" + printProgram(a.body) + "}*"
    raise TypeError(f"not a program: {a!r}")


def pretty(e) -> str:
    if isinstance(e, Term):
        return printTerm(e)
    if isinstance(e, Formula):
        return printFormula(e)
    if isinstance(e, Program):
        return printProgram(e)
    raise TypeError(f"cannot print {e!r}")


def parse_any(text: str, placeholders: bool = False):
    """Parse as formula, else term, else program."""
    errors = []
    for fn in (parseFormula, parseTerm, parseProgram):
        try:
            return fn(text, placeholders)
        except WellFormedError:
            raise
        except ParseError as e:
            errors.append(e)
    raise max(errors, key=lambda e: e.span.start)
