"""Uniform substitutions and their clash-checked application.

A substitution maps keys ``(kind, name, arity)`` to replacements:

==========  ======================  =====================================
kind        replaces                replacement
==========  ======================  =====================================
``func``    ``f(t1..tk)``           term over dots ``._0 .. ._(k-1)``
``func``    ``f(x#)`` (arity x#)    term
``pred``    ``p(t1..tk)``           formula over dots
``quant``   ``p(x#)`` (arity 0)     formula
``quant``   ``C{phi}`` (arity 1)    formula over ``_``
``prog``    ``a``                   program
==========  ======================  =====================================

Only ``func``/``pred`` replacements of numeric arity count towards the free
variables of a substitution.  The argument-vector symbols ``f(x#)``,
``p(x#)`` take the whole state as argument, so their replacements add none.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .parser import ParseError, Parser, SourceSpan, printFormula, printProgram, printTerm, pretty
from .statics import (
    ALLVARS, EMPTY, VarSet, boundVars, freeVarsFormula, freeVarsTerm, signature, symbol_keys,
)
from .syntax import (
    ALL, And, Assign, Box, Choice, Cmp, Diamond, Differential, DotFormula, DotTerm,
    Equiv, Exists, Forall, Formula, FuncApp, FuncOfAll, Imply, Loop, Not, Number, ODESystem,
    Or, Plus, PredApp, PredOfAll, Predicational, ProgConst, Program, Seq, Term, Test, Times,
    Truth, Variable, WellFormedError, wellFormed,
)


@dataclass(frozen=True)
class Clash:
    """Why a substitution was refused."""

    symbols: tuple      # offending replaced symbols, printed
    variables: tuple    # free variables of their replacements that got bound
    binder: str         # the binding construct
    path: tuple         # position of that construct in the input

    def __str__(self) -> str:
        where = ".".join(map(str, self.path)) or "root"
        return (f"clash: {', '.join(self.symbols)} would bring "
                f"{{{', '.join(self.variables)}}} into the scope of {self.binder} at {where}")

    def to_json(self) -> dict:
        return {"symbols": list(self.symbols), "variables": list(self.variables),
                "binder": self.binder, "path": list(self.path)}


class ClashError(Exception):
    def __init__(self, clash: Clash):
        self.clash = clash
        super().__init__(str(clash))


def key_text(key) -> str:
    kind, name, arity = key
    if kind in ("func", "pred"):
        if arity == ALL:
            return f"{name}(x#)"
        dots = ",".join("." if i == 0 else f"._{i}" for i in range(arity))
        return f"{name}({dots})"
    if kind == "quant":
        return f"{name}(x#)" if arity == 0 else f"{name}{{_}}"
    if kind == "dot":
        return "." if name == 0 else f"._{name}"
    if kind == "dotf":
        return "_"
    return name


def _identity_replacement(key):
    kind, name, arity = key
    if kind == "func":
        return FuncOfAll(name) if arity == ALL else FuncApp(name, tuple(DotTerm(i) for i in range(arity)))
    if kind == "pred":
        return PredApp(name, tuple(DotTerm(i) for i in range(arity)))
    if kind == "quant":
        return PredOfAll(name) if arity == 0 else Predicational(name, DotFormula())
    if kind == "prog":
        return ProgConst(name)
    if kind == "dot":
        return DotTerm(name)
    return DotFormula()


class USubst:
    """An immutable uniform substitution."""

    __slots__ = ("_map",)

    def __init__(self, pairs=()):
        items = pairs.items() if isinstance(pairs, dict) else pairs
        m = {}
        for key, repl in items:
            kind, name, arity = key
            expected = {"func": Term, "dot": Term, "pred": Formula, "quant": Formula,
                        "dotf": Formula, "prog": Program}[kind]
            if not isinstance(repl, expected):
                raise TypeError(f"replacement for {key_text(key)} must be a {expected.__name__}")
            if key in m:
                raise ValueError(f"two replacements for {key_text(key)}")
            if repl == _identity_replacement(key):
                continue
            m[key] = repl
        self._map = m

    def __contains__(self, key) -> bool:
        return key in self._map

    def get(self, key):
        return self._map.get(key)

    def keys(self):
        return self._map.keys()

    def items(self):
        return sorted(self._map.items(), key=lambda kv: (kv[0][0], str(kv[0][1]), str(kv[0][2])))

    def __len__(self):
        return len(self._map)

    def __eq__(self, o) -> bool:
        return isinstance(o, USubst) and self._map == o._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def restrict(self, keys) -> "USubst":
        return USubst({k: v for k, v in self._map.items() if k in keys})

    def __str__(self) -> str:
        return "{" + " ; ".join(f"{key_text(k)} ~> {pretty(v)}" for k, v in self.items()) + "}"

    __repr__ = __str__


def _repl_fv(key, repl) -> VarSet:
    kind, _, arity = key
    if kind in ("func", "dot") and arity != ALL:
        return freeVarsTerm(repl)
    if kind == "pred":
        return freeVarsFormula(repl)
    return EMPTY


def sigmaFV(sigma: USubst) -> VarSet:
    """Free variables the substitution introduces."""
    out = EMPTY
    for key, repl in sigma.items():
        out = out | _repl_fv(key, repl)
    return out


def _restricted_fv(sigma: USubst, e) -> tuple:
    keys = symbol_keys(e)
    fv, offenders = EMPTY, []
    for key in keys:
        if key in sigma:
            f = _repl_fv(key, sigma.get(key))
            if not f.is_empty:
                offenders.append((key, f))
            fv = fv | f
    return fv, offenders


def admissible(sigma: USubst, U: VarSet, e) -> bool:
    """``FV(sigma restricted to the symbols of e)`` is disjoint from U."""
    fv, _ = _restricted_fv(sigma, e)
    return (fv & U).is_empty


def _require(sigma, U, exprs, binder, path):
    for e in exprs:
        fv, offenders = _restricted_fv(sigma, e)
        hit = fv & U
        if not hit.is_empty:
            syms = tuple(sorted(key_text(k) for k, f in offenders if not (f & U).is_empty))
            if hit.cofinite:
                names = ("all variables",) if not hit.elems else (str(hit),)
            else:
                names = tuple(str(v) for v in hit.sorted())
            raise ClashError(Clash(syms, names, binder, path))


# ----------------------------------------------------------------- application

def _term(s: USubst, t: Term, path) -> Term:
    if isinstance(t, (Variable, Number)):
        return t
    if isinstance(t, DotTerm):
        r = s.get(("dot", t.index, 0))
        return t if r is None else r
    if isinstance(t, FuncOfAll):
        r = s.get(("func", t.name, ALL))
        return t if r is None else r
    if isinstance(t, FuncApp):
        args = tuple(_term(s, a, path + (i,)) for i, a in enumerate(t.args))
        r = s.get(("func", t.name, len(t.args)))
        if r is None:
            return FuncApp(t.name, args)
        inner = USubst({("dot", i, 0): a for i, a in enumerate(args)})
        return _term(inner, r, path)
    if isinstance(t, Plus):
        return Plus(_term(s, t.left, path + (0,)), _term(s, t.right, path + (1,)))
    if isinstance(t, Times):
        return Times(_term(s, t.left, path + (0,)), _term(s, t.right, path + (1,)))
    if isinstance(t, Differential):
        _require(s, ALLVARS, [t.arg], f"({printTerm(t.arg)})'", path)
        return Differential(_term(s, t.arg, path + (0,)))
    raise TypeError(f"not a term: {t!r}")


def _formula(s: USubst, f: Formula, path) -> Formula:
    if isinstance(f, Truth):
        return f
    if isinstance(f, Cmp):
        return Cmp(f.rel, _term(s, f.left, path + (0,)), _term(s, f.right, path + (1,)))
    if isinstance(f, PredApp):
        args = tuple(_term(s, a, path + (i,)) for i, a in enumerate(f.args))
        r = s.get(("pred", f.name, len(f.args)))
        if r is None:
            return PredApp(f.name, args)
        inner = USubst({("dot", i, 0): a for i, a in enumerate(args)})
        return _formula(inner, r, path)
    if isinstance(f, PredOfAll):
        r = s.get(("quant", f.name, 0))
        return f if r is None else r
    if isinstance(f, DotFormula):
        r = s.get(("dotf", "_", 0))
        return f if r is None else r
    if isinstance(f, Predicational):
        _require(s, ALLVARS, [f.arg], f"{f.name}{{...}}", path)
        arg = _formula(s, f.arg, path + (0,))
        r = s.get(("quant", f.name, 1))
        if r is None:
            return Predicational(f.name, arg)
        return _formula(USubst({("dotf", "_", 0): arg}), r, path)
    if isinstance(f, Not):
        return Not(_formula(s, f.arg, path + (0,)))
    if isinstance(f, (And, Or, Imply, Equiv)):
        return type(f)(_formula(s, f.left, path + (0,)), _formula(s, f.right, path + (1,)))
    if isinstance(f, (Forall, Exists)):
        q = "\\forall" if isinstance(f, Forall) else "\\exists"
        _require(s, VarSet.of(f.var), [f.body], f"{q} {f.var}", path)
        return type(f)(f.var, _formula(s, f.body, path + (1,)))
    if isinstance(f, (Box, Diamond)):
        prog = _program(s, f.prog, path + (0,))
        b = f"[{printProgram(prog)}]" if isinstance(f, Box) else f"<{printProgram(prog)}>"
        _require(s, boundVars(prog), [f.body], b, path)
        return type(f)(prog, _formula(s, f.body, path + (1,)))
    raise TypeError(f"not a formula: {f!r}")


def _program(s: USubst, a: Program, path) -> Program:
    if isinstance(a, ProgConst):
        r = s.get(("prog", a.name, 0))
        return a if r is None else r
    if isinstance(a, Assign):
        return Assign(a.target, _term(s, a.rhs, path + (1,)))
    if isinstance(a, Test):
        return Test(_formula(s, a.cond, path + (0,)))
    if isinstance(a, ODESystem):
        U = VarSet.finite(a.vars).primes()
        _require(s, U, [rhs for _, rhs in a.eqs] + [a.domain], printProgram(a), path)
        eqs = tuple((v, _term(s, rhs, path + (2 * i + 1,))) for i, (v, rhs) in enumerate(a.eqs))
        return ODESystem(eqs, _formula(s, a.domain, path + (2 * len(a.eqs),)))
    if isinstance(a, Choice):
        return Choice(_program(s, a.left, path + (0,)), _program(s, a.right, path + (1,)))
    if isinstance(a, Seq):
        left = _program(s, a.left, path + (0,))
        _require(s, boundVars(left), [a.right], printProgram(left), path)
        return Seq(left, _program(s, a.right, path + (1,)))
    if isinstance(a, Loop):
        body = _program(s, a.body, path + (0,))
        _require(s, boundVars(body), [a.body], "{" + printProgram(body) + "}*", path)
        return Loop(body)
    raise TypeError(f"not a program: {a!r}")


def substitute(sigma: USubst, e):
    """Apply ``sigma``; raises :class:`ClashError`."""
    if isinstance(e, Term):
        return _term(sigma, e, ())
    if isinstance(e, Formula):
        return _formula(sigma, e, ())
    if isinstance(e, Program):
        return _program(sigma, e, ())
    raise TypeError(f"cannot substitute into {e!r}")


def _returning_clash(fn):
    def wrapper(sigma, e):
        try:
            return fn(sigma, e, ())
        except ClashError as c:
            return c.clash
    wrapper.__name__ = fn.__name__
    return wrapper


applyTerm = _returning_clash(_term)
applyFormula = _returning_clash(_formula)
applyProgram = _returning_clash(_program)


# --------------------------------------------------------------- text format

def _lhs(p: Parser):
    """Parse a left-hand side; returns (name, shape) with shape one of
    'bare', 'all', ('args', k), 'pred-ctx'."""
    t = p.tok
    if t.kind != "ident":
        p.fail("expected a symbol")
    p.i += 1
    if p.accept("{"):
        p.expect("_")
        p.expect("}")
        return t.text, "context"
    if p.accept("("):
        if p.tok.kind == "ident" and p.tok.text == "x" and p.peek().text == "#":
            p.i += 2
            p.expect(")")
            return t.text, "all"
        k = 0
        if not p.at(")"):
            while True:
                if p.tok.kind != "dot":
                    p.fail("arguments on the left of ~> must be placeholders")
                p.i += 1
                k += 1
                if not p.accept(","):
                    break
        p.expect(")")
        return t.text, ("args", k)
    return t.text, "bare"


def _at_pair_end(p: Parser) -> bool:
    return p.tok.kind == "eof" or p.at(";", "}")


def _try(p: Parser, fn):
    save = p.i
    try:
        r = fn()
        if _at_pair_end(p):
            return r
    except ParseError:
        pass
    p.i = save
    return None


def parseUSubst(text: str, context=None) -> USubst:
    """Parse ``f(.) ~> .+1 ; p(.) ~> .!=x ; a ~> {x'=-1}`` (braces optional).

    Bare names like ``f`` are resolved against the signature of ``context``
    when given, else by what the replacement parses as.
    """
    p = Parser(text, placeholders=True)
    braced = p.accept("{")
    sig = signature(context) if context is not None else None
    pairs = []
    while not (p.tok.kind == "eof" or p.at("}")):
        name, shape = _lhs(p)
        p.expect("~>")
        if shape == "context":
            key, repl = ("quant", name, 1), p.formula()
        elif shape == "all":
            r = _try(p, p.term)
            key, repl = (("func", name, ALL), r) if r is not None else (("quant", name, 0), p.formula())
        elif isinstance(shape, tuple):
            k = shape[1]
            r = _try(p, p.term)
            key, repl = (("func", name, k), r) if r is not None else (("pred", name, k), p.formula())
        else:
            kind = None
            if sig is not None:
                if (name, 0) in sig.programConstants:
                    kind = "prog"
                elif (name, 0) in sig.functions:
                    kind = "func"
                elif (name, 0) in sig.predicates:
                    kind = "pred"
            if kind == "prog":
                key, repl = ("prog", name, 0), p.choice_no_seq()
            elif kind == "func":
                key, repl = ("func", name, 0), p.term()
            elif kind == "pred":
                key, repl = ("pred", name, 0), p.formula()
            else:
                r = _try(p, p.term)
                if r is not None:
                    key, repl = ("func", name, 0), r
                else:
                    r = _try(p, p.formula)
                    if r is not None:
                        key, repl = ("pred", name, 0), r
                    else:
                        key, repl = ("prog", name, 0), p.choice_no_seq()
        bad = wellFormed(repl, placeholders=True)
        if bad:
            raise WellFormedError(bad)
        pairs.append((key, repl))
        if not p.accept(";"):
            break
    if braced:
        p.expect("}")
    p.done()
    return USubst(pairs)
