"""A sound, deliberately incomplete validity checker for real arithmetic.

``checkArith`` answers ``Valid`` only when it has an argument; everything
else is ``Unknown``.  The argument is built from

* stripping universal quantifiers (validity of a universal closure),
* a propositional tableau over the atomic comparisons and uninterpreted
  predicate atoms of the remaining formula, listing the partial
  assignments that would falsify it, and
* for each such assignment, a refutation of its literals by

  - canonical polynomial normal forms (identities, ground arithmetic),
  - eliminating equations ``a = q`` in which ``a`` occurs linearly with a
    constant coefficient (also inside arguments of function symbols), and
  - sign reasoning: a polynomial whose coefficients are positive and whose
    odd-power atoms are known nonnegative is itself nonnegative.

Non-arithmetic subterms (function symbols, differentials) are opaque atoms.
Modalities and existential quantifiers are never looked into.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .poly import Poly, atom_key, to_poly
from .statics import freeVarsFormula
from .syntax import (
    And, Cmp, Differential, Equiv, Forall, FuncApp, Imply, Not, Or, Plus, PredApp, PredOfAll,
    Term, Times, Truth, Variable,
)

MAX_ROWS = 4096


@dataclass(frozen=True)
class ArithResult:
    valid: bool
    reason: str

    def __bool__(self):
        return self.valid

    def __str__(self):
        return ("Valid" if self.valid else "Unknown") + f" ({self.reason})"


class _OutOfFragment(Exception):
    pass


# ------------------------------------------------------------ normal forms

def canonical_term(t: Term) -> Term:
    return canonical_poly(t).to_term()


def canonical_poly(t: Term) -> Poly:
    return to_poly(t, lambda n: Poly.atom(_canonical_atom(n)))


def _canonical_atom(n: Term) -> Term:
    if isinstance(n, FuncApp):
        return FuncApp(n.name, tuple(canonical_term(a) for a in n.args))
    if isinstance(n, Differential):
        return Differential(canonical_term(n.arg))
    return n


def _normalize(p: Poly, monic: bool) -> Poly:
    if p.is_zero:
        return p
    lead = p.sorted_terms()[0][1]
    return p.scale(1 / (lead if monic else abs(lead)))


@dataclass(frozen=True)
class Atom:
    """``kind`` is 'ge' (P>=0), 'gt' (P>0), 'eq' (P=0) or 'prop' (opaque formula)."""
    kind: str
    poly: object


@lru_cache(maxsize=4096)
def _atom_of(f) -> tuple:
    """Returns (Atom, polarity)."""
    if isinstance(f, Cmp):
        d = canonical_poly(f.left) - canonical_poly(f.right)
        if f.rel == ">=":
            return Atom("ge", _normalize(d, False)), True
        if f.rel == ">":
            return Atom("gt", _normalize(d, False)), True
        if f.rel == "<=":
            return Atom("ge", _normalize(-d, False)), True
        if f.rel == "<":
            return Atom("gt", _normalize(-d, False)), True
        if f.rel == "=":
            return Atom("eq", _normalize(d, True)), True
        return Atom("eq", _normalize(d, True)), False
    return Atom("prop", f), True


def _rows(f, value: bool) -> list:
    """Partial assignments of atoms under which ``f`` evaluates to ``value``.
    Every total assignment doing so extends one of them."""
    if isinstance(f, Truth):
        return [{}] if f.value == value else []
    if isinstance(f, (Cmp, PredApp, PredOfAll)):
        a, pol = _atom_of(f)
        return [{a: pol == value}]
    if isinstance(f, Not):
        return _rows(f.arg, not value)
    if isinstance(f, And):
        if value:
            return _combine(_rows(f.left, True), _rows(f.right, True))
        return _rows(f.left, False) + _rows(f.right, False)
    if isinstance(f, Or):
        if value:
            return _rows(f.left, True) + _rows(f.right, True)
        return _combine(_rows(f.left, False), _rows(f.right, False))
    if isinstance(f, Imply):
        if value:
            return _rows(f.left, False) + _rows(f.right, True)
        return _combine(_rows(f.left, True), _rows(f.right, False))
    if isinstance(f, Equiv):
        same = _combine(_rows(f.left, True), _rows(f.right, value))
        return same + _combine(_rows(f.left, False), _rows(f.right, not value))
    raise _OutOfFragment(type(f).__name__)


def _combine(xs: list, ys: list) -> list:
    out = []
    for x in xs:
        for y in ys:
            if all(x[k] == v for k, v in y.items() if k in x):
                out.append({**x, **y})
                if len(out) > MAX_ROWS:
                    raise _OutOfFragment("too many cases")
    return out


# -------------------------------------------------------------- refutation
# constraints are (op, P) with op in '>=', '>', '=', '!='

def _literals(row: dict) -> list:
    out = []
    for a, val in row.items():
        if a.kind == "prop":
            continue
        p = a.poly
        if a.kind == "ge":
            out.append((">=", p) if val else (">", -p))
        elif a.kind == "gt":
            out.append((">", p) if val else (">=", -p))
        else:
            out.append(("=", p) if val else ("!=", p))
    return out


def _subst_atom_in_term(t: Term, a, q: Term) -> Term:
    """Replace atom ``a`` by ``q`` in function arguments (value congruence).
    Differentials are left alone: equal values do not give equal derivatives."""
    if t == a:
        return q
    if isinstance(t, FuncApp):
        return FuncApp(t.name, tuple(canonical_term(_subst_atom_in_term(x, a, q)) for x in t.args))
    if isinstance(t, Plus):
        return Plus(_subst_atom_in_term(t.left, a, q), _subst_atom_in_term(t.right, a, q))
    if isinstance(t, Times):
        return Times(_subst_atom_in_term(t.left, a, q), _subst_atom_in_term(t.right, a, q))
    return t


def _substitute(p: Poly, a, q: Poly) -> Poly:
    p = p.substitute(a, q)
    qt = q.to_term()
    for b in list(p.atoms()):
        if isinstance(b, FuncApp):
            nb = _subst_atom_in_term(b, a, qt)
            if nb != b:
                p = p.substitute(b, canonical_poly(nb))
    return p


def _eliminable(p: Poly, prefer_opaque: bool):
    cands = []
    for a in p.atoms():
        if p.degree_in(a) != 1:
            continue
        c = p.coeff_of(a)
        if not c.is_const or c.is_zero:
            continue
        rest = p - Poly.atom(a).scale(c.constant)
        if a in rest.atoms():
            continue
        opaque = not isinstance(a, Variable)
        rank = (opaque != prefer_opaque, getattr(a, "primed", False), atom_key(a))
        cands.append((rank, a, -rest.scale(1 / c.constant)))
    if not cands:
        return None
    cands.sort(key=lambda c: c[0])
    return cands[0][1], cands[0][2]


def _sign_atoms(cons) -> tuple:
    """Atoms known nonnegative and atoms known positive from facts
    ``c*a + d (op) 0`` about a single atom."""
    nonneg, pos = set(), set()
    for op, p in cons:
        if op not in (">=", ">", "="):
            continue
        lin = [m for m in p.terms if m != ()]
        if len(lin) != 1:
            continue
        m = lin[0]
        if len(m) != 1 or m[0][1] != 1:
            continue
        a, c, d = m[0][0], p.terms[m], p.constant
        if op == "=":
            # c*a + d = 0 pins a to -d/c
            bound = -d / c
            if bound >= 0:
                nonneg.add(a)
            if bound > 0:
                pos.add(a)
            continue
        if c <= 0 or d > 0:
            continue
        # a >= -d/c or a > -d/c, with -d/c >= 0
        nonneg.add(a)
        if op == ">" or d < 0:
            pos.add(a)
    return nonneg, pos


def _evidently_nonneg(p: Poly, nonneg: set) -> bool:
    for m, c in p.terms.items():
        if c < 0:
            return False
        for a, e in m:
            if e % 2 and a not in nonneg:
                return False
    return True


def _evidently_pos(p: Poly, signs: tuple) -> bool:
    nonneg, pos = signs
    if not _evidently_nonneg(p, nonneg):
        return False
    return any(c > 0 and all(a in pos for a, _ in m) for m, c in p.terms.items())


def _contradictory(cons) -> bool:
    eqs, neqs = set(), set()
    for op, p in cons:
        if p.is_const:
            v = p.constant
            ok = {">=": v >= 0, ">": v > 0, "=": v == 0, "!=": v != 0}[op]
            if not ok:
                return True
        if op == "=":
            eqs.add(_normalize(p, True))
        elif op == "!=":
            neqs.add(_normalize(p, True))
    if eqs & neqs:
        return True
    ge = {_normalize(p, False) for op, p in cons if op == ">="}
    gt = {_normalize(p, False) for op, p in cons if op == ">"}
    for p in gt:
        if -p in ge or -p in gt or _normalize(p, True) in eqs:
            return True
    signs = _sign_atoms(cons)
    for op, p in cons:
        if op == ">=" and _evidently_pos(-p, signs):
            return True
        if op == ">" and _evidently_nonneg(-p, signs[0]):
            return True
        if op == "=" and (_evidently_pos(p, signs) or _evidently_pos(-p, signs)):
            return True
    return False


def _refute(cons, prefer_opaque: bool) -> bool:
    cons = list(cons)
    if _contradictory(cons):
        return True
    while True:
        pick = None
        for i, (op, p) in enumerate(cons):
            if op == "=":
                e = _eliminable(p, prefer_opaque)
                if e is not None:
                    pick = (i, e)
                    break
        if pick is None:
            return False
        i, (a, q) = pick
        cons = [(op, _substitute(p, a, q)) for j, (op, p) in enumerate(cons) if j != i]
        if _contradictory(cons):
            return True


def _row_refuted(row: dict) -> bool:
    lits = _literals(row)
    return _refute(lits, False) or _refute(lits, True)


# ---------------------------------------------------------------- entry

def _goals(f) -> list:
    """Split validity of ``f`` into validity of quantifier-free parts."""
    if isinstance(f, Forall):
        return _goals(f.body)
    if isinstance(f, And):
        return _goals(f.left) + _goals(f.right)
    if isinstance(f, Imply):
        r = f.right
        if isinstance(r, Forall) and r.var not in freeVarsFormula(f.left):
            return _goals(Imply(f.left, r.body))
        if isinstance(r, And):
            return _goals(Imply(f.left, r.left)) + _goals(Imply(f.left, r.right))
        if isinstance(r, Imply):
            return _goals(Imply(And(f.left, r.left), r.right))
    return [f]


def _valid_qf(f) -> ArithResult:
    try:
        rows = _rows(f, False)
    except _OutOfFragment as e:
        return ArithResult(False, f"outside the decided fragment ({e})")
    for row in rows:
        if not _row_refuted(row):
            return ArithResult(False, "no refutation for a falsifying case")
    return ArithResult(True, "decided")


def checkArith(f) -> ArithResult:
    for g in _goals(f):
        r = _valid_qf(g)
        if not r.valid:
            return r
    return ArithResult(True, "decided")
