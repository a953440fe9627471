"""Hypothesis generators for terms, formulas, programs and states."""

from fractions import Fraction

from hypothesis import strategies as st

from dlkernel.syntax import (
    And, Assign, Box, Choice, Cmp, Diamond, Differential, DotTerm, Equiv, Exists, Forall,
    FuncApp, Imply, Loop, Not, Number, ODESystem, Or, Plus, PredApp, ProgConst, Seq, Test,
    Times, Truth, Variable, RELATIONS,
)

VARS = [Variable(n) for n in ("x", "y", "z", "v")]

small_rationals = st.builds(
    Fraction, st.integers(-6, 6), st.sampled_from([1, 1, 1, 2, 3]),
)
numbers = st.builds(Number, st.builds(Fraction, st.integers(0, 9), st.sampled_from([1, 2, 4])))
variables = st.sampled_from(VARS)


def _bin(children, *ctors):
    return st.one_of(*(st.builds(c, children, children) for c in ctors))


def poly_terms(max_leaves=12, vars_=VARS):
    """Polynomial terms: numbers, variables, + and *."""
    leaf = st.one_of(numbers, st.sampled_from(vars_))
    return st.recursive(leaf, lambda ch: _bin(ch, Plus, Times), max_leaves=max_leaves)


def depth(t):
    if isinstance(t, (Plus, Times)):
        return 1 + max(depth(t.left), depth(t.right))
    if isinstance(t, (Differential,)):
        return 1 + depth(t.arg)
    return 0


def states(vars_=VARS, primes=True):
    keys = list(vars_) + ([v.prime() for v in vars_] if primes else [])
    return st.fixed_dictionaries({k: small_rationals for k in keys})


# ------------------------------------------------------------ symbols

def dot_polys(arity, max_leaves=6):
    leaves = [numbers] + [st.just(DotTerm(i)) for i in range(arity)]
    return st.recursive(st.one_of(*leaves), lambda ch: _bin(ch, Plus, Times), max_leaves=max_leaves)


SYMBOLS = [("f", 0), ("g", 1), ("h", 2)]


def symbol_terms(max_leaves=10, differentials=True):
    """Terms over VARS and the function symbols of SYMBOLS.  Differentials
    are never nested."""
    def extend(ch):
        return st.one_of(
            _bin(ch, Plus, Times),
            st.builds(lambda a: FuncApp("g", (a,)), ch),
            st.builds(lambda a, b: FuncApp("h", (a, b)), ch, ch),
        )
    leaf = st.one_of(numbers, variables, st.just(FuncApp("f", ())))
    plain = st.recursive(leaf, extend, max_leaves=max_leaves)
    if not differentials:
        return plain
    inner = st.recursive(leaf, extend, max_leaves=max(2, max_leaves // 2))
    return st.recursive(st.one_of(leaf, st.builds(Differential, inner)), extend,
                        max_leaves=max_leaves)


def interpretations():
    """Ground interpretations of f/0, g/1, h/2 and p/1."""
    from dlkernel.semantics import GroundInterp

    def build(f0, g1, h2, rel, p1):
        return GroundInterp({("f", 0): f0, ("g", 1): g1, ("h", 2): h2},
                            {("p", 1): Cmp(rel, p1, Number(0))})
    return st.builds(build, dot_polys(0), dot_polys(1), dot_polys(2),
                     st.sampled_from([">=", ">", "=", "!="]), dot_polys(1, 4))


def qf_formulas(terms, max_leaves=6, preds=False):
    atom = st.builds(Cmp, st.sampled_from(RELATIONS), terms, terms)
    if preds:
        atom = st.one_of(atom, st.builds(lambda t: PredApp("p", (t,)), terms))
    return st.recursive(
        atom,
        lambda ch: st.one_of(st.builds(Not, ch), _bin(ch, And, Or, Imply, Equiv)),
        max_leaves=max_leaves,
    )


# --------------------------------------------------- full syntax trees

def any_terms():
    leaf = st.one_of(numbers, variables, st.just(FuncApp("f", ())))
    return st.recursive(
        leaf,
        lambda ch: st.one_of(
            _bin(ch, Plus, Times),
            st.builds(lambda a: Times(Number(-1), a), ch),
            st.builds(lambda a: FuncApp("g", (a,)), ch),
            st.builds(lambda a, b: FuncApp("h", (a, b)), ch, ch),
            st.builds(Differential, ch),
        ),
        max_leaves=6,
    )


def _odes(terms, formulas):
    def build(vs, rhs, dom):
        return ODESystem(tuple(zip(vs, rhs)), dom)
    return st.lists(variables, min_size=1, max_size=2, unique=True).flatmap(
        lambda vs: st.builds(build, st.just(vs),
                             st.lists(terms, min_size=len(vs), max_size=len(vs)),
                             st.one_of(st.just(Truth(True)), formulas))
    )


def formulas_and_programs():
    """Mutually recursive formulas and programs, unfiltered."""
    terms = any_terms()
    atoms = st.one_of(
        st.builds(Cmp, st.sampled_from(RELATIONS), terms, terms),
        st.builds(lambda t: PredApp("p", (t,)), terms),
        st.just(PredApp("q", ())),
        st.sampled_from([Truth(True), Truth(False)]),
    )

    def fml(ch):
        prog_leaf = st.one_of(
            st.builds(Assign, variables, terms),
            st.builds(lambda v, t: Assign(v.prime(), t), variables, terms),
            st.builds(Test, atoms),
            st.just(ProgConst("a")),
            _odes(terms, atoms),
        )
        progs = st.recursive(
            prog_leaf,
            lambda pc: st.one_of(_bin(pc, Choice, Seq), st.builds(Loop, pc)),
            max_leaves=4,
        )
        return st.one_of(
            st.builds(Not, ch),
            _bin(ch, And, Or, Imply, Equiv),
            st.builds(Forall, variables, ch),
            st.builds(Exists, variables, ch),
            st.builds(Box, progs, ch),
            st.builds(Diamond, progs, ch),
        )

    return st.recursive(atoms, fml, max_leaves=8)
