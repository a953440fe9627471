from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from dlkernel.parser import parseFormula, parseTerm
from dlkernel.semantics import (
    EMPTY_INTERP, EvalError, GroundInterp, State, evalFormulaQF, evalTerm, partialDerivative,
)
from dlkernel.syntax import Differential, DotTerm, FuncApp, Number, Plus, Times, Variable
from strategies import VARS, depth, dot_polys, poly_terms, states

x, y = Variable("x"), Variable("y")


def dual(t, nu):
    """Value and differential of a polynomial term, by dual numbers."""
    if isinstance(t, Number):
        return t.value, Fraction(0)
    if isinstance(t, Variable):
        return nu[t], nu[t.prime()]
    a, da = dual(t.left, nu)
    b, db = dual(t.right, nu)
    if isinstance(t, Plus):
        return a + b, da + db
    if isinstance(t, Times):
        return a * b, da * b + a * db
    raise TypeError(t)


def test_product_example():
    nu = State.parse("x=2, y=3, x'=5, y'=7")
    assert evalTerm(EMPTY_INTERP, nu, parseTerm("(x*y)'")) == 29


def test_exact_rationals():
    nu = State.parse("x=1/3")
    assert evalTerm(EMPTY_INTERP, nu, parseTerm("3*x*x")) == Fraction(1, 3)


def test_partial_derivative():
    d = partialDerivative(parseTerm("x^3+x*y"), x)
    assert evalTerm(EMPTY_INTERP, State.parse("x=2,y=5"), d) == 17


def test_uninterpreted_symbol_is_an_error():
    with pytest.raises(EvalError):
        evalTerm(EMPTY_INTERP, State(), parseTerm("f()"))


def test_qf_formula():
    nu = State.parse("x=1/2")
    assert evalFormulaQF(EMPTY_INTERP, nu, parseFormula("x*x<1 & !(x=0) -> x>0"))
    with pytest.raises(EvalError):
        evalFormulaQF(EMPTY_INTERP, nu, parseFormula("[x:=1]x>0"))


def test_predicate_interpretation():
    I = GroundInterp({}, {("p", 1): parseFormula(". >= 1", placeholders=True)})
    assert evalFormulaQF(I, State.parse("x=2"), parseFormula("p(x)"))
    assert not evalFormulaQF(I, State.parse("x=0"), parseFormula("p(x)"))


# --------------------------------------- derivation axioms, by the oracle

terms5 = poly_terms(max_leaves=14).filter(lambda t: depth(t) <= 5)
SETTINGS = settings(max_examples=1000, deadline=None, suppress_health_check=list(HealthCheck))


def _val(t, nu):
    return evalTerm(EMPTY_INTERP, State(nu), t)


@SETTINGS
@given(terms5, terms5, states(), st.builds(Number, st.integers(-9, 9)))
def test_derivation_axioms(f, g, nu, c):
    # constants
    assert _val(Differential(c), nu) == 0
    # variables
    for v in VARS:
        assert _val(Differential(v), nu) == nu[v.prime()]
    # sums
    assert _val(Differential(Plus(f, g)), nu) == _val(Differential(f), nu) + _val(Differential(g), nu)
    # products
    lhs = _val(Differential(Times(f, g)), nu)
    assert lhs == _val(Differential(f), nu) * _val(g, nu) + _val(f, nu) * _val(Differential(g), nu)
    # and both agree with the dual-number oracle
    assert lhs == dual(Times(f, g), nu)[1]
    assert _val(Differential(f), nu) == dual(f, nu)[1]


@settings(max_examples=200, deadline=None, suppress_health_check=list(HealthCheck))
@given(dot_polys(1, 8), poly_terms(max_leaves=8, vars_=[x]), states([x, y]))
def test_chain_rule_axiom(fpoly, gterm, nu):
    # [y:=g(x)][y':=1] (f(g(x)))' = (f(y))' * (g(x))', guarded by y not in g(x)
    I = GroundInterp({("f", 1): fpoly, ("g", 1): _as_unary(gterm)})
    gx = FuncApp("g", (x,))
    nu = State(nu)
    lhs = evalTerm(I, nu, Differential(FuncApp("f", (gx,))))
    after = State(nu)
    after[y] = evalTerm(I, nu, gx)
    after[y.prime()] = Fraction(1)
    rhs = evalTerm(I, after, Differential(FuncApp("f", (y,)))) * evalTerm(I, after, Differential(gx))
    assert lhs == rhs


def _as_unary(t):
    """Replace x by the placeholder."""
    if isinstance(t, Variable):
        return DotTerm(0)
    if isinstance(t, (Plus, Times)):
        return type(t)(_as_unary(t.left), _as_unary(t.right))
    return t
