import json

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from dlkernel.cli import run
from dlkernel.parser import parseFormula, parseTerm, printFormula, printTerm
from dlkernel.semantics import State, adjointGround, evalFormulaQF, evalTerm
from dlkernel.statics import EMPTY, VarSet
from dlkernel.syntax import Variable
from dlkernel.usubst import (
    Clash, ClashError, USubst, admissible, applyFormula, parseUSubst, sigmaFV, substitute,
)
from conftest import GOLDEN
from strategies import dot_polys, interpretations, qf_formulas, states, symbol_terms

x = Variable("x")
ASSIGN = "f ~> x+1 ; p(.) ~> .!=x"

CASES = json.loads((GOLDEN / "usubst" / "cases.json").read_text())


@pytest.mark.parametrize("case", CASES, ids=[c["name"] for c in CASES])
def test_golden_vector(case):
    code, out = run(["subst", "--sigma", case["sigma"], case["formula"]])
    assert out == (GOLDEN / "usubst" / f"{case['name']}.golden").read_text()
    assert code == case["exit"]


def test_vector_count_and_outcomes():
    outcome = {c["name"]: c["exit"] for c in CASES}
    assert len(CASES) >= 8
    for name in ("assign_clash", "va_clash", "v_clash_ode", "v_clash_differential"):
        assert outcome[name] == 1
    for name in ("assign_admissible", "assign_argument_exempt", "v_accept", "assign_nontrivial"):
        assert outcome[name] == 0


def test_sigma_fv():
    s = parseUSubst(ASSIGN)
    assert sigmaFV(s) == VarSet.of(x)
    assert sigmaFV(parseUSubst("f ~> 2 ; p(.) ~> .>=0")) == EMPTY
    # replacements for x#-symbols may mention every variable and do not count
    assert sigmaFV(parseUSubst("p(x#) ~> x>=y")) == EMPTY


def test_admissible():
    s = parseUSubst(ASSIGN)
    assert not admissible(s, VarSet.of(x), parseFormula("p(x)"))
    assert admissible(s, VarSet.of(x), parseFormula("q(x)"))
    assert admissible(s, VarSet.of(Variable("y")), parseFormula("p(x)"))


def test_term_application():
    s = parseUSubst("f ~> x+1")
    assert printTerm(substitute(s, parseTerm("2*f()"))) == "2*(x+1)"


def test_assignment_clash_both_ways():
    s = parseUSubst(ASSIGN)
    ok = substitute(s, parseFormula("[y:=f()]p(2*y) <-> p(2*f())"))
    assert printFormula(ok) == "[y:=x+1]2*y!=x <-> 2*(x+1)!=x"
    bad = applyFormula(s, parseFormula("[x:=f()]p(x) <-> p(f())"))
    assert isinstance(bad, Clash)
    assert "x" in str(bad) and "[x:=x+1]" in str(bad)
    with pytest.raises(ClashError):
        substitute(s, parseFormula("[x:=f()]p(x) <-> p(f())"))


def test_arguments_of_bound_variables_are_exempt():
    s = parseUSubst("f ~> x+1 ; p(.) ~> .!=y")
    assert printFormula(substitute(s, parseFormula("[x:=f()]p(x)"))) == "[x:=x+1]x!=y"


def test_loop_clash_and_acceptance():
    s = parseUSubst("p() ~> x>=0")
    assert isinstance(applyFormula(s, parseFormula("[{x:=x+1}*]p()")), Clash)
    assert not isinstance(applyFormula(parseUSubst("p() ~> y>=0"), parseFormula("[{x:=x+1}*]p()")), Clash)


def test_program_constant_and_predicational():
    s = parseUSubst("a ~> x:=x+1 ; C{_} ~> [y:=1]_")
    r = substitute(s, parseFormula("[a]true & C{x>=0}"))
    assert printFormula(r) == "[x:=x+1]true & [y:=1]x>=0"
    # the argument may be bound by the context, but replacements inside it
    # are substituted into a context that binds everything
    assert printFormula(substitute(s, parseFormula("C{y>=0}"))) == "[y:=1]y>=0"
    s2 = parseUSubst("C{_} ~> [y:=1]_ ; p() ~> y>=0")
    assert isinstance(applyFormula(s2, parseFormula("C{p()}")), Clash)
    s3 = parseUSubst("C{_} ~> [y:=1]_ ; p() ~> 1>=0")
    assert printFormula(substitute(s3, parseFormula("C{p()}"))) == "[y:=1]1>=0"


def test_differential_context_is_fully_bound():
    s = parseUSubst("f ~> x")
    assert isinstance(applyFormula(s, parseFormula("(f())'=0")), Clash)
    assert not isinstance(applyFormula(parseUSubst("f ~> 3"), parseFormula("(f())'=0")), Clash)


def test_duplicate_replacement_is_an_error():
    with pytest.raises(ValueError):
        parseUSubst("f ~> 1 ; f ~> 2")


def test_fv_of_all_replacement():
    assert sigmaFV(parseUSubst("p(.) ~> .>=x")) == VarSet.of(x)


# --------------------------------------------- ground substitution lemma

closed = st.fixed_dictionaries(
    {},
    optional={
        ("func", "f", 0): dot_polys(0),
        ("func", "g", 1): dot_polys(1),
        ("func", "h", 2): dot_polys(2),
    },
)

LEMMA = settings(max_examples=250, deadline=None, suppress_health_check=list(HealthCheck))


@LEMMA
@given(closed, interpretations(), symbol_terms(), states())
def test_substitution_lemma_terms(pairs, I, theta, nu):
    sigma = USubst(pairs)
    nu = State(nu)
    assert evalTerm(I, nu, substitute(sigma, theta)) == evalTerm(adjointGround(sigma, I), nu, theta)


@LEMMA
@given(closed, interpretations(), qf_formulas(symbol_terms(max_leaves=5), preds=True), states(),
       st.sampled_from([">=", ">", "=", "!="]), dot_polys(1, 4))
def test_substitution_lemma_formulas(pairs, I, phi, nu, rel, p1):
    from dlkernel.syntax import Cmp, Number
    pairs = dict(pairs)
    pairs[("pred", "p", 1)] = Cmp(rel, p1, Number(0))
    sigma = USubst(pairs)
    nu = State(nu)
    assert evalFormulaQF(I, nu, substitute(sigma, phi)) == \
        evalFormulaQF(adjointGround(sigma, I), nu, phi)
