from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, given, settings

from dlkernel import syntax as S
from dlkernel.kernel import parseScript
from dlkernel.parser import (
    ParseError, parseFormula, parseProgram, parseTerm, printFormula, printProgram, printTerm,
)
from dlkernel.syntax import (
    And, Assign, Box, Choice, Cmp, Differential, Equiv, Forall, Imply, Loop, Number, ODESystem,
    Plus, Seq, Times, Variable, WellFormedError, structEq, wellFormed,
)
from conftest import CORPUS, KERNEL_DATA
from strategies import formulas_and_programs

x, y, v, a, b = (Variable(n) for n in "xyvab")


def test_car_model_ast():
    f = parseFormula("v>=2 & b>0 -> [{{a:=-b ++ a:=5}; {x'=v, v'=a & v>=0}}*] v>=0")
    assert isinstance(f, Imply)
    assert f.left == And(Cmp(">=", v, Number(2)), Cmp(">", b, Number(0)))
    box = f.right
    assert isinstance(box, Box) and isinstance(box.prog, Loop)
    body = box.prog.body
    assert isinstance(body, Seq) and isinstance(body.left, Choice)
    assert body.left.left == Assign(a, Times(Number(-1), b))
    ode = body.right
    assert isinstance(ode, ODESystem)
    assert ode.eqs == ((x, v), (v, a))
    assert ode.domain == Cmp(">=", v, Number(0))


def test_differential_assignment():
    assert parseProgram("x':=5*x") == Assign(x.prime(), Times(Number(5), x))


def test_precedence():
    assert printTerm(parseTerm("1+2*x")) == "1+2*x"
    assert printTerm(parseTerm("(1+2)*x")) == "(1+2)*x"
    assert parseFormula("p() -> q() -> r()") == parseFormula("p() -> (q() -> r())")
    f = parseFormula("p() <-> q() & r() | s()")
    assert isinstance(f, Equiv)
    assert printFormula(parseFormula("!(x>=0) & y>0")) == "!x>=0 & y>0"


def test_powers_and_rationals():
    assert parseTerm("x^3") == Times(Times(x, x), x)
    assert parseTerm("1/2") == Number(Fraction(1, 2))
    assert printTerm(parseTerm("0.25*x")) == "1/4*x"


def test_unicode_aliases():
    ascii_ = parseFormula("\\forall x (x>=0 -> [x:=1 ++ x:=2]x!=0)")
    uni = parseFormula("∀x (x≥0 → [x:=1 ∪ x:=2]x≠0)")
    assert structEq(ascii_, uni)
    assert parseTerm("(x·y)′") == Differential(Times(x, y))


def test_guarded_quantifier_sugar():
    f = parseFormula("\\forall t>=0 t+1>0")
    assert isinstance(f, Forall) and isinstance(f.body, Imply)


def test_diamond_closing_angle():
    f = parseFormula("<?q()>q()")
    assert printFormula(f) == "<?q()>q()"
    g = parseFormula("<?x>=0>x>0")
    assert isinstance(g.prog, S.Test) and g.prog.cond == Cmp(">=", x, Number(0))
    assert printFormula(g) == "<?(x>=0)>x>0"


@pytest.mark.parametrize("text", [
    "x+", "[x:=1 x>0", "p() ->", "{x'=1}", "x >= = 1", "[?x>0]", "\\forall x' x>0",
])
def test_parse_errors(text):
    with pytest.raises((ParseError, WellFormedError)):
        parseFormula(text)


def test_parse_error_has_span():
    with pytest.raises(ParseError) as e:
        parseFormula("x>=1 & & y")
    assert e.value.span.start == 7


@pytest.mark.parametrize("text", ["[{x'=x' }]x>0", "[{x'=1, x'=2}]x>0", "[x:=.]x>0"])
def test_ill_formed(text):
    with pytest.raises((ParseError, WellFormedError)):
        parseFormula(text)


def _corpus_formulas():
    files = sorted(CORPUS.rglob("*.dlp")) + sorted(KERNEL_DATA.glob("*.dlp"))
    out = []
    for p in files:
        s = parseScript(p.read_text(), str(p))
        out.append(s.goal)
        for st in s.steps:
            if hasattr(st.body, "goal"):
                out.append(st.body.goal)
    return out


def test_round_trip_corpus():
    fs = _corpus_formulas()
    assert len(fs) > 50
    for f in fs:
        assert structEq(parseFormula(printFormula(f)), f), printFormula(f)


@settings(max_examples=1000, deadline=None, suppress_health_check=list(HealthCheck))
@given(formulas_and_programs())
def test_round_trip_random(f):
    assume(not wellFormed(f, placeholders=False))
    assert structEq(parseFormula(printFormula(f)), f)


def test_program_printing():
    a_ = parseProgram("x:=1; {y:=2 ++ ?x>0}; {x'=y & x>=0}")
    assert printProgram(a_) == "x:=1; {y:=2 ++ ?(x>0)}; {x'=y & x>=0}"
    assert structEq(parseProgram(printProgram(a_)), a_)


def test_minus_is_sugar():
    assert parseTerm("x-y") == Plus(x, Times(Number(-1), y))
