import pytest

from dlkernel.parser import parseFormula, printFormula
from dlkernel.rename import Renaming, uniformRename
from dlkernel.syntax import Variable, structEq

x, y = Variable("x"), Variable("y")


def test_swaps_both_ways_and_primes():
    f = parseFormula("[{x'=y}](x)'>=y' & \\forall x x>y")
    g = uniformRename(Renaming(x, y), f)
    assert printFormula(g) == "[{y'=x}](y)'>=x' & \\forall y y>x"
    assert structEq(uniformRename(Renaming(x, y), g), f)


def test_symbols_untouched():
    f = parseFormula("p(x#) -> [a]q(f(x))")
    assert printFormula(uniformRename(Renaming(x, y), f)) == "p(x#) -> [a]q(f(y))"


def test_bad_renamings():
    with pytest.raises(ValueError):
        Renaming(x, x)
    with pytest.raises(ValueError):
        Renaming(x.prime(), y)
