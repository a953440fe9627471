import json
import subprocess
import sys

import pytest

from dlkernel.cli import CliConfig, main, run
from conftest import CORPUS, KERNEL_DATA, LEMMAS, ROOT


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """No ambient dlkernel.toml or DL_LEMMA_PATH."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("DL_LEMMA_PATH", raising=False)


def test_check_proved():
    code, out = run(["check", str(CORPUS / "ex4_contextual.dlp")])
    assert code == 0
    assert out.splitlines()[-1] == "Proved"
    assert "  1 axiom" in out


def test_check_exit_codes():
    assert run(["check", str(LEMMAS / "ct.dlp")])[0] == 2
    assert run(["check", str(KERNEL_DATA / "cex_instantiate.dlp")])[0] == 1
    # the worst verdict wins
    code, _ = run(["check", str(CORPUS / "ex5_flat.dlp"), str(LEMMAS / "ct.dlp")])
    assert code == 2


def test_check_parse_error(tmp_path):
    bad = tmp_path / "bad.dlp"
    bad.write_text("goal: x>=\n")
    code, out = run(["check", str(bad)])
    assert code == 1 and "bad.dlp:1" in out
    code, out = run(["check", str(tmp_path / "missing.dlp")])
    assert code == 1


def test_check_json():
    code, out = run(["check", "--json", "--verdict-only", str(KERNEL_DATA / "cex_instantiate.dlp")])
    data = json.loads(out)
    assert code == 1
    assert data["reason"] == "NotInstantiable" and data["step"] == "2"
    code, out = run(["--json", "check", str(CORPUS / "ex5_flat.dlp")])
    data = json.loads(out)
    assert data["verdict"] == "Proved" and data["trace"][0]["kind"] == "axiom"


def test_deterministic_output():
    files = sorted(str(p) for p in CORPUS.glob("*.dlp"))
    assert run(["check", *files]) == run(["check", *files])


def test_usage_errors():
    assert run([])[0] == 64
    assert run(["frobnicate"])[0] == 64
    assert run(["check"])[0] == 64
    assert run(["subst", "x>0"])[0] == 64
    assert run(["axioms", "show"])[0] == 64


def test_help():
    code, out = run(["--help"])
    assert code == 0 and "check" in out


def test_statics():
    code, out = run(["statics", "v>=2 & b>0 -> [{{a:=-b ++ a:=5}; {x'=v, v'=a & v>=0}}*] v>=0"])
    assert code == 0
    assert out.splitlines()[0] == "FV: {b,v,x}"
    assert "BV: {a,v,v',x,x'}" in out
    code, out = run(["statics", "--program", "x:=1 ++ y:=2"])
    assert "MBV: {}" in out and "BV: {x,y}" in out


def test_subst_clash_names_variable_and_binder():
    code, out = run(["subst", "--sigma", "f ~> x+1 ; p(.) ~> .!=x", "[x:=f()]p(x) <-> p(f())"])
    assert code == 1
    assert "{x}" in out and "[x:=x+1]" in out


def test_eval():
    assert run(["eval", "--state", "x=2,y=3,x'=5,y'=7", "(x*y)'"]) == (0, "29\n")
    assert run(["eval", "--state", "x=1/2", "x*x<1"]) == (0, "true\n")
    assert run(["eval", "--interp", "f(.) ~> .*.+1", "--state", "x=3", "f(x)"]) == (0, "10\n")
    assert run(["eval", "f(x)"])[0] == 1


def test_axioms_commands():
    code, out = run(["axioms", "show", "[?]"])
    assert out == "[?]: [?q()]p() <-> q() -> p()\n"
    assert run(["axioms", "show", "Barcan"])[0] == 1
    code, out = run(["axioms", "list"])
    assert "[ode]" in out and "DI>=" in out and "Barcan" not in out
    code, out = run(["axioms", "print", "base"])
    assert out.startswith("<.>: ")
    code, out = run(["axioms", "list", "--dimension", "2"])
    assert "DW_2" in out and "DW_3" not in out


def test_config_file(tmp_path):
    cfg = tmp_path / "dlkernel.toml"
    cfg.write_text('vectorialDimensionBound = 2\ncolorOutput = true\nlemmaSearchPaths = ["lib"]\n')
    c = CliConfig.load(cfg)
    assert c.vectorialDimensionBound == 2 and c.colorOutput
    assert c.lemmaSearchPaths == [str((tmp_path / "lib").resolve())]
    code, out = run(["--config", str(cfg), "axioms", "list"])
    assert "DW_3" not in out
    code, out = run(["--config", str(cfg), "check", "--verdict-only", str(CORPUS / "ex5_flat.dlp")])
    assert "\x1b[32mProved\x1b[0m" in out
    code, out = run(["--config", str(cfg), "--no-color", "check", "--verdict-only",
                     str(CORPUS / "ex5_flat.dlp")])
    assert "\x1b" not in out


def test_bad_config(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("vectorialDimensionBound = 0\n")
    assert run(["--config", str(cfg), "axioms", "list"])[0] == 1
    cfg.write_text("nonsense = 1\n")
    assert run(["--config", str(cfg), "axioms", "list"])[0] == 1
    with pytest.raises(ValueError):
        CliConfig(vectorialDimensionBound=0)


def test_lemma_search_path(tmp_path, monkeypatch):
    use = tmp_path / "use.dlp"
    use.write_text("import: ct.dlp\ngoal: true\n1 arith true\n")
    assert run(["check", str(use)])[0] == 1
    assert run(["check", "--lemma-path", str(LEMMAS), str(use)])[0] == 0
    monkeypatch.setenv("DL_LEMMA_PATH", str(LEMMAS))
    assert run(["check", str(use)])[0] == 0


def test_repository_config(monkeypatch):
    monkeypatch.chdir(ROOT)
    use = "corpus/ex7_forward.dlp"
    assert run(["check", "--verdict-only", use]) == (0, f"== {use}\nProved\n")


def test_main_and_module_entry(capsys):
    assert main(["axioms", "show", "V"]) == 0
    assert capsys.readouterr().out == "V: p() -> [a]p()\n"
    r = subprocess.run([sys.executable, "-m", "dlkernel", "check", "--verdict-only",
                        str(CORPUS / "ex5_flat.dlp")], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.endswith("Proved\n")
