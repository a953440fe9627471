"""Command line front end.

    dlkernel check [--json] FILE.dlp...
    dlkernel statics [--program] TEXT
    dlkernel subst --sigma SUBST FORMULA
    dlkernel eval --state BINDINGS [--interp SUBST] TERM
    dlkernel axioms list | show NAME | print GROUP

Exit codes: 0 proved or success, 2 proved modulo arithmetic, 1 rejected or
parse error, 64 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .axioms import DEFAULT_DIMENSION_BOUND, AxiomBase, UnknownAxiom, axiom_base
from .kernel import Loader, ScriptError
from .parser import ParseError, parseFormula, parseProgram, parseTerm, pretty
from .semantics import EMPTY_INTERP, EvalError, GroundInterp, State, adjointGround, evalFormulaQF, evalTerm
from .statics import boundVars, boundVarsFormula, freeVars, mustBoundVars, signature
from .syntax import Box, Diamond, WellFormedError, walk
from .usubst import ClashError, parseUSubst, substitute

EXIT_OK, EXIT_REJECTED, EXIT_MODULO, EXIT_USAGE = 0, 1, 2, 64
CONFIG_NAME = "dlkernel.toml"


@dataclass
class CliConfig:
    vectorialDimensionBound: int = DEFAULT_DIMENSION_BOUND
    colorOutput: bool = False
    lemmaSearchPaths: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not isinstance(self.vectorialDimensionBound, int) or self.vectorialDimensionBound < 1:
            raise ValueError("vectorialDimensionBound must be a positive integer")

    @staticmethod
    def load(path: Path) -> "CliConfig":
        data = tomllib.loads(path.read_text(encoding="utf-8"))
        unknown = set(data) - {"vectorialDimensionBound", "colorOutput", "lemmaSearchPaths"}
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        paths = [str((path.parent / p).resolve()) for p in data.get("lemmaSearchPaths", [])]
        return CliConfig(
            data.get("vectorialDimensionBound", DEFAULT_DIMENSION_BOUND),
            bool(data.get("colorOutput", False)),
            paths,
        )


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)

    def exit(self, status=0, message=None):
        if status:
            raise UsageError(message or "")
        raise _HelpExit(message)


class _HelpExit(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dlkernel", description="Uniform substitution proof kernel for dL.")
    p.add_argument("--config", help=f"configuration file (default: ./{CONFIG_NAME} if present)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--color", dest="color", action="store_true", default=None,
                   help="color verdicts (overrides colorOutput)")
    p.add_argument("--no-color", dest="color", action="store_false", help="plain verdicts")
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="check proof scripts")
    c.add_argument("files", nargs="+")
    c.add_argument("--lemma-path", action="append", default=[], help="extra lemma directory")
    c.add_argument("--dimension", type=int, help="vectorial dimension bound of the ODE axioms")
    c.add_argument("--verdict-only", action="store_true", help="omit the step trace")

    s = sub.add_parser("statics", parents=[common], help="free, bound and must-bound variables and signature")
    s.add_argument("text")
    s.add_argument("--program", action="store_true", help="read TEXT as a hybrid program")

    u = sub.add_parser("subst", parents=[common], help="apply a uniform substitution")
    u.add_argument("--sigma", required=True)
    u.add_argument("formula")

    e = sub.add_parser("eval", parents=[common], help="evaluate a term or quantifier-free formula")
    e.add_argument("--state", default="")
    e.add_argument("--interp", default="", help="closed polynomial meanings, as a substitution")
    e.add_argument("text")

    a = sub.add_parser("axioms", parents=[common], help="inspect the axiom base")
    a.add_argument("action", choices=["list", "show", "print"])
    a.add_argument("name", nargs="?")
    a.add_argument("--dimension", type=int)
    return p


def _config(args) -> CliConfig:
    if args.config:
        cfg = CliConfig.load(Path(args.config))
    elif Path(CONFIG_NAME).is_file():
        cfg = CliConfig.load(Path(CONFIG_NAME))
    else:
        cfg = CliConfig()
    if getattr(args, "dimension", None) is not None:
        cfg.vectorialDimensionBound = args.dimension
        cfg.__post_init__()
    if args.color is not None:
        cfg.colorOutput = args.color
    return cfg


_COLORS = {"Proved": "32", "ProvedModuloArith": "33", "Rejected": "31"}


def _paint(cfg: CliConfig, kind: str, text: str) -> str:
    if not cfg.colorOutput:
        return text
    return f"\x1b[{_COLORS[kind]}m{text}\x1b[0m"


def _cmd_check(args, cfg, out) -> int:
    loader = Loader(axioms=axiom_base(cfg.vectorialDimensionBound),
                    search_paths=cfg.lemmaSearchPaths + args.lemma_path)
    worst = EXIT_OK
    reports = []
    for name in args.files:
        try:
            _, res = loader.check_file(name)
        except (ScriptError, OSError) as e:
            reports.append({"file": name, "error": str(e)})
            if not args.json:
                out.write(f"== {name}\nerror: {e}\n")
            worst = EXIT_REJECTED
            continue
        v = res.verdict
        if args.json:
            reports.append({
                "file": name, **v.to_json(),
                **({} if args.verdict_only else {"trace": [t.to_json() for t in res.trace]}),
            })
        else:
            out.write(f"== {name}\n")
            if not args.verdict_only:
                for t in res.trace:
                    shown = pretty(t.formula) if t.formula is not None else "-"
                    note = f"  [{t.note}]" if t.note else ""
                    out.write(f"{t.label:>4} {t.kind:<6} {shown}{note}\n")
            out.write(_paint(cfg, v.kind, str(v)) + "\n")
        code = v.exit_code
        if code == EXIT_REJECTED or (code == EXIT_MODULO and worst == EXIT_OK):
            worst = code
    if args.json:
        out.write(json.dumps(reports if len(reports) > 1 else reports[0], indent=2) + "\n")
    return worst


def _cmd_statics(args, cfg, out) -> int:
    if args.program:
        a = parseProgram(args.text)
        rows = [("FV", freeVars(a)), ("BV", boundVars(a)), ("MBV", mustBoundVars(a)), ("Sigma", signature(a))]
    else:
        f = parseFormula(args.text)
        rows = [("FV", freeVars(f)), ("BV", boundVarsFormula(f)), ("Sigma", signature(f))]
        for n in walk(f):
            if isinstance(n, (Box, Diamond)):
                rows.append((f"MBV {pretty(n.prog)}", mustBoundVars(n.prog)))
    if args.json:
        out.write(json.dumps({k: (v.to_json() if hasattr(v, "to_json") else str(v)) for k, v in rows},
                             indent=2) + "\n")
    else:
        for k, v in rows:
            out.write(f"{k}: {v}\n")
    return EXIT_OK


def _cmd_subst(args, cfg, out) -> int:
    f = parseFormula(args.formula)
    sigma = parseUSubst(args.sigma, context=f)
    try:
        r = substitute(sigma, f)
    except ClashError as e:
        if args.json:
            out.write(json.dumps({"clash": e.clash.to_json()}, indent=2) + "\n")
        else:
            out.write(f"{e.clash}\n")
        return EXIT_REJECTED
    if args.json:
        out.write(json.dumps({"result": pretty(r)}) + "\n")
    else:
        out.write(pretty(r) + "\n")
    return EXIT_OK


def _cmd_eval(args, cfg, out) -> int:
    nu = State.parse(args.state)
    interp = EMPTY_INTERP
    if args.interp.strip():
        interp = adjointGround(parseUSubst(args.interp), GroundInterp())
    try:
        value = str(evalTerm(interp, nu, parseTerm(args.text)))
    except ParseError:
        value = "true" if evalFormulaQF(interp, nu, parseFormula(args.text)) else "false"
    out.write((json.dumps({"value": value}) if args.json else value) + "\n")
    return EXIT_OK


def _cmd_axioms(args, cfg, out) -> int:
    base: AxiomBase = axiom_base(cfg.vectorialDimensionBound)
    if args.action == "list":
        for group in ("base", "ode", "rules"):
            names = base.groups[group]
            if args.json:
                continue
            out.write(f"[{group}]\n" + "".join(f"{n}\n" for n in names))
        if args.json:
            out.write(json.dumps(base.groups, indent=2) + "\n")
        return EXIT_OK
    if not args.name:
        raise UsageError(f"axioms {args.action} needs a name")
    if args.action == "print":
        if args.name not in base.groups:
            raise UsageError(f"no group {args.name}; groups are base, ode, rules")
        out.write(base.listing(args.name))
        return EXIT_OK
    name = base.canonical(args.name)
    if name in base.rules:
        out.write(f"{name}: {base.rules[name]}\n")
        return EXIT_OK
    try:
        out.write(f"{name}: {pretty(base.lookup(name))}\n")
    except UnknownAxiom:
        out.write(f"unknown axiom {args.name}\n")
        return EXIT_REJECTED
    return EXIT_OK


_COMMANDS = {
    "check": _cmd_check, "statics": _cmd_statics, "subst": _cmd_subst,
    "eval": _cmd_eval, "axioms": _cmd_axioms,
}


def run(argv: Optional[List[str]] = None) -> Tuple[int, str]:
    """Run one command; returns the exit code and everything written."""
    out = io.StringIO()
    try:
        args = _build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("missing command")
        cfg = _config(args)
        code = _COMMANDS[args.command](args, cfg, out)
    except _HelpExit as h:
        return EXIT_OK, (str(h.args[0]) if h.args and h.args[0] else _build_parser().format_help())
    except UsageError as e:
        return EXIT_USAGE, out.getvalue() + f"usage error: {e}\n{_build_parser().format_usage()}"
    except (ParseError, WellFormedError, ScriptError, EvalError, ValueError, TypeError) as e:
        return EXIT_REJECTED, out.getvalue() + f"error: {e}\n"
    return code, out.getvalue()


def main(argv: Optional[List[str]] = None) -> int:
    code, text = run(argv)
    stream = sys.stderr if code == EXIT_USAGE else sys.stdout
    stream.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
