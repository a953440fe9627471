"""The proof checker.

A proof script is a list of labelled steps.  Each step establishes one
formula, always recomputed by the kernel from the step's justification:

* ``Axiom(name)``: a formula of the axiom base,
* ``US(sigma, ref)``: uniform substitution applied to an earlier formula,
* ``RuleApp(name, sigma, refs)``: a substitution instance of an axiomatic
  rule or of a registered lemma; its premises must match the referenced
  formulas exactly, and ``sigma`` may not introduce free variables,
* ``UR(renaming, ref)``: uniform renaming,
* ``Arith(goal)``: real arithmetic, either decided by ``checkArith`` or
  kept as an open assumption,
* ``Derived(name)``: the conclusion of a registered lemma.

Open assumptions of a lemma become the premises of the derived rule that
the lemma provides.  A lemma in which US touched a formula depending on an
open assumption is sound as a proof but not as a rule, so it cannot be
instantiated by ``RuleApp``.
"""

from __future__ import annotations

import os
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .arith import checkArith
from .axioms import DEFAULT_DIMENSION_BOUND, AxiomBase, Rule, UnknownAxiom, axiom_base
from .parser import ParseError, parseFormula, printFormula
from .rename import Renaming, uniformRename
from .syntax import (
    ALL, Formula, FuncOfAll, Node, PredOfAll, ProgConst, WellFormedError, structEq, var,
    wellFormed,
)
from .usubst import ClashError, USubst, parseUSubst, sigmaFV, substitute

# ------------------------------------------------------------------ steps


@dataclass(frozen=True)
class Axiom:
    name: str


@dataclass(frozen=True)
class US:
    sigma: USubst
    ref: str


@dataclass(frozen=True)
class RuleApp:
    name: str
    sigma: USubst
    refs: Tuple[str, ...]


@dataclass(frozen=True)
class UR:
    renaming: Renaming
    ref: str


@dataclass(frozen=True)
class Arith:
    goal: Formula


@dataclass(frozen=True)
class Derived:
    name: str


ProofStep = Union[Axiom, US, RuleApp, UR, Arith, Derived]


@dataclass(frozen=True)
class Step:
    label: str
    body: ProofStep
    line: int = 0


# ---------------------------------------------------------------- verdicts

REASONS = (
    "Clash", "UnknownAxiom", "RuleShapeMismatch", "NonEmptySigmaFV", "BadRef",
    "NotInstantiable", "IllFormed",
)


@dataclass(frozen=True)
class Rejection:
    reason: str
    detail: str = ""

    def __post_init__(self):
        assert self.reason in REASONS, self.reason

    def __str__(self):
        return f"{self.reason}: {self.detail}" if self.detail else self.reason


@dataclass(frozen=True)
class Verdict:
    kind: str  # "Proved", "ProvedModuloArith" or "Rejected"
    assumptions: Tuple[Formula, ...] = ()
    step: Optional[str] = None
    rejection: Optional[Rejection] = None

    @property
    def accepted(self) -> bool:
        return self.kind != "Rejected"

    @property
    def exit_code(self) -> int:
        return {"Proved": 0, "ProvedModuloArith": 2, "Rejected": 1}[self.kind]

    def __str__(self):
        if self.kind == "Proved":
            return "Proved"
        if self.kind == "ProvedModuloArith":
            return "ProvedModuloArith: " + "; ".join(printFormula(a) for a in self.assumptions)
        return f"Rejected at step {self.step}: {self.rejection}"

    def to_json(self) -> dict:
        out = {"verdict": self.kind}
        if self.kind == "ProvedModuloArith":
            out["assumptions"] = [printFormula(a) for a in self.assumptions]
        if self.kind == "Rejected":
            out["step"] = self.step
            out["reason"] = self.rejection.reason
            out["detail"] = self.rejection.detail
        return out


def Proved() -> Verdict:
    return Verdict("Proved")


def ProvedModuloArith(assumptions) -> Verdict:
    return Verdict("ProvedModuloArith", tuple(assumptions))


def Rejected(step, rejection: Rejection) -> Verdict:
    return Verdict("Rejected", step=str(step), rejection=rejection)


# ------------------------------------------------------------- lemma store


class DuplicateLemma(ValueError):
    pass


@dataclass(frozen=True)
class Lemma:
    name: str
    formula: Formula
    verdict: Verdict
    usedUSonOpenPremise: bool

    @property
    def premises(self) -> Tuple[Formula, ...]:
        return self.verdict.assumptions


class LemmaStore:
    """Registered lemmas.  Reads are lock-free; registration is exclusive."""

    def __init__(self):
        self._lemmas: Dict[str, Lemma] = {}
        self._lock = threading.Lock()

    def get(self, name: str) -> Optional[Lemma]:
        return self._lemmas.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._lemmas

    def names(self) -> List[str]:
        return sorted(self._lemmas)

    def add(self, lemma: Lemma):
        with self._lock:
            if lemma.name in self._lemmas:
                raise DuplicateLemma(lemma.name)
            self._lemmas = {**self._lemmas, lemma.name: lemma}


# ----------------------------------------------------------------- checking


class _Reject(Exception):
    def __init__(self, reason, detail=""):
        super().__init__(detail)
        self.rejection = Rejection(reason, detail)


@dataclass
class TraceEntry:
    label: str
    kind: str
    formula: Optional[Formula]
    note: str = ""

    def to_json(self) -> dict:
        return {
            "label": self.label, "kind": self.kind,
            "formula": None if self.formula is None else printFormula(self.formula),
            "note": self.note,
        }


@dataclass
class Context:
    """Per-script checking state."""

    axioms: AxiomBase
    lemmas: LemmaStore
    formulas: Dict[str, Formula] = field(default_factory=dict)
    open: Dict[str, bool] = field(default_factory=dict)
    assumptions: List[Formula] = field(default_factory=list)
    usedUSonOpenPremise: bool = False

    def resolve(self, ref: str) -> Formula:
        if ref not in self.formulas:
            raise _Reject("BadRef", f"no earlier step {ref}")
        return self.formulas[ref]

    def assume(self, f: Formula):
        if not any(structEq(f, a) for a in self.assumptions):
            self.assumptions.append(f)


def _apply(sigma: USubst, f: Formula) -> Formula:
    try:
        return substitute(sigma, f)
    except ClashError as e:
        raise _Reject("Clash", str(e.clash)) from None


def _well_formed(f: Formula) -> Formula:
    v = wellFormed(f, placeholders=False)
    if v:
        raise _Reject("IllFormed", "; ".join(map(str, v)))
    return f


def _rule_of(ctx: Context, name: str) -> Tuple[Tuple[Formula, ...], Formula]:
    lemma = ctx.lemmas.get(name)
    if lemma is not None:
        if lemma.usedUSonOpenPremise:
            raise _Reject(
                "NotInstantiable",
                f"lemma {name} applies US to a formula depending on an open assumption",
            )
        return lemma.premises, lemma.formula
    try:
        r: Rule = ctx.axioms.rule(name)
    except UnknownAxiom:
        raise _Reject("UnknownAxiom", f"no rule or lemma named {name}") from None
    return r.premises, r.conclusion


def checkStep(ctx: Context, step: ProofStep) -> Tuple[Formula, bool, str]:
    """Formula established by ``step``, whether it depends on an open
    assumption, and a note.  Raises ``_Reject``."""
    if isinstance(step, Axiom):
        try:
            return ctx.axioms.lookup(step.name), False, ""
        except UnknownAxiom:
            raise _Reject("UnknownAxiom", f"no axiom named {step.name}") from None

    if isinstance(step, US):
        prior = ctx.resolve(step.ref)
        is_open = ctx.open[step.ref]
        if is_open:
            ctx.usedUSonOpenPremise = True
        return _well_formed(_apply(step.sigma, prior)), is_open, ""

    if isinstance(step, RuleApp):
        premises, conclusion = _rule_of(ctx, step.name)
        fv = sigmaFV(step.sigma)
        if not fv.is_empty:
            raise _Reject("NonEmptySigmaFV", f"FV(sigma) = {fv}")
        if len(premises) != len(step.refs):
            raise _Reject(
                "RuleShapeMismatch",
                f"{step.name} has {len(premises)} premises, {len(step.refs)} given",
            )
        is_open = False
        for i, (prem, ref) in enumerate(zip(premises, step.refs)):
            have = ctx.resolve(ref)
            want = _apply(step.sigma, prem)
            if not structEq(want, have):
                raise _Reject(
                    "RuleShapeMismatch",
                    f"premise {i + 1} should be {printFormula(want)} but step {ref} proves {printFormula(have)}",
                )
            is_open = is_open or ctx.open[ref]
        return _well_formed(_apply(step.sigma, conclusion)), is_open, ""

    if isinstance(step, UR):
        prior = ctx.resolve(step.ref)
        return uniformRename(step.renaming, prior), ctx.open[step.ref], ""

    if isinstance(step, Arith):
        _well_formed(step.goal)
        res = checkArith(step.goal)
        if res.valid:
            return step.goal, False, "Valid"
        ctx.assume(step.goal)
        return step.goal, True, "Unknown, assumed"

    if isinstance(step, Derived):
        lemma = ctx.lemmas.get(step.name)
        if lemma is None:
            raise _Reject("UnknownAxiom", f"no lemma named {step.name}")
        for a in lemma.premises:
            ctx.assume(a)
        if lemma.usedUSonOpenPremise:
            ctx.usedUSonOpenPremise = True
        return lemma.formula, bool(lemma.premises), ""

    raise TypeError(f"not a proof step: {step!r}")


def _match(pat, f, binds: dict) -> bool:
    """One-sided matching of a rule premise against a formula.  Only the
    symbols that stand for whole subexpressions get bound."""
    key = None
    if isinstance(pat, PredOfAll):
        key = ("quant", pat.name, 0)
    elif isinstance(pat, FuncOfAll):
        key = ("func", pat.name, ALL)
    elif isinstance(pat, ProgConst):
        key = ("prog", pat.name, 0)
    if key is not None:
        if key in binds:
            return structEq(binds[key], f)
        binds[key] = f
        return True
    if type(pat) is not type(f):
        return False
    for name in pat.__dataclass_fields__:
        a, b = getattr(pat, name), getattr(f, name)
        if isinstance(a, tuple):
            if not isinstance(b, tuple) or len(a) != len(b):
                return False
            pairs = zip(a, b)
        else:
            pairs = [(a, b)]
        for x, y in pairs:
            if isinstance(x, tuple):
                if not (isinstance(y, tuple) and len(x) == len(y)
                        and all(_match(p, q, binds) for p, q in zip(x, y))):
                    return False
            elif isinstance(x, Node):
                if not _match(x, y, binds):
                    return False
            elif x != y:
                return False
    return True


def _elaborate(ctx: Context, step: RuleApp) -> RuleApp:
    """Complete the substitution of a rule step from its premises.  This is
    convenience outside the checker: the result is checked like any other."""
    try:
        premises, _ = _rule_of(ctx, step.name)
    except _Reject:
        return step
    if len(premises) != len(step.refs) or any(r not in ctx.formulas for r in step.refs):
        return step
    binds: dict = {}
    for prem, ref in zip(premises, step.refs):
        if not _match(prem, ctx.formulas[ref], binds):
            return step
    extra = {k: v for k, v in binds.items() if k not in step.sigma}
    if not extra:
        return step
    try:
        sigma = USubst({**dict(step.sigma.items()), **extra})
    except (TypeError, ValueError):
        return step
    return RuleApp(step.name, sigma, step.refs)


_KIND = {Axiom: "axiom", US: "US", RuleApp: "rule", UR: "UR", Arith: "arith", Derived: "lemma"}


@dataclass
class CheckResult:
    verdict: Verdict
    trace: List[TraceEntry]
    usedUSonOpenPremise: bool = False


def check(script: Sequence[Step], goal: Formula, lemmas: LemmaStore = None,
          axioms: AxiomBase = None) -> CheckResult:
    ctx = Context(axioms or axiom_base(), lemmas or LemmaStore())
    trace: List[TraceEntry] = []
    if not script:
        return CheckResult(Rejected("-", Rejection("BadRef", "empty script")), trace)
    for step in script:
        kind = _KIND[type(step.body)]
        if isinstance(step.body, RuleApp):
            step = Step(step.label, _elaborate(ctx, step.body), step.line)
        if step.label in ctx.formulas:
            rej = Rejection("BadRef", f"label {step.label} used twice")
            return CheckResult(Rejected(step.label, rej), trace)
        try:
            f, is_open, note = checkStep(ctx, step.body)
        except _Reject as r:
            trace.append(TraceEntry(step.label, kind, None, str(r.rejection)))
            return CheckResult(Rejected(step.label, r.rejection), trace)
        ctx.formulas[step.label] = f
        ctx.open[step.label] = is_open
        trace.append(TraceEntry(step.label, kind, f, note))
    last = script[-1].label
    if not structEq(ctx.formulas[last], goal):
        rej = Rejection(
            "RuleShapeMismatch",
            f"last step proves {printFormula(ctx.formulas[last])}, goal is {printFormula(goal)}",
        )
        return CheckResult(Rejected(last, rej), trace, ctx.usedUSonOpenPremise)
    verdict = ProvedModuloArith(ctx.assumptions) if ctx.assumptions else Proved()
    return CheckResult(verdict, trace, ctx.usedUSonOpenPremise)


def checkProof(script: Sequence, goal: Formula, lemmas: LemmaStore = None,
               axioms: AxiomBase = None) -> Verdict:
    steps = [s if isinstance(s, Step) else Step(str(i + 1), s) for i, s in enumerate(script)]
    return check(steps, goal, lemmas, axioms).verdict


def registerLemma(store: LemmaStore, name: str, script: Sequence, goal: Formula,
                  axioms: AxiomBase = None) -> Verdict:
    if name in store:
        raise DuplicateLemma(name)
    steps = [s if isinstance(s, Step) else Step(str(i + 1), s) for i, s in enumerate(script)]
    res = check(steps, goal, store, axioms)
    if res.verdict.accepted:
        store.add(Lemma(name, goal, res.verdict, res.usedUSonOpenPremise))
    return res.verdict


# --------------------------------------------------------- script format


class ScriptError(ValueError):
    def __init__(self, path, line: int, message: str):
        self.path, self.line, self.message = path, line, message
        super().__init__(f"{path or '<script>'}:{line}: {message}")


@dataclass
class Script:
    goal: Formula
    steps: List[Step]
    lemma: Optional[str] = None
    imports: List[str] = field(default_factory=list)
    path: Optional[str] = None


def _logical_lines(text: str):
    """(line number, text) with comments dropped and indented continuation
    lines joined to the line before."""
    out: List[list] = []
    for no, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if raw[:1].isspace() and out:
            out[-1][1] += " " + stripped
        else:
            out.append([no, stripped])
    return out


def _split_braced(s: str) -> Tuple[str, str]:
    """Split a leading ``{...}`` group from the rest of ``s``."""
    if not s.startswith("{"):
        return "", s
    depth = 0
    for i, c in enumerate(s):
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return s[1:i], s[i + 1:].strip()
    raise ValueError("unbalanced braces in substitution")


_STEP = re.compile(r"(\S+)\s+(\S+)\s*(.*)")


def parseStep(label: str, kind: str, rest: str) -> ProofStep:
    k = kind.lower()
    if k == "axiom":
        if not rest:
            raise ValueError("axiom needs a name")
        return Axiom(rest)
    if k == "us":
        sig, refs = _split_braced(rest)
        if not rest.startswith("{"):
            raise ValueError("US needs a substitution in braces")
        refs = refs.split()
        if len(refs) != 1:
            raise ValueError("US takes exactly one step reference")
        return US(parseUSubst(sig), refs[0])
    if k == "rule":
        parts = rest.split(None, 1)
        if not parts:
            raise ValueError("rule needs a name")
        name, tail = parts[0], (parts[1] if len(parts) > 1 else "")
        sig, refs = _split_braced(tail.strip())
        return RuleApp(name, parseUSubst(sig) if sig.strip() else USubst(), tuple(refs.split()))
    if k == "ur":
        parts = rest.split()
        if len(parts) != 3:
            raise ValueError("UR takes two variables and one step reference")
        return UR(Renaming(var(parts[0]), var(parts[1])), parts[2])
    if k == "arith":
        return Arith(parseFormula(rest))
    if k == "lemma":
        if not rest:
            raise ValueError("lemma needs a name")
        return Derived(rest)
    raise ValueError(f"unknown step kind {kind}")


def parseScript(text: str, path: str = None) -> Script:
    goal = None
    lemma = None
    imports: List[str] = []
    steps: List[Step] = []
    for no, line in _logical_lines(text):
        try:
            head, _, tail = line.partition(":")
            if head in ("goal", "lemma", "import") and _ and not steps:
                tail = tail.strip()
                if head == "goal":
                    if goal is not None:
                        raise ValueError("second goal")
                    goal = parseFormula(tail)
                elif head == "lemma":
                    lemma = tail
                else:
                    imports.append(tail)
                continue
            m = _STEP.fullmatch(line)
            if not m:
                raise ValueError("expected '<label> <kind> ...'")
            steps.append(Step(m.group(1), parseStep(m.group(1), m.group(2), m.group(3)), no))
        except (ParseError, WellFormedError, ValueError) as e:
            raise ScriptError(path, no, str(e)) from None
    if goal is None:
        raise ScriptError(path, 0, "missing 'goal:' line")
    return Script(goal, steps, lemma, imports, path)


# ------------------------------------------------------------ file loading


def lemma_search_paths(extra: Sequence[str] = ()) -> List[Path]:
    paths = [Path(p) for p in extra]
    env = os.environ.get("DL_LEMMA_PATH", "")
    paths += [Path(p) for p in env.split(os.pathsep) if p]
    return paths


class Loader:
    """Checks script files, loading and registering their imports first."""

    def __init__(self, store: LemmaStore = None, axioms: AxiomBase = None,
                 search_paths: Sequence[str] = ()):
        self.store = store or LemmaStore()
        self.axioms = axioms or axiom_base(DEFAULT_DIMENSION_BOUND)
        self.search_paths = lemma_search_paths(search_paths)
        self._loaded: Dict[Path, Verdict] = {}
        self._loading: set = set()
        self._origin: Dict[str, Path] = {}

    def resolve(self, name: str, base: Path) -> Path:
        for d in [base] + self.search_paths:
            p = (d / name)
            if p.is_file():
                return p.resolve()
        raise ScriptError(None, 0, f"cannot find imported file {name}")

    def check_file(self, path) -> Tuple[Script, CheckResult]:
        path = Path(path).resolve()
        script = parseScript(path.read_text(encoding="utf-8"), str(path))
        for imp in script.imports:
            self.load_lemma(self.resolve(imp, path.parent))
        if script.lemma and self._origin.get(script.lemma, path) != path:
            raise ScriptError(str(path), 0, f"lemma {script.lemma} is already registered from "
                                            f"{self._origin[script.lemma]}")
        res = check(script.steps, script.goal, self.store, self.axioms)
        if script.lemma and res.verdict.accepted and script.lemma not in self.store:
            self.store.add(Lemma(script.lemma, script.goal, res.verdict, res.usedUSonOpenPremise))
            self._origin[script.lemma] = path
        return script, res

    def load_lemma(self, path: Path) -> Verdict:
        if path in self._loaded:
            return self._loaded[path]
        if path in self._loading:
            raise ScriptError(str(path), 0, "import cycle")
        self._loading.add(path)
        try:
            script, res = self.check_file(path)
        finally:
            self._loading.discard(path)
        if not script.lemma:
            raise ScriptError(str(path), 0, "imported file has no 'lemma:' line")
        if not res.verdict.accepted:
            raise ScriptError(str(path), 0, f"imported lemma {script.lemma}: {res.verdict}")
        self._loaded[path] = res.verdict
        return res.verdict
