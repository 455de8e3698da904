"""Scenario files: validation, name resolution, task execution and report assembly.

A scenario is one JSON object::

    {
      "ring": "Z",
      "seed": 0,
      "bounds": {"stages": 10, "enumeration": 1000000, "pairs": 50},
      "declarations": {
        "formulas": {"phi": "exists y (x = 2*y)"},
        "modules": {"M": "R/4 + R/2"},
        "chains": {"bass": {"template": "exists y (x = pow(2,i)*y)", "stages": 12}}
      },
      "tasks": [{"kind": "implies", "left": "phi", "right": "x = x"}]
    }

Formula, module and chain fields of a task name a declaration or give the
text inline.  Tasks run in the listed order; a failing task is reported
with verdict ``"error"`` and the run continues.
"""

from __future__ import annotations

import copy
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .. import __version__
from ..bass import IndexedFamily, PureFreeTruncation, build_system, ml_failure_report, push
from ..chains import PpChain, lattice_strictness, materialize, perfect_probe, stabilizes_in
from ..eqprobe import (
    ClosedThrough,
    Distinguished,
    InfiniteEvidence,
    InvariantSignature,
    elem_equiv_probe,
    enumerate_pairs,
    pair_index,
)
from ..errors import ChainStabilized, NotDescending, PpError, TooLarge
from ..exactalg import RingDescriptor, Submodule, element_to_json, quotient_order
from ..fpmod import FpModule
from ..ppcalc import PointedModule, PpFormula, evaluate, free_realization, implies
from .dsl import parse_formula
from .report import (
    REPORT_VERSION,
    chain_certificate,
    encode_matrix,
    encode_vectors,
    number,
    path_certificate,
)
from .specs import module_of, parse_module_spec

TASK_KINDS = (
    "implies",
    "evaluate",
    "free-realization",
    "chain-analyze",
    "bass-build",
    "eq-probe",
    "perfect-probe",
)

# fields each task kind must carry, and which declaration table they resolve against
_REQUIRED = {
    "implies": {"left": "formulas", "right": "formulas"},
    "evaluate": {"formula": "formulas", "module": "modules"},
    "free-realization": {"formula": "formulas"},
    "chain-analyze": {"chain": "chains"},
    "bass-build": {"chain": "chains"},
    "eq-probe": {"left": "modules", "right": "modules"},
    "perfect-probe": {},
}
_OPTIONAL = {"chain-analyze": {"module": "modules"}}

_ORACLE_KINDS = ("implies", "evaluate", "free-realization")

DEFAULT_BOUNDS = {"stages": 10, "enumeration": 10**6, "pairs": 50}
PERFECT_PROBE_STAGES = 32


class ScenarioError(ValueError):
    """The scenario is not well formed; nothing was run."""


@dataclass
class Options:
    seed: int = 0
    stage_bound: Optional[int] = None
    enum_bound: Optional[int] = None
    with_oracle: bool = False


@dataclass
class Context:
    ring: RingDescriptor
    declarations: dict
    bounds: dict
    seed: int
    with_oracle: bool = False
    _cache: dict = field(default_factory=dict)

    def formula(self, ref: str) -> PpFormula:
        text = self.declarations.get("formulas", {}).get(ref, ref)
        key = ("formula", text)
        if key not in self._cache:
            self._cache[key] = parse_formula(text, self.ring)
        return self._cache[key]

    def module(self, ref):
        spec = self.declarations.get("modules", {}).get(ref, ref) if isinstance(ref, str) else ref
        return parse_module_spec(spec, self.ring)

    def chain(self, ref) -> tuple:
        """The chain and its declared stage count (or ``None``)."""
        decl = self.declarations.get("chains", {}).get(ref, ref) if isinstance(ref, str) else ref
        if isinstance(decl, str):
            decl = {"template": decl}
        if "template" in decl:
            chain = PpChain.from_template(decl["template"], self.ring, decl.get("variables"))
        elif "formulas" in decl:
            chain = PpChain.from_list([self.formula(t) for t in decl["formulas"]])
        else:
            raise ScenarioError("a chain needs a template or a formula list")
        stages = decl.get("stages")
        if stages is None and chain.length is not None:
            stages = chain.length - 1
        return chain, stages


# -- validation -------------------------------------------------------------------


def _check(cond: bool, message: str):
    if not cond:
        raise ScenarioError(message)


def validate(scenario: dict) -> None:
    """Structural checks and name resolution; raises :class:`ScenarioError`."""
    _check(isinstance(scenario, dict), "a scenario is a JSON object")
    unknown = set(scenario) - {"ring", "seed", "bounds", "declarations", "tasks", "description"}
    _check(not unknown, f"unknown scenario fields {sorted(unknown)}")
    _check(isinstance(scenario.get("ring", "Z"), str), "ring must be a descriptor string")
    try:
        RingDescriptor.parse(scenario.get("ring", "Z"))
    except (ValueError, RuntimeError) as exc:
        raise ScenarioError(str(exc)) from None
    _check(isinstance(scenario.get("seed", 0), int), "seed must be an integer")
    bounds = scenario.get("bounds", {})
    _check(isinstance(bounds, dict), "bounds must be an object")
    for k, v in bounds.items():
        _check(k in DEFAULT_BOUNDS, f"unknown bound {k!r}")
        _check(isinstance(v, int) and v >= 0, f"bound {k!r} must be a non-negative integer")
    decls = scenario.get("declarations", {})
    _check(isinstance(decls, dict), "declarations must be an object")
    for table in decls:
        _check(table in ("formulas", "modules", "chains"), f"unknown declaration table {table!r}")
        _check(isinstance(decls[table], dict), f"declarations.{table} must be an object")
    tasks = scenario.get("tasks", [])
    _check(isinstance(tasks, list), "tasks must be a list")
    for n, task in enumerate(tasks):
        _check(isinstance(task, dict), f"task {n} is not an object")
        kind = task.get("kind")
        _check(kind in TASK_KINDS, f"task {n}: unknown kind {kind!r}")
        for fld in _REQUIRED[kind]:
            _check(fld in task, f"task {n} ({kind}): missing field {fld!r}")
        if "ring" in task:
            try:
                RingDescriptor.parse(task["ring"])
            except (ValueError, RuntimeError) as exc:
                raise ScenarioError(f"task {n}: {exc}") from None


def _resolve(task: dict, ctx: Context):
    """Parse every reference of the task; errors surface before anything runs."""
    kind = task["kind"]
    fields = {**_REQUIRED[kind], **_OPTIONAL.get(kind, {})}
    out = {}
    for fld, table in fields.items():
        if fld not in task:
            continue
        ref = task[fld]
        if table == "formulas":
            out[fld] = ctx.formula(ref)
        elif table == "modules":
            out[fld] = ctx.module(ref)
        else:
            out[fld] = ctx.chain(ref)
    return out


# -- task executors ---------------------------------------------------------------


def _oracle_guard(fn: Callable) -> dict:
    try:
        return fn()
    except TooLarge as exc:
        return {"skipped": str(exc)}


def compare_evaluation(phi: PpFormula, module: FpModule) -> bool:
    """Whether ``evaluate`` and the brute-force solution set describe the same subgroup."""
    from ..oracle import evaluate_brute

    lattice = evaluate(phi, module)
    brute = evaluate_brute(phi, module)
    rel = evaluate(PpFormula.zero(module.ring, phi.arity), module)
    if quotient_order(lattice, rel) != len(brute):
        return False
    return all(v in lattice for v in brute.coordinate_vectors())


def run_implies(ctx: Context, task: dict, obj: dict) -> dict:
    phi, psi = obj["left"], obj["right"]
    verdict = implies(phi, psi)
    fr = free_realization(phi)
    cert = {
        "type": "implication" if verdict else "counterexample",
        "premise": phi.to_json(),
        "conclusion": psi.to_json(),
        "realization": fr.to_json(),
    }
    out = {
        "verdict": "true" if verdict else "false",
        "certificates": [cert],
        "stage_data": {"left": str(phi), "right": str(psi)},
    }
    if ctx.with_oracle and ctx.ring.is_finite:
        from ..oracle import implies_brute

        out["oracle"] = _oracle_guard(lambda: {"agrees": implies_brute(phi, psi) == verdict})
    return out


def run_evaluate(ctx: Context, task: dict, obj: dict) -> dict:
    phi, module = obj["formula"], module_of(obj["module"])
    lattice = evaluate(phi, module)
    rel = evaluate(PpFormula.zero(ctx.ring, phi.arity), module)
    order = quotient_order(lattice, rel)
    index = quotient_order(Submodule.full(ctx.ring, phi.arity * module.num_gens), lattice)
    out = {
        "verdict": f"|phi(M)| = {number(order)}",
        "certificates": [
            {
                "type": "evaluation",
                "formula": phi.to_json(),
                "module": module.to_json(),
                "generators": encode_vectors(lattice.basis),
            }
        ],
        "stage_data": {
            "formula": str(phi),
            "order": number(order),
            "index_in_power": number(index),
            "generators": encode_vectors(lattice.basis),
        },
    }
    if ctx.with_oracle and ctx.ring.is_finite:
        if module.order() ** phi.arity > ctx.bounds["enumeration"]:
            out["oracle"] = {"skipped": "beyond the enumeration bound"}
        else:
            out["oracle"] = _oracle_guard(lambda: {"agrees": compare_evaluation(phi, module)})
    return out


def _presentation(p: PointedModule) -> dict:
    return {
        **p.to_json(),
        "invariant_factors": [element_to_json(a) for a in p.module.invariant_factors],
        "order": number(p.module.order()),
    }


def run_free_realization(ctx: Context, task: dict, obj: dict) -> dict:
    phi = obj["formula"]
    fr = free_realization(phi)
    out = {
        "verdict": "realized",
        "certificates": [{"type": "free-realization", "formula": phi.to_json(), "realization": fr.to_json()}],
        "stage_data": {"formula": str(phi), "realization": _presentation(fr)},
    }
    if ctx.with_oracle and ctx.ring.is_finite:
        from ..oracle import brute_free_realization

        def check():
            fm, _ = brute_free_realization(phi)
            return {"agrees": fm.order == fr.module.order()}

        out["oracle"] = _oracle_guard(check)
    return out


def _stages(task: dict, declared: Optional[int], ctx: Context) -> int:
    if "stages" in task:
        return int(task["stages"])
    if declared is not None:
        return int(declared)
    return ctx.bounds["stages"]


def _not_descending(chain: PpChain, exc: NotDescending) -> dict:
    i = exc.index
    upper, lower = chain.formula(i), chain.formula(i + 1)
    certs = []
    if exc.witness is not None:
        certs.append(
            {
                "type": "counterexample",
                "premise": lower.to_json(),
                "conclusion": upper.to_json(),
                "realization": exc.witness.to_json(),
            }
        )
    return {
        "verdict": f"NotDescending({i})",
        "certificates": certs,
        "stage_data": {"upper": str(upper), "lower": str(lower)},
    }


def run_chain_analyze(ctx: Context, task: dict, obj: dict) -> dict:
    chain, declared = obj["chain"]
    k = _stages(task, declared, ctx)
    try:
        chain = materialize(chain, k)
    except NotDescending as exc:
        return _not_descending(chain, exc)
    if "module" in obj:
        report = stabilizes_in(chain, module_of(obj["module"]), k)
    else:
        report = lattice_strictness(chain, k)
    strict = {c.index for c in report.certificates if c.strict}
    return {
        "verdict": str(report.verdict),
        "certificates": [chain_certificate(c) for c in report.certificates],
        "stage_data": {
            "stages": [
                {"stage": i, "formula": str(chain.formula(i)), "strict_next": i in strict if i < k else None}
                for i in range(k + 1)
            ]
        },
    }


def run_bass_build(ctx: Context, task: dict, obj: dict) -> dict:
    chain, declared = obj["chain"]
    k = _stages(task, declared, ctx)
    try:
        chain = materialize(chain, k)
    except NotDescending as exc:
        return _not_descending(chain, exc)
    system = build_system(chain, k, task.get("tiebreak", "first"))
    certs = []
    for i, p in enumerate(system.stages):
        certs.append({"type": "free-realization", "formula": chain.formula(i).to_json(), "realization": p.to_json()})
    for i, g in enumerate(system.connectors):
        certs.append(path_certificate(system.stages[i:i + 2], [g.matrix], f"connector {i}"))
    data = {
        "stages": [{"stage": i, "formula": str(chain.formula(i)), **_presentation(p)} for i, p in enumerate(system.stages)],
        "connectors": [encode_matrix(g.matrix) for g in system.connectors],
    }
    try:
        ev = ml_failure_report(system, k)
    except ChainStabilized as exc:
        data["evidence"] = None
        report = lattice_strictness(chain, k)
        certs.extend(chain_certificate(c) for c in report.certificates)
        return {"verdict": f"ChainStabilized({exc.index})", "certificates": certs, "stage_data": data}
    certs.extend(chain_certificate(c) for c in ev.strictness.certificates)
    base = system.distinguished(0)
    for i, ans in enumerate(ev.satisfaction):
        if hasattr(ans, "stage"):
            pushed = push(base, ans.stage)
            certs.append(
                {
                    "type": "satisfies",
                    "label": f"f_0(a_0) satisfies phi_{i} at stage {ans.stage}",
                    "pointed": PointedModule(system.stages[ans.stage].module, pushed.value).to_json(),
                    "formula": chain.formula(i).to_json(),
                }
            )
    data["evidence"] = {
        "complete": ev.complete,
        "statement": ev.statement,
        "equalities": [str(a) for a in ev.equalities],
        "satisfaction": [str(a) for a in ev.satisfaction],
        "strictness": str(ev.strictness.verdict),
    }
    word = "complete" if ev.complete else "incomplete"
    return {"verdict": f"ml-failure evidence {word} through stage {k}", "certificates": certs, "stage_data": data}


def _pair_spec(task: dict, ctx: Context) -> dict:
    spec = task.get("pairs", f"auto:{ctx.seed},{ctx.bounds['pairs']}")
    if isinstance(spec, str):
        if not spec.startswith("auto:"):
            raise ScenarioError(f"pair spec {spec!r} is not of the form auto:<seed>,<count>")
        seed, count = spec[len("auto:"):].split(",")
        spec = {"seed": int(seed), "count": int(count)}
    return {"seed": ctx.seed, "count": ctx.bounds["pairs"], "arity": 1, **spec}


def _index_value(v):
    if isinstance(v, InfiniteEvidence):
        return {"value": "inf", "opens_in_member": v.member}
    if isinstance(v, ClosedThrough):
        return {"value": 1, "closed_through": v.bound}
    return {"value": number(v)}


def _index_certificates(source, pair, value) -> list:
    if isinstance(source, (FpModule, PureFreeTruncation)):
        m = module_of(source)
    elif isinstance(source, IndexedFamily) and isinstance(value, InfiniteEvidence):
        m = source.member(value.member)
    else:
        return []
    return [
        {
            "type": "pair-index",
            "top": pair.top.to_json(),
            "bottom": pair.bottom.to_json(),
            "module": m.to_json(),
            "value": number(pair_index(pair, m)),
        }
    ]


def run_eq_probe(ctx: Context, task: dict, obj: dict) -> dict:
    spec = _pair_spec(task, ctx)
    pairs = list(
        enumerate_pairs(ctx.ring, arity_max=spec["arity"], count=spec["count"], seed=spec["seed"])
    )
    probe_bound = _stages(task, None, ctx)
    left = InvariantSignature(obj["left"], probe_bound)
    right = InvariantSignature(obj["right"], probe_bound)
    result = elem_equiv_probe(left, right, pairs)
    data = {"pairs": spec}
    if isinstance(result, Distinguished):
        pair = result.pair
        data.update(
            {
                "pair": str(pair),
                "pair_number": pairs.index(pair),
                "left": _index_value(result.left),
                "right": _index_value(result.right),
            }
        )
        certs = _index_certificates(obj["left"], pair, result.left) + _index_certificates(obj["right"], pair, result.right)
        return {"verdict": "Distinguished", "certificates": certs, "stage_data": data}
    return {"verdict": f"IndistinguishableOn({result.count})", "certificates": [], "stage_data": data}


def run_perfect_probe(ctx: Context, task: dict, obj: dict) -> dict:
    bound = int(task.get("stages", ctx.bounds.get("perfect_stages", PERFECT_PROBE_STAGES)))
    rep = perfect_probe(ctx.ring, bound)
    data = {
        "exhaustive": rep.exhaustive,
        "chains_checked": rep.chains_checked,
        "max_strict_steps": rep.max_strict_steps,
        "step_limit": rep.step_limit,
        "all_stabilize": rep.all_stabilize,
    }
    certs = []
    if rep.evidence is not None:
        data["evidence_verdict"] = str(rep.evidence.verdict)
        certs = [chain_certificate(c) for c in rep.evidence.certificates]
    return {"verdict": rep.message, "certificates": certs, "stage_data": data}


EXECUTORS = {
    "implies": run_implies,
    "evaluate": run_evaluate,
    "free-realization": run_free_realization,
    "chain-analyze": run_chain_analyze,
    "bass-build": run_bass_build,
    "eq-probe": run_eq_probe,
    "perfect-probe": run_perfect_probe,
}


# -- scenario driver --------------------------------------------------------------


@dataclass
class RunResult:
    report: dict
    exit_code: int


def _error(exc: Exception) -> dict:
    return {
        "verdict": "error",
        "certificates": [],
        "stage_data": {},
        "error": {"type": type(exc).__name__, "message": str(exc)},
    }


def run_scenario_data(scenario: dict, options: Optional[Options] = None) -> RunResult:
    """Run an already loaded scenario.  Raises :class:`ScenarioError` if it is malformed."""
    options = options or Options()
    validate(scenario)
    seed = scenario.get("seed", options.seed)
    bounds = {**DEFAULT_BOUNDS, **scenario.get("bounds", {})}
    if options.stage_bound is not None:
        bounds["stages"] = options.stage_bound
        bounds["perfect_stages"] = options.stage_bound
    if options.enum_bound is not None:
        bounds["enumeration"] = options.enum_bound
    ring_text = scenario.get("ring", "Z")
    decls = scenario.get("declarations", {})
    contexts = {}

    def context(text: str) -> Context:
        if text not in contexts:
            contexts[text] = Context(RingDescriptor.parse(text), decls, bounds, seed, options.with_oracle)
        return contexts[text]

    # resolve every task before running any of them
    resolved = []
    for task in scenario.get("tasks", []):
        ctx = context(task.get("ring", ring_text))
        try:
            resolved.append((task, ctx, _resolve(task, ctx), None))
        except ScenarioError:
            raise
        except (PpError, ValueError, TypeError, KeyError, OSError) as exc:
            resolved.append((task, ctx, None, exc))

    tasks_out = []
    failed = False
    for task, ctx, obj, err in resolved:
        start = time.perf_counter()
        if err is None:
            try:
                result = EXECUTORS[task["kind"]](ctx, task, obj)
            except ScenarioError:
                raise
            except (PpError, ValueError, TypeError, ArithmeticError, RuntimeError, IndexError) as exc:
                result = _error(exc)
        else:
            result = _error(err)
        if ctx.with_oracle and not ctx.ring.is_finite and task["kind"] in _ORACLE_KINDS and result["verdict"] != "error":
            result["oracle"] = {"skipped": "the oracle enumerates finite rings only"}
        failed |= result["verdict"] == "error"
        entry = {"kind": task["kind"], "inputs": copy.deepcopy(task)}
        if "ring" in task:
            entry["ring"] = task["ring"]
        entry.update(result)
        entry["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
        tasks_out.append(entry)
    report = {
        "version": REPORT_VERSION,
        "tool": {"name": "ppbass", "version": __version__},
        "ring": ring_text,
        "seed": seed,
        "bounds": {k: v for k, v in bounds.items() if k in DEFAULT_BOUNDS},
        "tasks": tasks_out,
    }
    return RunResult(report, 1 if failed else 0)


def load_scenario(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON ({exc})") from None


def run_scenario(path, options: Optional[Options] = None) -> dict:
    """The report of the scenario file at ``path``."""
    return run_scenario_data(load_scenario(path), options).report


def schema_path(name: str = "report") -> Path:
    """The shipped JSON schema, ``name`` being ``"report"`` or ``"scenario"``."""
    return Path(__file__).with_name("schemas") / f"{name}-v{REPORT_VERSION}.schema.json"


__all__ = [
    "DEFAULT_BOUNDS",
    "EXECUTORS",
    "Options",
    "RunResult",
    "ScenarioError",
    "TASK_KINDS",
    "compare_evaluation",
    "load_scenario",
    "run_scenario",
    "run_scenario_data",
    "schema_path",
    "validate",
]
