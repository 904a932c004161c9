"""Verification tasks on top of the finder: consistency and independence.

Both tasks run a bounded search, so every verdict is qualified "within
bounds": UNSAT proves absence only inside the configured search space.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .config import Configuration
from .evaluator import Solver, eval_invariant
from .finder import FinderProblem, FinderResult, find
from .model import Model
from .state import SystemState, state_to_obj


@dataclass(frozen=True)
class TaskReport:
    task: str  # 'consistency' | 'independence'
    outcome: str  # 'holds' | 'fails' | 'inconclusive'
    details: str
    invariant: Optional[str] = None  # independence target
    witness: Optional[SystemState] = None
    result: Optional[FinderResult] = field(default=None, compare=False)

    def to_obj(self) -> dict:
        obj = {"task": self.task, "outcome": self.outcome, "details": self.details}
        if self.invariant is not None:
            obj["invariant"] = self.invariant
        if self.witness is not None:
            obj["witness"] = state_to_obj(self.witness)
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), indent=2)

    def render(self) -> str:
        head = self.task if self.invariant is None else f"{self.task} {self.invariant}"
        return f"{head}: {self.details}"


def _all_active(config: Configuration, model: Model) -> Configuration:
    cfg = config.clone()
    for inv in model.invariants:
        cfg.invariant_flags[inv.qualified_name] = "active"
    return cfg


def check_consistency(model: Model, config: Configuration,
                      base: SystemState = None, deadline: float = None,
                      cancel=None) -> TaskReport:
    """Search for a state satisfying every invariant; SAT means consistent."""
    cfg = _all_active(config, model)
    res = find(FinderProblem(model, cfg, base, deadline), cancel)
    if res.verdict == "SAT":
        n, m = len(res.state.objects), len(res.state.links)
        return TaskReport("consistency", "holds",
                          f"consistent within bounds: witness with {n} objects and {m} links",
                          witness=res.state, result=res)
    if res.verdict == "UNSAT":
        return TaskReport("consistency", "fails",
                          "inconsistent within bounds: no satisfying state exists "
                          "in the configured search space", result=res)
    return TaskReport("consistency", "inconclusive",
                      "inconclusive: search timed out before covering the bounds",
                      result=res)


def check_independence(model: Model, config: Configuration, invariant: str,
                       base: SystemState = None, deadline: float = None,
                       cancel=None) -> TaskReport:
    """Negate one invariant, keep the rest active, and search. A witness
    satisfies all others while violating the target, proving it is not
    implied by them within bounds."""
    inv = model.get_invariant(invariant)
    if inv is None:
        raise ValueError(f"unknown invariant '{invariant}'")
    cfg = _all_active(config, model)
    cfg.invariant_flags[invariant] = "negated"
    res = find(FinderProblem(model, cfg, base, deadline), cancel)
    if res.verdict == "SAT":
        return TaskReport("independence", "holds",
                          f"'{invariant}' is independent within bounds: "
                          "witness satisfies the other invariants and violates it",
                          invariant=invariant, witness=res.state, result=res)
    if res.verdict == "UNSAT":
        details = (f"'{invariant}' is not independent within bounds: "
                   "every state satisfying the other invariants also satisfies it")
        uppers = [cfg.resolve_upper(cfg.class_bounds.get(c, (0, 0)))[1]
                  for c in model.concrete_descendants(inv.context_class)]
        if sum(uppers) == 0:
            details += (" (vacuously: the context class is bounded to zero instances, "
                        "so no violator can exist)")
        return TaskReport("independence", "fails", details, invariant=invariant, result=res)
    return TaskReport("independence", "inconclusive",
                      "inconclusive: search timed out before covering the bounds",
                      invariant=invariant, result=res)


def run_all_independence(model: Model, config: Configuration,
                         deadline: float = None, max_workers: int = 4) -> list:
    """One independence report per invariant, in declaration order. Checks are
    independent finder runs and execute concurrently."""
    names = [inv.qualified_name for inv in model.invariants]
    if not names:
        return []
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(check_independence, model, config, n, None, deadline)
                   for n in names]
        return [f.result() for f in futures]


def verify_witness(report: TaskReport, model: Model, config: Configuration) -> bool:
    """Re-evaluate a report's witness under solver semantics; True when the
    witness actually supports the claimed outcome."""
    if report.witness is None:
        return False
    mode = Solver(config.bitwidth)
    for inv in model.invariants:
        flag = config.flag_of(inv.qualified_name)
        r = eval_invariant(inv, report.witness, mode, model)
        if report.task == "independence" and inv.qualified_name == report.invariant:
            if r.holds:
                return False
        elif flag != "inactive" and not r.holds:
            return False
    return True
