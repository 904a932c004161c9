"""Bounded model finding by systematic backtracking search.

The decision order is layered: per-class object counts, then link sets per
association (with multiplicity propagation), then attribute values. Active
and negated invariants are evaluated in solver semantics as soon as every
association and attribute slot they depend on is decided, which prunes the
search well before full states exist. The search is exhaustive within the
configured bounds, so UNSAT is a proof that no state in the space works.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

from .config import DEFAULT_UPPER, Configuration, validate
from .evaluator import Solver, eval as eval_expr, eval_invariant
from .model import Model
from .ocl_ast import AllInstances, AttrAccess, Navigation, Var, walk
from .ocl_types import BOOLEAN, INTEGER, REAL, STRING, ClassType
from .state import SystemState, check_structure
from .values import UNDEFINED, ObjRef


class InvalidProblem(Exception):
    pass


def _self_local(body):
    """True when the expression reads nothing but `self`'s own attributes, so
    its per-instance conjunct is decided by that instance's slots alone."""
    for node in walk(body):
        if isinstance(node, (Navigation, AllInstances)):
            return False
        if isinstance(node, AttrAccess):
            if not (isinstance(node.obj, Var) and node.obj.name == "self"):
                return False
    return True


class _Timeout(Exception):
    pass


@dataclass(frozen=True)
class FinderProblem:
    model: Model
    config: Configuration
    base: Optional[SystemState] = None
    deadline: Optional[float] = None  # seconds of wall clock


@dataclass
class FinderStats:
    decisions: int = 0
    propagations: int = 0
    elapsed: float = 0.0


@dataclass
class FinderResult:
    verdict: str  # SAT | UNSAT | TIMEOUT
    state: Optional[SystemState] = None
    stats: FinderStats = field(default_factory=FinderStats)
    log: list = field(default_factory=list)


def find(problem: FinderProblem, cancel=None) -> FinderResult:
    """First satisfying state within bounds, or an exhaustive UNSAT."""
    search = _Search(problem, cancel)
    start = time.monotonic()
    try:
        for state in search.solutions():
            search.stats.elapsed = time.monotonic() - start
            return FinderResult("SAT", state, search.stats, search.log)
    except _Timeout:
        search.stats.elapsed = time.monotonic() - start
        return FinderResult("TIMEOUT", None, search.stats, search.log)
    search.stats.elapsed = time.monotonic() - start
    return FinderResult("UNSAT", None, search.stats, search.log)


def enumerate_all(problem: FinderProblem, limit: int, cancel=None) -> list:
    """Up to `limit` distinct satisfying states, in deterministic search order."""
    if limit < 1:
        raise InvalidProblem("limit must be positive")
    search = _Search(problem, cancel)
    out = []
    try:
        for state in search.solutions():
            if not any(state == s for s in out):
                out.append(state)
            if len(out) >= limit:
                break
    except _Timeout:
        pass
    return out


class _Search:
    def __init__(self, problem: FinderProblem, cancel=None):
        model, config = problem.model, problem.config
        errors = validate(config, model)
        if errors:
            raise InvalidProblem("configuration is invalid: " + "; ".join(str(e) for e in errors))
        self.model = model
        self.config = config
        self.cancel = cancel
        self.deadline = None if problem.deadline is None else time.monotonic() + problem.deadline
        self.stats = FinderStats()
        self.log = []
        self.mode = Solver(config.bitwidth)

        base = problem.base
        if base is not None:
            problems = check_structure(base, model)
            if problems:
                raise InvalidProblem("base state is invalid: " + "; ".join(str(p) for p in problems))
        self.base = base

        self.concrete = [c for c in model.classes if not c.is_abstract]
        self.bounds = {}
        for c in self.concrete:
            lo, hi = config.resolve_upper(config.class_bounds.get(c.name, (0, DEFAULT_UPPER)))
            if config.class_bounds.get(c.name, (0, DEFAULT_UPPER))[1] is DEFAULT_UPPER:
                self.log.append(f"class {c.name}: upper bound * resolved to {hi}")
            self.bounds[c.name] = (lo, hi)
        self.assoc_bounds = {}
        for a in model.associations:
            raw = config.association_bounds.get(a.name, (0, DEFAULT_UPPER))
            lo, hi = config.resolve_upper(raw)
            if raw[1] is DEFAULT_UPPER:
                self.log.append(f"association {a.name}: upper bound * resolved to {hi}")
            self.assoc_bounds[a.name] = (lo, hi)

        bw_lo = -(1 << (config.bitwidth - 1))
        bw_hi = (1 << (config.bitwidth - 1)) - 1
        self.int_domain = list(range(max(config.integer_min, bw_lo), min(config.integer_max, bw_hi) + 1))
        self.strings = config.strings()
        self.reals = sorted(config.real_values)

        if base is not None:
            self._check_base_against_bounds()

        self.required = list(config.required_links)
        for assoc, o1, o2 in self.required:
            if base is None or o1 not in base.objects or o2 not in base.objects:
                raise InvalidProblem(f"required link ({o1}, {o2}) in '{assoc}' references objects missing from the base state")

        # invariant duties: (invariant, flag) for every non-inactive invariant
        self.duties = []
        for inv in model.invariants:
            flag = config.flag_of(inv.qualified_name)
            if flag != "inactive":
                self.duties.append((inv, flag, self._deps(inv)))

    def _check_base_against_bounds(self):
        per_class = {}
        for name, (cls, attrs) in self.base.objects.items():
            per_class[cls] = per_class.get(cls, 0) + 1
        for cls, n in per_class.items():
            lo, hi = self.bounds.get(cls, (0, 0))
            if n > hi:
                raise InvalidProblem(f"base state has {n} objects of '{cls}', above the maximum {hi}")
        per_assoc = {}
        for a, _ in self.base.links:
            per_assoc[a] = per_assoc.get(a, 0) + 1
        for a, n in per_assoc.items():
            lo, hi = self.assoc_bounds.get(a, (0, 0))
            if n > hi:
                raise InvalidProblem(f"base state has {n} links of '{a}', above the maximum {hi}")

    def _deps(self, inv):
        """(association names, (class, attr) pairs) the invariant reads."""
        assocs, attrs = set(), set()
        for node in walk(inv.body):
            if isinstance(node, Navigation):
                src_t = node.obj.standard_type
                base = src_t.elem if src_t.is_collection() else src_t
                nav = self.model.resolve_navigation(base.name, node.role)
                if nav is not None:
                    assocs.add(nav[0].name)
            elif isinstance(node, AttrAccess):
                src_t = node.obj.standard_type
                base = src_t.elem if src_t.is_collection() else src_t
                if isinstance(base, ClassType):
                    attrs.add((base.name, node.attr))
        return assocs, attrs

    # -- decision plumbing --------------------------------------------------

    def tick(self):
        self.stats.decisions += 1
        if self.cancel is not None and getattr(self.cancel, "is_set", lambda: False)():
            raise _Timeout()
        if self.deadline is not None and time.monotonic() >= self.deadline:
            raise _Timeout()

    def _state(self):
        return SystemState({n: (c, dict(a)) for n, (c, a) in self.objects.items()},
                           frozenset(self.links))

    def _invariant_ok(self, inv, flag):
        self.stats.propagations += 1
        result = eval_invariant(inv, self._state(), self.mode, self.model)
        return result.holds if flag == "active" else not result.holds

    def _object_ok(self, inv, obj):
        self.stats.propagations += 1
        v = eval_expr(inv.body, self._state(), {"self": ObjRef(obj)}, self.mode, self.model)
        return v is True

    # -- stages ---------------------------------------------------------------

    def solutions(self):
        count_ranges = []
        for c in self.concrete:
            lo, hi = self.bounds[c.name]
            base_n = sum(1 for _, (cls, _a) in (self.base.objects.items() if self.base else ()) if cls == c.name)
            lo = max(lo, base_n)
            if base_n > hi:
                return
            count_ranges.append(range(lo, hi + 1))
        for counts in itertools.product(*count_ranges):
            self.tick()
            yield from self._with_counts(dict(zip((c.name for c in self.concrete), counts)))

    def _with_counts(self, counts):
        objects = {}
        if self.base is not None:
            for name, (cls, attrs) in sorted(self.base.objects.items()):
                objects[name] = (cls, dict(attrs))
        taken = set(objects)
        for c in self.concrete:
            have = sum(1 for _, (cls, _a) in objects.items() if cls == c.name)
            i = 1
            while have < counts[c.name]:
                name = f"{c.name.lower()}{i}"
                i += 1
                if name in taken:
                    continue
                taken.add(name)
                objects[name] = (c.name, {})
                have += 1
        self.objects = objects
        self.links = set(self.base.links) if self.base else set()
        for assoc, o1, o2 in self.required:
            self.links.add((assoc, (o1, o2)))

        # attribute slots in canonical order; base-pinned slots are skipped
        slots = []
        class_order = {c.name: i for i, c in enumerate(self.model.classes)}
        for name in sorted(objects, key=lambda n: (class_order[objects[n][0]], n)):
            cls, attrs = objects[name]
            for a in self.model.all_attributes(cls):
                pinned = attrs.get(a.name, UNDEFINED) is not UNDEFINED
                if not pinned:
                    slots.append((name, a))
        self.slots = slots

        self.schedule_assoc, self.schedule_slot, self.schedule_obj, immediate = self._schedule(slots)

        for inv, flag, obj in immediate:
            ok = self._object_ok(inv, obj) if obj is not None else self._invariant_ok(inv, flag)
            if not ok:
                return
        yield from self._assoc_stage(0)

    def _schedule(self, slots):
        """For every duty, the point where its last dependency completes:
        either a slot index, an association index, or immediately."""
        assoc_names = [a.name for a in self.model.associations]
        slot_index = {}  # (object, attr name) -> slot position
        for i, (name, attr) in enumerate(slots):
            slot_index[(name, attr.name)] = i

        by_assoc = {i: [] for i in range(len(assoc_names))}
        by_slot = {i: [] for i in range(len(slots))}
        per_object = {i: [] for i in range(len(slots))}
        immediate = []
        for inv, flag, (dep_assocs, dep_attrs) in self.duties:
            if flag == "active" and not dep_assocs and dep_attrs and _self_local(inv.body):
                # the conjunct for one object depends on that object's own
                # slots only, so each instance can be checked the moment its
                # last relevant slot is assigned
                scheduled = False
                for name in self.objects:
                    if not self.model.conforms_to(self.objects[name][0], inv.context_class):
                        continue
                    last = max((slot_index[(name, attr)] for (_c, attr) in dep_attrs
                                if (name, attr) in slot_index), default=-1)
                    if last >= 0:
                        per_object[last].append((inv, name))
                    else:
                        immediate.append((inv, flag, name))  # fully pinned object
                continue
            last_slot = -1
            for (cls, attr) in dep_attrs:
                for name in self.objects:
                    if self.model.conforms_to(self.objects[name][0], cls):
                        i = slot_index.get((name, attr))
                        if i is not None:
                            last_slot = max(last_slot, i)
            if last_slot >= 0:
                by_slot[last_slot].append((inv, flag))
                continue
            last_assoc = max((assoc_names.index(a) for a in dep_assocs if a in assoc_names), default=-1)
            if last_assoc >= 0:
                by_assoc[last_assoc].append((inv, flag))
            else:
                immediate.append((inv, flag, None))
        return by_assoc, by_slot, per_object, immediate

    def _assoc_stage(self, k):
        if k == len(self.model.associations):
            yield from self._attr_stage(0)
            return
        assoc = self.model.associations[k]
        lo, hi = self.assoc_bounds[assoc.name]
        end0, end1 = assoc.ends
        xs = sorted(n for n in self.objects if self.model.conforms_to(self.objects[n][0], end0.cls))
        ys = sorted(n for n in self.objects if self.model.conforms_to(self.objects[n][0], end1.cls))
        pairs = [(x, y) for x in xs for y in ys]
        forced = {pair for a, pair in self.links if a == assoc.name}
        if any(x not in xs or y not in ys for x, y in forced):
            return

        deg0 = {x: 0 for x in xs}
        deg1 = {y: 0 for y in ys}
        for (x, y) in forced:
            deg0[x] += 1
            deg1[y] += 1
        count = len(forced)
        if count > hi:
            return

        # per-object link counts: end0 objects are bounded by end1's multiplicity
        up0 = end1.multiplicity.upper
        lo0 = end1.multiplicity.lower
        up1 = end0.multiplicity.upper
        lo1 = end0.multiplicity.lower

        remaining0 = {x: 0 for x in xs}
        remaining1 = {y: 0 for y in ys}
        open_pairs = [p for p in pairs if p not in forced]
        for (x, y) in open_pairs:
            remaining0[x] += 1
            remaining1[y] += 1

        search = self

        def rec(i, count):
            search.tick()
            if i == len(open_pairs):
                search.stats.propagations += 1
                if count < lo:
                    return
                if any(deg0[x] < lo0 for x in xs) or any(deg1[y] < lo1 for y in ys):
                    return
                for inv, flag in search.schedule_assoc[k]:
                    if not search._invariant_ok(inv, flag):
                        return
                yield from search._assoc_stage(k + 1)
                return
            x, y = open_pairs[i]
            remaining0[x] -= 1
            remaining1[y] -= 1

            # exclude branch, unless lower bounds become unreachable
            search.stats.propagations += 1
            feasible = (count + len(open_pairs) - i - 1 >= lo
                        and deg0[x] + remaining0[x] >= lo0
                        and deg1[y] + remaining1[y] >= lo1)
            if feasible:
                yield from rec(i + 1, count)

            # include branch
            if count < hi and (up0 is None or deg0[x] < up0) and (up1 is None or deg1[y] < up1):
                deg0[x] += 1
                deg1[y] += 1
                search.links.add((assoc.name, (x, y)))
                yield from rec(i + 1, count + 1)
                search.links.discard((assoc.name, (x, y)))
                deg0[x] -= 1
                deg1[y] -= 1

            remaining0[x] += 1
            remaining1[y] += 1

        yield from rec(0, count)

    def _attr_domain(self, cls, attr):
        override = self.config.attribute_domains.get((cls, attr.name))
        for dep_cls in [cls] + self.model.ancestors(cls):
            if (dep_cls, attr.name) in self.config.attribute_domains:
                override = self.config.attribute_domains[(dep_cls, attr.name)]
                break
        if override is not None:
            if override[0] == "range":
                bw_lo = -(1 << (self.config.bitwidth - 1))
                bw_hi = (1 << (self.config.bitwidth - 1)) - 1
                lo = override[1] if override[1] is not None else self.config.integer_min
                hi = override[2] if override[2] is not None else self.config.integer_max
                return list(range(max(lo, bw_lo), min(hi, bw_hi) + 1))
            return sorted(override[1], key=lambda v: (isinstance(v, str), v))
        t = attr.type
        if t == INTEGER:
            return self.int_domain
        if t == STRING:
            return self.strings
        if t == BOOLEAN:
            return [False, True]
        if t == REAL:
            return self.reals
        if isinstance(t, ClassType):
            return [ObjRef(n) for n in sorted(self.objects)
                    if self.model.conforms_to(self.objects[n][0], t.name)]
        raise InvalidProblem(f"cannot enumerate values for attribute type {t}")

    def _attr_stage(self, i):
        if i == len(self.slots):
            yield self._state()
            return
        name, attr = self.slots[i]
        cls = self.objects[name][0]
        for v in self._attr_domain(cls, attr):
            self.tick()
            self.objects[name][1][attr.name] = v
            ok = all(self._object_ok(inv, obj) for inv, obj in self.schedule_obj[i])
            if ok:
                for inv, flag in self.schedule_slot[i]:
                    if not self._invariant_ok(inv, flag):
                        ok = False
                        break
            if ok:
                yield from self._attr_stage(i + 1)
            del self.objects[name][1][attr.name]
