"""OCL evaluation over a system state in two semantic modes.

Standard mode follows textbook OCL for the supported subset: collect over a
Set yields a duplicate-preserving Bag, `sum` counts multiplicity, and a Set
never equals a Bag. Solver mode mimics the bounded search semantics: every
Bag is collapsed to a Set at the node producing it, and integer arithmetic
wraps into the signed two's-complement range of the configured bitwidth.

Domain problems (division by zero, navigation over an absent 0..1 link)
yield the undefined value; boolean connectives are lenient, all other
operations are strict in undefined.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Invariant, Model
from .ocl_ast import (AllInstances, AttrAccess, Binary, BoolLit, CollectionLit,
                      CollectionOp, IntLit, Iterator, Navigation, OclAsSet,
                      OclAsType, OclExpr, OclIsKindOf, RealLit, StringLit,
                      Unary, Var)
from .state import SystemState
from .values import (UNDEFINED, BagVal, ObjRef, SetVal, as_set, is_collection,
                     value_key)


@dataclass(frozen=True)
class Standard:
    pass


@dataclass(frozen=True)
class Solver:
    bitwidth: int = 8

    def __post_init__(self):
        if self.bitwidth < 1:
            raise ValueError("bitwidth must be at least 1")


STANDARD = Standard()

_MISSING = object()


def _restore(env, name, saved):
    if saved is _MISSING:
        env.pop(name, None)
    else:
        env[name] = saved


class EvalError(Exception):
    """Internal contract breach: the expression was not typechecked."""


def wrap_signed(v: int, bitwidth: int) -> int:
    """Two's-complement wraparound of `v` into the signed bitwidth range."""
    m = 1 << bitwidth
    return ((v + (m >> 1)) % m) - (m >> 1)


def eval(expr: OclExpr, state: SystemState, bindings: dict, mode, model: Model):
    """Evaluate a typechecked expression; pure, never raises on domain issues."""
    if expr.standard_type is None:
        raise EvalError(f"expression was not typechecked: {expr.source_text()}")
    return _Evaluator(state, mode, model).eval(expr, dict(bindings))


class _Evaluator:
    def __init__(self, state, mode, model):
        self.state = state
        self.mode = mode
        self.model = model
        self.solver = isinstance(mode, Solver)

    def finish(self, v):
        """Apply solver-mode normalization at the producing node."""
        if self.solver:
            if isinstance(v, BagVal):
                return as_set(v)
            if isinstance(v, int) and not isinstance(v, bool):
                return wrap_signed(v, self.mode.bitwidth)
        return v

    def eval(self, node, env):
        method = getattr(self, "_eval_" + type(node).__name__, None)
        if method is None:
            raise EvalError(f"unsupported node {type(node).__name__}")
        return self.finish(method(node, env))

    # -- leaves ---------------------------------------------------------

    def _eval_IntLit(self, node, env):
        return node.value

    def _eval_RealLit(self, node, env):
        return node.value

    def _eval_StringLit(self, node, env):
        return node.value

    def _eval_BoolLit(self, node, env):
        return node.value

    def _eval_Var(self, node, env):
        if node.name not in env:
            raise EvalError(f"unbound variable '{node.name}'")
        return env[node.name]

    def _eval_AllInstances(self, node, env):
        return SetVal.of(ObjRef(o) for o in self.state.objects_of(self.model, node.class_name))

    # -- properties ------------------------------------------------------

    def _eval_AttrAccess(self, node, env):
        src = self.eval(node.obj, env)
        if src is UNDEFINED:
            return UNDEFINED
        if is_collection(src):
            out = []
            for e in src:
                v = self._attr_of(e, node.attr)
                if is_collection(v):
                    out.extend(v)
                else:
                    out.append(v)
            return BagVal.of(out)
        return self._attr_of(src, node.attr)

    def _attr_of(self, v, attr):
        if not isinstance(v, ObjRef):
            return UNDEFINED
        return self.state.attr(v.name, attr)

    def _eval_Navigation(self, node, env):
        src = self.eval(node.obj, env)
        if src is UNDEFINED:
            return UNDEFINED
        if is_collection(src):
            out = []
            for e in src:
                v = self._navigate(e, node.role)
                if is_collection(v):
                    out.extend(v)
                elif v is not UNDEFINED:
                    out.append(v)
            return BagVal.of(out)
        return self._navigate(src, node.role)

    def _navigate(self, v, role):
        if not isinstance(v, ObjRef):
            return UNDEFINED
        nav = self.model.resolve_navigation(self.state.class_of(v.name), role)
        if nav is None:
            raise EvalError(f"no role '{role}' from '{v.name}'")
        assoc, i, j = nav
        targets = [pair[j] for a, pair in self.state.links
                   if a == assoc.name and pair[i] == v.name]
        if assoc.ends[j].multiplicity.upper == 1:
            return ObjRef(targets[0]) if targets else UNDEFINED
        return SetVal.of(ObjRef(t) for t in targets)

    # -- operators --------------------------------------------------------

    def _eval_Unary(self, node, env):
        v = self.eval(node.operand, env)
        if node.op == "not":
            if v is UNDEFINED:
                return UNDEFINED
            return not v
        if v is UNDEFINED:
            return UNDEFINED
        return -v

    def _eval_Binary(self, node, env):
        op = node.op
        if op in ("and", "or", "implies"):
            return self._eval_connective(node, env)
        l = self.eval(node.left, env)
        r = self.eval(node.right, env)
        if op in ("=", "<>"):
            eq = self._equal(l, r)
            return eq if op == "=" else not eq
        if l is UNDEFINED or r is UNDEFINED:
            return UNDEFINED
        if op == "<":
            return l < r
        if op == "<=":
            return l <= r
        if op == ">":
            return l > r
        if op == ">=":
            return l >= r
        if op == "+":
            return l + r
        if op == "-":
            return l - r
        if op == "*":
            return l * r
        if op == "div":
            if r == 0:
                return UNDEFINED
            q = abs(l) // abs(r)  # OCL div truncates toward zero
            return q if (l >= 0) == (r >= 0) else -q
        raise EvalError(f"unknown operator '{op}'")

    def _eval_connective(self, node, env):
        op = node.op
        l = self.eval(node.left, env)
        r = self.eval(node.right, env)
        if op == "and":
            if l is False or r is False:
                return False
            if l is UNDEFINED or r is UNDEFINED:
                return UNDEFINED
            return True
        if op == "or":
            if l is True or r is True:
                return True
            if l is UNDEFINED or r is UNDEFINED:
                return UNDEFINED
            return False
        # implies
        if l is False or r is True:
            return True
        if l is UNDEFINED or r is UNDEFINED:
            return UNDEFINED
        return r

    def _equal(self, l, r):
        if l is UNDEFINED or r is UNDEFINED:
            return UNDEFINED
        if is_collection(l) != is_collection(r):
            return False
        if is_collection(l):
            if type(l) is not type(r):
                return False  # a Set and a Bag are unrelated
            if isinstance(l, SetVal):
                return l.elems == r.elems
            return l.counts == r.counts
        if isinstance(l, bool) != isinstance(r, bool):
            return False
        return l == r

    # -- casts and kinds -----------------------------------------------------

    def _eval_OclAsSet(self, node, env):
        return as_set(self.eval(node.obj, env))

    def _eval_OclIsKindOf(self, node, env):
        v = self.eval(node.obj, env)
        if v is UNDEFINED:
            return UNDEFINED
        if not isinstance(v, ObjRef):
            return False
        return self.model.conforms_to(self.state.class_of(v.name), node.type_name)

    def _eval_OclAsType(self, node, env):
        v = self.eval(node.obj, env)
        if v is UNDEFINED:
            return UNDEFINED
        if isinstance(v, ObjRef) and self.model.conforms_to(self.state.class_of(v.name), node.type_name):
            return v
        return UNDEFINED

    def _eval_CollectionLit(self, node, env):
        elems = [self.eval(e, env) for e in node.elements]
        if node.kind == "Set":
            return SetVal.of(elems)
        return BagVal.of(elems)

    # -- iterators --------------------------------------------------------------

    def _eval_Iterator(self, node, env):
        src = self.eval(node.source, env)
        if src is UNDEFINED:
            return UNDEFINED
        if not is_collection(src):
            raise EvalError("iterator source is not a collection")
        kind = node.kind

        if kind == "closure":
            return self._closure(src, node, env)

        saved = env.get(node.var, _MISSING)
        results = []
        for e in src:
            env[node.var] = e
            results.append(self.eval(node.body, env))
        _restore(env, node.var, saved)

        if kind == "forAll":
            if any(v is False for v in results):
                return False
            if any(v is UNDEFINED for v in results):
                return UNDEFINED
            return True
        if kind == "exists":
            if any(v is True for v in results):
                return True
            if any(v is UNDEFINED for v in results):
                return UNDEFINED
            return False
        if kind == "one":
            if any(v is UNDEFINED for v in results):
                return UNDEFINED
            return sum(1 for v in results if v is True) == 1
        if kind == "isUnique":
            if any(v is UNDEFINED for v in results):
                return UNDEFINED
            return len({value_key(v) for v in results}) == len(results)
        if kind in ("select", "reject"):
            if any(v is UNDEFINED for v in results):
                return UNDEFINED
            want = kind == "select"
            kept = [e for e, v in zip(list(src), results) if v is want]
            return SetVal.of(kept) if isinstance(src, SetVal) else BagVal.of(kept)
        if kind == "collect":
            out = []
            for v in results:
                if is_collection(v):
                    out.extend(v)
                else:
                    out.append(v)
            return BagVal.of(out)
        raise EvalError(f"unknown iterator '{kind}'")

    def _closure(self, src, node, env):
        """Least fixpoint of the step expression; contains the start elements
        only when they are reachable from themselves."""
        saved = env.get(node.var, _MISSING)
        reached = set()
        frontier = list(src)
        while frontier:
            e = frontier.pop(0)
            env[node.var] = e
            step = self.eval(node.body, env)
            for nxt in as_set(step):
                if nxt is not UNDEFINED and nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        _restore(env, node.var, saved)
        return SetVal.of(reached)

    # -- collection operations ----------------------------------------------------

    def _eval_CollectionOp(self, node, env):
        src = self.eval(node.source, env)
        if src is UNDEFINED:
            return UNDEFINED
        if not is_collection(src):
            raise EvalError("collection operation on a non-collection")
        args = [self.eval(a, env) for a in node.args]
        op = node.op
        if op == "size":
            return len(src)
        if op == "isEmpty":
            return len(src) == 0
        if op == "notEmpty":
            return len(src) > 0
        if op == "sum":
            total = 0
            for e in src:
                if e is UNDEFINED:
                    return UNDEFINED
                total += e
            return total
        if op == "asSet":
            return as_set(src)
        if op in ("includes", "excludes"):
            (x,) = args
            if x is UNDEFINED:
                return UNDEFINED
            found = any(self._equal(e, x) is True for e in src)
            return found if op == "includes" else not found
        if op == "including":
            (x,) = args
            if x is UNDEFINED:
                return UNDEFINED
            if isinstance(src, SetVal):
                return SetVal(src.elems | {x})
            return BagVal.of(list(src) + [x])
        if op == "excluding":
            (x,) = args
            if x is UNDEFINED:
                return UNDEFINED
            if isinstance(src, SetVal):
                return SetVal(src.elems - {x})
            return BagVal.of(e for e in src if not self._equal(e, x) is True)
        if op in ("union", "intersection"):
            (other,) = args
            if other is UNDEFINED:
                return UNDEFINED
            if not is_collection(other):
                raise EvalError(f"'{op}' argument is not a collection")
            if op == "union":
                if isinstance(src, SetVal) and isinstance(other, SetVal):
                    return SetVal(src.elems | other.elems)
                return BagVal.of(list(src) + list(other))
            if isinstance(src, SetVal) or isinstance(other, SetVal):
                return SetVal(as_set(src).elems & as_set(other).elems)
            from collections import Counter
            a, b = Counter(dict(src.counts)), Counter(dict(other.counts))
            return BagVal.of([e for e in (a & b).elements()])
        raise EvalError(f"unknown collection operation '{op}'")


# -- invariants --------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantResult:
    """Per-object outcomes plus the overall conjunction; an undefined outcome
    counts as a violation."""

    invariant: str
    per_object: tuple  # (object name, True | False | UNDEFINED)
    holds: bool

    @property
    def violators(self):
        return tuple(o for o, v in self.per_object if v is not True)


def eval_invariant(inv: Invariant, state: SystemState, mode, model: Model) -> InvariantResult:
    results = []
    for obj in state.objects_of(model, inv.context_class):
        v = eval(inv.body, state, {"self": ObjRef(obj)}, mode, model)
        results.append((obj, v))
    holds = all(v is True for _, v in results)
    return InvariantResult(inv.qualified_name, tuple(results), holds)
