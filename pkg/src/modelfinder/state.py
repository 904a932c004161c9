"""System states (object diagrams): structure checks and exports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .diagnostics import StateError
from .model import Model
from .ocl_types import BOOLEAN, INTEGER, REAL, STRING, ClassType, SetType, BagType
from .values import UNDEFINED, BagVal, ObjRef, SetVal, value_key


@dataclass(frozen=True, eq=False)
class SystemState:
    """Immutable object diagram: objects with attribute slots plus links."""

    objects: dict = field(default_factory=dict)  # name -> (class name, {attr: value})
    links: frozenset = field(default_factory=frozenset)  # (assoc, (obj1, obj2))

    def __post_init__(self):
        object.__setattr__(self, "objects", dict(self.objects))
        object.__setattr__(self, "links", frozenset(self.links))

    def class_of(self, obj: str) -> str:
        return self.objects[obj][0]

    def attr(self, obj: str, name: str):
        return self.objects[obj][1].get(name, UNDEFINED)

    def objects_of(self, model: Model, cls: str) -> list[str]:
        """Instance names whose class conforms to `cls`, sorted."""
        return sorted(o for o, (c, _) in self.objects.items() if model.conforms_to(c, cls))

    def links_of(self, assoc: str) -> list[tuple]:
        return sorted(pair for a, pair in self.links if a == assoc)

    def __eq__(self, other):
        if not isinstance(other, SystemState):
            return NotImplemented
        return self.objects == other.objects and self.links == other.links

    def __hash__(self):
        return hash((tuple(sorted((n, c, tuple(sorted(attrs.items(), key=lambda kv: kv[0])))
                                  for n, (c, attrs) in self.objects.items())),
                     self.links))


EMPTY_STATE = SystemState()


def check_structure(state: SystemState, model: Model) -> list[StateError]:
    """Structural validity: known concrete classes, typed slots, sane links."""
    errors = []
    for name, (cls, attrs) in state.objects.items():
        c = model.get_class(cls)
        if c is None:
            errors.append(StateError("UnknownClass", f"object '{name}' has unknown class '{cls}'"))
            continue
        if c.is_abstract:
            errors.append(StateError("AbstractInstantiation", f"object '{name}' instantiates abstract class '{cls}'"))
        declared = {a.name: a.type for a in model.all_attributes(cls)}
        for aname, v in attrs.items():
            if aname not in declared:
                errors.append(StateError("UnknownAttribute", f"object '{name}' has unknown attribute '{aname}'"))
            elif v is not UNDEFINED and not _value_matches(v, declared[aname], state, model):
                errors.append(StateError("TypeMismatch", f"value {v!r} does not match type {declared[aname]} of '{cls}.{aname}'"))
    for assoc, (o1, o2) in state.links:
        a = model.get_association(assoc)
        if a is None:
            errors.append(StateError("UnknownAssociation", f"link references unknown association '{assoc}'"))
            continue
        for obj, end in ((o1, a.ends[0]), (o2, a.ends[1])):
            if obj not in state.objects:
                errors.append(StateError("UnknownObject", f"link in '{assoc}' references unknown object '{obj}'"))
            elif not model.conforms_to(state.class_of(obj), end.cls):
                errors.append(StateError("TypeMismatch", f"object '{obj}' does not conform to end class '{end.cls}' of '{assoc}'"))
    return errors


def _value_matches(v, t, state, model):
    if isinstance(t, ClassType):
        return isinstance(v, ObjRef) and v.name in state.objects and model.conforms_to(state.class_of(v.name), t.name)
    if t == INTEGER:
        return isinstance(v, int) and not isinstance(v, bool)
    if t == REAL:
        return isinstance(v, (int, float)) and not isinstance(v, bool)
    if t == STRING:
        return isinstance(v, str)
    if t == BOOLEAN:
        return isinstance(v, bool)
    if isinstance(t, SetType):
        return isinstance(v, SetVal) and all(_value_matches(e, t.elem, state, model) for e in v)
    if isinstance(t, BagType):
        return isinstance(v, BagVal) and all(_value_matches(e, t.elem, state, model) for e in v)
    return False


@dataclass(frozen=True)
class Violation:
    object: str
    association: str
    role: str
    expected: str
    actual: int

    def __str__(self):
        return (f"object '{self.object}' has {self.actual} '{self.role}' link(s) "
                f"in '{self.association}', expected {self.expected}")


def check_model_inherent(state: SystemState, model: Model) -> list[Violation]:
    """Multiplicity violations: per object and association end, the number of
    links must fall within the opposite end's declared multiplicity."""
    violations = []
    for a in model.associations:
        for i, j in ((0, 1), (1, 0)):
            # objects on end i; the multiplicity at end j bounds their link count
            mult = a.ends[j].multiplicity
            for obj in state.objects_of(model, a.ends[i].cls):
                n = sum(1 for an, pair in state.links if an == a.name and pair[i] == obj)
                if not mult.admits(n):
                    violations.append(Violation(obj, a.name, a.ends[j].role, str(mult), n))
    return sorted(violations, key=lambda v: (v.association, v.object, v.role))


# -- exports ---------------------------------------------------------------

def export_dot(state: SystemState) -> str:
    lines = ["digraph state {", "  node [shape=record];"]
    for name in sorted(state.objects):
        cls, attrs = state.objects[name]
        rows = "".join(f"|{a} = {_dot_value(v)}" for a, v in sorted(attrs.items()))
        lines.append(f'  "{name}" [label="{{{name}:{cls}{rows}}}"];')
    for assoc, (o1, o2) in sorted(state.links, key=lambda l: (l[0], l[1])):
        lines.append(f'  "{o1}" -> "{o2}" [label="{assoc}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_value(v):
    if v is UNDEFINED:
        return "undefined"
    if isinstance(v, ObjRef):
        return v.name
    if isinstance(v, str):
        return f"'{v}'"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _value_to_json(v):
    if v is UNDEFINED:
        return None
    if isinstance(v, ObjRef):
        return {"$ref": v.name}
    if isinstance(v, SetVal):
        return {"$set": [_value_to_json(e) for e in v]}
    if isinstance(v, BagVal):
        return {"$bag": [_value_to_json(e) for e in v]}
    if isinstance(v, float):
        return {"$real": v}
    return v


def _value_from_json(j):
    if j is None:
        return UNDEFINED
    if isinstance(j, dict):
        if "$ref" in j:
            return ObjRef(j["$ref"])
        if "$set" in j:
            return SetVal.of(_value_from_json(e) for e in j["$set"])
        if "$bag" in j:
            return BagVal.of(_value_from_json(e) for e in j["$bag"])
        if "$real" in j:
            return float(j["$real"])
        raise ValueError(f"unknown value encoding {j!r}")
    return j


def state_to_obj(state: SystemState) -> dict:
    return {
        "objects": [
            {"name": n, "class": state.objects[n][0],
             "attrs": {a: _value_to_json(v) for a, v in sorted(state.objects[n][1].items())}}
            for n in sorted(state.objects)
        ],
        "links": [
            {"assoc": a, "ends": [p[0], p[1]]}
            for a, p in sorted(state.links, key=lambda l: (l[0], l[1]))
        ],
    }


def export_json(state: SystemState) -> str:
    return json.dumps(state_to_obj(state), indent=2, sort_keys=False) + "\n"


def import_json(text: str) -> SystemState:
    data = json.loads(text)
    objects = {}
    for o in data["objects"]:
        objects[o["name"]] = (o["class"], {a: _value_from_json(v) for a, v in o["attrs"].items()})
    links = frozenset((l["assoc"], (l["ends"][0], l["ends"][1])) for l in data["links"])
    return SystemState(objects, links)
