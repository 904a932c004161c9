"""In-memory class model: classes, associations, generalizations, invariants."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import NOWHERE, ModelError, SourceLocation
from .ocl_types import OclType


@dataclass(frozen=True)
class Multiplicity:
    lower: int
    upper: Optional[int]  # None = unbounded (*)

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("lower bound must be nonnegative")
        if self.upper is not None and self.upper < 1:
            raise ValueError("upper bound must be positive")

    def admits(self, n: int) -> bool:
        return self.lower <= n and (self.upper is None or n <= self.upper)

    def __str__(self):
        hi = "*" if self.upper is None else str(self.upper)
        if self.upper is not None and self.lower == self.upper:
            return str(self.lower)
        return f"{self.lower}..{hi}"


@dataclass(frozen=True)
class Attribute:
    name: str
    type: OclType
    location: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class Class:
    name: str
    is_abstract: bool = False
    attributes: tuple = ()
    parents: tuple = ()
    location: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class AssociationEnd:
    role: str
    cls: str
    multiplicity: Multiplicity


@dataclass(frozen=True)
class Association:
    name: str
    ends: tuple  # exactly two AssociationEnd
    location: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class Invariant:
    context_class: str
    name: str
    body: object  # annotated OclExpr (boolean)
    location: SourceLocation = field(default=NOWHERE, compare=False)

    @property
    def qualified_name(self) -> str:
        return f"{self.context_class}::{self.name}"


@dataclass(frozen=True)
class Model:
    name: str
    classes: tuple = ()
    associations: tuple = ()
    invariants: tuple = ()

    # -- lookups ----------------------------------------------------------

    def get_class(self, name: str) -> Optional[Class]:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def ancestors(self, name: str) -> list[str]:
        """All strict superclasses of `name`, breadth-first, without repeats."""
        seen, order, frontier = set(), [], list(self.get_class(name).parents if self.get_class(name) else [])
        while frontier:
            p = frontier.pop(0)
            if p in seen:
                continue
            seen.add(p)
            order.append(p)
            c = self.get_class(p)
            if c is not None:
                frontier.extend(c.parents)
        return order

    def conforms_to(self, sub: str, sup: str) -> bool:
        return sub == sup or sup in self.ancestors(sub)

    def concrete_descendants(self, name: str) -> list[str]:
        """Concrete classes conforming to `name`, in declaration order."""
        return [c.name for c in self.classes if not c.is_abstract and self.conforms_to(c.name, name)]

    def all_attributes(self, name: str) -> list[Attribute]:
        """Own plus inherited attributes; superclass attributes first."""
        attrs = []
        for cname in reversed([name] + self.ancestors(name)):
            c = self.get_class(cname)
            if c is not None:
                attrs.extend(c.attributes)
        return attrs

    def find_attribute(self, cls: str, attr: str) -> Optional[Attribute]:
        for a in self.all_attributes(cls):
            if a.name == attr:
                return a
        return None

    def get_association(self, name: str) -> Optional[Association]:
        for a in self.associations:
            if a.name == name:
                return a
        return None

    def navigations_from(self, cls: str):
        """(association, source end index, target end index) triples whose
        source end class is `cls` or one of its ancestors."""
        out = []
        for a in self.associations:
            for i in (0, 1):
                if self.conforms_to(cls, a.ends[i].cls):
                    out.append((a, i, 1 - i))
        return out

    def resolve_navigation(self, cls: str, role: str):
        """The (association, source index, target index) for navigating `role`
        from an instance of `cls`, or None."""
        for a, i, j in self.navigations_from(cls):
            if a.ends[j].role == role:
                return (a, i, j)
        return None

    def get_invariant(self, qualified_name: str) -> Optional[Invariant]:
        for inv in self.invariants:
            if inv.qualified_name == qualified_name:
                return inv
        return None


def check_well_formed(model: Model) -> list[ModelError]:
    """All structural model rules; an empty result means the model is sound."""
    errors = []
    class_names = [c.name for c in model.classes]

    seen = set()
    for c in model.classes:
        if c.name in seen:
            errors.append(ModelError("DuplicateClass", f"duplicate class name '{c.name}'", c.location))
        seen.add(c.name)

    seen = set()
    for a in model.associations:
        if a.name in seen:
            errors.append(ModelError("DuplicateAssociation", f"duplicate association name '{a.name}'", a.location))
        seen.add(a.name)

    seen = set()
    for inv in model.invariants:
        if inv.qualified_name in seen:
            errors.append(ModelError("DuplicateInvariant", f"duplicate invariant '{inv.qualified_name}'", inv.location))
        seen.add(inv.qualified_name)

    for c in model.classes:
        for p in c.parents:
            if p not in class_names:
                errors.append(ModelError("UnknownClass", f"class '{c.name}' extends unknown class '{p}'", c.location))

    # generalization cycles: DFS over the declared parent edges
    state = {}  # name -> 1 visiting, 2 done

    def visit(name, path):
        state[name] = 1
        c = model.get_class(name)
        for p in (c.parents if c else ()):
            if state.get(p) == 1:
                cyc = path[path.index(p):] if p in path else [name, p]
                errors.append(ModelError(
                    "CyclicGeneralization",
                    "cyclic generalization involving " + ", ".join(sorted(set(cyc + [p]))),
                    (model.get_class(p) or c).location))
            elif state.get(p) is None and model.get_class(p) is not None:
                visit(p, path + [p])
        state[name] = 2

    for c in model.classes:
        if state.get(c.name) is None:
            visit(c.name, [c.name])

    has_cycle = any(e.code == "CyclicGeneralization" for e in errors)

    if not has_cycle:
        for c in model.classes:
            names = [a.name for a in model.all_attributes(c.name)]
            for n in sorted(set(names)):
                if names.count(n) > 1:
                    errors.append(ModelError(
                        "DuplicateAttribute",
                        f"attribute '{n}' declared more than once in '{c.name}' (including inherited)",
                        c.location))

    for a in model.associations:
        if len(a.ends) != 2:
            errors.append(ModelError("BadAssociation", f"association '{a.name}' must have exactly 2 ends", a.location))
            continue
        for end in a.ends:
            if end.cls not in class_names:
                errors.append(ModelError("UnknownClass", f"association '{a.name}' references unknown class '{end.cls}'", a.location))

    # role uniqueness among all associations reachable from a class
    if not has_cycle and not any(e.code in ("UnknownClass", "BadAssociation") for e in errors):
        for c in model.classes:
            roles = {}
            for a, i, j in model.navigations_from(c.name):
                role = a.ends[j].role
                prev = roles.get(role)
                if prev is not None and prev is not a:
                    errors.append(ModelError(
                        "AmbiguousRole",
                        f"role '{role}' reachable from class '{c.name}' via both "
                        f"'{prev.name}' and '{a.name}'",
                        a.location))
                roles[role] = a

    for inv in model.invariants:
        if inv.context_class not in class_names:
            errors.append(ModelError("UnknownClass", f"invariant '{inv.name}' has unknown context class '{inv.context_class}'", inv.location))

    return errors
