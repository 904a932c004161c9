"""OCL types with the dual standard/solver view.

Only flat collections are representable: Set and Bag of a basic or class
type. Sequence and OrderedSet are rejected at the type-check stage, and the
solver view rewrites every Bag to a Set.
"""

from __future__ import annotations

from dataclasses import dataclass


class OclType:
    __slots__ = ()

    def is_collection(self):
        return isinstance(self, (SetType, BagType))

    def __repr__(self):
        return str(self)


@dataclass(frozen=True)
class IntegerType(OclType):
    def __str__(self):
        return "Integer"


@dataclass(frozen=True)
class RealType(OclType):
    def __str__(self):
        return "Real"


@dataclass(frozen=True)
class StringType(OclType):
    def __str__(self):
        return "String"


@dataclass(frozen=True)
class BooleanType(OclType):
    def __str__(self):
        return "Boolean"


@dataclass(frozen=True)
class ClassType(OclType):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class SetType(OclType):
    elem: OclType

    def __post_init__(self):
        if self.elem.is_collection():
            raise ValueError("nested collection types are not supported")

    def __str__(self):
        return f"Set({self.elem})"


@dataclass(frozen=True)
class BagType(OclType):
    elem: OclType

    def __post_init__(self):
        if self.elem.is_collection():
            raise ValueError("nested collection types are not supported")

    def __str__(self):
        return f"Bag({self.elem})"


INTEGER = IntegerType()
REAL = RealType()
STRING = StringType()
BOOLEAN = BooleanType()


def solver_view(t: OclType) -> OclType:
    """The solver-side type: identical except every Bag becomes a Set."""
    if isinstance(t, BagType):
        return SetType(t.elem)
    return t


def element_type(t: OclType) -> OclType:
    if not t.is_collection():
        raise ValueError(f"{t} is not a collection type")
    return t.elem
