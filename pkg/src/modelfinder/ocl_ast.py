"""OCL expression AST.

Nodes are built once by the parser (or by hand in tests) and annotated in
place by the type checker with a `standard_type` and a `solver_type`.
`text` holds the exact source slice when the node came from the parser and
is what diagnostics quote; `to_source` reconstructs a canonical rendering
for nodes built programmatically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import NOWHERE, SourceLocation
from .ocl_types import OclType

ITERATOR_KINDS = ("forAll", "exists", "select", "reject", "collect", "isUnique", "one", "closure")

COLLECTION_OPS = ("size", "sum", "includes", "excludes", "isEmpty", "notEmpty",
                  "including", "excluding", "union", "intersection", "asSet")


@dataclass
class OclExpr:
    location: SourceLocation = field(default=NOWHERE, compare=False)
    text: Optional[str] = field(default=None, compare=False)
    standard_type: Optional[OclType] = field(default=None)
    solver_type: Optional[OclType] = field(default=None)

    def source_text(self) -> str:
        return self.text if self.text is not None else to_source(self)

    def children(self):
        return []


@dataclass
class IntLit(OclExpr):
    value: int = 0


@dataclass
class RealLit(OclExpr):
    value: float = 0.0


@dataclass
class StringLit(OclExpr):
    value: str = ""


@dataclass
class BoolLit(OclExpr):
    value: bool = False


@dataclass
class Var(OclExpr):
    name: str = ""


@dataclass
class AttrAccess(OclExpr):
    obj: OclExpr = None
    attr: str = ""

    def children(self):
        return [self.obj]


@dataclass
class Navigation(OclExpr):
    obj: OclExpr = None
    role: str = ""

    def children(self):
        return [self.obj]


@dataclass
class AllInstances(OclExpr):
    class_name: str = ""


@dataclass
class Unary(OclExpr):
    op: str = ""  # 'not' | '-'
    operand: OclExpr = None

    def children(self):
        return [self.operand]


@dataclass
class Binary(OclExpr):
    op: str = ""  # = <> < <= > >= + - * div and or implies
    left: OclExpr = None
    right: OclExpr = None

    def children(self):
        return [self.left, self.right]


@dataclass
class OclAsSet(OclExpr):
    obj: OclExpr = None

    def children(self):
        return [self.obj]


@dataclass
class OclIsKindOf(OclExpr):
    obj: OclExpr = None
    type_name: str = ""

    def children(self):
        return [self.obj]


@dataclass
class OclAsType(OclExpr):
    obj: OclExpr = None
    type_name: str = ""

    def children(self):
        return [self.obj]


@dataclass
class CollectionLit(OclExpr):
    kind: str = "Set"  # 'Set' | 'Bag'
    elements: tuple = ()

    def children(self):
        return list(self.elements)


@dataclass
class Iterator(OclExpr):
    kind: str = ""  # forAll exists select reject collect isUnique one closure
    source: OclExpr = None
    var: str = ""
    body: OclExpr = None

    def children(self):
        return [self.source, self.body]


@dataclass
class CollectionOp(OclExpr):
    op: str = ""
    source: OclExpr = None
    args: tuple = ()

    def children(self):
        return [self.source] + list(self.args)


def walk(expr: OclExpr):
    """All nodes of the tree, preorder."""
    yield expr
    for c in expr.children():
        yield from walk(c)


_BINARY_PREC = {
    "implies": 1, "or": 2, "and": 3,
    "=": 4, "<>": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "div": 6,
}


def to_source(expr: OclExpr, parent_prec: int = 0) -> str:
    """Canonical textual rendering; reparses to a structurally equal tree."""
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, RealLit):
        return repr(expr.value)
    if isinstance(expr, StringLit):
        return "'" + expr.value + "'"
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, Var):
        # synthetic iterator variables print as implicit receivers
        return "" if expr.name.startswith("$") else expr.name
    if isinstance(expr, AttrAccess):
        head = to_source(expr.obj, 10)
        return f"{head}.{expr.attr}" if head else expr.attr
    if isinstance(expr, Navigation):
        head = to_source(expr.obj, 10)
        return f"{head}.{expr.role}" if head else expr.role
    if isinstance(expr, AllInstances):
        return f"{expr.class_name}.allInstances()"
    if isinstance(expr, Unary):
        inner = to_source(expr.operand, 9)
        return f"not {inner}" if expr.op == "not" else f"-{inner}"
    if isinstance(expr, Binary):
        prec = _BINARY_PREC[expr.op]
        s = f"{to_source(expr.left, prec)} {expr.op} {to_source(expr.right, prec + 1)}"
        return f"({s})" if prec < parent_prec else s
    if isinstance(expr, OclAsSet):
        return f"{to_source(expr.obj, 10)}->oclAsSet()"
    if isinstance(expr, OclIsKindOf):
        return f"{to_source(expr.obj, 10)}.oclIsKindOf({expr.type_name})"
    if isinstance(expr, OclAsType):
        return f"{to_source(expr.obj, 10)}.oclAsType({expr.type_name})"
    if isinstance(expr, CollectionLit):
        inner = ", ".join(to_source(e) for e in expr.elements)
        return f"{expr.kind}{{ {inner} }}" if inner else f"{expr.kind}{{}}"
    if isinstance(expr, Iterator):
        body = to_source(expr.body)
        head = f"{expr.var} | " if expr.var and not expr.var.startswith("$") else ""
        return f"{to_source(expr.source, 10)}->{expr.kind}({head}{body})"
    if isinstance(expr, CollectionOp):
        args = ", ".join(to_source(a) for a in expr.args)
        return f"{to_source(expr.source, 10)}->{expr.op}({args})"
    raise TypeError(f"unknown node {type(expr).__name__}")
