"""Type checking of OCL expressions against a model.

Every node ends up annotated with a `standard_type` and a `solver_type`
(the same type with Bag rewritten to Set). Property shorthands are resolved
here: a bare name may be an attribute or role of an enclosing implicit
source (`self` or an iterator variable), and arrow operations on single
values get an implicit `oclAsSet` coercion.
"""

from __future__ import annotations

from .diagnostics import InputError, OclTypeError, SourceLocation
from .model import Model
from .ocl_ast import (AllInstances, AttrAccess, Binary, BoolLit, CollectionLit,
                      CollectionOp, IntLit, Iterator, Navigation, OclAsSet,
                      OclAsType, OclExpr, OclIsKindOf, RealLit, StringLit,
                      Unary, Var)
from .ocl_types import (BOOLEAN, INTEGER, REAL, STRING, BagType, ClassType,
                        OclType, SetType, solver_view)

_NUMERIC = (INTEGER, REAL)


def typecheck(expr: OclExpr, env: dict, model: Model) -> OclExpr:
    """Annotate `expr` in place (rewriting shorthand nodes) and return it.

    Raises InputError carrying OclTypeError diagnostics on the first failure.
    """
    checker = _Checker(env, model)
    return checker.check(expr)


class _Checker:
    def __init__(self, env, model):
        self.env = dict(env)
        self.model = model
        # innermost-first implicit sources for bare property names
        self.implicit = [(name, t) for name, t in env.items() if isinstance(t, ClassType)]
        self.fresh = 0

    def fail(self, node, code, message):
        raise InputError(OclTypeError(code, message, node.location))

    def done(self, node, std: OclType):
        node.standard_type = std
        node.solver_type = solver_view(std)
        return node

    # ------------------------------------------------------------------

    def check(self, node: OclExpr) -> OclExpr:
        method = getattr(self, "_check_" + type(node).__name__, None)
        if method is None:
            self.fail(node, "Unsupported", f"unsupported expression node {type(node).__name__}")
        return method(node)

    def _check_IntLit(self, node):
        return self.done(node, INTEGER)

    def _check_RealLit(self, node):
        return self.done(node, REAL)

    def _check_StringLit(self, node):
        return self.done(node, STRING)

    def _check_BoolLit(self, node):
        return self.done(node, BOOLEAN)

    def _check_Var(self, node):
        if node.name in self.env:
            return self.done(node, self.env[node.name])
        # bare property name against an implicit source
        for src, t in reversed(self.implicit):
            rewritten = self._try_property(Var(location=node.location, name=src,
                                               text=src), t, node.name, node)
            if rewritten is not None:
                return rewritten
        self.fail(node, "UnknownName", f"unknown name '{node.name}'")

    def _try_property(self, source_node, source_type, name, at):
        """Attribute or navigation `name` applied to a typed source node, or None."""
        if not isinstance(source_type, ClassType):
            return None
        self.done(source_node, source_type)
        if self.model.find_attribute(source_type.name, name) is not None:
            return self.check(AttrAccess(location=at.location, text=at.text, obj=source_node, attr=name))
        if self.model.resolve_navigation(source_type.name, name) is not None:
            return self.check(Navigation(location=at.location, text=at.text, obj=source_node, role=name))
        return None

    def _check_AttrAccess(self, node):
        node.obj = self.check(node.obj)
        t = node.obj.standard_type
        base = t.elem if t.is_collection() else t
        if not isinstance(base, ClassType):
            self.fail(node, "NotAnObject", f"cannot access property '{node.attr}' on value of type {t}")
        attr = self.model.find_attribute(base.name, node.attr)
        if attr is None:
            nav = self.model.resolve_navigation(base.name, node.attr)
            if nav is not None:
                new = Navigation(location=node.location, text=node.text, obj=node.obj, role=node.attr)
                return self.check(new)
            self.fail(node, "UnknownName", f"class '{base.name}' has no attribute or role '{node.attr}'")
        if t.is_collection():
            # collect shorthand over a collection source yields a Bag
            elem = attr.type.elem if attr.type.is_collection() else attr.type
            return self.done(node, BagType(elem))
        return self.done(node, attr.type)

    def _check_Navigation(self, node):
        node.obj = self.check(node.obj)
        t = node.obj.standard_type
        base = t.elem if t.is_collection() else t
        if not isinstance(base, ClassType):
            self.fail(node, "NotAnObject", f"cannot navigate '{node.role}' on value of type {t}")
        nav = self.model.resolve_navigation(base.name, node.role)
        if nav is None:
            self.fail(node, "UnknownName", f"no role '{node.role}' reachable from class '{base.name}'")
        assoc, _, j = nav
        target = ClassType(assoc.ends[j].cls)
        single = assoc.ends[j].multiplicity.upper == 1
        if t.is_collection():
            return self.done(node, BagType(target))
        return self.done(node, target if single else SetType(target))

    def _check_AllInstances(self, node):
        if self.model.get_class(node.class_name) is None:
            self.fail(node, "UnknownClass", f"unknown class '{node.class_name}'")
        return self.done(node, SetType(ClassType(node.class_name)))

    def _check_Unary(self, node):
        node.operand = self.check(node.operand)
        t = node.operand.standard_type
        if node.op == "not":
            if t != BOOLEAN:
                self.fail(node, "TypeMismatch", f"'not' expects Boolean, got {t}")
            return self.done(node, BOOLEAN)
        if node.op == "-":
            if t not in _NUMERIC:
                self.fail(node, "TypeMismatch", f"unary '-' expects a numeric operand, got {t}")
            return self.done(node, t)
        self.fail(node, "Unsupported", f"unknown unary operator '{node.op}'")

    def _check_Binary(self, node):
        node.left = self.check(node.left)
        node.right = self.check(node.right)
        lt, rt = node.left.standard_type, node.right.standard_type
        op = node.op
        if op in ("and", "or", "implies"):
            if lt != BOOLEAN or rt != BOOLEAN:
                self.fail(node, "TypeMismatch", f"'{op}' expects Boolean operands, got {lt} and {rt}")
            return self.done(node, BOOLEAN)
        if op in ("=", "<>"):
            if lt.is_collection() != rt.is_collection():
                self.fail(node, "TypeMismatch",
                          f"cannot compare {lt} with {rt}: object/value and collection types are incomparable")
            return self.done(node, BOOLEAN)
        if op in ("<", "<=", ">", ">="):
            if lt not in _NUMERIC or rt not in _NUMERIC:
                self.fail(node, "TypeMismatch", f"'{op}' expects numeric operands, got {lt} and {rt}")
            return self.done(node, BOOLEAN)
        if op in ("+", "-"):
            if lt not in _NUMERIC or rt not in _NUMERIC:
                self.fail(node, "TypeMismatch", f"'{op}' expects numeric operands, got {lt} and {rt}")
            return self.done(node, REAL if REAL in (lt, rt) else INTEGER)
        if op in ("*", "div"):
            if lt != INTEGER or rt != INTEGER:
                self.fail(node, "TypeMismatch", f"'{op}' is defined on Integer operands only, got {lt} and {rt}")
            return self.done(node, INTEGER)
        self.fail(node, "Unsupported", f"unknown operator '{op}'")

    def _check_OclAsSet(self, node):
        node.obj = self.check(node.obj)
        t = node.obj.standard_type
        if t.is_collection():
            self.fail(node, "TypeMismatch", f"oclAsSet applies to single values, got {t}")
        return self.done(node, SetType(t))

    def _check_OclIsKindOf(self, node):
        node.obj = self.check(node.obj)
        if self.model.get_class(node.type_name) is None:
            self.fail(node, "UnknownClass", f"unknown class '{node.type_name}'")
        if not isinstance(node.obj.standard_type, ClassType):
            self.fail(node, "TypeMismatch", f"oclIsKindOf applies to objects, got {node.obj.standard_type}")
        return self.done(node, BOOLEAN)

    def _check_OclAsType(self, node):
        node.obj = self.check(node.obj)
        t = node.obj.standard_type
        if self.model.get_class(node.type_name) is None:
            self.fail(node, "UnknownClass", f"unknown class '{node.type_name}'")
        if not isinstance(t, ClassType):
            self.fail(node, "TypeMismatch", f"oclAsType applies to objects, got {t}")
        if not (self.model.conforms_to(node.type_name, t.name) or self.model.conforms_to(t.name, node.type_name)):
            self.fail(node, "TypeMismatch", f"cannot cast {t} to unrelated class '{node.type_name}'")
        return self.done(node, ClassType(node.type_name))

    def _check_CollectionLit(self, node):
        if node.kind not in ("Set", "Bag"):
            self.fail(node, "Unsupported",
                      f"collection type '{node.kind}' is not supported; only Set and Bag are available")
        if not node.elements:
            self.fail(node, "TypeMismatch", f"cannot infer the element type of an empty {node.kind} literal")
        node.elements = tuple(self.check(e) for e in node.elements)
        elem = node.elements[0].standard_type
        for e in node.elements[1:]:
            elem = self._merge(elem, e.standard_type, node)
        if elem.is_collection():
            self.fail(node, "NestedCollection", "nested collections are not supported")
        ctor = SetType if node.kind == "Set" else BagType
        return self.done(node, ctor(elem))

    def _merge(self, a, b, node):
        if a == b:
            return a
        if a in _NUMERIC and b in _NUMERIC:
            return REAL
        if isinstance(a, ClassType) and isinstance(b, ClassType):
            if self.model.conforms_to(a.name, b.name):
                return b
            if self.model.conforms_to(b.name, a.name):
                return a
        self.fail(node, "TypeMismatch", f"incompatible element types {a} and {b}")

    def _coerce_collection(self, node, attr):
        """Arrow-call sources that are single values get an implicit oclAsSet."""
        src = getattr(node, attr)
        if not src.standard_type.is_collection():
            wrapped = OclAsSet(location=src.location, text=src.text, obj=src)
            self.done(wrapped, SetType(src.standard_type))
            setattr(node, attr, wrapped)

    def _check_Iterator(self, node):
        node.source = self.check(node.source)
        self._coerce_collection(node, "source")
        src_t = node.source.standard_type
        elem = src_t.elem
        if not node.var:
            self.fresh += 1
            node.var = f"$it{self.fresh}"
        saved_env = self.env.get(node.var, _MISSING)
        self.env[node.var] = elem
        pushed = isinstance(elem, ClassType)
        if pushed:
            self.implicit.append((node.var, elem))
        try:
            node.body = self.check(node.body)
        finally:
            if pushed:
                self.implicit.pop()
            if saved_env is _MISSING:
                del self.env[node.var]
            else:
                self.env[node.var] = saved_env
        bt = node.body.standard_type
        kind = node.kind
        if kind in ("forAll", "exists", "one", "select", "reject"):
            if bt != BOOLEAN:
                self.fail(node, "TypeMismatch", f"'{kind}' body must be Boolean, got {bt}")
            if kind in ("forAll", "exists", "one"):
                return self.done(node, BOOLEAN)
            return self.done(node, src_t)
        if kind == "isUnique":
            if bt.is_collection():
                self.fail(node, "TypeMismatch", "isUnique body must be a single value")
            return self.done(node, BOOLEAN)
        if kind == "collect":
            out = bt.elem if bt.is_collection() else bt
            return self.done(node, BagType(out))
        if kind == "closure":
            if not isinstance(elem, ClassType):
                self.fail(node, "TypeMismatch", f"closure requires an object collection, got {src_t}")
            base = bt.elem if bt.is_collection() else bt
            if not isinstance(base, ClassType) or not (
                    self.model.conforms_to(base.name, elem.name) or self.model.conforms_to(elem.name, base.name)):
                self.fail(node, "TypeMismatch", f"closure step must yield {elem} objects, got {bt}")
            return self.done(node, SetType(elem))
        self.fail(node, "Unsupported", f"unknown iterator '{kind}'")

    def _check_CollectionOp(self, node):
        node.source = self.check(node.source)
        self._coerce_collection(node, "source")
        src_t = node.source.standard_type
        elem = src_t.elem
        op = node.op
        node.args = tuple(self.check(a) for a in node.args)

        def arity(n):
            if len(node.args) != n:
                self.fail(node, "Arity", f"'{op}' expects {n} argument(s), got {len(node.args)}")

        if op in ("size", "isEmpty", "notEmpty", "asSet", "sum"):
            arity(0)
            if op == "size":
                return self.done(node, INTEGER)
            if op in ("isEmpty", "notEmpty"):
                return self.done(node, BOOLEAN)
            if op == "asSet":
                return self.done(node, SetType(elem))
            if elem not in _NUMERIC:
                self.fail(node, "TypeMismatch", f"sum is defined on numeric collections, got {src_t}")
            return self.done(node, elem)
        if op in ("includes", "excludes", "including", "excluding"):
            arity(1)
            at = node.args[0].standard_type
            if at.is_collection():
                self.fail(node, "TypeMismatch", f"'{op}' expects a single value argument, got {at}")
            if op in ("includes", "excludes"):
                return self.done(node, BOOLEAN)
            return self.done(node, type(src_t)(self._merge(elem, at, node)))
        if op in ("union", "intersection"):
            arity(1)
            at = node.args[0].standard_type
            if not at.is_collection():
                self.fail(node, "TypeMismatch", f"'{op}' expects a collection argument, got {at}")
            merged = self._merge(elem, at.elem, node)
            if op == "union":
                ctor = BagType if isinstance(src_t, BagType) or isinstance(at, BagType) else SetType
            else:
                ctor = SetType if isinstance(src_t, SetType) or isinstance(at, SetType) else BagType
            return self.done(node, ctor(merged))
        if op in ("asSequence", "asOrderedSet"):
            self.fail(node, "Unsupported",
                      f"'{op}' is not supported: the Sequence and OrderedSet collection types are unavailable")
        self.fail(node, "Unsupported", f"unknown collection operation '{op}'")


class _Missing:
    pass


_MISSING = _Missing()
