"""Textual front end: the model language, OCL expressions, and state commands.

Model files use the shape

    model <Name>
    [abstract] class <Name> [< Parent, ...] [attributes <a> : <Type> ...] end
    association <Name> between <Class> [lo..hi] role <r> ; <Class> [lo..hi] role <r> end
    constraints
    context <Class> inv <name>: <ocl expression>

Comments run from `--` to end of line; strings use single quotes; `*` is the
unbounded multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import InputError, ParseError, SourceLocation
from .model import (Association, AssociationEnd, Attribute, Class, Invariant,
                    Model, Multiplicity, check_well_formed)
from .ocl_ast import (AllInstances, AttrAccess, Binary, BoolLit, CollectionLit,
                      CollectionOp, IntLit, Iterator, OclAsSet, OclAsType,
                      OclExpr, OclIsKindOf, RealLit, StringLit, Unary, Var,
                      COLLECTION_OPS, ITERATOR_KINDS)
from .ocl_types import BOOLEAN, INTEGER, REAL, STRING, BagType, ClassType, SetType
from .state import SystemState, check_structure
from .typecheck import typecheck
from .values import UNDEFINED

# -- lexer -------------------------------------------------------------------

_SYMBOLS = ["->", "..", "::", "<>", "<=", ">=", "!", "(", ")", "{", "}", "[", "]",
            "<", ">", "=", "+", "-", "*", "/", ".", ",", ";", ":", "|"]


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT INT REAL STRING SYM EOF
    value: str
    location: SourceLocation
    offset: int
    end: int


def tokenize(text: str, filename: str = "<input>") -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)

    def loc():
        return SourceLocation(filename, line, col)

    def err(msg):
        raise InputError(ParseError("Lex", msg, loc()))

    while i < n:
        c = text[i]
        if c == "\r":
            i += 1
            continue
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start, startloc = i, loc()
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
                tokens.append(Token("REAL", text[i:j], startloc, i, j))
            else:
                tokens.append(Token("INT", text[i:j], startloc, i, j))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], startloc, i, j))
            col += j - i
            i = j
            continue
        if c == "'":
            j = i + 1
            while j < n and text[j] != "'":
                if text[j] == "\n":
                    err("unterminated string literal")
                j += 1
            if j >= n:
                err("unterminated string literal")
            tokens.append(Token("STRING", text[i + 1:j], startloc, i, j + 1))
            col += j + 1 - i
            i = j + 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYM", sym, startloc, i, i + len(sym)))
                i += len(sym)
                col += len(sym)
                break
        else:
            err(f"unexpected character {c!r}")
    tokens.append(Token("EOF", "", loc(), n, n))
    return tokens


class _TokenStream:
    def __init__(self, text, filename):
        self.text = text
        self.tokens = tokenize(text, filename)
        self.pos = 0

    def peek(self, ahead=0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.peek()
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, kind, value=None):
        t = self.peek()
        return t.kind == kind and (value is None or t.value == value)

    def at_ident(self, word):
        return self.at("IDENT", word)

    def accept(self, kind, value=None):
        if self.at(kind, value):
            return self.next()
        return None

    def expect(self, kind, value=None, what=None):
        t = self.peek()
        if not self.at(kind, value):
            want = what or value or kind
            raise InputError(ParseError("Syntax", f"expected {want}, found '{t.value or t.kind}'", t.location))
        return self.next()


# -- OCL expression parser ----------------------------------------------------

class _OclParser:
    def __init__(self, ts: _TokenStream):
        self.ts = ts

    def _finish(self, node: OclExpr, start: int) -> OclExpr:
        end = self.ts.tokens[self.ts.pos - 1].end if self.ts.pos else start
        node.text = self.ts.text[start:end].strip()
        return node

    def expression(self) -> OclExpr:
        return self.implies_expr()

    def implies_expr(self):
        start = self.ts.peek().offset
        left = self.or_expr()
        if self.ts.at_ident("implies"):
            tok = self.ts.next()
            right = self.implies_expr()
            return self._finish(Binary(location=tok.location, op="implies", left=left, right=right), start)
        return left

    def or_expr(self):
        start = self.ts.peek().offset
        left = self.and_expr()
        while self.ts.at_ident("or"):
            tok = self.ts.next()
            left = self._finish(Binary(location=tok.location, op="or", left=left, right=self.and_expr()), start)
        return left

    def and_expr(self):
        start = self.ts.peek().offset
        left = self.cmp_expr()
        while self.ts.at_ident("and"):
            tok = self.ts.next()
            left = self._finish(Binary(location=tok.location, op="and", left=left, right=self.cmp_expr()), start)
        return left

    def cmp_expr(self):
        start = self.ts.peek().offset
        left = self.add_expr()
        for op in ("<>", "<=", ">=", "=", "<", ">"):
            if self.ts.at("SYM", op):
                tok = self.ts.next()
                return self._finish(Binary(location=tok.location, op=op, left=left, right=self.add_expr()), start)
        return left

    def add_expr(self):
        start = self.ts.peek().offset
        left = self.mul_expr()
        while self.ts.at("SYM", "+") or self.ts.at("SYM", "-"):
            tok = self.ts.next()
            left = self._finish(Binary(location=tok.location, op=tok.value, left=left, right=self.mul_expr()), start)
        return left

    def mul_expr(self):
        start = self.ts.peek().offset
        left = self.unary_expr()
        while self.ts.at("SYM", "*") or self.ts.at_ident("div"):
            tok = self.ts.next()
            left = self._finish(Binary(location=tok.location, op=tok.value, left=left, right=self.unary_expr()), start)
        return left

    def unary_expr(self):
        start = self.ts.peek().offset
        if self.ts.at_ident("not"):
            tok = self.ts.next()
            return self._finish(Unary(location=tok.location, op="not", operand=self.unary_expr()), start)
        if self.ts.at("SYM", "-"):
            tok = self.ts.next()
            return self._finish(Unary(location=tok.location, op="-", operand=self.unary_expr()), start)
        return self.postfix_expr()

    def postfix_expr(self):
        start = self.ts.peek().offset
        node = self.primary()
        while True:
            if self.ts.at("SYM", "."):
                self.ts.next()
                name = self.ts.expect("IDENT", what="a property name")
                node = self._dot_call(node, name, start)
            elif self.ts.at("SYM", "->"):
                self.ts.next()
                name = self.ts.expect("IDENT", what="a collection operation")
                node = self._arrow_call(node, name, start)
            else:
                return node

    def _dot_call(self, node, name, start):
        loc = name.location
        if name.value == "allInstances":
            self.ts.expect("SYM", "(")
            self.ts.expect("SYM", ")")
            if not isinstance(node, Var):
                raise InputError(ParseError("Syntax", "allInstances applies to a class name", loc))
            return self._finish(AllInstances(location=loc, class_name=node.name), start)
        if name.value in ("oclIsKindOf", "oclAsType"):
            self.ts.expect("SYM", "(")
            tname = self.ts.expect("IDENT", what="a class name")
            self.ts.expect("SYM", ")")
            ctor = OclIsKindOf if name.value == "oclIsKindOf" else OclAsType
            return self._finish(ctor(location=loc, obj=node, type_name=tname.value), start)
        if self.ts.at("SYM", "("):
            raise InputError(ParseError("Syntax", f"unknown object operation '{name.value}'", loc))
        return self._finish(AttrAccess(location=loc, obj=node, attr=name.value), start)

    def _arrow_call(self, node, name, start):
        loc = name.location
        op = name.value
        self.ts.expect("SYM", "(")
        if op == "oclAsSet":
            self.ts.expect("SYM", ")")
            return self._finish(OclAsSet(location=loc, obj=node), start)
        if op in ITERATOR_KINDS:
            var = ""
            if self.ts.peek().kind == "IDENT" and self.ts.peek(1).kind == "SYM" and self.ts.peek(1).value == "|":
                var = self.ts.next().value
                self.ts.next()
            body = self.expression()
            self.ts.expect("SYM", ")")
            return self._finish(Iterator(location=loc, kind=op, source=node, var=var, body=body), start)
        args = []
        if not self.ts.at("SYM", ")"):
            args.append(self.expression())
            while self.ts.accept("SYM", ","):
                args.append(self.expression())
        self.ts.expect("SYM", ")")
        return self._finish(CollectionOp(location=loc, op=op, source=node, args=tuple(args)), start)

    def primary(self):
        start = self.ts.peek().offset
        t = self.ts.peek()
        if t.kind == "INT":
            self.ts.next()
            return self._finish(IntLit(location=t.location, value=int(t.value)), start)
        if t.kind == "REAL":
            self.ts.next()
            return self._finish(RealLit(location=t.location, value=float(t.value)), start)
        if t.kind == "STRING":
            self.ts.next()
            return self._finish(StringLit(location=t.location, value=t.value), start)
        if t.kind == "IDENT":
            if t.value in ("true", "false"):
                self.ts.next()
                return self._finish(BoolLit(location=t.location, value=t.value == "true"), start)
            if t.value in ("Set", "Bag", "Sequence", "OrderedSet") and self.ts.peek(1).value == "{":
                self.ts.next()
                self.ts.expect("SYM", "{")
                elems = []
                if not self.ts.at("SYM", "}"):
                    elems.append(self.expression())
                    while self.ts.accept("SYM", ","):
                        elems.append(self.expression())
                self.ts.expect("SYM", "}")
                return self._finish(CollectionLit(location=t.location, kind=t.value, elements=tuple(elems)), start)
            self.ts.next()
            return self._finish(Var(location=t.location, name=t.value), start)
        if t.kind == "SYM" and t.value == "(":
            self.ts.next()
            inner = self.expression()
            self.ts.expect("SYM", ")")
            return inner
        raise InputError(ParseError("Syntax", f"expected an expression, found '{t.value or t.kind}'", t.location))


def parse_ocl(text: str, context: str, model: Model, filename: str = "<ocl>") -> OclExpr:
    """Parse and typecheck an OCL expression with `self` bound to `context`."""
    ts = _TokenStream(text, filename)
    expr = _OclParser(ts).expression()
    trailing = ts.peek()
    if trailing.kind != "EOF":
        raise InputError(ParseError("Syntax", f"unexpected trailing input '{trailing.value}'", trailing.location))
    return typecheck(expr, {"self": ClassType(context)}, model)


# -- model parser --------------------------------------------------------------

_BASIC_TYPES = {"Integer": INTEGER, "Real": REAL, "String": STRING, "Boolean": BOOLEAN}


def _parse_type(ts: _TokenStream):
    t = ts.expect("IDENT", what="a type name")
    if t.value in _BASIC_TYPES:
        return _BASIC_TYPES[t.value]
    if t.value in ("Set", "Bag"):
        ts.expect("SYM", "(")
        elem = _parse_type(ts)
        ts.expect("SYM", ")")
        if elem.is_collection():
            raise InputError(ParseError("NestedCollection", "nested collections are not supported", t.location))
        return SetType(elem) if t.value == "Set" else BagType(elem)
    if t.value in ("Sequence", "OrderedSet"):
        raise InputError(ParseError(
            "Unsupported", f"collection type '{t.value}' is not supported; only Set and Bag are available", t.location))
    return ClassType(t.value)


def _parse_multiplicity(ts: _TokenStream) -> Multiplicity:
    ts.expect("SYM", "[")
    if ts.accept("SYM", "*"):
        ts.expect("SYM", "]")
        return Multiplicity(0, None)
    lo = int(ts.expect("INT", what="a lower bound").value)
    if ts.accept("SYM", ".."):
        if ts.accept("SYM", "*"):
            hi = None
        else:
            hi = int(ts.expect("INT", what="an upper bound").value)
    else:
        hi = lo
    tok = ts.expect("SYM", "]")
    if hi is not None and lo > hi:
        raise InputError(ParseError("BadMultiplicity", f"lower bound {lo} exceeds upper bound {hi}", tok.location))
    return Multiplicity(lo, hi)


def parse_model(text: str, filename: str = "<model>") -> Model:
    """Parse a model file, check well-formedness, and typecheck all invariants.

    Raises InputError carrying every collected diagnostic on failure.
    """
    ts = _TokenStream(text, filename)
    ts.expect("IDENT", "model")
    name = ts.expect("IDENT", what="a model name").value
    classes, associations = [], []
    raw_invariants = []  # (context, name, body text offset handled via parser)

    while not ts.at("EOF"):
        if ts.at_ident("abstract") or ts.at_ident("class"):
            classes.append(_parse_class(ts))
        elif ts.at_ident("association"):
            associations.append(_parse_association(ts))
        elif ts.at_ident("constraints"):
            ts.next()
            while ts.at_ident("context"):
                tok = ts.next()
                ctx = ts.expect("IDENT", what="a context class").value
                ts.expect("IDENT", "inv")
                iname = ts.expect("IDENT", what="an invariant name").value
                ts.expect("SYM", ":")
                body = _OclParser(ts).expression()
                raw_invariants.append(Invariant(ctx, iname, body, tok.location))
            trailing = ts.peek()
            if trailing.kind != "EOF":
                raise InputError(ParseError("Syntax", f"unexpected input '{trailing.value}'", trailing.location))
        else:
            t = ts.peek()
            raise InputError(ParseError(
                "Syntax", f"expected 'class', 'association' or 'constraints', found '{t.value or t.kind}'", t.location))

    model = Model(name, tuple(classes), tuple(associations), ())
    errors = list(check_well_formed(Model(name, tuple(classes), tuple(associations), tuple(raw_invariants))))
    class_names = {c.name for c in classes}
    for c in classes:
        for a in c.attributes:
            t = a.type
            if isinstance(t, ClassType) and t.name not in class_names:
                errors.append(ParseError(
                    "UnknownType", f"attribute '{c.name}.{a.name}' has unknown type '{t.name}'",
                    a.location))
    if errors:
        raise InputError(errors)

    invariants = []
    for inv in raw_invariants:
        checked = typecheck(inv.body, {"self": ClassType(inv.context_class)}, model)
        if checked.standard_type != BOOLEAN:
            raise InputError(ParseError(
                "TypeMismatch",
                f"invariant '{inv.qualified_name}' must be Boolean, got {checked.standard_type}",
                inv.location))
        invariants.append(Invariant(inv.context_class, inv.name, checked, inv.location))
    return Model(name, tuple(classes), tuple(associations), tuple(invariants))


def _parse_class(ts: _TokenStream) -> Class:
    is_abstract = bool(ts.accept("IDENT", "abstract"))
    tok = ts.expect("IDENT", "class")
    name = ts.expect("IDENT", what="a class name").value
    parents = []
    if ts.accept("SYM", "<"):
        parents.append(ts.expect("IDENT", what="a parent class").value)
        while ts.accept("SYM", ","):
            parents.append(ts.expect("IDENT", what="a parent class").value)
    attrs = []
    if ts.accept("IDENT", "attributes"):
        while ts.peek().kind == "IDENT" and not ts.at_ident("end"):
            atok = ts.next()
            ts.expect("SYM", ":")
            attrs.append(Attribute(atok.value, _parse_type(ts), atok.location))
    ts.expect("IDENT", "end")
    return Class(name, is_abstract, tuple(attrs), tuple(parents), tok.location)


def _parse_association(ts: _TokenStream) -> Association:
    tok = ts.expect("IDENT", "association")
    name = ts.expect("IDENT", what="an association name").value
    ts.expect("IDENT", "between")
    ends = [_parse_end(ts)]
    ts.accept("SYM", ";")
    ends.append(_parse_end(ts))
    ts.expect("IDENT", "end")
    return Association(name, tuple(ends), tok.location)


def _parse_end(ts: _TokenStream) -> AssociationEnd:
    cls = ts.expect("IDENT", what="an end class").value
    mult = _parse_multiplicity(ts)
    ts.expect("IDENT", "role")
    role = ts.expect("IDENT", what="a role name").value
    return AssociationEnd(role, cls, mult)


# -- pretty printer -------------------------------------------------------------

def print_model(model: Model) -> str:
    """Canonical model text; reparses to a structurally equal model."""
    from .ocl_ast import to_source

    out = [f"model {model.name}", ""]
    for c in model.classes:
        head = ("abstract " if c.is_abstract else "") + f"class {c.name}"
        if c.parents:
            head += " < " + ", ".join(c.parents)
        out.append(head)
        if c.attributes:
            out.append("  attributes")
            for a in c.attributes:
                out.append(f"    {a.name} : {a.type}")
        out.append("end")
        out.append("")
    for a in model.associations:
        out.append(f"association {a.name} between")
        for i, end in enumerate(a.ends):
            hi = "*" if end.multiplicity.upper is None else str(end.multiplicity.upper)
            sep = " ;" if i == 0 else ""
            out.append(f"  {end.cls} [{end.multiplicity.lower}..{hi}] role {end.role}{sep}")
        out.append("end")
        out.append("")
    if model.invariants:
        out.append("constraints")
        out.append("")
        for inv in model.invariants:
            out.append(f"context {inv.context_class} inv {inv.name}:")
            out.append(f"  {inv.body.source_text() if hasattr(inv.body, 'source_text') else to_source(inv.body)}")
            out.append("")
    return "\n".join(out).rstrip() + "\n"


# -- state command files ---------------------------------------------------------

def parse_state_commands(text: str, model: Model, filename: str = "<cmd>") -> SystemState:
    """Execute !create / !set / !insert commands into an initially empty state."""
    objects = {}
    links = set()
    ts = _TokenStream(text, filename)

    def err(code, msg, loc):
        raise InputError(ParseError(code, msg, loc))

    while not ts.at("EOF"):
        bang = ts.expect("SYM", "!", what="'!' starting a command")
        cmd = ts.expect("IDENT", what="a command (create, set, insert)")
        if cmd.value == "create":
            name = ts.expect("IDENT", what="an object name").value
            ts.expect("SYM", ":")
            cls = ts.expect("IDENT", what="a class name").value
            c = model.get_class(cls)
            if c is None:
                err("UnknownClass", f"unknown class '{cls}'", cmd.location)
            if c.is_abstract:
                err("AbstractInstantiation", f"class '{cls}' is abstract and cannot be instantiated", cmd.location)
            if name in objects:
                err("DuplicateObjectName", f"object '{name}' already exists", cmd.location)
            objects[name] = (cls, {})
        elif cmd.value == "set":
            oname = ts.expect("IDENT", what="an object name").value
            ts.expect("SYM", ".")
            aname = ts.expect("IDENT", what="an attribute name").value
            ts.expect("SYM", ":")
            ts.expect("SYM", "=")
            value, vloc = _parse_cmd_value(ts, objects)
            if oname not in objects:
                err("UnknownObject", f"unknown object '{oname}'", cmd.location)
            cls = objects[oname][0]
            attr = model.find_attribute(cls, aname)
            if attr is None:
                err("UnknownAttribute", f"class '{cls}' has no attribute '{aname}'", cmd.location)
            objects[oname][1][aname] = value
        elif cmd.value == "insert":
            ts.expect("SYM", "(")
            o1 = ts.expect("IDENT", what="an object name").value
            ts.expect("SYM", ",")
            o2 = ts.expect("IDENT", what="an object name").value
            ts.expect("SYM", ")")
            ts.expect("IDENT", "into")
            aname = ts.expect("IDENT", what="an association name").value
            if model.get_association(aname) is None:
                err("UnknownAssociation", f"unknown association '{aname}'", cmd.location)
            for o in (o1, o2):
                if o not in objects:
                    err("UnknownObject", f"unknown object '{o}'", cmd.location)
            links.add((aname, (o1, o2)))
        else:
            err("Syntax", f"unknown command '!{cmd.value}'", bang.location)

    state = SystemState(objects, frozenset(links))
    problems = check_structure(state, model)
    if problems:
        raise InputError(problems)
    return state


def _parse_cmd_value(ts: _TokenStream, objects):
    from .values import ObjRef

    t = ts.peek()
    if t.kind == "INT":
        ts.next()
        return int(t.value), t.location
    if t.kind == "REAL":
        ts.next()
        return float(t.value), t.location
    if t.kind == "STRING":
        ts.next()
        return t.value, t.location
    if ts.at("SYM", "-"):
        ts.next()
        num = ts.expect("INT", what="a number")
        return -int(num.value), num.location
    if t.kind == "IDENT":
        ts.next()
        if t.value == "true":
            return True, t.location
        if t.value == "false":
            return False, t.location
        if t.value in ("Undefined", "undefined"):
            return UNDEFINED, t.location
        if t.value in objects:
            return ObjRef(t.value), t.location
        raise InputError(ParseError("UnknownObject", f"unknown object '{t.value}'", t.location))
    raise InputError(ParseError("Syntax", f"expected a value, found '{t.value or t.kind}'", t.location))
