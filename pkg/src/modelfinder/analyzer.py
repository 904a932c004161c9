"""Static analyses over typechecked models: the four warning classes.

Message texts follow fixed templates and are compared byte-for-byte by the
golden tests, so do not reword them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import Configuration
from .diagnostics import NOWHERE, SourceLocation
from .model import Model
from .ocl_ast import Binary, CollectionOp, IntLit, OclExpr, Unary, walk
from .ocl_types import BagType, SetType

TEMPLATE_BAG_COLLAPSE = ("WARNING: Collect operation `{expr}' results in unsupported type `Bag'. "
                         "It will be interpreted as `Set'.")
TEMPLATE_SUM = ("WARNING: The evaluation of sum expression `{expr}' might be wrong "
                "if source contains duplicates (Collection is interpreted as Set).")
TEMPLATE_CONTRADICTION = ("WARNING: Expression `{expr}' can never evaluate to true "
                          "because `{t1}' and `{t2}' are unrelated.")
TEMPLATE_BITWIDTH = ("WARNING: The configured bitwidth is too small for the property "
                     "Integer max value ({v}). Required bitwidth: {k} or greater.")


@dataclass(frozen=True)
class Warning:
    kind: str  # BagCollapse | SumOverDuplicates | TypeContradiction | BitwidthTooSmall
    message: str
    location: SourceLocation = field(default=NOWHERE)
    expression_text: str = ""
    constant_result: object = None  # TypeContradiction only: the forced value

    def __str__(self):
        return self.message


def _invariant_nodes(model: Model):
    for inv in model.invariants:
        for node in walk(inv.body):
            yield inv, node


def warn_bag_collapse(model: Model) -> list[Warning]:
    """One warning per node whose standard type is a Bag: the solver will see
    a Set there."""
    out = []
    for inv, node in _invariant_nodes(model):
        if isinstance(node.standard_type, BagType):
            text = node.source_text()
            out.append(Warning("BagCollapse", TEMPLATE_BAG_COLLAPSE.format(expr=text),
                               node.location, text))
    return out


def warn_sum_over_duplicates(model: Model) -> list[Warning]:
    """One warning per sum() whose source is a Bag; collapsed duplicates
    change the result."""
    out = []
    for inv, node in _invariant_nodes(model):
        if (isinstance(node, CollectionOp) and node.op == "sum"
                and isinstance(node.source.standard_type, BagType)):
            text = node.source_text()
            out.append(Warning("SumOverDuplicates", TEMPLATE_SUM.format(expr=text),
                               node.location, text))
    return out


def warn_type_contradictions(model: Model) -> list[Warning]:
    """Equality and inequality between a Set and a Bag: the comparison has a
    constant value (false for =, true for <>)."""
    out = []
    for inv, node in _invariant_nodes(model):
        if isinstance(node, Binary) and node.op in ("=", "<>"):
            lt, rt = node.left.standard_type, node.right.standard_type
            kinds = {type(lt), type(rt)}
            if kinds == {SetType, BagType}:
                text = node.source_text()
                out.append(Warning("TypeContradiction",
                                   TEMPLATE_CONTRADICTION.format(expr=text, t1=lt, t2=rt),
                                   node.location, text,
                                   constant_result=(node.op == "<>")))
    return out


def required_bitwidth(v: int) -> int:
    """Smallest k with -2^(k-1) <= v <= 2^(k-1)-1."""
    if v >= 0:
        return v.bit_length() + 1
    return (-v - 1).bit_length() + 1


def _integer_constants(model: Model, config: Configuration):
    """(value, location) pairs subject to the bitwidth scan."""
    for inv, node in _invariant_nodes(model):
        if isinstance(node, Unary) and node.op == "-" and isinstance(node.operand, IntLit):
            yield -node.operand.value, node.location
        elif isinstance(node, IntLit):
            yield node.value, node.location
    yield config.integer_min, NOWHERE
    yield config.integer_max, NOWHERE
    for (cls, attr), domain in config.attribute_domains.items():
        if domain[0] == "range":
            for v in (domain[1], domain[2]):
                if v is not None:
                    yield v, NOWHERE
        else:
            for v in domain[1]:
                if isinstance(v, int) and not isinstance(v, bool):
                    yield v, NOWHERE


def warn_bitwidth(model: Model, config: Configuration) -> list[Warning]:
    """Single warning naming the most demanding integer constant when it does
    not fit the configured bitwidth."""
    worst = None
    for v, loc in _integer_constants(model, config):
        k = required_bitwidth(v)
        if worst is None or k > worst[1]:
            worst = (v, k, loc)
    if worst is None or worst[1] <= config.bitwidth:
        return []
    v, k, loc = worst
    return [Warning("BitwidthTooSmall", TEMPLATE_BITWIDTH.format(v=v, k=k), loc, str(v))]


def analyze(model: Model, config: Configuration = None) -> list[Warning]:
    """All model-level analyses; the bitwidth scan needs a configuration."""
    out = warn_bag_collapse(model) + warn_sum_over_duplicates(model) + warn_type_contradictions(model)
    if config is not None:
        out += warn_bitwidth(model, config)
    return out
