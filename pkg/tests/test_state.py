"""System states: structure checks, multiplicity violations, exports."""

import pytest
from hypothesis import given, strategies as st

from modelfinder.parsing import parse_model, parse_state_commands
from modelfinder.state import (EMPTY_STATE, SystemState, check_model_inherent,
                               check_structure, export_dot, export_json, import_json)
from modelfinder.values import UNDEFINED, BagVal, ObjRef, SetVal

MODEL = """
model Firm
class Branch attributes location : String end
class Employee attributes age : Integer certified : Boolean rating : Real end
association Employment between
  Branch [1..1] role employer ;
  Employee [1..*] role employee
end
"""


@pytest.fixture(scope="module")
def firm():
    return parse_model(MODEL)


def mk(objects, links=()):
    return SystemState(objects, frozenset(links))


class TestStructure:
    def test_clean(self, firm):
        s = mk({"b": ("Branch", {"location": "x"}), "e": ("Employee", {"age": 1})},
               [("Employment", ("b", "e"))])
        assert check_structure(s, firm) == []

    def test_unknown_class(self, firm):
        s = mk({"g": ("Ghost", {})})
        assert any(e.code == "UnknownClass" for e in check_structure(s, firm))

    def test_unknown_attribute(self, firm):
        s = mk({"b": ("Branch", {"vault": 1})})
        assert any(e.code == "UnknownAttribute" for e in check_structure(s, firm))

    def test_type_mismatch(self, firm):
        s = mk({"e": ("Employee", {"age": "old"})})
        assert any(e.code == "TypeMismatch" for e in check_structure(s, firm))

    def test_link_end_conformance(self, firm):
        s = mk({"e1": ("Employee", {}), "e2": ("Employee", {})},
               [("Employment", ("e1", "e2"))])
        assert check_structure(s, firm) != []

    def test_unknown_link_object(self, firm):
        s = mk({"b": ("Branch", {})}, [("Employment", ("b", "ghost"))])
        assert check_structure(s, firm) != []


class TestModelInherent:
    def test_violations_match_recount_oracle(self, firm):
        # oracle: recount links per object and end, compare with multiplicity
        import itertools
        objs = {"b1": ("Branch", {}), "b2": ("Branch", {}),
                "e1": ("Employee", {}), "e2": ("Employee", {})}
        pairs = [(b, e) for b in ("b1", "b2") for e in ("e1", "e2")]
        for r in range(len(pairs) + 1):
            for combo in itertools.combinations(pairs, r):
                s = mk(objs, [("Employment", p) for p in combo])
                violations = check_model_inherent(s, firm)
                expected = set()
                a = firm.get_association("Employment")
                for name in objs:
                    for i in (0, 1):
                        if not firm.conforms_to(objs[name][0], a.ends[i].cls):
                            continue
                        n = sum(1 for p in combo if p[i] == name)
                        if not a.ends[1 - i].multiplicity.admits(n):
                            expected.add((name, a.ends[1 - i].role))
                got = {(v.object, v.role) for v in violations}
                assert got == expected, combo

    def test_empty_state_trivially_ok(self, firm):
        assert check_model_inherent(EMPTY_STATE, firm) == []

    def test_output_deterministic(self, firm):
        s = mk({"e1": ("Employee", {}), "e2": ("Employee", {})})
        assert check_model_inherent(s, firm) == check_model_inherent(s, firm)


class TestDotExport:
    def test_nodes_and_edges(self, firm):
        s = mk({"b": ("Branch", {"location": "hq"}), "e": ("Employee", {"age": 3})},
               [("Employment", ("b", "e"))])
        dot = export_dot(s)
        assert '"b"' in dot and '"e"' in dot
        assert "location = 'hq'" in dot
        assert '"b" -> "e" [label="Employment"]' in dot

    def test_deterministic(self, firm):
        s = mk({"b": ("Branch", {}), "e": ("Employee", {})})
        assert export_dot(s) == export_dot(s)


scalar = st.one_of(
    st.booleans(),
    st.integers(-1000, 1000),
    st.text(alphabet="abc xyz_'!", max_size=6),
)
value = st.one_of(
    scalar,
    st.just(UNDEFINED),
    st.builds(ObjRef, st.sampled_from(["o1", "o2", "o3"])),
    st.builds(lambda xs: SetVal(frozenset(xs)), st.lists(st.integers(-5, 5), max_size=4)),
    st.builds(BagVal.of, st.lists(st.integers(-5, 5), max_size=4)),
)


@st.composite
def states(draw):
    names = draw(st.lists(st.sampled_from(["o1", "o2", "o3", "o4"]),
                          unique=True, max_size=4))
    objects = {}
    for n in names:
        cls = draw(st.sampled_from(["Branch", "Employee"]))
        attrs = draw(st.dictionaries(st.sampled_from(["a", "b", "c"]), value, max_size=3))
        objects[n] = (cls, attrs)
    links = set()
    if len(names) >= 2:
        for _ in range(draw(st.integers(0, 3))):
            a = draw(st.sampled_from(["R", "S"]))
            o1, o2 = draw(st.sampled_from(names)), draw(st.sampled_from(names))
            links.add((a, (o1, o2)))
    return SystemState(objects, frozenset(links))


class TestJsonRoundTrip:
    @given(states())
    def test_round_trip_identity(self, state):
        assert import_json(export_json(state)) == state

    def test_undefined_becomes_null(self, firm):
        s = mk({"e": ("Employee", {"age": UNDEFINED})})
        assert '"age": null' in export_json(s)
        assert import_json(export_json(s)).attr("e", "age") is UNDEFINED

    def test_real_tagged(self):
        s = mk({"e": ("Employee", {"rating": 1.5})})
        back = import_json(export_json(s))
        v = back.attr("e", "rating")
        assert isinstance(v, float) and v == 1.5
