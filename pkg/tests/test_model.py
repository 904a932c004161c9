"""Class model structure and well-formedness rules."""

import pytest
from hypothesis import given, strategies as st

from modelfinder.model import (Association, AssociationEnd, Attribute, Class,
                               Invariant, Model, Multiplicity, check_well_formed)
from modelfinder.ocl_ast import BoolLit
from modelfinder.ocl_types import INTEGER, STRING


def mult(lo, hi):
    return Multiplicity(lo, hi)


def assoc(name, c1, m1, r1, c2, m2, r2):
    return Association(name, (AssociationEnd(r1, c1, m1), AssociationEnd(r2, c2, m2)))


class TestMultiplicity:
    def test_admits_inclusive_range(self):
        m = mult(1, 3)
        assert [m.admits(n) for n in range(5)] == [False, True, True, True, False]

    def test_unbounded_upper(self):
        m = mult(2, None)
        assert not m.admits(1)
        assert m.admits(2) and m.admits(10 ** 6)

    def test_rejects_negative_lower(self):
        with pytest.raises(ValueError):
            mult(-1, 3)

    def test_rejects_zero_upper(self):
        with pytest.raises(ValueError):
            mult(0, 0)

    def test_str_forms(self):
        assert str(mult(0, None)) == "0..*"
        assert str(mult(1, 1)) == "1"
        assert str(mult(0, 3)) == "0..3"

    @given(st.integers(0, 20), st.integers(1, 20), st.integers(-5, 25))
    def test_admits_matches_interval(self, lo, width, n):
        m = mult(lo, lo + width)
        assert m.admits(n) == (lo <= n <= lo + width)


class TestHierarchy:
    def model(self):
        return Model("M", classes=(
            Class("A", is_abstract=True, attributes=(Attribute("x", INTEGER),)),
            Class("B", parents=("A",), attributes=(Attribute("y", STRING),)),
            Class("C", parents=("B",)),
            Class("D"),
        ))

    def test_ancestors_transitive(self):
        m = self.model()
        assert m.ancestors("C") == ["B", "A"]
        assert m.ancestors("A") == []

    def test_conforms_to_reflexive_and_up(self):
        m = self.model()
        assert m.conforms_to("C", "C")
        assert m.conforms_to("C", "A")
        assert not m.conforms_to("A", "C")
        assert not m.conforms_to("D", "A")

    def test_concrete_descendants_skip_abstract(self):
        m = self.model()
        assert m.concrete_descendants("A") == ["B", "C"]
        assert m.concrete_descendants("D") == ["D"]

    def test_all_attributes_superclass_first(self):
        m = self.model()
        assert [a.name for a in m.all_attributes("C")] == ["x", "y"]

    def test_find_attribute_inherited(self):
        m = self.model()
        assert m.find_attribute("C", "x").type == INTEGER
        assert m.find_attribute("D", "x") is None

    def test_ancestors_oracle_reachability(self):
        # oracle: ancestors = reachable set over parent edges, brute force
        m = self.model()
        edges = {c.name: set(c.parents) for c in m.classes}
        for c in m.classes:
            reach, frontier = set(), set(edges[c.name])
            while frontier:
                n = frontier.pop()
                if n in reach:
                    continue
                reach.add(n)
                frontier |= edges.get(n, set())
            assert set(m.ancestors(c.name)) == reach


class TestNavigations:
    def model(self):
        return Model("M", classes=(
            Class("Person", is_abstract=True),
            Class("Employee", parents=("Person",)),
            Class("Branch"),
        ), associations=(
            assoc("Employment", "Branch", mult(1, 1), "employer",
                  "Employee", mult(1, None), "employee"),
        ))

    def test_resolve_navigation_role(self):
        m = self.model()
        a, i, j = m.resolve_navigation("Employee", "employer")
        assert a.name == "Employment" and (i, j) == (1, 0)
        a, i, j = m.resolve_navigation("Branch", "employee")
        assert a.name == "Employment" and (i, j) == (0, 1)

    def test_unknown_role(self):
        assert self.model().resolve_navigation("Employee", "boss") is None

    def test_navigation_not_shared_downward_only(self):
        # navigations attach where the end class matches or is an ancestor
        m = self.model()
        roles = [a.ends[j].role for a, i, j in m.navigations_from("Person")]
        assert roles == []  # Person is not an Employee


class TestWellFormedness:
    def test_clean_model_no_errors(self):
        m = Model("M", classes=(Class("A"), Class("B", parents=("A",))))
        assert check_well_formed(m) == []

    def test_duplicate_class(self):
        m = Model("M", classes=(Class("A"), Class("A")))
        assert any(e.code == "DuplicateClass" for e in check_well_formed(m))

    def test_unknown_parent(self):
        m = Model("M", classes=(Class("A", parents=("Ghost",)),))
        assert any(e.code == "UnknownClass" for e in check_well_formed(m))

    def test_generalization_cycle(self):
        m = Model("M", classes=(Class("A", parents=("B",)), Class("B", parents=("A",))))
        assert any(e.code == "CyclicGeneralization" for e in check_well_formed(m))

    def test_self_cycle(self):
        m = Model("M", classes=(Class("A", parents=("A",)),))
        assert any(e.code == "CyclicGeneralization" for e in check_well_formed(m))

    def test_cycle_detection_matches_reachability_oracle(self):
        # oracle: a cycle exists iff some class reaches itself
        import itertools
        names = ["A", "B", "C"]
        for bits in itertools.product([0, 1], repeat=6):
            edges = []
            k = 0
            for a in names:
                for b in names:
                    if a != b:
                        if bits[k]:
                            edges.append((a, b))
                        k += 1
            m = Model("M", classes=tuple(
                Class(n, parents=tuple(b for a, b in edges if a == n)) for n in names))

            def reaches(src, dst, seen=None):
                seen = seen or set()
                for a, b in edges:
                    if a == src and b not in seen:
                        if b == dst:
                            return True
                        seen.add(b)
                        if reaches(b, dst, seen):
                            return True
                return False

            has_cycle = any(reaches(n, n) for n in names)
            found = any(e.code == "CyclicGeneralization" for e in check_well_formed(m))
            assert found == has_cycle, edges

    def test_duplicate_attribute_including_inherited(self):
        m = Model("M", classes=(
            Class("A", attributes=(Attribute("x", INTEGER),)),
            Class("B", parents=("A",), attributes=(Attribute("x", STRING),)),
        ))
        assert any(e.code == "DuplicateAttribute" for e in check_well_formed(m))

    def test_association_unknown_class(self):
        m = Model("M", classes=(Class("A"),), associations=(
            assoc("R", "A", mult(0, None), "a", "Ghost", mult(0, None), "g"),))
        assert any(e.code == "UnknownClass" for e in check_well_formed(m))

    def test_ambiguous_role(self):
        m = Model("M", classes=(Class("A"), Class("B")), associations=(
            assoc("R1", "A", mult(0, None), "a", "B", mult(0, None), "other"),
            assoc("R2", "A", mult(0, None), "a2", "B", mult(0, None), "other"),
        ))
        assert any(e.code == "AmbiguousRole" for e in check_well_formed(m))

    def test_invariant_unknown_context(self):
        m = Model("M", classes=(Class("A"),),
                  invariants=(Invariant("Ghost", "i", BoolLit(value=True)),))
        assert any(e.code == "UnknownClass" for e in check_well_formed(m))
