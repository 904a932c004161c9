"""Tokenizer, model/OCL/state-command parsing, and round-trip printing."""

import pytest

from modelfinder.diagnostics import InputError
from modelfinder.ocl_ast import (AttrAccess, Binary, CollectionLit, CollectionOp,
                                 IntLit, Iterator, Navigation, RealLit, to_source)
from modelfinder.parsing import (parse_model, parse_ocl, parse_state_commands,
                                 print_model, tokenize)
from modelfinder.values import UNDEFINED

SMALL = """
model Small
class Person
  attributes
    name : String
    age : Integer
end
class Dog end
association Owns between
  Person [0..1] role owner ;
  Dog [0..*] role pet
end
constraints
context Person inv adult: self.age >= 18
"""


@pytest.fixture(scope="module")
def small():
    return parse_model(SMALL, "small.use")


class TestTokenizer:
    def test_symbols_longest_first(self):
        kinds = [t.value for t in tokenize("-> .. :: <> <= >= < > . : =")]
        assert kinds[:-1] == ["->", "..", "::", "<>", "<=", ">=", "<", ">", ".", ":", "="]

    def test_real_vs_range(self):
        toks = [t.value for t in tokenize("1..2 1.5")]
        assert toks[:4] == ["1", "..", "2", "1.5"]

    def test_comments_skipped(self):
        toks = tokenize("a -- the rest\nb")
        assert [t.value for t in toks][:2] == ["a", "b"]

    def test_string_literal(self):
        toks = tokenize("'hi there'")
        assert toks[0].kind == "STRING" and toks[0].value == "hi there"

    def test_locations_one_based(self):
        t = tokenize("\n  age")[0]
        assert (t.location.line, t.location.column) == (2, 3)

    def test_unterminated_string(self):
        with pytest.raises(InputError):
            tokenize("'oops")


class TestModelParsing:
    def test_structure(self, small):
        assert small.name == "Small"
        assert [c.name for c in small.classes] == ["Person", "Dog"]
        owns = small.get_association("Owns")
        assert owns.ends[0].role == "owner" and owns.ends[1].multiplicity.upper is None
        assert small.invariants[0].qualified_name == "Person::adult"

    def test_abstract_and_parents(self):
        m = parse_model("model M\nabstract class A end\nclass B < A end")
        assert m.get_class("A").is_abstract
        assert m.get_class("B").parents == ("A",)

    def test_syntax_error_located(self):
        with pytest.raises(InputError) as exc:
            parse_model("model M\nclass end")
        d = exc.value.diagnostics[0]
        assert d.location.line == 2

    def test_invariant_must_be_boolean(self):
        text = SMALL.replace("self.age >= 18", "self.age + 1")
        with pytest.raises(InputError):
            parse_model(text)

    def test_unknown_type(self):
        with pytest.raises(InputError):
            parse_model("model M\nclass A attributes x : Widget end")

    def test_print_parse_round_trip(self, small):
        assert parse_model(print_model(small)) == small

    def test_corpus_round_trip(self, corpus_model):
        assert parse_model(print_model(corpus_model)) == corpus_model


class TestOclParsing:
    def test_precedence_implies_weakest(self, small):
        e = parse_ocl("true or false implies false and true", "Person", small)
        assert isinstance(e, Binary) and e.op == "implies"
        assert e.left.op == "or" and e.right.op == "and"

    def test_implies_right_associative(self, small):
        e = parse_ocl("true implies false implies true", "Person", small)
        assert e.op == "implies" and e.right.op == "implies"

    def test_arithmetic_precedence(self, small):
        e = parse_ocl("1 + 2 * 3 = 7", "Person", small)
        assert e.op == "=" and e.left.op == "+" and e.left.right.op == "*"

    def test_implicit_self_attribute(self, small):
        e = parse_ocl("age >= 0", "Person", small)
        assert isinstance(e.left, AttrAccess)

    def test_navigation_and_iterator(self, small):
        e = parse_ocl("self.pet->forAll(d | true)", "Person", small)
        assert isinstance(e, Iterator) and e.kind == "forAll" and e.var == "d"
        assert isinstance(e.source, Navigation)

    def test_collection_literal(self, small):
        e = parse_ocl("Set{ 1, 2 }->includes(1)", "Person", small)
        assert isinstance(e.source, CollectionLit) and e.source.kind == "Set"

    def test_sequence_rejected(self, small):
        with pytest.raises(InputError) as exc:
            parse_ocl("Sequence{1, 2}->size() = 2", "Person", small)
        assert "Sequence" in str(exc.value.diagnostics[0])

    def test_source_slices_exact(self, small):
        e = parse_ocl("self.pet ->size()  >= 0", "Person", small)
        assert e.left.source_text() == "self.pet ->size()"
        assert e.left.source.source_text() == "self.pet"

    def test_to_source_reparses_equal(self, small):
        texts = [
            "self.age >= 18",
            "self.pet->collect(d | d)->size() = 0",
            "not (self.age < 0 or self.age > 100)",
            "Set{ 1, 2 }->union(Bag{ 3 })->size() >= 0",
            "self.pet->closure(owner.pet)->isEmpty()",
            "Person.allInstances()->exists(p | p.age = self.age)",
        ]
        for t in texts:
            e = parse_ocl(t, "Person", small)
            again = parse_ocl(to_source(e), "Person", small)
            assert again == e, t

    def test_real_literal(self, small):
        e = parse_ocl("1.5 + 1.5 >= 3.0", "Person", small)
        assert isinstance(e.left.left, RealLit)

    def test_unknown_name(self, small):
        with pytest.raises(InputError):
            parse_ocl("self.wings > 2", "Person", small)


class TestStateCommands:
    def test_create_set_insert(self, small):
        state = parse_state_commands("""
            !create ann : Person
            !create rex : Dog
            !set ann.age := 31
            !set ann.name := 'Ann'
            !insert (ann, rex) into Owns
        """, small)
        assert state.class_of("ann") == "Person"
        assert state.attr("ann", "age") == 31
        assert ("Owns", ("ann", "rex")) in state.links

    def test_unset_attribute_is_undefined(self, small):
        state = parse_state_commands("!create ann : Person", small)
        assert state.attr("ann", "age") is UNDEFINED

    def test_abstract_instantiation_rejected(self):
        m = parse_model("model M\nabstract class A end\nclass B < A end")
        with pytest.raises(InputError) as exc:
            parse_state_commands("!create a : A", m)
        assert "abstract" in str(exc.value.diagnostics[0])

    def test_duplicate_name_rejected(self, small):
        with pytest.raises(InputError):
            parse_state_commands("!create a : Dog\n!create a : Dog", small)

    def test_unknown_object_in_insert(self, small):
        with pytest.raises(InputError):
            parse_state_commands("!create a : Dog\n!insert (ghost, a) into Owns", small)

    def test_link_end_type_checked(self, small):
        with pytest.raises(InputError):
            parse_state_commands("!create a : Dog\n!create b : Dog\n!insert (a, b) into Owns", small)
