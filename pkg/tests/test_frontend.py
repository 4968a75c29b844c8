import random

import pytest
from hypothesis import given, settings, strategies as st

from sckr.corpus import random_sckr
from sckr.frontend import (CkrSyntaxError, CkrValidationError, format_axiom, parse,
                           parse_query, serialize)
from sckr.model import SCKR, ContextStructure, NormalAxiom, QueryAtom

from conftest import EX1_TEXT

SMALL = ("context c1 level 0. context c0 level 1. c0 < c1. "
         "module c1 { D(A => B). } module c0 { A(a). -B(a). }")


def test_small_document():
    k = parse(SMALL)
    assert k.structure.contexts == {"c0", "c1"}
    assert k.structure.covers == {("c0", "c1")}
    axs = [ax for _, ax in k.axioms()]
    assert len(axs) == 3
    assert sum(ax.defeasible for ax in axs) == 1
    assert k.symbols.individuals == {"a"} and k.symbols.concepts == {"A", "B"}


def test_undeclared_context():
    with pytest.raises(CkrValidationError, match="undeclared context cX"):
        parse("module cX { A(a). }")


def test_defeasible_eval():
    with pytest.raises(CkrValidationError, match="eval axioms cannot be defeasible"):
        parse("context c1 level 0. module c1 { D(eval(A,c1) => B). }")


def test_syntax_error_has_position():
    with pytest.raises(CkrSyntaxError) as exc:
        parse("context c1 level 0.\nmodule c1 { A(a) }")
    assert "2:" in str(exc.value)


def test_comments_and_whitespace():
    k = parse("% header\ncontext c level 0.   % trailing\nmodule c {\n  A(a).\n}\n")
    assert [ax for _, ax in k.axioms()] == [NormalAxiom("inst", ("A", "a"))]


ALL_SHAPES = """
context c level 1. context u level 0. c < u.
module u { D(A => B). }
module c {
  A(a). -A(b). R(a,b). -R(b,a). a = b. a != b. {a} => A. Top(a). Bot(b).
  A => B. A and B => C. R some A => B. A => R some {a}. A => R only B. A => max1 R.
  R =>r S. R o S =>r T. Dis(R,S). Inv(R,S). Irr(R). eval(A,u) => B. evalr(R,u) =>r S.
}
"""


def test_every_shape_parses_and_round_trips():
    k = parse(ALL_SHAPES)
    kinds = {ax.kind for _, ax in k.axioms()}
    assert len(kinds) == 22
    assert parse(serialize(k)) == k


def test_kind_conflict_is_a_diagnostic():
    with pytest.raises(CkrValidationError, match="name A used as"):
        parse("context c level 0. module c { A(a). R(A,b). }")


def test_serialize_empty():
    assert serialize(SCKR(ContextStructure(frozenset(), frozenset(), {}), {})) == ""


def test_serialize_ex1_has_one_defeasible_marker():
    assert serialize(parse(EX1_TEXT)).count("D(") == 1


def test_serialize_is_canonical_order():
    text = serialize(parse(SMALL))
    assert text.index("context c1") < text.index("context c0")
    assert text.splitlines()[2] == "c0 < c1."


def test_format_axiom():
    assert format_axiom(NormalAxiom("subcnj", ("A", "B", "C"), True)) == "D(A and B => C)"
    assert format_axiom(NormalAxiom("supex", ("A", "R", "a"))) == "A => R some {a}"


def test_parse_query():
    assert parse_query("A(a)@c") == QueryAtom("c", "a", "A")
    assert parse_query(" R( a , b ) @ c ") == QueryAtom("c", "a", "R", "b")
    with pytest.raises(CkrSyntaxError):
        parse_query("A(?x)@c")
    assert parse_query("A(?x)@c", allow_vars=True).subject == "?x"
    with pytest.raises(CkrSyntaxError):
        parse_query("A(a)")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_round_trip_random(seed, ranked):
    k = random_sckr(random.Random(seed), ranked=ranked)
    again = parse(serialize(k))
    assert again == k
    assert serialize(again) == serialize(k)


TOKENS = ["context", "level", "module", "c", "a", "A", "R", "0", "1", ".", "{", "}", "(", ")",
          ",", "<", "=>", "=>r", "D(", "-", "and", "some", "only", "max1", "!=", "=", "%x\n",
          "eval(", "Top(", " "]


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(TOKENS), max_size=30))
def test_parse_is_total(tokens):
    try:
        parse(" ".join(tokens))
    except (CkrSyntaxError, CkrValidationError):
        pass


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=40))
def test_parse_is_total_on_arbitrary_text(text):
    try:
        parse(text)
    except (CkrSyntaxError, CkrValidationError):
        pass
