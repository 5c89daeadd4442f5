import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from xcomkit.errors import EvalError
from xcomkit.values import (
    BINARY_OPS,
    FALSE,
    NULL,
    TRUE,
    AList,
    BoolV,
    Env,
    IntV,
    RecordV,
    TypeDesc,
    bin_add,
    bin_and,
    bin_eq,
    bin_mod,
    instantiate,
    record_lookup,
    record_update,
    show,
)

PAIR = TypeDesc(("head", "tail"), "Pair")
NIL = TypeDesc((), "Nil")


@pytest.mark.parametrize("a, b", list(itertools.product([True, False], repeat=2)))
def test_and_or_truth_tables(a, b):
    assert BINARY_OPS["and"](BoolV(a), BoolV(b)) == BoolV(a and b)
    assert BINARY_OPS["or"](BoolV(a), BoolV(b)) == BoolV(a or b)


# the four operand-kind pairs for a boolean operator: only (bool, bool) is legal
@pytest.mark.parametrize(
    "a, b", [(IntV(1), TRUE), (TRUE, IntV(1)), (IntV(1), IntV(2))]
)
def test_and_rejects_non_booleans(a, b):
    with pytest.raises(EvalError):
        bin_and(a, b)


def test_arithmetic():
    assert bin_add(IntV(1), IntV(2)) == IntV(3)
    assert bin_mod(IntV(100), IntV(2)) == IntV(0)
    assert BINARY_OPS["-"](IntV(1), IntV(3)) == IntV(-2)
    assert BINARY_OPS[">"](IntV(2), IntV(1)) == TRUE
    assert BINARY_OPS["<"](IntV(2), IntV(1)) == FALSE


def test_mod_by_zero():
    with pytest.raises(EvalError, match="mod by zero"):
        bin_mod(IntV(1), IntV(0))


@pytest.mark.parametrize("op", ["+", "-", "mod", ">", "<"])
def test_integer_ops_reject_booleans(op):
    with pytest.raises(EvalError):
        BINARY_OPS[op](TRUE, IntV(1))


def test_equality_on_atoms_and_records():
    assert bin_eq(IntV(1), IntV(1)) == TRUE
    assert bin_eq(IntV(1), TRUE) == FALSE
    assert bin_eq(NULL, NULL) == TRUE
    r, s = PAIR.new(), PAIR.new()
    assert bin_eq(r, r) == TRUE
    assert bin_eq(r, s) == FALSE


def test_fresh_record_fields_are_null():
    r = instantiate(PAIR)
    assert record_lookup(r, "head") is NULL
    assert record_lookup(r, "tail") is NULL
    assert instantiate(NIL).fields == []
    assert instantiate(PAIR) is not instantiate(PAIR)


def test_record_update_then_lookup():
    r = PAIR.new()
    record_update(r, "head", IntV(5))
    assert record_lookup(r, "head") == IntV(5)
    record_update(r, "head", IntV(6))
    assert record_lookup(r, "head") == IntV(6)
    assert record_lookup(r, "tail") is NULL


def test_unknown_field_names_type_and_field():
    r = PAIR.new()
    with pytest.raises(EvalError, match="Pair has no field tali"):
        record_lookup(r, "tali")
    with pytest.raises(EvalError):
        record_update(r, "tali", IntV(1))


def test_alist_bind_is_persistent_and_set_mutates():
    empty = AList()
    one = empty.bind("head", NULL)
    assert empty.pairs == []
    assert one.lookup("head") is NULL
    one.set("head", IntV(3))
    assert one.lookup("head") == IntV(3)
    with pytest.raises(EvalError):
        one.lookup("tail")


def test_env_shadowing_and_locality():
    e0 = Env.empty()
    e1 = e0.bind("x", IntV(1))
    e2 = e1.bind("x", IntV(2))
    assert e1.lookup("x") == IntV(1)
    assert e2.lookup("x") == IntV(2)
    with pytest.raises(EvalError, match="Unbound variable x"):
        e0.lookup("x")


def test_env_update_is_seen_through_shared_bindings():
    outer = Env.empty().bind("x", IntV(1))
    inner = outer.bind("y", IntV(0))
    inner.update("x", IntV(2))
    assert outer.lookup("x") == IntV(2)
    with pytest.raises(EvalError):
        inner.update("z", IntV(0))


def test_types_and_values_live_in_one_namespace():
    env = Env.empty().bind_type("T", PAIR).bind("v", IntV(1))
    assert env.lookup_type("T") is PAIR
    with pytest.raises(EvalError, match="is a type"):
        env.lookup("T")
    with pytest.raises(EvalError, match="Unknown type U"):
        env.lookup_type("U")
    with pytest.raises(EvalError):
        env.update("T", IntV(1))


def test_show_typed_and_comparison_modes():
    r = PAIR.new()
    record_update(r, "head", IntV(2))
    record_update(r, "tail", NIL.new())
    assert show(r) == "Pair[head=2,tail=Nil[]]"
    assert show(r, type_names=False) == "[head=2,tail=[]]"
    a = AList().bind("head", IntV(2)).bind("tail", AList())
    assert show(a, type_names=False) == show(r, type_names=False)


def test_show_marks_cycles():
    r = PAIR.new()
    record_update(r, "tail", r)
    assert show(r, False) == "[head=null,tail=<loop>]"


def test_show_shared_but_acyclic_structure_prints_twice():
    leaf = NIL.new()
    r = PAIR.new()
    record_update(r, "head", leaf)
    record_update(r, "tail", leaf)
    assert show(r, False) == "[head=[],tail=[]]"


@given(st.integers(), st.integers())
def test_integer_ops_match_python(a, b):
    assert bin_add(IntV(a), IntV(b)) == IntV(a + b)
    assert BINARY_OPS["-"](IntV(a), IntV(b)) == IntV(a - b)
    assert BINARY_OPS["="](IntV(a), IntV(b)) == BoolV(a == b)
    if b:
        assert bin_mod(IntV(a), IntV(b)) == IntV(a % b)


@given(st.lists(st.tuples(st.sampled_from("abcd"), st.integers()), max_size=8))
def test_env_lookup_finds_latest_binding(pairs):
    env = Env.empty()
    latest = {}
    for name, n in pairs:
        env = env.bind(name, IntV(n))
        latest[name] = IntV(n)
    for name, v in latest.items():
        assert env.lookup(name) == v
