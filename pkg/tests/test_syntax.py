import json

import pytest

from xcomkit.errors import Loc, ParseError
from xcomkit.samples import EVEN_LIST
from xcomkit.syntax import (
    BinExp,
    Block,
    Const,
    FieldRef,
    FieldUpdate,
    If,
    New,
    TypeDeclaration,
    Update,
    ValueDeclaration,
    Var,
    While,
    dump_ast,
    dumps_json,
    parse_exp,
    parse_program,
    parse_statement,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("true", Const(True)),
        ("false", Const(False)),
        ("42", Const(42)),
        ("length > 0", BinExp(">", Var("length"), Const(0))),
        ("a + b and c", BinExp("and", BinExp("+", Var("a"), Var("b")), Var("c"))),
        ("a - b - c", BinExp("-", Var("a"), BinExp("-", Var("b"), Var("c")))),
        ("a mod 2 = 0", BinExp("=", BinExp("mod", Var("a"), Const(2)), Const(0))),
        ("x + y mod 3", BinExp("+", Var("x"), BinExp("mod", Var("y"), Const(3)))),
        ("(a - b) - c", BinExp("-", BinExp("-", Var("a"), Var("b")), Var("c"))),
        ("p.head.tail", FieldRef(FieldRef(Var("p"), "head"), "tail")),
        ("p.head + 1", BinExp("+", FieldRef(Var("p"), "head"), Const(1))),
        ("new Pair", New("Pair")),
        ("a or b and c", BinExp("or", Var("a"), BinExp("and", Var("b"), Var("c")))),
    ],
)
def test_parse_exp(text, expected):
    assert parse_exp(text) == expected


def test_bool_and_int_constants_differ():
    assert Const(True) != Const(1)
    assert Const(0) != Const(False)
    assert parse_exp("1") != parse_exp("true")


@pytest.mark.parametrize(
    "text, expected",
    [
        ("type Nil is end", TypeDeclaration("Nil", ())),
        ("type Pair is head tail end", TypeDeclaration("Pair", ("head", "tail"))),
        ("x := 1;", Update("x", Const(1))),
        ("begin end", Block(())),
        ("value x is 1 end", ValueDeclaration("x", Const(1))),
        ("p.head := 3;", FieldUpdate(Var("p"), "head", Const(3))),
        ("p.tail.head := 3;", FieldUpdate(FieldRef(Var("p"), "tail"), "head", Const(3))),
        ("while x > 0 do x := x - 1; end",
         While(BinExp(">", Var("x"), Const(0)), Update("x", BinExp("-", Var("x"), Const(1))))),
        ("if b then x := 1; end", If(Var("b"), Update("x", Const(1)))),
        ("if b then x := 1; else x := 2; end",
         If(Var("b"), Update("x", Const(1)), Update("x", Const(2)))),
    ],
)
def test_parse_statement(text, expected):
    assert parse_statement(text) == expected


def test_comments_are_skipped():
    s = parse_statement("begin // a comment\n  x := 1; // another\nend")
    assert s == Block((Update("x", Const(1)),))


def test_several_top_level_statements_form_a_block():
    assert parse_program("x := 1; y := 2;") == Block((Update("x", Const(1)), Update("y", Const(2))))
    assert parse_program("x := 1;") == Update("x", Const(1))


@pytest.mark.parametrize(
    "text, loc",
    [
        ("x := ;", Loc(1, 6)),
        ("begin\n  x := 1\nend", Loc(3, 1)),
        ("value end is 1 end", Loc(1, 7)),
        ("x := 1", Loc(1, 7)),
        ("1 := 2;", Loc(1, 1)),
        ("x := 1 # 2;", Loc(1, 8)),
    ],
)
def test_parse_errors_carry_locations(text, loc):
    with pytest.raises(ParseError) as info:
        parse_program(text)
    assert info.value.loc == loc


def test_duplicate_field_names_are_rejected():
    with pytest.raises(ParseError, match="duplicate field"):
        parse_statement("type T is a b a end")


def test_deep_nesting_is_a_parse_error_not_a_crash():
    with pytest.raises(ParseError):
        parse_exp("(" * 5000 + "1" + ")" * 5000)


def test_locations_are_recorded():
    s = parse_program("begin\n  x := 1;\nend")
    assert s.statements[0].loc == Loc(2, 3)


def test_dump_of_small_nodes():
    assert dump_ast(Block(())) == "Block"
    assert dump_ast(Update("x", Const(1))) == "Update x\n  value: Const 1"


def test_dump_of_even_list_counts_declarations(even_list):
    lines = dump_ast(even_list).splitlines()
    heads = [line.split(":")[-1].split()[0] for line in lines]
    assert heads.count("TypeDeclaration") == 2
    assert heads.count("ValueDeclaration") == 3  # length, list, and pair in the loop
    top = [line for line in lines if line.startswith("  ") and not line.startswith("   ")]
    assert sum("ValueDeclaration" in line for line in top) == 2


def test_json_has_kind_tags():
    data = json.loads(dumps_json(parse_program(EVEN_LIST)))
    assert data["kind"] == "Block"
    assert [s["kind"] for s in data["statements"]] == [
        "TypeDeclaration", "TypeDeclaration", "ValueDeclaration", "ValueDeclaration", "While",
    ]
    assert data["statements"][0]["fields"] == ["head", "tail"]
