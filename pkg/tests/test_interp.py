import pytest

from xcomkit.errors import EvalError
from xcomkit.interp import eval_exp, exec_statement, run_program
from xcomkit.syntax import (
    BinExp,
    Block,
    Const,
    FieldRef,
    New,
    Update,
    ValueDeclaration,
    Var,
    While,
    parse_program,
    parse_statement,
)
from xcomkit.values import NULL, Env, IntV, RecordV, TypeDesc, show

# Values fixed beforehand by an independent simulation of the loop.
EVEN_HEADS = list(range(2, 101, 2))


def spine(v):
    heads = []
    while v.type_ref.name == "Pair":
        heads.append(v.lookup("head").value)
        v = v.lookup("tail")
    return heads, v


def run(text):
    return run_program(parse_program(text))


def test_eval_simple_expressions():
    assert eval_exp(BinExp("+", Const(1), Const(2)), Env.empty()) == IntV(3)
    env = Env.empty().bind_type("Nil", TypeDesc((), "Nil"))
    r = eval_exp(New("Nil"), env)
    assert isinstance(r, RecordV) and r.fields == []


def test_field_write_then_read():
    env = run("begin type Pair is head tail end value pair is new Pair end pair.head := 7; end")
    assert eval_exp(FieldRef(Var("pair"), "head"), env) == IntV(7)
    assert eval_exp(FieldRef(Var("pair"), "tail"), env) is NULL


def test_declaration_extends_env():
    env = exec_statement(ValueDeclaration("x", Const(1)), Env.empty())
    assert env.lookup("x") == IntV(1)


def test_block_locals_drop_out_of_scope():
    env = exec_statement(Block((ValueDeclaration("x", Const(1)),)), Env.empty())
    assert env.is_empty()


def test_false_loop_never_runs_body():
    env = Env.empty()
    body = Update("missing", Const(1))
    assert exec_statement(While(Const(False), body), env) is env


def test_block_mutates_outer_bindings():
    env = run("begin value x is 1 end begin x := x + 1; end end")
    assert env.lookup("x") == IntV(2)


def test_update_after_scope_ends_is_unbound():
    with pytest.raises(EvalError, match="Unbound variable x"):
        run("begin begin value x is 1 end end x := 2; end")


def test_empty_program():
    assert run("begin end").is_empty()


def test_else_less_if_does_nothing_on_false():
    env = run("begin value x is 1 end if false then x := 2; end end")
    assert env.lookup("x") == IntV(1)


def test_if_chooses_one_branch():
    env = run("begin value x is 1 end if x = 1 then x := 2; else x := 3; end end")
    assert env.lookup("x") == IntV(2)


def test_loop_body_declarations_are_fresh_each_iteration():
    env = run(
        """begin
             value n is 3 end value total is 0 end
             while n > 0 do begin value k is n end total := total + k; n := n - 1; end end
           end"""
    )
    assert env.lookup("total") == IntV(6)


def test_operands_are_evaluated_strictly():
    with pytest.raises(EvalError):
        run("begin value x is false and 1 > true end end")


def test_non_boolean_test_is_an_error():
    with pytest.raises(EvalError, match="boolean"):
        run("begin while 1 do begin end end end")


def test_error_locations_point_at_the_construct():
    with pytest.raises(EvalError) as info:
        run("begin\n  value x is new Cell end\nend")
    assert str(info.value.loc) == "2:14"


def test_shadowed_type_in_inner_block():
    env = run(
        """begin
             type T is a end
             value r is new T end
             begin type T is b c end value s is new T end r.a := 1; end
           end"""
    )
    assert show(env.lookup("r")) == "T[a=1]"


def test_even_list(even_list):
    env = run_program(even_list)
    heads, rest = spine(env.lookup("list"))
    assert heads == EVEN_HEADS
    assert rest.type_ref.name == "Nil"
    assert env.lookup("length") == IntV(0)
