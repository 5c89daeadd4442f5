"""Direct evaluator over XCom syntax trees."""

from __future__ import annotations

from .errors import EvalError
from .syntax import (
    BinExp,
    Block,
    Const,
    Exp,
    FieldRef,
    FieldUpdate,
    If,
    New,
    Statement,
    TypeDeclaration,
    Update,
    ValueDeclaration,
    Var,
    While,
)
from .values import (
    BoolV,
    Env,
    IntV,
    TypeDesc,
    apply_binop,
    record_lookup,
    record_update,
    truth,
)


def eval_exp(e: Exp, env: Env):
    match e:
        case Const(value) if isinstance(value, bool):
            return BoolV(value)
        case Const(value):
            return IntV(value)
        case Var(name):
            return env.lookup(name, e.loc)
        case BinExp(op, left, right):
            # strict: both operands are evaluated before the operator applies
            a = eval_exp(left, env)
            b = eval_exp(right, env)
            return apply_binop(op, a, b, e.loc)
        case New(type_name):
            return env.lookup_type(type_name, e.loc).new()
        case FieldRef(target, name):
            return _located(record_lookup, e, eval_exp(target, env), name)
    raise TypeError(f"not an expression: {e!r}")


def exec_statement(s: Statement, env: Env) -> Env:
    match s:
        case ValueDeclaration(name, init):
            return env.bind(name, eval_exp(init, env))
        case TypeDeclaration(name, names):
            return env.bind_type(name, TypeDesc(names, name))
        case Block(statements):
            inner = env
            for stmt in statements:
                inner = exec_statement(stmt, inner)
            return env
        case While(test, body):
            while truth(eval_exp(test, env), "while", s.loc):
                exec_statement(body, env)
            return env
        case If(test, then_part, else_part):
            if truth(eval_exp(test, env), "if", s.loc):
                return exec_statement(then_part, env)
            if else_part is not None:
                return exec_statement(else_part, env)
            return env
        case Update(name, value):
            env.update(name, eval_exp(value, env), s.loc)
            return env
        case FieldUpdate(target, name, value):
            record = eval_exp(target, env)
            v = eval_exp(value, env)
            _located(record_update, s, record, name, v)
            return env
    raise TypeError(f"not a statement: {s!r}")


def _located(fn, node, *args):
    try:
        return fn(*args)
    except EvalError as err:
        if err.loc is None:
            err.loc = node.loc
        raise


def top_level(s: Statement) -> tuple[Statement, ...]:
    """The statements whose bindings form a program's observable scope."""
    if isinstance(s, Block):
        return s.statements
    return (s,)


def run_program(s: Statement) -> Env:
    """Run a closed program from the empty environment.

    The outermost block's own scope is kept and returned rather than
    discarded, so its declarations can be inspected after the run.
    """
    env = Env.empty()
    for stmt in top_level(s):
        env = exec_statement(stmt, env)
    return env
