"""Translators from XCom onto the core language.

``desugar1`` keeps types as run-time values. ``desugar2`` resolves types
during translation against a type environment and erases them: records
become a-lists and type declarations leave nothing behind.

Statements are translated in continuation-passing style. For ``desugar1``
the continuation is the core expression that runs next; for ``desugar2`` it
is a function from the type environment in force to that expression.
"""

from __future__ import annotations

from typing import Callable

from .core import (
    NULL_EXP,
    CAListBind,
    CAListEmpty,
    CAListGet,
    CAListSet,
    CAssign,
    CBin,
    CFieldGet,
    CFieldSet,
    CIf,
    CLet,
    CLit,
    CMakeType,
    CNewOf,
    CoreExp,
    CSeq,
    CVar,
    CWhile,
    walk,
)
from .errors import StaticError
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
from .values import BoolV, IntV, TypeDesc


class TypeEnv:
    """Translation-time bindings from type names to record types."""

    __slots__ = ("name", "type", "parent")

    def __init__(self, name=None, type: TypeDesc | None = None, parent=None):
        self.name = name
        self.type = type
        self.parent = parent

    def bind(self, name: str, t: TypeDesc) -> "TypeEnv":
        return TypeEnv(name, t, self)

    def lookup(self, name: str) -> TypeDesc | None:
        env = self
        while env is not None and env.name is not None:
            if env.name == name:
                return env.type
            env = env.parent
        return None

    def binds(self, name: str) -> bool:
        return self.lookup(name) is not None


EMPTY_TYPE_ENV = TypeEnv()


def _lit(value: bool | int) -> CLit:
    return CLit(BoolV(value) if isinstance(value, bool) else IntV(value))


# -- run-time types ----------------------------------------------------------


def desugar1_exp(e: Exp) -> CoreExp:
    match e:
        case Const(value):
            return _lit(value)
        case Var(name):
            return CVar(name)
        case BinExp(op, left, right):
            return CBin(op, desugar1_exp(left), desugar1_exp(right))
        case New(type_name):
            return CNewOf(CVar(type_name))
        case FieldRef(target, name):
            return CFieldGet(desugar1_exp(target), name)
    raise TypeError(f"not an expression: {e!r}")


def desugar1_statements(statements, next: CoreExp) -> CoreExp:
    result = next
    for s in reversed(statements):
        result = desugar1_stmt(s, result)
    return result


def desugar1_stmt(s: Statement, next: CoreExp) -> CoreExp:
    match s:
        case TypeDeclaration(name, names):
            return CLet(name, CMakeType(names, name), next)
        case ValueDeclaration(name, init):
            return CLet(name, desugar1_exp(init), next)
        case Block(statements):
            return CSeq(desugar1_statements(statements, NULL_EXP), next)
        case While(test, body):
            return CSeq(CWhile(desugar1_exp(test), desugar1_stmt(body, NULL_EXP)), next)
        case If(test, then_part, else_part):
            orelse = next if else_part is None else desugar1_stmt(else_part, next)
            return CIf(desugar1_exp(test), desugar1_stmt(then_part, next), orelse)
        case Update(name, value):
            return CSeq(CAssign(name, desugar1_exp(value)), next)
        case FieldUpdate(target, name, value):
            return CSeq(CFieldSet(desugar1_exp(target), name, desugar1_exp(value)), next)
    raise TypeError(f"not a statement: {s!r}")


# -- translation-time types --------------------------------------------------

Continuation = Callable[[TypeEnv], CoreExp]


def _null(_: TypeEnv) -> CoreExp:
    return NULL_EXP


def desugar2_exp(e: Exp, type_env: TypeEnv) -> CoreExp:
    match e:
        case Const(value):
            return _lit(value)
        case Var(name):
            return CVar(name)
        case BinExp(op, left, right):
            return CBin(op, desugar2_exp(left, type_env), desugar2_exp(right, type_env))
        case New(type_name):
            t = type_env.lookup(type_name)
            if t is None:
                raise StaticError(f"Unknown type {type_name}", e.loc)
            alist: CoreExp = CAListEmpty()
            for name in t.names:
                alist = CAListBind(alist, name, NULL_EXP)
            return alist
        case FieldRef(target, name):
            return CAListGet(desugar2_exp(target, type_env), name)
    raise TypeError(f"not an expression: {e!r}")


def desugar2_statements(statements, type_env: TypeEnv, next: Continuation) -> CoreExp:
    if not statements:
        return next(type_env)
    first, rest = statements[0], statements[1:]
    return desugar2_stmt(first, type_env, lambda te: desugar2_statements(rest, te, next))


def desugar2_stmt(s: Statement, type_env: TypeEnv, next: Continuation) -> CoreExp:
    match s:
        case TypeDeclaration(name, names):
            return next(type_env.bind(name, TypeDesc(names, name)))
        case ValueDeclaration(name, init):
            return CLet(name, desugar2_exp(init, type_env), next(type_env))
        case Block(statements):
            # the inner type environment is dropped: types are block-scoped
            return CSeq(desugar2_statements(statements, type_env, _null), next(type_env))
        case While(test, body):
            loop = CWhile(desugar2_exp(test, type_env), desugar2_stmt(body, type_env, _null))
            return CSeq(loop, next(type_env))
        case If(test, then_part, else_part):
            t = desugar2_exp(test, type_env)
            then = desugar2_stmt(then_part, type_env, next)
            orelse = next(type_env) if else_part is None else desugar2_stmt(else_part, type_env, next)
            return CIf(t, then, orelse)
        case Update(name, value):
            return CSeq(CAssign(name, desugar2_exp(value, type_env)), next(type_env))
        case FieldUpdate(target, name, value):
            update = CAListSet(desugar2_exp(target, type_env), name, desugar2_exp(value, type_env))
            return CSeq(update, next(type_env))
    raise TypeError(f"not a statement: {s!r}")


# -- whole programs ----------------------------------------------------------

_OBS_TYPE = "%observed"
_OBS = "%obs"


def observed_names(program: Statement) -> list[str]:
    """Value names declared directly in the program's outermost scope."""
    names: list[str] = []
    for s in _top(program):
        if isinstance(s, ValueDeclaration) and s.name not in names:
            names.append(s.name)
    return names


def _top(program: Statement):
    return program.statements if isinstance(program, Block) else (program,)


def desugar1_program(program: Statement, observe: bool = False) -> CoreExp:
    """Translate a program; with ``observe`` the result evaluates to a record
    holding the outermost scope's values."""
    if not observe:
        return desugar1_stmt(program, NULL_EXP)
    names = observed_names(program)
    body: CoreExp = CVar(_OBS)
    for n in reversed(names):
        body = CSeq(CFieldSet(CVar(_OBS), n, CVar(n)), body)
    tail = CLet(_OBS_TYPE, CMakeType(tuple(names)), CLet(_OBS, CNewOf(CVar(_OBS_TYPE)), body))
    return desugar1_statements(_top(program), tail)


def desugar2_program(program: Statement, observe: bool = False) -> CoreExp:
    if not observe:
        return desugar2_stmt(program, EMPTY_TYPE_ENV, _null)
    names = observed_names(program)

    def tail(_: TypeEnv) -> CoreExp:
        alist: CoreExp = CAListEmpty()
        for n in names:
            alist = CAListBind(alist, n, CVar(n))
        return alist

    return desugar2_statements(_top(program), EMPTY_TYPE_ENV, tail)


TYPED_NODES = (CMakeType, CNewOf, CFieldGet, CFieldSet)


def is_type_erased(e: CoreExp) -> bool:
    return not any(isinstance(node, TYPED_NODES) for node in walk(e))
