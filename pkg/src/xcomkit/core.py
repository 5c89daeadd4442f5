"""The core language both translators target, and its evaluator.

Every core expression has a value; loops and assignments yield null.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .errors import EvalError
from .values import (
    NULL,
    AList,
    BoolV,
    Env,
    IntV,
    NullV,
    RecordV,
    TypeDesc,
    apply_binop,
    record_lookup,
    record_update,
    truth,
)


@dataclass(frozen=True)
class CLit:
    value: BoolV | IntV | NullV


@dataclass(frozen=True)
class CVar:
    name: str


@dataclass(frozen=True)
class CLet:
    name: str
    init: "CoreExp"
    body: "CoreExp"


@dataclass(frozen=True)
class CSeq:
    first: "CoreExp"
    second: "CoreExp"


@dataclass(frozen=True)
class CAssign:
    name: str
    value: "CoreExp"


@dataclass(frozen=True)
class CWhile:
    test: "CoreExp"
    body: "CoreExp"


@dataclass(frozen=True)
class CIf:
    test: "CoreExp"
    then: "CoreExp"
    orelse: "CoreExp"


@dataclass(frozen=True)
class CBin:
    op: str
    left: "CoreExp"
    right: "CoreExp"


@dataclass(frozen=True)
class CMakeType:
    field_names: tuple[str, ...]
    name: str | None = None  # display only


@dataclass(frozen=True)
class CNewOf:
    type_exp: "CoreExp"


@dataclass(frozen=True)
class CFieldGet:
    rec: "CoreExp"
    name: str


@dataclass(frozen=True)
class CFieldSet:
    rec: "CoreExp"
    name: str
    value: "CoreExp"


@dataclass(frozen=True)
class CAListEmpty:
    pass


@dataclass(frozen=True)
class CAListBind:
    alist: "CoreExp"
    key: str
    value: "CoreExp"


@dataclass(frozen=True)
class CAListGet:
    alist: "CoreExp"
    key: str


@dataclass(frozen=True)
class CAListSet:
    alist: "CoreExp"
    key: str
    value: "CoreExp"


CoreExp = Union[
    CLit, CVar, CLet, CSeq, CAssign, CWhile, CIf, CBin, CMakeType, CNewOf,
    CFieldGet, CFieldSet, CAListEmpty, CAListBind, CAListGet, CAListSet,
]

NULL_EXP = CLit(NULL)


def children(e: CoreExp) -> tuple[CoreExp, ...]:
    match e:
        case CLet(_, init, body):
            return (init, body)
        case CSeq(a, b):
            return (a, b)
        case CAssign(_, v):
            return (v,)
        case CWhile(t, b):
            return (t, b)
        case CIf(t, a, b):
            return (t, a, b)
        case CBin(_, a, b):
            return (a, b)
        case CNewOf(t):
            return (t,)
        case CFieldGet(r, _) | CAListGet(r, _):
            return (r,)
        case CFieldSet(r, _, v) | CAListBind(r, _, v) | CAListSet(r, _, v):
            return (r, v)
    return ()


def walk(e: CoreExp) -> Iterator[CoreExp]:
    """Every node of ``e``, pre-order, without recursion."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


# -- evaluation --------------------------------------------------------------


def core_eval(e: CoreExp, env: Env | None = None):
    env = Env.empty() if env is None else env
    return _eval(e, env)


def _eval(e: CoreExp, env: Env):
    match e:
        case CLit(value):
            return value
        case CVar(name):
            return env.lookup(name)
        case CLet(name, init, body):
            v = _eval(init, env)
            if isinstance(v, TypeDesc):
                return _eval(body, env.bind_type(name, v))
            return _eval(body, env.bind(name, v))
        case CSeq(first, second):
            _eval(first, env)
            return _eval(second, env)
        case CAssign(name, value):
            env.update(name, _eval(value, env))
            return NULL
        case CWhile(test, body):
            while truth(_eval(test, env), "while"):
                _eval(body, env)
            return NULL
        case CIf(test, then, orelse):
            if truth(_eval(test, env), "if"):
                return _eval(then, env)
            return _eval(orelse, env)
        case CBin(op, left, right):
            a = _eval(left, env)
            b = _eval(right, env)
            return apply_binop(op, a, b)
        case CMakeType(names, name):
            return TypeDesc(names, name)
        case CNewOf(CVar(name)):
            return env.lookup_type(name).new()
        case CNewOf(type_exp):
            t = _eval(type_exp, env)
            if not isinstance(t, TypeDesc):
                raise EvalError("new expects a type")
            return t.new()
        case CFieldGet(rec, name):
            r = _eval(rec, env)
            if not isinstance(r, RecordV):
                raise EvalError(f"field reference .{name} on a non-record")
            return record_lookup(r, name)
        case CFieldSet(rec, name, value):
            r = _eval(rec, env)
            v = _eval(value, env)
            if not isinstance(r, RecordV):
                raise EvalError(f"field update .{name} on a non-record")
            record_update(r, name, v)
            return NULL
        case CAListEmpty():
            return AList()
        case CAListBind(alist, key, value):
            lst = _alist(_eval(alist, env), key)
            return lst.bind(key, _eval(value, env))
        case CAListGet(alist, key):
            return _alist(_eval(alist, env), key).lookup(key)
        case CAListSet(alist, key, value):
            lst = _alist(_eval(alist, env), key)
            lst.set(key, _eval(value, env))
            return NULL
    raise TypeError(f"not a core expression: {e!r}")


def _alist(v, key: str) -> AList:
    if not isinstance(v, AList):
        raise EvalError(f"field .{key} of a non-record")
    return v


# -- rendering ---------------------------------------------------------------


def _atom(v) -> str:
    match v:
        case BoolV(b):
            return "true" if b else "false"
        case IntV(n):
            return str(n)
    return "null"


def to_sexp(e: CoreExp):
    """Nested-list form: atoms are strings, constructs are lists led by a head."""
    match e:
        case CLit(v):
            return _atom(v)
        case CVar(name):
            return name
        case CLet(name, init, body):
            return ["let", name, to_sexp(init), to_sexp(body)]
        case CSeq(a, b):
            return ["seq", to_sexp(a), to_sexp(b)]
        case CAssign(name, v):
            return ["set!", name, to_sexp(v)]
        case CWhile(t, b):
            return ["while", to_sexp(t), to_sexp(b)]
        case CIf(t, a, b):
            return ["if", to_sexp(t), to_sexp(a), to_sexp(b)]
        case CBin(op, a, b):
            return [op, to_sexp(a), to_sexp(b)]
        case CMakeType(names, _):
            return ["make-type", *names]
        case CNewOf(t):
            return ["new", to_sexp(t)]
        case CFieldGet(r, name):
            return ["field", to_sexp(r), f'"{name}"']
        case CFieldSet(r, name, v):
            return ["set-field!", to_sexp(r), f'"{name}"', to_sexp(v)]
        case CAListEmpty():
            return ["alist"]
        case CAListBind(lst, key, v):
            return ["alist-bind", to_sexp(lst), f'"{key}"', to_sexp(v)]
        case CAListGet(lst, key):
            return ["alist-get", to_sexp(lst), f'"{key}"']
        case CAListSet(lst, key, v):
            return ["alist-set!", to_sexp(lst), f'"{key}"', to_sexp(v)]
    raise TypeError(f"not a core expression: {e!r}")


def render(e: CoreExp, width: int = 80) -> str:
    """S-expression text laid out by the pretty-printing machine."""
    from .pretty import pprint, sexp_doc

    return pprint(sexp_doc(to_sexp(e)), width, width)
