"""Run-time values and environments shared by the execution paths.

Atoms are booleans, integers and ``NULL`` (the content of a field nobody has
written yet). Records have identity: they are compared with ``is``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .errors import EvalError, Loc


@dataclass(frozen=True)
class BoolV:
    value: bool


@dataclass(frozen=True)
class IntV:
    value: int


class NullV:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NULL"


NULL = NullV()
TRUE = BoolV(True)
FALSE = BoolV(False)


class TypeDesc:
    """A record type: the ordered field names. ``name`` is only for display."""

    def __init__(self, names, name: str | None = None):
        self.names = tuple(names)
        self.name = name
        if len(set(self.names)) != len(self.names):
            raise EvalError(f"duplicate field names in type {name or '?'}")

    def __repr__(self) -> str:
        return f"TypeDesc({self.name!r}, {list(self.names)})"

    def new(self) -> "RecordV":
        return RecordV(self)


def instantiate(t: TypeDesc) -> "RecordV":
    return RecordV(t)


class RecordV:
    def __init__(self, type_ref: TypeDesc):
        self.type_ref = type_ref
        self.fields: list[Value] = [NULL] * len(type_ref.names)

    def __repr__(self) -> str:
        return f"<RecordV {self.type_ref.name} at {id(self):#x}>"

    def _index(self, name: str) -> int:
        try:
            return self.type_ref.names.index(name)
        except ValueError:
            raise EvalError(
                f"record of type {self.type_ref.name or '?'} has no field {name}"
            ) from None

    def lookup(self, name: str) -> "Value":
        return self.fields[self._index(name)]

    def update(self, name: str, value: "Value") -> None:
        self.fields[self._index(name)] = value


class AList:
    """A record after type erasure: ordered (key, value) pairs with identity."""

    def __init__(self, pairs=()):
        self.pairs: list[list] = [[k, v] for k, v in pairs]

    def __repr__(self) -> str:
        return f"<AList {[k for k, _ in self.pairs]} at {id(self):#x}>"

    def bind(self, key: str, value: "Value") -> "AList":
        return AList([*((k, v) for k, v in self.pairs), (key, value)])

    def _pair(self, key: str) -> list:
        for pair in self.pairs:
            if pair[0] == key:
                return pair
        raise EvalError(f"record has no field {key}")

    def lookup(self, key: str) -> "Value":
        return self._pair(key)[1]

    def set(self, key: str, value: "Value") -> None:
        self._pair(key)[1] = value


Value = Union[BoolV, IntV, NullV, RecordV, AList]


def record_lookup(r, name: str):
    if not isinstance(r, (RecordV, AList)):
        raise EvalError(f"field reference .{name} on non-record {show(r)}")
    return r.lookup(name)


def record_update(r, name: str, v) -> None:
    if not isinstance(r, RecordV | AList):
        raise EvalError(f"field update .{name} on non-record {show(r)}")
    if isinstance(r, AList):
        r.set(name, v)
    else:
        r.update(name, v)


# -- binary operations -------------------------------------------------------


def _ints(op: str, a, b) -> tuple[int, int]:
    if not (isinstance(a, IntV) and isinstance(b, IntV)):
        raise EvalError(f"operator {op} expects integers, got {show(a)} and {show(b)}")
    return a.value, b.value


def _bools(op: str, a, b) -> tuple[bool, bool]:
    if not (isinstance(a, BoolV) and isinstance(b, BoolV)):
        raise EvalError(f"operator {op} expects booleans, got {show(a)} and {show(b)}")
    return a.value, b.value


def bin_and(a, b) -> BoolV:
    x, y = _bools("and", a, b)
    return BoolV(x and y)


def bin_or(a, b) -> BoolV:
    x, y = _bools("or", a, b)
    return BoolV(x or y)


def bin_add(a, b) -> IntV:
    x, y = _ints("+", a, b)
    return IntV(x + y)


def bin_sub(a, b) -> IntV:
    x, y = _ints("-", a, b)
    return IntV(x - y)


def bin_mod(a, b) -> IntV:
    x, y = _ints("mod", a, b)
    if y == 0:
        raise EvalError("mod by zero")
    return IntV(x % y)


def bin_greater(a, b) -> BoolV:
    x, y = _ints(">", a, b)
    return BoolV(x > y)


def bin_less(a, b) -> BoolV:
    x, y = _ints("<", a, b)
    return BoolV(x < y)


def bin_eq(a, b) -> BoolV:
    if isinstance(a, (RecordV, AList)) or isinstance(b, (RecordV, AList)):
        return BoolV(a is b)
    if isinstance(a, TypeDesc) or isinstance(b, TypeDesc):
        raise EvalError("operator = cannot compare types")
    return BoolV(type(a) is type(b) and a == b)


BINARY_OPS = {
    "and": bin_and,
    "or": bin_or,
    "+": bin_add,
    "-": bin_sub,
    "mod": bin_mod,
    ">": bin_greater,
    "<": bin_less,
    "=": bin_eq,
}


def apply_binop(op: str, a, b, loc: Loc | None = None):
    try:
        return BINARY_OPS[op](a, b)
    except EvalError as err:
        if err.loc is None:
            err.loc = loc
        raise


def truth(v, what: str, loc: Loc | None = None) -> bool:
    if not isinstance(v, BoolV):
        raise EvalError(f"{what} test must be a boolean, got {show(v)}", loc)
    return v.value


# -- environments ------------------------------------------------------------


class Binding:
    """A mutable cell. Environments that share a binding see its updates."""

    __slots__ = ("name", "content", "is_type")

    def __init__(self, name: str, content, is_type: bool = False):
        self.name = name
        self.content = content
        self.is_type = is_type

    def __repr__(self) -> str:
        return f"Binding({self.name!r}, {self.content!r})"


class Env:
    """An immutable chain of shared mutable bindings, innermost first."""

    __slots__ = ("binding", "parent")

    def __init__(self, binding: Binding | None = None, parent: "Env | None" = None):
        self.binding = binding
        self.parent = parent

    @classmethod
    def empty(cls) -> "Env":
        return cls()

    def __iter__(self) -> Iterator[Binding]:
        env = self
        while env is not None and env.binding is not None:
            yield env.binding
            env = env.parent

    def __len__(self) -> int:
        return sum(1 for _ in self)

    def is_empty(self) -> bool:
        return self.binding is None

    def find(self, name: str) -> Binding | None:
        for b in self:
            if b.name == name:
                return b
        return None

    def binds(self, name: str) -> bool:
        return self.find(name) is not None

    def bind(self, name: str, value) -> "Env":
        return Env(Binding(name, value), self)

    def bind_type(self, name: str, t: TypeDesc) -> "Env":
        return Env(Binding(name, t, is_type=True), self)

    def lookup(self, name: str, loc: Loc | None = None):
        b = self.find(name)
        if b is None:
            raise EvalError(f"Unbound variable {name}", loc)
        if b.is_type:
            raise EvalError(f"{name} is a type, not a value", loc)
        return b.content

    def lookup_type(self, name: str, loc: Loc | None = None) -> TypeDesc:
        b = self.find(name)
        if b is None:
            raise EvalError(f"Unknown type {name}", loc)
        if not b.is_type:
            raise EvalError(f"{name} is a value, not a type", loc)
        return b.content

    def update(self, name: str, value, loc: Loc | None = None) -> None:
        b = self.find(name)
        if b is None:
            raise EvalError(f"Unbound variable {name}", loc)
        if b.is_type:
            raise EvalError(f"cannot assign to type {name}", loc)
        b.content = value

    def value_bindings(self) -> dict[str, object]:
        """Visible value bindings, outermost declaration first."""
        seen: dict[str, object] = {}
        for b in self:
            if b.name not in seen:
                seen[b.name] = b
        return {
            name: b.content
            for name, b in reversed(list(seen.items()))
            if not b.is_type
        }


# -- printing ----------------------------------------------------------------


def show(v, type_names: bool = True) -> str:
    """Deterministic rendering. ``type_names=False`` is the comparison mode
    in which typed records and a-lists print identically."""
    out: list[str] = []
    on_path: set[int] = set()

    def walk(v) -> None:
        match v:
            case BoolV(b):
                out.append("true" if b else "false")
            case IntV(n):
                out.append(str(n))
            case NullV():
                out.append("null")
            case TypeDesc():
                out.append(f"<type {v.name or '?'}>")
            case RecordV() | AList():
                if id(v) in on_path:
                    out.append("<loop>")
                    return
                on_path.add(id(v))
                if isinstance(v, RecordV):
                    items = zip(v.type_ref.names, v.fields)
                    if type_names and v.type_ref.name:
                        out.append(v.type_ref.name)
                else:
                    items = [(k, x) for k, x in v.pairs]
                out.append("[")
                for i, (k, x) in enumerate(items):
                    if i:
                        out.append(",")
                    out.append(f"{k}=")
                    walk(x)
                out.append("]")
                on_path.discard(id(v))
            case _:
                out.append(repr(v))

    walk(v)
    return "".join(out)
