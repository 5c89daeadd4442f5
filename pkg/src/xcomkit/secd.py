"""An SECD machine for the lambda calculus with integers, records and builtins.

A state holds a stack of values, an environment, a control list and a dump
(the state to resume when the current control runs out). Applications
evaluate the argument before the operator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Union

from .errors import Diverged, Loc, MachineError, ParseError

# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class LVar:
    name: str
    paren: bool = field(default=False, compare=False, kw_only=True)


@dataclass(frozen=True)
class LLambda:
    arg: str
    body: "LExp"
    paren: bool = field(default=False, compare=False, kw_only=True)


@dataclass(frozen=True)
class LApply:
    fun: "LExp"
    arg: "LExp"
    paren: bool = field(default=False, compare=False, kw_only=True)


@dataclass(frozen=True)
class LInt:
    n: int
    paren: bool = field(default=False, compare=False, kw_only=True)


@dataclass(frozen=True)
class LRecord:
    fields: tuple[tuple[str, "LExp"], ...]
    paren: bool = field(default=False, compare=False, kw_only=True)

    def __post_init__(self):
        names = [n for n, _ in self.fields]
        if len(set(names)) != len(names):
            raise ValueError("record field names must be distinct")


LExp = Union[LVar, LLambda, LApply, LInt, LRecord]


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[\\.()\[\]=,])"
)


class _Parser:
    def __init__(self, text: str):
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", self._loc(text, pos))
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), self._loc(text, pos)))
            pos = m.end()
        self.tokens.append(("eof", "", self._loc(text, len(text))))
        self.pos = 0

    @staticmethod
    def _loc(text: str, pos: int) -> Loc:
        line = text.count("\n", 0, pos) + 1
        return Loc(line, pos - (text.rfind("\n", 0, pos) + 1) + 1)

    @property
    def kind(self) -> str:
        return self.tokens[self.pos][0]

    def at(self, sym: str) -> bool:
        kind, text, _ = self.tokens[self.pos]
        return kind == "sym" and text == sym

    def error(self, message: str):
        kind, text, loc = self.tokens[self.pos]
        found = "end of input" if kind == "eof" else repr(text)
        raise ParseError(f"{message}, found {found}", loc)

    def expect(self, sym: str) -> None:
        if not self.at(sym):
            self.error(f"expected {sym!r}")
        self.pos += 1

    def name(self) -> str:
        if self.kind != "name":
            self.error("expected a name")
        self.pos += 1
        return self.tokens[self.pos - 1][1]

    def exp(self) -> LExp:
        if self.at("\\"):
            return self.lam()
        e = self.atom()
        while True:
            if self.at("\\"):
                return LApply(e, self.lam())
            if self.kind in ("name", "int") or self.at("(") or self.at("["):
                e = LApply(e, self.atom())
            else:
                return e

    def lam(self) -> LLambda:
        self.expect("\\")
        arg = self.name()
        self.expect(".")
        return LLambda(arg, self.exp())

    def atom(self) -> LExp:
        kind, text, _ = self.tokens[self.pos]
        if kind == "name":
            self.pos += 1
            return LVar(text)
        if kind == "int":
            self.pos += 1
            return LInt(int(text))
        if self.at("("):
            self.pos += 1
            e = self.exp()
            self.expect(")")
            return _with_paren(e)
        if self.at("["):
            self.pos += 1
            fields = [self.field()]
            while self.at(","):
                self.pos += 1
                fields.append(self.field())
            self.expect("]")
            names = [n for n, _ in fields]
            dup = next((n for n in names if names.count(n) > 1), None)
            if dup is not None:
                self.error(f"duplicate field {dup!r}")
            return LRecord(tuple(fields))
        self.error("expected an expression")

    def field(self) -> tuple[str, LExp]:
        n = self.name()
        self.expect("=")
        return n, self.exp()


def _with_paren(e: LExp) -> LExp:
    match e:
        case LVar(n):
            return LVar(n, paren=True)
        case LLambda(a, b):
            return LLambda(a, b, paren=True)
        case LApply(f, a):
            return LApply(f, a, paren=True)
        case LInt(n):
            return LInt(n, paren=True)
        case LRecord(fs):
            return LRecord(fs, paren=True)
    raise TypeError(f"not an expression: {e!r}")


def parse_lambda(text: str) -> LExp:
    p = _Parser(text)
    try:
        e = p.exp()
    except RecursionError:
        raise ParseError("expression nested too deeply") from None
    if p.kind != "eof":
        p.error("expected end of input")
    return e


def render_exp(e: LExp) -> str:
    """Expression text; parentheses written in the source are kept."""
    match e:
        case LVar(name):
            text = name
        case LInt(n):
            text = str(n)
        case LLambda(arg, body):
            text = f"\\{arg}.{render_exp(body)}"
        case LApply(fun, arg):
            f = render_exp(fun)
            if isinstance(fun, LLambda) and not fun.paren:
                f = f"({f})"
            a = render_exp(arg)
            if isinstance(arg, (LApply, LLambda)) and not arg.paren:
                a = f"({a})"
            text = f"{f} {a}"
        case LRecord(fields):
            text = "[" + ",".join(f"{n}={render_exp(v)}" for n, v in fields) + "]"
        case _:
            raise TypeError(f"not an expression: {e!r}")
    return f"({text})" if e.paren else text


# -- machine values and environments ------------------------------------------


class LEnv:
    """Linked bindings, newest first. An environment without a name is the
    empty one."""

    __slots__ = ("name", "value", "parent")

    def __init__(self, name=None, value=None, parent=None):
        self.name = name
        self.value = value
        self.parent = parent

    def bind(self, name: str, value) -> "LEnv":
        return LEnv(name, value, self)

    def lookup(self, name: str):
        env = self
        while env.parent is not None:
            if env.name == name:
                return env.value
            env = env.parent
        raise MachineError(f"Unbound variable {name}")

    def bindings(self) -> Iterator[tuple[str, object]]:
        env = self
        while env.parent is not None:
            yield env.name, env.value
            env = env.parent


EMPTY_ENV = LEnv()


@dataclass(frozen=True)
class IntVal:
    n: int


@dataclass(frozen=True)
class RecVal:
    fields: tuple[tuple[str, "Value"], ...]

    def get(self, name: str) -> "Value":
        for n, v in self.fields:
            if n == name:
                return v
        raise MachineError(f"record has no field {name}")


@dataclass(eq=False)
class Closure:
    arg: str
    env: LEnv
    body: LExp


@dataclass(eq=False)
class Builtin:
    name: str
    fn: Callable[[RecVal], "Value"]


Value = Union[IntVal, RecVal, Closure, Builtin]


def _int_pair(name: str, op: Callable[[int, int], int]) -> Builtin:
    def apply(rec: RecVal) -> IntVal:
        a, b = rec.get("fst"), rec.get("snd")
        if not (isinstance(a, IntVal) and isinstance(b, IntVal)):
            raise MachineError(f"{name} expects integer fields fst and snd")
        return IntVal(op(a.n, b.n))

    return Builtin(name, apply)


def _builtin_env() -> LEnv:
    env = EMPTY_ENV
    for b in (
        _int_pair("add", lambda a, b: a + b),
        _int_pair("sub", lambda a, b: a - b),
        _int_pair("mult", lambda a, b: a * b),
        _int_pair("eql", lambda a, b: int(a == b)),
    ):
        env = env.bind(b.name, b)
    return env


BUILTIN_ENV = _builtin_env()


# -- machine -----------------------------------------------------------------


@dataclass(frozen=True)
class Do:
    exp: LExp


@dataclass(frozen=True)
class App:
    pass


@dataclass(frozen=True)
class MkRec:
    names: tuple[str, ...]


Control = Union[Do, App, MkRec]


@dataclass(frozen=True)
class SecdState:
    stack: tuple
    env: LEnv
    control: tuple
    dump: "SecdState | None" = None

    @property
    def terminal(self) -> bool:
        return not self.control and self.dump is None


def initial_state(e: LExp, env: LEnv = BUILTIN_ENV) -> SecdState:
    return SecdState((), env, (Do(e),), None)


def trans(st: SecdState) -> SecdState:
    s, e, c, d = st.stack, st.env, st.control, st.dump
    if not c:
        if d is None:
            raise MachineError("machine has halted")
        if len(s) != 1:
            raise MachineError(f"function returned {len(s)} values, expected 1")
        return SecdState((s[0], *d.stack), d.env, d.control, d.dump)
    instr, rest = c[0], c[1:]
    match instr:
        case Do(LVar(name)):
            return SecdState((e.lookup(name), *s), e, rest, d)
        case Do(LApply(fun, arg)):
            return SecdState(s, e, (Do(arg), Do(fun), App(), *rest), d)
        case Do(LLambda(arg, body)):
            return SecdState((Closure(arg, e, body), *s), e, rest, d)
        case Do(LInt(n)):
            return SecdState((IntVal(n), *s), e, rest, d)
        case Do(LRecord(fields)):
            parts = tuple(Do(x) for _, x in fields)
            return SecdState(s, e, (*parts, MkRec(tuple(n for n, _ in fields)), *rest), d)
        case MkRec(names):
            k = len(names)
            if len(s) < k:
                raise MachineError("record construction needs more values than the stack holds")
            values = reversed(s[:k])  # the last field was pushed last
            return SecdState((RecVal(tuple(zip(names, values))), *s[k:]), e, rest, d)
        case App():
            if len(s) < 2:
                raise MachineError("application needs an operator and an argument")
            f, a, below = s[0], s[1], s[2:]
            match f:
                case Closure(arg, env, body):
                    return SecdState((), env.bind(arg, a), (Do(body),), SecdState(below, e, rest, d))
                case Builtin(name, fn):
                    if not isinstance(a, RecVal):
                        raise MachineError(f"builtin {name} expects a record argument")
                    return SecdState((fn(a), *below), e, rest, d)
            raise MachineError(f"cannot apply {render_value(f)}")
    raise MachineError(f"no transition for control {instr!r}")


DEFAULT_MAX_STEPS = 10**6


def trace(e: LExp, env: LEnv = BUILTIN_ENV, max_steps: int = DEFAULT_MAX_STEPS) -> Iterator[SecdState]:
    """Every state from the initial one to the terminal one."""
    st = initial_state(e, env)
    yield st
    steps = 0
    while not st.terminal:
        if steps >= max_steps:
            raise Diverged(f"no result after {max_steps} steps")
        st = trans(st)
        steps += 1
        yield st


def run(e: LExp, env: LEnv = BUILTIN_ENV, max_steps: int = DEFAULT_MAX_STEPS) -> Value:
    final = None
    for final in trace(e, env, max_steps):
        pass
    if len(final.stack) != 1:
        raise MachineError(f"program left {len(final.stack)} values, expected 1")
    return final.stack[0]


# -- rendering ---------------------------------------------------------------


def render_env(env: LEnv) -> str:
    """Bindings newest first; the builtin environment is written ``E``."""
    pairs = []
    while env is not BUILTIN_ENV and env.parent is not None:
        pairs.append(f"{env.name}->{render_value(env.value)}")
        env = env.parent
    if env is BUILTIN_ENV:
        return "E" + (f"[{','.join(pairs)}]" if pairs else "")
    return f"[{','.join(pairs)}]"


def render_value(v: Value) -> str:
    match v:
        case IntVal(n):
            return str(n)
        case RecVal(fields):
            return "[" + ",".join(f"{n}={render_value(x)}" for n, x in fields) + "]"
        case Closure(arg, env, body):
            return f"<{arg},{render_env(env)},{render_exp(body)}>"
        case Builtin(name, _):
            return f"!{name}"
    raise TypeError(f"not a machine value: {v!r}")


def render_control(c: Control) -> str:
    match c:
        case Do(e):
            return render_exp(e)
        case App():
            return "@"
        case MkRec(names):
            return "{" + ",".join(names) + "}"
    raise TypeError(f"not a control instruction: {c!r}")


def render_state(st: SecdState | None) -> str:
    if st is None:
        return "null"
    stack = ",".join(map(render_value, st.stack))
    control = ",".join(map(render_control, st.control))
    return f"([{stack}],{render_env(st.env)},[{control}],{render_state(st.dump)})"
