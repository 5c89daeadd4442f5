"""Bytecode compiler and stack machine for XCom.

The compiler threads a type environment (translation-time, as in
``desugar2``) and a variable environment: the tuple of names in scope, whose
positions are local slot numbers. Statements are compiled in
continuation-passing style; a continuation maps the environments in force
after a statement to the code that follows it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Union

from .core import CAListBind, CAListEmpty, CLit, CoreExp
from .errors import EvalError, MachineError, StaticError
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
from .translate import EMPTY_TYPE_ENV, TypeEnv, desugar2_exp
from .values import (
    FALSE,
    NULL,
    TRUE,
    AList,
    BoolV,
    IntV,
    NullV,
    TypeDesc,
    apply_binop,
    show,
)

# -- instructions ------------------------------------------------------------


@dataclass(frozen=True)
class PushTrue:
    pass


@dataclass(frozen=True)
class PushFalse:
    pass


@dataclass(frozen=True)
class PushInteger:
    value: int


@dataclass(frozen=True)
class PushNull:
    pass


@dataclass(frozen=True)
class LocalRef:
    index: int


@dataclass(frozen=True)
class SetLocal:
    name: str
    index: int


@dataclass(frozen=True)
class Pop:
    pass


@dataclass(frozen=True)
class And:
    pass


@dataclass(frozen=True)
class Or:
    pass


@dataclass(frozen=True)
class Add:
    pass


@dataclass(frozen=True)
class Sub:
    pass


@dataclass(frozen=True)
class Mod:
    pass


@dataclass(frozen=True)
class Greater:
    pass


@dataclass(frozen=True)
class Less:
    pass


@dataclass(frozen=True)
class Eq:
    pass


@dataclass(frozen=True)
class NewAList:
    pass


@dataclass(frozen=True)
class AListBindI:
    key: str


@dataclass(frozen=True)
class FieldGetI:
    key: str


@dataclass(frozen=True)
class FieldSetI:
    key: str


@dataclass(frozen=True)
class Label:
    symbol: str


@dataclass(frozen=True)
class SkipFalse:
    target: str | int


@dataclass(frozen=True)
class Skip:
    target: str | int


Instr = Union[
    PushTrue, PushFalse, PushInteger, PushNull, LocalRef, SetLocal, Pop, And, Or,
    Add, Sub, Mod, Greater, Less, Eq, NewAList, AListBindI, FieldGetI, FieldSetI,
    Label, SkipFalse, Skip,
]

OP_INSTRS = {
    "and": And, "or": Or, "+": Add, "-": Sub, "mod": Mod,
    ">": Greater, "<": Less, "=": Eq,
}
INSTR_OPS = {cls: op for op, cls in OP_INSTRS.items()}

# net stack effect of every instruction except the jumps
STACK_EFFECT = {
    PushTrue: 1, PushFalse: 1, PushInteger: 1, PushNull: 1, LocalRef: 1,
    SetLocal: 0, Pop: -1, NewAList: 1, AListBindI: -1, FieldGetI: 0,
    FieldSetI: -2, Label: 0, Skip: 0, SkipFalse: -1,
    **{cls: -1 for cls in OP_INSTRS.values()},
}
# operands each instruction needs on the stack
STACK_NEEDS = {
    SetLocal: 1, Pop: 1, AListBindI: 2, FieldGetI: 1, FieldSetI: 2, SkipFalse: 1,
    **{cls: 2 for cls in OP_INSTRS.values()},
}


def format_instr(instr: Instr) -> str:
    name = type(instr).__name__
    args = [str(getattr(instr, f)) for f in instr.__dataclass_fields__]
    return " ".join([name, *args])


def listing(instrs, numbered: bool = False) -> str:
    lines = []
    for i, instr in enumerate(instrs):
        text = format_instr(instr)
        lines.append(f"{i:4d}  {text}" if numbered else text)
    return "\n".join(lines)


# -- compiler ----------------------------------------------------------------

Continuation = Callable[[TypeEnv, tuple], list]


def _done(type_env: TypeEnv, var_env: tuple) -> list:
    return []


class Compiler:
    """Holds the label counter, so labels are unique within one compilation."""

    def __init__(self):
        self._labels = itertools.count()

    def fresh(self, stem: str) -> str:
        return f"{stem}{next(self._labels)}"

    def exp(self, e: Exp, type_env: TypeEnv, var_env: tuple) -> list:
        match e:
            case Const(True):
                return [PushTrue()]
            case Const(False):
                return [PushFalse()]
            case Const(value):
                return [PushInteger(value)]
            case Var(name):
                return [LocalRef(_slot(var_env, name, e))]
            case BinExp(op, left, right):
                return [
                    *self.exp(left, type_env, var_env),
                    *self.exp(right, type_env, var_env),
                    OP_INSTRS[op](),
                ]
            case New():
                return compile_core(desugar2_exp(e, type_env))
            case FieldRef(target, name):
                return [*self.exp(target, type_env, var_env), FieldGetI(name)]
        raise TypeError(f"not an expression: {e!r}")

    def statements(self, statements, type_env, var_env, next: Continuation) -> list:
        if not statements:
            return next(type_env, var_env)
        first, rest = statements[0], statements[1:]
        return self.stmt(
            first, type_env, var_env,
            lambda te, ve: self.statements(rest, te, ve, next),
        )

    def stmt(self, s: Statement, type_env: TypeEnv, var_env: tuple, next: Continuation) -> list:
        match s:
            case TypeDeclaration(name, names):
                return next(type_env.bind(name, TypeDesc(names, name)), var_env)
            case ValueDeclaration(name, init):
                return [
                    *self.exp(init, type_env, var_env),
                    SetLocal(name, len(var_env)),
                    Pop(),
                    *next(type_env, var_env + (name,)),
                ]
            case Block(statements):
                return self.statements(
                    statements, type_env, var_env,
                    lambda _te, _ve: next(type_env, var_env),
                )
            case While(test, body):
                start, end = self.fresh("START"), self.fresh("END")
                return [
                    Label(start),
                    *self.exp(test, type_env, var_env),
                    SkipFalse(end),
                    *self.stmt(body, type_env, var_env, _done),
                    Skip(start),
                    Label(end),
                    *next(type_env, var_env),
                ]
            case If(test, then_part, else_part):
                orelse, end = self.fresh("ELSE"), self.fresh("ENDIF")
                else_code = [] if else_part is None else self.stmt(else_part, type_env, var_env, _done)
                return [
                    *self.exp(test, type_env, var_env),
                    SkipFalse(orelse),
                    *self.stmt(then_part, type_env, var_env, _done),
                    Skip(end),
                    Label(orelse),
                    *else_code,
                    Label(end),
                    *next(type_env, var_env),
                ]
            case Update(name, value):
                return [
                    *self.exp(value, type_env, var_env),
                    SetLocal(name, _slot(var_env, name, s)),
                    Pop(),
                    *next(type_env, var_env),
                ]
            case FieldUpdate(target, name, value):
                return [
                    *self.exp(target, type_env, var_env),
                    *self.exp(value, type_env, var_env),
                    FieldSetI(name),
                    *next(type_env, var_env),
                ]
        raise TypeError(f"not a statement: {s!r}")


def _slot(var_env: tuple, name: str, node) -> int:
    # innermost declaration wins, i.e. the last occurrence
    for i in range(len(var_env) - 1, -1, -1):
        if var_env[i] == name:
            return i
    raise StaticError(f"Unbound variable {name}", node.loc)


def compile_core(e: CoreExp) -> list:
    """Compile the record-construction subset of the core language."""
    match e:
        case CAListEmpty():
            return [NewAList()]
        case CAListBind(alist, key, value):
            return [*compile_core(alist), *compile_core(value), AListBindI(key)]
        case CLit(NullV()):
            return [PushNull()]
    raise TypeError(f"cannot compile core expression {e!r}")


def compile_exp(e: Exp, type_env: TypeEnv = EMPTY_TYPE_ENV, var_env: tuple = ()) -> list:
    return Compiler().exp(e, type_env, tuple(var_env))


def compile_stmt(
    s: Statement,
    type_env: TypeEnv = EMPTY_TYPE_ENV,
    var_env: tuple = (),
    next: Continuation = _done,
) -> list:
    return Compiler().stmt(s, type_env, tuple(var_env), next)


@dataclass
class CompiledProgram:
    code: list
    # slot of each value name in the outermost scope when the program ends
    top_level: dict[str, int] = field(default_factory=dict)

    @property
    def local_count(self) -> int:
        return count_locals(self.code)


def compile_program(program: Statement) -> CompiledProgram:
    from .interp import top_level

    result = CompiledProgram([])

    def capture(type_env: TypeEnv, var_env: tuple) -> list:
        for i, name in enumerate(var_env):
            result.top_level[name] = i
        return []

    result.code = Compiler().statements(top_level(program), EMPTY_TYPE_ENV, (), capture)
    return result


def count_locals(code) -> int:
    return max((i.index + 1 for i in code if isinstance(i, (SetLocal, LocalRef))), default=0)


# -- assembler ---------------------------------------------------------------


def assemble(instrs) -> list:
    """Drop labels and turn jump symbols into absolute instruction indices."""
    targets: dict[str, int] = {}
    position = 0
    for instr in instrs:
        if isinstance(instr, Label):
            if instr.symbol in targets:
                raise MachineError(f"duplicate label {instr.symbol}")
            targets[instr.symbol] = position
        else:
            position += 1
    out = []
    for instr in instrs:
        match instr:
            case Label():
                continue
            case Skip(target) | SkipFalse(target) if isinstance(target, str):
                if target not in targets:
                    raise MachineError(f"undefined label {target}")
                out.append(type(instr)(targets[target]))
            case _:
                out.append(instr)
    return out


# -- machine -----------------------------------------------------------------


@dataclass
class VmState:
    program: list
    locals: list
    stack: list = field(default_factory=list)
    pc: int = 0
    steps: int = 0

    @property
    def halted(self) -> bool:
        return self.pc == len(self.program)


def _pop(state: VmState):
    if not state.stack:
        raise MachineError(f"stack underflow at {state.pc}")
    return state.stack.pop()


def step(state: VmState) -> None:
    instr = state.program[state.pc]
    state.pc += 1
    state.steps += 1
    stack = state.stack
    match instr:
        case PushTrue():
            stack.append(TRUE)
        case PushFalse():
            stack.append(FALSE)
        case PushInteger(n):
            stack.append(IntV(n))
        case PushNull():
            stack.append(NULL)
        case LocalRef(i):
            stack.append(state.locals[i])
        case SetLocal(_, i):
            if not stack:
                raise MachineError(f"stack underflow at {state.pc - 1}")
            state.locals[i] = stack[-1]
        case Pop():
            _pop(state)
        case NewAList():
            stack.append(AList())
        case AListBindI(key):
            value = _pop(state)
            stack.append(_alist(_pop(state), key).bind(key, value))
        case FieldGetI(key):
            stack.append(_alist(_pop(state), key).lookup(key))
        case FieldSetI(key):
            value = _pop(state)
            _alist(_pop(state), key).set(key, value)
        case SkipFalse(target):
            v = _pop(state)
            if not isinstance(v, BoolV):
                raise EvalError(f"test must be a boolean, got {show(v)}")
            if not v.value:
                state.pc = target
        case Skip(target):
            state.pc = target
        case _ if type(instr) in INSTR_OPS:
            b = _pop(state)
            a = _pop(state)
            stack.append(apply_binop(INSTR_OPS[type(instr)], a, b))
        case _:
            raise MachineError(f"cannot execute {format_instr(instr)}")


def _alist(v, key: str) -> AList:
    if not isinstance(v, AList):
        raise EvalError(f"field .{key} of non-record {show(v)}")
    return v


def exec_vm(program: list, local_count: int | None = None, max_steps: int | None = None) -> VmState:
    if local_count is None:
        local_count = count_locals(program)
    state = VmState(list(program), [NULL] * local_count)
    while not state.halted:
        if max_steps is not None and state.steps >= max_steps:
            raise MachineError(f"step limit {max_steps} reached")
        step(state)
    return state


def run_compiled(compiled: CompiledProgram, max_steps: int | None = None) -> tuple[VmState, dict]:
    """Assemble and execute; return the final state and the outermost
    scope's values by name."""
    state = exec_vm(assemble(compiled.code), compiled.local_count, max_steps)
    return state, {name: state.locals[i] for name, i in compiled.top_level.items()}


# -- stack discipline --------------------------------------------------------


def verify_stack(program: list, final_depth: int = 0) -> None:
    """Abstract interpretation of stack depth over an assembled program.

    Checks that no instruction underflows, that every join point is reached
    with a single depth, and that the program ends at ``final_depth``.
    """
    depth_at: dict[int, int] = {0: 0}
    work = [0]
    end = len(program)
    while work:
        pc = work.pop()
        depth = depth_at[pc]
        if pc == end:
            continue
        instr = program[pc]
        need = STACK_NEEDS.get(type(instr), 0)
        if depth < need:
            raise MachineError(f"stack underflow at {pc}: {format_instr(instr)}")
        after = depth + STACK_EFFECT[type(instr)]
        successors = []
        match instr:
            case Skip(target):
                successors = [target]
            case SkipFalse(target):
                successors = [pc + 1, target]
            case _:
                successors = [pc + 1]
        for nxt in successors:
            if not 0 <= nxt <= end:
                raise MachineError(f"jump out of range at {pc}")
            if nxt in depth_at:
                if depth_at[nxt] != after:
                    raise MachineError(
                        f"inconsistent stack depth at {nxt}: {depth_at[nxt]} vs {after}"
                    )
            else:
                depth_at[nxt] = after
                work.append(nxt)
    if depth_at.get(end, final_depth) != final_depth:
        raise MachineError(f"program ends with stack depth {depth_at[end]}")


def net_effect(code: list) -> int:
    """Net stack effect of straight-line or structured code read linearly."""
    return sum(STACK_EFFECT[type(i)] for i in code)
