"""Random XCom programs and a differential harness over the four back ends.

The generator only builds programs that are closed, well typed and
terminating: loops count a dedicated counter down from a literal, records
are fully initialized straight after ``new``, and ``mod`` only divides by a
positive literal. The harness runs every program through

* the syntax-tree interpreter,
* the run-time-types translation and the core evaluator,
* the static-types translation and the core evaluator,
* the compiler, the assembler and the virtual machine,

and compares the printed values of the outermost scope.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import core_eval
from .errors import EvalError, MachineError, StaticError
from .fmt import format_xcom
from .interp import run_program
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
    parse_program,
)
from .translate import desugar1_program, desugar2_program, is_type_erased, observed_names
from .values import show
from .vm import assemble, compile_program, run_compiled, verify_stack

MAX_DEPTH = 3
MAX_TYPES = 4
MAX_LOOP = 50
MAX_IFS_PER_BLOCK = 3
UNKNOWN_TYPE = "Ghost"

_VAR_NAMES = ("a", "b", "c", "d", "x", "y", "z", "n")
_TYPE_NAMES = ("Pair", "Cell", "Box", "Node")
_FIELD_NAMES = ("head", "tail", "val", "next", "flag")


@dataclass(eq=False)
class _Type:
    name: str
    fields: dict  # field name -> "int" | "bool" | "self"


@dataclass
class _Scope:
    vars: dict = field(default_factory=dict)  # name -> "int" | "bool" | _Type
    types: dict = field(default_factory=dict)


class Generator:
    def __init__(self, rng: random.Random, inject_rate: float = 0.0):
        self.rng = rng
        self.inject_rate = inject_rate

    # scope queries

    def visible_vars(self) -> dict:
        seen: dict = {}
        for scope in reversed(self.scopes):
            for name, kind in scope.vars.items():
                seen.setdefault(name, kind)
        return seen

    def visible_types(self) -> dict:
        seen: dict = {}
        for scope in reversed(self.scopes):
            for name, t in scope.types.items():
                seen.setdefault(name, t)
        return seen

    def vars_of(self, kind, assignable: bool = False) -> list[str]:
        return [
            n for n, k in self.visible_vars().items()
            if k is kind and not (assignable and n in self.counters)
        ]

    def record_vars(self) -> list[str]:
        return [n for n, k in self.visible_vars().items() if isinstance(k, _Type)]

    # programs

    def program(self) -> Statement:
        self.scopes: list[_Scope] = []
        self.counters: set[str] = set()
        self.type_count = 0
        body = self.block_body(0, self.rng.randint(3, 9), MAX_LOOP)
        if self.rng.random() < self.inject_rate:
            at = self.rng.randint(0, len(body))
            ghost = ValueDeclaration("ghost", New(UNKNOWN_TYPE))
            body = body[:at] + [ghost] + body[at:]
        return Block(tuple(body))

    def block_body(self, depth: int, size: int, budget: int, tail=()) -> list[Statement]:
        self.scopes.append(_Scope())
        out: list[Statement] = []
        ifs = 0
        for _ in range(size):
            choices = ["value", "value", "update", "update", "field", "type"]
            if depth < MAX_DEPTH:
                choices += ["while", "block"]
                if ifs < MAX_IFS_PER_BLOCK:
                    choices += ["if", "if"]
            kind = self.rng.choice(choices)
            if kind == "if":
                ifs += 1
            out.extend(self.statement(kind, depth, budget))
        out.extend(tail)
        self.scopes.pop()
        return out

    def statement(self, kind: str, depth: int, budget: int) -> list[Statement]:
        rng = self.rng
        scope = self.scopes[-1]
        match kind:
            case "type" if self.type_count < MAX_TYPES:
                self.type_count += 1
                name = rng.choice(_TYPE_NAMES)
                names = rng.sample(_FIELD_NAMES, rng.randint(0, 3))
                t = _Type(name, {f: rng.choice(("int", "bool", "self")) for f in names})
                scope.types[name] = t
                return [TypeDeclaration(name, tuple(names))]
            case "update":
                candidates = [n for n in self.visible_vars() if n not in self.counters]
                if candidates:
                    name = rng.choice(candidates)
                    return [Update(name, self.exp(self.visible_vars()[name], 2))]
            case "field":
                recs = [n for n in self.record_vars() if self.visible_vars()[n].fields]
                if recs:
                    r = rng.choice(recs)
                    t = self.visible_vars()[r]
                    f = rng.choice(list(t.fields))
                    return [FieldUpdate(Var(r), f, self.exp(self._field_kind(t, f), 2))]
            case "while":
                return self.loop(depth, budget)
            case "if":
                test = self.exp("bool", 2)
                then_part = Block(tuple(self.block_body(depth + 1, rng.randint(0, 3), budget)))
                else_part = None
                if rng.random() < 0.5:
                    else_part = Block(tuple(self.block_body(depth + 1, rng.randint(0, 3), budget)))
                return [If(test, then_part, else_part)]
            case "block":
                return [Block(tuple(self.block_body(depth + 1, rng.randint(0, 4), budget)))]
        return self.declaration()

    def declaration(self) -> list[Statement]:
        rng = self.rng
        scope = self.scopes[-1]
        name = rng.choice(_VAR_NAMES)
        types = self.visible_types()
        if types and rng.random() < 0.4:
            tname = rng.choice(sorted(types))
            t = types[tname]
            # the fields are still null: keep the name out of the
            # initializers, except as a value for fields of its own type
            scope.vars[name] = "pending"
            inits = []
            for f, k in t.fields.items():
                if k == "self":
                    value = Var(rng.choice([*self.vars_of(t), name]))
                else:
                    value = self.exp(k, 1)
                inits.append(FieldUpdate(Var(name), f, value))
            scope.vars[name] = t
            return [ValueDeclaration(name, New(tname)), *inits]
        kind = rng.choice(("int", "int", "bool"))
        init = self.exp(kind, 2)
        scope.vars[name] = kind
        return [ValueDeclaration(name, init)]

    def loop(self, depth: int, budget: int) -> list[Statement]:
        rng = self.rng
        count = rng.randint(0, min(budget, 12))
        counter = f"i{len(self.counters)}"
        self.counters.add(counter)
        self.scopes[-1].vars[counter] = "int"
        decrement = Update(counter, BinExp("-", Var(counter), Const(1)))
        inner = budget // max(count, 1)
        body = self.block_body(depth + 1, rng.randint(0, 4), inner, tail=(decrement,))
        test = BinExp(">", Var(counter), Const(0))
        return [ValueDeclaration(counter, Const(count)), While(test, Block(tuple(body)))]

    @staticmethod
    def _field_kind(t: _Type, f: str):
        k = t.fields[f]
        return t if k == "self" else k

    # expressions

    def exp(self, kind, depth: int) -> Exp:
        rng = self.rng
        if isinstance(kind, _Type):
            return self.record_exp(kind)
        if depth > 0 and rng.random() < 0.45:
            return self.compound(kind, depth - 1)
        leaves = [Var(n) for n in self.vars_of(kind)]
        for r in self.record_vars():
            t = self.visible_vars()[r]
            leaves += [FieldRef(Var(r), f) for f, k in t.fields.items() if k == kind]
        if leaves and rng.random() < 0.7:
            return rng.choice(leaves)
        if kind == "int":
            return Const(rng.randint(0, 9))
        return Const(rng.random() < 0.5)

    def record_exp(self, t: _Type) -> Exp:
        names = self.vars_of(t)
        r = self.rng.choice(names)
        selfish = [f for f, k in t.fields.items() if k == "self"]
        if selfish and self.rng.random() < 0.3:
            return FieldRef(Var(r), self.rng.choice(selfish))
        return Var(r)

    def compound(self, kind, depth: int) -> Exp:
        rng = self.rng
        if kind == "int":
            op = rng.choice(("+", "-", "mod"))
            if op == "mod":
                return BinExp("mod", self.exp("int", depth), Const(rng.randint(1, 5)))
            return BinExp(op, self.exp("int", depth), self.exp("int", depth))
        choice = rng.choice(("rel", "rel", "logic", "eq"))
        if choice == "rel":
            op = rng.choice((">", "<", "="))
            return BinExp(op, self.exp("int", depth), self.exp("int", depth))
        if choice == "logic":
            op = rng.choice(("and", "or"))
            return BinExp(op, self.exp("bool", depth), self.exp("bool", depth))
        recs = self.record_vars()
        if recs and rng.random() < 0.5:
            t = self.visible_vars()[rng.choice(recs)]
            return BinExp("=", self.record_exp(t), self.record_exp(t))
        return BinExp("=", self.exp("bool", depth), self.exp("bool", depth))


def generate(seed: int, count: int, inject_rate: float = 0.0) -> list[Statement]:
    """``count`` programs from one random stream; the same seed gives the
    same corpus."""
    gen = Generator(random.Random(seed), inject_rate)
    return [gen.program() for _ in range(count)]


# -- back ends ---------------------------------------------------------------


@dataclass(frozen=True)
class Outcome:
    status: str  # "ok", "static" or "runtime"
    values: tuple = ()  # (name, printed value) pairs when ok
    message: str = ""


def _guard(fn) -> Outcome:
    try:
        return Outcome("ok", tuple(fn()))
    except StaticError as err:
        return Outcome("static", message=err.message)
    except (EvalError, MachineError) as err:
        return Outcome("runtime", message=err.message)


def run_interp(p: Statement) -> Outcome:
    def go():
        env = run_program(p)
        return [(n, show(env.lookup(n), False)) for n in observed_names(p)]

    return _guard(go)


def run_desugar1(p: Statement) -> Outcome:
    def go():
        record = core_eval(desugar1_program(p, observe=True))
        return [(n, show(record.lookup(n), False)) for n in observed_names(p)]

    return _guard(go)


def run_desugar2(p: Statement) -> Outcome:
    def go():
        alist = core_eval(desugar2_program(p, observe=True))
        return [(n, show(alist.lookup(n), False)) for n in observed_names(p)]

    return _guard(go)


def run_vm(p: Statement) -> Outcome:
    def go():
        _, values = run_compiled(compile_program(p))
        return [(n, show(values[n], False)) for n in observed_names(p)]

    return _guard(go)


BACKENDS = {
    "interp": run_interp,
    "desugar1": run_desugar1,
    "desugar2": run_desugar2,
    "vm": run_vm,
}


def classify(outcomes: dict[str, Outcome]) -> str:
    """``agree``, ``expected`` (the static translators reject an unknown type
    that the dynamic ones only meet at run time) or ``divergence``."""

    def key(o: Outcome):
        return (o.status, o.values)

    if len({key(o) for o in outcomes.values()}) == 1:
        return "agree"
    static = (outcomes["desugar2"], outcomes["vm"])
    if all(o.status == "static" and "Unknown type" in o.message for o in static):
        if key(outcomes["interp"]) == key(outcomes["desugar1"]):
            return "expected"
    return "divergence"


@dataclass
class Divergence:
    index: int
    source: str
    outcomes: dict

    def describe(self) -> str:
        lines = [f"program {self.index} diverges:", self.source.rstrip()]
        for name, o in self.outcomes.items():
            detail = ", ".join(f"{n} = {v}" for n, v in o.values) if o.status == "ok" else o.message
            lines.append(f"  {name}: {o.status}: {detail}")
        return "\n".join(lines)


@dataclass
class CheckReport:
    seed: int
    count: int
    agreed: int = 0
    expected: int = 0
    divergences: list = field(default_factory=list)
    problems: list = field(default_factory=list)  # structural checks that failed

    @property
    def ok(self) -> bool:
        return not self.divergences and not self.problems

    def summary(self) -> str:
        lines = [
            f"seed {self.seed}, {self.count} programs: {self.agreed} agree, "
            f"{self.expected} expected static rejections, "
            f"{len(self.divergences)} divergences, {len(self.problems)} structural failures"
        ]
        if self.divergences:
            lines.append(self.divergences[0].describe())
        lines.extend(self.problems[:5])
        return "\n".join(lines)


def check_program(p: Statement) -> tuple[dict[str, Outcome], list[str]]:
    """Run all back ends; also verify the compiled stack discipline and the
    type erasure of the static translation."""
    outcomes = {name: run(p) for name, run in BACKENDS.items()}
    problems = []
    try:
        verify_stack(assemble(compile_program(p).code))
    except StaticError:
        pass
    except MachineError as err:
        problems.append(f"stack check: {err.message}")
    try:
        if not is_type_erased(desugar2_program(p)):
            problems.append("static translation left typed nodes behind")
    except StaticError:
        pass
    return outcomes, problems


def check(seed: int, count: int, inject_rate: float = 0.0) -> CheckReport:
    if count < 1:
        raise ValueError("count must be at least 1")
    report = CheckReport(seed, count)
    for i, generated in enumerate(generate(seed, count, inject_rate)):
        source = format_xcom(generated)
        # run what the source says, so the printed program is the one tested
        p = parse_program(source)
        outcomes, problems = check_program(p)
        report.problems.extend(f"program {i}: {msg}" for msg in problems)
        match classify(outcomes):
            case "agree":
                report.agreed += 1
            case "expected":
                report.expected += 1
            case _:
                report.divergences.append(Divergence(i, source, outcomes))
    return report
