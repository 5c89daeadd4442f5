"""XCom abstract syntax and a recursive-descent parser for its concrete syntax.

Expression precedence, weakest first::

    and or      (logical)
    > < =       (relational)
    + -         (additive)
    mod         (multiplicative)
    e.name      (field reference)

Operators at one level associate to the right: ``a - b - c`` is ``a - (b - c)``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import Loc, ParseError

LOGICAL_OPS = ("and", "or")
RELATIONAL_OPS = (">", "<", "=")
ADDITIVE_OPS = ("+", "-")
MULTIPLICATIVE_OPS = ("mod",)
OPERATORS = LOGICAL_OPS + RELATIONAL_OPS + ADDITIVE_OPS + MULTIPLICATIVE_OPS

KEYWORDS = frozenset(
    "begin end type is value while do if then else new true false and or mod".split()
)


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Const:
    value: bool | int
    loc: Loc | None = field(default=None, repr=False, kw_only=True)

    # True == 1 in Python, so the literal kind must take part in equality.
    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Const)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((Const, type(self.value), self.value))


@dataclass(frozen=True)
class Var:
    name: str
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class BinExp:
    op: str
    left: "Exp"
    right: "Exp"
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class New:
    type_name: str
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class FieldRef:
    target: "Exp"
    field: str
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


Exp = Union[Const, Var, BinExp, New, FieldRef]


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    statements: tuple["Statement", ...] = ()
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class TypeDeclaration:
    name: str
    field_names: tuple[str, ...] = ()
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class ValueDeclaration:
    name: str
    init: Exp
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class While:
    test: Exp
    body: "Statement"
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class If:
    test: Exp
    then_part: "Statement"
    else_part: "Statement | None" = None
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Update:
    name: str
    value: Exp
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class FieldUpdate:
    target: Exp
    field: str
    value: Exp
    loc: Loc | None = field(default=None, compare=False, repr=False, kw_only=True)


Statement = Union[Block, TypeDeclaration, ValueDeclaration, While, If, Update, FieldUpdate]


# -- lexer -------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "kw", "sym", "eof"
    text: str
    loc: Loc


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<sym>:=|[.();><=+\-])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        loc = Loc(line, pos - line_start + 1)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", loc)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "ws":
            for i, ch in enumerate(lexeme):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind == "comment":
            pass
        elif kind == "name" and lexeme in KEYWORDS:
            tokens.append(Token("kw", lexeme, loc))
        else:
            tokens.append(Token(kind, lexeme, loc))
        pos = m.end()
    tokens.append(Token("eof", "", Loc(line, pos - line_start + 1)))
    return tokens


# -- parser ------------------------------------------------------------------


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind in ("kw", "sym") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def error(self, message: str):
        found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
        raise ParseError(f"{message}, found {found}", self.tok.loc)

    def name(self) -> str:
        if self.tok.kind != "name":
            self.error("expected a name")
        return self.advance().text

    def end_of_input(self) -> None:
        if self.tok.kind != "eof":
            self.error("expected end of input")

    # expressions

    def exp(self) -> Exp:
        return self._level(0)

    _LEVELS = (LOGICAL_OPS, RELATIONAL_OPS, ADDITIVE_OPS, MULTIPLICATIVE_OPS)

    def _level(self, depth: int) -> Exp:
        if depth == len(self._LEVELS):
            return self.field_ref()
        loc = self.tok.loc
        left = self._level(depth + 1)
        ops = self._LEVELS[depth]
        if self.tok.kind in ("kw", "sym") and self.tok.text in ops:
            op = self.advance().text
            right = self._level(depth)
            return BinExp(op, left, right, loc=loc)
        return left

    def field_ref(self) -> Exp:
        e = self.atom()
        while self.at(".") and self.tokens[self.pos + 1].kind == "name":
            loc = self.advance().loc
            e = FieldRef(e, self.name(), loc=loc)
        return e

    def atom(self) -> Exp:
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return Const(int(tok.text), loc=tok.loc)
        if tok.kind == "name":
            self.advance()
            return Var(tok.text, loc=tok.loc)
        if self.at("true") or self.at("false"):
            self.advance()
            return Const(tok.text == "true", loc=tok.loc)
        if self.at("new"):
            self.advance()
            return New(self.name(), loc=tok.loc)
        if self.at("("):
            self.advance()
            e = self.exp()
            self.expect(")")
            return e
        self.error("expected an expression")

    # statements

    def statement(self) -> Statement:
        tok = self.tok
        loc = tok.loc
        if self.at("begin"):
            self.advance()
            body = []
            while not self.at("end"):
                if self.tok.kind == "eof":
                    self.error("expected 'end'")
                body.append(self.statement())
            self.advance()
            return Block(tuple(body), loc=loc)
        if self.at("type"):
            self.advance()
            name = self.name()
            self.expect("is")
            names = []
            while self.tok.kind == "name":
                ftok = self.tok
                fname = self.advance().text
                if fname in names:
                    raise ParseError(
                        f"duplicate field {fname!r} in type {name}", ftok.loc
                    )
                names.append(fname)
            self.expect("end")
            return TypeDeclaration(name, tuple(names), loc=loc)
        if self.at("value"):
            self.advance()
            name = self.name()
            self.expect("is")
            init = self.exp()
            self.expect("end")
            return ValueDeclaration(name, init, loc=loc)
        if self.at("while"):
            self.advance()
            test = self.exp()
            self.expect("do")
            body = self.statement()
            self.expect("end")
            return While(test, body, loc=loc)
        if self.at("if"):
            self.advance()
            test = self.exp()
            self.expect("then")
            then_part = self.statement()
            else_part = None
            if self.at("else"):
                self.advance()
                else_part = self.statement()
            self.expect("end")
            return If(test, then_part, else_part, loc=loc)
        # Update and FieldUpdate share a prefix: parse the place, then decide.
        place = self.field_ref()
        self.expect(":=")
        value = self.exp()
        self.expect(";")
        match place:
            case Var(name):
                return Update(name, value, loc=loc)
            case FieldRef(target, fname):
                return FieldUpdate(target, fname, value, loc=loc)
        raise ParseError("left-hand side of ':=' must be a name or a field", loc)

    def program(self) -> Statement:
        statements = []
        while self.tok.kind != "eof":
            statements.append(self.statement())
        if len(statements) == 1:
            return statements[0]
        return Block(tuple(statements), loc=Loc(1, 1))


def _parse(text: str, rule: str):
    p = Parser(text)
    try:
        node = getattr(p, rule)()
        p.end_of_input()
    except RecursionError:
        raise ParseError("input nested too deeply", p.tok.loc) from None
    return node


def parse_exp(text: str) -> Exp:
    return _parse(text, "exp")


def parse_statement(text: str) -> Statement:
    return _parse(text, "statement")


def parse_program(text: str) -> Statement:
    """Parse a source file.

    A file normally holds one statement. Several top-level statements are
    wrapped in a Block so that a program is always a single Statement.
    """
    return _parse(text, "program")


# -- AST dumps ---------------------------------------------------------------


def _children(node) -> Iterator[tuple[str | None, object]]:
    match node:
        case Const(value):
            yield None, ("true" if value else "false") if isinstance(value, bool) else value
        case Var(name):
            yield None, name
        case BinExp(op, left, right):
            yield None, op
            yield "left", left
            yield "right", right
        case New(type_name):
            yield None, type_name
        case FieldRef(target, fname):
            yield None, fname
            yield "target", target
        case Block(statements):
            for s in statements:
                yield "", s
        case TypeDeclaration(name, names):
            yield None, name
            for n in names:
                yield None, n
        case ValueDeclaration(name, init):
            yield None, name
            yield "init", init
        case While(test, body):
            yield "test", test
            yield "body", body
        case If(test, then_part, else_part):
            yield "test", test
            yield "then", then_part
            if else_part is not None:
                yield "else", else_part
        case Update(name, value):
            yield None, name
            yield "value", value
        case FieldUpdate(target, fname, value):
            yield None, fname
            yield "target", target
            yield "value", value


def dump_ast(node: Statement | Exp) -> str:
    """One node per line; children indented by two spaces.

    Scalar attributes follow the node name on its own line, e.g.
    ``Update x`` then an indented ``value: Const 1``.
    """
    lines: list[str] = []

    def walk(n, indent: int, role: str) -> None:
        atoms = [str(v) for r, v in _children(n) if r is None]
        head = " ".join([type(n).__name__, *atoms])
        lines.append(" " * indent + (f"{role}: " if role else "") + head)
        for r, child in _children(n):
            if r is not None:
                walk(child, indent + 2, r)

    walk(node, 0, "")
    return "\n".join(lines)


def to_json(node: Statement | Exp | None):
    """Structured AST object with a ``kind`` tag per node."""
    if node is None:
        return None
    out: dict = {"kind": type(node).__name__}
    match node:
        case Const(value):
            out["value"] = value
        case Var(name):
            out["name"] = name
        case BinExp(op, left, right):
            out.update(op=op, left=to_json(left), right=to_json(right))
        case New(type_name):
            out["type"] = type_name
        case FieldRef(target, fname):
            out.update(target=to_json(target), field=fname)
        case Block(statements):
            out["statements"] = [to_json(s) for s in statements]
        case TypeDeclaration(name, names):
            out.update(name=name, fields=list(names))
        case ValueDeclaration(name, init):
            out.update(name=name, init=to_json(init))
        case While(test, body):
            out.update(test=to_json(test), body=to_json(body))
        case If(test, then_part, else_part):
            out.update(test=to_json(test), then=to_json(then_part), otherwise=to_json(else_part))
        case Update(name, value):
            out.update(name=name, value=to_json(value))
        case FieldUpdate(target, fname, value):
            out.update(target=to_json(target), field=fname, value=to_json(value))
    return out


def dumps_json(node: Statement | Exp) -> str:
    return json.dumps(to_json(node), indent=2)
