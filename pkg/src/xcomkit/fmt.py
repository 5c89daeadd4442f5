"""XCom source formatting on top of the document machine.

Expressions are always laid out on one line, parenthesized only where the
parser would otherwise group them differently. Compound statements try a
one-line layout first and fall back to stacking their parts, with bodies
indented by two columns.
"""

from __future__ import annotations

from .pretty import Doc, Indent, Just, NewLine, group, order, pprint
from .syntax import (
    ADDITIVE_OPS,
    LOGICAL_OPS,
    MULTIPLICATIVE_OPS,
    RELATIONAL_OPS,
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

_LEVEL = {
    op: i
    for i, ops in enumerate((LOGICAL_OPS, RELATIONAL_OPS, ADDITIVE_OPS, MULTIPLICATIVE_OPS))
    for op in ops
}
_ATOMIC = len(_LEVEL)


def _level(e: Exp) -> int:
    return _LEVEL[e.op] if isinstance(e, BinExp) else _ATOMIC


def exp_text(e: Exp) -> str:
    match e:
        case Const(value) if isinstance(value, bool):
            return "true" if value else "false"
        case Const(value):
            return str(value)
        case Var(name):
            return name
        case New(type_name):
            return f"new {type_name}"
        case FieldRef(target, name):
            return f"{_wrap(target, isinstance(target, BinExp))}.{name}"
        case BinExp(op, left, right):
            level = _LEVEL[op]
            # operators associate to the right, so a left operand at the same
            # level needs parentheses and a right one does not
            lhs = _wrap(left, _level(left) <= level)
            rhs = _wrap(right, _level(right) < level)
            return f"{lhs} {op} {rhs}"
    raise TypeError(f"not an expression: {e!r}")


def _wrap(e: Exp, parens: bool) -> str:
    text = exp_text(e)
    return f"({text})" if parens else text


def statement_line(s: Statement) -> str:
    """The statement on a single line."""
    match s:
        case Block(statements):
            return " ".join(["begin", *map(statement_line, statements), "end"])
        case TypeDeclaration(name, names):
            return " ".join(["type", name, "is", *names, "end"])
        case ValueDeclaration(name, init):
            return f"value {name} is {exp_text(init)} end"
        case While(test, body):
            return f"while {exp_text(test)} do {statement_line(body)} end"
        case If(test, then_part, else_part):
            text = f"if {exp_text(test)} then {statement_line(then_part)}"
            if else_part is not None:
                text += f" else {statement_line(else_part)}"
            return text + " end"
        case Update(name, value):
            return f"{name} := {exp_text(value)};"
        case FieldUpdate(target, name, value):
            return f"{exp_text(FieldRef(target, name))} := {exp_text(value)};"
    raise TypeError(f"not a statement: {s!r}")


def _body(s: Statement) -> Doc:
    return Indent(2, order(NewLine(), statement_doc(s)))


def statement_doc(s: Statement) -> Doc:
    match s:
        case Block(()):
            return order(Just("begin"), NewLine(), Just("end"))
        case Block(statements):
            inner = order(*(order(NewLine(), statement_doc(x)) for x in statements))
            stacked = order(Just("begin"), Indent(2, inner), NewLine(), Just("end"))
        case While(test, body):
            stacked = order(Just(f"while {exp_text(test)} do"), _body(body), NewLine(), Just("end"))
        case If(test, then_part, else_part):
            parts = [Just(f"if {exp_text(test)}"), NewLine(), Just("then"), _body(then_part)]
            if else_part is not None:
                parts += [NewLine(), Just("else"), _body(else_part)]
            stacked = order(*parts, NewLine(), Just("end"))
        case _:
            return Just(statement_line(s))
    return group(Just(statement_line(s)), stacked)


def format_xcom(s: Statement, page_width: int = 80, ribbon_width: int = 80) -> str:
    return pprint(statement_doc(s), page_width, ribbon_width)
