"""Tools for the XCom language: parser, interpreters, translators, a
stack machine, a pretty printer, flow graphs, and an SECD machine."""

from .errors import EvalError, MachineError, ParseError, StaticError, XComError
from .fmt import format_xcom
from .interp import run_program
from .syntax import parse_program

__all__ = [
    "EvalError",
    "MachineError",
    "ParseError",
    "StaticError",
    "XComError",
    "format_xcom",
    "parse_program",
    "run_program",
]
