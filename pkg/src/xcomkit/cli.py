"""Command-line entry point.

Exit status: 0 success, 1 run-time error, 2 syntax or static error,
3 differential mismatch, 64 bad usage.
"""

from __future__ import annotations

import argparse
import sys

from . import flowgraph, secd
from .check import check
from .core import core_eval, render
from .errors import EvalError, MachineError, ParseError, StaticError, XComError
from .fmt import format_xcom
from .interp import run_program
from .syntax import dump_ast, dumps_json, parse_program
from .translate import desugar1_program, desugar2_program, observed_names
from .values import show
from .vm import assemble, compile_program, listing, run_compiled

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_STATIC = 2
EXIT_MISMATCH = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None


def _program(args):
    return parse_program(_read(args.input))


def _print_bindings(names, lookup) -> None:
    for name in names:
        print(f"{name} = {show(lookup(name))}")


def cmd_parse(args) -> int:
    p = _program(args)
    print(dumps_json(p) if args.json else dump_ast(p))
    return EXIT_OK


def cmd_fmt(args) -> int:
    print(format_xcom(_program(args), args.page, args.ribbon))
    return EXIT_OK


def cmd_run(args) -> int:
    p = _program(args)
    env = run_program(p)
    _print_bindings(observed_names(p), env.lookup)
    return EXIT_OK


def cmd_desugar(args) -> int:
    p = _program(args)
    if args.eval:
        if args.mode == "rt":
            record = core_eval(desugar1_program(p, observe=True))
        else:
            record = core_eval(desugar2_program(p, observe=True))
        _print_bindings(observed_names(p), record.lookup)
        return EXIT_OK
    e = desugar1_program(p) if args.mode == "rt" else desugar2_program(p)
    print(render(e, args.width))
    return EXIT_OK


def cmd_compile(args) -> int:
    compiled = compile_program(_program(args))
    if args.dump_resolved:
        print(listing(assemble(compiled.code), numbered=True))
    else:
        print(listing(compiled.code))
    return EXIT_OK


def cmd_exec(args) -> int:
    p = _program(args)
    _, values = run_compiled(compile_program(p))
    _print_bindings(observed_names(p), values.__getitem__)
    return EXIT_OK


def cmd_cfg(args) -> int:
    g = flowgraph.from_program(_program(args))
    if args.reduce:
        g = flowgraph.reduce_fix(g)
    if args.dot:
        sys.stdout.write(flowgraph.to_dot(g))
    else:
        print(f"nodes: {len(g.nodes)}")
        print(f"edges: {len(g.edges)}")
    return EXIT_OK


def cmd_secd(args) -> int:
    e = secd.parse_lambda(args.expr)
    env = secd.EMPTY_ENV if args.no_builtins else secd.BUILTIN_ENV
    if args.trace:
        for st in secd.trace(e, env, args.max_steps):
            print(secd.render_state(st))
    else:
        print(secd.render_value(secd.run(e, env, args.max_steps)))
    return EXIT_OK


def cmd_check(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    report = check(args.seed, args.count, args.inject_rate)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xcomkit", description="XCom language toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, fn, help, source=True):
        p = sub.add_parser(name, help=help)
        if source:
            p.add_argument("input", help="source file, or - for standard input")
        p.set_defaults(fn=fn)
        return p

    p = command("parse", cmd_parse, "print the syntax tree")
    p.add_argument("--json", action="store_true", help="emit a JSON object")

    p = command("fmt", cmd_fmt, "format source")
    p.add_argument("--page", type=int, default=80)
    p.add_argument("--ribbon", type=int, default=80)

    command("run", cmd_run, "run with the interpreter")

    p = command("desugar", cmd_desugar, "translate to the core language")
    p.add_argument("--mode", choices=("rt", "static"), default="rt")
    p.add_argument("--eval", action="store_true", help="evaluate the translation")
    p.add_argument("--width", type=int, default=80)

    p = command("compile", cmd_compile, "print machine code")
    p.add_argument("--dump-resolved", action="store_true", help="show assembled code")

    command("exec", cmd_exec, "run on the virtual machine")

    p = command("cfg", cmd_cfg, "build the flow graph")
    p.add_argument("--reduce", action="store_true")
    p.add_argument("--dot", action="store_true")

    p = command("secd", cmd_secd, "evaluate a lambda expression", source=False)
    p.add_argument("expr")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--no-builtins", action="store_true", help="start from the empty environment")
    p.add_argument("--max-steps", type=int, default=secd.DEFAULT_MAX_STEPS)

    p = command("check", cmd_check, "differential test on random programs", source=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--inject-rate", type=float, default=0.0)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "page", 1) < 1 or getattr(args, "ribbon", 1) < 1:
            raise UsageError("widths must be at least 1")
        return args.fn(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, StaticError) as err:
        print(err, file=sys.stderr)
        return EXIT_STATIC
    except (EvalError, MachineError) as err:
        print(err, file=sys.stderr)
        return EXIT_RUNTIME
    except XComError as err:
        print(err, file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
