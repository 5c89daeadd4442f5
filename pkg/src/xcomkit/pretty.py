"""Documents and the backtracking machine that prints them.

A document is laid out by a machine holding a stack of frames (each a
list of documents still to print, with their indentation) and a stack of
choice points. ``Alt(left, right)`` prints ``left`` and records ``right`` as
a choice point; when text does not fit on the page or the ribbon, the
machine restores the latest choice point and carries on from there.
Text is written regardless when no choice point remains.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Union


@dataclass(frozen=True)
class Just:
    text: str

    def __post_init__(self):
        if "\n" in self.text:
            raise ValueError("Just text may not contain newlines; use NewLine")


@dataclass(frozen=True)
class Order:
    left: "Doc"
    right: "Doc"


@dataclass(frozen=True)
class NewLine:
    pass


@dataclass(frozen=True)
class Indent:
    cols: int
    doc: "Doc"

    def __post_init__(self):
        if self.cols < 0:
            raise ValueError("indentation must be non-negative")


@dataclass(frozen=True)
class Block:
    doc: "Doc"


@dataclass(frozen=True)
class Alt:
    left: "Doc"
    right: "Doc"


@dataclass(frozen=True)
class Mark:
    doc: "Doc"


@dataclass(frozen=True)
class Cut:
    doc: "Doc"


Doc = Union[Just, Order, NewLine, Indent, Block, Alt, Mark, Cut]

NOTHING = Just("")


def order(*docs: Doc) -> Doc:
    """Right-nested Order over several documents."""
    if not docs:
        return NOTHING
    result = docs[-1]
    for d in reversed(docs[:-1]):
        result = Order(d, result)
    return result


def line_of(strings: Iterable[str]) -> Doc:
    strings = list(strings)
    if not strings:
        raise ValueError("line_of needs at least one string")
    d: Doc = Just(strings[0])
    for s in strings[1:]:
        d = Order(d, Just(" " + s))
    return d


def stack_of(strings: Iterable[str]) -> Doc:
    strings = list(strings)
    if not strings:
        raise ValueError("stack_of needs at least one string")
    d: Doc = Just(strings[0])
    for s in strings[1:]:
        d = Order(d, Order(NewLine(), Just(s)))
    return d


def group(flat: Doc, broken: Doc) -> Doc:
    """Try ``flat``; fall back to ``broken``. Choice points made inside are
    discarded once the group is printed, so later overflow cannot reopen it."""
    return Mark(Block(Order(Alt(flat, broken), Cut(NOTHING))))


# -- machine -----------------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    indent: int
    code: tuple
    cut: tuple  # the fail stack a Cut in this frame restores


@dataclass(frozen=True)
class FailFrame:
    stack: tuple  # frames below the head at the time of the choice
    indent: int
    text_position: int
    line_position: int
    ribbon_position: int
    code: tuple
    cut: tuple


@dataclass
class Machine:
    page_width: int
    ribbon_width: int
    text_position: int = 0
    line_position: int = 0
    ribbon_position: int = 0
    buffer: list = field(default_factory=list)
    stack: tuple = ()
    fail: tuple = ()

    # stacks are tuples, head first; frames are immutable, so a snapshot of
    # the stack is just the tuple

    @classmethod
    def load(cls, doc: Doc, page_width: int, ribbon_width: int) -> "Machine":
        if page_width < 1 or ribbon_width < 1:
            raise ValueError("page and ribbon widths must be at least 1")
        m = cls(page_width, ribbon_width)
        m.push_frame(0, (doc,), ())
        return m

    def copy(self) -> "Machine":
        return replace(self, buffer=list(self.buffer))

    @property
    def output(self) -> str:
        return "".join(self.buffer[: self.text_position])

    @property
    def terminal(self) -> bool:
        return all(not f.code for f in self.stack)

    def can_print(self, text: str) -> bool:
        return can_print(text, self.page_width, self.ribbon_width,
                         self.line_position, self.ribbon_position)

    def emit(self, s: str) -> None:
        # output past the write position belongs to an abandoned layout
        del self.buffer[self.text_position:]
        self.buffer.extend(s)

    def write(self, text: str) -> None:
        self.emit(text)
        self.text_position += len(text)
        self.line_position += len(text)
        self.ribbon_position += len(text)

    def newline(self) -> None:
        indent = self.stack[0].indent
        self.emit("\n" + " " * indent)
        self.text_position += indent + 1
        self.line_position = indent
        self.ribbon_position = 0

    def push_frame(self, indent: int, code: tuple, cut: tuple) -> None:
        self.stack = (Frame(indent, tuple(code), cut), *self.stack)

    def push_fail(self, code: tuple) -> None:
        head = self.stack[0]
        choice = FailFrame(self.stack[1:], head.indent, self.text_position,
                           self.line_position, self.ribbon_position, tuple(code), head.cut)
        self.fail = (choice, *self.fail)

    def do_fail(self) -> None:
        if not self.fail:
            raise RuntimeError("fail with no choice point")
        choice, *rest = self.fail
        self.stack = (Frame(choice.indent, choice.code, choice.cut), *choice.stack)
        self.text_position = choice.text_position
        self.line_position = choice.line_position
        self.ribbon_position = choice.ribbon_position
        del self.buffer[self.text_position:]
        self.fail = tuple(rest)

    def _set_code(self, code: tuple) -> None:
        self.stack = (replace(self.stack[0], code=code), *self.stack[1:])

    def step(self) -> None:
        frame = self.stack[0]
        if not frame.code:
            self.stack = self.stack[1:]
            return
        instr, rest = frame.code[0], frame.code[1:]
        self._set_code(rest)
        match instr:
            case Just(text):
                if self.can_print(text) or not self.fail:
                    self.write(text)
                else:
                    self.do_fail()
            case Order(left, right):
                self._set_code((left, right, *rest))
            case Indent(cols, doc):
                self.push_frame(frame.indent + cols, (doc,), frame.cut)
            case Block(doc):
                self.push_frame(self.line_position, (doc,), frame.cut)
            case Cut(doc):
                self.fail = frame.cut
                self._set_code((doc, *rest))
            case Mark(doc):
                self.push_frame(frame.indent, (doc,), self.fail)
            case NewLine():
                self.newline()
            case Alt(left, right):
                self._set_code((left, *rest))
                self.push_fail((right, *rest))
            case _:
                raise TypeError(f"not a document: {instr!r}")

    def run(self) -> "Machine":
        while self.stack and not self.terminal:
            self.step()
        return self

    def trace(self):
        """Yield a snapshot of every state from the loaded one to the terminal one."""
        yield self.copy()
        while self.stack and not self.terminal:
            self.step()
            yield self.copy()


def can_print(text: str, w: int, r: int, pl: int, pr: int) -> bool:
    return pl + len(text) < w and pr + len(text) < r


def pprint(doc: Doc, page_width: int, ribbon_width: int) -> str:
    return Machine.load(doc, page_width, ribbon_width).run().output


# -- rendering machine states ------------------------------------------------


def render_doc(doc: Doc) -> str:
    """Compact document text: ``d1;d2`` for Order, ``Newline[]`` for breaks."""
    match doc:
        case Just(text):
            return text
        case Order(left, right):
            return f"{render_doc(left)};{render_doc(right)}"
        case NewLine():
            return "Newline[]"
        case Indent(cols, d):
            return f"Indent[{cols} {render_doc(d)}]"
        case Block(d):
            return f"Block[doc = {render_doc(d)}]"
        case Alt(left, right):
            return f"Alt[{render_doc(left)} | {render_doc(right)}]"
        case Mark(d):
            return f"Mark[{render_doc(d)}]"
        case Cut(d):
            return f"Cut[{render_doc(d)}]"
    raise TypeError(f"not a document: {doc!r}")


def render_frame(f: Frame | FailFrame) -> str:
    code = ", ".join(render_doc(d) for d in f.code)
    cut = f"Seq{{{len(f.cut)} choices}}" if f.cut else "Seq{}"
    return f"Frame[{f.indent},\n  code = Seq{{{code}}},\n  cut = {cut}\n  ]"


def render_machine(m: Machine) -> str:
    """The machine as ``Machine[w,r,text,line,ribbon`` then the buffer, the
    frame stack and the fail stack."""
    frames = ",\n".join(render_frame(f) for f in m.stack)
    fails = ",\n".join(render_frame(f) for f in m.fail)
    return (
        f"Machine[{m.page_width},{m.ribbon_width},{m.text_position},"
        f"{m.line_position},{m.ribbon_position},\n"
        f"  [{m.output}],\n"
        f"  Seq{{{frames}}},\n"
        f"  Seq{{{fails}}}]"
    )


# -- s-expressions -----------------------------------------------------------


def _flat_sexp(x) -> str:
    if isinstance(x, list):
        return "(" + " ".join(_flat_sexp(y) for y in x) + ")"
    return x


def sexp_doc(x) -> Doc:
    """Layout for nested lists: one line if it fits, else the head and first
    argument on the opening line and the rest stacked under the first."""
    if not isinstance(x, list):
        return Just(x)
    flat = Just(_flat_sexp(x))
    if len(x) <= 2:
        return flat
    head, *args = x
    rest = [Order(NewLine(), sexp_doc(a)) for a in args[1:]]
    broken = order(Just("(" + head + " "), Block(order(sexp_doc(args[0]), *rest, Just(")"))))
    return group(flat, broken)
