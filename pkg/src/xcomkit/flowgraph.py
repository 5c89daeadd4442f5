"""Labelled flow graphs for XCom and their structural reductions.

Statement and guard nodes come straight from a program. Reductions replace
recognisable shapes with composite nodes: P for two statements in sequence,
W for a while loop, C for an if with both branches. Composite nodes count as
statements, so reductions compose.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Union

import networkx as nx
from networkx.algorithms.isomorphism import categorical_multiedge_match

from .fmt import exp_text, statement_line
from .syntax import Block, If, Statement, While


class EdgeKind(enum.Enum):
    NEXT = "next"
    TRUE = "true"
    FALSE = "false"


# Nodes have identity: two statements with the same text are different nodes.


@dataclass(eq=False)
class StatementNode:
    label: str


@dataclass(eq=False)
class GuardNode:
    label: str


@dataclass(eq=False)
class PNode:
    first: "FlowNode"
    second: "FlowNode"


@dataclass(eq=False)
class WNode:
    test: "FlowNode"
    body: "FlowNode"


@dataclass(eq=False)
class CNode:
    test: "FlowNode"
    then_n: "FlowNode"
    else_n: "FlowNode"


FlowNode = Union[StatementNode, GuardNode, PNode, WNode, CNode]


def is_statement(n: FlowNode) -> bool:
    return not isinstance(n, GuardNode)


def structure(n: FlowNode):
    """Comparable label structure; composites nest their parts' structures."""
    match n:
        case StatementNode(label):
            return ("S", label)
        case GuardNode(label):
            return ("G", label)
        case PNode(a, b):
            return ("P", structure(a), structure(b))
        case WNode(t, b):
            return ("W", structure(t), structure(b))
        case CNode(t, a, b):
            return ("C", structure(t), structure(a), structure(b))
    raise TypeError(f"not a flow node: {n!r}")


def describe(n: FlowNode) -> str:
    match n:
        case StatementNode(label) | GuardNode(label):
            return label
        case PNode(a, b):
            return f"P({describe(a)}; {describe(b)})"
        case WNode(t, b):
            return f"W({describe(t)}; {describe(b)})"
        case CNode(t, a, b):
            return f"C({describe(t)}; {describe(a)}; {describe(b)})"
    raise TypeError(f"not a flow node: {n!r}")


@dataclass(frozen=True)
class FlowEdge:
    kind: EdgeKind
    source: FlowNode
    target: FlowNode


def _unique(items) -> tuple:
    return tuple(dict.fromkeys(items))


@dataclass(frozen=True)
class FlowGraph:
    """Nodes and edges in insertion order; both behave as sets."""

    nodes: tuple = ()
    edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", _unique(self.nodes))
        object.__setattr__(self, "edges", _unique(self.edges))
        members = set(self.nodes)
        for e in self.edges:
            if e.source not in members or e.target not in members:
                raise ValueError(f"edge {e.kind.value} has an endpoint outside the graph")

    @classmethod
    def pattern(cls, nodes, edges) -> "FlowGraph":
        """A subgraph to remove; its edges may lead to nodes outside it."""
        g = object.__new__(cls)
        object.__setattr__(g, "nodes", _unique(nodes))
        object.__setattr__(g, "edges", _unique(edges))
        return g

    def out_edges(self, n: FlowNode) -> list[FlowEdge]:
        return [e for e in self.edges if e.source is n]

    def in_edges(self, n: FlowNode) -> list[FlowEdge]:
        return [e for e in self.edges if e.target is n]

    def add_edge(self, e: FlowEdge) -> "FlowGraph":
        return FlowGraph(self.nodes, (*self.edges, e))

    def __len__(self) -> int:
        return len(self.nodes)


# -- construction ------------------------------------------------------------


class _Builder:
    def __init__(self):
        self.nodes: list[FlowNode] = []
        self.edges: list[FlowEdge] = []

    def node(self, n: FlowNode, preds) -> FlowNode:
        self.nodes.append(n)
        for src, kind in preds:
            self.edges.append(FlowEdge(kind, src, n))
        return n

    def branch(self, s: Statement, preds):
        """Lay out ``s`` entered from ``preds``; an empty body becomes a skip
        node so the guard still has somewhere to go."""
        before = len(self.nodes)
        exits = self.stmt(s, preds)
        if len(self.nodes) == before:
            skip = self.node(StatementNode("skip"), preds)
            exits = [(skip, EdgeKind.NEXT)]
        return exits

    def stmt(self, s: Statement, preds):
        match s:
            case Block(statements):
                for x in statements:
                    preds = self.stmt(x, preds)
                return preds
            case While(test, body):
                guard = self.node(GuardNode(exp_text(test)), preds)
                for src, kind in self.branch(body, [(guard, EdgeKind.TRUE)]):
                    self.edges.append(FlowEdge(kind, src, guard))
                return [(guard, EdgeKind.FALSE)]
            case If(test, then_part, else_part):
                guard = self.node(GuardNode(exp_text(test)), preds)
                exits = self.branch(then_part, [(guard, EdgeKind.TRUE)])
                if else_part is None:
                    return exits + [(guard, EdgeKind.FALSE)]
                return exits + self.branch(else_part, [(guard, EdgeKind.FALSE)])
            case _:
                n = self.node(StatementNode(statement_line(s)), preds)
                return [(n, EdgeKind.NEXT)]


def from_program(s: Statement) -> FlowGraph:
    b = _Builder()
    exits = b.stmt(s, [])
    b.node(StatementNode("skip"), exits)
    return FlowGraph(tuple(b.nodes), tuple(b.edges))


# -- reduction ---------------------------------------------------------------


def reduce_base(g: FlowGraph, n: FlowNode, h: FlowGraph) -> FlowGraph:
    """Remove ``h`` from ``g``, add ``n``, and point every edge left dangling
    at ``n`` instead."""
    present = set(g.nodes)
    if any(x not in present for x in h.nodes) or any(e not in g.edges for e in h.edges):
        raise ValueError("subgraph is not part of the graph")
    removed = set(h.nodes)
    if h.nodes:
        first = min(g.nodes.index(x) for x in h.nodes)
        nodes = [x for x in g.nodes[:first] if x not in removed] + [n]
        nodes += [x for x in g.nodes[first:] if x not in removed]
    else:
        nodes = [*g.nodes, n]
    dropped = set(h.edges)
    edges = []
    for e in g.edges:
        if e in dropped:
            continue
        src = n if e.source in removed else e.source
        tgt = n if e.target in removed else e.target
        edges.append(FlowEdge(e.kind, src, tgt))
    return FlowGraph(tuple(nodes), tuple(edges))


def _single(edges: list[FlowEdge], kind: EdgeKind | None = None) -> FlowEdge | None:
    if len(edges) == 1 and (kind is None or edges[0].kind is kind):
        return edges[0]
    return None


def p_matches(g: FlowGraph) -> Iterator[tuple[FlowNode, FlowNode, FlowEdge]]:
    for n1 in g.nodes:
        if not is_statement(n1):
            continue
        e = _single(g.out_edges(n1), EdgeKind.NEXT)
        if e is None or e.target is n1 or not is_statement(e.target):
            continue
        if len(g.in_edges(e.target)) == 1:
            yield n1, e.target, e


def w_matches(g: FlowGraph):
    for test in g.nodes:
        if is_statement(test):
            continue
        outs = g.out_edges(test)
        enter = [e for e in outs if e.kind is EdgeKind.TRUE]
        exit_ = [e for e in outs if e.kind is EdgeKind.FALSE]
        if len(outs) != 2 or len(enter) != 1 or len(exit_) != 1:
            continue
        body, root = enter[0].target, exit_[0].target
        if not is_statement(body) or len({test, body, root}) != 3:
            continue
        loop = _single(g.out_edges(body), EdgeKind.NEXT)
        if loop is None or loop.target is not test or len(g.in_edges(body)) != 1:
            continue
        yield test, body, root, (enter[0], loop, exit_[0])


def c_matches(g: FlowGraph):
    for test in g.nodes:
        if is_statement(test):
            continue
        outs = g.out_edges(test)
        true_e = [e for e in outs if e.kind is EdgeKind.TRUE]
        false_e = [e for e in outs if e.kind is EdgeKind.FALSE]
        if len(outs) != 2 or len(true_e) != 1 or len(false_e) != 1:
            continue
        then_n, else_n = true_e[0].target, false_e[0].target
        if not (is_statement(then_n) and is_statement(else_n)):
            continue
        end_then = _single(g.out_edges(then_n), EdgeKind.NEXT)
        end_else = _single(g.out_edges(else_n), EdgeKind.NEXT)
        if end_then is None or end_else is None or end_then.target is not end_else.target:
            continue
        root = end_then.target
        if len({test, then_n, else_n, root}) != 4:
            continue
        if len(g.in_edges(then_n)) != 1 or len(g.in_edges(else_n)) != 1:
            continue
        yield test, then_n, else_n, root, (true_e[0], false_e[0], end_then, end_else)


def reduce_p(g: FlowGraph) -> FlowGraph:
    for n1, n2, e in p_matches(g):
        return reduce_base(g, PNode(n1, n2), FlowGraph.pattern((n1, n2), (e,)))
    return g


def reduce_w(g: FlowGraph) -> FlowGraph:
    for test, body, root, edges in w_matches(g):
        w = WNode(test, body)
        g2 = reduce_base(g, w, FlowGraph.pattern((test, body), edges))
        return g2.add_edge(FlowEdge(EdgeKind.NEXT, w, root))
    return g


def reduce_c(g: FlowGraph) -> FlowGraph:
    for test, then_n, else_n, root, edges in c_matches(g):
        c = CNode(test, then_n, else_n)
        g2 = reduce_base(g, c, FlowGraph.pattern((test, then_n, else_n), edges))
        return g2.add_edge(FlowEdge(EdgeKind.NEXT, c, root))
    return g


def reduce_fix(g: FlowGraph) -> FlowGraph:
    return reduce_fix_counted(g)[0]


def reduce_fix_counted(g: FlowGraph) -> tuple[FlowGraph, int]:
    """Apply P, W and C passes until one changes nothing; also return the
    number of passes made, the last unchanged one included."""
    passes = 0
    while True:
        passes += 1
        g2 = reduce_c(reduce_w(reduce_p(g)))
        if graph_equals(g2, g):
            return g2, passes
        g = g2


# -- comparison and output ---------------------------------------------------


def _nx(g: FlowGraph) -> nx.MultiDiGraph:
    m = nx.MultiDiGraph()
    index = {n: i for i, n in enumerate(g.nodes)}
    for n, i in index.items():
        m.add_node(i, label=structure(n))
    for e in g.edges:
        m.add_edge(index[e.source], index[e.target], kind=e.kind.value)
    return m


def graph_equals(g1: FlowGraph, g2: FlowGraph) -> bool:
    """Equal up to node identity: labels, edge endpoints and edge kinds must
    correspond."""
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return False
    return nx.is_isomorphic(
        _nx(g1),
        _nx(g2),
        node_match=lambda a, b: a["label"] == b["label"],
        edge_match=categorical_multiedge_match("kind", None),
    )


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: FlowGraph, name: str = "flow") -> str:
    ids = {n: f"n{i + 1}" for i, n in enumerate(g.nodes)}
    lines = [f"digraph {name} {{"]
    for n, ident in ids.items():
        match n:
            case StatementNode():
                attrs = "shape=box"
            case GuardNode():
                attrs = "shape=diamond"
            case _:
                attrs = "shape=box, peripheries=2"
        lines.append(f"  {ident} [label={_quote(describe(n))}, {attrs}];")
    for e in g.edges:
        lines.append(f"  {ids[e.source]} -> {ids[e.target]} [label={_quote(e.kind.value)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
