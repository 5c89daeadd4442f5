import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flow_oracle import any_pattern, c_patterns, p_patterns, w_patterns
from xcomkit.check import generate
from xcomkit.flowgraph import (
    CNode,
    EdgeKind,
    FlowEdge,
    FlowGraph,
    GuardNode,
    PNode,
    StatementNode,
    WNode,
    from_program,
    graph_equals,
    reduce_base,
    reduce_c,
    reduce_fix,
    reduce_fix_counted,
    reduce_p,
    reduce_w,
    to_dot,
)
from xcomkit.syntax import parse_program

NEXT, TRUE, FALSE = EdgeKind.NEXT, EdgeKind.TRUE, EdgeKind.FALSE


def figure_graph():
    """The even-list flow graph exactly as listed in the figure (e1..e14,
    which has no e10)."""
    n = [None] + [
        StatementNode("type Pair is head tail end"),
        StatementNode("type Nil is end"),
        StatementNode("value length is 100 end"),
        StatementNode("value list is new Nil end"),
        GuardNode("length > 0"),
        GuardNode("length mod 2 = 0"),
        StatementNode("value pair is new Pair end"),
        StatementNode("pair.head := length;"),
        StatementNode("pair.tail := list;"),
        StatementNode("list := pair;"),
        StatementNode("length := length - 1;"),
        StatementNode("skip"),
    ]
    edges = [
        (NEXT, 1, 2), (NEXT, 2, 3), (NEXT, 3, 4), (NEXT, 4, 5), (TRUE, 5, 6), (TRUE, 6, 7),
        (NEXT, 7, 8), (NEXT, 8, 9), (NEXT, 9, 10), (NEXT, 10, 11), (NEXT, 11, 5),
        (FALSE, 6, 11), (FALSE, 5, 12),
    ]
    return FlowGraph(tuple(n[1:]), tuple(FlowEdge(k, n[a], n[b]) for k, a, b in edges))


def chain(*labels):
    nodes = [StatementNode(x) for x in labels]
    return FlowGraph(tuple(nodes), tuple(FlowEdge(NEXT, a, b) for a, b in zip(nodes, nodes[1:])))


def test_straight_line_program():
    g = from_program(parse_program("begin x := 1; y := 2; end"))
    assert [n.label for n in g.nodes] == ["x := 1;", "y := 2;", "skip"]
    assert len(g.edges) == 2 and all(e.kind is NEXT for e in g.edges)


def test_even_list_matches_figure(even_list):
    g = from_program(even_list)
    assert len(g.nodes) == 12
    assert len(g.edges) == 13
    assert graph_equals(g, figure_graph())


def test_empty_loop_body_gets_a_skip_node():
    g = from_program(parse_program("while b do begin end end"))
    guard, skip, end = g.nodes
    assert isinstance(guard, GuardNode) and skip.label == "skip" and end.label == "skip"
    assert set(g.edges) == {
        FlowEdge(TRUE, guard, skip), FlowEdge(NEXT, skip, guard), FlowEdge(FALSE, guard, end),
    }


def test_if_with_both_branches():
    g = from_program(parse_program("if b then x := 1; else x := 2; end"))
    guard, then_n, else_n, end = g.nodes
    assert set(g.edges) == {
        FlowEdge(TRUE, guard, then_n), FlowEdge(FALSE, guard, else_n),
        FlowEdge(NEXT, then_n, end), FlowEdge(NEXT, else_n, end),
    }


def test_nested_guard_false_edge_returns_to_loop():
    g = from_program(parse_program("while a do if b then x := 1; end end"))
    outer, inner, stmt, _ = g.nodes
    assert FlowEdge(FALSE, inner, outer) in g.edges
    assert FlowEdge(NEXT, stmt, outer) in g.edges


def test_reduce_base_relinks_dangling_edges():
    a, b = StatementNode("a"), StatementNode("b")
    g = FlowGraph((a, b), (FlowEdge(NEXT, a, b),))
    n = StatementNode("n")
    out = reduce_base(g, n, FlowGraph((b,), ()))
    assert out.nodes == (a, n) and out.edges == (FlowEdge(NEXT, a, n),)


def test_reduce_base_collapses_duplicate_edges():
    a, b, c = StatementNode("a"), StatementNode("b"), StatementNode("c")
    g = FlowGraph((a, b, c), (FlowEdge(NEXT, a, c), FlowEdge(NEXT, b, c)))
    n = StatementNode("n")
    out = reduce_base(g, n, FlowGraph((a, b), ()))
    assert out.edges == (FlowEdge(NEXT, n, c),)


def test_reduce_base_with_empty_subgraph():
    g = chain("a", "b")
    n = StatementNode("n")
    out = reduce_base(g, n, FlowGraph())
    assert out.nodes == (*g.nodes, n) and out.edges == g.edges


def test_reduce_base_checks_its_precondition():
    with pytest.raises(ValueError):
        reduce_base(chain("a"), StatementNode("n"), FlowGraph((StatementNode("x"),)))


def test_p_reduction():
    g = chain("a", "b")
    out = reduce_p(g)
    (p,) = out.nodes
    assert isinstance(p, PNode) and (p.first, p.second) == g.nodes
    assert out.edges == ()


def test_w_reduction():
    test, body, root = GuardNode("t"), StatementNode("s"), StatementNode("r")
    g = FlowGraph((test, body, root), (
        FlowEdge(TRUE, test, body), FlowEdge(NEXT, body, test), FlowEdge(FALSE, test, root)))
    out = reduce_w(g)
    w, r = out.nodes
    assert isinstance(w, WNode) and (w.test, w.body) == (test, body) and r is root
    assert out.edges == (FlowEdge(NEXT, w, root),)


def test_c_reduction():
    test, s1, s2, root = GuardNode("t"), StatementNode("s1"), StatementNode("s2"), StatementNode("r")
    g = FlowGraph((test, s1, s2, root), (
        FlowEdge(TRUE, test, s1), FlowEdge(FALSE, test, s2),
        FlowEdge(NEXT, s1, root), FlowEdge(NEXT, s2, root)))
    out = reduce_c(g)
    c, r = out.nodes
    assert isinstance(c, CNode) and (c.test, c.then_n, c.else_n) == (test, s1, s2)
    assert out.edges == (FlowEdge(NEXT, c, root),)


def test_reductions_leave_unmatched_graphs_alone():
    g = FlowGraph((GuardNode("t"),))
    assert reduce_p(g) is g and reduce_w(g) is g and reduce_c(g) is g


def test_fixpoint_of_a_chain_is_a_nested_pair():
    (p,) = reduce_fix(chain("a", "b", "c")).nodes
    assert isinstance(p, PNode) and isinstance(p.first, PNode)


def test_fixpoint_of_a_single_node():
    g = chain("a")
    assert graph_equals(reduce_fix(g), g)


def test_loop_in_sequence_reduces_to_pairs_around_a_loop():
    g = from_program(parse_program("begin x := 1; while b do x := 2; end y := 3; end"))
    (top,) = reduce_fix(g).nodes
    assert isinstance(top, PNode)
    assert isinstance(top.first, PNode) and isinstance(top.first.second, WNode)


def test_even_list_stops_at_the_else_less_if(even_list):
    out = reduce_fix(from_program(even_list))
    assert len(out.nodes) == 6
    assert not any_pattern(out)


def test_graph_equality():
    g = from_program(parse_program("if b then x := 1; else x := 2; end"))
    assert graph_equals(g, g)
    assert not graph_equals(chain("a"), chain("b"))
    swapped = FlowGraph(g.nodes, tuple(
        FlowEdge({TRUE: FALSE, FALSE: TRUE}.get(e.kind, e.kind), e.source, e.target) for e in g.edges))
    assert not graph_equals(g, swapped)


def test_dot_output():
    assert to_dot(FlowGraph()) == "digraph flow {\n}\n"
    dot = to_dot(chain("a", "b"))
    assert dot.count("->") == 1 and '[label="next"]' in dot


def test_dot_of_even_list(even_list):
    dot = to_dot(from_program(even_list))
    lines = dot.splitlines()
    assert sum("->" in x for x in lines) == 13
    assert sum("shape=" in x for x in lines) == 12
    assert dot.count("shape=diamond") == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_reduction_terminates_and_is_complete(seed):
    for p in generate(seed, 2):
        g = from_program(p)
        out, passes = reduce_fix_counted(g)
        assert passes <= len(g.nodes)
        assert not any_pattern(out)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_each_reduction_shrinks_the_graph(seed):
    for p in generate(seed, 1):
        g = from_program(p)
        for step in (reduce_p, reduce_w, reduce_c):
            out = step(g)
            assert out is g or len(out.nodes) < len(g.nodes)
            # edges away from the reduced part are untouched
            if out is not g:
                kept = set(out.nodes) & set(g.nodes)
                for e in g.edges:
                    if e.source in kept and e.target in kept:
                        assert e in out.edges


def test_oracle_agrees_with_matchers_on_small_cases():
    g = chain("a", "b")
    assert p_patterns(g) and not w_patterns(g) and not c_patterns(g)
