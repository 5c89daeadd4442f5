"""Brute-force pattern search used to check the flow-graph reductions.

Every combination of edges of the right kinds is tried, so nothing depends
on the search order of the library's matchers.
"""

import itertools

from xcomkit.flowgraph import EdgeKind, GuardNode


def _kind(g, kind):
    return [e for e in g.edges if e.kind is kind]


def _stmt(n):
    return not isinstance(n, GuardNode)


def _deg(g, n):
    return (sum(e.target is n for e in g.edges), sum(e.source is n for e in g.edges))


def p_patterns(g):
    out = []
    for e in _kind(g, EdgeKind.NEXT):
        n1, n2 = e.source, e.target
        if n1 is not n2 and _stmt(n1) and _stmt(n2) and _deg(g, n1)[1] == 1 and _deg(g, n2)[0] == 1:
            out.append((n1, n2))
    return out


def w_patterns(g):
    out = []
    for enter, loop, exit_ in itertools.product(
        _kind(g, EdgeKind.TRUE), _kind(g, EdgeKind.NEXT), _kind(g, EdgeKind.FALSE)
    ):
        test, body, root = enter.source, enter.target, exit_.target
        if (
            exit_.source is test and loop.source is body and loop.target is test
            and not _stmt(test) and _stmt(body)
            and len({id(test), id(body), id(root)}) == 3
            and _deg(g, body) == (1, 1) and _deg(g, test)[1] == 2
        ):
            out.append((test, body, root))
    return out


def c_patterns(g):
    out = []
    nexts = _kind(g, EdgeKind.NEXT)
    for t, f, a, b in itertools.product(_kind(g, EdgeKind.TRUE), _kind(g, EdgeKind.FALSE), nexts, nexts):
        test, then_n, else_n, root = t.source, t.target, f.target, a.target
        if (
            f.source is test and a.source is then_n and b.source is else_n and b.target is root
            and not _stmt(test) and _stmt(then_n) and _stmt(else_n)
            and len({id(test), id(then_n), id(else_n), id(root)}) == 4
            and _deg(g, then_n) == (1, 1) and _deg(g, else_n) == (1, 1) and _deg(g, test)[1] == 2
        ):
            out.append((test, then_n, else_n, root))
    return out


def any_pattern(g):
    return bool(p_patterns(g) or w_patterns(g) or c_patterns(g))
