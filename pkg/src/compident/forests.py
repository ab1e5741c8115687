"""Input-output coefficients via spanning incoming forests.

The leak-extended graph adds a sink vertex 0 and an edge l -> 0 labeled
k_{0l} for every leak l; the starred variant additionally removes every
outgoing edge of a designated output vertex.  A spanning incoming forest is
an edge subset in which each vertex has at most one outgoing edge and the
underlying undirected multigraph is acyclic.

Summing edge-label products over m-edge forests reproduces the y-side
coefficients of the input-output equation; restricting to forests whose
undirected component joins the input and the output (on the starred graph)
reproduces the u-side coefficients.  This route is fully independent of the
determinant expansion in the ioeq module and serves as its oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .model import CompartmentalModel, ParameterId
from .polynomial import Polynomial

LabeledEdge = Tuple[int, int, ParameterId]  # (from, to, label)


@dataclass(frozen=True)
class LeakExtendedGraph:
    """Vertices [n] plus sink 0; labeled edges in a fixed enumeration order."""

    n: int
    edges: Tuple[LabeledEdge, ...]
    star_output: Optional[int] = None

    @classmethod
    def from_model(cls, model: CompartmentalModel,
                   star_output: Optional[int] = None) -> "LeakExtendedGraph":
        edges: List[LabeledEdge] = []
        for frm, to in model.edges:
            if frm == star_output:
                continue
            edges.append((frm, to, ParameterId.edge(frm, to)))
        for l in sorted(model.leaks):
            if l == star_output:
                continue
            edges.append((l, 0, ParameterId.leak(l)))
        edges.sort(key=lambda e: (e[0], e[1]))
        return cls(n=model.n, edges=tuple(edges), star_output=star_output)

    def outgoing(self, v: int) -> Tuple[LabeledEdge, ...]:
        return tuple(e for e in self.edges if e[0] == v)


@dataclass(frozen=True)
class Forest:
    """An edge subset forming a spanning incoming forest."""

    edges: Tuple[LabeledEdge, ...]

    def label_product(self) -> Polynomial:
        mono = {}
        for _, _, label in self.edges:
            mono[label] = mono.get(label, 0) + 1
        return Polynomial.from_terms({tuple(sorted(mono.items())): 1})

    def __len__(self) -> int:
        return len(self.edges)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x, y) -> bool:
        """Merge the two classes; False when x and y were already joined."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[rx] = ry
        return True


def enumerate_incoming_forests(g: LeakExtendedGraph, m: int,
                               connectivity_pair: Optional[Tuple[int, int]] = None
                               ) -> Iterator[Forest]:
    """Yield every m-edge spanning incoming forest of g, deterministically.

    The walk assigns each vertex 1..n either no outgoing edge or one of its
    outgoing edges in ascending target order, pruning undirected cycles with
    a union-find; vertex 0 never has outgoing edges.  With a connectivity
    pair (j, i), only forests whose undirected support joins j and i are
    yielded.
    """
    if m < 0:
        return
    outgoing = [g.outgoing(v) for v in range(g.n + 1)]
    chosen: List[LabeledEdge] = []
    parents_stack: List[Dict] = []
    uf = _UnionFind(range(g.n + 1))

    def walk(v: int, count: int) -> Iterator[Forest]:
        remaining = g.n - v + 1
        if count + remaining < m or count > m:
            return
        if v > g.n:
            if count == m and (connectivity_pair is None
                               or uf.find(connectivity_pair[0]) == uf.find(connectivity_pair[1])):
                yield Forest(edges=tuple(chosen))
            return
        # option 1: v keeps no outgoing edge
        yield from walk(v + 1, count)
        # option 2: one outgoing edge of v, in enumeration order
        for edge in outgoing[v]:
            frm, to, _ = edge
            saved = dict(uf.parent)
            if uf.union(frm, to):
                chosen.append(edge)
                yield from walk(v + 1, count + 1)
                chosen.pop()
            uf.parent = saved

    yield from walk(1, 0)


def is_spanning_incoming_forest(g: LeakExtendedGraph, edges) -> bool:
    """Independent validity check of the two forest conditions."""
    outdeg: Dict[int, int] = {}
    uf = _UnionFind(range(g.n + 1))
    for frm, to, _ in edges:
        outdeg[frm] = outdeg.get(frm, 0) + 1
        if outdeg[frm] > 1:
            return False
        if not uf.union(frm, to):
            return False
    return True


def coeff_via_forests(model: CompartmentalModel, i: int, j: int
                      ) -> Tuple[Tuple[Polynomial, ...], Tuple[Polynomial, ...]]:
    """Coefficients of the input-output equation for output i, input j.

    Returns (lhs, rhs): lhs lists the n+1 y-side coefficients from y^(n)
    down to y (monic, lhs[0] = 1); rhs lists the n u-side coefficients from
    u^(n-1) down to u.  c_k sums label products over (n-k)-edge forests of
    the leak-extended graph; d_k over (n-k-1)-edge forests of the starred
    graph whose component joins j and i.
    """
    n = model.n
    g = LeakExtendedGraph.from_model(model)
    c = {k: Polynomial.zero() for k in range(n)}
    for m in range(1, n + 1):
        for forest in enumerate_incoming_forests(g, m):
            c[n - m] = c[n - m] + forest.label_product()
    lhs = [Polynomial.one()] + [c[k] for k in range(n - 1, -1, -1)]

    g_star = LeakExtendedGraph.from_model(model, star_output=i)
    d = {k: Polynomial.zero() for k in range(n)}
    for m in range(0, n):
        for forest in enumerate_incoming_forests(g_star, m, connectivity_pair=(j, i)):
            d[n - m - 1] = d[n - m - 1] + forest.label_product()
    rhs = [d[k] for k in range(n - 1, -1, -1)]
    return tuple(lhs), tuple(rhs)
