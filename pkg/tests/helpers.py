"""Shared model builders and independent oracles for the test suite.

Oracles here deliberately avoid the library's fast paths: brute-force
subset filters for forests, nested-loop term expansion for products, and a
fraction-based Gaussian elimination for ranks, so route agreement means
something.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from compident.model import CompartmentalModel, make_model, parameter_from_name
from compident.polynomial import Polynomial, parse_poly


def kv(text: str) -> Polynomial:
    """Parse "k21^2*k32 + ..." with the package's parameter naming."""
    return parse_poly(text, parameter_from_name)


def cycle_model(n, ins, outs, leaks=()) -> CompartmentalModel:
    return make_model(n, [(i, i % n + 1) for i in range(1, n + 1)], ins, outs, leaks)


def catenary_model(n, ins, outs, leaks=()) -> CompartmentalModel:
    edges = []
    for i in range(1, n):
        edges.append((i, i + 1))
        edges.append((i + 1, i))
    return make_model(n, edges, ins, outs, leaks)


def fig2_model() -> CompartmentalModel:
    """3-cycle, In={1}, Out={2}, Leak={1,3}."""
    return cycle_model(3, [1], [2], [1, 3])


def fig4_model() -> CompartmentalModel:
    """4-cycle, In={1}, Out={3}, Leak={1,2}: not leak-interlacing."""
    return cycle_model(4, [1], [3], [1, 2])


def fig5_model() -> CompartmentalModel:
    """4-compartment catenary, In={1}, Out={2}, Leak={2,4}."""
    return catenary_model(4, [1], [2], [2, 4])


def fig6_model() -> CompartmentalModel:
    """4-cycle, In={1}, Out={3}, Leak={1,3}: the singular-locus example."""
    return cycle_model(4, [1], [3], [1, 3])


# -- oracles -----------------------------------------------------------------


def mul_oracle(a: Polynomial, b: Polynomial):
    """Nested-loop expansion over term pairs; returns (expanded term count
    before merging, merged Polynomial)."""
    pairs = 0
    acc = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            pairs += 1
            merged = {}
            for v, e in list(m1) + list(m2):
                merged[v] = merged.get(v, 0) + e
            key = tuple(sorted(merged.items()))
            acc[key] = acc.get(key, 0) + c1 * c2
    return pairs, Polynomial.from_terms(acc)


def brute_force_forests(graph, m, pair=None):
    """All m-edge spanning incoming forests by filtering every edge subset."""
    found = []
    for subset in combinations(graph.edges, m):
        outdeg = {}
        ok = True
        for frm, _, _ in subset:
            outdeg[frm] = outdeg.get(frm, 0) + 1
            if outdeg[frm] > 1:
                ok = False
                break
        if not ok:
            continue
        parent = {v: v for v in range(graph.n + 1)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for frm, to, _ in subset:
            rf, rt = find(frm), find(to)
            if rf == rt:
                acyclic = False
                break
            parent[rf] = rt
        if not acyclic:
            continue
        if pair is not None and find(pair[0]) != find(pair[1]):
            continue
        found.append(frozenset(subset))
    return found


def fraction_rank(rows) -> int:
    """Exact Gaussian elimination over Q, independent of the GF(p) engine."""
    mat = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [v * inv for v in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


def modular_rank_oracle(J, params, points, prime) -> int:
    """Max rank over given points, with a plain row-reduction (no sharing)."""
    best = 0
    for point in points:
        rows = [[entry.eval_mod(point, prime) for entry in row] for row in J.rows]
        basis = []
        for row in rows:
            row = row[:]
            for pcol, prow in basis:
                f = row[pcol]
                if f:
                    row = [(a - f * b) % prime for a, b in zip(row, prow)]
            lead = next((c for c, v in enumerate(row) if v), None)
            if lead is not None:
                inv = pow(row[lead], prime - 2, prime)
                basis.append((lead, [(v * inv) % prime for v in row]))
        best = max(best, len(basis))
    return best


def random_points(variables, count, prime, seed):
    rng = random.Random(seed)
    return [{v: rng.randrange(1, prime) for v in variables} for _ in range(count)]
