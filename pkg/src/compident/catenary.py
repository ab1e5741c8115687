"""Closed-form coefficient map for catenary (bidirected-path) models.

The y-side coefficient a_i is the i-th elementary symmetric polynomial of
the per-compartment outgoing sums, corrected by subtracting the non-forest
contributions: these are indexed by the nonempty no-consecutive subsets of
[n-1] (each index marks a bidirected pair i <-> i+1), weighted by the pair
products kappa_I.  The u-side coefficient a~_i carries the input-to-output
path product and the same corrected form restricted to compartments off the
path.

Two deliberate tightenings, both forced by exact agreement with the
determinant and forest routes:

  * Correction terms alternate in sign by pair count, kappa_I weighted by
    (-1)^(|I|+1).  The inner elementary symmetric polynomial happily picks
    up further bidirected pairs among the remaining compartments, so a
    subgraph with pair set S would otherwise be subtracted once per
    nonempty subset of S; inclusion-exclusion restores a net count of one.

  * Correction terms on the u side are restricted to pair sets whose vertex
    support I+ avoids the path entirely.  A pair touching a path vertex
    cannot occur in any spanning incoming subgraph containing the path (the
    path already spends that vertex's single outgoing edge), so such terms
    must not be subtracted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, List, Tuple

from .errors import NotCatenary, PreconditionViolated
from .ioeq import CoeffLabel, CoefficientMap
from .model import CompartmentalModel, ParameterId, Shape, make_model, shape_of
from .polynomial import Polynomial, elem_sym


def require_catenary(model: CompartmentalModel) -> None:
    if shape_of(model).shape is not Shape.CATENARY:
        raise NotCatenary(f"not a catenary model: {model}")


def reflect_model(model: CompartmentalModel) -> CompartmentalModel:
    """Mirror relabeling i -> n+1-i (catenary graphs are reflection symmetric)."""
    n = model.n
    rel = lambda q: n + 1 - q
    return make_model(
        n,
        [(rel(f), rel(t)) for f, t in model.edges],
        [rel(c) for c in model.inputs],
        [rel(c) for c in model.outputs],
        [rel(c) for c in model.leaks],
    )


@dataclass(frozen=True)
class GammaIndexSet:
    """A nonempty subset of pair indices with no two consecutive integers."""

    members: FrozenSet[int]

    def __post_init__(self):
        if not self.members:
            raise ValueError("index set must be nonempty")
        for i in self.members:
            if not isinstance(i, int) or i < 1:
                raise ValueError(f"bad pair index {i!r}")
            if i + 1 in self.members:
                raise ValueError(f"consecutive indices {i}, {i + 1}")

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)


def gamma_sets(n: int) -> Iterator[GammaIndexSet]:
    """All of Gamma_n: nonempty no-consecutive subsets of [n-1].

    Deterministic enumeration: by size, then lexicographically; the count is
    Fibonacci(n+1) - 1.
    """
    universe = list(range(1, n))

    def extend(prefix: List[int], start: int, size: int) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == size:
            yield tuple(prefix)
            return
        for idx in range(start, len(universe)):
            v = universe[idx]
            if prefix and v == prefix[-1] + 1:
                continue
            prefix.append(v)
            yield from extend(prefix, idx + 1, size)
            prefix.pop()

    max_size = (n + 1) // 2
    for size in range(1, max_size + 1):
        for combo in extend([], 0, size):
            yield GammaIndexSet(members=frozenset(combo))


def out_sum(model: CompartmentalModel, comp: int) -> Polynomial:
    """Sum of the parameters of all outgoing edges and leaks at a compartment."""
    require_catenary(model)
    if not (1 <= comp <= model.n):
        raise PreconditionViolated(f"compartment {comp} outside 1..{model.n}")
    total = Polynomial.zero()
    for frm, to in model.edges:
        if frm == comp:
            total = total + Polynomial.variable(ParameterId.edge(frm, to))
    if comp in model.leaks:
        total = total + Polynomial.variable(ParameterId.leak(comp))
    return total


def out_sum_set(model: CompartmentalModel, comps: Iterable[int]) -> List[Polynomial]:
    return [out_sum(model, c) for c in sorted(comps)]


def kappa_I(index_set: GammaIndexSet) -> Polynomial:
    """Product of both edge labels of each bidirected pair i <-> i+1 in the set."""
    result = Polynomial.one()
    for i in index_set:
        result = result * Polynomial.variable(ParameterId.edge(i, i + 1))
        result = result * Polynomial.variable(ParameterId.edge(i + 1, i))
    return result


def i_plus(index_set: GammaIndexSet) -> FrozenSet[int]:
    """Vertex support of the pair set: I together with every i+1."""
    return frozenset(index_set.members | {i + 1 for i in index_set.members})


def path_product(model: CompartmentalModel, start: int, end: int) -> Polynomial:
    """kappa(start, end): product of forward edge parameters along the path."""
    result = Polynomial.one()
    for q in range(start, end):
        result = result * Polynomial.variable(ParameterId.edge(q, q + 1))
    return result


def catenary_coefficient_map(model: CompartmentalModel) -> CoefficientMap:
    """Closed-form coefficient map for one input at or before one output.

    Emits the full formal tuple a_1 .. a_n then a~_d .. a~_n (arity 2n-d+1,
    d the input-to-output distance).  Labels carry the derivative order the
    coefficient multiplies: a_i sits at y-order n-i and a~_i at u-order
    n-i-1, so the trailing a~_n (always the zero polynomial) is the formal
    order -1 slot.  Callers comparing routes drop constant entries first.
    """
    require_catenary(model)
    if len(model.inputs) != 1 or len(model.outputs) != 1:
        raise PreconditionViolated("closed form requires one input and one output")
    (inp,) = model.inputs
    (out,) = model.outputs
    if inp > out:
        raise PreconditionViolated(
            "closed form requires input at or before output; reflect the model first")
    n = model.n
    d = out - inp
    path = set(range(inp, out + 1))
    gammas = list(gamma_sets(n))
    all_comps = set(range(1, n + 1))

    entries: List[Tuple[CoeffLabel, Polynomial]] = []
    for i in range(1, n + 1):
        total = elem_sym(i, out_sum_set(model, all_comps))
        for gset in gammas:
            if 2 * len(gset) > i:
                continue
            rest = all_comps - i_plus(gset)
            term = kappa_I(gset) * elem_sym(i - 2 * len(gset), out_sum_set(model, rest))
            total = total - term if len(gset) % 2 else total + term
        entries.append((CoeffLabel(out, "lhs", None, n - i), total))

    kappa = path_product(model, inp, out)
    off_path = all_comps - path
    for i in range(d, n + 1):
        inner = elem_sym(i - d, out_sum_set(model, off_path))
        for gset in gammas:
            if 2 * len(gset) > i or i - d - 2 * len(gset) < 0:
                continue
            if i_plus(gset) & path:
                continue
            rest = all_comps - i_plus(gset) - path
            term = kappa_I(gset) * elem_sym(i - d - 2 * len(gset),
                                            out_sum_set(model, rest))
            inner = inner - term if len(gset) % 2 else inner + term
        entries.append((CoeffLabel(out, "rhs", inp, n - i - 1), kappa * inner))

    return CoefficientMap(entries=tuple(entries))
