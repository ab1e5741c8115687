"""Linear compartmental models: representation, parsing, validation.

A model is a directed graph on compartments 1..n together with input,
output, and leak compartment sets.  Every analysis in the package consumes
the immutable CompartmentalModel defined here.

Parameters are named after the flow they scale: the edge j -> i carries
k_{ij} (flow from j into i), and a leak at compartment l carries k_{0l}.
ParameterId gives these a stable total order (edges sorted by (from, to),
then leaks ascending) so Jacobian columns are reproducible.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, Mapping, NamedTuple, Tuple

from .errors import InvalidModel, MalformedSpec
from .polynomial import Polynomial

_EDGE_KIND = 0
_LEAK_KIND = 1


class ParameterId(NamedTuple):
    """A model parameter: either an edge rate k_{ij} or a leak rate k_{0l}.

    The tuple layout (kind, a, b) makes the built-in tuple order the
    canonical parameter order: edges by (from, to) lexicographically,
    then leaks by compartment.
    """

    kind: int
    a: int
    b: int

    @classmethod
    def edge(cls, frm: int, to: int) -> "ParameterId":
        return cls(_EDGE_KIND, frm, to)

    @classmethod
    def leak(cls, comp: int) -> "ParameterId":
        return cls(_LEAK_KIND, comp, 0)

    @property
    def is_edge(self) -> bool:
        return self.kind == _EDGE_KIND

    @property
    def is_leak(self) -> bool:
        return self.kind == _LEAK_KIND

    @property
    def name(self) -> str:
        if self.kind == _EDGE_KIND:
            frm, to = self.a, self.b
            if frm <= 9 and to <= 9:
                return f"k{to}{frm}"
            return f"k{to}_{frm}"
        comp = self.a
        return f"k0{comp}" if comp <= 9 else f"k0_{comp}"

    def __repr__(self) -> str:
        return self.name


_NAME_RE = re.compile(r"^k(?:(\d)(\d)|(\d+)_(\d+))$")


def parameter_from_name(name: str) -> ParameterId:
    """Inverse of ParameterId.name ("k21" -> edge 1->2, "k01" -> leak at 1)."""
    m = _NAME_RE.match(name)
    if not m:
        raise ValueError(f"not a parameter name: {name!r}")
    if m.group(1) is not None:
        to, frm = int(m.group(1)), int(m.group(2))
    else:
        to, frm = int(m.group(3)), int(m.group(4))
    if to == 0:
        return ParameterId.leak(frm)
    return ParameterId.edge(frm, to)


class Shape(str, Enum):
    DIRECTED_CYCLE = "DirectedCycle"
    CATENARY = "Catenary"
    BIDIRECTED_TREE = "BidirectedTree"
    OTHER = "Other"


class ShapeInfo(NamedTuple):
    shape: Shape
    strongly_connected: bool


@dataclass(frozen=True)
class SymbolicMatrix:
    """A grid of Polynomial entries (rows x cols)."""

    rows: Tuple[Tuple[Polynomial, ...], ...]

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    @classmethod
    def from_lists(cls, rows: Iterable[Iterable[Polynomial]]) -> "SymbolicMatrix":
        return cls(tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class CompartmentalModel:
    """A linear compartmental model (graph, inputs, outputs, leaks).

    Compartments are 1-indexed.  Immutable and hashable; safe to share
    between concurrent tasks.
    """

    n: int
    edges: Tuple[Tuple[int, int], ...]  # (from, to), sorted
    inputs: FrozenSet[int]
    outputs: FrozenSet[int]
    leaks: FrozenSet[int]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidModel(f"compartment count must be a positive integer, got {self.n!r}")
        seen = set()
        for frm, to in self.edges:
            if not (1 <= frm <= self.n and 1 <= to <= self.n):
                raise InvalidModel(f"edge ({frm},{to}) has an endpoint outside 1..{self.n}")
            if frm == to:
                raise InvalidModel(f"self-loop at compartment {frm}")
            if (frm, to) in seen:
                raise InvalidModel(f"duplicate edge ({frm},{to})")
            seen.add((frm, to))
        for label, comps in (("in", self.inputs), ("out", self.outputs), ("leak", self.leaks)):
            for c in comps:
                if not (1 <= c <= self.n):
                    raise InvalidModel(f"{label} compartment {c} outside 1..{self.n}")
        if not self.inputs:
            raise InvalidModel("model must have at least one input")
        if not self.outputs:
            raise InvalidModel("model must have at least one output")

    # -- derived views -------------------------------------------------------

    def params(self) -> Tuple[ParameterId, ...]:
        """All parameters in the canonical column order."""
        out = [ParameterId.edge(frm, to) for frm, to in self.edges]
        out.extend(ParameterId.leak(l) for l in sorted(self.leaks))
        return tuple(out)

    def graph_signature(self) -> tuple:
        """Key identifying (graph, leaks); inputs/outputs do not affect A."""
        return (self.n, self.edges, tuple(sorted(self.leaks)))

    def out_neighbors(self, v: int) -> list:
        return [to for frm, to in self.edges if frm == v]

    def __str__(self) -> str:
        return (
            f"n={self.n} edges={list(self.edges)} in={sorted(self.inputs)} "
            f"out={sorted(self.outputs)} leak={sorted(self.leaks)}"
        )


def make_model(n: int, edges: Iterable[Tuple[int, int]], inputs: Iterable[int],
               outputs: Iterable[int], leaks: Iterable[int] = ()) -> CompartmentalModel:
    """Validated construction with normalization of the edge order."""
    return CompartmentalModel(
        n=n,
        edges=tuple(sorted((int(f), int(t)) for f, t in edges)),
        inputs=frozenset(int(c) for c in inputs),
        outputs=frozenset(int(c) for c in outputs),
        leaks=frozenset(int(c) for c in leaks),
    )


_SCHEMA_KEYS = {"n", "edges", "in", "out", "leak"}


def parse_model(doc) -> CompartmentalModel:
    """Parse a model spec document (JSON text or an already-decoded mapping).

    Schema: {"n": int, "edges": [[from, to], ...], "in": [int], "out": [int],
    "leak": [int]}.  Unknown keys are rejected.
    """
    if isinstance(doc, (str, bytes)):
        try:
            data = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise MalformedSpec(f"invalid JSON: {exc}") from None
    else:
        data = doc
    if not isinstance(data, dict):
        raise MalformedSpec("model spec must be a JSON object")
    unknown = set(data) - _SCHEMA_KEYS
    if unknown:
        raise MalformedSpec(f"unknown keys: {sorted(unknown)}")
    missing = _SCHEMA_KEYS - set(data)
    if missing:
        raise MalformedSpec(f"missing keys: {sorted(missing)}")
    if not isinstance(data["n"], int) or isinstance(data["n"], bool):
        raise MalformedSpec("'n' must be an integer")
    edges = data["edges"]
    if not isinstance(edges, list):
        raise MalformedSpec("'edges' must be a list of [from, to] pairs")
    pairs = []
    for e in edges:
        if (not isinstance(e, (list, tuple)) or len(e) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in e)):
            raise MalformedSpec(f"bad edge entry: {e!r}")
        pairs.append((e[0], e[1]))
    comps = {}
    for key in ("in", "out", "leak"):
        val = data[key]
        if (not isinstance(val, list)
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in val)):
            raise MalformedSpec(f"'{key}' must be a list of integers")
        comps[key] = val
    return make_model(data["n"], pairs, comps["in"], comps["out"], comps["leak"])


def serialize_model(model: CompartmentalModel) -> dict:
    """Canonical document form: edges lexicographic, sets ascending."""
    return {
        "n": model.n,
        "edges": [list(e) for e in sorted(model.edges)],
        "in": sorted(model.inputs),
        "out": sorted(model.outputs),
        "leak": sorted(model.leaks),
    }


def model_to_json(model: CompartmentalModel) -> str:
    return json.dumps(serialize_model(model), separators=(",", ":"))


# -- shape detection ----------------------------------------------------------


def is_strongly_connected(model: CompartmentalModel) -> bool:
    """Directed reachability from vertex 1 in both edge directions."""
    if model.n == 1:
        return True
    fwd: dict = {v: [] for v in range(1, model.n + 1)}
    rev: dict = {v: [] for v in range(1, model.n + 1)}
    for frm, to in model.edges:
        fwd[frm].append(to)
        rev[to].append(frm)

    def covers(adj) -> bool:
        seen = {1}
        stack = [1]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == model.n

    return covers(fwd) and covers(rev)


def shape_of(model: CompartmentalModel) -> ShapeInfo:
    """Classify the graph shape, taking vertex labels literally.

    No relabeling search is performed; callers that want the normalized
    orientations use the explicit relabel helpers in the cycle and catenary
    modules.
    """
    n = model.n
    edge_set = set(model.edges)
    strong = is_strongly_connected(model)

    if n >= 3:
        cycle_edges = {(i, i % n + 1) for i in range(1, n + 1)}
        if edge_set == cycle_edges:
            return ShapeInfo(Shape.DIRECTED_CYCLE, strong)

    path_edges = set()
    for i in range(1, n):
        path_edges.add((i, i + 1))
        path_edges.add((i + 1, i))
    if edge_set == path_edges:
        return ShapeInfo(Shape.CATENARY, strong)

    if edge_set and all((to, frm) in edge_set for frm, to in edge_set):
        undirected = {frozenset(e) for e in edge_set}
        if len(undirected) == n - 1 and strong:
            # n-1 bidirected edges on a connected graph: a bidirected tree
            return ShapeInfo(Shape.BIDIRECTED_TREE, strong)

    return ShapeInfo(Shape.OTHER, strong)


# -- compartmental matrix ------------------------------------------------------


def compartmental_matrix(model: CompartmentalModel) -> SymbolicMatrix:
    """The n x n matrix A with a_ij = k_ij for edges j -> i and diagonal
    entries equal to minus the total outflow (edges plus leak) of i."""
    n = model.n
    grid = [[Polynomial.zero() for _ in range(n)] for _ in range(n)]
    for frm, to in model.edges:
        # edge frm -> to contributes k_{to,frm} at row `to`, column `frm`
        grid[to - 1][frm - 1] = grid[to - 1][frm - 1] + Polynomial.variable(
            ParameterId.edge(frm, to))
        grid[frm - 1][frm - 1] = grid[frm - 1][frm - 1] - Polynomial.variable(
            ParameterId.edge(frm, to))
    for l in model.leaks:
        grid[l - 1][l - 1] = grid[l - 1][l - 1] - Polynomial.variable(ParameterId.leak(l))
    return SymbolicMatrix.from_lists(grid)
