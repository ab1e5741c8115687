"""Directed-cycle specializations: combinatorial identifiability classifiers
and the closed-form coefficient map.

The classifiers never touch the rank engine; the whole point of keeping the
two routes separate is that agreement between them is a meaningful runtime
cross-check (the acceptance sweep enforces it on every configuration).

Index convention: compartments live in [1, n] and all mod-n arithmetic maps
residue 0 to n, matching the cycle's wrap-around edge k_{1n} = k_{n+1,n}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

from .errors import (
    NotACycle,
    NotApplicable,
    PreconditionViolated,
    UndefinedForAdjacentPair,
)
from .ioeq import CoefficientMap
from .model import CompartmentalModel, ParameterId, Shape, make_model, shape_of
from .polynomial import Polynomial, elem_sym


def mod_n(x: int, n: int) -> int:
    """Residue of x in [1, n] (0 maps to n)."""
    r = x % n
    return r if r else n


def require_cycle(model: CompartmentalModel) -> None:
    if shape_of(model).shape is not Shape.DIRECTED_CYCLE:
        raise NotACycle(f"not a directed-cycle model: {model}")


def rotate_model(model: CompartmentalModel, shift: int) -> CompartmentalModel:
    """Cyclic relabeling q -> q + shift (mod n, into [1, n])."""
    n = model.n
    rel = lambda q: mod_n(q + shift, n)
    return make_model(
        n,
        [(rel(f), rel(t)) for f, t in model.edges],
        [rel(c) for c in model.inputs],
        [rel(c) for c in model.outputs],
        [rel(c) for c in model.leaks],
    )


def cycle_edge_param(model: CompartmentalModel, i: int) -> ParameterId:
    """The edge parameter k_{i+1,i}, with k_{n+1,n} = k_{1n}."""
    return ParameterId.edge(i, mod_n(i + 1, model.n))


def cycle_edge_term(model: CompartmentalModel, i: int) -> Polynomial:
    """k_{i+1,i}, plus k_{0i} when compartment i leaks."""
    term = Polynomial.variable(cycle_edge_param(model, i))
    if i in model.leaks:
        term = term + Polynomial.variable(ParameterId.leak(i))
    return term


def cycle_e_set(model: CompartmentalModel) -> List[Polynomial]:
    """The set E of outgoing sums, one per compartment."""
    return [cycle_edge_term(model, i) for i in range(1, model.n + 1)]


def cycle_e_star_set(model: CompartmentalModel, p: int) -> List[Polynomial]:
    """The post-output set E*: outgoing sums of compartments p+1 .. n."""
    return [cycle_edge_term(model, i) for i in range(p + 1, model.n + 1)]


# -- classifiers ------------------------------------------------------------------


def is_exceptional(model: CompartmentalModel) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Exceptional: In = {i}, Out = {i-1 mod n}, exactly two leaks, one at i-1."""
    require_cycle(model)
    n = model.n
    if len(model.inputs) == 1 and len(model.outputs) == 1 and len(model.leaks) == 2:
        (i,) = model.inputs
        prev = mod_n(i - 1, n)
        if model.outputs == {prev} and prev in model.leaks:
            return True, (i, prev)
    return False, None


def _arcs(n: int, leaks: List[int]) -> List[Tuple[int, int, frozenset]]:
    """Cyclic inter-leak arcs: (l_a, l_{a+1}, {l_a+1, ..., l_{a+1}})."""
    z = len(leaks)
    out = []
    for a in range(z):
        start, end = leaks[a], leaks[(a + 1) % z]
        members = set()
        q = mod_n(start + 1, n)
        while True:
            members.add(q)
            if q == end:
                break
            q = mod_n(q + 1, n)
        out.append((start, end, frozenset(members)))
    return out


def is_leak_interlacing(model: CompartmentalModel
                        ) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Leak-interlacing test with the first failing arc as witness.

    Exceptional models are excluded by definition; with at most one leak the
    condition holds vacuously.  Otherwise every cyclic arc from one leak to
    the next (including the wrap arc, and length-0 arcs when leaks sit in
    consecutive compartments) must meet In union Out.
    """
    require_cycle(model)
    exceptional, _ = is_exceptional(model)
    if exceptional:
        return False, None
    if len(model.leaks) <= 1:
        return True, None
    markers = model.inputs | model.outputs
    for start, end, members in _arcs(model.n, sorted(model.leaks)):
        if not (members & markers):
            return False, (start, end)
    return True, None


@dataclass(frozen=True)
class CycleClassification:
    """Combinatorial verdict for a directed-cycle model."""

    is_exceptional: bool
    is_leak_interlacing: bool
    verdict: str                         # "Identifiable" | "Unidentifiable"
    witness: Optional[Tuple[int, int]]   # failing arc, or the (i, i-1) pair

    def to_json_dict(self) -> dict:
        return {
            "exceptional": self.is_exceptional,
            "leak_interlacing": self.is_leak_interlacing,
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness else None,
        }


def classify_cycle(model: CompartmentalModel) -> CycleClassification:
    """Purely combinatorial classification (no rank computation involved)."""
    exceptional, exc_witness = is_exceptional(model)
    interlacing, arc_witness = is_leak_interlacing(model)
    if interlacing:
        return CycleClassification(exceptional, True, "Identifiable", None)
    witness = exc_witness if exceptional else arc_witness
    return CycleClassification(exceptional, False, "Unidentifiable", witness)


# -- closed-form coefficient map ----------------------------------------------------


class CycleCoeffLabel(NamedTuple):
    """Label of a closed-form cycle coefficient (paper types I..IV)."""

    coeff_type: str
    index: int


def kappa_path(model: CompartmentalModel, i: int, j: int) -> Polynomial:
    """Product of edge parameters along the cycle path from i to j; 1 if i = j."""
    require_cycle(model)
    if mod_n(i, model.n) == mod_n(j, model.n):
        return Polynomial.one()
    result = Polynomial.one()
    q = mod_n(i, model.n)
    target = mod_n(j, model.n)
    while q != target:
        result = result * Polynomial.variable(cycle_edge_param(model, q))
        q = mod_n(q + 1, model.n)
    return result


def e_star_one(model: CompartmentalModel, i: int, j: int) -> Polynomial:
    """e1*(i, j): sum of outgoing sums over the arc after output j, before input i."""
    require_cycle(model)
    n = model.n
    i, j = mod_n(i, n), mod_n(j, n)
    if j == mod_n(i - 1, n):
        raise UndefinedForAdjacentPair(f"e1*({i},{j}) undefined: output = input - 1")
    total = Polynomial.zero()
    q = mod_n(j + 1, n)
    end = mod_n(i - 1, n)
    while True:
        total = total + cycle_edge_term(model, q)
        if q == end:
            break
        q = mod_n(q + 1, n)
    return total


def cycle_coefficient_map(model: CompartmentalModel) -> CoefficientMap:
    """Closed-form coefficient map for In = {1}, Out = {p}, at least one leak.

    Emits, in order: Type I coefficients e_1 .. e_{n-1} on the outgoing-sum
    set E; the Type II coefficient e_n minus the all-edges product; the
    Type III path product kappa (omitted when p = 1: it degenerates to the
    constant 1); and the Type IV coefficients e_j* kappa for j = 1 .. n-p.
    """
    require_cycle(model)
    if model.inputs != {1} or len(model.outputs) != 1 or not model.leaks:
        raise PreconditionViolated(
            "closed form requires In={1}, a single output, and at least one leak")
    n = model.n
    (p,) = model.outputs
    e_set = cycle_e_set(model)
    entries: List[Tuple[CycleCoeffLabel, Polynomial]] = []
    for i in range(1, n):
        entries.append((CycleCoeffLabel("I", i), elem_sym(i, e_set)))
    cycle_product = Polynomial.one()
    for i in range(1, n + 1):
        cycle_product = cycle_product * Polynomial.variable(cycle_edge_param(model, i))
    entries.append((CycleCoeffLabel("II", n), elem_sym(n, e_set) - cycle_product))
    kappa = kappa_path(model, 1, p)
    if p != 1:
        entries.append((CycleCoeffLabel("III", 0), kappa))
    star = cycle_e_star_set(model, p)
    for j in range(1, n - p + 1):
        entries.append((CycleCoeffLabel("IV", j), elem_sym(j, star) * kappa))
    return CoefficientMap(entries=tuple(entries))


# -- minimally leak-interlacing submodels ---------------------------------------------


def in_exceptional_family(model: CompartmentalModel) -> bool:
    """True when the model extends an exceptional model by added inputs/outputs."""
    require_cycle(model)
    if len(model.leaks) != 2:
        return False
    if len(model.inputs) + len(model.outputs) <= 2:
        return False
    n = model.n
    for i in model.inputs:
        prev = mod_n(i - 1, n)
        if prev in model.outputs and prev in model.leaks:
            return True
    return False


def is_minimally_leak_interlacing(model: CompartmentalModel) -> bool:
    """Each inter-leak arc contains exactly one marker, an input xor an output."""
    require_cycle(model)
    if len(model.leaks) < 2:
        return False
    ok, _ = is_leak_interlacing(model)
    if not ok:
        return False
    for _, _, members in _arcs(model.n, sorted(model.leaks)):
        n_in = len(members & model.inputs)
        n_out = len(members & model.outputs)
        if not ((n_in == 1 and n_out == 0) or (n_in == 0 and n_out == 1)):
            return False
    return True


def find_minimal_interlacing_submodel(model: CompartmentalModel) -> CompartmentalModel:
    """Shrink In/Out to a minimally leak-interlacing submodel.

    Follows the two-case construction deterministically (lowest-index
    choices): if every inter-leak arc contains an input, one arc donates an
    output and the rest donate inputs; otherwise an input-free arc donates
    an output, some arc donates an input, and remaining arcs prefer inputs.
    """
    require_cycle(model)
    ok, _ = is_leak_interlacing(model)
    if not ok or len(model.leaks) < 2:
        raise NotApplicable("model must be leak-interlacing with at least two leaks")
    if in_exceptional_family(model):
        raise NotApplicable("construction is undefined on the exceptional family")

    arcs = _arcs(model.n, sorted(model.leaks))
    arc_inputs = [sorted(members & model.inputs) for _, _, members in arcs]
    arc_outputs = [sorted(members & model.outputs) for _, _, members in arcs]

    new_in: set = set()
    new_out: set = set()
    if all(arc_inputs):
        # Case 1: every arc has an input; the first output-bearing arc donates it
        donor = next(a for a in range(len(arcs)) if arc_outputs[a])
        new_out.add(arc_outputs[donor][0])
        for a in range(len(arcs)):
            if a != donor:
                new_in.add(arc_inputs[a][0])
    else:
        # Case 2: some arc has no input (so it has an output)
        donor = next(a for a in range(len(arcs)) if not arc_inputs[a])
        new_out.add(arc_outputs[donor][0])
        input_donor = next(a for a in range(len(arcs)) if arc_inputs[a])
        new_in.add(arc_inputs[input_donor][0])
        for a in range(len(arcs)):
            if a in (donor, input_donor):
                continue
            if arc_inputs[a]:
                new_in.add(arc_inputs[a][0])
            else:
                new_out.add(arc_outputs[a][0])

    result = make_model(model.n, model.edges, new_in, new_out, model.leaks)
    assert is_minimally_leak_interlacing(result)
    return result
