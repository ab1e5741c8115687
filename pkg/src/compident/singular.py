"""Singular loci of identifiable models: locus polynomials, hyperplane
membership, and the closed Vandermonde formula for In = Out = {1} cycles.

The singular locus is the parameter set where the coefficient-map Jacobian
drops below full rank.  For square Jacobians the locus polynomial is the
symbolic determinant; otherwise it is the gcd of all maximal minors
(the codimension-one part of the determinantal locus).  Minors are expanded
with our fraction-free determinant; the multivariate gcd itself is
delegated to sympy's polynomial gcd over ZZ, which is mature and exact.

Hyperplane membership is decided by on-hyperplane sampling: one variable is
solved for modulo p, the rest drawn uniformly, and the Jacobian rank is
evaluated at each sample.  A single full-rank sample refutes containment
definitively; all-deficient samples are probabilistic evidence and the
sample count is reported alongside.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from .cycle import classify_cycle, cycle_edge_param, mod_n, require_cycle
from .errors import (
    NotIdentifiable,
    PreconditionViolated,
    TooLarge,
    UnsolvableConstraint,
)
from .ident import (
    DEFAULT_PRIME,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EchelonBasis,
    evaluate_matrix,
    is_identifiable,
    jacobian,
    rank_mod,
)
from .ioeq import coefficient_map, det_polynomial_matrix
from .model import CompartmentalModel, ParameterId, SymbolicMatrix, parameter_from_name
from .polynomial import Polynomial, normalize_sign, primitive_part

_MAX_PARAMS_SQUARE = 12
_MAX_PARAMS_GCD = 10


@dataclass(frozen=True)
class Hyperplane:
    """The locus {h = 0} of a polynomial of total degree exactly one."""

    h: Polynomial

    def __post_init__(self):
        if self.h.total_degree() != 1:
            raise ValueError(f"not a degree-1 polynomial: {self.h}")

    def __str__(self) -> str:
        return f"{{{self.h} = 0}}"


# -- sympy bridge (gcd only) --------------------------------------------------


def _gcd_pair(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact multivariate gcd over Z, via sympy."""
    gens_params = sorted(set(a.variables()) | set(b.variables()))
    if not gens_params:
        import math
        return Polynomial.constant(math.gcd(a.constant_value(), b.constant_value()))
    syms = [sympy.Symbol(p.name) for p in gens_params]
    index = {p: i for i, p in enumerate(gens_params)}

    def to_sympy(poly: Polynomial):
        rep = {}
        for mono, coeff in poly.terms.items():
            exps = [0] * len(syms)
            for v, e in mono:
                exps[index[v]] = e
            rep[tuple(exps)] = coeff
        return sympy.Poly.from_dict(rep, *syms, domain="ZZ")

    g = to_sympy(a).gcd(to_sympy(b))
    out: Dict[tuple, int] = {}
    for exps, coeff in g.terms():
        mono = tuple((gens_params[i], e) for i, e in enumerate(exps) if e)
        out[mono] = int(coeff)
    return Polynomial.from_terms(out)


def _minor_det(rows: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Memoized Laplace expansion over column subsets.

    The choose-a-column walk shares subproducts across the many overlapping
    row subsets visited by the minor sweep; for those inputs it beats the
    fraction-free scheme (no exact divisions on swollen intermediates).
    """
    t = len(rows)
    if t == 0:
        return Polynomial.one()
    states: Dict[int, Polynomial] = {0: Polynomial.one()}
    for r in range(t):
        row = rows[r]
        new: Dict[int, Polynomial] = {}
        for mask, val in states.items():
            below = 0
            for c in range(t):
                bit = 1 << c
                if mask & bit:
                    below += 1
                    continue
                entry = row[c]
                if entry.is_zero():
                    continue
                term = val * entry
                if (r - below) % 2:
                    term = -term
                key = mask | bit
                acc = new.get(key)
                new[key] = term if acc is None else acc + term
        states = new
        if not states:
            return Polynomial.zero()
    return states.get((1 << t) - 1, Polynomial.zero())


def _gcd_of_minors(J: SymbolicMatrix, size: int) -> Polynomial:
    """Primitive gcd of all size x size minors of J (divisibility short-cuts
    the pairwise gcds once the running gcd already divides a minor)."""
    from .polynomial import divides

    running: Optional[Polynomial] = None
    for rows in combinations(range(J.nrows), size):
        minor = _minor_det([J.rows[r] for r in rows])
        if minor.is_zero():
            continue
        minor = primitive_part(minor)
        if running is None:
            running = minor
        elif not divides(running, minor):
            running = primitive_part(_gcd_pair(running, minor))
            if running.is_constant():
                return Polynomial.one()
    if running is None:
        raise NotIdentifiable("all maximal minors vanish identically")
    return running


# -- locus polynomial -----------------------------------------------------------


def singular_locus_polynomial(model: CompartmentalModel,
                              trials: int = DEFAULT_TRIALS,
                              field_prime: int = DEFAULT_PRIME,
                              seed: int = DEFAULT_SEED) -> Polynomial:
    """Defining polynomial of the singular locus, content- and sign-normalized
    (graded-lex leading coefficient positive).

    Square Jacobians yield their symbolic determinant; otherwise the gcd of
    all maximal minors is returned (best-effort: the paper only treats the
    square case explicitly).
    """
    analysis = is_identifiable(model, trials=trials, field_prime=field_prime, seed=seed)
    if not analysis.identifiable:
        raise NotIdentifiable("singular locus undefined: model is unidentifiable")
    params = model.params()
    if len(params) > _MAX_PARAMS_SQUARE:
        raise TooLarge(f"{len(params)} parameters exceeds the symbolic guard")
    cm = coefficient_map(model)
    J = jacobian(cm, params)
    t = len(params)
    if J.nrows == t:
        poly = det_polynomial_matrix(J)
    else:
        if t > _MAX_PARAMS_GCD:
            raise TooLarge(f"{t} parameters exceeds the minor-gcd guard")
        poly = _gcd_of_minors(J, t)
    return normalize_sign(primitive_part(poly))


# -- on-hyperplane sampling -------------------------------------------------------


@dataclass(frozen=True)
class HyperplaneCheck:
    """Outcome of on-hyperplane rank sampling.

    `contained` False is definitive (a full-rank point inside the hyperplane
    was found); True means every sample was rank-deficient, probabilistic
    evidence quantified by `samples`.
    """

    contained: bool
    samples: int
    full_rank_sample: Optional[int] = None


def _solve_on_hyperplane(h: Polynomial, variables, rng: random.Random,
                         prime: int) -> Dict:
    """Random point of {h = 0} over GF(p): solve the first solvable variable."""
    coeffs: List[Tuple[ParameterId, int]] = []
    const = 0
    for mono, c in h.terms.items():
        if mono == ():
            const = c
        else:
            coeffs.append((mono[0][0], c))
    pivot = None
    for v, c in coeffs:
        if c % prime:
            pivot = (v, c)
            break
    if pivot is None:
        raise UnsolvableConstraint(f"no solvable variable in {h}")
    point = {v: rng.randrange(1, prime) for v in variables}
    acc = const % prime
    for v, c in coeffs:
        if v is not pivot[0]:
            acc = (acc + c * point[v]) % prime
    inv = pow(pivot[1] % prime, prime - 2, prime)
    point[pivot[0]] = (-acc * inv) % prime
    return point


def contains_hyperplane(model: CompartmentalModel, h: Hyperplane, samples: int = 50,
                        field_prime: int = DEFAULT_PRIME,
                        seed: int = DEFAULT_SEED) -> HyperplaneCheck:
    """Monte Carlo test of whether {h = 0} lies inside the singular locus."""
    analysis = is_identifiable(model, field_prime=field_prime, seed=seed)
    if not analysis.identifiable:
        raise NotIdentifiable("hyperplane test undefined: model is unidentifiable")
    params = model.params()
    cm = coefficient_map(model)
    J = jacobian(cm, params)
    target = len(params)
    rng = random.Random(seed)
    for k in range(samples):
        point = _solve_on_hyperplane(h.h, params, rng, field_prime)
        rank = rank_mod(evaluate_matrix(J, point, field_prime), field_prime)
        if rank == target:
            return HyperplaneCheck(contained=False, samples=k + 1, full_rank_sample=k)
    return HyperplaneCheck(contained=True, samples=samples)


# -- hyperplane predictions (cycle theorems) ----------------------------------------


def _edge_var(model: CompartmentalModel, i: int) -> Polynomial:
    return Polynomial.variable(cycle_edge_param(model, i))


def _leak_var(comp: int) -> Polynomial:
    return Polynomial.variable(ParameterId.leak(comp))


def predicted_hyperplanes(model: CompartmentalModel) -> List[Tuple[str, Hyperplane]]:
    """Hyperplanes the singular-locus theorems guarantee, tagged (1)/(2)/(3).

    Requires an identifiable cycle model with the input in compartment 1.
    Part (1) fires when some leak sits outside compartment 1; part (2) when
    the last leak is at or after every output; part (3) for a single output
    p with leaks exactly {q, p}, q < p <= n-1.
    """
    require_cycle(model)
    if model.inputs != {1}:
        raise PreconditionViolated("hyperplane theorems assume In = {1}")
    if classify_cycle(model).verdict != "Identifiable":
        raise PreconditionViolated("hyperplane theorems assume an identifiable model")
    n = model.n
    out: List[Tuple[str, Hyperplane]] = []
    if model.leaks - {1}:
        out.append(("1", Hyperplane(_edge_var(model, 1))))
    if model.leaks:
        lz = max(model.leaks)
        if all(lz >= p for p in model.outputs):
            for a in range(1, n + 1):
                if a != lz:
                    out.append(("2", Hyperplane(_edge_var(model, a))))
    if len(model.outputs) == 1 and len(model.leaks) == 2:
        (p,) = model.outputs
        q = min(model.leaks)
        if model.leaks == {q, p} and 1 <= q < p <= n - 1:
            h = (_leak_var(q) + _edge_var(model, q)) - (_leak_var(p) + _edge_var(model, p))
            out.append(("3", Hyperplane(h)))
    return out


def vandermonde_locus(n: int, leak: int) -> Polynomial:
    """Closed form of the singular-locus polynomial for In = Out = {1},
    Leak = {leak}: the product of the off-leak edge parameters times the
    Vandermonde determinant of the shifted edge sums."""
    if n < 3:
        raise PreconditionViolated("cycle models require n >= 3")
    if not (1 <= leak <= n):
        raise PreconditionViolated(f"leak position {leak} outside 1..{n}")

    def edge_param(i: int) -> ParameterId:
        return ParameterId.edge(i, mod_n(i + 1, n))

    def k_tilde(i: int) -> Polynomial:
        term = Polynomial.variable(edge_param(i))
        if i == leak:
            term = term + _leak_var(leak)
        return term

    result = Polynomial.one()
    for i in range(1, n + 1):
        if i != leak:
            result = result * Polynomial.variable(edge_param(i))
    for i in range(2, n + 1):
        for j in range(i + 1, n + 1):
            result = result * (k_tilde(i) - k_tilde(j))
    return result


# -- conjecture exploration ----------------------------------------------------------


@dataclass(frozen=True)
class ConjectureRow:
    a: int
    leak: int
    hyperplane: Hyperplane
    check: HyperplaneCheck


@dataclass(frozen=True)
class ConjectureReport:
    """Evidence table only: containment is never asserted as an invariant."""

    model: CompartmentalModel
    rows: Tuple[ConjectureRow, ...]

    def supported(self) -> bool:
        return all(r.check.contained for r in self.rows)


def explore_conjecture(model: CompartmentalModel, samples: int = 50,
                       field_prime: int = DEFAULT_PRIME,
                       seed: int = DEFAULT_SEED) -> ConjectureReport:
    """Sample the conjectured hyperplanes {k_{l+1,l} + k_{0l} = k_{a+1,a}}.

    Candidates: a at or before the output and not a leak, l a leak at or
    before the output.  (Taking a up to p itself, rather than p-1, is what
    makes the running 3-cycle example a non-vacuous instance.)
    """
    require_cycle(model)
    if model.inputs != {1} or len(model.outputs) != 1:
        raise PreconditionViolated("conjecture exploration assumes In={1}, Out={p}")
    if classify_cycle(model).verdict != "Identifiable":
        raise PreconditionViolated("conjecture concerns identifiable models")
    (p,) = model.outputs
    rows = []
    for a in range(1, p + 1):
        if a in model.leaks:
            continue
        for l in sorted(model.leaks):
            if l > p:
                continue
            h = Hyperplane((_leak_var(l) + _edge_var(model, l)) - _edge_var(model, a))
            check = contains_hyperplane(model, h, samples=samples,
                                        field_prime=field_prime, seed=seed)
            rows.append(ConjectureRow(a=a, leak=l, hyperplane=h, check=check))
    return ConjectureReport(model=model, rows=tuple(rows))
