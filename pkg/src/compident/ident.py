"""Generic local identifiability via exact Jacobian rank at random points.

A strongly connected model with at least one input is generically locally
identifiable exactly when the Jacobian of its coefficient map has generic
rank |E| + |Leak|.  We certify rank from below by exact Gaussian elimination
over GF(p) at uniformly random points, p a fixed 62-bit prime: each trial
can only under-report the true generic rank, and by Schwartz-Zippel the
probability of under-reporting at one random point is at most
(total degree x rows)/p, so the error is one-sided and negligible.

Coordinates are drawn from [1, p-1]: zero coordinates frequently lie on the
singular locus of these models (coordinate hyperplanes {k_ij = 0}), which
would waste trials.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    NotStronglyConnected,
    PreconditionViolated,
    UncoveredVariable,
    ZeroDivisorCoefficient,
)
from .ioeq import CoefficientMap, coefficient_map
from .model import CompartmentalModel, ParameterId, SymbolicMatrix, is_strongly_connected
from .polynomial import Polynomial

# 62-bit prime used for all modular rank computations.
DEFAULT_PRIME = 2305843009213693967
DEFAULT_SEED = 271828
DEFAULT_TRIALS = 5


class ParamStatus(str, Enum):
    LOCALLY_IDENTIFIABLE = "local"
    NON_IDENTIFIABLE = "non"


@dataclass(frozen=True)
class JacobianAnalysis:
    """Outcome of the rank-based identifiability decision."""

    param_order: Tuple[ParameterId, ...]
    coeff_labels: Tuple[object, ...]
    generic_rank: int
    full_rank_target: int
    identifiable: bool
    per_param: Dict[ParameterId, ParamStatus]
    trials: int
    field_prime: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "rank": self.generic_rank,
            "target": self.full_rank_target,
            "identifiable": self.identifiable,
            "per_param": {p.name: s.value for p, s in sorted(self.per_param.items())},
            "trials": self.trials,
            "seed": self.seed,
            "prime": self.field_prime,
        }


# -- modular linear algebra -----------------------------------------------------


class EchelonBasis:
    """Incremental row-echelon basis over GF(p), for rank and row-space tests."""

    __slots__ = ("prime", "pivots")

    def __init__(self, prime: int):
        self.prime = prime
        self.pivots: Dict[int, List[int]] = {}  # pivot column -> normalized row

    def reduce(self, row: Sequence[int]) -> List[int]:
        """Reduce a row against the basis (returns the residue, not stored)."""
        p = self.prime
        row = [v % p for v in row]
        for col, basis_row in self.pivots.items():
            factor = row[col]
            if factor:
                row = [(a - factor * b) % p for a, b in zip(row, basis_row)]
        return row

    def add(self, row: Sequence[int]) -> bool:
        """Insert a row; True when it enlarged the span."""
        residue = self.reduce(row)
        for col, v in enumerate(residue):
            if v:
                inv = pow(v, self.prime - 2, self.prime)
                self.pivots[col] = [(a * inv) % self.prime for a in residue]
                return True
        return False

    def contains(self, row: Sequence[int]) -> bool:
        return not any(self.reduce(row))

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank_mod(rows: Sequence[Sequence[int]], prime: int) -> int:
    basis = EchelonBasis(prime)
    for row in rows:
        basis.add(row)
    return basis.rank


# -- Jacobian construction and rank ---------------------------------------------


def jacobian(cm: CoefficientMap, params: Sequence[ParameterId]) -> SymbolicMatrix:
    """Matrix of formal partials: entry (r, c) = d(coefficient r)/d(param c)."""
    param_set = set(params)
    for var in cm.variables():
        if var not in param_set:
            raise UncoveredVariable(f"coefficient map uses {var!r} not in params")
    rows = []
    for _, poly in cm.entries:
        rows.append(tuple(poly.partial(x) for x in params))
    return SymbolicMatrix(rows=tuple(rows))


def _matrix_variables(J: SymbolicMatrix) -> list:
    seen = set()
    for row in J.rows:
        for entry in row:
            seen.update(entry.variables())
    return sorted(seen)


def random_point(variables, rng: random.Random, prime: int) -> Dict:
    """Uniform assignment into [1, p-1] for each variable."""
    return {v: rng.randrange(1, prime) for v in variables}


def evaluate_matrix(J: SymbolicMatrix, point: Mapping, prime: int) -> List[List[int]]:
    return [[entry.eval_mod(point, prime) for entry in row] for row in J.rows]


def generic_rank(J: SymbolicMatrix, trials: int = DEFAULT_TRIALS,
                 field_prime: int = DEFAULT_PRIME, seed: int = DEFAULT_SEED) -> int:
    """Max rank over `trials` random GF(p) evaluations (lower-bounds the truth)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if J.nrows == 0 or J.ncols == 0:
        return 0
    variables = _matrix_variables(J)
    rng = random.Random(seed)
    best = 0
    limit = min(J.nrows, J.ncols)
    for _ in range(trials):
        point = random_point(variables, rng, field_prime)
        best = max(best, rank_mod(evaluate_matrix(J, point, field_prime), field_prime))
        if best == limit:
            break
    return best


def per_param_flags(J: SymbolicMatrix, params: Sequence[ParameterId],
                    trials: int = DEFAULT_TRIALS, field_prime: int = DEFAULT_PRIME,
                    seed: int = DEFAULT_SEED) -> Dict[ParameterId, ParamStatus]:
    """Flag each parameter by the augmented-rank test.

    A parameter is locally identifiable exactly when stacking its unit row
    onto J does not raise the generic rank, i.e. its coordinate direction
    lies in the generic row space of J.
    """
    t = len(params)
    rng = random.Random(seed)
    variables = _matrix_variables(J)
    base_rank = 0
    aug_rank = {x: 0 for x in params}
    for _ in range(trials):
        point = random_point(variables, rng, field_prime)
        basis = EchelonBasis(field_prime)
        for row in evaluate_matrix(J, point, field_prime):
            basis.add(row)
        base_rank = max(base_rank, basis.rank)
        for c, x in enumerate(params):
            unit = [0] * t
            unit[c] = 1
            bump = 0 if basis.contains(unit) else 1
            aug_rank[x] = max(aug_rank[x], basis.rank + bump)
    return {
        x: (ParamStatus.LOCALLY_IDENTIFIABLE if aug_rank[x] == base_rank
            else ParamStatus.NON_IDENTIFIABLE)
        for x in params
    }


def is_identifiable(model: CompartmentalModel, trials: int = DEFAULT_TRIALS,
                    field_prime: int = DEFAULT_PRIME,
                    seed: int = DEFAULT_SEED) -> JacobianAnalysis:
    """Full rank-route analysis of one model.

    Refuses models that are not strongly connected: the rank criterion's
    hypothesis fails there and guessing would be dishonest.
    """
    if not is_strongly_connected(model):
        raise NotStronglyConnected(f"model is not strongly connected: {model}")
    cm = coefficient_map(model)
    params = model.params()
    target = len(params)
    J = jacobian(cm, params)

    rng = random.Random(seed)
    variables = _matrix_variables(J)
    best_rank = 0
    aug_rank = {x: 0 for x in params}
    for _ in range(trials):
        point = random_point(variables, rng, field_prime)
        basis = EchelonBasis(field_prime)
        for row in evaluate_matrix(J, point, field_prime):
            basis.add(row)
        best_rank = max(best_rank, basis.rank)
        for c, x in enumerate(params):
            unit = [0] * target
            unit[c] = 1
            bump = 0 if basis.contains(unit) else 1
            aug_rank[x] = max(aug_rank[x], basis.rank + bump)

    per_param = {
        x: (ParamStatus.LOCALLY_IDENTIFIABLE if aug_rank[x] == best_rank
            else ParamStatus.NON_IDENTIFIABLE)
        for x in params
    }
    return JacobianAnalysis(
        param_order=params,
        coeff_labels=cm.labels(),
        generic_rank=best_rank,
        full_rank_target=target,
        identifiable=(best_rank == target),
        per_param=per_param,
        trials=trials,
        field_prime=field_prime,
        seed=seed,
    )


# -- quotient-modified coefficient maps -------------------------------------------


@dataclass(frozen=True)
class QuotientMap:
    """A coefficient map where some entries are quotients of coefficients.

    Each entry is (label, numerator, denominator); plain entries carry the
    constant 1 denominator.  Jacobian rows follow the quotient rule
    (den * d(num) - num * d(den)) / den^2, evaluated exactly mod p.
    """

    entries: Tuple[Tuple[object, Polynomial, Polynomial], ...]

    def jacobian_rows_at(self, params: Sequence[ParameterId], point: Mapping,
                         prime: int) -> Optional[List[List[int]]]:
        """Rows of the Jacobian at a point, or None if a denominator vanishes."""
        rows = []
        for _, num, den in self.entries:
            den_v = den.eval_mod(point, prime)
            if den_v == 0:
                return None
            num_v = num.eval_mod(point, prime)
            inv2 = pow(den_v * den_v % prime, prime - 2, prime)
            row = []
            for x in params:
                dnum = num.partial(x).eval_mod(point, prime)
                dden = den.partial(x).eval_mod(point, prime)
                row.append((den_v * dnum - num_v * dden) % prime * inv2 % prime)
            rows.append(row)
        return rows


def quotient_transform(cm: CoefficientMap, i: int, j: int) -> QuotientMap:
    """Replace entry i by the quotient (entry i) / (entry j), 0-indexed.

    The replaced entry keeps its label.  Generic Jacobian rank is preserved;
    that fact is enforced by property tests, never assumed.
    """
    if i == j:
        raise PreconditionViolated("quotient indices must differ")
    m = len(cm.entries)
    if not (0 <= i < m and 0 <= j < m):
        raise PreconditionViolated(f"indices ({i}, {j}) out of range for {m} entries")
    denominator = cm.entries[j][1]
    if denominator.is_zero():
        raise ZeroDivisorCoefficient("cannot divide by the zero coefficient")
    one = Polynomial.one()
    entries = []
    for idx, (label, poly) in enumerate(cm.entries):
        if idx == i:
            entries.append((label, poly, denominator))
        else:
            entries.append((label, poly, one))
    return QuotientMap(entries=tuple(entries))


def generic_rank_of_quotient(qm: QuotientMap, params: Sequence[ParameterId],
                             trials: int = DEFAULT_TRIALS,
                             field_prime: int = DEFAULT_PRIME,
                             seed: int = DEFAULT_SEED) -> int:
    """Max Jacobian rank of a quotient map over random points (resampling
    any point where a denominator vanishes)."""
    rng = random.Random(seed)
    variables = set(params)
    for _, num, den in qm.entries:
        variables.update(num.variables())
        variables.update(den.variables())
    variables = sorted(variables)
    best = 0
    done = 0
    attempts = 0
    while done < trials and attempts < 20 * trials:
        attempts += 1
        point = random_point(variables, rng, field_prime)
        rows = qm.jacobian_rows_at(params, point, field_prime)
        if rows is None:
            continue
        done += 1
        best = max(best, rank_mod(rows, field_prime))
    return best
