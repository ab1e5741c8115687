"""Input-output equations and coefficient maps by exact symbolic linear algebra.

For output i the input-output equation is

    det(sI - A) y_i = sum over inputs j of (-1)^(i+j) det((sI - A)^{j,i}) u_j

where (B)^{j,i} deletes row j and column i.  Matrix entries live in
Z[parameters][s]; we represent them as lists of Polynomial coefficients by
power of s and expand determinants with the Bareiss fraction-free scheme
(cofactor expansion for tiny dimensions).  All arithmetic is exact.

The coefficient map collects, per output, every non-constant coefficient of
the equation (y-side skips the monic leading 1; u-side coefficients carry
the (-1)^(i+j) sign already).  Structurally identical polynomials appearing
more than once are deduplicated; constants never change the Jacobian rank
and are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Tuple

from .errors import NotAnOutput
from .model import CompartmentalModel, SymbolicMatrix, compartmental_matrix
from .polynomial import Polynomial, exact_divide

# A polynomial in s with Polynomial coefficients: index = power of s,
# trailing zeros stripped, [] = zero.
SPoly = List[Polynomial]

_SP_ZERO: SPoly = []


def _sp_norm(coeffs: SPoly) -> SPoly:
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _sp_one() -> SPoly:
    return [Polynomial.one()]


def _sp_is_zero(a: SPoly) -> bool:
    return not a


def _sp_mul(a: SPoly, b: SPoly) -> SPoly:
    if not a or not b:
        return []
    out = [Polynomial.zero() for _ in range(len(a) + len(b) - 1)]
    for i, ca in enumerate(a):
        if ca.is_zero():
            continue
        for j, cb in enumerate(b):
            if cb.is_zero():
                continue
            out[i + j] = out[i + j] + ca * cb
    return _sp_norm(out)


def _sp_add(a: SPoly, b: SPoly) -> SPoly:
    out = [Polynomial.zero()] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return _sp_norm(out)


def _sp_sub(a: SPoly, b: SPoly) -> SPoly:
    out = [Polynomial.zero()] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = out[i] - c
    return _sp_norm(out)


def _sp_exact_div(a: SPoly, b: SPoly) -> SPoly:
    """Exact division in Z[params][s]; used only where Bareiss guarantees it."""
    if not b:
        raise ZeroDivisionError("division by zero s-polynomial")
    if not a:
        return []
    quot = [Polynomial.zero()] * (len(a) - len(b) + 1)
    rem = list(a)
    blead = b[-1]
    while rem and len(rem) >= len(b):
        q = exact_divide(rem[-1], blead)
        pos = len(rem) - len(b)
        quot[pos] = q
        for i, c in enumerate(b):
            rem[pos + i] = rem[pos + i] - q * c
        _sp_norm(rem)
    if rem:
        raise ArithmeticError("inexact s-polynomial division in Bareiss step")
    return _sp_norm(quot)


def _cofactor_det(mat: List[List[SPoly]]) -> SPoly:
    dim = len(mat)
    if dim == 0:
        return _sp_one()
    if dim == 1:
        return mat[0][0]
    if dim == 2:
        return _sp_sub(_sp_mul(mat[0][0], mat[1][1]), _sp_mul(mat[0][1], mat[1][0]))
    total: SPoly = []
    sign = 1
    for col in range(dim):
        entry = mat[0][col]
        if not _sp_is_zero(entry):
            sub = [row[:col] + row[col + 1:] for row in mat[1:]]
            term = _sp_mul(entry, _cofactor_det(sub))
            total = _sp_add(total, term) if sign > 0 else _sp_sub(total, term)
        sign = -sign
    return total


def _bareiss_det(mat: List[List[SPoly]]) -> SPoly:
    """Fraction-free determinant with row pivoting (sign tracked)."""
    dim = len(mat)
    if dim == 0:
        return _sp_one()
    if dim <= 2:
        return _cofactor_det(mat)
    work = [row[:] for row in mat]
    sign = 1
    prev = _sp_one()
    for k in range(dim - 1):
        if _sp_is_zero(work[k][k]):
            for i in range(k + 1, dim):
                if not _sp_is_zero(work[i][k]):
                    work[k], work[i] = work[i], work[k]
                    sign = -sign
                    break
            else:
                return []
        pivot = work[k][k]
        for i in range(k + 1, dim):
            row_i = work[i]
            lead = row_i[k]
            for j in range(k + 1, dim):
                elt = _sp_sub(_sp_mul(pivot, row_i[j]), _sp_mul(lead, work[k][j]))
                if k > 0:
                    elt = _sp_exact_div(elt, prev)
                row_i[j] = elt
            row_i[k] = _SP_ZERO
        prev = pivot
    det = work[dim - 1][dim - 1]
    if sign < 0:
        det = _sp_sub([], det)
    return det


def det_polynomial_matrix(rows) -> Polynomial:
    """Symbolic determinant of a square matrix of Polynomial entries."""
    if isinstance(rows, SymbolicMatrix):
        rows = rows.rows
    mat = [[_sp_norm([entry]) for entry in row] for row in rows]
    det = _bareiss_det(mat)
    if not det:
        return Polynomial.zero()
    assert len(det) == 1
    return det[0]


# -- characteristic-style determinants, cached by graph shape ------------------


def _s_matrix(model: CompartmentalModel) -> List[List[SPoly]]:
    """The matrix sI - A with entries in Z[params][s]."""
    a = compartmental_matrix(model)
    n = model.n
    out: List[List[SPoly]] = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = -a[i, j]
            if i == j:
                row.append(_sp_norm([entry, Polynomial.one()]))
            else:
                row.append(_sp_norm([entry]))
        out.append(row)
    return out


_CHAR_CACHE: Dict[tuple, SPoly] = {}
_MINOR_CACHE: Dict[tuple, SPoly] = {}


def _char_spoly(model: CompartmentalModel) -> SPoly:
    """det(sI - A); depends only on (graph, leaks)."""
    key = model.graph_signature()
    hit = _CHAR_CACHE.get(key)
    if hit is None:
        hit = _bareiss_det(_s_matrix(model))
        _CHAR_CACHE[key] = hit
    return hit


def _minor_spoly(model: CompartmentalModel, j: int, i: int) -> SPoly:
    """det((sI - A)^{j,i}): row j and column i removed (1-indexed)."""
    key = model.graph_signature() + (j, i)
    hit = _MINOR_CACHE.get(key)
    if hit is None:
        full = _s_matrix(model)
        sub = [row[:i - 1] + row[i:] for r, row in enumerate(full) if r != j - 1]
        hit = _bareiss_det(sub)
        _MINOR_CACHE[key] = hit
    return hit


def clear_caches() -> None:
    _CHAR_CACHE.clear()
    _MINOR_CACHE.clear()


# -- input-output equations -----------------------------------------------------


@dataclass(frozen=True)
class IoEquation:
    """One output's input-output equation.

    lhs lists the n+1 coefficients of det(sI - A) from s^n down to s^0
    (lhs[0] is the constant 1: the determinant is monic of degree n).
    rhs maps each input j to the n coefficients of (-1)^(i+j) det((sI-A)^{j,i})
    from s^(n-1) down to s^0; the sign is already folded in.
    """

    output: int
    lhs: Tuple[Polynomial, ...]
    rhs: Dict[int, Tuple[Polynomial, ...]]

    @property
    def n(self) -> int:
        return len(self.lhs) - 1


def io_equation(model: CompartmentalModel, i: int) -> IoEquation:
    """Exact input-output equation for output i."""
    if i not in model.outputs:
        raise NotAnOutput(f"compartment {i} is not an output")
    n = model.n
    char = _char_spoly(model)
    assert len(char) == n + 1 and char[n] == Polynomial.one()
    lhs = tuple(char[n - d] if n - d < len(char) else Polynomial.zero()
                for d in range(0, n + 1))
    rhs: Dict[int, Tuple[Polynomial, ...]] = {}
    for j in sorted(model.inputs):
        minor = _minor_spoly(model, j, i)
        sign = -1 if (i + j) % 2 else 1
        coeffs = []
        for d in range(n - 1, -1, -1):
            c = minor[d] if d < len(minor) else Polynomial.zero()
            coeffs.append(c.scale(sign))
        rhs[j] = tuple(coeffs)
    return IoEquation(output=i, lhs=lhs, rhs=rhs)


class CoeffLabel(NamedTuple):
    """Origin of a coefficient-map entry."""

    output: int
    side: str              # "lhs" or "rhs"
    input: int | None      # None on the y side
    order: int             # derivative order the coefficient multiplies


@dataclass(frozen=True)
class CoefficientMap:
    """Ordered, labeled list of the non-constant input-output coefficients."""

    entries: Tuple[Tuple[object, Polynomial], ...]

    def polynomials(self) -> Tuple[Polynomial, ...]:
        return tuple(p for _, p in self.entries)

    def labels(self) -> Tuple[object, ...]:
        return tuple(lbl for lbl, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def variables(self) -> list:
        seen = set()
        for _, p in self.entries:
            seen.update(p.variables())
        return sorted(seen)


def coefficient_map(model: CompartmentalModel) -> CoefficientMap:
    """Concatenate every output's non-constant coefficients, deduplicated.

    Order: outputs ascending; per output the y-side coefficients by
    descending derivative order, then each input's u-side coefficients by
    descending order.  Only the first occurrence of a repeated polynomial is
    kept (repeats are common across outputs: the y side is shared).
    """
    entries: List[Tuple[CoeffLabel, Polynomial]] = []
    seen = set()
    for i in sorted(model.outputs):
        eq = io_equation(model, i)
        n = eq.n
        for d in range(n - 1, -1, -1):
            poly = eq.lhs[n - d]
            if poly.is_constant() or poly in seen:
                continue
            seen.add(poly)
            entries.append((CoeffLabel(i, "lhs", None, d), poly))
        for j in sorted(model.inputs):
            coeffs = eq.rhs[j]
            for d in range(n - 1, -1, -1):
                poly = coeffs[n - 1 - d]
                if poly.is_constant() or poly in seen:
                    continue
                seen.add(poly)
                entries.append((CoeffLabel(i, "rhs", j, d), poly))
    return CoefficientMap(entries=tuple(entries))


# -- rendering -------------------------------------------------------------------


def _term(sym: str, order: int) -> str:
    return sym if order == 0 else f"{sym}^({order})"


def format_io_equation(eq: IoEquation) -> str:
    """Paper-layout rendering, e.g. y2^(3) + (...)*y2^(2) + ... = k21*u1^(1) + ..."""
    n = eq.n
    lhs_parts = []
    for d in range(n, -1, -1):
        poly = eq.lhs[n - d]
        if poly.is_zero():
            continue
        sym = _term(f"y{eq.output}", d)
        if poly == Polynomial.one():
            lhs_parts.append(sym)
        else:
            lhs_parts.append(f"({poly})*{sym}")
    rhs_parts = []
    for j in sorted(eq.rhs):
        for d in range(n - 1, -1, -1):
            poly = eq.rhs[j][n - 1 - d]
            if poly.is_zero():
                continue
            sym = _term(f"u{j}", d)
            if poly == Polynomial.one():
                rhs_parts.append(sym)
            elif len(poly.terms) == 1:
                rhs_parts.append(f"{poly}*{sym}")
            else:
                rhs_parts.append(f"({poly})*{sym}")
    lhs = " + ".join(lhs_parts) if lhs_parts else "0"
    rhs = " + ".join(rhs_parts) if rhs_parts else "0"
    return f"{lhs} = {rhs}"
