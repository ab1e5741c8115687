"""Exact sparse multivariate polynomial arithmetic over the integers.

A polynomial is a mapping from monomials to nonzero arbitrary-precision
integer coefficients.  A monomial is a tuple of (variable, exponent) pairs,
sorted by variable, with every exponent positive:

    k21^2 * k32  ->  ((k21, 2), (k32, 1))
    1            ->  ()   (the empty monomial)

Variables can be any hashable, totally ordered objects; the rest of the
package uses ParameterId from the model module.  Polynomials are immutable
values: every operation returns a fresh instance, so they are safe to share
between concurrent tasks and to use as dict keys.

Canonical term order is graded lexicographic over the variable order: higher
total degree first, ties broken by the exponent vector (a higher exponent on
an earlier variable wins).  Rendering and the leading term used by exact
division both follow this order.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple

from .errors import (
    InexactDivision,
    MissingAssignment,
    NegativeIndexBelowConvention,
)

Monomial = Tuple[Tuple[object, int], ...]

_ONE_MONO: Monomial = ()


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    """Merge two sorted exponent tuples (monomial product)."""
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        v1, e1 = m1[i]
        v2, e2 = m2[j]
        if v1 == v2:
            out.append((v1, e1 + e2))
            i += 1
            j += 1
        elif v1 < v2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _grlex_cmp(m1: Monomial, m2: Monomial) -> int:
    """Graded-lex comparison: positive when m1 > m2."""
    d1, d2 = _mono_degree(m1), _mono_degree(m2)
    if d1 != d2:
        return 1 if d1 > d2 else -1
    i = j = 0
    while i < len(m1) and j < len(m2):
        v1, e1 = m1[i]
        v2, e2 = m2[j]
        if v1 == v2:
            if e1 != e2:
                return 1 if e1 > e2 else -1
            i += 1
            j += 1
        elif v1 < v2:
            return 1
        else:
            return -1
    if i < len(m1):
        return 1
    if j < len(m2):
        return -1
    return 0


_GRLEX_KEY = cmp_to_key(_grlex_cmp)


def _mono_divide(m1: Monomial, m2: Monomial) -> Monomial | None:
    """m1 / m2 as a monomial, or None if m2 does not divide m1."""
    exp2 = dict(m2)
    out = []
    for v, e in m1:
        e2 = exp2.pop(v, 0)
        if e2 > e:
            return None
        if e > e2:
            out.append((v, e - e2))
    if exp2:
        return None
    return tuple(out)


class Polynomial:
    """Immutable sparse polynomial with integer coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Dict[Monomial, int] | None = None):
        # Constructor assumes canonical input; use the classmethods below
        # or from_terms() when canonicalization is needed.
        self._terms: Dict[Monomial, int] = terms if terms is not None else {}
        self._hash: int | None = None

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls) -> "Polynomial":
        return _ZERO

    @classmethod
    def one(cls) -> "Polynomial":
        return _ONE

    @classmethod
    def constant(cls, c: int) -> "Polynomial":
        if c == 0:
            return _ZERO
        return cls({_ONE_MONO: int(c)})

    @classmethod
    def variable(cls, var) -> "Polynomial":
        return cls({((var, 1),): 1})

    @classmethod
    def from_terms(cls, terms: Mapping[Monomial, int]) -> "Polynomial":
        """Build from arbitrary (monomial -> coefficient) data, canonicalizing."""
        out: Dict[Monomial, int] = {}
        for mono, coeff in terms.items():
            if coeff == 0:
                continue
            mono = tuple(sorted((v, e) for v, e in mono if e != 0))
            out[mono] = out.get(mono, 0) + coeff
        return cls({m: c for m, c in out.items() if c != 0})

    # -- queries -------------------------------------------------------------

    @property
    def terms(self) -> Dict[Monomial, int]:
        """The underlying (monomial -> coefficient) map.  Do not mutate."""
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and _ONE_MONO in self._terms)

    def constant_value(self) -> int:
        """Value of a constant polynomial (0 for the zero polynomial)."""
        if not self._terms:
            return 0
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms[_ONE_MONO]

    def total_degree(self) -> int:
        if not self._terms:
            return 0
        return max(_mono_degree(m) for m in self._terms)

    def variables(self) -> list:
        """Sorted list of variables occurring with positive exponent."""
        seen = set()
        for mono in self._terms:
            for v, _ in mono:
                seen.add(v)
        return sorted(seen)

    def leading_monomial(self) -> Monomial:
        """Largest monomial in graded-lex order (zero polynomial disallowed)."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self._terms, key=_GRLEX_KEY)

    def leading_coefficient(self) -> int:
        return self._terms[self.leading_monomial()]

    def coefficient(self, mono: Monomial) -> int:
        return self._terms.get(mono, 0)

    # -- ring operations -----------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            s = out.get(mono, 0) + coeff
            if s:
                out[mono] = s
            elif mono in out:
                del out[mono]
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not other._terms:
            return self
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            s = out.get(mono, 0) - coeff
            if s:
                out[mono] = s
            elif mono in out:
                del out[mono]
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self._terms or not other._terms:
            return _ZERO
        a, b = self._terms, other._terms
        if len(a) > len(b):
            a, b = b, a
        out: Dict[Monomial, int] = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                mono = _mono_mul(m1, m2)
                s = out.get(mono, 0) + c1 * c2
                if s:
                    out[mono] = s
                elif mono in out:
                    del out[mono]
        return Polynomial(out)

    def scale(self, c: int) -> "Polynomial":
        if c == 0:
            return _ZERO
        if c == 1:
            return self
        return Polynomial({m: k * c for m, k in self._terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = _ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- calculus -------------------------------------------------------------

    def partial(self, var) -> "Polynomial":
        """Formal partial derivative with respect to one variable."""
        out: Dict[Monomial, int] = {}
        for mono, coeff in self._terms.items():
            for idx, (v, e) in enumerate(mono):
                if v == var:
                    if e == 1:
                        new = mono[:idx] + mono[idx + 1:]
                    else:
                        new = mono[:idx] + ((v, e - 1),) + mono[idx + 1:]
                    s = out.get(new, 0) + coeff * e
                    if s:
                        out[new] = s
                    elif new in out:
                        del out[new]
                    break
        return Polynomial(out)

    # -- evaluation -----------------------------------------------------------

    def eval_mod(self, point: Mapping, prime: int) -> int:
        """Exact evaluation in GF(prime).  Raises MissingAssignment."""
        total = 0
        for mono, coeff in self._terms.items():
            val = coeff % prime
            for v, e in mono:
                try:
                    base = point[v]
                except KeyError:
                    raise MissingAssignment(f"no value for {v!r}") from None
                val = (val * pow(base, e, prime)) % prime
            total = (total + val) % prime
        return total

    def eval_exact(self, point: Mapping) -> Fraction:
        """Exact rational evaluation.  Raises MissingAssignment."""
        total = Fraction(0)
        for mono, coeff in self._terms.items():
            val = Fraction(coeff)
            for v, e in mono:
                try:
                    base = point[v]
                except KeyError:
                    raise MissingAssignment(f"no value for {v!r}") from None
                val *= Fraction(base) ** e
            total += val
        return total

    # -- structure ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def sorted_terms(self) -> list:
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: _GRLEX_KEY(t[0]), reverse=True)

    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:
        return f"Polynomial({render_poly(self)})"


_ZERO = Polynomial({})
_ONE = Polynomial({_ONE_MONO: 1})


# -- module-level operations ----------------------------------------------


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """Ring arithmetic dispatch: op is one of 'add', 'sub', 'mul'."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def poly_partial(p: Polynomial, var) -> Polynomial:
    return p.partial(var)


def eval_poly(p: Polynomial, point: Mapping, prime: int | None = None):
    """Evaluate at a point: in GF(prime) when prime is given, else over Q."""
    if prime is None:
        return p.eval_exact(point)
    return p.eval_mod(point, prime)


def elem_sym(k: int, items: Sequence[Polynomial]) -> Polynomial:
    """k-th elementary symmetric polynomial of the given ring elements.

    Conventions: e_0 = 1, e_{-1} = 0, and e_k = 0 when k exceeds the number
    of items.  Computed by the incremental recurrence
    e_k(S + x) = e_k(S) + x * e_{k-1}(S), never by subset enumeration.
    """
    if k < -1:
        raise NegativeIndexBelowConvention(f"e_{k} is not defined")
    if k == -1:
        return Polynomial.zero()
    if k > len(items):
        return Polynomial.zero()
    # row[j] = e_j of the items processed so far, up to index k
    row = [Polynomial.one()] + [Polynomial.zero()] * k
    for x in items:
        for j in range(k, 0, -1):
            row[j] = row[j] + x * row[j - 1]
    return row[k]


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """Return q with f = q*g, raising InexactDivision when g does not divide f."""
    if g.is_zero():
        raise InexactDivision("division by the zero polynomial")
    if f.is_zero():
        return Polynomial.zero()
    if g.is_constant():
        c = g.constant_value()
        out = {}
        for mono, coeff in f.terms.items():
            q, r = divmod(coeff, c)
            if r:
                raise InexactDivision("constant does not divide a coefficient")
            out[mono] = q
        return Polynomial(out)
    g_lead = g.leading_monomial()
    g_lc = g.terms[g_lead]
    quotient: Dict[Monomial, int] = {}
    rem = f
    while not rem.is_zero():
        r_lead = rem.leading_monomial()
        mono = _mono_divide(r_lead, g_lead)
        if mono is None:
            raise InexactDivision("leading monomial not divisible")
        q, r = divmod(rem.terms[r_lead], g_lc)
        if r:
            raise InexactDivision("leading coefficient not divisible")
        quotient[mono] = quotient.get(mono, 0) + q
        rem = rem - Polynomial({mono: q}) * g
    return Polynomial({m: c for m, c in quotient.items() if c})


def divides(g: Polynomial, f: Polynomial) -> bool:
    """True when g divides f exactly in Z[x]."""
    try:
        exact_divide(f, g)
        return True
    except InexactDivision:
        return False


def content(p: Polynomial) -> int:
    """Nonnegative integer gcd of the coefficients (0 for the zero polynomial)."""
    g = 0
    for c in p.terms.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def primitive_part(p: Polynomial) -> Polynomial:
    c = content(p)
    if c <= 1:
        return p
    return Polynomial({m: k // c for m, k in p.terms.items()})


def normalize_sign(p: Polynomial) -> Polynomial:
    """Flip sign if needed so the graded-lex leading coefficient is positive."""
    if p.is_zero():
        return p
    if p.leading_coefficient() < 0:
        return -p
    return p


# -- text form --------------------------------------------------------------


def _render_mono(mono: Monomial) -> str:
    parts = []
    for v, e in mono:
        name = getattr(v, "name", None) or str(v)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def render_poly(p: Polynomial) -> str:
    """Canonical text form: terms in descending graded-lex order."""
    if p.is_zero():
        return "0"
    chunks = []
    for mono, coeff in p.sorted_terms():
        if mono == _ONE_MONO:
            body = str(abs(coeff))
        elif abs(coeff) == 1:
            body = _render_mono(mono)
        else:
            body = f"{abs(coeff)}*{_render_mono(mono)}"
        if not chunks:
            chunks.append(body if coeff > 0 else f"-{body}")
        else:
            chunks.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(chunks)


_TERM_SPLIT = re.compile(r"(?<![\^*])\s*([+-])\s*")
_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")


def parse_poly(text: str, resolve: Callable[[str], object]) -> Polynomial:
    """Parse the canonical text form back into a Polynomial.

    `resolve` maps a variable name like "k21" to a variable object.  This is
    the mini-parser counterpart of render_poly, used mainly by tests.
    """
    s = text.strip()
    if not s or s == "0":
        return Polynomial.zero()
    # Normalize into a signed term list
    pieces = _TERM_SPLIT.split(s)
    if pieces[0] == "":
        pieces = pieces[1:]
    if pieces and pieces[0] in "+-":
        signed = [(pieces[i], pieces[i + 1]) for i in range(0, len(pieces), 2)]
    else:
        signed = [("+", pieces[0])]
        rest = pieces[1:]
        signed += [(rest[i], rest[i + 1]) for i in range(0, len(rest), 2)]
    result = Polynomial.zero()
    for sign, term in signed:
        coeff = -1 if sign == "-" else 1
        mono: Dict[object, int] = {}
        for factor in term.split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"empty factor in {term!r}")
            if factor.isdigit():
                coeff *= int(factor)
                continue
            m = _FACTOR.match(factor)
            if not m:
                raise ValueError(f"bad factor {factor!r}")
            var = resolve(m.group(1))
            mono[var] = mono.get(var, 0) + int(m.group(2) or 1)
        term_mono = tuple(sorted(mono.items()))
        result = result + Polynomial.from_terms({term_mono: coeff})
    return result
