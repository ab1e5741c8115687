"""Command-line front end, batch sweeps, and report emission.

Sweeps realize the appendix-style databases at local-identifiability
granularity: every row carries both the combinatorial verdict and the
rank-engine verdict, and the agreement flag doubles as a runtime check of
the cycle classification theorem.  Exit code 2 is reserved for route or
verdict discrepancies so CI can distinguish theorem violations from usage
errors.

Determinism: reports embed the RNG seed and prime, rows are sorted
canonically, and identical argv + seed produce byte-identical documents.
The environment variable COMPIDENT_SEED overrides the built-in default
seed; an explicit --seed beats both.
"""

from __future__ import annotations

import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import click

from . import __version__
from .catenary import catenary_coefficient_map, reflect_model
from .cycle import classify_cycle, cycle_coefficient_map, rotate_model
from .errors import CompidentError, IoFailure, PreconditionViolated
from .forests import LeakExtendedGraph, coeff_via_forests, enumerate_incoming_forests
from .ident import (
    DEFAULT_PRIME,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EchelonBasis,
    ParamStatus,
    is_identifiable,
)
from .ioeq import coefficient_map, format_io_equation, io_equation
from .model import (
    CompartmentalModel,
    ParameterId,
    Shape,
    make_model,
    parse_model,
    serialize_model,
    shape_of,
)
from .polynomial import Polynomial, divides, exact_divide
from .singular import explore_conjecture, predicted_hyperplanes, singular_locus_polynomial


def _default_seed() -> int:
    env = os.environ.get("COMPIDENT_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    n: int
    edges: Tuple[Tuple[int, int], ...]
    inputs: Tuple[int, ...]
    outputs: Tuple[int, ...]
    leaks: Tuple[int, ...]
    shape: str
    verdict_comb: str
    verdict_rank: str
    params_local: Tuple[str, ...]
    params_non: Tuple[str, ...]

    @property
    def agree(self) -> bool:
        return self.verdict_comb == self.verdict_rank

    def sort_key(self):
        return (self.n, self.inputs, self.outputs, self.leaks)


@dataclass(frozen=True)
class SweepReport:
    family: str
    n: int
    rows: Tuple[SweepRow, ...]
    seed: int
    prime: int
    trials: int
    version: str = __version__

    def discrepancies(self) -> List[SweepRow]:
        return [r for r in self.rows if not r.agree]


def _cycle_model(n: int, ins, outs, leaks) -> CompartmentalModel:
    return make_model(n, [(i, i % n + 1) for i in range(1, n + 1)], ins, outs, leaks)


def _catenary_model(n: int, ins, outs, leaks) -> CompartmentalModel:
    edges = []
    for i in range(1, n):
        edges.append((i, i + 1))
        edges.append((i + 1, i))
    return make_model(n, edges, ins, outs, leaks)


def rotation_reduced_cycle_configs(n: int, max_leaks: Optional[int] = None):
    """Canonical representatives of (In, Out, Leak) under cyclic relabeling."""
    limit = n if max_leaks is None else max_leaks
    subsets = [tuple(sorted(s))
               for size in range(n + 1)
               for s in combinations(range(1, n + 1), size)]
    nonempty = [s for s in subsets if s]
    leak_choices = [s for s in subsets if len(s) <= limit]

    def rotate(comps: Tuple[int, ...], r: int) -> Tuple[int, ...]:
        return tuple(sorted((c + r - 1) % n + 1 for c in comps))

    for ins in nonempty:
        for outs in nonempty:
            for leaks in leak_choices:
                key = (ins, outs, leaks)
                canon = min((rotate(ins, r), rotate(outs, r), rotate(leaks, r))
                            for r in range(n))
                if key == canon:
                    yield ins, outs, leaks


class _CycleRankEngine:
    """Shared-point modular rank evaluation for exhaustive cycle sweeps.

    The y-side coefficients depend only on the leak set and the u-side
    coefficients only on (leak set, input, output), so their evaluated
    Jacobian rows are cached across configurations.  All configurations
    share one set of random points per trial; identifiability verdicts stay
    one-sided (rank is never over-reported) and the report records seed and
    prime so any row can be re-derived independently.
    """

    def __init__(self, n: int, trials: int, prime: int, seed: int):
        self.n = n
        self.trials = trials
        self.prime = prime
        self.seed = seed
        self.edge_params = [ParameterId.edge(i, i % n + 1) for i in range(1, n + 1)]
        self.edge_params.sort()
        self.leak_params = [ParameterId.leak(l) for l in range(1, n + 1)]
        self.universe = self.edge_params + self.leak_params
        self.col_of = {p: i for i, p in enumerate(self.universe)}
        rng = random.Random(seed)
        self.points = [
            {p: rng.randrange(1, prime) for p in self.universe}
            for _ in range(trials)
        ]
        self._lhs_tables: Dict[tuple, list] = {}
        self._rhs_tables: Dict[tuple, list] = {}
        self._lhs_rows: Dict[tuple, list] = {}
        self._rhs_rows: Dict[tuple, list] = {}

    def _tables_for(self, polys) -> list:
        """Per-coefficient maps (column -> partial polynomial)."""
        tables = []
        for poly in polys:
            if poly.is_constant():
                continue
            tables.append({self.col_of[v]: poly.partial(v) for v in poly.variables()})
        return tables

    def _lhs_table(self, leaks: Tuple[int, ...]) -> list:
        hit = self._lhs_tables.get(leaks)
        if hit is None:
            model = _cycle_model(self.n, (1,), (1,), leaks)
            eq = io_equation(model, 1)
            hit = self._tables_for(eq.lhs[1:])
            self._lhs_tables[leaks] = hit
        return hit

    def _rhs_table(self, leaks: Tuple[int, ...], j: int, i: int) -> list:
        key = (leaks, j, i)
        hit = self._rhs_tables.get(key)
        if hit is None:
            model = _cycle_model(self.n, (j,), (i,), leaks)
            eq = io_equation(model, i)
            hit = self._tables_for(eq.rhs[j])
            self._rhs_tables[key] = hit
        return hit

    def _rows(self, cache, key, tables, trial: int) -> list:
        rows = cache.get((key, trial))
        if rows is None:
            point = self.points[trial]
            prime = self.prime
            width = len(self.universe)
            rows = []
            for table in tables:
                row = [0] * width
                for col, partial in table.items():
                    row[col] = partial.eval_mod(point, prime)
                rows.append(row)
            cache[(key, trial)] = rows
        return rows

    def analyze(self, ins, outs, leaks) -> Tuple[bool, List[str], List[str]]:
        """(identifiable, locally identifiable params, non-identifiable params)."""
        cols = list(range(len(self.edge_params)))
        cols += [self.col_of[ParameterId.leak(l)] for l in sorted(leaks)]
        target = len(cols)
        param_names = [self.universe[c].name for c in cols]

        best_rank = 0
        aug_rank = [0] * target
        for trial in range(self.trials):
            basis = EchelonBasis(self.prime)
            lhs_rows = self._rows(self._lhs_rows, leaks, self._lhs_table(leaks), trial)
            for row in lhs_rows:
                basis.add([row[c] for c in cols])
            for j in sorted(ins):
                for i in sorted(outs):
                    rhs_rows = self._rows(self._rhs_rows, (leaks, j, i),
                                          self._rhs_table(leaks, j, i), trial)
                    for row in rhs_rows:
                        basis.add([row[c] for c in cols])
            rank = basis.rank
            best_rank = max(best_rank, rank)
            if rank == target:
                return True, param_names, []
            for c in range(target):
                unit = [0] * target
                unit[c] = 1
                bump = 0 if basis.contains(unit) else 1
                aug_rank[c] = max(aug_rank[c], rank + bump)
        local = [param_names[c] for c in range(target) if aug_rank[c] == best_rank]
        non = [param_names[c] for c in range(target) if aug_rank[c] != best_rank]
        return False, local, non


def sweep_cycle(n: int, max_leaks: Optional[int] = None, trials: int = DEFAULT_TRIALS,
                prime: int = DEFAULT_PRIME, seed: int = DEFAULT_SEED) -> SweepReport:
    """Exhaustive rotation-reduced cycle sweep with both verdict routes."""
    engine = _CycleRankEngine(n, trials, prime, seed)
    edges = tuple(sorted((i, i % n + 1) for i in range(1, n + 1)))
    rows = []
    for ins, outs, leaks in rotation_reduced_cycle_configs(n, max_leaks):
        model = _cycle_model(n, ins, outs, leaks)
        comb = classify_cycle(model).verdict
        identifiable, local, non = engine.analyze(ins, outs, leaks)
        rank_verdict = "Identifiable" if identifiable else "Unidentifiable"
        rows.append(SweepRow(
            n=n, edges=edges, inputs=ins, outputs=outs, leaks=leaks,
            shape=Shape.DIRECTED_CYCLE.value,
            verdict_comb=comb, verdict_rank=rank_verdict,
            params_local=tuple(local), params_non=tuple(non),
        ))
    rows.sort(key=SweepRow.sort_key)
    return SweepReport(family="cycle", n=n, rows=tuple(rows), seed=seed,
                       prime=prime, trials=trials)


def sweep_catenary(n: int, max_leaks: Optional[int] = None, trials: int = DEFAULT_TRIALS,
                   prime: int = DEFAULT_PRIME, seed: int = DEFAULT_SEED) -> SweepReport:
    """One-input/one-output catenary sweep; the combinatorial verdict is the
    bidirected-tree law (at most one leak, input-output distance at most one)."""
    limit = n if max_leaks is None else max_leaks
    rows = []
    edges = tuple(sorted(_catenary_model(n, (1,), (1,), ()).edges)) if n >= 1 else ()
    for inp in range(1, n + 1):
        for out in range(1, n + 1):
            for size in range(0, limit + 1):
                for leaks in combinations(range(1, n + 1), size):
                    model = _catenary_model(n, (inp,), (out,), leaks)
                    comb = ("Identifiable"
                            if len(leaks) <= 1 and abs(out - inp) <= 1
                            else "Unidentifiable")
                    analysis = is_identifiable(model, trials=trials,
                                               field_prime=prime, seed=seed)
                    rank_verdict = ("Identifiable" if analysis.identifiable
                                    else "Unidentifiable")
                    local = tuple(p.name for p, s in sorted(analysis.per_param.items())
                                  if s is ParamStatus.LOCALLY_IDENTIFIABLE)
                    non = tuple(p.name for p, s in sorted(analysis.per_param.items())
                                if s is ParamStatus.NON_IDENTIFIABLE)
                    rows.append(SweepRow(
                        n=n, edges=edges, inputs=(inp,), outputs=(out,),
                        leaks=leaks, shape=Shape.CATENARY.value,
                        verdict_comb=comb, verdict_rank=rank_verdict,
                        params_local=local, params_non=non,
                    ))
    rows.sort(key=SweepRow.sort_key)
    return SweepReport(family="catenary", n=n, rows=tuple(rows), seed=seed,
                       prime=prime, trials=trials)


def _join(comps) -> str:
    return ";".join(str(c) for c in comps)


def emit_report(report: SweepReport, fmt: str = "csv") -> str:
    """Render a sweep report; column order is part of the contract."""
    if fmt == "json":
        doc = {
            "family": report.family,
            "n": report.n,
            "seed": report.seed,
            "prime": report.prime,
            "trials": report.trials,
            "version": report.version,
            "rows": [
                {
                    "n": r.n,
                    "edges": [list(e) for e in r.edges],
                    "in": list(r.inputs),
                    "out": list(r.outputs),
                    "leak": list(r.leaks),
                    "shape": r.shape,
                    "verdict_comb": r.verdict_comb,
                    "verdict_rank": r.verdict_rank,
                    "params_local": list(r.params_local),
                    "params_non": list(r.params_non),
                    "agree": r.agree,
                }
                for r in report.rows
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise IoFailure(f"unsupported report format {fmt!r}")
    buf = io.StringIO()
    buf.write(f"# family={report.family} n={report.n} seed={report.seed} "
              f"prime={report.prime} trials={report.trials} version={report.version}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "edges", "in", "out", "leak", "shape",
                     "verdict_comb", "verdict_rank", "params_local", "params_non",
                     "agree"])
    for r in report.rows:
        writer.writerow([
            r.n,
            ";".join(f"{f}>{t}" for f, t in r.edges),
            _join(r.inputs), _join(r.outputs), _join(r.leaks),
            r.shape, r.verdict_comb, r.verdict_rank,
            _join(r.params_local), _join(r.params_non),
            "true" if r.agree else "false",
        ])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# route-equivalence harness
# ---------------------------------------------------------------------------


def _nonconstant_multiset(polys) -> dict:
    out: dict = {}
    for p in polys:
        if not p.is_constant():
            out[p] = out.get(p, 0) + 1
    return out


def cross_check_cycle(n: int) -> List[str]:
    """Determinant vs forest vs closed-form coefficients on cycle graphs.

    Forest equivalence runs over every (leak set, input, output); the closed
    form additionally requires In = {1} and a leak."""
    problems = []
    for size in range(n + 1):
        for leaks in combinations(range(1, n + 1), size):
            for j in range(1, n + 1):
                for i in range(1, n + 1):
                    model = _cycle_model(n, (j,), (i,), leaks)
                    eq = io_equation(model, i)
                    lhs, rhs = coeff_via_forests(model, i, j)
                    if eq.lhs != lhs or eq.rhs[j] != rhs:
                        problems.append(f"forest mismatch: {model}")
            if size >= 1:
                for p in range(1, n + 1):
                    model = _cycle_model(n, (1,), (p,), leaks)
                    det_map = _nonconstant_multiset(coefficient_map(model).polynomials())
                    closed = _nonconstant_multiset(
                        cycle_coefficient_map(model).polynomials())
                    if det_map != closed:
                        problems.append(f"closed-form mismatch: {model}")
    return problems


def cross_check_catenary(n: int) -> List[str]:
    """Determinant vs forest vs closed-form coefficients on catenary graphs."""
    problems = []
    for size in range(n + 1):
        for leaks in combinations(range(1, n + 1), size):
            for inp in range(1, n + 1):
                for out in range(1, n + 1):
                    model = _catenary_model(n, (inp,), (out,), leaks)
                    eq = io_equation(model, out)
                    lhs, rhs = coeff_via_forests(model, out, inp)
                    if eq.lhs != lhs or eq.rhs[inp] != rhs:
                        problems.append(f"forest mismatch: {model}")
                    if inp > out:
                        continue
                    det_by = {(l.side, l.input, l.order): p
                              for l, p in coefficient_map(model)}
                    for lbl, poly in catenary_coefficient_map(model):
                        if poly.is_constant():
                            continue
                        if det_by.get((lbl.side, lbl.input, lbl.order)) != poly:
                            problems.append(
                                f"closed-form mismatch at {lbl}: {model}")
    return problems


# ---------------------------------------------------------------------------
# CLI plumbing
# ---------------------------------------------------------------------------


def _load_model(path: str) -> CompartmentalModel:
    if path == "-":
        return parse_model(sys.stdin.read())
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from None
    return parse_model(text)


def _fail(exc: CompidentError) -> None:
    doc = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(doc), err=True)
    sys.exit(1)


def _poly_list(polys) -> list:
    return [str(p) for p in polys]


@click.group()
@click.option("--format", "fmt", type=click.Choice(["json", "text", "csv"]),
              default="text", help="Output format where applicable.")
@click.version_option(version=__version__)
@click.pass_context
def main(ctx, fmt):
    """Structural identifiability toolkit for linear compartmental models."""
    ctx.ensure_object(dict)
    ctx.obj["format"] = fmt


def _fmt(ctx) -> str:
    return ctx.obj.get("format", "text")


@main.command()
@click.argument("spec")
def validate(spec):
    """Parse and validate a model spec; echo the canonical form."""
    try:
        model = _load_model(spec)
    except CompidentError as exc:
        _fail(exc)
    click.echo(json.dumps(serialize_model(model), separators=(",", ":")))


@main.command("io-eq")
@click.argument("spec")
@click.option("--output", "output_comp", type=int, default=None,
              help="Output compartment (default: every output).")
@click.pass_context
def io_eq_cmd(ctx, spec, output_comp):
    """Print input-output equations."""
    try:
        model = _load_model(spec)
        outputs = [output_comp] if output_comp is not None else sorted(model.outputs)
        eqs = [io_equation(model, i) for i in outputs]
    except CompidentError as exc:
        _fail(exc)
    if _fmt(ctx) == "json":
        doc = [
            {
                "output": eq.output,
                "lhs": _poly_list(eq.lhs),
                "rhs": {str(j): _poly_list(coeffs) for j, coeffs in sorted(eq.rhs.items())},
            }
            for eq in eqs
        ]
        click.echo(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for eq in eqs:
            click.echo(format_io_equation(eq))


@main.command("coeff-map")
@click.argument("spec")
@click.option("--route", type=click.Choice(["determinant", "closed-form", "forests"]),
              default="determinant")
@click.option("--diff", is_flag=True,
              help="Compare the chosen route against the determinant route.")
@click.pass_context
def coeff_map_cmd(ctx, spec, route, diff):
    """Print the coefficient map computed by the selected route."""
    try:
        model = _load_model(spec)
        model, note = _normalize_for_route(model, route)
        entries = _route_entries(model, route)
    except CompidentError as exc:
        _fail(exc)
    if _fmt(ctx) == "json":
        doc = {"route": route,
               "entries": [{"label": str(lbl), "poly": str(p)} for lbl, p in entries]}
        if note:
            doc["normalized"] = note
        click.echo(json.dumps(doc, indent=2, sort_keys=True))
    else:
        if note:
            click.echo(f"note: {note}")
        for lbl, p in entries:
            click.echo(f"{lbl}: {p}")
    if diff:
        base = _nonconstant_multiset(coefficient_map(model).polynomials())
        other = _nonconstant_multiset(p for _, p in entries)
        if base == other:
            click.echo("routes agree")
        else:
            for poly in set(base) ^ set(other):
                click.echo(f"mismatch: {poly}")
            sys.exit(2)


def _normalize_for_route(model, route):
    """Apply the explicit relabel operations the closed forms require."""
    if route != "closed-form":
        return model, None
    info = shape_of(model)
    if info.shape is Shape.DIRECTED_CYCLE and len(model.inputs) == 1:
        (inp,) = model.inputs
        if inp != 1:
            return rotate_model(model, 1 - inp), f"rotated input {inp} -> 1"
    if info.shape is Shape.CATENARY and len(model.inputs) == len(model.outputs) == 1:
        (inp,) = model.inputs
        (out,) = model.outputs
        if inp > out:
            return reflect_model(model), "reflected so the input precedes the output"
    return model, None


def _route_entries(model, route):
    if route == "determinant":
        return list(coefficient_map(model))
    if route == "closed-form":
        info = shape_of(model)
        if info.shape is Shape.DIRECTED_CYCLE:
            return list(cycle_coefficient_map(model))
        if info.shape is Shape.CATENARY:
            return list(catenary_coefficient_map(model))
        raise PreconditionViolated("closed forms exist for cycle and catenary models")
    # forests route: one fragment per (output, input)
    entries = []
    seen = set()
    for i in sorted(model.outputs):
        first = True
        for j in sorted(model.inputs):
            lhs, rhs = coeff_via_forests(model, i, j)
            if first:
                for d, poly in enumerate(lhs[1:]):
                    if not poly.is_constant() and poly not in seen:
                        seen.add(poly)
                        entries.append((f"y{i}^({len(lhs) - 2 - d})", poly))
                first = False
            for d, poly in enumerate(rhs):
                if not poly.is_constant() and poly not in seen:
                    seen.add(poly)
                    entries.append((f"u{j}^({len(rhs) - 1 - d})->y{i}", poly))
    return entries


@main.command()
@click.argument("spec")
@click.option("--trials", type=int, default=DEFAULT_TRIALS)
@click.option("--seed", type=int, default=None)
def analyze(spec, trials, seed):
    """Rank-route identifiability analysis (JSON)."""
    try:
        model = _load_model(spec)
        analysis = is_identifiable(model, trials=trials,
                                   seed=_default_seed() if seed is None else seed)
    except CompidentError as exc:
        _fail(exc)
    click.echo(json.dumps(analysis.to_json_dict(), sort_keys=True))


@main.command()
@click.argument("spec")
@click.pass_context
def classify(ctx, spec):
    """Combinatorial cycle classification."""
    try:
        model = _load_model(spec)
        result = classify_cycle(model)
    except CompidentError as exc:
        _fail(exc)
    if _fmt(ctx) == "json":
        click.echo(json.dumps(result.to_json_dict(), sort_keys=True))
    else:
        click.echo(f"verdict: {result.verdict}")
        click.echo(f"exceptional: {result.is_exceptional}")
        click.echo(f"leak-interlacing: {result.is_leak_interlacing}")
        if result.witness:
            click.echo(f"witness: {result.witness}")


@main.command("singular-locus")
@click.argument("spec")
@click.option("--seed", type=int, default=None)
def singular_locus_cmd(spec, seed):
    """Singular-locus polynomial, factored by predicted hyperplanes when possible."""
    try:
        model = _load_model(spec)
        poly = singular_locus_polynomial(
            model, seed=_default_seed() if seed is None else seed)
    except CompidentError as exc:
        _fail(exc)
    factors: List[Tuple[Polynomial, int]] = []
    rest = poly
    try:
        forms = []
        for _, h in predicted_hyperplanes(model):
            if h.h not in forms:
                forms.append(h.h)
        for form in forms:
            mult = 0
            while divides(form, rest):
                rest = exact_divide(rest, form)
                mult += 1
            if mult:
                factors.append((form, mult))
    except CompidentError:
        factors = []
        rest = poly
    if factors:
        pieces = [f"({f})^{m}" if m > 1 else f"({f})" for f, m in factors]
        if not rest.is_constant() or rest.constant_value() != 1:
            pieces.append(f"({rest})")
        click.echo(" * ".join(pieces))
    else:
        click.echo(str(poly))


@main.command()
@click.argument("spec")
@click.option("--samples", type=int, default=50)
@click.option("--seed", type=int, default=None)
def conjecture(spec, samples, seed):
    """Hyperplane-containment evidence table (CSV)."""
    try:
        model = _load_model(spec)
        report = explore_conjecture(model, samples=samples,
                                    seed=_default_seed() if seed is None else seed)
    except CompidentError as exc:
        _fail(exc)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["a", "leak", "hyperplane", "contained", "samples"])
    for row in report.rows:
        writer.writerow([row.a, row.leak, str(row.hyperplane.h),
                         "true" if row.check.contained else "false",
                         row.check.samples])


@main.command("forests")
@click.argument("spec")
@click.option("-m", "edge_count", type=int, default=None,
              help="Forest size (default: all sizes).")
@click.option("--emit-edges", is_flag=True)
@click.option("--star-output", type=int, default=None,
              help="Remove outgoing edges of this output first.")
def forests_cmd(spec, edge_count, emit_edges, star_output):
    """Spanning incoming forest counts of the leak-extended graph."""
    try:
        model = _load_model(spec)
        graph = LeakExtendedGraph.from_model(model, star_output=star_output)
    except CompidentError as exc:
        _fail(exc)
    sizes = [edge_count] if edge_count is not None else list(range(model.n + 1))
    for m in sizes:
        forests = list(enumerate_incoming_forests(graph, m))
        click.echo(f"m={m}: {len(forests)}")
        if emit_edges:
            for forest in forests:
                desc = " ".join(f"{f}>{t}" for f, t, _ in forest.edges) or "(empty)"
                click.echo(f"  {desc}")


@main.command()
@click.option("--family", type=click.Choice(["cycle", "catenary"]), required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--max-leaks", type=int, default=None)
@click.option("--trials", type=int, default=DEFAULT_TRIALS)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", type=str, default=None,
              help="Write the report here instead of stdout.")
@click.pass_context
def sweep(ctx, family, n, max_leaks, trials, seed, out_path):
    """Exhaustive family sweep; exit 2 if the two verdict routes disagree."""
    seed = _default_seed() if seed is None else seed
    try:
        if family == "cycle":
            report = sweep_cycle(n, max_leaks, trials=trials, seed=seed)
        else:
            report = sweep_catenary(n, max_leaks, trials=trials, seed=seed)
        fmt = _fmt(ctx)
        doc = emit_report(report, "json" if fmt == "json" else "csv")
        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(doc)
        else:
            click.echo(doc, nl=False)
    except CompidentError as exc:
        _fail(exc)
    bad = report.discrepancies()
    if bad:
        click.echo(f"DISCREPANCY on {len(bad)} rows", err=True)
        sys.exit(2)


@main.command("cross-check")
@click.option("--family", type=click.Choice(["cycle", "catenary"]), required=True)
@click.option("--n", "n", type=int, required=True)
def cross_check(family, n):
    """Route-equivalence harness; exit 2 on any mismatch."""
    try:
        problems = (cross_check_cycle(n) if family == "cycle"
                    else cross_check_catenary(n))
    except CompidentError as exc:
        _fail(exc)
    if problems:
        for p in problems:
            click.echo(p)
        sys.exit(2)
    click.echo(f"all {family} routes agree at n={n}")


if __name__ == "__main__":
    main()
