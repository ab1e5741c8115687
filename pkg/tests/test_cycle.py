"""Cycle classifiers, closed-form map, named coefficients, derivative laws."""

from itertools import combinations

import pytest

from compident.cycle import (
    classify_cycle,
    cycle_coefficient_map,
    cycle_e_set,
    cycle_e_star_set,
    cycle_edge_param,
    e_star_one,
    find_minimal_interlacing_submodel,
    in_exceptional_family,
    is_exceptional,
    is_leak_interlacing,
    is_minimally_leak_interlacing,
    kappa_path,
    mod_n,
    rotate_model,
)
from compident.errors import (
    NotACycle,
    NotApplicable,
    PreconditionViolated,
    UndefinedForAdjacentPair,
)
from compident.ioeq import coefficient_map
from compident.model import ParameterId, make_model
from compident.polynomial import Polynomial, elem_sym, exact_divide

from helpers import catenary_model, cycle_model, fig2_model, fig4_model, kv


def _all_leak_subsets(n):
    for size in range(n + 1):
        yield from combinations(range(1, n + 1), size)


class TestExceptional:
    def test_figure_3_left(self):
        flag, witness = is_exceptional(cycle_model(3, [1], [3], [1, 3]))
        assert flag and witness == (1, 3)

    def test_figure_3_right(self):
        flag, _ = is_exceptional(cycle_model(3, [1], [3], [2, 3]))
        assert flag

    def test_figure_2_not_exceptional(self):
        flag, witness = is_exceptional(fig2_model())
        assert not flag and witness is None

    def test_requires_cycle(self):
        with pytest.raises(NotACycle):
            is_exceptional(catenary_model(3, [1], [1], []))


class TestLeakInterlacing:
    def test_figure_2(self):
        flag, _ = is_leak_interlacing(fig2_model())
        assert flag

    def test_figure_4_witness(self):
        flag, witness = is_leak_interlacing(fig4_model())
        assert not flag and witness == (1, 2)

    def test_no_leaks(self):
        flag, _ = is_leak_interlacing(cycle_model(4, [2], [3], []))
        assert flag

    def test_wrap_arc(self):
        # leaks {2,4} on a 5-cycle with markers only at 1: arc 2->4 fails
        flag, witness = is_leak_interlacing(cycle_model(5, [1], [1], [2, 4]))
        assert not flag and witness == (2, 4)

    def test_length_zero_arc(self):
        # consecutive leaks 2,3: the arc from 2 to 3 is just {3}
        m = cycle_model(4, [1], [3], [2, 3])
        flag, _ = is_leak_interlacing(m)
        assert flag  # {3} contains the output


class TestClassify:
    def test_figure_2_identifiable(self):
        c = classify_cycle(fig2_model())
        assert c.verdict == "Identifiable" and not c.is_exceptional

    def test_five_cycle_unidentifiable(self):
        c = classify_cycle(cycle_model(5, [1], [1], [2, 4]))
        assert c.verdict == "Unidentifiable" and c.witness == (2, 4)

    def test_exceptional_family_members(self):
        for n in (3, 4, 5):
            for i in range(1, n + 1):
                prev = mod_n(i - 1, n)
                other = mod_n(i + 1, n)
                m = cycle_model(n, [i], [prev], sorted({prev, other}))
                c = classify_cycle(m)
                assert c.is_exceptional and c.verdict == "Unidentifiable"
                assert c.witness == (i, prev)

    def test_rotation_covariance(self):
        for n in (3, 4, 5):
            for leaks in _all_leak_subsets(n):
                m = cycle_model(n, [1], [max(1, n - 1)], leaks)
                verdict = classify_cycle(m).verdict
                for r in range(1, n):
                    assert classify_cycle(rotate_model(m, r)).verdict == verdict


class TestClosedFormMap:
    def test_figure_2_exact_polynomials(self):
        cm = cycle_coefficient_map(fig2_model())
        assert [str(lbl.coeff_type) for lbl, _ in cm] == ["I", "I", "II", "III", "IV"]
        assert cm.polynomials() == (
            kv("k01 + k03 + k13 + k21 + k32"),
            kv("k01*k03 + k01*k13 + k01*k32 + k03*k21 + k03*k32 + k13*k21 + k13*k32 + k21*k32"),
            kv("k01*k03*k32 + k01*k13*k32 + k03*k21*k32"),
            kv("k21"),
            kv("k03*k21 + k13*k21"),
        )

    def test_output_at_n_has_no_type_iv(self):
        cm = cycle_coefficient_map(cycle_model(4, [1], [4], [2]))
        assert all(lbl.coeff_type != "IV" for lbl, _ in cm)
        assert len(cm) == 5  # e1..e3, type II, kappa

    def test_output_at_1_omits_kappa(self):
        cm = cycle_coefficient_map(cycle_model(4, [1], [1], [2]))
        assert all(lbl.coeff_type != "III" for lbl, _ in cm)

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            cycle_coefficient_map(cycle_model(3, [2], [3], [1]))
        with pytest.raises(PreconditionViolated):
            cycle_coefficient_map(cycle_model(3, [1], [3], []))

    def test_matches_determinant_route_small(self):
        for n in (3, 4):
            for leaks in _all_leak_subsets(n):
                if not leaks:
                    continue
                for p in range(1, n + 1):
                    m = cycle_model(n, [1], [p], leaks)
                    closed = sorted(map(str, cycle_coefficient_map(m).polynomials()))
                    det = sorted(map(str, coefficient_map(m).polynomials()))
                    assert closed == det, m


class TestNamedCoefficients:
    def test_kappa_figure_2(self):
        assert kappa_path(fig2_model(), 1, 2) == kv("k21")

    def test_kappa_identity(self):
        assert kappa_path(fig2_model(), 2, 2) == Polynomial.one()

    def test_kappa_wraparound(self):
        assert kappa_path(fig2_model(), 3, 1) == kv("k13")
        assert kappa_path(fig2_model(), 2, 1) == kv("k32*k13")

    def test_e_star_one_figure_2(self):
        assert e_star_one(fig2_model(), 1, 2) == kv("k03 + k13")

    def test_e_star_one_adjacent_pair_rejected(self):
        with pytest.raises(UndefinedForAdjacentPair):
            e_star_one(fig2_model(), 1, 3)

    def test_e_star_one_with_leaks_before(self):
        # n=4, Leak={1,2}, (i,j)=(1,3): range {4}, 4 not a leak
        m = cycle_model(4, [1], [3], [1, 2])
        assert e_star_one(m, 1, 3) == kv("k14")

    def test_e_star_one_equals_factor_of_coefficient(self):
        # e1*(1,p) * kappa(1,p) is the first Type-IV coefficient
        for n in (3, 4, 5):
            for leaks in [(1,), (2, 3), (1, n)]:
                for p in range(1, n):
                    m = cycle_model(n, [1], [p], sorted(set(leaks)))
                    cm = cycle_coefficient_map(m)
                    type_iv = [poly for lbl, poly in cm
                               if lbl.coeff_type == "IV" and lbl.index == 1]
                    if type_iv:
                        expected = e_star_one(m, 1, p) * kappa_path(m, 1, p)
                        assert type_iv[0] == expected


class TestPartialDerivativeLaws:
    """Symbolic verification of the four coefficient-derivative identities
    used throughout the cycle proofs, for n <= 5 and every leak set."""

    def _bar_e(self, model, exclude, j):
        items = [cycle_edge_term_local(model, i) for i in range(1, model.n + 1)
                 if i not in exclude]
        return elem_sym(j, items)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_laws(self, n):
        from compident.cycle import cycle_edge_term
        global cycle_edge_term_local
        cycle_edge_term_local = cycle_edge_term
        for leaks in _all_leak_subsets(n):
            if not leaks:
                continue
            for p in range(1, n + 1):
                m = cycle_model(n, [1], [p], leaks)
                e_set = cycle_e_set(m)
                product = Polynomial.one()
                for i in range(1, n + 1):
                    product = product * Polynomial.variable(cycle_edge_param(m, i))
                type_ii = elem_sym(n, e_set) - product
                kappa = kappa_path(m, 1, p)
                star = cycle_e_star_set(m, p)

                for l in leaks:
                    dl_leak = ParameterId.leak(l)
                    dl_edge = cycle_edge_param(m, l)
                    # (I) equal partials of every e_i
                    for i in range(1, n + 1):
                        e_i = elem_sym(i, e_set)
                        assert e_i.partial(dl_leak) == e_i.partial(dl_edge)
                    # (II) the Type-II difference identity
                    diff = type_ii.partial(dl_edge) - type_ii.partial(dl_leak)
                    rest = Polynomial.one()
                    for i in range(1, n + 1):
                        if i != l:
                            rest = rest * Polynomial.variable(cycle_edge_param(m, i))
                    assert diff == -rest
                    # (III) kappa derivative case split
                    assert kappa.partial(dl_leak).is_zero()
                    dk = kappa.partial(dl_edge)
                    if 1 <= l <= p - 1:
                        assert dk == exact_divide(kappa, Polynomial.variable(dl_edge))
                    else:
                        assert dk.is_zero()
                    # (IV) derivatives of e_i* kappa
                    for i in range(1, n - p + 1):
                        coeff = elem_sym(i, star) * kappa
                        if l >= p + 1:
                            assert coeff.partial(dl_edge) == coeff.partial(dl_leak)
                        if l <= p:
                            assert coeff.partial(dl_leak).is_zero()
                        if 1 <= l <= p - 1:
                            expected = elem_sym(i, star) * exact_divide(
                                kappa, Polynomial.variable(dl_edge))
                            assert coeff.partial(dl_edge) == expected
                    for i in range(1, n - p + 1):
                        coeff = elem_sym(i, star) * kappa
                        assert coeff.partial(cycle_edge_param(m, p)).is_zero()

                # (I) second part: difference of leak partials
                for l in leaks:
                    for q in leaks:
                        if l == q:
                            continue
                        for i in range(1, n + 1):
                            e_i = elem_sym(i, e_set)
                            got = e_i.partial(ParameterId.leak(q)) - e_i.partial(
                                ParameterId.leak(l))
                            factor = (Polynomial.variable(ParameterId.leak(l))
                                      + Polynomial.variable(cycle_edge_param(m, l))
                                      - Polynomial.variable(ParameterId.leak(q))
                                      - Polynomial.variable(cycle_edge_param(m, q)))
                            assert got == factor * self._bar_e(m, {l, q}, i - 2)


class TestMinimalSubmodel:
    def _oracle_minimal_choices(self, model):
        """Exhaustive search over In'/Out' subset pairs satisfying the
        minimally-leak-interlacing definition."""
        found = []
        ins = sorted(model.inputs)
        outs = sorted(model.outputs)
        for r in range(1, len(ins) + 1):
            for sub_in in combinations(ins, r):
                for s in range(1, len(outs) + 1):
                    for sub_out in combinations(outs, s):
                        if set(sub_in) & set(sub_out):
                            continue
                        candidate = make_model(model.n, model.edges, sub_in,
                                               sub_out, model.leaks)
                        if is_minimally_leak_interlacing(candidate):
                            found.append(candidate)
        return found

    def test_idempotent_on_minimal_model(self):
        m = cycle_model(4, [1], [3], [2, 4])
        assert is_minimally_leak_interlacing(m)
        assert find_minimal_interlacing_submodel(m) == m

    def test_four_leaks_full_markers(self):
        m = cycle_model(4, [1, 3], [2, 4], [1, 2, 3, 4])
        sub = find_minimal_interlacing_submodel(m)
        assert is_minimally_leak_interlacing(sub)
        assert sub in self._oracle_minimal_choices(m)

    def test_figure_2_with_extra_output(self):
        m = cycle_model(3, [1], [2, 3], [1, 3])
        sub = find_minimal_interlacing_submodel(m)
        assert is_minimally_leak_interlacing(sub)
        assert sub in self._oracle_minimal_choices(m)

    def test_oracle_agreement_exhaustive_small(self):
        for n in (3, 4):
            for leaks in _all_leak_subsets(n):
                if len(leaks) < 2:
                    continue
                for in_size in (1, 2):
                    for ins in combinations(range(1, n + 1), in_size):
                        for out_size in (1, 2):
                            for outs in combinations(range(1, n + 1), out_size):
                                m = cycle_model(n, ins, outs, leaks)
                                ok, _ = is_leak_interlacing(m)
                                if not ok or in_exceptional_family(m):
                                    continue
                                sub = find_minimal_interlacing_submodel(m)
                                assert is_minimally_leak_interlacing(sub)
                                assert sub.inputs <= m.inputs
                                assert sub.outputs <= m.outputs
                                assert not (sub.inputs & sub.outputs)

    def test_not_applicable_cases(self):
        with pytest.raises(NotApplicable):
            find_minimal_interlacing_submodel(cycle_model(3, [1], [2], [1]))
        with pytest.raises(NotApplicable):
            find_minimal_interlacing_submodel(fig4_model())
        # exceptional family: exceptional model plus one more output
        fam = cycle_model(4, [1], [2, 4], [2, 4])
        assert in_exceptional_family(fam)
        with pytest.raises(NotApplicable):
            find_minimal_interlacing_submodel(fam)
