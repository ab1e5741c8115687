"""Model parsing, validation, shape detection, compartmental matrix."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compident.errors import InvalidModel, MalformedSpec
from compident.model import (
    CompartmentalModel,
    ParameterId,
    Shape,
    compartmental_matrix,
    is_strongly_connected,
    make_model,
    model_to_json,
    parse_model,
    serialize_model,
    shape_of,
)
from compident.polynomial import Polynomial

from helpers import catenary_model, cycle_model, fig2_model, fig5_model, kv


class TestParse:
    def test_figure_2_document(self):
        m = parse_model('{"n":3,"edges":[[1,2],[2,3],[3,1]],"in":[1],"out":[2],"leak":[1,3]}')
        assert m == fig2_model()

    def test_smallest_admissible_model(self):
        m = parse_model({"n": 1, "edges": [], "in": [1], "out": [1], "leak": [1]})
        assert m.n == 1 and m.leaks == {1}

    def test_missing_input_rejected(self):
        with pytest.raises(InvalidModel):
            parse_model({"n": 3, "edges": [[1, 2]], "in": [], "out": [2], "leak": []})

    @pytest.mark.parametrize("doc,err", [
        ("{not json", MalformedSpec),
        ('{"n":1,"edges":[],"in":[1],"out":[1],"leak":[],"extra":1}', MalformedSpec),
        ('{"n":1,"edges":[],"in":[1],"out":[1]}', MalformedSpec),
        ('{"n":"3","edges":[],"in":[1],"out":[1],"leak":[]}', MalformedSpec),
        ('{"n":2,"edges":[[1]],"in":[1],"out":[1],"leak":[]}', MalformedSpec),
        ('{"n":2,"edges":[[1,1]],"in":[1],"out":[1],"leak":[]}', InvalidModel),
        ('{"n":2,"edges":[[1,3]],"in":[1],"out":[1],"leak":[]}', InvalidModel),
        ('{"n":2,"edges":[[1,2]],"in":[1],"out":[3],"leak":[]}', InvalidModel),
        ('{"n":2,"edges":[[1,2],[1,2]],"in":[1],"out":[1],"leak":[]}', InvalidModel),
    ])
    def test_rejections(self, doc, err):
        with pytest.raises(err):
            parse_model(doc)

    def test_in_out_may_overlap(self):
        m = parse_model({"n": 2, "edges": [[1, 2], [2, 1]], "in": [1], "out": [1], "leak": []})
        assert m.inputs == m.outputs == {1}


@st.composite
def models(draw):
    n = draw(st.integers(1, 5))
    possible = [(f, t) for f in range(1, n + 1) for t in range(1, n + 1) if f != t]
    edges = draw(st.lists(st.sampled_from(possible), unique=True, max_size=len(possible))) if possible else []
    comps = st.lists(st.integers(1, n), min_size=1, max_size=n)
    ins = draw(comps)
    outs = draw(comps)
    leaks = draw(st.lists(st.integers(1, n), max_size=n))
    return make_model(n, edges, ins, outs, leaks)


class TestSerialization:
    @settings(max_examples=80, deadline=None)
    @given(models())
    def test_parse_serialize_roundtrip(self, m):
        assert parse_model(serialize_model(m)) == m
        assert parse_model(model_to_json(m)) == m

    def test_canonical_order(self):
        m = make_model(3, [(3, 1), (1, 2), (2, 3)], [2, 1], [3], [3, 1])
        doc = serialize_model(m)
        assert doc["edges"] == [[1, 2], [2, 3], [3, 1]]
        assert doc["in"] == [1, 2] and doc["leak"] == [1, 3]


class TestShape:
    def test_figure_2_is_cycle(self):
        info = shape_of(fig2_model())
        assert info.shape is Shape.DIRECTED_CYCLE and info.strongly_connected

    def test_figure_5_is_catenary(self):
        assert shape_of(fig5_model()).shape is Shape.CATENARY

    def test_one_way_edge_is_other(self):
        m = make_model(2, [(1, 2)], [1], [2], [])
        info = shape_of(m)
        assert info.shape is Shape.OTHER and not info.strongly_connected

    def test_star_tree_is_bidirected_tree(self):
        m = make_model(4, [(1, 2), (2, 1), (1, 3), (3, 1), (1, 4), (4, 1)], [1], [2], [])
        info = shape_of(m)
        assert info.shape is Shape.BIDIRECTED_TREE and info.strongly_connected

    def test_labels_are_literal(self):
        # a relabeled 3-cycle (1->3->2->1) is not detected as DirectedCycle
        m = make_model(3, [(1, 3), (3, 2), (2, 1)], [1], [1], [])
        assert shape_of(m).shape is Shape.OTHER
        assert shape_of(m).strongly_connected

    def test_cycle_degree_law(self):
        for n in (3, 4, 5):
            m = cycle_model(n, [1], [1])
            assert shape_of(m).shape is Shape.DIRECTED_CYCLE
            for v in range(1, n + 1):
                assert len(m.out_neighbors(v)) == 1
            targets = [t for _, t in m.edges]
            assert sorted(targets) == list(range(1, n + 1))


class TestCompartmentalMatrix:
    def test_figure_2_matrix(self):
        a = compartmental_matrix(fig2_model())
        expected = [
            [kv("-k01 - k21"), kv("0"), kv("k13")],
            [kv("k21"), kv("-k32"), kv("0")],
            [kv("0"), kv("k32"), kv("-k03 - k13")],
        ]
        assert [list(row) for row in a.rows] == expected

    def test_single_compartment_with_leak(self):
        m = make_model(1, [], [1], [1], [1])
        a = compartmental_matrix(m)
        assert a[0, 0] == kv("-k01")

    def test_leak_free_cycle_columns_sum_to_zero(self):
        a = compartmental_matrix(cycle_model(3, [1], [1]))
        assert a[0, 0] == kv("-k21") and a[1, 1] == kv("-k32") and a[2, 2] == kv("-k13")
        for j in range(3):
            total = Polynomial.zero()
            for i in range(3):
                total = total + a[i, j]
            assert total.is_zero()

    @settings(max_examples=80, deadline=None)
    @given(models())
    def test_leak_free_columns_sum_to_zero(self, m):
        leak_free = make_model(m.n, m.edges, m.inputs, m.outputs, [])
        a = compartmental_matrix(leak_free)
        for j in range(m.n):
            total = Polynomial.zero()
            for i in range(m.n):
                total = total + a[i, j]
            assert total.is_zero()


class TestParams:
    def test_figure_2_column_order(self):
        names = [p.name for p in fig2_model().params()]
        assert names == ["k21", "k32", "k13", "k01", "k03"]

    def test_param_name_roundtrip(self):
        from compident.model import parameter_from_name
        for p in fig5_model().params():
            assert parameter_from_name(p.name) == p

    def test_immutability(self):
        m = fig2_model()
        with pytest.raises(Exception):
            m.n = 4  # frozen dataclass
        assert hash(m) == hash(fig2_model())
