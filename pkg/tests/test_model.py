import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coverpack.model import (
    InstanceError,
    ParseError,
    dot,
    is_width_normalized,
    metrics,
    normalize_width,
    parse_instance,
    serialize_instance,
)
from conftest import F, make_inst


GAP_DOC = '{"A": [[0.9, 1]], "a": [1], "c": [0, 1], "d": [1, null]}'


class TestParse:
    def test_gap_document(self):
        inst = parse_instance(GAP_DOC)
        assert (inst.m, inst.n, inst.r) == (1, 2, 0)
        assert inst.A == ((F(9, 10), F(1)),)
        assert inst.a == (F(1),)
        assert inst.c == (F(0), F(1))
        assert inst.d == (F(1), None)

    def test_decimals_parse_exactly(self):
        inst = parse_instance('{"A": [[0.1]], "a": [0.3], "c": ["2/7"], "d": [null]}')
        assert inst.A[0][0] == F(1, 10)
        assert inst.a[0] == F(3, 10)
        assert inst.c[0] == F(2, 7)

    def test_empty_variable_list_rejected(self):
        with pytest.raises(ParseError):
            parse_instance('{"A": [[]], "a": [1], "c": [], "d": []}')

    def test_negative_entry_rejected(self):
        with pytest.raises(InstanceError):
            parse_instance('{"A": [[-1, 1]], "a": [1], "c": [0, 1], "d": [1, null]}')

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InstanceError):
            parse_instance('{"A": [[1, 1]], "a": [1, 2], "c": [0, 1], "d": [1, 1]}')

    def test_malformed_json_reports_position(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_instance('{"A": [[1, ]], "a": [1]}')

    def test_b_without_rhs_rejected(self):
        with pytest.raises(ParseError):
            parse_instance('{"A": [[1]], "a": [1], "c": [1], "d": [1], "B": [[1]]}')

    def test_round_trip(self):
        inst = parse_instance(GAP_DOC)
        assert parse_instance(serialize_instance(inst)) == inst

    def test_round_trip_with_packing(self):
        inst = make_inst(
            A=[[1, 2], [0, 1]],
            a=["3/2", 1],
            c=[1, 2],
            d=[None, "5/2"],
            B=[[1, 1]],
            b=[4],
        )
        assert parse_instance(serialize_instance(inst)) == inst


class TestNormalize:
    def test_truncates_large_coefficients(self):
        inst = make_inst(A=[[5, "1/2"]], a=[2], c=[1, 1], d=[None, None])
        out = normalize_width(inst)
        assert out.A == ((F(2), F(1, 2)),)
        assert out.a == (F(2),)

    def test_zero_demand_row_removed(self):
        inst = make_inst(A=[[1, 1], [1, 0]], a=[0, 1], c=[1, 1], d=[None, None])
        out = normalize_width(inst)
        assert out.m == inst.m - 1
        assert out.a == (F(1),)

    def test_idempotent_on_normalized(self):
        inst = normalize_width(parse_instance(GAP_DOC))
        assert normalize_width(inst) == inst

    def test_integer_solutions_preserved(self):
        # exhaustive check on small random instances: Ax >= a before iff after
        rng = random.Random(7)
        for _ in range(30):
            n = rng.randint(1, 4)
            m = rng.randint(1, 3)
            A = [[rng.randint(0, 6) for _ in range(n)] for _ in range(m)]
            a = [rng.randint(0, 5) for _ in range(m)]
            d = [rng.randint(0, 3) for _ in range(n)]
            inst = make_inst(A=A, a=a, c=[1] * n, d=d)
            out = normalize_width(inst)
            for x in itertools.product(*(range(dj + 1) for dj in d)):
                before = all(dot(inst.A[i], x) >= inst.a[i] for i in range(inst.m))
                after = all(dot(out.A[i], x) >= out.a[i] for i in range(out.m))
                assert before == after


@st.composite
def small_instances(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 3))
    A = [[draw(st.integers(0, 5)) for _ in range(n)] for _ in range(m)]
    a = [draw(st.integers(0, 4)) for _ in range(m)]
    return make_inst(A=A, a=a, c=[1] * n, d=[None] * n)


@settings(max_examples=60, deadline=None)
@given(small_instances())
def test_normalize_idempotent_property(inst):
    once = normalize_width(inst)
    assert normalize_width(once) == once
    assert is_width_normalized(once)


class TestMetrics:
    def test_width_definition(self):
        inst = make_inst(A=[[2, 3]], a=[3], c=[1, 1], d=[None, None])
        met = metrics(inst)
        assert met.width == 1  # min(3/2, 3/3)
        assert met.dilation == 1

    def test_dilation_counts_rows(self):
        inst = make_inst(A=[[1, 0], [1, 1]], a=[1, 1], c=[1, 1], d=[None, None])
        assert metrics(inst).dilation == 2

    def test_all_zero_matrix_rejected(self):
        inst = make_inst(A=[[0, 0]], a=[1], c=[1, 1], d=[None, None])
        with pytest.raises(InstanceError, match="no covering structure"):
            metrics(inst)

    def test_normalized_width_at_least_one(self):
        rng = random.Random(11)
        for _ in range(100):
            n = rng.randint(1, 5)
            m = rng.randint(1, 4)
            A = [[rng.randint(0, 9) for _ in range(n)] for _ in range(m)]
            for row in A:
                if not any(row):
                    row[rng.randrange(n)] = 1
            a = [rng.randint(1, 12) for _ in range(m)]
            inst = normalize_width(make_inst(A=A, a=a, c=[1] * n, d=[None] * n))
            assert metrics(inst).width >= 1

    def test_beta_row_sums(self):
        inst = make_inst(
            A=[[1]], a=[1], c=[1], d=[None], B=[[3], ["1/2"]], b=[5, 5]
        )
        assert inst.beta() == (F(3), F(1, 2))
