import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdbo.benchmarks import BENCHMARKS, evaluate, get_benchmark, list_benchmarks

from oracles import ORACLES

IDS = list(BENCHMARKS)
# functions whose value depends only on the multiset of coordinates
SYMMETRIC = ["F1", "F2", "F10", "F13", "F14", "F15", "F16"]


def test_seventeen_functions_with_table_metadata():
    assert IDS == [f"F{i}" for i in range(1, 18)]
    modality = [b.modality for b in list_benchmarks()]
    assert modality.count("unimodal") == 9
    assert modality.count("multimodal") == 8


def test_bounds():
    assert get_benchmark("F10").bounds == (-5.12, 5.12)
    assert get_benchmark("F17").bounds == (0.0, 3.14)
    assert get_benchmark("F14").bounds == (-500.0, 500.0)


@pytest.mark.parametrize("bid", IDS)
def test_optimum_is_zero(bid):
    b = get_benchmark(bid)
    assert abs(b(b.optimum_point(30))) <= 1e-9


def test_worked_values():
    assert evaluate("F15", [1.0, 2.0, 3.0]) == 14.0
    assert evaluate("F10", [1.0, 1.0]) == pytest.approx(2.0, abs=1e-12)
    assert evaluate("F16", [-1.5, 2.7, 0.2]) == 3.0
    assert evaluate("F13", [1.0, -2.0]) == 17.0


def test_unknown_id_lists_valid_ids():
    with pytest.raises(KeyError, match="F17"):
        get_benchmark("F99")


def test_dimension_check():
    with pytest.raises(ValueError):
        evaluate("F15", [1.0, 2.0], dim=3)


def test_batch_matches_rows():
    rng = np.random.default_rng(4)
    for b in list_benchmarks():
        X = rng.uniform(b.low, b.high, (7, 5))
        batch = b(X)
        assert batch.shape == (7,)
        np.testing.assert_array_equal(batch, [b(x) for x in X])


@pytest.mark.parametrize("bid", IDS)
def test_matches_oracle(bid):
    b = get_benchmark(bid)
    rng = np.random.default_rng(IDS.index(bid))
    for d in (2, 5, 10):
        X = rng.uniform(b.low, b.high, (40, d))
        got = b(X)
        want = np.array([ORACLES[bid](list(x)) for x in X])
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=0)


@settings(max_examples=100, deadline=None)
@given(data=st.data(), bid=st.sampled_from(IDS), d=st.integers(2, 12))
def test_non_negative_in_bounds(data, bid, d):
    b = get_benchmark(bid)
    x = data.draw(st.lists(st.floats(b.low, b.high), min_size=d, max_size=d))
    assert b(np.array(x)) >= -1e-9


@settings(max_examples=100, deadline=None)
@given(data=st.data(), bid=st.sampled_from(SYMMETRIC), d=st.integers(2, 10))
def test_permutation_symmetry(data, bid, d):
    b = get_benchmark(bid)
    x = np.array(data.draw(st.lists(st.floats(b.low, b.high), min_size=d, max_size=d)))
    perm = data.draw(st.permutations(range(d)))
    assert b(x[list(perm)]) == pytest.approx(b(x), rel=1e-12, abs=1e-9)
