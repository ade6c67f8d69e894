import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peaksched.domain import JobSpec
from peaksched.estimators import EstimatorKind, estimate, estimate_job

histories = st.lists(st.integers(min_value=0, max_value=1000), min_size=1, max_size=64)


def test_p100_is_max():
    assert estimate([3, 1, 2], EstimatorKind.P100) == 3


def test_p75_nearest_rank_third_of_four():
    assert estimate([10, 20, 30, 40], EstimatorKind.P75) == 30


def test_mode_tie_prefers_smallest():
    assert estimate([2, 2, 3, 3, 1], EstimatorKind.MODE) == 2


def test_p50_nearest_rank_examples():
    assert estimate([10, 12, 30], EstimatorKind.P50) == 12
    assert estimate([1, 2, 3, 4], EstimatorKind.P50) == 2
    assert estimate([7], EstimatorKind.P50) == 7


def test_empty_history_rejected():
    with pytest.raises(ValueError, match="empty history"):
        estimate([], EstimatorKind.P50)


@pytest.mark.parametrize("kind", list(EstimatorKind))
def test_singleton_history_returns_the_value(kind):
    assert estimate([42], kind) == 42


@given(histories)
@settings(max_examples=300, deadline=None)
def test_percentiles_are_ordered(values):
    p50 = estimate(values, EstimatorKind.P50)
    p75 = estimate(values, EstimatorKind.P75)
    p100 = estimate(values, EstimatorKind.P100)
    assert p50 <= p75 <= p100
    assert p100 == max(values)


@given(histories, st.randoms())
@settings(max_examples=150, deadline=None)
def test_estimate_is_permutation_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    for kind in EstimatorKind:
        assert estimate(shuffled, kind) == estimate(values, kind)


@given(histories)
@settings(max_examples=150, deadline=None)
def test_outputs_are_observed_values(values):
    for kind in EstimatorKind:
        assert estimate(values, kind) in values


def test_estimate_job_is_marginal_per_column():
    j = JobSpec(id="a", q=0, f=5, u=40, deps=(), history=((10, 8), (20, 4)))
    est = estimate_job(j, EstimatorKind.P100)
    # column-wise max decouples the pairs: no single record has (20, 8)
    assert (est.d_hat, est.r_hat) == (20, 8)
    assert (est.id, est.q, est.f, est.u, est.deps) == ("a", 0, 5, 40, ())


def test_estimate_job_p50_each_column():
    j = JobSpec(id="a", q=0, f=5, u=60, deps=(), history=((10, 5), (12, 5), (30, 9)))
    est = estimate_job(j, EstimatorKind.P50)
    assert (est.d_hat, est.r_hat) == (12, 5)


def test_kind_values_are_the_cli_strings():
    assert {k.value for k in EstimatorKind} == {"p50", "p75", "p100", "mode"}
    assert EstimatorKind("mode") is EstimatorKind.MODE
