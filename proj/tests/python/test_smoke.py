"""Smoke tests for the python bindings."""

import math

import pytest

import cpld


@pytest.fixture
def model():
    return cpld.CompoundPoissonModel(1.0, cpld.MarkDistribution.exponential(1.0))


def test_rate_function_matches_closed_form(model):
    for u in [0.1 * k for k in range(1, 41)]:
        got = cpld.rate_function(model, u).value
        assert abs(got - cpld.closed_form_rate_exp_continuous(1.0, u)) <= 1e-8
    at_zero = cpld.rate_function(model, 0.0)
    assert at_zero.value == 1.0
    assert at_zero.branch == cpld.RateBranch.ZeroAtom


def test_discrete_rate_function():
    dist = cpld.MarkDistribution.exponential(1.0)
    res = cpld.rate_function_discrete(dist, 2.0)
    assert abs(res.value - (2.0 - 1.0 - math.log(2.0))) <= 1e-8
    assert math.isinf(cpld.rate_function_discrete(dist, 0.0).value)


def test_solve_tilt_oracle(model):
    res = cpld.solve_tilt(model, 4.0)
    assert res.status == cpld.TiltStatus.Converged
    assert abs(res.lambda_star - 0.5) <= 1e-8


def test_tilt_and_moments():
    dist = cpld.MarkDistribution.exponential(1.0)
    tilted = dist.tilt(0.5)
    assert tilted.family == cpld.MarkFamily.Exponential
    assert abs(tilted.mean - 2.0) <= 1e-12
    assert abs(dist.exponential_moment(0.5, 0) - 2.0) <= 1e-12
    with pytest.raises(cpld.DivergenceError):
        dist.exponential_moment(1.0, 0)
    with pytest.raises(cpld.UsageError):
        cpld.MarkDistribution.exponential(-1.0)


def test_zero_probability_exact(model):
    res = cpld.zero_probability(model, 5.0)
    assert res.p_hat == math.exp(-5.0)
    assert res.std_err == 0.0
    assert res.log_decay == 1.0
    assert res.method == cpld.EstimateMethod.Exact


def test_simulation_is_deterministic(model):
    a = cpld.simulate_path(model, 10.0, cpld.RandomStream.substream(3, 0))
    b = cpld.simulate_path(model, 10.0, cpld.RandomStream.substream(3, 0))
    assert [(j.time, j.mark) for j in a.jumps] == [(j.time, j.mark) for j in b.jumps]
    assert a.total == sum(j.mark for j in a.jumps)
    assert a.s_t == a.total / 10.0


def test_estimators_and_workers(model):
    window = cpld.EventWindow(2.0, 0.3)
    one = cpld.is_probability(model, window, 10.0, 20000, 5, workers=1)
    eight = cpld.is_probability(model, window, 10.0, 20000, 5, workers=8)
    assert one.p_hat == eight.p_hat
    mc = cpld.mc_probability(model, window, 10.0, 20000, 5)
    sigma = math.hypot(one.std_err, mc.std_err)
    assert abs(one.p_hat - mc.p_hat) <= 4.0 * sigma


def test_importance_sampling_decay(model):
    res = cpld.is_probability(model, cpld.EventWindow(4.0, 0.1), 30.0, 20000, 7)
    assert res.log_decay is not None
    assert 0.80 <= res.log_decay <= 1.20


def test_chernoff_and_laplace(model):
    assert abs(cpld.chernoff_tail_bound(model, 10.0, 1.0, 0.5) - math.exp(-4.0)) <= 1e-12
    est = cpld.empirical_laplace(model, 0.3, 2.0, 100000, 11)
    assert abs(est.mean - math.exp(2.0 * 0.3 / 0.7)) <= 4.0 * est.std_err
    with pytest.raises(cpld.UsageError):
        cpld.empirical_laplace(model, 0.5, 1.0, 100, 0)


def test_decay_curve(model):
    curve = cpld.decay_rate_curve(model, cpld.EventWindow(4.0, 0.1), [10.0, 20.0], 5000, 1)
    assert len(curve) == 2
    assert curve[-1].log_decay is not None


def test_json_record(model):
    record = cpld.to_json_record(cpld.zero_probability(model, 5.0), u=0.0)
    assert '"method":"exact"' in record
    assert '"log_decay":1' in record


def test_spec_round_trip():
    dist = cpld.MarkDistribution.from_spec("zeroinf:0.3:exp:1")
    assert dist.atom_at_zero == 0.3
    assert cpld.MarkDistribution.from_spec(dist.to_spec()).to_spec() == dist.to_spec()
