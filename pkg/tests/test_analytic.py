import math

import numpy as np
import pytest

import analytic
import model_core
from analytic import ExponentialCurve, Sign
from errors import Overflow, ParameterOutOfRange
from model_core import LogisticParams, ModelSpec, Variant


def test_logistic_solution_values():
    assert analytic.logistic_solution(1.0, 10.0, 1.0, 0.0) == pytest.approx(1.0)
    expected = 1.0 / (0.1 + 0.9 * math.exp(-1.0))
    assert analytic.logistic_solution(1.0, 10.0, 1.0, 1.0) == pytest.approx(expected, rel=1e-14)
    assert analytic.logistic_solution(1.0, 10.0, 1.0, 60.0) == pytest.approx(10.0, rel=1e-12)


def test_logistic_fixed_points():
    assert analytic.logistic_solution(0.0, 10.0, 1.0, 5.0) == 0.0
    assert analytic.logistic_solution(10.0, 10.0, 3.0, 5.0) == 10.0


def test_logistic_reaches_half_threshold_at_log_nine():
    assert analytic.logistic_solution(1.0, 10.0, 1.0, math.log(9.0)) == pytest.approx(5.0, rel=1e-14)


def test_logistic_solution_solves_the_logistic_game():
    rng = np.random.default_rng(11)
    h = 1e-5
    for _ in range(300):
        rho, K = rng.uniform(0.2, 3.0), rng.uniform(0.5, 20.0)
        N0 = rng.uniform(0.01, 2.0) * K
        t = rng.uniform(h, 10.0)
        spec = ModelSpec(Variant.LOGISTIC, LogisticParams(rho=rho, K=K))
        slope = (analytic.logistic_solution(N0, K, rho, t + h) - analytic.logistic_solution(N0, K, rho, t - h)) / (2 * h)
        rate = model_core.derivative(spec, (analytic.logistic_solution(N0, K, rho, t),))[0]
        assert slope == pytest.approx(rate, rel=1e-6, abs=1e-6)


def test_logistic_moves_monotonically_towards_threshold():
    rng = np.random.default_rng(12)
    times = np.linspace(0.0, 15.0, 61)
    for _ in range(300):
        K, rho = rng.uniform(0.5, 20.0), rng.uniform(0.2, 3.0)
        N0 = rng.uniform(0.01, 2.0) * K
        values = np.array([analytic.logistic_solution(N0, K, rho, t) for t in times])
        steps = np.diff(values)
        if N0 < K:
            assert np.all(steps >= 0)
            assert np.all((values >= N0 * (1 - 1e-12)) & (values <= K * (1 + 1e-12)))
        else:
            assert np.all(steps <= 0)
            assert np.all((values <= N0 * (1 + 1e-12)) & (values >= K * (1 - 1e-12)))


def test_logistic_above_threshold_decays_to_it():
    values = [analytic.logistic_solution(15.0, 10.0, 0.5, t) for t in (0.0, 1.0, 5.0, 40.0)]
    assert values == sorted(values, reverse=True)
    assert values[-1] == pytest.approx(10.0, rel=1e-6)


@pytest.mark.parametrize("args, field", [
    ((1.0, 0.0, 1.0, 1.0), "K"),
    ((1.0, 10.0, -1.0, 1.0), "rho"),
    ((-1.0, 10.0, 1.0, 1.0), "N0"),
    ((1.0, 10.0, 1.0, -0.5), "t"),
])
def test_logistic_rejects(args, field):
    with pytest.raises(ParameterOutOfRange) as excinfo:
        analytic.logistic_solution(*args)
    assert excinfo.value.field == field


def test_decoupled_two_player():
    n1, n2 = analytic.decoupled_two_player(0.0, 1.0, 5.0, 10.0, 2.0, 1.0, 3.0)
    assert n1 == 0.0
    assert n2 == pytest.approx(analytic.logistic_solution(1.0, 10.0, 1.0, 3.0))
    with pytest.raises(ParameterOutOfRange):
        analytic.decoupled_two_player(1.0, 1.0, 5.0, 10.0, 2.0, 1.0, 3.0)


def test_zero_interaction_risk_and_return():
    risk = ExponentialCurve(amplitude=2.0, rate=0.5, sign=Sign.GROWTH)
    ret = ExponentialCurve(amplitude=2.0, rate=0.5, sign=Sign.DECAY)
    assert analytic.zero_interaction_risk(risk, 2.0) == pytest.approx(2.0 * math.e)
    assert analytic.zero_interaction_return(ret, 2.0) == pytest.approx(2.0 / math.e)
    assert analytic.zero_interaction_risk(risk, 0.0) == 2.0


def test_risk_times_return_is_constant_for_equal_rates():
    rng = np.random.default_rng(13)
    for _ in range(200):
        rate = rng.uniform(0.01, 2.0)
        A, B = rng.uniform(0.1, 100.0, size=2)
        risk = ExponentialCurve(amplitude=A, rate=rate, sign=Sign.GROWTH)
        ret = ExponentialCurve(amplitude=B, rate=rate, sign=Sign.DECAY)
        for t in rng.uniform(0.0, 20.0, size=5):
            product = analytic.zero_interaction_risk(risk, t) * analytic.zero_interaction_return(ret, t)
            assert product == pytest.approx(A * B, rel=1e-12)


def test_zero_interaction_sign_must_match():
    with pytest.raises(ParameterOutOfRange):
        analytic.zero_interaction_risk(ExponentialCurve(1.0, 1.0, Sign.DECAY), 1.0)
    with pytest.raises(ParameterOutOfRange):
        analytic.zero_interaction_return(ExponentialCurve(1.0, 1.0, Sign.GROWTH), 1.0)


def test_zero_interaction_representability():
    with pytest.raises(Overflow):
        analytic.zero_interaction_risk(ExponentialCurve(1.0, 1.0), 1000.0)
    with pytest.raises(Overflow):
        analytic.zero_interaction_return(ExponentialCurve(1.0, 1.0, Sign.DECAY), 10000.0)


@pytest.mark.parametrize("amplitude, rate", [(0.0, 1.0), (1.0, 0.0), (-2.0, 1.0), (float("nan"), 1.0)])
def test_exponential_curve_bounds(amplitude, rate):
    with pytest.raises(ParameterOutOfRange):
        ExponentialCurve(amplitude, rate)


def test_threshold_constant():
    assert analytic.threshold_constant(math.e) == pytest.approx(1.0)
    assert analytic.threshold_constant(100.0) == pytest.approx(36.787944117144235)
    with pytest.raises(ParameterOutOfRange):
        analytic.threshold_constant(0.0)


def test_sample_curve_shapes():
    times, values = analytic.sample_curve("logistic", 10.0, 11, N0=1.0, K=10.0, rho=1.0)
    np.testing.assert_allclose(times, np.arange(11.0))
    assert values.shape == (11,)
    assert values[0] == pytest.approx(1.0)

    times, values = analytic.sample_curve("decoupled", 5.0, 6, N10=0.0, N20=2.0, K1=1.0, K2=4.0, rho1=1.0, rho2=1.0)
    assert values.shape == (6, 2)
    assert np.all(values[:, 0] == 0.0)

    _, risk = analytic.sample_curve("risk", 1.0, 3, amplitude=1.0, rate=1.0)
    np.testing.assert_allclose(risk, [1.0, math.exp(0.5), math.e])


def test_sample_curve_rejects():
    with pytest.raises(ParameterOutOfRange):
        analytic.sample_curve("gompertz", 1.0, 5)
    with pytest.raises(ParameterOutOfRange):
        analytic.sample_curve("risk", 1.0, 1, amplitude=1.0, rate=1.0)
