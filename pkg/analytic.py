"""Closed-form curves: single-player logistic, zero-interaction risk/return, decision threshold"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from errors import Overflow, ParameterOutOfRange

logger = logging.getLogger('analytic')


class Sign(str, Enum):
    GROWTH = "growth"
    DECAY = "decay"


@dataclass(frozen=True)
class ExponentialCurve:
    amplitude: float
    rate: float
    sign: Sign = Sign.GROWTH

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise ParameterOutOfRange("amplitude", "amplitude > 0", self.amplitude)
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ParameterOutOfRange("rate", "rate > 0", self.rate)


def _require_time(t):
    if not (math.isfinite(t) and t >= 0):
        raise ParameterOutOfRange("t", "t >= 0", t)


def logistic_solution(N0: float, K: float, rho: float, t: float) -> float:
    """N(t) = N0 / (N0/K + (1 - N0/K) e^(-rho t))"""
    if not (math.isfinite(K) and K > 0):
        raise ParameterOutOfRange("K", "K > 0", K)
    if not (math.isfinite(rho) and rho > 0):
        raise ParameterOutOfRange("rho", "rho > 0", rho)
    if not (math.isfinite(N0) and N0 >= 0):
        raise ParameterOutOfRange("N0", "N0 >= 0", N0)
    _require_time(t)

    if N0 == 0:
        return 0.0
    if N0 == K:
        return float(K)
    ratio = N0 / K
    return N0 / (ratio + (1.0 - ratio) * math.exp(-rho * t))


def decoupled_two_player(N10: float, N20: float, K1: float, K2: float,
                         rho1: float, rho2: float, t: float) -> Tuple[float, float]:
    """
    Two-player game where one player starts absent.

    With N10 = 0 the first player stays at zero and the second follows its own
    logistic curve (and symmetrically for N20 = 0).
    """
    if N10 != 0 and N20 != 0:
        raise ParameterOutOfRange("N10, N20", "N10 == 0 or N20 == 0", (N10, N20))
    return logistic_solution(N10, K1, rho1, t), logistic_solution(N20, K2, rho2, t)


def zero_interaction_risk(curve: ExponentialCurve, t: float) -> float:
    """Policyholder risk without insurers: P(t) = A e^(delta t)"""
    if curve.sign is not Sign.GROWTH:
        raise ParameterOutOfRange("sign", "sign == growth", curve.sign.value)
    _require_time(t)
    try:
        value = curve.amplitude * math.exp(curve.rate * t)
    except OverflowError:
        raise Overflow(f"A e^(delta t) overflows at delta t = {curve.rate * t}")
    if not math.isfinite(value):
        raise Overflow(f"A e^(delta t) overflows at delta t = {curve.rate * t}")
    return value


def zero_interaction_return(curve: ExponentialCurve, t: float) -> float:
    """Insurer return without policyholders: R(t) = B e^(-alpha t)"""
    if curve.sign is not Sign.DECAY:
        raise ParameterOutOfRange("sign", "sign == decay", curve.sign.value)
    _require_time(t)
    value = curve.amplitude * math.exp(-curve.rate * t)
    # the return never reaches zero; an underflow is a representability failure
    if value == 0.0:
        raise Overflow(f"B e^(-alpha t) underflows at alpha t = {curve.rate * t}")
    return value


def threshold_constant(limit: float) -> float:
    """K_max/min = A / e, the decision guideline for the zero-interaction curves"""
    if not (math.isfinite(limit) and limit > 0):
        raise ParameterOutOfRange("A", "A > 0", limit)
    return limit / math.e


def sample_curve(kind: str, t_end: float, count: int, **params) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sample a closed-form curve on a uniform grid over [0, t_end].

    kind is one of 'logistic' (N0, K, rho), 'risk' (amplitude, rate),
    'return' (amplitude, rate) or 'decoupled' (N10, N20, K1, K2, rho1, rho2);
    the last one returns a two-column value array.
    """
    _require_time(t_end)
    if count < 2:
        raise ParameterOutOfRange("count", "count >= 2", count)
    times = np.linspace(0.0, t_end, count)

    if kind == "logistic":
        values = [logistic_solution(params["N0"], params["K"], params["rho"], t) for t in times]
    elif kind == "risk":
        curve = ExponentialCurve(params["amplitude"], params["rate"], Sign.GROWTH)
        values = [zero_interaction_risk(curve, t) for t in times]
    elif kind == "return":
        curve = ExponentialCurve(params["amplitude"], params["rate"], Sign.DECAY)
        values = [zero_interaction_return(curve, t) for t in times]
    elif kind == "decoupled":
        values = [
            decoupled_two_player(params["N10"], params["N20"], params["K1"], params["K2"],
                                 params["rho1"], params["rho2"], t)
            for t in times
        ]
    else:
        raise ParameterOutOfRange("kind", "kind in {logistic, risk, return, decoupled}", kind)

    logger.debug(f"Sampled {count} points of the {kind} curve up to t={t_end}")
    return times, np.array(values, dtype=float)
