"""
Lotka-Volterra game models.

Five families share one right-hand side evaluator:

    logistic          dN/dt  = rho N (1 - N/K)
    two-player        dNi/dt = rho_i Ni (1 - Ni/Ki -/+ c_i Nj)
    nondimensional    du1/dT = u1 (1 - u1 -/+ a12 u2)
                      du2/dT = rho u2 (1 - u2 -/+ a21 u1)
    predator-prey     dp/dt  = delta p - epsilon p r
                      dr/dt  = alpha p r - beta r
    n-player          dNi/dt = rho_i Ni (1 - Ni/Ki -/+ sum_j C[i][j] Nj)

The minus sign is the competitive game, the plus sign the cooperative one.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Tuple

import numpy as np

from errors import DimensionMismatch, InvalidConfig, ParameterOutOfRange

logger = logging.getLogger('model_core')


class Mode(str, Enum):
    COMPETITIVE = "competitive"
    COOPERATIVE = "cooperative"

    @property
    def sign(self) -> float:
        """Sign of the interaction term in the growth bracket"""
        return -1.0 if self is Mode.COMPETITIVE else 1.0


class Variant(str, Enum):
    LOGISTIC = "logistic"
    COMPETITIVE2 = "competitive2"
    COOPERATIVE2 = "cooperative2"
    PREDATOR_PREY = "predator-prey"
    NPLAYER = "nplayer"
    NONDIM = "nondim"


@dataclass(frozen=True)
class LogisticParams:
    rho: float
    K: float


@dataclass(frozen=True)
class Competitive2Params:
    rho1: float
    rho2: float
    K1: float
    K2: float
    c1: float
    c2: float

    @property
    def mode(self) -> Mode:
        return Mode.COMPETITIVE


@dataclass(frozen=True)
class Cooperative2Params(Competitive2Params):
    @property
    def mode(self) -> Mode:
        return Mode.COOPERATIVE


@dataclass(frozen=True)
class NondimParams:
    a12: float
    a21: float
    rho: float
    mode: Mode = Mode.COMPETITIVE


@dataclass(frozen=True)
class NondimScales:
    """Scale record of a nondimensionalization: T = time_scale * t, u_i = N_i / state_scales[i]"""
    time_scale: float
    state_scales: Tuple[float, ...]


@dataclass(frozen=True)
class PredatorPreyParams:
    delta: float
    epsilon: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class NPlayerParams:
    rho: Tuple[float, ...]
    K: Tuple[float, ...]
    C: Tuple[Tuple[float, ...], ...]
    mode: Mode = Mode.COMPETITIVE

    @property
    def n(self) -> int:
        return len(self.rho)

    def interaction_matrix(self) -> np.ndarray:
        return np.array(self.C, dtype=float).reshape(self.n, self.n)


PARAMS_BY_VARIANT = {
    Variant.LOGISTIC: LogisticParams,
    Variant.COMPETITIVE2: Competitive2Params,
    Variant.COOPERATIVE2: Cooperative2Params,
    Variant.PREDATOR_PREY: PredatorPreyParams,
    Variant.NPLAYER: NPlayerParams,
    Variant.NONDIM: NondimParams,
}


@dataclass(frozen=True)
class ModelSpec:
    variant: Variant
    params: object

    def dimension(self) -> int:
        if self.variant is Variant.LOGISTIC:
            return 1
        if self.variant is Variant.NPLAYER:
            return self.params.n
        return 2

    @property
    def mode(self):
        """Interaction mode, or None for the logistic and predator-prey families"""
        return getattr(self.params, "mode", None)


# A spec that went through validate(); kept as an alias so signatures read like the contract.
ValidatedModelSpec = ModelSpec


def _require_positive(field, value):
    if not (math.isfinite(value) and value > 0):
        raise ParameterOutOfRange(field, f"{field} > 0", value)


def validate(spec: ModelSpec) -> ValidatedModelSpec:
    """Check every parameter bound of the spec and return it unchanged"""
    expected = PARAMS_BY_VARIANT.get(spec.variant)
    if expected is None or type(spec.params) is not expected:
        raise InvalidConfig(
            f"variant {spec.variant} expects {expected.__name__ if expected else '?'}, "
            f"got {type(spec.params).__name__}"
        )

    p = spec.params
    if spec.variant is Variant.LOGISTIC:
        _require_positive("rho", p.rho)
        _require_positive("K", p.K)

    elif spec.variant in (Variant.COMPETITIVE2, Variant.COOPERATIVE2):
        for field in ("rho1", "rho2", "K1", "K2", "c1", "c2"):
            _require_positive(field, getattr(p, field))

    elif spec.variant is Variant.NONDIM:
        for field in ("a12", "a21", "rho"):
            _require_positive(field, getattr(p, field))
        if not isinstance(p.mode, Mode):
            raise InvalidConfig(f"unknown mode {p.mode!r}")

    elif spec.variant is Variant.PREDATOR_PREY:
        for field in ("delta", "epsilon", "alpha", "beta"):
            value = getattr(p, field)
            if not (math.isfinite(value) and 0 < value <= 1):
                raise ParameterOutOfRange(field, f"0 < {field} <= 1", value)
        if not p.delta > p.beta:
            raise ParameterOutOfRange("delta", "delta > beta", p.delta)
        # alpha == epsilon is admitted
        if not p.alpha >= p.epsilon:
            raise ParameterOutOfRange("alpha", "alpha >= epsilon", p.alpha)

    elif spec.variant is Variant.NPLAYER:
        n = p.n
        if n < 1:
            raise ParameterOutOfRange("n", "n >= 1", n)
        if len(p.K) != n:
            raise DimensionMismatch(f"K has {len(p.K)} entries, expected {n}")
        if len(p.C) != n or any(len(row) != n for row in p.C):
            raise DimensionMismatch(f"interaction matrix must be {n}x{n}")
        for i in range(n):
            _require_positive(f"rho[{i}]", p.rho[i])
            _require_positive(f"K[{i}]", p.K[i])
            for j in range(n):
                value = p.C[i][j]
                if i == j:
                    if value != 0:
                        raise ParameterOutOfRange(f"C[{i}][{i}]", "diagonal == 0", value)
                elif not (math.isfinite(value) and value >= 0):
                    raise ParameterOutOfRange(f"C[{i}][{j}]", f"C[{i}][{j}] >= 0", value)
        if not isinstance(p.mode, Mode):
            raise InvalidConfig(f"unknown mode {p.mode!r}")

    logger.debug(f"Validated {spec.variant.value} spec")
    return spec


def rate_function(spec: ValidatedModelSpec) -> Callable[[np.ndarray], np.ndarray]:
    """
    Build the right-hand side of the spec as a vectorized callable.

    The callable accepts an array whose last axis is the state, so a stack of
    states (one per row) is evaluated in one call. Only elementwise operations
    are used; a row gives the same bits whether evaluated alone or in a stack.
    """
    p = spec.params
    variant = spec.variant

    if variant is Variant.LOGISTIC:
        rho, K = p.rho, p.K

        def rhs(x):
            n = x[..., 0]
            return (rho * n * (1.0 - n / K))[..., np.newaxis]

    elif variant in (Variant.COMPETITIVE2, Variant.COOPERATIVE2):
        s = p.mode.sign
        rho1, rho2, K1, K2, c1, c2 = p.rho1, p.rho2, p.K1, p.K2, p.c1, p.c2

        def rhs(x):
            n1, n2 = x[..., 0], x[..., 1]
            return np.stack((
                rho1 * n1 * (1.0 - n1 / K1 + s * c1 * n2),
                rho2 * n2 * (1.0 - n2 / K2 + s * c2 * n1),
            ), axis=-1)

    elif variant is Variant.NONDIM:
        s = p.mode.sign
        a12, a21, rho = p.a12, p.a21, p.rho

        def rhs(x):
            u1, u2 = x[..., 0], x[..., 1]
            return np.stack((
                u1 * (1.0 - u1 + s * a12 * u2),
                rho * u2 * (1.0 - u2 + s * a21 * u1),
            ), axis=-1)

    elif variant is Variant.PREDATOR_PREY:
        delta, epsilon, alpha, beta = p.delta, p.epsilon, p.alpha, p.beta

        def rhs(x):
            pr, re = x[..., 0], x[..., 1]
            return np.stack((
                delta * pr - epsilon * pr * re,
                alpha * pr * re - beta * re,
            ), axis=-1)

    elif variant is Variant.NPLAYER:
        s = p.mode.sign
        rho = np.array(p.rho, dtype=float)
        K = np.array(p.K, dtype=float)
        C = p.interaction_matrix()
        n = p.n

        def rhs(x):
            coupling = np.zeros_like(x)
            for j in range(n):
                coupling = coupling + np.multiply.outer(x[..., j], C[:, j])
            return rho * x * (1.0 - x / K + s * coupling)

    else:
        raise InvalidConfig(f"unknown variant {variant!r}")

    return rhs


def _as_state(spec: ModelSpec, state) -> np.ndarray:
    x = np.asarray(state, dtype=float)
    dim = spec.dimension()
    if x.ndim == 0 or x.shape[-1] != dim:
        raise DimensionMismatch(f"state has shape {x.shape}, expected last axis {dim}")
    return x


def derivative(spec: ValidatedModelSpec, state) -> np.ndarray:
    """Evaluate dN/dt (dP/dt, dR/dt or du/dT) at the state"""
    x = _as_state(spec, state)
    return rate_function(spec)(x)


def nondimensionalize(params: Competitive2Params) -> Tuple[NondimParams, NondimScales]:
    """
    Rescale a two-player game: u_i = N_i / K_i, T = rho1 t.

    Gives a12 = c1 K2, a21 = c2 K1 and the rate ratio rho = rho2 / rho1
    (the chain rule on du2/dT forces the ratio, not the product).
    """
    variant = Variant.COOPERATIVE2 if isinstance(params, Cooperative2Params) else Variant.COMPETITIVE2
    validate(ModelSpec(variant, params))
    nondim = NondimParams(
        a12=params.c1 * params.K2,
        a21=params.c2 * params.K1,
        rho=params.rho2 / params.rho1,
        mode=params.mode,
    )
    scales = NondimScales(time_scale=params.rho1, state_scales=(params.K1, params.K2))
    logger.debug(f"Nondimensionalized {variant.value}: {nondim}")
    return nondim, scales
