"""
Steady (Nash) points of the game families.

Two-player nondimensional games list (0,0), (1,0), (0,1) and the interior
point P*; the predator-prey game lists its four critical points, two of
which are not fixed points of the dynamics and carry a nonzero residual.
"""
import logging
import math
from dataclasses import dataclass, asdict, replace
from typing import List, Tuple

import numpy as np

import model_core
from errors import DimensionMismatch, InfeasibleEquilibrium, InvalidConfig, SingularInteraction
from model_core import ModelSpec, Mode, NondimScales, Variant

logger = logging.getLogger('equilibria')

DEFAULT_TOLERANCE = 1e-10
PIVOT_TOLERANCE = 1e-12

ORIGIN = "origin"
AXIS = "axis"
INTERIOR = "interior"
COEXISTENCE = "coexistence"


@dataclass(frozen=True)
class EquilibriumPoint:
    coords: Tuple[float, ...]
    residual: float
    kind: str
    is_true_fixed_point: bool
    name: str = ""
    feasible: bool = True

    def to_dict(self):
        return asdict(self) | {"coords": list(self.coords)}


def verify_fixed_point(spec: ModelSpec, coords, tol: float = DEFAULT_TOLERANCE) -> Tuple[float, bool]:
    """Max-norm of the derivative at coords, and whether it is within tol"""
    rates = model_core.derivative(spec, coords)
    if rates.ndim != 1:
        raise DimensionMismatch(f"expected a single state, got shape {np.shape(coords)}")
    residual = float(np.max(np.abs(rates)))
    return residual, residual <= tol


def _point(spec, coords, kind, tol, name="") -> EquilibriumPoint:
    coords = tuple(float(c) for c in coords)
    residual, ok = verify_fixed_point(spec, coords, tol)
    if not ok:
        logger.warning(f"Candidate {name or kind} {coords} is not a fixed point (residual {residual:.6g})")
    return EquilibriumPoint(
        coords=coords,
        residual=residual,
        kind=kind,
        is_true_fixed_point=ok,
        name=name,
        feasible=all(c >= 0 for c in coords),
    )


def solve_linear(matrix, rhs) -> np.ndarray:
    """Solve M x = b by Gaussian elimination with partial pivoting."""
    a = np.array(matrix, dtype=float)
    b = np.array(rhs, dtype=float)
    n = len(b)
    if a.shape != (n, n):
        raise DimensionMismatch(f"matrix shape {a.shape} does not match rhs length {n}")

    for k in range(n):
        # Row interchange
        p = int(np.argmax(np.abs(a[k:, k]))) + k
        if abs(a[p, k]) < PIVOT_TOLERANCE:
            raise SingularInteraction(f"pivot {a[p, k]:.3g} below {PIVOT_TOLERANCE} in column {k}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]

        # Elimination
        for i in range(k + 1, n):
            if a[i, k] != 0.0:
                lam = a[i, k] / a[k, k]
                a[i, k:] = a[i, k:] - lam * a[k, k:]
                b[i] = b[i] - lam * b[k]

    # Back substitution
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - np.dot(a[k, k + 1:], x[k + 1:])) / a[k, k]
    return x


def interior_point_nondim(a12: float, a21: float, mode: Mode) -> Tuple[float, float]:
    """Closed-form P* of the two-player nondimensional game"""
    det = 1.0 - a12 * a21
    if math.isclose(det, 0.0, abs_tol=PIVOT_TOLERANCE):
        raise SingularInteraction(f"a12 * a21 = 1 (a12={a12}, a21={a21}): interior point undefined")
    if mode is Mode.COMPETITIVE:
        return (1.0 - a12) / det, (1.0 - a21) / det
    return (1.0 + a12) / det, (1.0 + a21) / det


def interior_equilibrium_nplayer(spec: ModelSpec, tol: float = DEFAULT_TOLERANCE) -> EquilibriumPoint:
    """
    Interior Nash point of the n-player game.

    In units u_i = N_i / K_i the steady state solves
    u_i + sum_j a_ij u_j = 1 (competitive) or u_i - sum_j a_ij u_j = 1
    (cooperative), with a_ij = C[i][j] K_j. Coordinates are returned in
    dimensional units N_i = K_i u_i; the residual is measured on u.
    """
    if spec.variant is not Variant.NPLAYER:
        raise InvalidConfig(f"interior_equilibrium_nplayer needs an nplayer spec, got {spec.variant.value}")
    model_core.validate(spec)
    p = spec.params
    K = np.array(p.K, dtype=float)
    A = p.interaction_matrix() * K[np.newaxis, :]
    system = np.eye(p.n) - p.mode.sign * A
    u = solve_linear(system, np.ones(p.n))

    negative = np.flatnonzero(u < 0)
    if negative.size:
        index = int(negative[0])
        logger.warning(f"Interior equilibrium infeasible at component {index}: u={u.tolist()}")
        raise InfeasibleEquilibrium(index, float(u[index]))

    # residual of du_i/dt, the rates in units of K_i
    residual = float(np.max(np.abs(np.array(p.rho) * u * (1.0 - system @ u))))
    ok = residual <= tol
    if not ok:
        logger.warning(f"Interior point u={u.tolist()} is not a fixed point (residual {residual:.6g})")
    return EquilibriumPoint(
        coords=tuple(float(c) for c in K * u),
        residual=residual,
        kind=INTERIOR,
        is_true_fixed_point=ok,
        name="P*",
    )


def nondimensional_coords(spec: ModelSpec, point: EquilibriumPoint) -> np.ndarray:
    """u_i = N_i / K_i for an n-player point"""
    return np.array(point.coords) / np.array(spec.params.K, dtype=float)


def to_dimensional(point: EquilibriumPoint, scales: NondimScales) -> Tuple[float, ...]:
    """Map nondimensional coordinates back through the scale record"""
    if len(point.coords) != len(scales.state_scales):
        raise DimensionMismatch("point and scale record differ in dimension")
    return tuple(u * k for u, k in zip(point.coords, scales.state_scales))


def enumerate_equilibria(spec: ModelSpec, tol: float = DEFAULT_TOLERANCE) -> List[EquilibriumPoint]:
    """List the candidate steady points of the family, each checked against the dynamics"""
    model_core.validate(spec)
    p = spec.params

    if spec.variant is Variant.NONDIM:
        interior = interior_point_nondim(p.a12, p.a21, p.mode)
        points = [
            _point(spec, (0.0, 0.0), ORIGIN, tol, name="(0,0)"),
            _point(spec, (1.0, 0.0), AXIS, tol, name="(1,0)"),
            _point(spec, (0.0, 1.0), AXIS, tol, name="(0,1)"),
            _point(spec, interior, INTERIOR, tol, name="P*"),
        ]

    elif spec.variant in (Variant.COMPETITIVE2, Variant.COOPERATIVE2):
        nondim, scales = model_core.nondimensionalize(p)
        nondim_points = enumerate_equilibria(ModelSpec(Variant.NONDIM, nondim), tol)
        # residual and fixed-point flag are those of the nondimensional point
        points = [replace(point, coords=to_dimensional(point, scales)) for point in nondim_points]

    elif spec.variant is Variant.PREDATOR_PREY:
        points = [
            _point(spec, (0.0, 0.0), ORIGIN, tol, name="predator-prey free"),
            _point(spec, (p.delta / p.alpha, 0.0), AXIS, tol, name="predator free"),
            _point(spec, (0.0, p.delta / p.epsilon), AXIS, tol, name="prey free"),
            _point(spec, (p.beta / p.alpha, p.delta / p.epsilon), COEXISTENCE, tol, name="coexistence"),
        ]

    elif spec.variant is Variant.LOGISTIC:
        points = [
            _point(spec, (0.0,), ORIGIN, tol, name="extinction"),
            _point(spec, (p.K,), INTERIOR, tol, name="threshold"),
        ]

    elif spec.variant is Variant.NPLAYER:
        points = [_point(spec, (0.0,) * p.n, ORIGIN, tol, name="origin")]
        try:
            points.append(interior_equilibrium_nplayer(spec, tol))
        except InfeasibleEquilibrium as e:
            logger.warning(f"No feasible interior point: {e}")

    else:
        raise InvalidConfig(f"no equilibrium catalogue for {spec.variant.value}")

    logger.info(f"Enumerated {len(points)} candidate points for {spec.variant.value}, "
                f"{sum(pt.is_true_fixed_point for pt in points)} genuine")
    return points
