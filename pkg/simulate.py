"""
Fixed-step RK4 integration, phase portraits and attractor detection.

Trajectories of a portrait are integrated as one stacked array; the model
right-hand sides are elementwise, so every row evolves exactly as it would
alone. Chunks of the grid can be handed to worker threads and the results
are reassembled in grid order.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

import model_core
from equilibria import EquilibriumPoint
from errors import DimensionMismatch, InvalidConfig, NonPositiveState
from model_core import ModelSpec, PredatorPreyParams

logger = logging.getLogger('simulate')

DIVERGENT = "divergent"
UNDECIDED = "undecided"


class TrajectoryStatus(str, Enum):
    COMPLETED = "completed"
    BLOWUP = "blowup"
    INVALID = "invalid"


@dataclass(frozen=True)
class IntegrationConfig:
    t_end: float = 100.0
    step: float = 1e-3
    blowup_threshold: float = 1e9
    seed: Optional[int] = None
    jitter: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise InvalidConfig(f"t_end must be > 0, got {self.t_end}")
        if not (math.isfinite(self.step) and 0 < self.step <= self.t_end):
            raise InvalidConfig(f"step must satisfy 0 < step <= t_end, got {self.step}")
        if not (self.blowup_threshold > 0):
            raise InvalidConfig(f"blowup_threshold must be > 0, got {self.blowup_threshold}")
        if self.jitter < 0:
            raise InvalidConfig(f"jitter must be >= 0, got {self.jitter}")
        if self.jitter > 0 and self.seed is None:
            raise InvalidConfig("jitter needs an explicit seed")
        if not math.isclose(self.end_time, self.t_end, rel_tol=1e-9):
            logger.warning(f"t_end {self.t_end:g} is not a multiple of step {self.step:g}; "
                           f"the grid ends at t={self.end_time:.6g}")

    @property
    def steps(self) -> int:
        return int(math.floor(self.t_end / self.step + 1e-9))

    @property
    def end_time(self) -> float:
        """Last time on the grid, steps * step"""
        return self.steps * self.step


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    status: TrajectoryStatus
    blowup_time: Optional[float] = None

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class PortraitGrid:
    """Either a lattice (ranges + counts per axis) or an explicit list of initial conditions"""
    ranges: Tuple[Tuple[float, float], ...] = ()
    counts: Tuple[int, ...] = ()
    points: Tuple[Tuple[float, ...], ...] = ()

    def __post_init__(self):
        if self.points:
            return
        if not self.ranges or len(self.ranges) != len(self.counts):
            raise InvalidConfig("grid needs one (low, high) range and one count per axis")
        for (low, high), count in zip(self.ranges, self.counts):
            if count < 1:
                raise InvalidConfig(f"grid counts must be >= 1, got {count}")
            if count > 1 and not high > low:
                raise InvalidConfig(f"grid range ({low}, {high}) needs positive width")

    def initial_conditions(self) -> List[Tuple[float, ...]]:
        """Row-major over the axes (first axis slowest)"""
        if self.points:
            return [tuple(float(c) for c in pt) for pt in self.points]
        axes = [
            np.linspace(low, high, count) if count > 1 else np.array([low], dtype=float)
            for (low, high), count in zip(self.ranges, self.counts)
        ]
        return [tuple(float(c) for c in combo) for combo in itertools.product(*axes)]


def _rk4_run(spec: ModelSpec, initials: np.ndarray, config: IntegrationConfig) -> List[Trajectory]:
    """Integrate a stack of initial conditions (one per row) with classical RK4"""
    rhs = model_core.rate_function(spec)
    h = config.step
    steps = config.steps
    threshold = config.blowup_threshold
    count = initials.shape[0]

    x = initials.copy()
    history = np.empty((steps + 1,) + x.shape)
    history[0] = x
    active = np.ones(count, dtype=bool)
    last_index = np.full(count, steps)
    blowup_time = [None] * count

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            rows = np.flatnonzero(active)
            xa = x[rows] if rows.size != count else x
            k1 = rhs(xa)
            k2 = rhs(xa + 0.5 * h * k1)
            k3 = rhs(xa + 0.5 * h * k2)
            k4 = rhs(xa + h * k3)
            new = xa + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

            bad = ~np.all(np.isfinite(new), axis=1) | (np.max(np.abs(new), axis=1) > threshold)
            if bad.any():
                for row in rows[bad]:
                    active[row] = False
                    last_index[row] = k
                    blowup_time[row] = (k + 1) * h
                    logger.debug(f"Row {row} left the blow-up bound at t={(k + 1) * h:.6g}")
                good = rows[~bad]
                x[good] = new[~bad]
            elif rows.size == count:
                x = new
            else:
                x[rows] = new
            history[k + 1] = x
            if not active.any():
                break

    times = np.arange(steps + 1) * h
    trajectories = []
    for row in range(count):
        end = last_index[row] + 1
        status = TrajectoryStatus.COMPLETED if blowup_time[row] is None else TrajectoryStatus.BLOWUP
        trajectories.append(Trajectory(
            times=times[:end].copy(),
            states=history[:end, row, :].copy(),
            status=status,
            blowup_time=blowup_time[row],
        ))
    return trajectories


def _invalid(initial: np.ndarray) -> Trajectory:
    return Trajectory(
        times=np.empty(0),
        states=np.empty((0, initial.shape[-1])),
        status=TrajectoryStatus.INVALID,
    )


def _check_initials(spec: ModelSpec, initials) -> np.ndarray:
    x = np.atleast_2d(np.asarray(initials, dtype=float))
    if x.ndim != 2 or x.shape[1] != spec.dimension():
        raise DimensionMismatch(f"initial state shape {np.shape(initials)} does not match dimension {spec.dimension()}")
    return x


def integrate(spec: ModelSpec, initial, config: IntegrationConfig = IntegrationConfig()) -> Trajectory:
    """Single RK4 trajectory from initial; blow-up ends it early with status blowup"""
    model_core.validate(spec)
    x = _check_initials(spec, initial)
    if x.shape[0] != 1:
        raise DimensionMismatch(f"integrate takes one initial state, got {x.shape[0]}")
    if not (np.all(np.isfinite(x)) and np.all(x >= 0)):
        logger.warning(f"Initial state {x[0].tolist()} is not finite and nonnegative")
        return _invalid(x[0])

    trajectory = _rk4_run(spec, x, config)[0]
    if trajectory.status is TrajectoryStatus.BLOWUP:
        logger.warning(f"Trajectory from {x[0].tolist()} blew up at t={trajectory.blowup_time:.6g}")
    return trajectory


def jittered(initials: np.ndarray, config: IntegrationConfig) -> np.ndarray:
    """Uniform jitter of the initial conditions, clipped at zero"""
    if config.jitter == 0:
        return initials
    rng = np.random.default_rng(config.seed)
    shifted = initials + rng.uniform(-config.jitter, config.jitter, size=initials.shape)
    return np.clip(shifted, 0.0, None)


def phase_portrait(spec: ModelSpec, grid: PortraitGrid, config: IntegrationConfig = IntegrationConfig(),
                   workers: int = 1) -> List[Trajectory]:
    """One trajectory per grid initial condition, in row-major grid order"""
    model_core.validate(spec)
    conditions = grid.initial_conditions()
    if not conditions:
        raise InvalidConfig("portrait grid is empty")
    initials = jittered(_check_initials(spec, conditions), config)

    valid = np.all(np.isfinite(initials), axis=1) & np.all(initials >= 0, axis=1)
    results: List[Optional[Trajectory]] = [None] * len(initials)
    for row in np.flatnonzero(~valid):
        results[row] = _invalid(initials[row])

    rows = np.flatnonzero(valid)
    workers = max(1, int(workers))
    chunks = [chunk for chunk in np.array_split(rows, min(workers, max(rows.size, 1))) if chunk.size]
    logger.info(f"Integrating {rows.size} portrait trajectories in {len(chunks)} chunk(s)")

    if len(chunks) <= 1:
        batches = [_rk4_run(spec, initials[chunk], config) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            batches = list(executor.map(lambda chunk: _rk4_run(spec, initials[chunk], config), chunks))

    for chunk, batch in zip(chunks, batches):
        for row, trajectory in zip(chunk, batch):
            results[row] = trajectory
    return results


def detect_attractor(traj: Trajectory, candidates: Sequence[EquilibriumPoint],
                     tol: float = 1e-3) -> Union[int, str]:
    """
    Index of the candidate the trajectory settles on, or 'divergent' / 'undecided'.

    Settling means the final state is within tol of the nearest candidate and
    the last 10% of samples all stay within tol of it.
    """
    if traj.status is TrajectoryStatus.BLOWUP:
        return DIVERGENT
    if traj.status is TrajectoryStatus.INVALID or not len(candidates) or not len(traj.states):
        return UNDECIDED

    coords = np.array([c.coords for c in candidates], dtype=float)
    distances = np.linalg.norm(coords - traj.final_state, axis=1)
    nearest = int(np.argmin(distances))
    if distances[nearest] > tol:
        return UNDECIDED

    tail = max(1, int(math.ceil(0.1 * len(traj.states))))
    tail_distances = np.linalg.norm(traj.states[-tail:] - coords[nearest], axis=1)
    if np.all(tail_distances <= tol):
        return nearest
    return UNDECIDED


def first_integral(states: np.ndarray, params: PredatorPreyParams) -> np.ndarray:
    """H(p, r) = alpha p - beta ln p + epsilon r - delta ln r"""
    p, r = states[..., 0], states[..., 1]
    return params.alpha * p - params.beta * np.log(p) + params.epsilon * r - params.delta * np.log(r)


def first_integral_drift(traj: Trajectory, params: PredatorPreyParams) -> float:
    """Max |H(t) - H(0)| along a predator-prey trajectory"""
    states = np.asarray(traj.states, dtype=float)
    if states.ndim != 2 or states.shape[1] != 2:
        raise DimensionMismatch(f"predator-prey trajectory needs two columns, got shape {states.shape}")
    if not np.all(states > 0):
        raise NonPositiveState("first integral needs strictly positive states")
    H = first_integral(states, params)
    return float(np.max(np.abs(H - H[0])))
