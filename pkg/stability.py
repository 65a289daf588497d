"""
Linear stability of the game equilibria.

Jacobians come from differentiating the implemented dynamics. 2x2 spectra
use the trace/determinant closed form; larger matrices are judged through
the diagonal-dominance and Gershgorin certificates.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import model_core
from equilibria import EquilibriumPoint, interior_point_nondim
from errors import DimensionMismatch, InvalidConfig
from model_core import ModelSpec, Mode, NondimParams, Variant

logger = logging.getLogger('stability')

SADDLE = "saddle"
STABLE_NODE = "stable node"
UNSTABLE_NODE = "unstable node"
STABLE_SPIRAL = "stable spiral"
UNSTABLE_SPIRAL = "unstable spiral"
CENTER = "center"
DEGENERATE = "improper/degenerate"
NON_EQUILIBRIUM = "non-equilibrium-linearization"
# labels for n > 2, where only a certificate is available
STABLE = "stable"
UNSTABLE = "unstable"
UNDETERMINED = "undetermined"

ZERO_TOLERANCE = 1e-12
DOMINANCE_MARGIN = 1e-6
DOMINANCE_MAX_SWEEPS = 10000
DOMINANCE_MAX_WEIGHT = 1e12


class Verdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNDETERMINED = "undetermined"


class RegimeCase(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class JacobianMatrix:
    entries: np.ndarray
    at: Tuple[float, ...]

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatch(f"Jacobian must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise InvalidConfig(f"Jacobian at {self.at} has non-finite entries")
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EigenPair:
    values: Tuple[complex, ...]
    method: str = "closed-form-2x2"

    def as_pairs(self) -> List[List[float]]:
        """Eigenvalues as [re, im] pairs for JSON"""
        return [[float(v.real), float(v.imag)] for v in self.values]


@dataclass(frozen=True)
class StabilityReport:
    point: EquilibriumPoint
    jacobian: JacobianMatrix
    eigen: EigenPair
    classification: str
    verdict: Verdict
    regime_case: Optional[RegimeCase] = None
    notes: str = ""

    def to_dict(self):
        data = self.point.to_dict()
        data.update({
            "classification": self.classification,
            "eigenvalues": self.eigen.as_pairs(),
            "eigen_method": self.eigen.method,
            "stable": self.verdict is Verdict.STABLE,
            "jacobian": self.jacobian.entries.tolist(),
            "notes": self.notes,
        })
        if self.regime_case is not None:
            data["regime_case"] = self.regime_case.value
        return data


def _matrix(J) -> np.ndarray:
    if isinstance(J, JacobianMatrix):
        return J.entries
    m = np.asarray(J, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def jacobian(spec: ModelSpec, coords) -> JacobianMatrix:
    """Analytic Jacobian of the model right-hand side at coords"""
    x = np.asarray(coords, dtype=float)
    if x.shape != (spec.dimension(),):
        raise DimensionMismatch(f"coords have shape {x.shape}, expected ({spec.dimension()},)")
    p = spec.params
    variant = spec.variant

    if variant is Variant.LOGISTIC:
        entries = [[p.rho * (1.0 - 2.0 * x[0] / p.K)]]

    elif variant is Variant.NONDIM:
        s = p.mode.sign
        u1, u2 = x
        entries = [
            [1.0 - 2.0 * u1 + s * p.a12 * u2, s * p.a12 * u1],
            [p.rho * s * p.a21 * u2, p.rho * (1.0 - 2.0 * u2 + s * p.a21 * u1)],
        ]

    elif variant in (Variant.COMPETITIVE2, Variant.COOPERATIVE2):
        s = p.mode.sign
        n1, n2 = x
        entries = [
            [p.rho1 * (1.0 - 2.0 * n1 / p.K1 + s * p.c1 * n2), p.rho1 * s * p.c1 * n1],
            [p.rho2 * s * p.c2 * n2, p.rho2 * (1.0 - 2.0 * n2 / p.K2 + s * p.c2 * n1)],
        ]

    elif variant is Variant.PREDATOR_PREY:
        pr, re = x
        entries = [
            [p.delta - p.epsilon * re, -p.epsilon * pr],
            [p.alpha * re, p.alpha * pr - p.beta],
        ]

    elif variant is Variant.NPLAYER:
        s = p.mode.sign
        rho = np.array(p.rho, dtype=float)
        K = np.array(p.K, dtype=float)
        C = p.interaction_matrix()
        bracket = 1.0 - x / K + s * (C @ x)
        entries = (rho * x)[:, np.newaxis] * s * C
        entries[np.diag_indices(p.n)] = rho * (bracket - x / K)

    else:
        raise InvalidConfig(f"no Jacobian for {variant!r}")

    return JacobianMatrix(np.array(entries, dtype=float), tuple(float(c) for c in x))


def eigenvalues_2x2(J) -> EigenPair:
    """Roots of l^2 - tau l + det = 0 for a 2x2 matrix"""
    m = _matrix(J)
    if m.shape != (2, 2):
        raise DimensionMismatch(f"eigenvalues_2x2 needs a 2x2 matrix, got {m.shape}")
    tau = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = tau * tau - 4.0 * det

    if disc >= 0:
        # larger-magnitude root first, the other from det / root (no cancellation)
        sq = math.sqrt(disc)
        big = 0.5 * (tau + math.copysign(sq, tau) if tau != 0 else sq)
        small = det / big if big != 0 else 0.0
        first, second = (big, small) if big >= small else (small, big)
        values = (complex(first, 0.0), complex(second, 0.0))
    else:
        half_im = 0.5 * math.sqrt(-disc)
        values = (complex(0.5 * tau, half_im), complex(0.5 * tau, -half_im))
    return EigenPair(values=values, method="closed-form-2x2")


def classify(eigen: EigenPair, is_true_fixed_point: bool = True) -> str:
    """Fixed-point class from the linearization spectrum"""
    if not is_true_fixed_point:
        return NON_EQUILIBRIUM
    if eigen.method != "closed-form-2x2" and not eigen.values:
        return UNDETERMINED

    values = eigen.values
    if any(abs(v) <= ZERO_TOLERANCE for v in values):
        return DEGENERATE

    if all(abs(v.imag) <= ZERO_TOLERANCE for v in values):
        reals = [v.real for v in values]
        if all(r < 0 for r in reals):
            return STABLE_NODE
        if all(r > 0 for r in reals):
            return UNSTABLE_NODE
        return SADDLE

    re = values[0].real
    if abs(re) <= ZERO_TOLERANCE:
        return CENTER
    return STABLE_SPIRAL if re < 0 else UNSTABLE_SPIRAL


def regime_case(params: NondimParams) -> RegimeCase:
    """Parameter regime of the two-player game"""
    a12, a21 = params.a12, params.a21
    if params.mode is Mode.COOPERATIVE:
        product = a12 * a21
        if product < 1:
            return RegimeCase.A
        if product > 1:
            return RegimeCase.B
        return RegimeCase.BOUNDARY

    if a12 == 1 or a21 == 1:
        return RegimeCase.BOUNDARY
    if a12 < 1 and a21 < 1:
        return RegimeCase.A
    if a12 > 1 and a21 > 1:
        return RegimeCase.B
    if a12 < 1:
        return RegimeCase.C
    return RegimeCase.D


def cooperative_sign_check(J) -> bool:
    """True when every off-diagonal entry is nonnegative"""
    m = _matrix(J)
    off_diagonal = m[~np.eye(m.shape[0], dtype=bool)]
    return bool(np.all(off_diagonal >= 0))


def negative_diagonal_dominance(J) -> Optional[np.ndarray]:
    """
    Search a weight vector d > 0 with a_ii d_i + sum_{j != i} |a_ij| d_j < 0 for every row.

    Starting from d = 1, each violating row has its weight raised just past
    the level its off-diagonal mass requires. The weights only grow, so the
    sweep either settles on a witness or runs past DOMINANCE_MAX_WEIGHT.
    """
    m = _matrix(J)
    n = m.shape[0]
    diag = np.diag(m)
    if np.any(diag >= 0):
        return None
    off = np.abs(m)
    np.fill_diagonal(off, 0.0)

    d = np.ones(n)
    for sweep in range(DOMINANCE_MAX_SWEEPS):
        violated = False
        for i in range(n):
            mass = float(off[i] @ d)
            if diag[i] * d[i] + mass >= 0:
                d[i] = (1.0 + DOMINANCE_MARGIN) * mass / -diag[i]
                violated = True
        if not violated:
            logger.debug(f"Dominance witness found after {sweep} sweeps")
            return d / d.min()
        if d.max() > DOMINANCE_MAX_WEIGHT:
            break
    return None


def _gershgorin_unstable(m: np.ndarray) -> bool:
    """True when a connected group of Gershgorin discs lies in the open right half-plane"""
    centers = np.diag(m)
    radii = np.abs(m).sum(axis=1) - np.abs(centers)
    lows, highs = centers - radii, centers + radii

    # discs are real-centred intervals on the real axis; group overlapping ones
    order = np.argsort(lows)
    group_low, group_high = lows[order[0]], highs[order[0]]
    for idx in order[1:]:
        if lows[idx] <= group_high:
            group_high = max(group_high, highs[idx])
        else:
            if group_low > 0:
                return True
            group_low, group_high = lows[idx], highs[idx]
    return bool(group_low > 0)


def is_stable_matrix(J) -> Verdict:
    """Stable when every eigenvalue has a strictly negative real part"""
    m = _matrix(J)
    n = m.shape[0]
    if n == 1:
        return Verdict.STABLE if m[0, 0] < 0 else Verdict.UNSTABLE
    if n == 2:
        eigen = eigenvalues_2x2(m)
        return Verdict.STABLE if all(v.real < 0 for v in eigen.values) else Verdict.UNSTABLE

    if negative_diagonal_dominance(m) is not None:
        return Verdict.STABLE
    if np.trace(m) > 0 or _gershgorin_unstable(m):
        return Verdict.UNSTABLE
    return Verdict.UNDETERMINED


def expected_stability(params: NondimParams) -> Dict[Tuple[float, float], str]:
    """
    Stability of (0,0), (1,0), (0,1) and P* that the regime case predicts.

    Values are 'stable', 'unstable' or 'saddle'; points outside the closed
    positive quadrant are left out.
    """
    case = regime_case(params)
    corners = {(0.0, 0.0): UNSTABLE}
    if params.mode is Mode.COMPETITIVE:
        table = {
            RegimeCase.A: {(1.0, 0.0): SADDLE, (0.0, 1.0): SADDLE, "P*": STABLE},
            RegimeCase.B: {(1.0, 0.0): STABLE, (0.0, 1.0): STABLE, "P*": SADDLE},
            RegimeCase.C: {(1.0, 0.0): STABLE, (0.0, 1.0): SADDLE},
            RegimeCase.D: {(1.0, 0.0): SADDLE, (0.0, 1.0): STABLE},
        }
    else:
        table = {
            RegimeCase.A: {(1.0, 0.0): SADDLE, (0.0, 1.0): SADDLE, "P*": STABLE},
            RegimeCase.B: {(1.0, 0.0): SADDLE, (0.0, 1.0): SADDLE},
        }
    for key, label in table.get(case, {}).items():
        if key == "P*":
            key = interior_point_nondim(params.a12, params.a21, params.mode)
        corners[tuple(key)] = label
    return corners


def _coarse(classification: str) -> str:
    if classification in (STABLE_NODE, STABLE_SPIRAL, STABLE):
        return STABLE
    if classification == SADDLE:
        return SADDLE
    if classification in (UNSTABLE_NODE, UNSTABLE_SPIRAL, UNSTABLE):
        return UNSTABLE
    return classification


def analyze(spec: ModelSpec, points: Sequence[EquilibriumPoint]) -> List[StabilityReport]:
    """One stability report per candidate point"""
    case = None
    expected = {}
    scaled = None
    if spec.variant is Variant.NONDIM:
        case = regime_case(spec.params)
        if case is not RegimeCase.BOUNDARY:
            expected = expected_stability(spec.params)
    elif spec.variant in (Variant.COMPETITIVE2, Variant.COOPERATIVE2):
        nondim, scales = model_core.nondimensionalize(spec.params)
        case = regime_case(nondim)
        scaled = ModelSpec(Variant.NONDIM, nondim), scales

    reports = []
    for point in points:
        J = jacobian(spec, point.coords)
        judged = J
        if scaled is not None:
            # J = time_scale * S J_u S^-1 with S = diag(K1, K2)
            nondim_spec, scales = scaled
            u = np.array(point.coords) / np.array(scales.state_scales)
            judged = JacobianMatrix(scales.time_scale * jacobian(nondim_spec, u).entries, J.at)
        notes = []
        if J.size == 2:
            eigen = eigenvalues_2x2(judged)
            classification = classify(eigen, point.is_true_fixed_point)
        elif J.size == 1:
            value = complex(J.entries[0, 0], 0.0)
            eigen = EigenPair(values=(value,), method="closed-form-2x2")
            classification = classify(eigen, point.is_true_fixed_point)
        else:
            eigen = EigenPair(values=(), method="certificate")
            certificate = is_stable_matrix(J)
            classification = certificate.value if point.is_true_fixed_point else NON_EQUILIBRIUM

        verdict = is_stable_matrix(judged) if point.is_true_fixed_point else Verdict.UNDETERMINED

        if not point.is_true_fixed_point:
            formal = classify(eigen, True) if eigen.values else UNDETERMINED
            notes.append(f"residual {point.residual:.6g}; formal linearization reads {formal}, "
                         "no stability claim is made")
        if not point.feasible:
            notes.append("outside the nonnegative orthant")
        claimed = next((label for key, label in expected.items()
                        if np.allclose(key, point.coords, atol=1e-12)), None)
        if claimed is not None and point.is_true_fixed_point and _coarse(classification) != claimed:
            notes.append(f"regime {case.value} predicts {claimed}, computed {classification}")
            logger.warning(f"Point {point.coords}: regime {case.value} predicts {claimed}, got {classification}")

        reports.append(StabilityReport(
            point=point,
            jacobian=J,
            eigen=eigen,
            classification=classification,
            verdict=verdict,
            regime_case=case,
            notes="; ".join(notes),
        ))
    return reports
