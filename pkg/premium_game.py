"""
n-player Nash premium game.

The interior equilibrium of an n-player spec is mapped to currency through an
affine PremiumMapping, then compared against market (indifference) premiums.
Players are reported 1-based, as insurers are numbered in market tables.
"""
import io
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

import equilibria
from errors import DimensionMismatch, InvalidConfig, ParameterOutOfRange, ParseError
from model_core import Mode, ModelSpec, NPlayerParams, Variant

logger = logging.getLogger('premium_game')


@dataclass(frozen=True)
class PremiumMapping:
    base: float = 0.0
    scale: float = 300.0
    claim_base: float = 0.0
    claim_scale: float = 1.0
    exposure_weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ParameterOutOfRange("scale", "scale > 0", self.scale)
        if not (math.isfinite(self.claim_scale) and self.claim_scale > 0):
            raise ParameterOutOfRange("claim_scale", "claim_scale > 0", self.claim_scale)

    def weights(self, n: int) -> np.ndarray:
        if self.exposure_weights is None:
            return np.ones(n)
        if len(self.exposure_weights) != n:
            raise DimensionMismatch(f"{len(self.exposure_weights)} exposure weights for {n} players")
        return np.array(self.exposure_weights, dtype=float)


@dataclass(frozen=True)
class GameResult:
    nash_state: Tuple[float, ...]
    nash_premiums: Tuple[float, ...]
    claim_exposures: Tuple[float, ...]
    market_premiums: Optional[Tuple[float, ...]] = None
    at_or_above_market: Optional[Tuple[bool, ...]] = None
    market_exposures: Optional[Tuple[float, ...]] = None

    @property
    def n(self) -> int:
        return len(self.nash_premiums)

    @property
    def below_market_players(self) -> Tuple[int, ...]:
        """1-based players whose Nash premium is strictly below market"""
        if self.market_premiums is None:
            return ()
        return tuple(i + 1 for i, (nash, market) in enumerate(zip(self.nash_premiums, self.market_premiums))
                     if nash < market)

    @property
    def exposures_below_market(self) -> Tuple[int, ...]:
        """1-based players whose claim exposure is strictly below the market claim volume"""
        if self.market_exposures is None:
            return ()
        return tuple(i + 1 for i, (own, market) in enumerate(zip(self.claim_exposures, self.market_exposures))
                     if own < market)

    def to_dict(self):
        association = exposure_premium_association(self) if self.n >= 2 else None
        data = {
            "nash_state": list(self.nash_state),
            "nash_premiums": list(self.nash_premiums),
            "claim_exposures": list(self.claim_exposures),
            "market_premiums": list(self.market_premiums) if self.market_premiums is not None else None,
            "below_market_players": list(self.below_market_players),
            "max_premium_player": association.max_premium_player if association else 1,
            "max_exposure_player": association.max_exposure_player if association else 1,
        }
        if self.market_exposures is not None:
            data["market_exposures"] = list(self.market_exposures)
            data["exposures_below_market"] = list(self.exposures_below_market)
        if association is not None:
            data["association"] = association.to_dict()
        return data


@dataclass(frozen=True)
class Association:
    max_premium_player: int
    max_exposure_player: int
    min_premium_player: int
    correlation: float
    correlation_sign: int
    notes: Tuple[str, ...] = ()

    def to_dict(self):
        return {
            "max_premium_player": self.max_premium_player,
            "max_exposure_player": self.max_exposure_player,
            "min_premium_player": self.min_premium_player,
            "spearman": self.correlation,
            "correlation_sign": self.correlation_sign,
            "notes": list(self.notes),
        }


def symmetric_game(n: int, a: float, mode: Mode = Mode.COMPETITIVE, rho: float = 1.0, K: float = 1.0) -> ModelSpec:
    """n identical players with scaled interaction a between every pair (C = a / K off the diagonal)"""
    if n < 1:
        raise ParameterOutOfRange("n", "n >= 1", n)
    C = tuple(tuple(0.0 if i == j else a / K for j in range(n)) for i in range(n))
    return ModelSpec(Variant.NPLAYER, NPlayerParams(rho=(rho,) * n, K=(K,) * n, C=C, mode=mode))


def nash_premiums(spec: ModelSpec, mapping: PremiumMapping = PremiumMapping()) -> GameResult:
    """Premiums and claim exposures at the interior Nash point of an n-player game"""
    if spec.variant is not Variant.NPLAYER:
        raise InvalidConfig(f"the premium game needs an nplayer spec, got {spec.variant.value}")
    point = equilibria.interior_equilibrium_nplayer(spec)
    u = equilibria.nondimensional_coords(spec, point)

    premiums = mapping.base + mapping.scale * u
    exposures = mapping.claim_base + mapping.claim_scale * mapping.weights(len(u)) * u
    logger.info(f"Nash premiums for {len(u)} players: {np.round(premiums, 4).tolist()}")
    return GameResult(
        nash_state=tuple(float(c) for c in point.coords),
        nash_premiums=tuple(float(v) for v in premiums),
        claim_exposures=tuple(float(v) for v in exposures),
    )


def compare_to_market(result: GameResult, market: Sequence[float]) -> GameResult:
    """Attach market premiums and the per-player nash >= market flags"""
    if len(market) != result.n:
        raise DimensionMismatch(f"{len(market)} market premiums for {result.n} players")
    market = tuple(float(m) for m in market)
    flags = tuple(nash >= m for nash, m in zip(result.nash_premiums, market))
    annotated = replace(result, market_premiums=market, at_or_above_market=flags)
    logger.info(f"Players below market: {list(annotated.below_market_players)}")
    return annotated


def compare_exposures_to_market(result: GameResult, market_exposures: Sequence[float]) -> GameResult:
    """Attach market claim volumes; exposures_below_market lists the players under them"""
    if len(market_exposures) != result.n:
        raise DimensionMismatch(f"{len(market_exposures)} market claim volumes for {result.n} players")
    annotated = replace(result, market_exposures=tuple(float(m) for m in market_exposures))
    logger.info(f"Players with claim exposure below market: {list(annotated.exposures_below_market)}")
    return annotated


def _extreme(values: np.ndarray, label: str, largest: bool, notes: list) -> int:
    target = values.max() if largest else values.min()
    hits = np.flatnonzero(values == target)
    if hits.size > 1:
        notes.append(f"{label} tied between players {[int(h) + 1 for h in hits]}; lowest index reported")
    return int(hits[0]) + 1


def exposure_premium_association(result: GameResult) -> Association:
    """Extremal players and the sign of the Spearman rank correlation of premiums against exposures"""
    if result.n < 2:
        raise DimensionMismatch("association needs at least two players")
    premiums = np.array(result.nash_premiums, dtype=float)
    exposures = np.array(result.claim_exposures, dtype=float)
    notes = []

    max_premium = _extreme(premiums, "max premium", True, notes)
    max_exposure = _extreme(exposures, "max exposure", True, notes)
    min_premium = _extreme(premiums, "min premium", False, notes)

    if np.ptp(premiums) == 0 or np.ptp(exposures) == 0:
        notes.append("constant premiums or exposures: rank correlation undefined, reported as 0")
        rho = 0.0
    else:
        rho = float(stats.spearmanr(premiums, exposures).correlation)
    sign = 0 if rho == 0 else int(math.copysign(1, rho))

    return Association(
        max_premium_player=max_premium,
        max_exposure_player=max_exposure,
        min_premium_player=min_premium,
        correlation=rho,
        correlation_sign=sign,
        notes=tuple(notes),
    )


def _read_player_table(source, required: Sequence[str]) -> pd.DataFrame:
    if isinstance(source, str) and "\n" in source:
        source = io.StringIO(source)
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise ParseError(0, "player", "empty file")
    missing = [column for column in ("player",) + tuple(required) if column not in frame.columns]
    if missing:
        raise ParseError(0, missing[0], "missing column")

    for column in frame.columns:
        for row, cell in enumerate(frame[column], start=1):
            try:
                float(cell)
            except (TypeError, ValueError):
                raise ParseError(row, column, f"not a number: {cell!r}")
    frame = frame.astype(float)

    players = frame["player"].astype(int).tolist()
    if sorted(players) != list(range(1, len(players) + 1)):
        raise ParseError(0, "player", f"players must be numbered 1..n, got {players}")
    return frame.sort_values("player").reset_index(drop=True)


def load_market_csv(source) -> Tuple[Tuple[float, ...], Optional[Tuple[float, ...]]]:
    """Market premiums (and claim volumes, when the column is present) from `player,market_premium[,claim_exposure]`"""
    frame = _read_player_table(source, ("market_premium",))
    premiums = tuple(frame["market_premium"].tolist())
    exposures = tuple(frame["claim_exposure"].tolist()) if "claim_exposure" in frame.columns else None
    logger.info(f"Loaded market premiums for {len(premiums)} players")
    return premiums, exposures


def load_nash_table(source) -> GameResult:
    """A GameResult from a tabulated `player,nash_premium,claim_exposure` file"""
    frame = _read_player_table(source, ("nash_premium", "claim_exposure"))
    return GameResult(
        nash_state=(),
        nash_premiums=tuple(frame["nash_premium"].tolist()),
        claim_exposures=tuple(frame["claim_exposure"].tolist()),
    )
