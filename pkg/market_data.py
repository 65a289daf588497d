"""Annual premium/claim series: loading, per-year OLS slopes and the premium-claim report"""
import io
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from errors import DegenerateDesign, EmptySeries, InvalidConfig, NonMonotoneYears, ParseError

logger = logging.getLogger('market_data')

HEADER = ("year", "net_written_premium", "net_claims_incurred")
FIELDS = {"premiums": "net_written_premium", "claims": "net_claims_incurred"}


@dataclass(frozen=True)
class MarketSeries:
    years: Tuple[int, ...]
    premiums: Tuple[float, ...]
    claims: Tuple[float, ...]

    def __post_init__(self):
        if not (len(self.years) == len(self.premiums) == len(self.claims)):
            raise EmptySeries("years, premiums and claims differ in length")
        if len(self.years) < 2:
            raise EmptySeries(f"a series needs at least 2 observations, got {len(self.years)}")
        for earlier, later in zip(self.years, self.years[1:]):
            if not later > earlier:
                raise NonMonotoneYears(f"year {later} follows {earlier}")

    @property
    def n(self) -> int:
        return len(self.years)

    def field(self, name: str) -> np.ndarray:
        if name not in FIELDS:
            raise InvalidConfig(f"unknown field {name!r}, expected one of {sorted(FIELDS)}")
        return np.array(getattr(self, name), dtype=float)


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    n: int

    def predict(self, years) -> np.ndarray:
        return self.intercept + self.slope * np.asarray(years, dtype=float)

    def to_dict(self):
        return {"slope": self.slope, "intercept": self.intercept, "n": self.n}


def load_series(source) -> MarketSeries:
    """
    Parse a `year,net_written_premium,net_claims_incurred` CSV.

    source is a path, an open file, or the CSV text itself (any string
    containing a newline is taken as text). Rows are numbered from 1 after
    the header in parse errors.
    """
    if isinstance(source, str) and "\n" in source:
        source = io.StringIO(source)
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise EmptySeries("no header and no rows")

    columns = tuple(c.strip() for c in frame.columns)
    if columns != HEADER:
        raise ParseError(0, ",".join(columns), f"expected header {','.join(HEADER)}")
    if frame.empty:
        raise EmptySeries("header only, no observations")

    parsed: Dict[str, List[float]] = {column: [] for column in HEADER}
    for row, record in enumerate(frame.itertuples(index=False), start=1):
        for column, cell in zip(HEADER, record):
            text = str(cell).strip()
            try:
                value = int(text) if column == "year" else float(text)
            except ValueError:
                raise ParseError(row, column, f"not a number: {text!r}")
            if column != "year" and not np.isfinite(value):
                raise ParseError(row, column, f"not finite: {text!r}")
            parsed[column].append(value)

    series = MarketSeries(
        years=tuple(parsed["year"]),
        premiums=tuple(parsed["net_written_premium"]),
        claims=tuple(parsed["net_claims_incurred"]),
    )
    logger.info(f"Loaded {series.n} observations, {series.years[0]}-{series.years[-1]}")
    return series


def ols_slope(series: MarketSeries, field: str) -> RegressionResult:
    """Least-squares line of the field against calendar year, computed in centred form"""
    x = np.array(series.years, dtype=float)
    y = series.field(field)
    x_bar, y_bar = x.mean(), y.mean()
    dx = x - x_bar
    sxx = float(dx @ dx)
    if sxx == 0:
        raise DegenerateDesign("all years are equal")
    slope = float(dx @ (y - y_bar)) / sxx
    intercept = float(y_bar - slope * x_bar)
    logger.debug(f"OLS {field}: slope={slope:.6g}, intercept={intercept:.6g}")
    return RegressionResult(slope=slope, intercept=intercept, n=series.n)


def plot_csv(series: MarketSeries) -> pd.DataFrame:
    """The `year,premium,claim` table behind the premium-claim chart"""
    return pd.DataFrame({
        "year": list(series.years),
        "premium": list(series.premiums),
        "claim": list(series.claims),
    })


@dataclass(frozen=True)
class PremiumClaimReport:
    premium: RegressionResult
    claim: RegressionResult
    correlation: float
    correlation_sign: int
    premiums_exceed_claims: bool
    rows: Tuple[Tuple[int, float, float, float, float], ...]

    def to_dict(self):
        return {
            "premium_slope": self.premium.slope,
            "claim_slope": self.claim.slope,
            "premium_regression": self.premium.to_dict(),
            "claim_regression": self.claim.to_dict(),
            "intercept_note": "intercepts are the fitted values at calendar year 0",
            "pearson": self.correlation,
            "correlation_sign": self.correlation_sign,
            "premiums_exceed_claims": self.premiums_exceed_claims,
            "years": [
                {"year": year, "premium": premium, "claim": claim,
                 "premium_fit": premium_fit, "claim_fit": claim_fit}
                for year, premium, claim, premium_fit, claim_fit in self.rows
            ],
        }


def premium_claim_report(series: MarketSeries) -> PremiumClaimReport:
    """Both time regressions plus the Pearson co-movement of premiums and claims"""
    premium = ols_slope(series, "premiums")
    claim = ols_slope(series, "claims")

    premiums = series.field("premiums")
    claims = series.field("claims")
    if np.ptp(premiums) == 0 or np.ptp(claims) == 0:
        logger.warning("Constant premiums or claims: correlation undefined, reported as 0")
        correlation = 0.0
    else:
        correlation = float(stats.pearsonr(premiums, claims)[0])
    sign = 0 if correlation == 0 else (1 if correlation > 0 else -1)

    premium_fit = premium.predict(series.years)
    claim_fit = claim.predict(series.years)
    rows = tuple(
        (int(year), float(p), float(c), float(pf), float(cf))
        for year, p, c, pf, cf in zip(series.years, premiums, claims, premium_fit, claim_fit)
    )
    logger.info(f"Premium slope {premium.slope:.4f}, claim slope {claim.slope:.4f}, pearson {correlation:.4f}")
    return PremiumClaimReport(
        premium=premium,
        claim=claim,
        correlation=correlation,
        correlation_sign=sign,
        premiums_exceed_claims=bool(np.all(premiums > claims)),
        rows=rows,
    )
