import numpy as np
import pytest
from scipy import stats

import market_data
from errors import DegenerateDesign, EmptySeries, InvalidConfig, NonMonotoneYears, ParseError
from market_data import MarketSeries

HEADER_LINE = "year,net_written_premium,net_claims_incurred\n"


@pytest.fixture
def series(fixture_path):
    return market_data.load_series(fixture_path("market_series.csv"))


def test_load_fixture(series):
    assert series.n == 14
    assert series.years[0] == 2008
    assert series.years[-1] == 2021
    assert series.premiums[0] == 5753
    assert series.claims[0] == 3296


def test_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(EmptySeries):
        market_data.load_series(str(path))


def test_header_only():
    with pytest.raises(EmptySeries):
        market_data.load_series(HEADER_LINE)


def test_single_row_is_too_short():
    with pytest.raises(EmptySeries):
        market_data.load_series(HEADER_LINE + "2008,1,1\n")


def test_repeated_year():
    with pytest.raises(NonMonotoneYears):
        market_data.load_series(HEADER_LINE + "2008,1,1\n2008,2,2\n")


def test_bad_cell_reports_position():
    with pytest.raises(ParseError) as excinfo:
        market_data.load_series(HEADER_LINE + "2008,1,1\n2009,n/a,2\n")
    assert excinfo.value.row == 2
    assert excinfo.value.column == "net_written_premium"


def test_wrong_header():
    with pytest.raises(ParseError) as excinfo:
        market_data.load_series("year,premium,claims\n2008,1,1\n2009,2,2\n")
    assert excinfo.value.row == 0


def test_unknown_field(series):
    with pytest.raises(InvalidConfig):
        series.field("losses")


def test_fixture_slopes(series):
    assert market_data.ols_slope(series, "premiums").slope == pytest.approx(-130.1648, abs=0.05)
    assert market_data.ols_slope(series, "claims").slope == pytest.approx(-15.187, abs=0.05)


def test_slopes_match_scipy(series):
    for field in ("premiums", "claims"):
        ours = market_data.ols_slope(series, field)
        ref = stats.linregress(series.years, series.field(field))
        assert ours.slope == pytest.approx(ref.slope, rel=1e-10)
        assert ours.intercept == pytest.approx(ref.intercept, rel=1e-10)


def test_constant_series_has_zero_slope():
    series = market_data.load_series(HEADER_LINE + "2000,7,3\n2001,7,3\n2002,7,3\n")
    result = market_data.ols_slope(series, "premiums")
    assert result.slope == 0.0
    assert result.intercept == pytest.approx(7.0)


def test_two_points_give_the_secant():
    series = MarketSeries(years=(2000, 2004), premiums=(10.0, 30.0), claims=(1.0, 1.0))
    assert market_data.ols_slope(series, "premiums").slope == pytest.approx(5.0)


def test_residuals_are_orthogonal(series):
    x = np.array(series.years, dtype=float)
    for field in ("premiums", "claims"):
        result = market_data.ols_slope(series, field)
        residuals = series.field(field) - result.predict(x)
        assert abs(residuals.sum()) <= 1e-6
        assert abs(residuals @ (x - x.mean())) <= 1e-6


def test_slope_is_affine_equivariant(series):
    base = market_data.ols_slope(series, "premiums").slope
    scaled = MarketSeries(
        years=series.years,
        premiums=tuple(3.0 * p + 100.0 for p in series.premiums),
        claims=series.claims,
    )
    assert market_data.ols_slope(scaled, "premiums").slope == pytest.approx(3.0 * base, rel=1e-12)


def test_degenerate_design():
    series = object.__new__(MarketSeries)
    object.__setattr__(series, "years", (2000, 2000))
    object.__setattr__(series, "premiums", (1.0, 2.0))
    object.__setattr__(series, "claims", (1.0, 2.0))
    with pytest.raises(DegenerateDesign):
        market_data.ols_slope(series, "premiums")


def test_premium_claim_report(series):
    report = market_data.premium_claim_report(series)
    assert report.premiums_exceed_claims
    expected = stats.pearsonr(series.field("premiums"), series.field("claims"))[0]
    assert report.correlation == pytest.approx(expected)
    assert report.correlation_sign == int(np.sign(expected))

    data = report.to_dict()
    assert data["premium_slope"] == pytest.approx(-130.1648, abs=0.05)
    assert data["claim_slope"] == pytest.approx(-15.187, abs=0.05)
    assert len(data["years"]) == 14
    assert data["years"][0]["year"] == 2008
    assert data["years"][0]["premium"] == 5753.0


def test_report_with_constant_claims():
    series = MarketSeries(years=(2000, 2001, 2002), premiums=(5.0, 6.0, 8.0), claims=(1.0, 1.0, 1.0))
    report = market_data.premium_claim_report(series)
    assert report.correlation == 0.0
    assert report.correlation_sign == 0


def test_plot_csv(series):
    frame = market_data.plot_csv(series)
    assert list(frame.columns) == ["year", "premium", "claim"]
    assert len(frame) == 14
    assert frame.iloc[-1].tolist() == [2021, 4713.0, 3079.0]


def test_report_is_deterministic(series):
    first = market_data.premium_claim_report(series).to_dict()
    second = market_data.premium_claim_report(series).to_dict()
    assert first == second
