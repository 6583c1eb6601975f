import math
from datetime import date

import numpy as np
import pytest

from esgrisk.errors import ConfigError
from esgrisk.study import (
    EstimationConfig,
    EventAbnormals,
    EventDropped,
    MarketModelFit,
    abnormal_return,
    aggregate_node,
    bmp_tstat,
    compute_event_abnormals,
    fit_market_model,
    scaar_curve,
    standardize,
)
from esgrisk.taxonomy import Node


def closed_form_ols(x, y):
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    beta = float(dx @ (y - ym)) / float(dx @ dx)
    return ym - beta * xm, beta


def simulated(rng, n=130, alpha=2e-4, beta=1.3, idio=0.02):
    market = rng.normal(0.0, 0.01, n)
    firm = alpha + beta * market + rng.normal(0.0, idio, n)
    return firm, market


def test_estimation_offsets_default():
    offsets = list(EstimationConfig().est_offsets())
    assert offsets == list(range(-121, -1))
    assert offsets[0] == -121 and offsets[-1] == -2
    assert len(offsets) == 120


def test_estimation_config_validation():
    EstimationConfig().validate()
    with pytest.raises(ConfigError):
        EstimationConfig(est_len=2, min_obs=3).validate()
    with pytest.raises(ConfigError):
        EstimationConfig(min_obs=2).validate()
    with pytest.raises(ConfigError):
        EstimationConfig(est_len=50, min_obs=60).validate()
    with pytest.raises(ConfigError):
        EstimationConfig(est_end=0).validate()
    with pytest.raises(ConfigError):
        EstimationConfig(event_windows=((1, 0),)).validate()
    with pytest.raises(ConfigError):
        EstimationConfig(curve_span=-1).validate()


def test_required_offsets_union():
    config = EstimationConfig(event_windows=((-2, 0),), saar_offsets=(0, 3))
    assert config.required_offsets() == (-2, -1, 0, 3)


def test_fit_recovers_known_coefficients():
    rng = np.random.default_rng(7)
    firm, market = simulated(rng, idio=1e-4)
    fit = fit_market_model(firm, market, 121, EstimationConfig())
    assert fit.beta == pytest.approx(1.3, abs=0.01)
    assert fit.alpha == pytest.approx(2e-4, abs=5e-5)
    assert fit.n_obs == 120


def test_fit_matches_closed_form():
    rng = np.random.default_rng(8)
    config = EstimationConfig()
    offsets = list(config.est_offsets())
    for _ in range(200):
        firm, market = simulated(rng, beta=float(rng.uniform(-2, 2)))
        fit = fit_market_model(firm, market, 121, config)
        idx = [121 + off for off in offsets]
        alpha, beta = closed_form_ols(market[idx], firm[idx])
        assert fit.alpha == pytest.approx(alpha, rel=1e-10, abs=1e-14)
        assert fit.beta == pytest.approx(beta, rel=1e-10)
        resid = firm[idx] - (alpha + beta * market[idx])
        assert fit.resid_std == pytest.approx(
            math.sqrt(float(resid @ resid) / (len(idx) - 2)), rel=1e-10
        )
        assert fit.market_mean == pytest.approx(float(market[idx].mean()), rel=1e-10)


def test_fit_thin_history_drops():
    rng = np.random.default_rng(9)
    firm, market = simulated(rng)
    with pytest.raises(EventDropped) as exc:
        fit_market_model(firm, market, 50, EstimationConfig())
    assert exc.value.reason == "thin estimation window"


def test_fit_tolerates_gaps_down_to_min_obs():
    rng = np.random.default_rng(10)
    firm, market = simulated(rng)
    firm[10:30] = np.nan  # 20 missing days still leaves 100 paired obs
    fit = fit_market_model(firm, market, 121, EstimationConfig())
    assert fit.n_obs == 100
    firm[30] = np.nan  # 99 obs is below the floor
    with pytest.raises(EventDropped) as exc:
        fit_market_model(firm, market, 121, EstimationConfig())
    assert exc.value.reason == "thin estimation window"


def test_fit_constant_market_drops():
    rng = np.random.default_rng(11)
    firm, _ = simulated(rng)
    market = np.full(130, 0.004)
    with pytest.raises(EventDropped) as exc:
        fit_market_model(firm, market, 121, EstimationConfig())
    assert exc.value.reason == "degenerate regressor"


def test_fit_exact_line_drops():
    # a firm tracking the market exactly leaves zero residual variance,
    # so no standardization is possible
    rng = np.random.default_rng(12)
    market = rng.normal(0.0, 0.01, 130)
    firm = 1e-4 + 1.1 * market
    with pytest.raises(EventDropped) as exc:
        fit_market_model(firm, market, 121, EstimationConfig())
    assert exc.value.reason == "degenerate residuals"


def test_fit_constant_firm_drops_exact_recovers_near():
    rng = np.random.default_rng(13)
    market = rng.normal(0.0, 0.01, 130)
    c = 0.002
    with pytest.raises(EventDropped):
        fit_market_model(np.full(130, c), market, 121, EstimationConfig())
    # with a sliver of noise the fit is well posed: beta near 0, alpha near c
    firm = c + rng.normal(0.0, 1e-8, 130)
    fit = fit_market_model(firm, market, 121, EstimationConfig())
    assert abs(fit.beta) < 1e-5
    assert fit.alpha == pytest.approx(c, abs=1e-7)


FIT_FIXTURE = MarketModelFit(
    alpha=0.0, beta=2.0, resid_std=0.02,
    market_mean=0.0, market_ssq=0.01, n_obs=120,
)


def test_abnormal_return_fixtures():
    assert abnormal_return(FIT_FIXTURE, 0.03, 0.01) == pytest.approx(0.01)
    assert abnormal_return(FIT_FIXTURE, 0.02, 0.01) == pytest.approx(0.0)
    flat = MarketModelFit(
        alpha=0.0, beta=0.0, resid_std=0.02,
        market_mean=0.0, market_ssq=0.01, n_obs=120,
    )
    assert abnormal_return(flat, 0.017, 0.05) == pytest.approx(0.017)


def test_standardize_fixture():
    # s = 0.02, n = 120, market demeaned ssq = 0.01, event market ret 0.01:
    # correction = 1 + 1/120 + 0.0001/0.01, SAR = -0.004 / (0.02 sqrt(...))
    sar = standardize(FIT_FIXTURE, -0.004, 0.01)
    assert sar == pytest.approx(-0.19819149595051527, rel=1e-12)


def test_standardize_zero_ar_is_zero():
    assert standardize(FIT_FIXTURE, 0.0, 0.03) == 0.0


def test_standardize_correction_vanishes_for_typical_day():
    # huge estimation sample, event day at the market mean: SAR -> AR / s
    fit = MarketModelFit(
        alpha=0.0, beta=1.0, resid_std=0.02,
        market_mean=0.003, market_ssq=1e9, n_obs=10**9,
    )
    assert standardize(fit, -0.004, 0.003) == pytest.approx(-0.2, rel=1e-8)


def test_sar_invariant_under_firm_return_scaling():
    rng = np.random.default_rng(14)
    firm, market = simulated(rng)
    config = EstimationConfig()
    for k in (3.0, 0.25):
        fit1 = fit_market_model(firm, market, 121, config)
        fit2 = fit_market_model(k * firm, market, 121, config)
        ar1 = abnormal_return(fit1, float(firm[121]), float(market[121]))
        ar2 = abnormal_return(fit2, float(k * firm[121]), float(market[121]))
        assert ar2 == pytest.approx(k * ar1, rel=1e-9)
        sar1 = standardize(fit1, ar1, float(market[121]))
        sar2 = standardize(fit2, ar2, float(market[121]))
        assert sar2 == pytest.approx(sar1, rel=1e-9)


def test_compute_event_abnormals_collects_curve_offsets():
    rng = np.random.default_rng(15)
    firm, market = simulated(rng)
    ev = compute_event_abnormals(firm, market, 121, EstimationConfig(), firm="A")
    assert set(ev.sar) == set(range(-5, 6))
    assert ev.covers(range(-5, 6))
    # spot check one offset against a by-hand prediction error
    expected = float(firm[121]) - ev.fit.alpha - ev.fit.beta * float(market[121])
    assert ev.ar[0] == pytest.approx(expected, rel=1e-12)


def test_compute_event_abnormals_missing_required_drops():
    rng = np.random.default_rng(16)
    firm, market = simulated(rng)
    firm[121] = np.nan  # offset 0 is required by the default windows
    with pytest.raises(EventDropped) as exc:
        compute_event_abnormals(firm, market, 121, EstimationConfig())
    assert exc.value.reason == "missing event-window returns"


def test_compute_event_abnormals_tolerates_missing_curve_day():
    rng = np.random.default_rng(17)
    firm, market = simulated(rng)
    firm[121 - 4] = np.nan  # only the running-sum curve wants offset -4
    ev = compute_event_abnormals(firm, market, 121, EstimationConfig())
    assert -4 not in ev.sar
    assert ev.covers((-1, 0, 1))
    assert not ev.covers(range(-5, 6))


def test_compute_event_abnormals_truncated_event_window_drops():
    rng = np.random.default_rng(18)
    firm, market = simulated(rng, n=122)
    with pytest.raises(EventDropped) as exc:
        compute_event_abnormals(firm, market, 121, EstimationConfig())
    assert exc.value.reason == "missing event-window returns"


def event_with(sars, firm="A"):
    return EventAbnormals(
        firm=firm, day=date(2020, 1, 2), fit=FIT_FIXTURE,
        ar={off: v * 0.02 for off, v in sars.items()}, sar=dict(sars),
    )


def test_car_and_scar_windows():
    ev = event_with({-1: 0.5, 0: -2.0, 1: 0.3})
    assert ev.scar((-1, 1)) == pytest.approx(-1.2)
    assert ev.scar((-1, 0)) == pytest.approx(-1.5)
    assert ev.scar((0, 0)) == pytest.approx(-2.0)
    assert ev.scar((-1, 1), normalize=True) == pytest.approx(-1.2 / math.sqrt(3))
    assert ev.car((-1, 1)) == pytest.approx(0.02 * -1.2)


def test_bmp_tstat_fixture():
    assert bmp_tstat([1.0, 2.0, 3.0]) == pytest.approx(3.4641016151377544, rel=1e-12)
    assert bmp_tstat([1.0, 2.0, 3.0]) == pytest.approx(2.0 * math.sqrt(3.0), rel=1e-12)


def test_bmp_tstat_undefined_cases():
    assert bmp_tstat([0.7]) is None
    assert bmp_tstat([]) is None
    assert bmp_tstat([0.5, 0.5, 0.5]) is None
    # 0.4 is inexact in binary; identical values must still read as
    # zero dispersion rather than produce a t in the quadrillions
    assert bmp_tstat([0.4, 0.4, 0.4]) is None
    assert bmp_tstat([0.0, 0.0]) is None


def test_bmp_tstat_symmetries():
    rng = np.random.default_rng(19)
    values = rng.normal(0.5, 1.0, 40).tolist()
    t = bmp_tstat(values)
    assert bmp_tstat([-v for v in values]) == pytest.approx(-t)
    assert bmp_tstat([7.0 * v for v in values]) == pytest.approx(t, rel=1e-12)
    assert bmp_tstat([-1.0, 0.0, 1.0]) == pytest.approx(0.0, abs=1e-15)


def test_scaar_curve_running_sum():
    curve = scaar_curve({-1: 0.1, 0: -0.2, 1: 0.1})
    assert [off for off, _ in curve] == [-1, 0, 1]
    assert curve[0][1] == pytest.approx(0.1)
    assert curve[1][1] == pytest.approx(-0.1)
    assert curve[2][1] == pytest.approx(0.0, abs=1e-15)
    assert scaar_curve({}) == []


def test_aggregate_node_means_and_additivity():
    rng = np.random.default_rng(20)
    config = EstimationConfig()
    events = [
        event_with({off: float(rng.normal(-0.5, 1.0)) for off in range(-5, 6)})
        for _ in range(9)
    ]
    result = aggregate_node(Node.CLIMATE_CHANGE, events, config)
    assert result.n == 9
    assert result.saar[0] == pytest.approx(np.mean([e.sar[0] for e in events]), rel=1e-12)
    # window sums decompose into per-offset averages over the same events
    assert result.scaar[(-1, 1)] == pytest.approx(
        result.scaar[(-1, 0)] + result.saar[1], abs=1e-12
    )
    assert result.caar[(-1, 1)] == pytest.approx(
        result.caar[(-1, 0)] + result.aar[1], abs=1e-12
    )
    assert result.curve_n == 9
    assert result.curve[-1][1] == pytest.approx(
        sum(result.saar.get(off, np.mean([e.sar[off] for e in events])) for off in range(-5, 6)),
        rel=1e-9,
    )


def test_aggregate_node_empty():
    result = aggregate_node(Node.ESG_ALL, [], EstimationConfig())
    assert result.n == 0
    assert result.saar == {} and result.scaar == {}
    assert result.curve == () and result.curve_n == 0


def test_aggregate_node_single_event_has_no_t():
    events = [event_with({off: 0.3 for off in range(-5, 6)})]
    result = aggregate_node(Node.HUMAN_CAPITAL, events, EstimationConfig())
    assert result.n == 1
    assert result.saar[0] == pytest.approx(0.3)
    assert result.t_saar[0] is None
    assert result.t_scaar[(-1, 1)] is None


def test_aggregate_node_curve_skips_partial_events():
    full = event_with({off: 0.1 for off in range(-5, 6)})
    partial = event_with({off: 9.9 for off in (-1, 0, 1)})
    result = aggregate_node(Node.ESG_ALL, [full, partial], EstimationConfig())
    assert result.n == 2
    assert result.curve_n == 1
    # curve built from the fully covered event only
    assert result.curve[0] == (-5, pytest.approx(0.1))
    assert result.curve[-1][1] == pytest.approx(1.1)
    # but the headline stats still use both events
    assert result.saar[0] == pytest.approx(5.0)


def test_scar_normalization_flag():
    events = [event_with({off: float(v) for off in range(-5, 6)}) for v in (0.2, -1.0, 0.7)]
    plain = aggregate_node(Node.ESG_ALL, events, EstimationConfig())
    normed = aggregate_node(Node.ESG_ALL, events, EstimationConfig(scar_normalize=True))
    assert normed.scaar[(-1, 1)] == pytest.approx(plain.scaar[(-1, 1)] / math.sqrt(3), rel=1e-12)
    assert normed.scaar[(-1, 0)] == pytest.approx(plain.scaar[(-1, 0)] / math.sqrt(2), rel=1e-12)
