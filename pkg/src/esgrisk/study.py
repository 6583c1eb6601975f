"""Market-model event study with standardized abnormal returns.

Per event: fit R_i = alpha + beta * R_m by OLS over the estimation window,
take the event-window prediction errors AR, and standardize each by the
forecast-error-corrected residual standard deviation

    SAR = AR / (s * sqrt(1 + 1/n + (R_m,t - mean_est(R_m))^2 / ssq_est(R_m))).

Cross-event aggregation averages SARs per offset (SAAR) and the per-event
sums of SARs over a window (SCAAR, no window-length renormalization).
Significance uses the cross-sectional t on the standardized values
(Boehmer/Musumeci/Poulsen): t = mean(v) / (std(v, ddof=1) / sqrt(N)).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .ingest import PriceRow
from .taxonomy import Node
from .trading import TradingCalendar

log = logging.getLogger(__name__)

Window = tuple[int, int]


class EventDropped(Exception):
    """An event cannot be studied; carries the drop reason."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class EstimationConfig:
    est_len: int = 120
    est_end: int = -2  # last estimation offset, relative to the event day
    min_obs: int = 100
    event_windows: tuple[Window, ...] = ((-1, 0), (-1, 1))
    saar_offsets: tuple[int, ...] = (-1, 0, 1)
    curve_span: int = 5
    scar_normalize: bool = False  # divide window sums by sqrt(window length)

    def validate(self) -> None:
        if self.est_len < 3:
            raise ConfigError(f"est_len must be at least 3, got {self.est_len}")
        if self.min_obs < 3 or self.min_obs > self.est_len:
            raise ConfigError(
                f"min_obs must lie in [3, est_len], got {self.min_obs} vs {self.est_len}"
            )
        if self.est_end >= 0:
            raise ConfigError("estimation window must end before the event day")
        for lo, hi in self.event_windows:
            if lo > hi:
                raise ConfigError(f"bad event window [{lo};{hi}]")
        if self.curve_span < 0:
            raise ConfigError("curve_span must be non-negative")

    def est_offsets(self) -> range:
        """Day offsets of the estimation window, ending at est_end."""
        return range(self.est_end - self.est_len + 1, self.est_end + 1)

    def required_offsets(self) -> tuple[int, ...]:
        need = set(self.saar_offsets)
        for lo, hi in self.event_windows:
            need.update(range(lo, hi + 1))
        return tuple(sorted(need))


@dataclass(frozen=True)
class MarketModelFit:
    alpha: float
    beta: float
    resid_std: float
    market_mean: float
    market_ssq: float
    n_obs: int


def align_firm_returns(prices: Mapping[str, list[PriceRow]], calendar: TradingCalendar) -> dict[str, np.ndarray]:
    """Per-firm return arrays on the calendar grid, NaN where missing.

    Price rows on dates outside the calendar are ignored with a log note:
    they cannot participate in a calendar-aligned study.
    """
    out: dict[str, np.ndarray] = {}
    for firm, rows in prices.items():
        arr = np.full(len(calendar), np.nan)
        dropped = 0
        for row in rows:
            if row.ret is None:
                continue
            if row.day not in calendar:
                dropped += 1
                continue
            arr[calendar.index_of(row.day)] = row.ret
        if dropped:
            log.info("%s: %d price dates outside the trading calendar", firm, dropped)
        out[firm] = arr
    return out


def align_market_returns(rows: Sequence, calendar: TradingCalendar) -> np.ndarray:
    arr = np.full(len(calendar), np.nan)
    for row in rows:
        if row.day in calendar:
            arr[calendar.index_of(row.day)] = row.ret
    return arr


def fit_market_model(
    firm_returns: np.ndarray,
    market_returns: np.ndarray,
    event_index: int,
    config: EstimationConfig,
) -> MarketModelFit:
    """OLS of firm on market returns over the estimation window.

    Raises EventDropped when fewer than min_obs paired observations exist,
    when the market regressor is constant, or when the fit leaves zero
    residual variance (both degeneracies make SARs undefined).
    """
    n = firm_returns.shape[0]
    idx = [event_index + off for off in config.est_offsets()]
    idx = [i for i in idx if 0 <= i < n]
    if not idx:
        raise EventDropped("thin estimation window")
    x_all = market_returns[idx]
    y_all = firm_returns[idx]
    ok = np.isfinite(x_all) & np.isfinite(y_all)
    n_obs = int(ok.sum())
    if n_obs < config.min_obs:
        raise EventDropped("thin estimation window")
    x = x_all[ok]
    y = y_all[ok]
    market_mean = float(x.mean())
    market_ssq = float(((x - market_mean) ** 2).sum())
    # x.mean() of a constant series carries rounding noise, so test the
    # data itself, not the demeaned sum of squares alone
    if market_ssq == 0.0 or float(x.max()) == float(x.min()):
        raise EventDropped("degenerate regressor")
    beta, alpha = np.polyfit(x, y, 1)
    resid = y - (alpha + beta * x)
    ssr = float(resid @ resid)
    resid_std = math.sqrt(ssr / (n_obs - 2)) if ssr > 0.0 else 0.0
    # residual spread at the rounding floor of the response scale means an
    # exact linear (or constant) relation: SARs are undefined there
    if resid_std <= float(np.abs(y).max()) * 1e-12:
        raise EventDropped("degenerate residuals")
    return MarketModelFit(
        alpha=float(alpha),
        beta=float(beta),
        resid_std=resid_std,
        market_mean=market_mean,
        market_ssq=market_ssq,
        n_obs=n_obs,
    )


def abnormal_return(fit: MarketModelFit, firm_ret: float, market_ret: float) -> float:
    """Prediction error of the market model on one day."""
    return firm_ret - fit.alpha - fit.beta * market_ret


def standardize(fit: MarketModelFit, ar: float, market_ret: float) -> float:
    """Scale an abnormal return by its forecast-error standard deviation."""
    correction = 1.0 + 1.0 / fit.n_obs + (market_ret - fit.market_mean) ** 2 / fit.market_ssq
    return ar / (fit.resid_std * math.sqrt(correction))


@dataclass(frozen=True)
class EventAbnormals:
    """Per-event abnormal returns around the event day.

    `ar`/`sar` hold every offset in [-curve_span, +curve_span] (plus any
    configured offsets) where returns existed; required offsets are
    guaranteed present, the rest are best effort for the curve.
    """

    firm: str
    day: date
    fit: MarketModelFit
    ar: dict[int, float]
    sar: dict[int, float]

    def car(self, window: Window) -> float:
        lo, hi = window
        return sum(self.ar[off] for off in range(lo, hi + 1))

    def scar(self, window: Window, normalize: bool = False) -> float:
        lo, hi = window
        total = sum(self.sar[off] for off in range(lo, hi + 1))
        if normalize:
            total /= math.sqrt(hi - lo + 1)
        return total

    def covers(self, offsets: Iterable[int]) -> bool:
        return all(off in self.sar for off in offsets)


def compute_event_abnormals(
    firm_returns: np.ndarray,
    market_returns: np.ndarray,
    event_index: int,
    config: EstimationConfig,
    firm: str = "",
    day: date | None = None,
) -> EventAbnormals:
    """Fit the market model and collect ARs/SARs around one event.

    Raises EventDropped if any required offset lacks a firm or market
    return; offsets needed only for the running-sum curve may be missing.
    """
    fit = fit_market_model(firm_returns, market_returns, event_index, config)
    required = set(config.required_offsets())
    wanted = sorted(required | set(range(-config.curve_span, config.curve_span + 1)))
    n = firm_returns.shape[0]
    ar: dict[int, float] = {}
    sar: dict[int, float] = {}
    for off in wanted:
        i = event_index + off
        if not 0 <= i < n:
            if off in required:
                raise EventDropped("missing event-window returns")
            continue
        r_i = firm_returns[i]
        r_m = market_returns[i]
        if not (np.isfinite(r_i) and np.isfinite(r_m)):
            if off in required:
                raise EventDropped("missing event-window returns")
            continue
        a = abnormal_return(fit, float(r_i), float(r_m))
        ar[off] = a
        sar[off] = standardize(fit, a, float(r_m))
    if day is None:
        day = date.min
    return EventAbnormals(firm=firm, day=day, fit=fit, ar=ar, sar=sar)


def bmp_tstat(values: Sequence[float]) -> float | None:
    """Cross-sectional t on standardized values; None when undefined.

    Uses the N-1 sample standard deviation. Fewer than two events or zero
    dispersion make the statistic undefined rather than infinite.
    """
    arr = np.asarray(values, dtype=np.float64)
    n = arr.size
    if n < 2:
        return None
    sd = float(arr.std(ddof=1))
    # identical values can leave rounding-level dispersion; still undefined
    if sd <= float(np.abs(arr).max()) * 1e-12:
        return None
    return float(arr.mean() / (sd / math.sqrt(n)))


def scaar_curve(saar_by_offset: Mapping[int, float]) -> list[tuple[int, float]]:
    """Running sum of SAAR over increasing offsets (plot data)."""
    path: list[tuple[int, float]] = []
    total = 0.0
    for off in sorted(saar_by_offset):
        total += saar_by_offset[off]
        path.append((off, total))
    return path


@dataclass
class NodeStudyResult:
    """Aggregated study statistics for one taxonomy node."""

    node: Node
    n: int
    saar: dict[int, float] = field(default_factory=dict)
    t_saar: dict[int, float | None] = field(default_factory=dict)
    scaar: dict[Window, float] = field(default_factory=dict)
    t_scaar: dict[Window, float | None] = field(default_factory=dict)
    aar: dict[int, float] = field(default_factory=dict)
    t_aar: dict[int, float | None] = field(default_factory=dict)
    caar: dict[Window, float] = field(default_factory=dict)
    t_caar: dict[Window, float | None] = field(default_factory=dict)
    curve: tuple[tuple[int, float], ...] = ()
    curve_n: int = 0


def aggregate_node(
    node: Node, abnormals: Sequence[EventAbnormals], config: EstimationConfig
) -> NodeStudyResult:
    """Average per-event (S)ARs into SAAR/SCAAR rows with BMP t-values.

    Every statistic uses the same event set, so window sums decompose
    exactly into their per-offset averages.
    """
    result = NodeStudyResult(node=node, n=len(abnormals))
    if not abnormals:
        return result
    for off in config.saar_offsets:
        sars = [e.sar[off] for e in abnormals]
        ars = [e.ar[off] for e in abnormals]
        result.saar[off] = float(np.mean(sars))
        result.t_saar[off] = bmp_tstat(sars)
        result.aar[off] = float(np.mean(ars))
        result.t_aar[off] = bmp_tstat(ars)
    for window in config.event_windows:
        scars = [e.scar(window, config.scar_normalize) for e in abnormals]
        cars = [e.car(window) for e in abnormals]
        result.scaar[window] = float(np.mean(scars))
        result.t_scaar[window] = bmp_tstat(scars)
        result.caar[window] = float(np.mean(cars))
        result.t_caar[window] = bmp_tstat(cars)
    span = range(-config.curve_span, config.curve_span + 1)
    covered = [e for e in abnormals if e.covers(span)]
    result.curve_n = len(covered)
    if covered:
        saar_ext = {off: float(np.mean([e.sar[off] for e in covered])) for off in span}
        result.curve = tuple(scaar_curve(saar_ext))
    return result
