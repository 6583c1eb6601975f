"""
Market-model event study on simulated return panels
===================================================

Fits the market model on a 120-day pre-event window, converts event-day
returns into abnormal and standardized abnormal returns, and aggregates
them across events. Two panels are compared: one with no effect and one
with a -0.5% return injected on the event day.
"""

from datetime import date

import numpy as np

from esgrisk.study import (
    EstimationConfig,
    abnormal_return,
    aggregate_node,
    bmp_tstat,
    compute_event_abnormals,
    fit_market_model,
    standardize,
)
from esgrisk.synth import simulate_event_panel
from esgrisk.taxonomy import Node

config = EstimationConfig()  # 120-day window ending 2 days before the event

# --- one event in detail ----------------------------------------------
rng = np.random.default_rng(3)
firm, market, idx = next(iter(simulate_event_panel(rng, 1, injected_ar=-0.005)))

fit = fit_market_model(firm, market, idx, config)
print(f"fitted model: alpha {fit.alpha:+.6f}, beta {fit.beta:.3f}, "
      f"residual std {fit.resid_std:.4f}, {fit.n_obs} obs")

ar = abnormal_return(fit, float(firm[idx]), float(market[idx]))
sar = standardize(fit, ar, float(market[idx]))
print(f"event day: return {firm[idx]:+.4f}, market {market[idx]:+.4f}, "
      f"AR {ar:+.4f}, SAR {sar:+.3f}")

# --- panels of 400 events ---------------------------------------------
for label, injected in (("null", 0.0), ("injected -0.5%", -0.005)):
    rng = np.random.default_rng(99)  # same seed, so only the injection differs
    events = [
        compute_event_abnormals(f, m, i, config, firm=f"E{k}", day=date(2020, 6, 1))
        for k, (f, m, i) in enumerate(
            simulate_event_panel(rng, 400, post_days=5, injected_ar=injected)
        )
    ]
    res = aggregate_node(Node.ESG_ALL, events, config)
    t0 = bmp_tstat([e.sar[0] for e in events])
    print(f"\npanel '{label}' ({res.n} events)")
    print(f"  AAR(0)        {res.aar[0]:+.5f}   t {t0:+.2f}")
    print(f"  SCAAR[-1;+1]  {res.scaar[(-1, 1)]:+.3f}    t {res.t_scaar[(-1, 1)]:+.2f}")
    print("  running SCAAR curve over [-5;+5]:")
    for off, val in res.curve:
        bar = "#" * int(abs(val) * 4)
        print(f"    {off:+d}: {val:+7.3f} {bar}")
