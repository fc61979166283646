"""The full twin loop: KPI feed -> detection -> localization -> fix.

Synthesizes an hour of per-cell RTWP/RSSI, clusters the cells, flags the
anomalous ones, estimates where the interferer sits, reassigns the
affected sectors to clean spectrum and verifies the what-if by
re-simulating. Run with: python3 demos/03_detection_loop.py
"""

import math

import numpy as np

from rfplan import detect, localize, mitigate, twin
from rfplan.cli import demo_scenario_path
from rfplan.scenario import load_scenario

scenario = load_scenario(demo_scenario_path())
jam = scenario.interferers[0]
print(f"ground truth (sealed from the detector): {jam.id} at "
      f"{jam.position}, {jam.tx_power_dbm} dBm on {jam.band_ref}, "
      f"active {jam.active_intervals[0]} s")

# --- the physical side emits KPIs ----------------------------------------
batch = twin.synthesize_kpi(scenario, duration_s=3600.0, dt_s=60.0)
print(f"\nKPI feed: {len(batch.cells())} cells x "
      f"{batch.get('RTWP', 'A1').samples.size} samples")

excess = twin.batch_excess(batch, baseline_window=15)
worst = sorted(excess, key=lambda c: -np.mean(excess[c]))[:5]
print("top mean RTWP excess:",
      ", ".join(f"{c} {np.mean(excess[c]):+.1f} dB" for c in worst))

# --- detection ------------------------------------------------------------
result = detect.run_detection(batch, baseline_window=15)
print(f"\nanomaly: {result.anomaly_flag}, affected: "
      f"{list(result.affected_cells)}")

# --- localization ---------------------------------------------------------
estimates = localize.estimate_interferer(scenario, result,
                                         baseline_dbm=-102.0)
for name, est in estimates.items():
    err = math.dist(est.position, jam.position)
    note = " (fallback)" if est.fallback else ""
    print(f"{name:16s}: ({est.position[0]:7.1f}, {est.position[1]:7.1f}), "
          f"error {err:6.1f} m{note}")

# --- mitigation + verification -------------------------------------------
rec = mitigate.recommend(scenario, result)
print(f"\nrecommendation: {rec.rationale}")
for sector, old, new in rec.changes:
    print(f"  {sector}: {old} -> {new}")

post = mitigate.apply(scenario, rec)
verdict = mitigate.verify(scenario, post, result.affected_cells)
print(f"\nverification over {verdict.affected_pixel_count} affected pixels:")
print(f"  mean SINR {verdict.pre_mean_sinr_db:.2f} -> "
      f"{verdict.post_mean_sinr_db:.2f} dB ({verdict.delta_db:+.2f} dB), "
      f"improved: {verdict.improved}")
if verdict.residual_affected:
    print(f"  still degraded: {list(verdict.residual_affected)}")
else:
    print("  no residual degradation")
