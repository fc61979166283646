"""Acceptance gate: ten pass/fail checks over the whole pipeline.

Each test prints a single PASS/FAIL line (run pytest with -s or look at
captured output) and then asserts, so a red run still reports every
criterion it reached. Fixture-statistical checks run over fixed seed
ranges and are fully deterministic.
"""

import dataclasses
import filecmp
import math
import time

import numpy as np
from scipy.stats import spearmanr

from rfplan import coverage, detect, localize, mitigate, twin
from rfplan.errors import InfeasibleError
from rfplan.planning import (LinkBudget, cell_radius_m, hexagon_area_m2,
                             max_allowed_pathloss_db)
from rfplan.propagation import (PathlossQuery, free_space_pathloss_db,
                                pathloss_db, pathloss_db_clamped)

BASELINE_WINDOW = 15


def report(name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {name}: {tag}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name} failed: {detail}"


def site_distance(scenario, cell_id, point):
    site, _ = scenario.sector_by_id(cell_id)
    return math.dist(site.position, point)


def test_01_pathloss_oracles():
    t0 = time.perf_counter()
    uma = pathloss_db(PathlossQuery(100.0, 3.5, 25.0, 1.5, "UMa", "LOS"))
    umi = pathloss_db(PathlossQuery(100.0, 3.5, 10.0, 1.5, "UMi", "LOS"))
    fs = float(free_space_pathloss_db(100.0, 3.5))
    elapsed = time.perf_counter() - t0
    ok = (abs(uma - 83.14) <= 0.01 and abs(umi - 85.31) <= 0.01
          and abs(uma - fs) < 2.0 and elapsed < 1.0)
    report("01 pathloss-oracles", ok,
           f"UMa {uma:.3f} dB, UMi {umi:.3f} dB, free-space {fs:.3f} dB, "
           f"{elapsed * 1e3:.1f} ms")


def test_02_frequency_coverage_trend(demo_scenario):
    t0 = time.perf_counter()
    r35 = cell_radius_m(134.0, "UMa", "NLOS", 3.5, 25.0, 1.5)
    r28 = cell_radius_m(134.0, "UMa", "NLOS", 28.0, 25.0, 1.5)

    def swap(band):
        sites = tuple(
            dataclasses.replace(s, sectors=tuple(
                dataclasses.replace(x, band_ref=band) for x in s.sectors))
            for s in demo_scenario.sites)
        return dataclasses.replace(demo_scenario, sites=sites, interferers=())

    fp35 = int(np.sum(coverage.compute_grid(swap("n78"), False).rssi_dbm >= -95.0))
    fp28 = int(np.sum(coverage.compute_grid(swap("n257"), False).rssi_dbm >= -95.0))
    elapsed = time.perf_counter() - t0
    ok = r28 < r35 and fp28 < fp35 and elapsed < 10.0
    report("02 frequency-coverage-trend", ok,
           f"radius {r28:.0f} < {r35:.0f} m, footprint {fp28} < {fp35} px, "
           f"{elapsed:.1f} s")


def test_03_link_budget_round_trip():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    checked = 0
    worst = 0.0
    while checked < 100:
        budget = LinkBudget(
            tx_power_dbm=float(rng.uniform(30, 49)),
            tx_antenna_gain_dbi=float(rng.uniform(0, 18)),
            rx_antenna_gain_dbi=float(rng.uniform(0, 3)),
            cable_loss_db=float(rng.uniform(0, 4)),
            penetration_loss_db=float(rng.uniform(0, 10)),
            interference_margin_db=float(rng.uniform(0, 6)),
            shadow_margin_db=float(rng.uniform(0, 8)),
            noise_figure_db=float(rng.uniform(3, 9)),
            required_sinr_db=float(rng.uniform(-5, 5)),
            bandwidth_mhz=float(rng.uniform(5, 100)))
        fc = float(rng.uniform(0.7, 40.0))
        h_bs = float(rng.uniform(10.0, 40.0))
        env = ("UMa", "UMi")[int(rng.integers(2))]
        cond = ("LOS", "NLOS")[int(rng.integers(2))]
        mapl = max_allowed_pathloss_db(budget)
        try:
            r = cell_radius_m(mapl, env, cond, fc, h_bs, 1.5)
        except InfeasibleError:
            continue
        if r >= 9999.0:            # saturated at the model validity limit
            continue
        pl = float(pathloss_db_clamped(r, fc, h_bs, 1.5, env, cond))
        if not (mapl - 0.05 <= pl <= mapl):
            report("03 link-budget-round-trip", False,
                   f"PL {pl:.3f} outside [{mapl - 0.05:.3f}, {mapl:.3f}]")
        worst = max(worst, mapl - pl)
        checked += 1
    elapsed = time.perf_counter() - t0
    ok = checked == 100 and elapsed < 5.0
    report("03 link-budget-round-trip", ok,
           f"{checked} budgets, worst gap {worst:.4f} dB, {elapsed:.1f} s")


def test_04_observation_suite(demo_scenario):
    t0 = time.perf_counter()
    intf = demo_scenario.interferers[0]
    dmin = min(math.dist(s.position, intf.position)
               for s in demo_scenario.sites)

    nearest_hits = corr_hits = 0
    rhos = []
    for seed in range(20):
        batch = twin.synthesize_kpi(demo_scenario, 3600.0, 60.0, seed=seed)
        excess = twin.batch_excess(batch, BASELINE_WINDOW)
        means = {c: float(np.mean(v)) for c, v in excess.items()}

        top = max(means, key=means.get)
        if math.isclose(site_distance(demo_scenario, top, intf.position), dmin):
            nearest_hits += 1

        cells = sorted(means)
        d = [site_distance(demo_scenario, c, intf.position) for c in cells]
        rhos.append(float(spearmanr([means[c] for c in cells], d).statistic))

        result = detect.run_detection(batch, BASELINE_WINDOW)
        affected = list(result.affected_cells)
        others = [c for c in cells if c not in affected]
        if len(affected) >= 2 and others:
            aa = np.mean([detect.pearson(excess[a], excess[b])
                          for a in affected for b in affected if a < b])
            au = np.mean([detect.pearson(excess[a], excess[u])
                          for a in affected for u in others])
            if aa > au:
                corr_hits += 1

    rho_med = float(np.median(rhos))
    elapsed = time.perf_counter() - t0
    ok = (nearest_hits >= 19 and rho_med <= -0.8 and corr_hits >= 18
          and elapsed < 60.0)
    report("04 observation-suite", ok,
           f"nearest {nearest_hits}/20, spearman median {rho_med:.3f}, "
           f"corr {corr_hits}/20, {elapsed:.1f} s")


def test_05_detection_quality(demo_scenario, quiet_scenario):
    t0 = time.perf_counter()
    fp = sum(
        detect.run_detection(
            twin.synthesize_kpi(quiet_scenario, 3600.0, 60.0, seed=s),
            BASELINE_WINDOW).anomaly_flag
        for s in range(50))
    tp = sum(
        detect.run_detection(
            twin.synthesize_kpi(demo_scenario, 3600.0, 60.0, seed=s),
            BASELINE_WINDOW).anomaly_flag
        for s in range(50))
    elapsed = time.perf_counter() - t0
    ok = fp <= 2 and tp >= 48 and elapsed < 120.0   # FPR <= 5%, TPR >= 95%
    report("05 detection-quality", ok,
           f"FP {fp}/50, TP {tp}/50, {elapsed:.1f} s")


def test_06_kmeans_correctness():
    rng = np.random.default_rng(8)
    mono_ok = True
    for trial in range(10):
        x = rng.normal(size=(40, 3))
        *_, history = detect.kmeans(x, 3, seed=trial)
        mono_ok &= all(a >= b - 1e-9 for a, b in zip(history, history[1:]))

    x4 = np.array([[0.0], [0.1], [10.0], [10.1]])
    labels, cents, *_ = detect.kmeans(x4, 2, seed=0)
    sep_ok = (labels[0] == labels[1] and labels[2] == labels[3]
              and labels[0] != labels[2]
              and np.allclose(sorted(cents[:, 0]), [0.05, 10.05]))

    beats = True
    x50 = rng.normal(size=(50, 4))
    _, _, inertia, *_ = detect.kmeans(x50, 3, seed=0)
    for _ in range(100):
        labels = rng.integers(3, size=50)
        while len(set(labels.tolist())) < 3:
            labels = rng.integers(3, size=50)
        cents = np.stack([x50[labels == c].mean(axis=0) for c in range(3)])
        beats &= inertia <= float(((x50 - cents[labels]) ** 2).sum()) + 1e-9

    ok = mono_ok and sep_ok and beats
    report("06 kmeans-correctness", ok,
           f"monotone {mono_ok}, separable {sep_ok}, beats-random {beats}")


def test_07_localization(demo_scenario):
    t0 = time.perf_counter()
    intf = demo_scenario.interferers[0]
    pair = [math.dist(a.position, b.position)
            for a in demo_scenario.sites for b in demo_scenario.sites
            if a.id < b.id]
    bound = 0.5 * float(np.mean(pair))

    errors = []
    for seed in range(20):
        batch = twin.synthesize_kpi(demo_scenario, 3600.0, 60.0, seed=seed)
        result = detect.run_detection(batch, BASELINE_WINDOW)
        if not result.anomaly_flag:
            continue
        est = localize.estimate_interferer(
            demo_scenario, result, baseline_dbm=-102.0,
            method="WeightedCentroid")["WeightedCentroid"]
        errors.append(math.dist(est.position, intf.position))
    wc_median = float(np.median(errors))

    truth = (430.0, 610.0, 17.0)
    sensors = [(0.0, 0.0), (1000.0, 100.0), (200.0, 1100.0),
               (900.0, 900.0), (-300.0, 500.0)]
    obs = []
    for i, p in enumerate(sensors):
        pl = float(pathloss_db_clamped(math.dist(p, truth[:2]), 3.5, 25.0,
                                       1.5, "UMa", "NLOS"))
        obs.append((f"s{i}", p, 25.0, truth[2] - pl))
    lsq = localize.pathloss_lsq(obs, 3.5)
    lsq_pos_err = math.dist(lsq.position, truth[:2])
    lsq_pow_err = abs(lsq.tx_power_dbm - truth[2])

    elapsed = time.perf_counter() - t0
    ok = (len(errors) == 20 and wc_median <= bound
          and lsq_pos_err < 1.0 and lsq_pow_err < 0.1 and elapsed < 60.0)
    report("07 localization", ok,
           f"WC median {wc_median:.0f} m (bound {bound:.0f}), LSQ "
           f"{lsq_pos_err:.2e} m / {lsq_pow_err:.2e} dB, {elapsed:.1f} s")


def test_08_closed_loop(demo_scenario):
    deltas = []
    for seed in (demo_scenario.seed, 0, 1, 2, 7):
        sc = dataclasses.replace(demo_scenario, seed=seed)
        batch = twin.synthesize_kpi(sc, 3600.0, 60.0)
        result = detect.run_detection(batch, BASELINE_WINDOW)
        rec = mitigate.recommend(sc, result)
        post = mitigate.apply(sc, rec)
        verdict = mitigate.verify(sc, post, result.affected_cells)
        if not (verdict.improved and verdict.delta_db > 3.0):
            report("08 closed-loop", False,
                   f"seed {seed}: delta {verdict.delta_db:.2f} dB, "
                   f"improved {verdict.improved}")
        deltas.append(verdict.delta_db)
    report("08 closed-loop", True,
           "deltas " + ", ".join(f"{d:+.2f}" for d in deltas) + " dB over "
           f"{len(deltas)} seeds")


def test_09_twin_fidelity(quiet_scenario):
    batch = twin.synthesize_kpi(quiet_scenario, 3600.0, 60.0)
    means = [float(np.mean(s.samples))
             for s in batch.series["RTWP"].values()]
    worst = max(abs(m + 102.0) for m in means)

    cap_500 = coverage.throughput_mbps(60.0, 100.0, 500.0)
    cap_1000 = coverage.throughput_mbps(60.0, 400.0, 1000.0)

    ok = worst <= 2.0 and cap_500 == 500.0 and cap_1000 == 1000.0
    report("09 twin-fidelity", ok,
           f"worst RTWP offset {worst:.2f} dB vs -102 dBm, caps "
           f"{cap_500:.0f}/{cap_1000:.0f} Mbps")


def test_10_determinism(demo_scenario, tmp_path):
    grids = []
    for name, workers in (("a", 1), ("b", 1), ("c", 4)):
        g = coverage.compute_grid(demo_scenario, interferers_active=True,
                                  n_workers=workers)
        p = tmp_path / f"grid_{name}.csv"
        coverage.write_grid_csv(g, p)
        grids.append(p)
    grid_ok = (filecmp.cmp(grids[0], grids[1], shallow=False)
               and filecmp.cmp(grids[0], grids[2], shallow=False))

    kpis = []
    for name in ("a", "b"):
        batch = twin.synthesize_kpi(demo_scenario, 3600.0, 60.0)
        p = tmp_path / f"kpi_{name}.csv"
        twin.write_kpi_csv(batch, p)
        kpis.append(p)
    kpi_ok = filecmp.cmp(kpis[0], kpis[1], shallow=False)

    report("10 determinism", grid_ok and kpi_ok,
           f"grid byte-identical {grid_ok} (incl. 4 workers), "
           f"kpi byte-identical {kpi_ok}")
