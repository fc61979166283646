"""Synthetic OSS feed: per-cell RTWP/RSSI time series.

Emulates the physical network's KPI counters. Each sector acts as an
uplink power sensor: RTWP composes (in the linear domain) the thermal
baseline, a slowly varying load term and the contribution of every
in-band active interferer, plus measurement noise. RSSI additionally
carries a serving-traffic term.

Ground truth (which interferer was on, where, when) travels next to the
batch but is written to a separate sealed file by the CLI; detection
never reads it unless validation is explicitly requested.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import propagation
from .coverage import AntennaPattern, bearing_deg
from .errors import InputError
from .planning import noise_floor_dbm
from .scenario import Interferer, Scenario, Sector, Site

DAY_S = 86_400.0

METRICS = ("RTWP", "RSSI")


@dataclass
class KpiSeries:
    cell_id: str
    metric: str
    t0_s: float
    dt_s: float
    samples: np.ndarray

    @property
    def timestamps(self) -> np.ndarray:
        return self.t0_s + self.dt_s * np.arange(self.samples.size)


@dataclass
class GroundTruth:
    interferer_id: str
    position: tuple[float, float]
    tx_power_dbm: float
    band_ref: str
    active_intervals: tuple[tuple[float, float], ...]


@dataclass
class KpiBatch:
    series: dict[str, dict[str, KpiSeries]]  # metric -> cell -> series
    scenario_name: str = ""
    ground_truth: list[GroundTruth] = field(default_factory=list)

    def cells(self) -> list[str]:
        any_metric = next(iter(self.series.values()))
        return sorted(any_metric)

    def get(self, metric: str, cell_id: str) -> KpiSeries:
        return self.series[metric][cell_id]


def interference_at_cell_dbm(interferer: Interferer, site: Site, sector: Sector,
                             fc_ghz: float, environment: str = "UMa") -> float:
    """Interferer power coupled into one sector's receiver, dBm.

    NLOS pathloss from interferer to site (conservative), plus the sector
    antenna gain toward the interferer. Different band: -inf sentinel,
    no contribution.
    """
    if interferer.band_ref != sector.band_ref:
        return -math.inf
    dx = interferer.position[0] - site.position[0]
    dy = interferer.position[1] - site.position[1]
    d2d = max(math.hypot(dx, dy), propagation.D2D_MIN_M)
    # Uplink into the BTS antenna: BS height on the receive side, the
    # interferer plays the terminal role.
    h_ut = min(max(interferer.height_m, propagation.H_UT_MIN_M), propagation.H_UT_MAX_M)
    pl = float(propagation.pathloss_db_clamped(
        d2d, fc_ghz, site.height_m, h_ut, environment, "NLOS"))
    pattern = AntennaPattern(sector.beamwidth_3db_deg, sector.front_to_back_db)
    gain = sector.antenna_gain_dbi - float(
        pattern.attenuation_db(bearing_deg(dx, dy) - sector.azimuth_deg))
    return interferer.tx_power_dbm - pl + gain


def _cell_baseline_dbm(scenario: Scenario, band) -> float:
    if scenario.twin.rtwp_baseline_dbm is not None:
        return scenario.twin.rtwp_baseline_dbm
    return noise_floor_dbm(band.bandwidth_mhz, scenario.twin.bts_noise_figure_db)


def synthesize_kpi(scenario: Scenario, duration_s: float, dt_s: float,
                   seed: int | None = None) -> KpiBatch:
    """Generate the RTWP/RSSI batch for every sector of the scenario.

    Deterministic for a fixed (scenario, seed); per-cell RNG streams are
    keyed by cell id so generation order (or parallel scheduling) cannot
    change the result.
    """
    if dt_s <= 0 or duration_s < dt_s:
        raise InputError("duration_s must be >= dt_s and dt_s > 0")
    if not scenario.sites:
        raise InputError("scenario has no sectors")
    seed = scenario.seed if seed is None else seed
    cfg = scenario.twin
    t = dt_s * np.arange(int(duration_s // dt_s))

    series: dict[str, dict[str, KpiSeries]] = {m: {} for m in METRICS}
    for site, sector in scenario.sectors():
        band = scenario.band_by_id(sector.band_ref)
        baseline_dbm = _cell_baseline_dbm(scenario, band)
        base_lin = 10.0 ** (baseline_dbm / 10.0)

        rng = propagation.keyed_rng(seed, sector.id, propagation._STREAM_TWIN)
        jitter = cfg.load_jitter_db * rng.standard_normal(t.size)
        meas_rtwp = cfg.measurement_noise_db * rng.standard_normal(t.size)
        meas_rssi = cfg.measurement_noise_db * rng.standard_normal(t.size)

        diurnal = cfg.load_amplitude_db * np.sin(2.0 * np.pi * t / DAY_S)
        if cfg.load_offset_db is None:
            load_lin = np.zeros(t.size)
        else:
            load_dbm = baseline_dbm + cfg.load_offset_db + diurnal + jitter
            load_lin = 10.0 ** (load_dbm / 10.0)

        intf_lin = np.zeros(t.size)
        for intf in scenario.interferers:
            if intf.band_ref != sector.band_ref:
                continue
            c_dbm = interference_at_cell_dbm(intf, site, sector,
                                             band.center_freq_ghz,
                                             scenario.environment)
            active = np.array([intf.active_at(ti) for ti in t])
            intf_lin += active * 10.0 ** (c_dbm / 10.0)

        rtwp = 10.0 * np.log10(base_lin + load_lin + intf_lin) + meas_rtwp

        traffic_dbm = cfg.serving_traffic_dbm + diurnal
        rssi = 10.0 * np.log10(base_lin + load_lin + intf_lin
                               + 10.0 ** (traffic_dbm / 10.0)) + meas_rssi

        series["RTWP"][sector.id] = KpiSeries(sector.id, "RTWP", 0.0, dt_s, rtwp)
        series["RSSI"][sector.id] = KpiSeries(sector.id, "RSSI", 0.0, dt_s, rssi)

    truth = [GroundTruth(i.id, i.position, i.tx_power_dbm, i.band_ref,
                         i.active_intervals)
             for i in scenario.interferers]
    return KpiBatch(series=series, scenario_name=scenario.name,
                    ground_truth=truth)


def excess_over_baseline_db(series: KpiSeries, baseline_window: int) -> np.ndarray:
    """Samples relative to the median of the leading baseline window."""
    n = series.samples.size
    if not (0 < baseline_window < n):
        raise InputError(
            f"baseline_window {baseline_window} must lie in (0, {n})")
    return series.samples - float(np.median(series.samples[:baseline_window]))


def batch_excess(batch: KpiBatch, baseline_window: int,
                 metric: str = "RTWP") -> dict[str, np.ndarray]:
    return {cell: excess_over_baseline_db(batch.get(metric, cell), baseline_window)
            for cell in batch.cells()}


# ---------------------------------------------------------------------------
# Wire format between the physical and twin sides


def write_kpi_csv(batch: KpiBatch, path) -> None:
    """CSV export: timestamp_s,cell_id,metric,value_dbm (fixed ordering)."""
    with open(path, "w", newline="") as fh:
        fh.write("timestamp_s,cell_id,metric,value_dbm\n")
        cells = batch.cells()
        metrics = [m for m in METRICS if m in batch.series]
        any_series = batch.get(metrics[0], cells[0])
        for i, ts in enumerate(any_series.timestamps):
            for metric in metrics:
                for cell in cells:
                    v = batch.get(metric, cell).samples[i]
                    fh.write(f"{ts:.1f},{cell},{metric},{v:.4f}\n")


def read_kpi_csv(path) -> KpiBatch:
    """Parse a KPI CSV back into a batch (no ground truth on this side)."""
    rows: dict[tuple[str, str], list[tuple[float, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"timestamp_s", "cell_id", "metric", "value_dbm"}
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise InputError(f"unexpected KPI CSV header in {path}")
        for row in reader:
            try:
                key = (row["metric"], row["cell_id"])
                rows.setdefault(key, []).append(
                    (float(row["timestamp_s"]), float(row["value_dbm"])))
            except (TypeError, ValueError) as exc:
                raise InputError(f"bad KPI CSV row {row}: {exc}") from exc
    if not rows:
        raise InputError(f"no KPI rows in {path}")
    series: dict[str, dict[str, KpiSeries]] = {}
    for (metric, cell), pairs in rows.items():
        pairs.sort()
        ts = np.array([p[0] for p in pairs])
        dt = float(ts[1] - ts[0]) if ts.size > 1 else 1.0
        series.setdefault(metric, {})[cell] = KpiSeries(
            cell, metric, float(ts[0]), dt, np.array([p[1] for p in pairs]))
    return KpiBatch(series=series)


def write_ground_truth(batch: KpiBatch, path) -> None:
    data = [{"interferer_id": g.interferer_id, "position": list(g.position),
             "tx_power_dbm": g.tx_power_dbm, "band_ref": g.band_ref,
             "active_intervals": [list(p) for p in g.active_intervals]}
            for g in batch.ground_truth]
    with open(path, "w") as fh:
        json.dump({"ground_truth": data}, fh, indent=2)
        fh.write("\n")


def read_ground_truth(path) -> list[GroundTruth]:
    with open(path) as fh:
        data = json.load(fh)
    return [GroundTruth(g["interferer_id"], tuple(g["position"]),
                        g["tx_power_dbm"], g["band_ref"],
                        tuple(tuple(p) for p in g["active_intervals"]))
            for g in data["ground_truth"]]
