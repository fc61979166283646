"""Downlink coverage grid: per-pixel server, RSSI, SINR and throughput.

For every pixel of the service area the grid holds the best-serving
sector (argmax received power, ties to the lexicographically smaller
sector id), wideband RSSI on the serving band (all co-band signals plus
external interference plus noise), SINR against co-channel and external
interference, and Shannon-style capped throughput.

Determinism contract: for a fixed scenario seed the grid is bit-identical
across repeated runs and across worker counts. Per-sector fields use RNG
streams keyed by sector id, and the linear-power reduction always runs
in sorted sector order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import propagation
from .planning import noise_floor_dbm
from .scenario import Scenario

PRUNE_FLOOR_DBM = -130.0       # per-sector powers below this are dropped
COVERAGE_FLOOR_DBM = -110.0    # serving RSRP below this counts as uncovered
SINR_FLOOR_DB = -10.0          # no usable throughput below this SINR


@dataclass(frozen=True)
class AntennaPattern:
    """3GPP-style parabolic sector pattern, capped at the front-to-back ratio."""
    beamwidth_3db_deg: float
    front_to_back_db: float

    def attenuation_db(self, delta_az_deg):
        d = np.abs((np.asarray(delta_az_deg, dtype=float) + 180.0) % 360.0 - 180.0)
        return np.minimum(12.0 * (d / self.beamwidth_3db_deg) ** 2,
                          self.front_to_back_db)


def bearing_deg(dx, dy):
    """Compass bearing of (dx, dy): degrees clockwise from +y."""
    return np.degrees(np.arctan2(dx, dy)) % 360.0


@dataclass
class CoverageGrid:
    x_m: np.ndarray                 # pixel-center eastings, shape (nx,)
    y_m: np.ndarray                 # pixel-center northings, shape (ny,)
    resolution_m: float
    sector_ids: list[str]           # sorted; indexes the arrays below
    sector_band: list[str]
    sector_power_dbm: np.ndarray    # (S, ny, nx), NaN below the prune floor
    best_server: np.ndarray         # (ny, nx) index into sector_ids
    rsrp_dbm: np.ndarray            # serving-sector power, (ny, nx)
    rssi_dbm: np.ndarray
    sinr_db: np.ndarray
    throughput_mbps: np.ndarray
    covered: np.ndarray             # bool, (ny, nx)

    @property
    def shape(self):
        return self.best_server.shape

    def best_server_ids(self) -> np.ndarray:
        return np.asarray(self.sector_ids, dtype=object)[self.best_server]

    def serving_mask(self, sector_ids) -> np.ndarray:
        """Pixels whose best server is one of the given sectors."""
        wanted = {self.sector_ids.index(s) for s in sector_ids}
        return np.isin(self.best_server, sorted(wanted))


def received_power_dbm(site, sector, point_xy, *, environment, fc_ghz, h_ut_m=1.5,
                       condition="NLOS", fading_db=0.0) -> float:
    """EIRP minus pattern attenuation, pathloss and shadow fading at a point."""
    dx = point_xy[0] - site.position[0]
    dy = point_xy[1] - site.position[1]
    d2d = max(math.hypot(dx, dy), propagation.D2D_MIN_M)
    pattern = AntennaPattern(sector.beamwidth_3db_deg, sector.front_to_back_db)
    att = float(pattern.attenuation_db(bearing_deg(dx, dy) - sector.azimuth_deg))
    pl = float(propagation.pathloss_db_clamped(
        d2d, fc_ghz, site.height_m, h_ut_m, environment, condition))
    return sector.tx_power_dbm + sector.antenna_gain_dbi - att - pl - fading_db


def _pixel_centers(area, resolution_m):
    nx = max(1, math.ceil(area.width / resolution_m - 1e-9))
    ny = max(1, math.ceil(area.height / resolution_m - 1e-9))
    x = area.min_x + resolution_m * (np.arange(nx) + 0.5)
    y = area.min_y + resolution_m * (np.arange(ny) + 0.5)
    return x, y


def _transmitter_field(scenario: Scenario, fading, X, Y, tx_id, position,
                       height_m, tx_power_dbm, fc_ghz, gain_dbi=0.0,
                       pattern=None, azimuth_deg=0.0):
    """Received power map of one transmitter over all pixels, dBm.

    LOS/NLOS condition is drawn once per (transmitter, pixel) from the
    LOS probability and frozen by the scenario seed; shadow fading comes
    from the stream keyed by the transmitter id.
    """
    env = scenario.environment
    h_ut = scenario.ut_profile.height_m
    dx = X - position[0]
    dy = Y - position[1]
    d2d = np.maximum(np.hypot(dx, dy), propagation.D2D_MIN_M)

    p_los = propagation.los_probability(d2d, h_ut, env)
    los = propagation.los_condition_mask(scenario.seed, tx_id, p_los)
    h_bs = max(height_m, 1.0)
    pl_los = propagation.pathloss_db_clamped(d2d, fc_ghz, h_bs, h_ut, env, "LOS")
    pl_nlos = propagation.pathloss_db_clamped(d2d, fc_ghz, h_bs, h_ut, env, "NLOS")
    pl = np.where(los, pl_los, pl_nlos)

    sf_std = fading.standard_samples(tx_id, d2d.size).reshape(d2d.shape)
    sigma_los = fading.sigma_db[(env, "LOS")]
    sigma_nlos = fading.sigma_db[(env, "NLOS")]
    sf = sf_std * np.where(los, sigma_los, sigma_nlos)

    power = tx_power_dbm + gain_dbi - pl - sf
    if pattern is not None:
        power = power - pattern.attenuation_db(bearing_deg(dx, dy) - azimuth_deg)
    return power - scenario.ut_profile.body_loss_db


def throughput_mbps(sinr_db, bandwidth_mhz, cap_mbps, efficiency=1.0,
                    sinr_floor_db=SINR_FLOOR_DB):
    """Capped Shannon throughput; zero below the SINR floor."""
    if np.any(np.asarray(cap_mbps) <= 0):
        raise ValueError("cap_mbps must be > 0")
    sinr = np.asarray(sinr_db, dtype=float)
    tput = efficiency * bandwidth_mhz * np.log2(1.0 + 10.0 ** (sinr / 10.0))
    tput = np.minimum(tput, cap_mbps)
    tput = np.where(sinr < sinr_floor_db, 0.0, tput)
    return float(tput) if np.isscalar(sinr_db) else tput


def compute_grid(scenario: Scenario, interferers_active: bool = True,
                 n_workers: int = 1,
                 coverage_floor_dbm: float = COVERAGE_FLOOR_DBM) -> CoverageGrid:
    """Evaluate the full coverage grid for a scenario.

    interferers_active toggles the external interferers' contribution to
    RSSI and SINR; the serving-signal side is unaffected, which isolates
    interference effects in before/after comparisons.
    """
    x, y = _pixel_centers(scenario.area, scenario.grid_resolution_m)
    X, Y = np.meshgrid(x, y)
    fading = propagation.ShadowFadingField(seed=scenario.seed)

    sectors = sorted(((site, sec) for site, sec in scenario.sectors()),
                     key=lambda p: p[1].id)
    sector_ids = [sec.id for _, sec in sectors]
    band_ids = [b.id for b in scenario.bands]
    band_index = {b: i for i, b in enumerate(band_ids)}
    sector_band = [sec.band_ref for _, sec in sectors]

    def sector_field(pair):
        site, sec = pair
        band = scenario.band_by_id(sec.band_ref)
        pattern = AntennaPattern(sec.beamwidth_3db_deg, sec.front_to_back_db)
        return _transmitter_field(
            scenario, fading, X, Y, sec.id, site.position, site.height_m,
            sec.tx_power_dbm, band.center_freq_ghz, gain_dbi=sec.antenna_gain_dbi,
            pattern=pattern, azimuth_deg=sec.azimuth_deg)

    def interferer_field(intf):
        band = scenario.band_by_id(intf.band_ref)
        return _transmitter_field(
            scenario, fading, X, Y, intf.id, intf.position, intf.height_m,
            intf.tx_power_dbm, band.center_freq_ghz)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            fields = list(pool.map(sector_field, sectors))
            ext_fields = list(pool.map(interferer_field, scenario.interferers))
    else:
        fields = [sector_field(p) for p in sectors]
        ext_fields = [interferer_field(i) for i in scenario.interferers]

    power_dbm = np.stack(fields)                      # (S, ny, nx)
    power_lin = 10.0 ** (power_dbm / 10.0)

    # Fixed-order reductions keep results independent of worker count.
    band_signal_lin = np.zeros((len(band_ids),) + X.shape)
    for s, band_ref in enumerate(sector_band):
        band_signal_lin[band_index[band_ref]] += power_lin[s]

    band_ext_lin = np.zeros_like(band_signal_lin)
    if interferers_active:
        for intf, f in zip(scenario.interferers, ext_fields):
            band_ext_lin[band_index[intf.band_ref]] += 10.0 ** (f / 10.0)

    noise_lin = np.array([
        10.0 ** (noise_floor_dbm(b.bandwidth_mhz,
                                 scenario.ut_profile.noise_figure_db) / 10.0)
        for b in scenario.bands])

    best = np.argmax(power_dbm, axis=0)               # first max = lowest id
    rsrp = np.take_along_axis(power_dbm, best[None], axis=0)[0]
    s_lin = 10.0 ** (rsrp / 10.0)

    serving_band = np.asarray([band_index[b] for b in sector_band])[best]
    tot_lin = np.take_along_axis(band_signal_lin, serving_band[None], axis=0)[0]
    ext_lin = np.take_along_axis(band_ext_lin, serving_band[None], axis=0)[0]
    n_lin = noise_lin[serving_band]

    rssi = 10.0 * np.log10(tot_lin + ext_lin + n_lin)
    interference_lin = np.maximum(tot_lin - s_lin, 0.0) + ext_lin + n_lin
    sinr = rsrp - 10.0 * np.log10(interference_lin)

    bw = np.asarray([b.bandwidth_mhz for b in scenario.bands])[serving_band]
    # uncapped bands get a cap far above any achievable Shannon rate
    caps = np.asarray([b.throughput_cap_mbps if b.throughput_cap_mbps
                       else 1e12 for b in scenario.bands])[serving_band]
    tput = throughput_mbps(sinr, bw, caps)

    pruned = np.where(power_dbm >= PRUNE_FLOOR_DBM, power_dbm, np.nan)
    covered = rsrp >= coverage_floor_dbm

    return CoverageGrid(
        x_m=x, y_m=y, resolution_m=scenario.grid_resolution_m,
        sector_ids=sector_ids, sector_band=sector_band,
        sector_power_dbm=pruned, best_server=best, rsrp_dbm=rsrp,
        rssi_dbm=rssi, sinr_db=sinr, throughput_mbps=tput, covered=covered)


def _stats(values: np.ndarray) -> dict:
    return {
        "mean": float(np.mean(values)),
        "p5": float(np.percentile(values, 5)),
        "p50": float(np.percentile(values, 50)),
        "p95": float(np.percentile(values, 95)),
    }


def grid_summary(grid: CoverageGrid) -> dict:
    """Mean and percentiles of RSSI / SINR / throughput over covered pixels."""
    if grid.best_server.size == 0:
        raise ValueError("empty grid")
    mask = grid.covered
    if not np.any(mask):
        raise ValueError("no covered pixels to summarize")
    out = {
        "pixel_count": int(grid.best_server.size),
        "covered_fraction": float(np.mean(mask)),
        "overall": {
            "rssi_dbm": _stats(grid.rssi_dbm[mask]),
            "sinr_db": _stats(grid.sinr_db[mask]),
            "throughput_mbps": _stats(grid.throughput_mbps[mask]),
        },
        "bands": {},
    }
    bands = sorted(set(grid.sector_band))
    for band in bands:
        sectors = [s for s, b in zip(grid.sector_ids, grid.sector_band) if b == band]
        bmask = mask & grid.serving_mask(sectors)
        if not np.any(bmask):
            continue
        out["bands"][band] = {
            "rssi_dbm": _stats(grid.rssi_dbm[bmask]),
            "sinr_db": _stats(grid.sinr_db[bmask]),
            "throughput_mbps": _stats(grid.throughput_mbps[bmask]),
        }
    return out


def write_grid_csv(grid: CoverageGrid, path) -> None:
    """Row-major CSV export, 2 decimal places, plot-ready."""
    ids = grid.best_server_ids()
    with open(path, "w", newline="") as fh:
        fh.write("x_m,y_m,best_server,rssi_dbm,sinr_db,throughput_mbps\n")
        for iy in range(grid.y_m.size):
            for ix in range(grid.x_m.size):
                fh.write(f"{grid.x_m[ix]:.2f},{grid.y_m[iy]:.2f},{ids[iy, ix]},"
                         f"{grid.rssi_dbm[iy, ix]:.2f},{grid.sinr_db[iy, ix]:.2f},"
                         f"{grid.throughput_mbps[iy, ix]:.2f}\n")
