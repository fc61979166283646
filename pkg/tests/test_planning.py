"""Link budget, MAPL, cell radius and hexagonal site count."""

import math

import pytest

from rfplan.errors import InfeasibleError
from rfplan.planning import (LinkBudget, cell_radius_m, hexagon_area_m2,
                             max_allowed_pathloss_db, noise_floor_dbm,
                             plan_scenario, receiver_sensitivity_dbm,
                             required_site_count)
from rfplan.propagation import PathlossQuery, pathloss_db


def budget(**kw):
    base = dict(tx_power_dbm=43.0, tx_antenna_gain_dbi=0.0,
                noise_figure_db=7.0, bandwidth_mhz=100.0)
    base.update(kw)
    return LinkBudget(**base)


def test_sensitivity_oracle():
    # -174 + 10*log10(100e6) + 7 = -87, summed independently
    assert receiver_sensitivity_dbm(budget()) == pytest.approx(-87.0)


def test_sensitivity_thermal_floor():
    b = budget(noise_figure_db=0.0, bandwidth_mhz=1e-6)   # 1 Hz
    assert receiver_sensitivity_dbm(b) == pytest.approx(-174.0)


def test_sensitivity_linear_in_nf():
    delta = receiver_sensitivity_dbm(budget(noise_figure_db=10.0)) \
        - receiver_sensitivity_dbm(budget(noise_figure_db=7.0))
    assert delta == pytest.approx(3.0)


def test_mapl_identity():
    # sensitivity = -174 + 70 + 4 = -100; MAPL = 30 - (-100) = 130
    b = LinkBudget(tx_power_dbm=30.0, tx_antenna_gain_dbi=0.0,
                   noise_figure_db=4.0, bandwidth_mhz=10.0)
    assert receiver_sensitivity_dbm(b) == pytest.approx(-100.0)
    assert max_allowed_pathloss_db(b) == pytest.approx(130.0)


def test_mapl_demo_budget():
    b = LinkBudget(tx_power_dbm=43.0, tx_antenna_gain_dbi=17.0,
                   rx_antenna_gain_dbi=0.0, cable_loss_db=3.0,
                   interference_margin_db=4.0, shadow_margin_db=6.0,
                   noise_figure_db=7.0, bandwidth_mhz=100.0)
    # 43 + 17 - 3 - 4 - 6 - (-87) = 134
    assert max_allowed_pathloss_db(b) == pytest.approx(134.0)


def test_mapl_linear_in_margin():
    b1 = budget(interference_margin_db=0.0)
    b2 = budget(interference_margin_db=2.0)
    assert max_allowed_pathloss_db(b1) - max_allowed_pathloss_db(b2) \
        == pytest.approx(2.0)


def test_negative_loss_rejected():
    with pytest.raises(ValueError):
        budget(cable_loss_db=-1.0)


def test_cell_radius_inverts_pathloss_example():
    r = cell_radius_m(83.14, "UMa", "LOS", 3.5, 25.0, 1.5)
    assert r == pytest.approx(100.0, abs=0.1)


def test_cell_radius_infeasible():
    with pytest.raises(InfeasibleError):
        cell_radius_m(10.0, "UMa", "NLOS", 3.5, 25.0, 1.5)


def test_radius_smaller_at_28ghz():
    r35 = cell_radius_m(134.0, "UMa", "NLOS", 3.5, 25.0, 1.5)
    r28 = cell_radius_m(134.0, "UMa", "NLOS", 28.0, 25.0, 1.5)
    assert r28 < r35


def test_radius_round_trip():
    mapl = 134.0
    r = cell_radius_m(mapl, "UMa", "NLOS", 3.5, 25.0, 1.5)
    pl = pathloss_db(PathlossQuery(r, 3.5, 25.0, 1.5, "UMa", "NLOS"))
    assert mapl - 0.05 <= pl <= mapl


def test_site_count_hexagon_oracle():
    # one hexagon of circumradius 1 km covers (3*sqrt(3)/2) km^2 = 2.598 km^2
    assert hexagon_area_m2(1000.0) == pytest.approx(2.598e6, rel=1e-3)
    assert required_site_count(2.598e6, 1000.0) == 1
    assert required_site_count(2.599e6, 1000.0) == 2


def test_site_count_quadratic_in_radius():
    n_full = required_site_count(1e8, 1000.0)
    n_half = required_site_count(1e8, 500.0)
    assert n_half == pytest.approx(4 * n_full, abs=4)


def test_site_count_rejects_nonpositive():
    with pytest.raises(ValueError):
        required_site_count(0.0, 100.0)


def test_plan_scenario_per_band(demo_scenario):
    results = plan_scenario(demo_scenario)
    by_band = {r.band_id: r for r in results}
    assert set(by_band) == {"n78", "n78b", "n257"}
    assert by_band["n257"].cell_radius_m < by_band["n78"].cell_radius_m
    assert by_band["n257"].site_count > by_band["n78"].site_count
    # 3.5 and 3.7 GHz share the budget, radii should be close and ordered
    assert by_band["n78b"].cell_radius_m < by_band["n78"].cell_radius_m
    for r in results:
        assert r.site_count >= 1
        assert math.isfinite(r.mapl_db)
