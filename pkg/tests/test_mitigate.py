"""Frequency reassignment recommendations and what-if verification."""

import dataclasses

import pytest

from rfplan.detect import DetectionResult, run_detection
from rfplan.errors import InputError
from rfplan.mitigate import Recommendation, apply, recommend, verify


def detection_for(cells, excess=6.0):
    return DetectionResult(
        affected_cells=tuple(cells), anomaly_flag=bool(cells),
        evidence={c: {"mean_excess_db": excess, "corr_with_seed": 1.0,
                      "cluster": 1} for c in cells},
        threshold_db=3.0)


def test_no_anomaly_is_noop(demo_scenario):
    rec = recommend(demo_scenario, detection_for([]))
    assert rec.changes == ()
    assert "no anomaly" in rec.rationale


def test_single_affected_single_alternative(demo_scenario):
    # restrict the declared bands to the interfered one plus one clean band
    sc = dataclasses.replace(demo_scenario,
                             bands=demo_scenario.bands[:2])   # n78 + n78b
    rec = recommend(sc, detection_for(["A1"]))
    assert rec.changes == (("A1", "n78", "n78b"),)


def test_no_clean_spectrum(demo_scenario):
    sc = dataclasses.replace(demo_scenario, bands=demo_scenario.bands[:1])
    rec = recommend(sc, detection_for(["A1"]))
    assert rec.changes == ()
    assert "no clean spectrum" in rec.rationale


def test_unknown_sector_rejected(demo_scenario):
    with pytest.raises(InputError):
        recommend(demo_scenario, detection_for(["nope"]))


def test_demo_recommendation_moves_all_affected(demo_scenario, demo_batch):
    det = run_detection(demo_batch, baseline_window=15)
    rec = recommend(demo_scenario, det)
    moved = {sec for sec, _, _ in rec.changes}
    assert moved == set(det.affected_cells)
    for _, old, new in rec.changes:
        assert old == "n78"
        assert new in ("n78b", "n257")


def test_recommendation_spreads_load(demo_scenario, demo_batch):
    # consecutive reassignments count against the candidate, so co-sited
    # sectors should not all pile onto one alternative
    det = run_detection(demo_batch, baseline_window=15)
    rec = recommend(demo_scenario, det)
    targets = [new for _, _, new in rec.changes]
    assert len(set(targets)) > 1


def test_apply_empty_is_identity(demo_scenario):
    assert apply(demo_scenario, Recommendation((), "noop")) == demo_scenario


def test_apply_single_change(demo_scenario):
    rec = Recommendation((("A1", "n78", "n257"),), "test")
    post = apply(demo_scenario, rec)
    assert post.sector_by_id("A1")[1].band_ref == "n257"
    others = [c for c in demo_scenario.sector_ids if c != "A1"]
    for c in others:
        assert post.sector_by_id(c)[1] == demo_scenario.sector_by_id(c)[1]
    assert demo_scenario.sector_by_id("A1")[1].band_ref == "n78"  # untouched


def test_apply_involution(demo_scenario):
    fwd = Recommendation((("A1", "n78", "n257"),), "fwd")
    back = Recommendation((("A1", "n257", "n78"),), "back")
    assert apply(apply(demo_scenario, fwd), back) == demo_scenario


def test_apply_rejects_unknowns(demo_scenario):
    with pytest.raises(InputError):
        apply(demo_scenario, Recommendation((("zz", "n78", "n257"),), "r"))
    with pytest.raises(InputError):
        apply(demo_scenario, Recommendation((("A1", "n78", "zz"),), "r"))


def test_verify_identity_scenario(demo_scenario):
    v = verify(demo_scenario, demo_scenario, ["A1", "A2"])
    assert v.delta_db == pytest.approx(0.0)
    assert not v.improved
    assert v.affected_pixel_count > 0


def test_verify_demo_loop(demo_scenario, demo_batch):
    det = run_detection(demo_batch, baseline_window=15)
    rec = recommend(demo_scenario, det)
    post = apply(demo_scenario, rec)
    v = verify(demo_scenario, post, det.affected_cells)
    assert v.improved
    assert v.delta_db > 3.0
    assert v.residual_affected == ()
