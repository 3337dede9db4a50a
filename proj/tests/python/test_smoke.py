"""End-to-end smoke checks for the python bindings."""

import json

import pytest

import ratewatch as rw


def test_builtin_table():
    profiles = rw.builtin_profiles()
    assert len(profiles) == 6
    names = {p.name for p in profiles}
    assert "OnePlus Nord N200" in names
    assert rw.find_builtin("pixel 6").caps(rw.Sensor.ACCELEROMETER).f_min == 7.0
    assert rw.find_builtin("no such phone") is None


def test_resolve_and_thresholds():
    p = rw.find_builtin("OnePlus Nord N200")
    fastest = rw.RateRequest.named(rw.DelayConstant.FASTEST, False)
    assert rw.resolve_request(p, rw.Sensor.ACCELEROMETER, fastest) == 206.0
    fastest_perm = rw.RateRequest.named(rw.DelayConstant.FASTEST, True)
    assert rw.resolve_request(p, rw.Sensor.ACCELEROMETER, fastest_perm) == 416.0

    thresholds = rw.thresholds_for(p)
    assert thresholds.at(rw.Sensor.ACCELEROMETER) == 5.5
    assert thresholds.at(rw.Sensor.GYROSCOPE) == 1.5


def test_bad_input_maps_to_value_error():
    p = rw.find_builtin("OnePlus Nord N200")
    with pytest.raises(ValueError):
        rw.resolve_request(p, rw.Sensor.ACCELEROMETER, rw.RateRequest.custom(-1.0))


def test_simulate_detect_roundtrip():
    scenario = rw.canned_scenario("standard_game")
    scenario.seed = 7
    result = rw.simulate(scenario)
    report = rw.detect_all(result.traces, scenario.profile)
    assert report.any_usage
    finding = report.sensors[rw.Sensor.ACCELEROMETER]
    assert finding.threshold_hz == 5.5
    assert len(finding.intervals) == 1
    assert finding.intervals[0].estimated_rate == pytest.approx(52.0, abs=0.5)

    doc = json.loads(report.to_json())
    assert doc["device"] == "OnePlus Nord N200"
    assert doc["any_usage"] is True

    score = rw.score_report(report, result.truth)
    assert score.tp == 1
    assert score.fp == 0


def test_cli_pipeline(tmp_path):
    out = str(tmp_path / "run")
    assert rw.cli(["simulate", "--scenario", "sdk_burst", "--out", out]) == 0
    assert rw.cli(["detect", "--trace", out + "/trace.csv", "--profile",
                   "oneplus nord n200", "--truth", out + "/ground_truth.json",
                   "--out", out]) == 0
    doc = json.loads((tmp_path / "run" / "report.json").read_text())
    assert doc["sensors"]["accelerometer"]["any_usage"] is True
    # Without a profile the detector refuses to guess.
    assert rw.cli(["detect", "--trace", out + "/trace.csv", "--out", out]) == 1
