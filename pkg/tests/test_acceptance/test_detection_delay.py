import numpy as np
from aqwm.sim.harness.scenario import override_scenario, run_scenario, scenario_from_dict

SEEDS = range(20)


def _reseeded(manifest: dict, seed: int, **overrides):
    scenario = scenario_from_dict(manifest)
    source = scenario.source.model_copy(update={"seed": 100 + seed})
    attack = scenario.attack.model_copy(update={"seed": 200 + seed})
    return override_scenario(scenario, source=source.model_dump(), attack=attack.model_dump(), **overrides)


def test_injection_alarm_after_one_window(injection_manifest):
    bundle = run_scenario(scenario_from_dict(injection_manifest))
    report = bundle.detection

    assert report.alarm_window == 5
    assert report.alarm_time_s == 0.6
    assert all(m <= report.threshold for m in report.per_window_mismatch[:5])


def test_injection_alarm_after_one_window_across_seeds(injection_manifest):
    # erased soft bits count against the injected window, so a single window is enough
    for seed in SEEDS:
        report = run_scenario(_reseeded(injection_manifest, seed)).detection
        assert report.alarm_time_s == 0.6, f"seed {seed}"


def test_injection_alarm_without_erasure_margin(injection_manifest):
    # hard decisions alone: an injected window of random bits passes with probability 56 / 1024
    reports = [run_scenario(_reseeded(injection_manifest, seed, erasure_margin=0.0)).detection for seed in SEEDS]

    assert all(r.alarm for r in reports)
    assert all(r.alarm_window >= 5 for r in reports)
    assert np.mean([r.alarm_time_s == 0.6 for r in reports]) >= 0.75
