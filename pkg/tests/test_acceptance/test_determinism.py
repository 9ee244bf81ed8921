from aqwm.sim.harness.scenario import run_scenario, scenario_from_dict
from aqwm.sim.utils.documents import save_document


def _metrics_bytes(path, manifest) -> bytes:
    bundle = run_scenario(scenario_from_dict(manifest))
    save_document(path, bundle.model_copy(update={"runtime_s": 0.0}), "metrics")
    return path.read_bytes()


def test_metrics_are_byte_identical(tmp_path, injection_manifest):
    first = _metrics_bytes(tmp_path / "first.json", injection_manifest)
    second = _metrics_bytes(tmp_path / "second.json", injection_manifest)
    assert first == second


def test_eavesdrop_metrics_are_byte_identical(tmp_path, eavesdrop_manifest):
    assert _metrics_bytes(tmp_path / "a.json", eavesdrop_manifest) == _metrics_bytes(
        tmp_path / "b.json", eavesdrop_manifest
    )
