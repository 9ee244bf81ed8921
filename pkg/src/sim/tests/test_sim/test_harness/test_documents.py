import json

import pytest
from aqwm.dto import FeatureCalibration, Scenario
from aqwm.sim.exc import InvalidArgumentError, SignalIOError
from aqwm.sim.utils.documents import load_document, parse_document, save_document


def test_parse_document(scenario_manifest):
    doc = parse_document(scenario_manifest, Scenario)

    assert doc.metadata.name == "static-injection"
    assert doc.spec.window_count == 10
    assert doc.spec.attack.start_sample == 500


def test_parse_document_invalid_field(scenario_manifest):
    scenario_manifest["spec"]["threshold"] = 1.5
    with pytest.raises(InvalidArgumentError) as e:
        parse_document(scenario_manifest, Scenario)
    assert e.value.field == "spec.threshold"


def test_parse_document_unknown_kind(scenario_manifest):
    scenario_manifest["kind"] = "harness.aqwm.io/unknown"
    with pytest.raises(InvalidArgumentError):
        parse_document(scenario_manifest, Scenario)


def test_parse_document_wrong_spec_type(scenario_manifest):
    with pytest.raises(InvalidArgumentError):
        parse_document(scenario_manifest, FeatureCalibration)


def test_save_and_load(tmp_path, calibration: FeatureCalibration):
    path = tmp_path / "nested" / "calibration.json"
    saved = save_document(path, calibration, "calib", "fingerprint calibration")

    assert saved.kind == "fingerprint.aqwm.io/calibration"
    loaded = load_document(path, FeatureCalibration)
    assert loaded.spec == calibration
    assert loaded.metadata.description == "fingerprint calibration"
    assert json.loads(path.read_text())["version"] == "v1"


def test_load_document_errors(tmp_path):
    with pytest.raises(SignalIOError):
        load_document(tmp_path / "missing.json", Scenario)

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(InvalidArgumentError):
        load_document(broken, Scenario)


def test_parse_document_invalid_metadata(scenario_manifest):
    scenario_manifest["metadata"]["name"] = "static injection"
    with pytest.raises(InvalidArgumentError) as e:
        parse_document(scenario_manifest, Scenario)
    assert e.value.field == "metadata.name"


def test_parse_document_missing_section(scenario_manifest):
    del scenario_manifest["spec"]
    with pytest.raises(InvalidArgumentError):
        parse_document(scenario_manifest, Scenario)
