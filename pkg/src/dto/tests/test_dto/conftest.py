import pytest
from aqwm.dto import DetectionReport, DocumentRegistry, DocumentRegistryEntry, FeatureCalibration


@pytest.fixture
def empty_document_registry() -> DocumentRegistry:
    return DocumentRegistry()


@pytest.fixture
def document_registry(empty_document_registry: DocumentRegistry) -> DocumentRegistry:
    empty_document_registry.add(
        DocumentRegistryEntry(
            document_kind="fingerprint.aqwm.io/calibration",
            document_version="v1",
        ),
        FeatureCalibration,
    )

    empty_document_registry.add(
        DocumentRegistryEntry(
            document_kind="detect.aqwm.io/report",
            document_version="v1",
        ),
        DetectionReport,
    )

    return empty_document_registry


@pytest.fixture
def calibration_spec() -> dict:
    return {
        "centers": [0.0, 1.0, 0.0, 3.0, 0.5],
        "spreads": [0.1, 0.2, 0.3, 0.4, 0.5],
        "thresholds": [[0.0], [1.0], [0.0], [3.0], [0.5]],
    }


@pytest.fixture
def calibration_manifest(calibration_spec: dict) -> dict:
    return {
        "kind": "fingerprint.aqwm.io/calibration",
        "version": "v1",
        "metadata": {
            "name": "pump-7",
        },
        "spec": calibration_spec,
    }
