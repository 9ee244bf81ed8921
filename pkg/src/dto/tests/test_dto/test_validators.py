from typing import Optional

import pytest
from aqwm.dto.validators import (
    validate_document_kind,
    validate_document_name,
    validate_document_version,
    validate_non_decreasing,
    validate_probability,
)


@pytest.mark.parametrize(
    "test_value,expected",
    [
        ("aqwm.io/testGroup", True),
        ("harness.aqwm.io/scenario", True),
        ("lstm.aqwm.io/model", True),
        ("harness.aqwm.io/scenario/extra", False),
        ("foobar", False),
    ],
)
def test_validate_kind(test_value: Optional[str], expected: bool):
    if expected:
        assert test_value == validate_document_kind(test_value)
    else:
        with pytest.raises(ValueError):
            validate_document_kind(test_value)


@pytest.mark.parametrize(
    "test_value,expected",
    [
        ("v1alpha1", True),
        ("v1beta1", True),
        ("v2", True),
        ("v3alpha2", True),
        ("v1", True),
        ("v1alpha", False),
        ("v1beta", False),
        ("v1alpha1beta1", False),
        ("foobar", False),
        ("v100", True),
        ("v99999999", True),
        ("v1545325alpha6546464564", True),
    ],
)
def test_validate_document_version(test_value: Optional[str], expected: bool):
    if expected:
        assert test_value == validate_document_version(test_value)
    else:
        with pytest.raises(ValueError):
            validate_document_version(test_value)


@pytest.mark.parametrize(
    "test_value,expected",
    [
        ("scenario", True),
        ("static-injection_0.5s", True),
        ("0day", True),
        ("-leading-dash", False),
        ("pump 7", False),
        ("", False),
    ],
)
def test_validate_document_name(test_value: str, expected: bool):
    if expected:
        assert test_value == validate_document_name(test_value)
    else:
        with pytest.raises(ValueError):
            validate_document_name(test_value)


@pytest.mark.parametrize("test_value,expected", [(0.0, True), (0.25, True), (1.0, True), (-0.01, False), (1.5, False)])
def test_validate_probability(test_value: float, expected: bool):
    if expected:
        assert test_value == validate_probability(test_value)
    else:
        with pytest.raises(ValueError):
            validate_probability(test_value)


def test_validate_non_decreasing():
    assert validate_non_decreasing([-1.0, 0.0, 0.0, 2.0]) == [-1.0, 0.0, 0.0, 2.0]
    assert validate_non_decreasing([]) == []

    with pytest.raises(ValueError):
        validate_non_decreasing([0.0, -1.0])
