import re
from typing import List

RX_DOCUMENT_NAME = re.compile(r"[a-zA-Z0-9][a-zA-Z0-9\-_\.]*")
RX_DOCUMENT_KIND = re.compile(r"^(?:[a-zA-Z0-9][a-zA-Z0-9\-_\.]*)\/(?:[a-zA-Z0-9][a-zA-Z0-9\-_\.]*)$")
RX_DOCUMENT_VERSION = re.compile(r"^v[0-9]+(?:(?:alpha|beta)[0-9]+)?$")


def validate_document_version(val: str) -> str:
    if not RX_DOCUMENT_VERSION.match(val):
        raise ValueError(f"Invalid document version: {val}")
    return val


def validate_document_kind(val: str) -> str:
    if not RX_DOCUMENT_KIND.match(val):
        raise ValueError(f"Invalid document kind: {val}")
    return val


def validate_document_name(val: str) -> str:
    if not RX_DOCUMENT_NAME.fullmatch(val):
        raise ValueError(f"Invalid document name: {val}")
    return val


def validate_probability(val: float) -> float:
    if not 0.0 <= val <= 1.0:
        raise ValueError(f"Probability out of range [0, 1]: {val}")
    return val


def validate_non_decreasing(val: List[float]) -> List[float]:
    for a, b in zip(val, val[1:]):
        if b < a:
            raise ValueError(f"Values must be non-decreasing: {val}")
    return val
