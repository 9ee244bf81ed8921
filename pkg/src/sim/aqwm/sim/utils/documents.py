import json
import logging
from pathlib import Path
from typing import Optional, Type, TypeVar, Union

from aqwm.dto import DEFAULT_DOCUMENT_REGISTRY, DocumentDto, DocumentSpecABC, Metadata
from pydantic import ValidationError

from ..exc import InvalidArgumentError, SignalIOError
from .package_utils import get_version

T = TypeVar("T", bound=DocumentSpecABC)


def validation_error_field(e: ValidationError) -> Optional[str]:
    """Dotted path of the first failing field"""
    errors = e.errors()
    if not errors:
        return None
    return ".".join(str(p) for p in errors[0]["loc"]) or None


def parse_document(manifest: dict, spec_type: Type[T]) -> DocumentDto[T]:
    """Validate a manifest dict into a typed document

    Raises:
        InvalidArgumentError: unknown kind or version, wrong spec type or invalid content
    """
    try:
        return DEFAULT_DOCUMENT_REGISTRY.parse(manifest, spec_type)
    except ValidationError as e:
        raise InvalidArgumentError(str(e), field=validation_error_field(e)) from e
    except KeyError as e:
        raise InvalidArgumentError(str(e), field="kind") from e
    except ValueError as e:
        raise InvalidArgumentError(str(e)) from e


def load_document(path: Union[str, Path], spec_type: Type[T]) -> DocumentDto[T]:
    """Read a versioned JSON document from disk

    Args:
        path: Document file
        spec_type: Expected spec class

    Returns:
        The parsed document

    Raises:
        SignalIOError: the file does not exist or cannot be read
        InvalidArgumentError: the file is not a valid document of the expected kind
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SignalIOError(f"cannot read document {path}: {e}") from e
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"{path} is not valid JSON: {e}") from e
    return parse_document(manifest, spec_type)


def save_document(
    path: Union[str, Path], spec: DocumentSpecABC, name: str, description: Optional[str] = None
) -> DocumentDto:
    """Write a spec wrapped in its versioned document envelope"""
    doc = DocumentDto[type(spec)](
        metadata=Metadata(name=name, description=description, labels={"writer": f"aqwm-sim {get_version()}".strip()}),
        spec=spec,
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(doc.model_dump_json(indent=2), encoding="utf-8")
    logging.info("wrote %s document to %s", doc.kind, path)
    return doc
