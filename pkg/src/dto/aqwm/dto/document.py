from abc import ABC
from typing import Annotated, ClassVar, Generic, TypeVar

from pydantic import BaseModel, model_validator
from pydantic.functional_validators import AfterValidator

from .metadata import Metadata
from .validators import validate_document_kind, validate_document_version


class DocumentSpecABC(BaseModel, ABC):
    """Spec of a persisted aqwm document. ``@kind`` sets the kind and format version of a subclass."""

    __kind__: ClassVar[str]
    __manifest_version__: ClassVar[str]


T = TypeVar("T", bound=DocumentSpecABC)


class DocumentDto(BaseModel, Generic[T]):
    """Versioned envelope around scenarios, calibrations, models and reports

    ``kind`` and ``version`` default to the ones registered for the spec class, so writers only supply metadata and
    spec.
    """

    kind: Annotated[str, AfterValidator(validate_document_kind)] = None
    """Document kind, ``{group}/{type}``"""

    version: Annotated[str, AfterValidator(validate_document_version)] = None
    """Format version of the spec"""

    metadata: Metadata

    spec: T

    def __init__(self, **data):
        spec = data.get("spec")
        if hasattr(spec, "__kind__") and data.get("kind") is None:
            data["kind"] = spec.__kind__
        if hasattr(spec, "__manifest_version__") and data.get("version") is None:
            data["version"] = spec.__manifest_version__
        super().__init__(**data)

    @model_validator(mode="after")
    def _validate_spec_kind(self) -> "DocumentDto":
        registered = getattr(type(self.spec), "__kind__", None)
        if registered is not None and registered != self.kind:
            raise ValueError(f"document kind {self.kind} does not match its {type(self.spec).__name__} spec")
        return self

    @property
    def qualified_name(self) -> str:
        """``{kind}/{metadata.name}``"""
        return f"{self.kind}/{self.metadata.name}"
