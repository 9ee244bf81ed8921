from typing import Annotated, Callable, Dict, Type, TypeVar

from pydantic import BaseModel, Field
from pydantic.functional_validators import BeforeValidator

from .document import DocumentDto, DocumentSpecABC
from .validators import validate_document_kind, validate_document_version

T = TypeVar("T", bound=DocumentSpecABC)


class DocumentRegistryEntry(BaseModel):
    """Key of a registered document kind"""

    document_kind: Annotated[str, BeforeValidator(validate_document_kind)]

    document_version: Annotated[str, BeforeValidator(validate_document_version)]
    """In the form v<major>(alpha|beta)<minor>"""

    def __hash__(self):
        return hash((self.document_kind, self.document_version))


class DocumentRegistry(BaseModel):
    """Maps document kinds and versions to the spec classes that read them"""

    entries: Dict[DocumentRegistryEntry, Type[DocumentSpecABC]] = Field(default_factory=dict)

    def add(self, entry: DocumentRegistryEntry, spec: Type[DocumentSpecABC]) -> None:
        if entry in self.entries:
            raise ValueError(f"document {entry.document_kind} ({entry.document_version}) already exists")
        self.entries[entry] = spec

    def get_document_cls(self, kind: str, version: str) -> Type[DocumentSpecABC]:
        """Spec class registered for a kind and version

        Raises:
            KeyError: nothing is registered under that kind and version
        """
        entry = DocumentRegistryEntry(document_kind=kind, document_version=version)
        try:
            return self.entries[entry]
        except KeyError as e:
            raise KeyError(f"document {kind} ({version}) not found") from e

    def parse(self, manifest: dict, spec_type: Type[T]) -> DocumentDto[T]:
        """Validate a manifest into a document whose spec is a ``spec_type``

        Args:
            manifest: Parsed JSON with kind, version, metadata and spec
            spec_type: Spec class the caller expects

        Returns:
            The typed document

        Raises:
            KeyError: the kind and version are not registered
            ValueError: a section is missing, the kind holds another spec type or the content is invalid
        """
        try:
            kind = manifest["kind"]
            version = manifest["version"]
            metadata = manifest["metadata"]
            spec = manifest["spec"]
        except (KeyError, TypeError) as e:
            raise ValueError("document manifest needs kind, version, metadata and spec") from e

        cls = self.get_document_cls(kind, version)
        if not issubclass(cls, spec_type):
            raise ValueError(f"{kind} ({version}) documents hold {cls.__name__}, expected {spec_type.__name__}")
        return DocumentDto[cls].model_validate({"kind": kind, "version": version, "metadata": metadata, "spec": spec})


DEFAULT_DOCUMENT_REGISTRY = DocumentRegistry()
"""Registry the ``@kind`` decorator fills by default"""


def kind(
    document_group: str,
    document_type: str,
    document_version: str,
    registry: DocumentRegistry = DEFAULT_DOCUMENT_REGISTRY,
) -> Callable[[Type[DocumentSpecABC]], Type[DocumentSpecABC]]:
    """Class decorator registering a spec class as kind ``{document_group}/{document_type}``

    Args:
        document_group: API group, see ``_rg``
        document_type: Type name within the group
        document_version: Format version, in the form v<major>(alpha|beta)<minor>
        registry: Registry to add the class to
    """

    def inner(cls: Type[DocumentSpecABC]) -> Type[DocumentSpecABC]:
        kind = f"{document_group}/{document_type}"
        cls.__kind__ = kind
        cls.__manifest_version__ = document_version
        registry.add(DocumentRegistryEntry(document_kind=kind, document_version=document_version), cls)
        return cls

    return inner
