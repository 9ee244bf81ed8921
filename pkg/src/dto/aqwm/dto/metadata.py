from typing import Annotated, Dict, Optional

from pydantic import BaseModel, Field
from pydantic.functional_validators import AfterValidator

from .validators import validate_document_name


class Metadata(BaseModel):
    """Document metadata"""

    name: Annotated[str, AfterValidator(validate_document_name)]
    """Document name. Must consist of alphanumeric characters, dashes, dots or underscores and must start
    with an alphanumeric character"""

    description: Optional[str] = None
    """Free-form description"""

    labels: Dict[str, str] = Field(default_factory=dict)
    """Document labels, e.g. the tool version that wrote the document"""
