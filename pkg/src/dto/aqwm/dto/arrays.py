"""numpy-backed field types.

Arrays are validated into float64 (or int8 for sign sequences) copies and serialized as plain JSON lists in
row-major order. Python's float repr round-trips exactly, so a document written and read back reproduces the
arrays bit for bit.
"""

from typing import Annotated, Any, List

import numpy as np
from pydantic import BaseModel, ConfigDict, PlainSerializer
from pydantic.functional_validators import BeforeValidator


def _as_float_array(val: Any, ndim: int) -> np.ndarray:
    arr = np.array(val, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("array contains non-finite values")
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _as_signs(val: Any) -> np.ndarray:
    arr = np.array(val)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d sequence, got shape {arr.shape}")
    if arr.size and not np.all((arr == 1) | (arr == -1)):
        raise ValueError("every value must be exactly +1 or -1")
    return _readonly(arr.astype(np.int8))


_to_list = PlainSerializer(lambda a: a.tolist(), return_type=List)

FloatVector = Annotated[np.ndarray, BeforeValidator(lambda v: _as_float_array(v, 1)), _to_list]
"""Writable finite 1-d float64 array"""

FrozenFloatVector = Annotated[np.ndarray, BeforeValidator(lambda v: _readonly(_as_float_array(v, 1))), _to_list]
"""Read-only finite 1-d float64 array"""

FloatMatrix = Annotated[np.ndarray, BeforeValidator(lambda v: _as_float_array(v, 2)), _to_list]
"""Writable finite 2-d float64 array"""

SignVector = Annotated[np.ndarray, BeforeValidator(_as_signs), _to_list]
"""Read-only 1-d int8 array of +1/-1 values"""


class ArrayModel(BaseModel):
    """Base model for DTOs holding numpy arrays.

    pydantic compares models through their field dicts, which is ambiguous for arrays; equality here is
    element-wise and shape-aware instead.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    def __eq__(self, other: object) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        for name in type(self).model_fields:
            a = getattr(self, name)
            b = getattr(other, name)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if not (isinstance(a, np.ndarray) and isinstance(b, np.ndarray) and np.array_equal(a, b)):
                    return False
            elif a != b:
                return False
        return True

    __hash__ = None
