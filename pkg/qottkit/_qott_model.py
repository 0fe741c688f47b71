"""
qottkit Base Model Module.

Internal class.

This module defines the base model class for all qottkit value objects, providing
common functionality for serialization, string representation, and simulator
management.

The `_QottBaseModel` class extends Pydantic's BaseModel to provide:
- Simulator instance management, so models can delegate to their services
- Standard serialization methods (JSON, dictionary)
- numpy-aware JSON encoding of complex arrays
- String representation methods

Classes:
    _QottBaseModel: Base class for all qottkit model objects.
"""

import json
from typing import TYPE_CHECKING, Any

import numpy as np
from pydantic import BaseModel, ConfigDict

if TYPE_CHECKING:
    from qottkit.simulator import QottSimulator


def _encode_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return {"re": value.real.tolist(), "im": value.imag.tolist()}
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return str(value)


class _QottBaseModel(BaseModel):
    """
    Base model class for qottkit objects.

    This class provides common functionality for all qottkit model objects,
    including serialization and simulator management. Models are frozen: every
    value is immutable after construction and safe to share between workers.

    Attributes:
        _simulator (QottSimulator | None): Internal reference to the simulator
            whose services this model delegates to.

    Methods:
        __str__(): Return string representation of the model instance.
        __repr__(): Return string representation of the model instance.
        to_json(): Serialize the model instance to a JSON string.
        to_dict(): Convert the model instance to a dictionary.
        _set_simulator(simulator): Set the QottSimulator instance for this object.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    _simulator: Any = None

    def __str__(self):
        return f"{type(self).__name__}"

    def __repr__(self):
        return f"{self.__class__}({self.model_dump()})"

    def to_json(self) -> str:
        """
        Serializes the model to a JSON-formatted string.

        Returns:
            str: A JSON string representation of the model, with indentation for readability.

        Notes:
            - complex numpy arrays are written as `{"re": [...], "im": [...]}`.
            - This method is a thin convenience wrapper. To customize serialization options,
              call json.dumps(...) directly on a `dict` of the model.
        """

        return json.dumps(
            self.model_dump(), indent=4, sort_keys=False, default=_encode_default
        )

    def to_dict(self) -> dict:
        """
        Return a dictionary representation of the model by delegating to self.model_dump().

        Returns:
            dict: A mapping of field names to their values. numpy arrays are kept as arrays.
        """

        return self.model_dump()

    def _set_simulator(self, simulator: "QottSimulator") -> None:
        """
        Set the `QottSimulator` instance for this object.
        Also recursively sets the simulator on all _QottBaseModel attributes
        """
        self._simulator = simulator

        for field_name in self.__class__.model_fields.keys():
            value = getattr(self, field_name, None)
            if value is None:
                continue

            if isinstance(value, _QottBaseModel):
                value._set_simulator(simulator)
            elif isinstance(value, (list, tuple)):
                for item in value:
                    if isinstance(item, _QottBaseModel):
                        item._set_simulator(simulator)
            elif isinstance(value, dict):
                for item in value.values():
                    if isinstance(item, _QottBaseModel):
                        item._set_simulator(simulator)

    def _require_simulator(self) -> "QottSimulator":
        if self._simulator is None:
            raise RuntimeError(
                f"{type(self).__name__} is not attached to a QottSimulator."
            )
        return self._simulator
