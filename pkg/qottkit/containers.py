"""Binary container format for states and operators.

A container is

    b"QOTTKIT\\0" | header length (uint32, little endian) | UTF-8 JSON header | payload

where the payload holds row-major little-endian float64 (re, im) pairs, i.e. the
raw bytes of a numpy `<c16` array. The header records what the payload is and
the register layout needed to rebuild it.

Classes:
    ContainerHeader: The JSON header of a container.

Functions:
    encode_container: Serialize a PureState, DensityOperator or Unitary.
    decode_container: Rebuild the value from container bytes.

Example:
    ```python
    from qottkit.containers import decode_container, encode_container

    blob = encode_container(masker.unitary)
    unitary = decode_container(blob)
    ```
"""

import json
import logging
import struct
from typing import Literal, Optional, TypeAlias, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from qottkit.qudits import DensityOperator, PureState, Register, Unitary

_logger = logging.getLogger(__name__)

CONTAINER_MAGIC = b"QOTTKIT\0"
"""Eight-byte file signature."""

CONTAINER_SCHEMA = "qottkit.container/1"
"""Header schema identifier; decoding rejects any other value."""

ContainerKind: TypeAlias = Literal["pure", "density", "unitary"]
"""Kind of value stored in a container."""

ContainerValue: TypeAlias = Union[PureState, DensityOperator, Unitary]


class ContainerHeader(BaseModel):
    """JSON header of a container.

    Attributes:
        container_schema (str): Always `CONTAINER_SCHEMA`; serialized as `schema`.
        kind (ContainerKind): Value kind.
        labels (list[str]): Register labels (input register for unitaries).
        dims (list[int]): Register dims (input register for unitaries).
        out_labels (list[str] | None): Output register labels of a unitary.
        out_dims (list[int] | None): Output register dims of a unitary.
        flags (dict[str, bool]): Value flags such as `unnormalized`.
    """

    model_config = ConfigDict(populate_by_name=True)

    container_schema: str = Field(default=CONTAINER_SCHEMA, alias="schema")
    kind: ContainerKind
    labels: list[str]
    dims: list[int]
    out_labels: Optional[list[str]] = None
    out_dims: Optional[list[int]] = None
    flags: dict[str, bool] = {}

    def payload_shape(self) -> tuple[int, ...]:
        n = int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1
        if self.kind == "pure":
            return (n,)
        if self.kind == "density":
            return (n, n)
        m = int(np.prod(self.out_dims, dtype=np.int64)) if self.out_dims else 1
        return (m, n)


def _header_for(value: ContainerValue) -> tuple[ContainerHeader, np.ndarray]:
    if isinstance(value, PureState):
        header = ContainerHeader(
            kind="pure",
            labels=list(value.register.labels),
            dims=list(value.register.dims),
            flags={"unnormalized": value.unnormalized},
        )
        return header, value.amplitudes
    if isinstance(value, DensityOperator):
        header = ContainerHeader(
            kind="density",
            labels=list(value.register.labels),
            dims=list(value.register.dims),
            flags={"unnormalized": value.unnormalized},
        )
        return header, value.matrix
    if isinstance(value, Unitary):
        header = ContainerHeader(
            kind="unitary",
            labels=list(value.in_register.labels),
            dims=list(value.in_register.dims),
            out_labels=list(value.out_register.labels),
            out_dims=list(value.out_register.dims),
        )
        return header, value.matrix
    raise ValueError(f"Cannot store a {type(value).__name__} in a container")


def encode_container(value: ContainerValue) -> bytes:
    """Serialize a state or unitary to container bytes.

    Args:
        value (ContainerValue): The value to store.

    Returns:
        bytes: Magic, header length, JSON header and `<c16` payload.

    Raises:
        ValueError: If the value is of an unsupported type.
    """
    header, array = _header_for(value)
    header_bytes = header.model_dump_json(by_alias=True).encode("utf-8")
    payload = np.ascontiguousarray(array, dtype="<c16").tobytes(order="C")
    return CONTAINER_MAGIC + struct.pack("<I", len(header_bytes)) + header_bytes + payload


def read_header(blob: bytes) -> ContainerHeader:
    """Parse and validate only the header of a container."""
    header, _ = _split(blob)
    return header


def _split(blob: bytes) -> tuple[ContainerHeader, bytes]:
    if blob[: len(CONTAINER_MAGIC)] != CONTAINER_MAGIC:
        raise ValueError("Not a qottkit container: bad magic")
    offset = len(CONTAINER_MAGIC)
    if len(blob) < offset + 4:
        raise ValueError("Truncated container header")
    (length,) = struct.unpack("<I", blob[offset : offset + 4])
    offset += 4
    try:
        header = ContainerHeader.model_validate(
            json.loads(blob[offset : offset + length].decode("utf-8"))
        )
    except json.JSONDecodeError as e:
        _logger.error(f"Error parsing container header: {e}")
        raise ValueError(f"Container header is not valid JSON: {e}") from e
    if header.container_schema != CONTAINER_SCHEMA:
        raise ValueError(f"Unsupported container schema {header.container_schema!r}")
    return header, blob[offset + length :]


def decode_container(blob: bytes) -> ContainerValue:
    """Rebuild the value stored in container bytes.

    The rebuilt value passes the same validation as a freshly constructed one.

    Raises:
        ValueError: On bad magic, unsupported schema or a payload that does not
            match the header.
    """
    header, payload = _split(blob)
    shape = header.payload_shape()
    expected = int(np.prod(shape, dtype=np.int64)) * 16
    if len(payload) != expected:
        raise ValueError(
            f"Container payload has {len(payload)} bytes, header implies {expected}"
        )
    array = np.frombuffer(payload, dtype="<c16").reshape(shape)
    register = Register(labels=tuple(header.labels), dims=tuple(header.dims))
    unnormalized = header.flags.get("unnormalized", False)

    if header.kind == "pure":
        return PureState(register=register, amplitudes=array, unnormalized=unnormalized)
    if header.kind == "density":
        return DensityOperator(register=register, matrix=array, unnormalized=unnormalized)
    out_register = Register(
        labels=tuple(header.out_labels or ()), dims=tuple(header.out_dims or ())
    )
    return Unitary(in_register=register, out_register=out_register, matrix=array)
