"""
Unit tests for the binary container format.

Test Coverage:
    - encode_container() / decode_container(): Unitaries and density operators
    - read_header(): Header fields and the `schema` alias
    - decode_container(): Bad magic, foreign schema, truncated payloads and logged header errors
"""

import json
import struct

import numpy as np
import pytest
from pytest_mock import MockerFixture

from qottkit.containers import (
    CONTAINER_MAGIC,
    decode_container,
    encode_container,
    read_header,
)
from qottkit.gates import fourier, max_entangled
from qottkit.qudits import DensityOperator, Unitary


# ==================== Encoding ====================


def test_unitary_container(simulator):
    """
    Test that encode_container() / decode_container():
    - Preserve both registers of a relabeling unitary
    - Preserve the matrix exactly
    """
    masker = simulator.maskers.get_masker("minimal", 3)
    blob = encode_container(masker.unitary)
    assert blob.startswith(CONTAINER_MAGIC)

    header = read_header(blob)
    assert header.kind == "unitary"
    assert header.out_labels == list(masker.unitary.out_register.labels)

    decoded = decode_container(blob)
    assert isinstance(decoded, Unitary)
    assert decoded.out_register == masker.unitary.out_register
    assert np.array_equal(decoded.matrix, masker.unitary.matrix)


def test_density_container():
    rho = max_entangled(3, ("E", "C")).density()
    decoded = decode_container(encode_container(rho))
    assert isinstance(decoded, DensityOperator)
    assert decoded.register.labels == ("E", "C")
    assert np.allclose(decoded.matrix, rho.matrix)


def test_header_uses_schema_alias():
    blob = encode_container(fourier(3))
    offset = len(CONTAINER_MAGIC)
    (length,) = struct.unpack("<I", blob[offset : offset + 4])
    raw = json.loads(blob[offset + 4 : offset + 4 + length])
    assert raw["schema"] == "qottkit.container/1"


# ==================== Rejection ====================


def test_decode_rejects_malformed_blobs():
    """
    Test that decode_container():
    - Rejects a wrong magic
    - Rejects a foreign header schema
    - Rejects a payload shorter than the header implies
    - Rejects a header that is not JSON
    """
    blob = encode_container(fourier(3))

    with pytest.raises(ValueError, match="magic"):
        decode_container(b"NOTQOTT\0" + blob[len(CONTAINER_MAGIC) :])

    header = json.dumps({"schema": "other/9", "kind": "pure", "labels": ["q"], "dims": [2]}).encode()
    foreign = CONTAINER_MAGIC + struct.pack("<I", len(header)) + header + b"\0" * 32
    with pytest.raises(ValueError, match="schema"):
        decode_container(foreign)

    with pytest.raises(ValueError, match="payload"):
        decode_container(blob[:-16])

    garbage = CONTAINER_MAGIC + struct.pack("<I", 3) + b"{{{"
    with pytest.raises(ValueError):
        decode_container(garbage)


def test_decode_logs_header_errors(mocker: MockerFixture):
    mock_error = mocker.patch("qottkit.containers._logger.error")
    garbage = CONTAINER_MAGIC + struct.pack("<I", 3) + b"{{{"
    with pytest.raises(ValueError, match="not valid JSON"):
        decode_container(garbage)
    mock_error.assert_called_once()
