"""
Unit tests for Kraus channels.

Test Coverage:
    - Channel: Completeness validation for channels and subchannels
    - Channel.apply() / Channel.branches(): Action on named subsystems
    - Channel.then(): Composition
    - identity_channel() / unitary_channel(): Trivial channels
    - replace_channel(): Output independent of the input
    - depolarizing_channel(): Strength range and the fully depolarizing limit
"""

import numpy as np
import pytest
from pydantic import ValidationError

from qottkit.channels import (
    Channel,
    depolarizing_channel,
    identity_channel,
    replace_channel,
    unitary_channel,
)
from qottkit.gates import gen_pauli_x, max_entangled
from qottkit.qudits import PureState, Register


def _zero(d: int) -> PureState:
    vector = np.zeros(d)
    vector[0] = 1.0
    return PureState(register=Register.of(q=d), amplitudes=vector)


# ==================== Validation ====================


def test_channel_completeness_validation():
    """
    Test that Channel:
    - Rejects Kraus sets that are not trace preserving
    - Accepts sub-normalized sets flagged as subchannels
    - Rejects subchannels that increase the trace
    """
    register = Register.of(q=2)
    half = np.sqrt(0.5) * np.eye(2)
    with pytest.raises(ValidationError):
        Channel(in_register=register, out_register=register, kraus=(half,))

    sub = Channel(in_register=register, out_register=register, kraus=(half,), trace_preserving=False)
    assert np.allclose(sub.completeness(), 0.5 * np.eye(2))

    with pytest.raises(ValidationError):
        Channel(
            in_register=register,
            out_register=register,
            kraus=(np.eye(2), half),
            trace_preserving=False,
        )


def test_depolarizing_strength_range():
    with pytest.raises(ValueError):
        depolarizing_channel(3, 1.5)


# ==================== Action ====================


def test_depolarizing_limits():
    """
    Test that depolarizing_channel():
    - Is the identity at strength 0
    - Replaces every input with I/d at strength 1
    """
    theta = max_entangled(3, ("E", "C"))
    untouched = depolarizing_channel(3, 0.0).apply(theta, on=("C",))
    assert np.allclose(untouched.matrix, theta.density().matrix)

    scrambled = depolarizing_channel(3, 1.0).apply(theta, on=("C",))
    assert np.allclose(scrambled.matrix, np.eye(9) / 9)


def test_replace_channel_ignores_input():
    target = _zero(3)
    channel = replace_channel(3, target, label="A")
    theta = max_entangled(3, ("E", "A"))
    output = channel.apply(theta, on=("A",))
    assert np.allclose(output.matrix, np.kron(np.eye(3) / 3, target.density().matrix))


def test_branches_mix_to_apply():
    """
    Test that Channel.branches():
    - Returns one vector per Kraus operator
    - Mixes to the output of Channel.apply()
    """
    channel = depolarizing_channel(2, 0.4)
    theta = max_entangled(2, ("E", "C"))
    vectors = channel.branches(theta, on=("C",))
    assert len(vectors) == len(channel.kraus)
    mixture = sum(np.outer(v.amplitudes, v.amplitudes.conj()) for v in vectors)
    assert np.allclose(mixture, channel.apply(theta, on=("C",)).matrix)


def test_then_composes_in_order():
    x = unitary_channel(gen_pauli_x(3))
    twice = x.then(x)
    output = twice.apply(_zero(3))
    assert output.matrix[2, 2] == pytest.approx(1.0)

    assert np.allclose(identity_channel(3).then(x).kraus[0], gen_pauli_x(3).matrix)
