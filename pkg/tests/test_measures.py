"""
Unit tests for entropies and distances.

Test Coverage:
    - von_neumann_entropy(): Pure and maximally mixed states, PSD validation
    - spectrum_entropy() / ensemble_spectrum(): Gram-matrix spectra
    - trace_distance() / fidelity(): Extremal values and register checks
    - negativity(): Maximally entangled states
    - shannon_entropy() / mutual_information(): Classical tables
"""

import numpy as np
import pytest

from qottkit.gates import max_entangled
from qottkit.measures import (
    ensemble_spectrum,
    fidelity,
    mutual_information,
    negativity,
    shannon_entropy,
    spectrum_entropy,
    trace_distance,
    von_neumann_entropy,
)
from qottkit.qudits import DensityOperator, PureState, Register


def _basis_state(d: int, k: int) -> PureState:
    vector = np.zeros(d)
    vector[k] = 1.0
    return PureState(register=Register.of(q=d), amplitudes=vector)


# ==================== Entropies ====================


def test_von_neumann_entropy():
    """
    Test that von_neumann_entropy():
    - Is zero on pure states
    - Is log₂d on the maximally mixed state
    """
    assert von_neumann_entropy(_basis_state(3, 1)) == pytest.approx(0.0, abs=1e-12)
    mixed = DensityOperator.maximally_mixed(Register.of(q=5))
    assert von_neumann_entropy(mixed) == pytest.approx(np.log2(5))


def test_spectrum_entropy_rejects_negative_entries():
    assert spectrum_entropy([0.5, 0.5, 0.0]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        spectrum_entropy([1.2, -0.2])


def test_ensemble_spectrum_matches_operator_spectrum():
    rng = np.random.default_rng(5)
    vectors = [rng.normal(size=6) + 1j * rng.normal(size=6) for _ in range(3)]
    operator = sum(np.outer(v, v.conj()) for v in vectors)
    nonzero = np.sort(np.linalg.eigvalsh(operator))[-3:]
    assert np.allclose(np.sort(ensemble_spectrum(vectors)), nonzero)


def test_shannon_and_mutual_information():
    """
    Test that shannon_entropy() and mutual_information():
    - Give log₂n for a uniform distribution
    - Give zero for an independent table and H(X) for a perfectly correlated one
    """
    assert shannon_entropy([0.25] * 4) == pytest.approx(2.0)
    assert mutual_information(np.ones((3, 4))) == pytest.approx(0.0, abs=1e-12)
    assert mutual_information(np.eye(3)) == pytest.approx(np.log2(3))


# ==================== Distances ====================


def test_trace_distance_and_fidelity():
    """
    Test that trace_distance() and fidelity():
    - Are 1 and 0 for orthogonal states
    - Are 0 and 1 for identical states
    - Reject states of different dimensions
    """
    zero, one = _basis_state(3, 0), _basis_state(3, 1)
    assert trace_distance(zero, one) == pytest.approx(1.0)
    assert fidelity(zero, one) == pytest.approx(0.0, abs=1e-12)
    assert trace_distance(zero, zero.density()) == pytest.approx(0.0, abs=1e-12)
    assert fidelity(zero.density(), zero.density()) == pytest.approx(1.0)

    mixed = DensityOperator.maximally_mixed(Register.of(q=3))
    assert fidelity(zero, mixed) == pytest.approx(1 / 3)

    with pytest.raises(ValueError):
        trace_distance(zero, _basis_state(2, 0))


def test_negativity_of_max_entangled():
    for d in (2, 3):
        assert negativity(max_entangled(d), side=("C",)) == pytest.approx((d - 1) / 2)
    product = DensityOperator.maximally_mixed(Register.of(E=2, C=2))
    assert negativity(product, side=("C",)) == pytest.approx(0.0, abs=1e-12)
