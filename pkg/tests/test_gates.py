"""
Unit tests for the generalized Pauli gates, the Fourier gate and Bell states.

Test Coverage:
    - gen_pauli_x() / gen_pauli_z(): Order d and the Weyl commutation relation
    - weyl(): Exponents taken mod d
    - fourier() / parity(): Unitarity, F Z F† = X and F² = parity
    - controlled() / controlled_power(): Block structure
    - max_entangled() / bell_basis() / bell_projectors(): Orthonormal Bell basis
"""

import numpy as np
import pytest

from qottkit.gates import (
    bell_basis,
    bell_projectors,
    controlled,
    controlled_power,
    fourier,
    gen_pauli_x,
    gen_pauli_z,
    max_entangled,
    parity,
    weyl,
)


# ==================== Pauli Group ====================


def test_pauli_order_and_commutation():
    """
    Test that X and Z:
    - Have order d
    - Satisfy Z X = ω X Z with ω = exp(2πi/d)
    """
    for d in (2, 3, 5):
        x, z = gen_pauli_x(d).matrix, gen_pauli_z(d).matrix
        assert np.allclose(np.linalg.matrix_power(x, d), np.eye(d))
        assert np.allclose(np.linalg.matrix_power(z, d), np.eye(d))
        omega = np.exp(2j * np.pi / d)
        assert np.allclose(z @ x, omega * x @ z)


def test_weyl_exponents_mod_d():
    assert np.allclose(weyl(3, 4, -1).matrix, weyl(3, 1, 2).matrix)
    assert np.allclose(weyl(3, 0, 0).matrix, np.eye(3))


def test_fourier_conjugates_z_to_x():
    """
    Test that fourier():
    - Is the Hadamard gate at d = 2
    - Maps Z to X by conjugation
    - Squares to the parity reflection
    """
    assert np.allclose(fourier(2).matrix, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    for d in (3, 5):
        f = fourier(d).matrix
        assert np.allclose(f @ gen_pauli_z(d).matrix @ f.conj().T, gen_pauli_x(d).matrix.conj().T)
        reflection = parity(d).matrix
        for j in range(d):
            assert reflection[(-j) % d, j] == pytest.approx(1.0)


def test_controlled_power():
    """
    Test that controlled_power():
    - Applies G^j on the target for control level j
    - Rejects a single-level control
    """
    cx = controlled_power(gen_pauli_x(3))
    assert cx.in_register.dims == (3, 3)
    for j in range(3):
        block = cx.matrix[3 * j : 3 * j + 3, 3 * j : 3 * j + 3]
        assert np.allclose(block, gen_pauli_x(3).power(j).matrix)

    with pytest.raises(ValueError):
        controlled([gen_pauli_x(3)])


# ==================== Bell Basis ====================


def test_bell_basis_is_orthonormal():
    for d in (2, 3):
        basis = np.column_stack([state.amplitudes for state in bell_basis(d)])
        assert np.allclose(basis.conj().T @ basis, np.eye(d * d))
        assert np.allclose(sum(bell_projectors(d)), np.eye(d * d))


def test_bell_basis_ordering():
    """
    Test that bell_basis():
    - Starts with the maximally entangled state
    - Orders outcomes by a·d + b for (X^a Z^b ⊗ I)|Θ⟩
    """
    d = 3
    theta = max_entangled(d, ("I", "E"))
    assert np.allclose(bell_basis(d)[0].amplitudes, theta.amplitudes)
    state = bell_basis(d)[1 * d + 2]
    expected = (weyl(d, 1, 2).matrix @ theta.amplitudes.reshape(d, d)).reshape(-1)
    assert np.allclose(state.amplitudes, expected)
