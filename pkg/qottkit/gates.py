"""Generalized Pauli, Fourier and controlled gates for qudits.

The gates follow the 0-based conventions

- X|j⟩ = |j+1 mod d⟩ (cyclic shift),
- Z|j⟩ = ω^j |j⟩ with ω = exp(2πi/d) (phase ladder),
- H[j, k] = ω^{jk} / √d (discrete Fourier transform),
- controlled([G_0, ..., G_{d-1}]) = Σ_j |j⟩⟨j| ⊗ G_j, control first,

so that Z·X = ω·X·Z and H·X·H† = Z.

Gate constructors are cached; the returned `Unitary` values are immutable.

Functions:
    gen_pauli_x: Cyclic shift X.
    gen_pauli_z: Phase ladder Z.
    weyl: Weyl operator X^a Z^b.
    fourier: Discrete Fourier transform H.
    parity: H², the map |j⟩ -> |-j⟩.
    controlled: Controlled gate from a family of target gates.
    controlled_power: Controlled gate Σ_j |j⟩⟨j| ⊗ G^j.
    max_entangled: The maximally entangled state |Θ⟩.
    bell_basis: The generalized Bell basis {(X^a Z^b ⊗ I)|Θ⟩}.
    bell_projectors: Rank-one projectors onto the Bell basis.

Example:
    ```python
    from qottkit.gates import controlled_power, gen_pauli_x

    csum = controlled_power(gen_pauli_x(3))  # |j, k⟩ -> |j, j + k⟩
    ```
"""

from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from qottkit.qudits import PureState, Register, Unitary, check_dim


def _omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


@lru_cache(maxsize=None)
def gen_pauli_x(d: int) -> Unitary:
    """Cyclic shift X|j⟩ = |j+1 mod d⟩."""
    d = check_dim(d)
    return Unitary.gate(np.roll(np.eye(d), 1, axis=0))


@lru_cache(maxsize=None)
def gen_pauli_z(d: int) -> Unitary:
    """Phase ladder Z|j⟩ = exp(2πij/d)|j⟩."""
    d = check_dim(d)
    return Unitary.gate(np.diag(_omega(d) ** np.arange(d)))


@lru_cache(maxsize=None)
def weyl(d: int, a: int, b: int) -> Unitary:
    """The Weyl operator X^a Z^b, exponents taken mod d."""
    d = check_dim(d)
    x = np.linalg.matrix_power(gen_pauli_x(d).matrix, a % d)
    z = np.linalg.matrix_power(gen_pauli_z(d).matrix, b % d)
    return Unitary.gate(x @ z)


@lru_cache(maxsize=None)
def fourier(d: int) -> Unitary:
    """Discrete Fourier transform with entries exp(2πijk/d)/√d; the Hadamard gate at d=2."""
    d = check_dim(d)
    j = np.arange(d)
    return Unitary.gate(_omega(d) ** np.outer(j, j) / np.sqrt(d))


@lru_cache(maxsize=None)
def parity(d: int) -> Unitary:
    """H², the reflection |j⟩ -> |-j mod d⟩."""
    h = fourier(d).matrix
    return Unitary.gate(h @ h)


def controlled(gates: Sequence[Unitary]) -> Unitary:
    """Controlled gate Σ_j |j⟩⟨j| ⊗ G_j with the control as first subsystem.

    Args:
        gates (Sequence[Unitary]): One target gate per control level.

    Returns:
        Unitary: Two-subsystem gate on placeholder labels `("ctrl", "tgt")`.

    Raises:
        ValueError: If fewer than two gates are given or targets differ in dimension.
    """
    gates = list(gates)
    if len(gates) < 2:
        raise ValueError("A controlled gate needs a control of dimension >= 2")
    target = gates[0].in_register.total
    if any(g.in_register.total != target for g in gates):
        raise ValueError("All target gates must act on the same dimension")
    return Unitary.gate(
        block_diag(*[g.matrix for g in gates]),
        labels=("ctrl", "tgt"),
        dims=(len(gates), target),
    )


def controlled_power(gate: Unitary, control_dim: int = 0) -> Unitary:
    """Controlled gate Σ_j |j⟩⟨j| ⊗ G^j over a control of dimension `control_dim`.

    `control_dim` defaults to the target dimension.
    """
    control_dim = control_dim or gate.in_register.total
    return controlled([gate.power(j) for j in range(control_dim)])


@lru_cache(maxsize=None)
def max_entangled(d: int, labels: tuple[str, str] = ("E", "C")) -> PureState:
    """The maximally entangled state d^{-1/2} Σ_i |ii⟩ on two labeled qudits."""
    d = check_dim(d)
    if len(labels) != 2:
        raise ValueError("max_entangled needs exactly two labels")
    return PureState(
        register=Register(labels=tuple(labels), dims=(d, d)),
        amplitudes=np.eye(d).reshape(-1) / np.sqrt(d),
    )


@lru_cache(maxsize=None)
def bell_basis(d: int, labels: tuple[str, str] = ("I", "E")) -> tuple[PureState, ...]:
    """The d² states (X^a Z^b ⊗ I)|Θ⟩ ordered by outcome index a·d + b."""
    theta = max_entangled(d, labels).amplitudes.reshape(d, d)
    register = Register(labels=tuple(labels), dims=(d, d))
    return tuple(
        PureState(
            register=register,
            amplitudes=(weyl(d, a, b).matrix @ theta).reshape(-1),
        )
        for a in range(d)
        for b in range(d)
    )


@lru_cache(maxsize=None)
def bell_projectors(d: int) -> tuple[np.ndarray, ...]:
    """Rank-one projectors onto `bell_basis(d)`, in the same order."""
    projectors = []
    for state in bell_basis(d):
        projector = np.outer(state.amplitudes, state.amplitudes.conj())
        projector.flags.writeable = False
        projectors.append(projector)
    return tuple(projectors)
