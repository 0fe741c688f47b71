"""Information measures on qudit states.

Entropies are reported in bits. Eigenvalues below zero but above
`EIGENVALUE_CLIP` are treated as numerical noise and clipped; anything more
negative is rejected as a non-positive input.

Functions:
    von_neumann_entropy: Entropy of a density operator, in bits.
    trace_distance: Half the trace norm of the difference of two states.
    fidelity: Uhlmann fidelity of two states.
    negativity: Sum of the negative eigenvalues (in magnitude) of a partial transpose.
    ensemble_spectrum: Spectrum of Σ|v⟩⟨v| computed from the Gram matrix.
    shannon_entropy: Entropy of a probability vector, in bits.
    mutual_information: Mutual information of a joint distribution, in bits.
"""

import logging
from typing import Sequence, Union

import numpy as np
from scipy.special import entr
from scipy.stats import entropy as _scipy_entropy

from qottkit.qudits import EIGENVALUE_CLIP, DensityOperator, PureState

_logger = logging.getLogger(__name__)


def _as_matrix(state: Union[PureState, DensityOperator, np.ndarray]) -> np.ndarray:
    if isinstance(state, PureState):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    if isinstance(state, DensityOperator):
        return state.matrix
    return np.asarray(state, dtype=np.complex128)


def _clipped_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    eigenvalues = np.linalg.eigvalsh(matrix)
    if eigenvalues[0] < EIGENVALUE_CLIP:
        raise ValueError(
            f"Input is not positive semidefinite: eigenvalue {eigenvalues[0]}"
        )
    if eigenvalues[0] < 0:
        _logger.debug(f"Clipping eigenvalue {eigenvalues[0]:.3e} to zero")
    return np.clip(eigenvalues, 0.0, None)


def von_neumann_entropy(state: Union[PureState, DensityOperator]) -> float:
    """Von Neumann entropy in bits, with 0·log 0 := 0.

    Raises:
        ValueError: If the state has an eigenvalue below `EIGENVALUE_CLIP`.
    """
    eigenvalues = _clipped_eigenvalues(_as_matrix(state))
    return float(np.sum(entr(eigenvalues)) / np.log(2))


def spectrum_entropy(eigenvalues: Sequence[float]) -> float:
    """Entropy in bits of a (possibly unnormalized) nonnegative spectrum."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.size and eigenvalues.min() < EIGENVALUE_CLIP:
        raise ValueError(f"Spectrum has negative entry {eigenvalues.min()}")
    return float(np.sum(entr(np.clip(eigenvalues, 0.0, None))) / np.log(2))


def trace_distance(
    rho: Union[PureState, DensityOperator], sigma: Union[PureState, DensityOperator]
) -> float:
    """Trace distance ½‖ρ − σ‖₁.

    Raises:
        ValueError: If the two states live on registers of different dimensions.
    """
    if rho.register.dims != sigma.register.dims:
        raise ValueError(
            f"Cannot compare states on {rho.register} and {sigma.register}"
        )
    difference = _as_matrix(rho) - _as_matrix(sigma)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(difference))))


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    eigenvalues, vectors = np.linalg.eigh(matrix)
    roots = np.sqrt(np.clip(eigenvalues, 0.0, None))
    return (vectors * roots) @ vectors.conj().T


def fidelity(
    rho: Union[PureState, DensityOperator], sigma: Union[PureState, DensityOperator]
) -> float:
    """Uhlmann fidelity (tr √(√ρ σ √ρ))², clipped to [0, 1].

    Pure inputs use the overlap formula directly.
    """
    if rho.register.dims != sigma.register.dims:
        raise ValueError(
            f"Cannot compare states on {rho.register} and {sigma.register}"
        )
    if isinstance(rho, PureState) and isinstance(sigma, PureState):
        value = abs(np.vdot(rho.amplitudes, sigma.amplitudes)) ** 2
    elif isinstance(rho, PureState) or isinstance(sigma, PureState):
        pure, mixed = (rho, sigma) if isinstance(rho, PureState) else (sigma, rho)
        value = np.vdot(pure.amplitudes, mixed.matrix @ pure.amplitudes).real
    else:
        root = _psd_sqrt(rho.matrix)
        inner = root @ sigma.matrix @ root
        value = np.sum(np.sqrt(_clipped_eigenvalues((inner + inner.conj().T) / 2))) ** 2
    return float(min(max(value, 0.0), 1.0))


def negativity(state: Union[PureState, DensityOperator], side: Sequence[str]) -> float:
    """Negativity across the cut `side` | rest.

    Args:
        state: The bipartite (or multipartite) state.
        side (Sequence[str]): Labels of the subsystems that are transposed.

    Returns:
        float: Sum of the magnitudes of the negative eigenvalues of the partial
            transpose.
    """
    register = state.register
    n = len(register)
    matrix = _as_matrix(state)
    axes = list(range(2 * n))
    for label in side:
        k = register.index(label)
        axes[k], axes[n + k] = axes[n + k], axes[k]
    transposed = np.transpose(matrix.reshape(register.dims + register.dims), axes)
    transposed = transposed.reshape(register.total, register.total)
    eigenvalues = np.linalg.eigvalsh((transposed + transposed.conj().T) / 2)
    return float(-np.sum(eigenvalues[eigenvalues < 0]))


def ensemble_spectrum(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Nonzero-capable spectrum of Σ_k |v_k⟩⟨v_k| from the Gram matrix ⟨v_k|v_l⟩.

    The operator and its Gram matrix share their nonzero eigenvalues, so the
    spectrum of a large ensemble of few vectors is cheap to compute.
    """
    stacked = np.column_stack([np.asarray(v, dtype=np.complex128) for v in vectors])
    gram = stacked.conj().T @ stacked
    return _clipped_eigenvalues((gram + gram.conj().T) / 2)


def shannon_entropy(probabilities: Sequence[float]) -> float:
    """Shannon entropy in bits of a probability vector."""
    probabilities = np.asarray(probabilities, dtype=float).reshape(-1)
    if probabilities.sum() <= 0:
        return 0.0
    return float(_scipy_entropy(probabilities, base=2))


def mutual_information(joint: np.ndarray) -> float:
    """Mutual information I(X;Y) in bits of a joint table `joint[x, y]`."""
    joint = np.asarray(joint, dtype=float)
    joint = joint / joint.sum()
    return (
        shannon_entropy(joint.sum(axis=1))
        + shannon_entropy(joint.sum(axis=0))
        - shannon_entropy(joint)
    )
