"""Quantum channels in Kraus form.

A `Channel` maps states on `in_register` to states on `out_register` through
Kraus operators `K_k`. Trace-preserving channels satisfy Σ K_k† K_k = I;
subchannels (one branch of an instrument) satisfy Σ K_k† K_k ≤ I.

Classes:
    Channel: A completely positive map in Kraus form.

Functions:
    identity_channel: The identity on a register.
    unitary_channel: Conjugation by a unitary.
    replace_channel: Discard the input and prepare a fixed state.
    depolarizing_channel: ρ -> (1 − λ)ρ + λ tr(ρ) I/d.

Example:
    ```python
    from qottkit.channels import depolarizing_channel

    noise = depolarizing_channel(3, 0.3, label="A")
    noisy = noise.apply(state, on=("A",))
    ```
"""

from typing import Optional, Sequence, Union

import numpy as np
from pydantic import field_validator, model_validator

from qottkit._qott_model import _QottBaseModel
from qottkit.gates import weyl
from qottkit.qudits import (
    TOLERANCE_DERIVED,
    DensityOperator,
    PureState,
    Register,
    Unitary,
    _out_register,
    apply_operator,
    check_dim,
)


class Channel(_QottBaseModel):
    """A completely positive map given by Kraus operators.

    Attributes:
        in_register (Register): Input layout.
        out_register (Register): Output layout. Channels whose labels match their
            input labels act in place on whatever subsystems they are applied to.
        kraus (tuple[np.ndarray, ...]): Kraus operators of shape `(out.total, in.total)`.
        trace_preserving (bool): Require Σ K†K = I; otherwise only Σ K†K ≤ I.
    """

    in_register: Register
    out_register: Register
    kraus: tuple[np.ndarray, ...]
    trace_preserving: bool = True

    @field_validator("kraus", mode="before")
    @classmethod
    def _freeze(cls, value):
        frozen = []
        for operator in value:
            array = np.array(operator, dtype=np.complex128)
            array.flags.writeable = False
            frozen.append(array)
        return tuple(frozen)

    @model_validator(mode="after")
    def _check_completeness(self):
        shape = (self.out_register.total, self.in_register.total)
        if not self.kraus:
            raise ValueError("A channel needs at least one Kraus operator")
        for k, operator in enumerate(self.kraus):
            if operator.shape != shape:
                raise ValueError(f"Kraus operator {k} has shape {operator.shape}, expected {shape}")
        gram = self.completeness()
        n = self.in_register.total
        if self.trace_preserving:
            defect = np.max(np.abs(gram - np.eye(n)))
            if defect > TOLERANCE_DERIVED:
                raise ValueError(f"Channel is not trace preserving: max |ΣK†K - I| = {defect}")
        else:
            largest = np.linalg.eigvalsh(gram)[-1]
            if largest > 1 + TOLERANCE_DERIVED:
                raise ValueError(f"Subchannel increases trace: largest eigenvalue {largest}")
        return self

    def __str__(self):
        return f"Channel({self.in_register} -> {self.out_register}, {len(self.kraus)} Kraus)"

    def completeness(self) -> np.ndarray:
        """The operator Σ_k K_k† K_k on the input space."""
        return sum(operator.conj().T @ operator for operator in self.kraus)

    def _target(self, state_register: Register, on: Optional[Sequence[str]]):
        on = tuple(on) if on is not None else self.in_register.labels
        return on, _out_register(state_register, on, self.in_register, self.out_register)

    def branches(self, state: PureState, on: Optional[Sequence[str]] = None) -> list[PureState]:
        """Apply the channel to a pure state, one unnormalized vector per Kraus operator.

        The channel output is the mixture Σ_k |v_k⟩⟨v_k| of the returned vectors.
        """
        on, out = self._target(state.register, on)
        return [apply_operator(operator, state, on, out) for operator in self.kraus]

    def apply(
        self, state: Union[PureState, DensityOperator], on: Optional[Sequence[str]] = None
    ) -> DensityOperator:
        """Apply the channel to a state and return the output density operator."""
        on, out = self._target(state.register, on)
        total = None
        for operator in self.kraus:
            part = apply_operator(operator, state, on, out)
            matrix = part.density().matrix if isinstance(part, PureState) else part.matrix
            total = matrix if total is None else total + matrix
        unnormalized = not self.trace_preserving or state.unnormalized
        register = part.register
        return DensityOperator(register=register, matrix=total, unnormalized=unnormalized)

    def then(self, other: "Channel") -> "Channel":
        """The composition `other ∘ self`."""
        if other.in_register.dims != self.out_register.dims:
            raise ValueError(f"Cannot compose {other} after {self}")
        return Channel(
            in_register=self.in_register,
            out_register=other.out_register,
            kraus=tuple(b @ a for a in self.kraus for b in other.kraus),
            trace_preserving=self.trace_preserving and other.trace_preserving,
        )


def _gate_register(d: int, label: str) -> Register:
    return Register(labels=(label,), dims=(d,))


def identity_channel(d: int, label: str = "q") -> Channel:
    """The identity channel on one subsystem of dimension d."""
    register = _gate_register(d, label)
    return Channel(in_register=register, out_register=register, kraus=(np.eye(d),))


def unitary_channel(unitary: Unitary) -> Channel:
    """Conjugation by `unitary`."""
    return Channel(
        in_register=unitary.in_register,
        out_register=unitary.out_register,
        kraus=(unitary.matrix,),
    )


def replace_channel(
    d: int, state: Union[PureState, DensityOperator], label: str = "q"
) -> Channel:
    """Discard a d-level input and prepare `state` (of the same dimension) instead.

    Kraus operators √λ_k |e_k⟩⟨j| run over the eigenpairs of `state` and the
    input basis states j.
    """
    matrix = (
        np.outer(state.amplitudes, state.amplitudes.conj())
        if isinstance(state, PureState)
        else state.matrix
    )
    if matrix.shape != (d, d):
        raise ValueError(f"Replacement state must be {d}-dimensional")
    eigenvalues, vectors = np.linalg.eigh(matrix)
    kraus = []
    for weight, vector in zip(eigenvalues, vectors.T):
        if weight <= 0:
            continue
        for j in range(d):
            operator = np.zeros((d, d), dtype=np.complex128)
            operator[:, j] = np.sqrt(weight) * vector
            kraus.append(operator)
    register = _gate_register(d, label)
    return Channel(in_register=register, out_register=register, kraus=tuple(kraus))


def depolarizing_channel(d: int, strength: float, label: str = "q") -> Channel:
    """Depolarizing channel ρ -> (1 − λ)ρ + λ tr(ρ) I/d, for λ ∈ [0, 1].

    Uses the Weyl twirl: the fully depolarizing map is the uniform average of
    X^a Z^b conjugations.
    """
    d = check_dim(d)
    if not 0 <= strength <= 1:
        raise ValueError(f"Depolarizing strength must lie in [0, 1], got {strength}")
    identity_weight = np.sqrt(1 - strength + strength / d**2)
    twirl_weight = np.sqrt(strength / d**2)
    kraus = [identity_weight * np.eye(d)]
    for a in range(d):
        for b in range(d):
            if a == 0 and b == 0:
                continue
            kraus.append(twirl_weight * weyl(d, a, b).matrix)
    register = _gate_register(d, label)
    return Channel(in_register=register, out_register=register, kraus=tuple(kraus))
