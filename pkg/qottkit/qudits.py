"""Qudit states and operators over labeled registers.

This module provides the dense linear-algebra core of qottkit: labeled registers,
pure states, density operators and unitaries, together with the multilinear
operations that act on them (tensor products, operator application on named
subsystems, partial traces, permutations and projective measurements).

Every value is an immutable pydantic model. Arrays are copied on construction
and stored read-only, so values can be shared freely between workers.

Operators are applied to a named subset of a register. Operators whose output
labels are their input labels act in place. Otherwise the output subsystems take
the position of the first input subsystem and all other subsystems keep their
relative order. For example applying `M: (C, S) -> (A, B)` to a state on
`(E, C, S, K)` yields a state on `(E, A, B, K)`.

Classes:
    Register: Ordered, uniquely labeled subsystem dimensions.
    PureState: A (possibly sub-normalized) state vector on a register.
    DensityOperator: A (possibly sub-normalized) density matrix on a register.
    Unitary: A unitary map between two registers of equal total dimension.
    MeasurementBranch: One outcome of a projective measurement.

Functions:
    tensor: Tensor product of states.
    apply_unitary: Apply a unitary to named subsystems of a state.
    apply_operator: Apply an arbitrary linear map to named subsystems.
    partial_trace: Reduce a state to a named subset of its subsystems.
    permute_subsystems: Reorder the subsystems of a state.
    project_onto: Post-select named subsystems on a vector.
    measure_projective: Born-rule projective measurement.
    compose_circuit: Compose gates placed on labeled wires into one matrix.
    random_pure_state, random_density, random_unitary: Seeded random values.

Example:
    ```python
    from qottkit.gates import fourier, max_entangled
    from qottkit.qudits import apply_unitary, partial_trace

    theta = max_entangled(3, ("E", "C"))
    rotated = apply_unitary(fourier(3), theta, on=("C",))
    reduced = partial_trace(rotated, keep=("E",))
    ```
"""

from typing import Optional, Sequence, Union

import numpy as np
from pydantic import field_validator, model_validator
from scipy.stats import unitary_group

from qottkit._qott_model import _QottBaseModel

TOLERANCE_CONSTRUCTION = 1e-12
"""Tolerance for exact constructions: gate unitarity and state normalization."""

TOLERANCE_STATE = 1e-10
"""Tolerance for density-operator hermiticity and trace, and for unitarity checks."""

TOLERANCE_DERIVED = 1e-9
"""Tolerance for derived equalities such as projector completeness."""

EIGENVALUE_CLIP = -1e-9
"""Smallest eigenvalue accepted as numerically positive semidefinite."""


def check_dim(d: int) -> int:
    """Validate a qudit dimension.

    Args:
        d (int): Number of levels.

    Returns:
        int: The dimension, unchanged.

    Raises:
        ValueError: If d < 2.
    """
    if int(d) != d or d < 2:
        raise ValueError(f"Qudit dimension must be an integer >= 2, got {d}")
    return int(d)


def is_prime(p: int) -> bool:
    """Return True when p is a prime number."""
    if p < 2:
        return False
    for k in range(2, int(p**0.5) + 1):
        if p % k == 0:
            return False
    return True


def _frozen(value, ndim: int, name: str) -> np.ndarray:
    array = np.array(value, dtype=np.complex128)
    if array.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    array.flags.writeable = False
    return array


class Register(_QottBaseModel):
    """An ordered list of labeled subsystems.

    Attributes:
        labels (tuple[str, ...]): Unique subsystem names, e.g. `("E", "A", "B", "K")`.
        dims (tuple[int, ...]): Dimension of each subsystem.

    Example:
        ```python
        register = Register.of(E=3, C=3)
        register.total  # 9
        ```
    """

    labels: tuple[str, ...]
    dims: tuple[int, ...]

    @model_validator(mode="after")
    def _check_layout(self):
        if len(self.labels) != len(self.dims):
            raise ValueError(
                f"Register has {len(self.labels)} labels but {len(self.dims)} dims"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"Register labels must be unique: {self.labels}")
        if any(d < 1 for d in self.dims):
            raise ValueError(f"Register dims must be positive: {self.dims}")
        return self

    @classmethod
    def of(cls, **dims: int) -> "Register":
        """Build a register from keyword arguments, preserving their order."""
        return cls(labels=tuple(dims.keys()), dims=tuple(int(d) for d in dims.values()))

    def __str__(self):
        return "⊗".join(f"{label}[{d}]" for label, d in zip(self.labels, self.dims))

    def __len__(self):
        return len(self.labels)

    @property
    def total(self) -> int:
        """Total dimension, the product of all subsystem dimensions."""
        return int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1

    def index(self, label: str) -> int:
        """Position of a label, raising ValueError when it is absent."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"Label {label!r} not in register {self}") from None

    def dim(self, label: str) -> int:
        return self.dims[self.index(label)]

    def sub(self, labels: Sequence[str]) -> "Register":
        """The register restricted to `labels`, in the given order."""
        return Register(
            labels=tuple(labels), dims=tuple(self.dim(label) for label in labels)
        )

    def without(self, labels: Sequence[str]) -> "Register":
        drop = set(labels)
        for label in drop:
            self.index(label)
        kept = [label for label in self.labels if label not in drop]
        return self.sub(kept)

    def concat(self, other: "Register") -> "Register":
        return Register(labels=self.labels + other.labels, dims=self.dims + other.dims)

    def relabel(self, mapping: dict[str, str]) -> "Register":
        return Register(
            labels=tuple(mapping.get(label, label) for label in self.labels),
            dims=self.dims,
        )


class PureState(_QottBaseModel):
    """A state vector on a labeled register.

    Sub-normalized vectors are allowed when `unnormalized` is set; they represent
    measurement branches whose squared norm is the branch probability.

    Attributes:
        register (Register): Subsystem layout.
        amplitudes (np.ndarray): Complex amplitudes in row-major register order.
        unnormalized (bool): Permit a squared norm in [0, 1].
    """

    register: Register
    amplitudes: np.ndarray
    unnormalized: bool = False

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _freeze(cls, value):
        return _frozen(value, 1, "amplitudes")

    @model_validator(mode="after")
    def _check_norm(self):
        if self.amplitudes.shape[0] != self.register.total:
            raise ValueError(
                f"State of length {self.amplitudes.shape[0]} does not fit register {self.register}"
            )
        norm2 = self.norm2
        if self.unnormalized:
            if norm2 > 1 + TOLERANCE_DERIVED:
                raise ValueError(f"Sub-normalized state has norm² {norm2} > 1")
        elif abs(np.sqrt(norm2) - 1) > TOLERANCE_CONSTRUCTION:
            raise ValueError(f"State is not normalized: norm² = {norm2}")
        return self

    def __str__(self):
        return f"PureState({self.register})"

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped with one axis per subsystem."""
        return self.amplitudes.reshape(self.register.dims)

    def density(self) -> "DensityOperator":
        """The projector |ψ⟩⟨ψ| (sub-normalized for branch states)."""
        return DensityOperator(
            register=self.register,
            matrix=np.outer(self.amplitudes, self.amplitudes.conj()),
            unnormalized=self.unnormalized,
        )

    def normalized(self) -> "PureState":
        norm2 = self.norm2
        if norm2 <= 0:
            raise ValueError("Cannot normalize a zero vector")
        return PureState(register=self.register, amplitudes=self.amplitudes / np.sqrt(norm2))


class DensityOperator(_QottBaseModel):
    """A density matrix on a labeled register.

    Attributes:
        register (Register): Subsystem layout.
        matrix (np.ndarray): Square complex matrix.
        unnormalized (bool): Permit a trace in [0, 1] (branch operators).
    """

    register: Register
    matrix: np.ndarray
    unnormalized: bool = False

    @field_validator("matrix", mode="before")
    @classmethod
    def _freeze(cls, value):
        return _frozen(value, 2, "matrix")

    @model_validator(mode="after")
    def _check_state(self):
        n = self.register.total
        if self.matrix.shape != (n, n):
            raise ValueError(
                f"Matrix of shape {self.matrix.shape} does not fit register {self.register}"
            )
        if np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) > TOLERANCE_STATE:
            raise ValueError("Density operator is not Hermitian")
        trace = self.trace
        if self.unnormalized:
            if trace < -TOLERANCE_STATE or trace > 1 + TOLERANCE_DERIVED:
                raise ValueError(f"Sub-normalized density operator has trace {trace}")
        elif abs(trace - 1) > TOLERANCE_STATE:
            raise ValueError(f"Density operator has trace {trace}, expected 1")
        smallest = float(np.linalg.eigvalsh(self.matrix)[0])
        if smallest < EIGENVALUE_CLIP:
            raise ValueError(
                f"Density operator is not positive semidefinite: eigenvalue {smallest}"
            )
        return self

    def __str__(self):
        return f"DensityOperator({self.register})"

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def tensor(self) -> np.ndarray:
        return self.matrix.reshape(self.register.dims + self.register.dims)

    @classmethod
    def maximally_mixed(cls, register: Register) -> "DensityOperator":
        n = register.total
        return cls(register=register, matrix=np.eye(n) / n)

    def normalized(self) -> "DensityOperator":
        trace = self.trace
        if trace <= 0:
            raise ValueError("Cannot normalize a zero operator")
        return DensityOperator(register=self.register, matrix=self.matrix / trace)

    def scaled(self, weight: float) -> "DensityOperator":
        return DensityOperator(
            register=self.register, matrix=self.matrix * weight, unnormalized=True
        )


class Unitary(_QottBaseModel):
    """A unitary map from `in_register` to `out_register`.

    Single-subsystem and two-subsystem gates use placeholder labels and keep the
    labels of the subsystems they are applied to. Maps whose input and output
    labels differ (such as a masker `(C, S) -> (A, B)`) relabel their targets.

    Attributes:
        in_register (Register): Input layout.
        out_register (Register): Output layout of equal total dimension.
        matrix (np.ndarray): Matrix of shape `(out.total, in.total)`.
    """

    in_register: Register
    out_register: Register
    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def _freeze(cls, value):
        return _frozen(value, 2, "matrix")

    @model_validator(mode="after")
    def _check_unitary(self):
        if self.in_register.total != self.out_register.total:
            raise ValueError(
                f"Unitary registers differ in dimension: {self.in_register} vs {self.out_register}"
            )
        n = self.in_register.total
        if self.matrix.shape != (n, n):
            raise ValueError(f"Unitary matrix has shape {self.matrix.shape}, expected {(n, n)}")
        defect = np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(n)), initial=0.0)
        if defect > TOLERANCE_STATE:
            raise ValueError(f"Matrix is not unitary: max |U†U - I| = {defect}")
        return self

    def __str__(self):
        return f"Unitary({self.in_register} -> {self.out_register})"

    @classmethod
    def gate(cls, matrix: np.ndarray, labels: Sequence[str] = ("q",), dims=None) -> "Unitary":
        """A gate acting in place on subsystems with placeholder `labels`."""
        matrix = np.asarray(matrix)
        if dims is None:
            dims = (matrix.shape[0],)
        register = Register(labels=tuple(labels), dims=tuple(dims))
        return cls(in_register=register, out_register=register, matrix=matrix)

    @property
    def is_gate(self) -> bool:
        return self.in_register.labels == self.out_register.labels

    def dagger(self) -> "Unitary":
        return Unitary(
            in_register=self.out_register,
            out_register=self.in_register,
            matrix=self.matrix.conj().T,
        )

    def power(self, k: int) -> "Unitary":
        if not self.is_gate:
            raise ValueError("Only in-place gates can be raised to a power")
        if k < 0:
            return self.dagger().power(-k)
        return Unitary(
            in_register=self.in_register,
            out_register=self.out_register,
            matrix=np.linalg.matrix_power(self.matrix, k),
        )

    def __matmul__(self, other: "Unitary") -> "Unitary":
        if other.out_register.dims != self.in_register.dims:
            raise ValueError(f"Cannot compose {self} after {other}")
        return Unitary(
            in_register=other.in_register,
            out_register=self.out_register,
            matrix=self.matrix @ other.matrix,
        )


QuantumState = Union[PureState, DensityOperator]
"""Either representation of a quantum state."""


class MeasurementBranch(_QottBaseModel):
    """One outcome of a projective measurement.

    Attributes:
        outcome (int): Index of the projector.
        probability (float): Born probability.
        unnormalized (QuantumState): Post-measurement state before renormalization;
            its squared norm (or trace) equals `probability`.
        post_state (QuantumState | None): Normalized post-measurement state, or
            None when the outcome has zero probability.
    """

    outcome: int
    probability: float
    unnormalized: QuantumState
    post_state: Optional[QuantumState] = None


def _contract(
    array: np.ndarray,
    register: Register,
    matrix: np.ndarray,
    on: Sequence[str],
    out: Register,
) -> tuple[np.ndarray, Register]:
    """Apply `matrix` to the `on` axes of `array`.

    `array` carries one axis per register subsystem followed by any number of
    trailing axes, which are left untouched.
    """
    if not on:
        raise ValueError("An operator must act on at least one subsystem")
    axes = [register.index(label) for label in on]
    in_total = int(np.prod([register.dims[a] for a in axes], dtype=np.int64))
    if matrix.shape != (out.total, in_total):
        raise ValueError(
            f"Operator of shape {matrix.shape} cannot map {register.sub(on)} to {out}"
        )
    moved = np.moveaxis(array, axes, list(range(len(axes))))
    rest_shape = moved.shape[len(axes):]
    result = (matrix @ moved.reshape(in_total, -1)).reshape(out.dims + rest_shape)

    remaining = register.without(on)
    position = min(axes)
    result = np.moveaxis(
        result, list(range(len(out))), list(range(position, position + len(out)))
    )
    new_register = Register(
        labels=remaining.labels[:position] + out.labels + remaining.labels[position:],
        dims=remaining.dims[:position] + out.dims + remaining.dims[position:],
    )
    if sorted(out.labels) == sorted(on):
        # in-place: every subsystem returns to its original slot
        perm = [new_register.index(label) for label in register.labels]
        result = np.transpose(result, perm + list(range(len(register), result.ndim)))
        new_register = new_register.sub(register.labels)
    return result, new_register


def _out_register(
    state_register: Register,
    on: Sequence[str],
    in_register: Register,
    out_register: Register,
) -> Register:
    in_dims = tuple(state_register.dim(label) for label in on)
    if in_dims != in_register.dims:
        raise ValueError(
            f"Operator expects dims {in_register.dims} but {tuple(on)} have dims {in_dims}"
        )
    if in_register.labels == out_register.labels:
        return Register(labels=tuple(on), dims=out_register.dims)
    return out_register


def apply_operator(
    matrix: np.ndarray,
    state: QuantumState,
    on: Sequence[str],
    out: Optional[Register] = None,
    unnormalized: bool = True,
) -> QuantumState:
    """Apply a linear map to named subsystems of a state.

    Args:
        matrix (np.ndarray): Operator of shape `(out.total, prod(dims of on))`.
        state (QuantumState): State to act on.
        on (Sequence[str]): Subsystems the operator acts on, in operator order.
        out (Register | None): Output subsystems; defaults to `on` with unchanged dims.
        unnormalized (bool): Flag the result as a sub-normalized branch state.

    Returns:
        QuantumState: `K|ψ⟩` for pure states and `KρK†` for density operators.
    """
    on = tuple(on)
    if out is None:
        out = state.register.sub(on)
    register = state.register
    unnormalized = unnormalized or state.unnormalized
    if isinstance(state, PureState):
        result, new_register = _contract(state.tensor, register, matrix, on, out)
        return PureState(
            register=new_register,
            amplitudes=result.reshape(-1),
            unnormalized=unnormalized,
        )

    n = register.total
    rows, new_register = _contract(
        state.matrix.reshape(register.dims + (n,)), register, matrix, on, out
    )
    m = new_register.total
    back = rows.reshape(m, n).conj().T
    cols, _ = _contract(back.reshape(register.dims + (m,)), register, matrix, on, out)
    result = cols.reshape(m, m).conj().T
    return DensityOperator(
        register=new_register,
        matrix=(result + result.conj().T) / 2,
        unnormalized=unnormalized,
    )


def apply_unitary(
    unitary: Unitary, state: QuantumState, on: Optional[Sequence[str]] = None
) -> QuantumState:
    """Apply a unitary to named subsystems of a state.

    Args:
        unitary (Unitary): The unitary. Gates keep the labels of their targets;
            other unitaries relabel their targets to `unitary.out_register`.
        state (QuantumState): The state.
        on (Sequence[str] | None): Target subsystems; defaults to the unitary's
            input labels.

    Returns:
        QuantumState: The transformed state, of the same kind as `state`.

    Raises:
        ValueError: On label or dimension mismatch.
    """
    on = tuple(on) if on is not None else unitary.in_register.labels
    out = _out_register(state.register, on, unitary.in_register, unitary.out_register)
    return apply_operator(
        unitary.matrix, state, on, out, unnormalized=state.unnormalized
    )


def tensor(*states: QuantumState) -> QuantumState:
    """Tensor product of states, concatenating their registers.

    Pure states combine into a pure state; any density operator promotes the
    product to a density operator.
    """
    if not states:
        raise ValueError("tensor() needs at least one state")
    register = states[0].register
    for state in states[1:]:
        register = register.concat(state.register)
    unnormalized = any(state.unnormalized for state in states)
    if all(isinstance(state, PureState) for state in states):
        amplitudes = states[0].amplitudes
        for state in states[1:]:
            amplitudes = np.kron(amplitudes, state.amplitudes)
        return PureState(register=register, amplitudes=amplitudes, unnormalized=unnormalized)

    matrix = np.ones((1, 1), dtype=np.complex128)
    for state in states:
        part = state.density().matrix if isinstance(state, PureState) else state.matrix
        matrix = np.kron(matrix, part)
    return DensityOperator(register=register, matrix=matrix, unnormalized=unnormalized)


def partial_trace(state: QuantumState, keep: Sequence[str]) -> DensityOperator:
    """Trace out every subsystem not named in `keep`.

    Args:
        state (QuantumState): Pure state or density operator.
        keep (Sequence[str]): Subsystems to keep, in the order of the result.

    Returns:
        DensityOperator: The reduced state on `keep`.
    """
    keep = tuple(keep)
    register = state.register
    kept = register.sub(keep)
    traced = register.without(keep)
    keep_axes = [register.index(label) for label in keep]
    traced_axes = [register.index(label) for label in traced.labels]

    if isinstance(state, PureState):
        block = np.transpose(state.tensor, keep_axes + traced_axes).reshape(
            kept.total, traced.total
        )
        matrix = block @ block.conj().T
    else:
        n = len(register)
        order = keep_axes + traced_axes
        tensor_ = np.transpose(state.tensor, order + [n + a for a in order])
        tensor_ = tensor_.reshape(kept.total, traced.total, kept.total, traced.total)
        matrix = np.einsum("ajbj->ab", tensor_)
    return DensityOperator(
        register=kept, matrix=(matrix + matrix.conj().T) / 2, unnormalized=state.unnormalized
    )


def permute_subsystems(state: QuantumState, order: Sequence[str]) -> QuantumState:
    """Reorder the subsystems of a state to `order` (a permutation of its labels)."""
    order = tuple(order)
    if sorted(order) != sorted(state.register.labels):
        raise ValueError(f"{order} is not a permutation of {state.register.labels}")
    register = state.register.sub(order)
    axes = [state.register.index(label) for label in order]
    if isinstance(state, PureState):
        return PureState(
            register=register,
            amplitudes=np.transpose(state.tensor, axes).reshape(-1),
            unnormalized=state.unnormalized,
        )
    n = len(axes)
    matrix = np.transpose(state.tensor, axes + [n + a for a in axes]).reshape(
        register.total, register.total
    )
    return DensityOperator(register=register, matrix=matrix, unnormalized=state.unnormalized)


def project_onto(state: PureState, vector: np.ndarray, on: Sequence[str]) -> PureState:
    """Post-select subsystems `on` of a pure state on `vector`.

    Returns the unnormalized state `(⟨v| ⊗ I)|ψ⟩` on the remaining subsystems.
    """
    vector = np.asarray(vector, dtype=np.complex128).reshape(1, -1)
    empty = Register(labels=(), dims=())
    result, register = _contract(state.tensor, state.register, vector.conj(), tuple(on), empty)
    return PureState(register=register, amplitudes=result.reshape(-1), unnormalized=True)


def measure_projective(
    state: QuantumState,
    projectors: Sequence[np.ndarray],
    on: Optional[Sequence[str]] = None,
) -> list[MeasurementBranch]:
    """Measure a state with a complete set of orthogonal projectors.

    Args:
        state (QuantumState): State to measure.
        projectors (Sequence[np.ndarray]): Hermitian idempotent matrices on the
            subsystems `on`, summing to the identity.
        on (Sequence[str] | None): Measured subsystems; defaults to the whole register.

    Returns:
        list[MeasurementBranch]: One branch per projector, in projector order.

    Raises:
        ValueError: If a projector is not Hermitian and idempotent, or the set is
            incomplete.
    """
    on = tuple(on) if on is not None else state.register.labels
    size = state.register.sub(on).total
    total = np.zeros((size, size), dtype=np.complex128)
    for k, projector in enumerate(projectors):
        projector = np.asarray(projector, dtype=np.complex128)
        if projector.shape != (size, size):
            raise ValueError(f"Projector {k} has shape {projector.shape}, expected {(size, size)}")
        if np.max(np.abs(projector - projector.conj().T)) > TOLERANCE_DERIVED:
            raise ValueError(f"Projector {k} is not Hermitian")
        if np.max(np.abs(projector @ projector - projector)) > TOLERANCE_DERIVED:
            raise ValueError(f"Projector {k} is not idempotent")
        total += projector
    if np.max(np.abs(total - np.eye(size))) > TOLERANCE_DERIVED:
        raise ValueError("Projectors do not sum to the identity")

    branches = []
    for k, projector in enumerate(projectors):
        branch = apply_operator(np.asarray(projector), state, on, unnormalized=True)
        weight = branch.norm2 if isinstance(branch, PureState) else branch.trace
        weight = min(max(weight, 0.0), 1.0)
        post = branch.normalized() if weight > TOLERANCE_CONSTRUCTION else None
        branches.append(
            MeasurementBranch(
                outcome=k, probability=weight, unnormalized=branch, post_state=post
            )
        )
    return branches


def compose_circuit(register: Register, steps: Sequence[tuple[Unitary, Sequence[str]]]) -> np.ndarray:
    """Compose gates placed on labeled wires into a single matrix.

    Args:
        register (Register): The wires.
        steps (Sequence[tuple[Unitary, Sequence[str]]]): Gates in time order with
            the wires they act on.

    Returns:
        np.ndarray: The `register.total`-square matrix of the circuit.
    """
    n = register.total
    array = np.eye(n, dtype=np.complex128).reshape(register.dims + (n,))
    current = register
    for gate, wires in steps:
        out = _out_register(current, tuple(wires), gate.in_register, gate.out_register)
        array, current = _contract(array, current, gate.matrix, tuple(wires), out)
    if current.labels != register.labels:
        raise ValueError("Circuit steps must act in place on the wires")
    return array.reshape(n, n)


def random_pure_state(register: Register, rng: np.random.Generator) -> PureState:
    """Haar-random pure state on `register`."""
    vector = rng.normal(size=register.total) + 1j * rng.normal(size=register.total)
    return PureState(register=register, amplitudes=vector / np.linalg.norm(vector))


def random_density(
    register: Register, rng: np.random.Generator, rank: Optional[int] = None
) -> DensityOperator:
    """Random mixed state from a Ginibre matrix of the given rank (full by default)."""
    n = register.total
    rank = n if rank is None else rank
    ginibre = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    matrix = ginibre @ ginibre.conj().T
    return DensityOperator(register=register, matrix=matrix / np.trace(matrix).real)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary matrix of size `dim`."""
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(dim, random_state=rng)
