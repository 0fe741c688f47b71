"""
Quantum masker module for qottkit.

A masker hides a d-level secret on wire C inside a bipartite output (A, B) by
applying a unitary M to the secret and a safe state ω_S, such that both output
marginals are independent of the secret. Purifying ω_S into |Ω⟩_SK turns every
masker into a (2,3)-threshold secret sharing scheme over the shares A, B, K.

Classes:
    MaskerLayout: Wire names of a masker circuit and the roles of its output shares.
    Masker: A masking unitary together with its safe state.
    SafeKeyState: A purification |Ω⟩_SK of a masker's safe state.
    DualMasker: The factorization of a masker against one hidden share.
    MaskingReport: Result of the masking certificate.
    QssReport: Result of the (2,3)-threshold sharing check.
    EntropyAudit: Safe-state entropy compared against the randomness-cost bounds.
    MaskersService: Constructors and verifiers for maskers.

Example:
    ```python
    masker = simulator.maskers.masker_minimal(3)
    report = simulator.maskers.verify_masking(masker)
    print(report.passed, report.safe_entropy)

    dual = simulator.maskers.dual_masker(masker)
    print(dual.residual)
    ```
"""

import hashlib
import logging
from functools import lru_cache
from itertools import combinations
from typing import Literal, TypeAlias, Union

import numpy as np
from cachetools import LRUCache
from scipy.linalg import null_space

from qottkit._qott_model import _QottBaseModel
from qottkit.gates import (
    controlled_power,
    fourier,
    gen_pauli_x,
    gen_pauli_z,
    parity,
)
from qottkit.measures import fidelity, trace_distance, von_neumann_entropy
from qottkit.qudits import (
    TOLERANCE_CONSTRUCTION,
    TOLERANCE_DERIVED,
    DensityOperator,
    PureState,
    Register,
    Unitary,
    apply_unitary,
    check_dim,
    compose_circuit,
    partial_trace,
    tensor,
)
from qottkit.simulator import QottSimulator

_logger = logging.getLogger(__name__)

MaskerFamily: TypeAlias = Literal[
    "four-qudit", "qotp", "minimal", "minimal-dual", "identity"
]
"""Names of the built-in masker constructors."""

MASKING_TOLERANCE = 1e-9
"""Largest marginal deviation, and largest unmask infidelity, of a passing masker."""

FACTORIZATION_LIMIT = 1e-6
"""Residual above which a dual factorization is rejected as a non-masking input."""

RECOVERY_TOLERANCE = 1e-8
"""Largest infidelity of a passing share-pair recovery."""

SUPPORT_CUTOFF = 1e-12
"""Eigenvalues at or below this are outside the support of a purified state."""


class MaskerLayout(_QottBaseModel):
    """Wire names of a masker circuit.

    Attributes:
        secret_wires (tuple[str, ...]): Input wires grouped into C.
        safe_wires (tuple[str, ...]): Input wires grouped into S.
        a_wires (tuple[str, ...]): Output wires grouped into A.
        b_wires (tuple[str, ...]): Output wires grouped into B.
        share_roles (tuple[str, str]): The share names the outputs play in the
            purified scheme, `("A", "B")` for ordinary maskers.
    """

    secret_wires: tuple[str, ...] = ("C",)
    safe_wires: tuple[str, ...]
    a_wires: tuple[str, ...]
    b_wires: tuple[str, ...]
    share_roles: tuple[str, str] = ("A", "B")


class Masker(_QottBaseModel):
    """A masking unitary M_{CS→AB} and the safe state ω_S it consumes.

    Attributes:
        family (str): Constructor name, e.g. `"minimal"`.
        d (int): Dimension of the secret.
        unitary (Unitary): M, from `(C, S)` to `(A, B)`; S, A and B group the
            wires listed in `layout`.
        safe_state (DensityOperator): ω_S on the register `(S,)`.
        layout (MaskerLayout): Wire names.
    """

    family: str
    d: int
    unitary: Unitary
    safe_state: DensityOperator
    layout: MaskerLayout

    def __str__(self):
        return f"{self.family}(d={self.d})"

    @property
    def dims(self) -> dict[str, int]:
        """Grouped dimensions of C, S, A and B."""
        return {
            "C": self.unitary.in_register.dim("C"),
            "S": self.unitary.in_register.dim("S"),
            "A": self.unitary.out_register.dim("A"),
            "B": self.unitary.out_register.dim("B"),
        }

    def fingerprint(self) -> str:
        """Content hash of the unitary and safe state, used as a cache key."""
        digest = hashlib.sha256()
        digest.update(f"{self.family}:{self.d}".encode())
        digest.update(np.ascontiguousarray(self.unitary.matrix).tobytes())
        digest.update(np.ascontiguousarray(self.safe_state.matrix).tobytes())
        return digest.hexdigest()

    def verify(self) -> "MaskingReport":
        """Run the masking certificate through the attached simulator."""
        return self._require_simulator().maskers.verify_masking(self)


class SafeKeyState(_QottBaseModel):
    """A purification |Ω⟩_SK = Σ_k √λ_k |e_k⟩_S |k⟩_K of ω_S.

    Attributes:
        state (PureState): The purification on `(S, K)`; K has dimension rank(ω_S).
        masker (Masker): The purified masker.
    """

    state: PureState
    masker: Masker

    @property
    def key_dim(self) -> int:
        return self.state.register.dim("K")

    @property
    def amplitudes_sk(self) -> np.ndarray:
        """The purification as a `dim(S) × dim(K)` matrix."""
        return self.state.amplitudes.reshape(self.state.register.dims)


class DualMasker(_QottBaseModel):
    """Factorization V = (I_hidden ⊗ N)(I_C ⊗ |Ψ⟩_{hidden,S'}) of a masker isometry.

    With the default hidden share A this is the dual masker N_{CS'→BK}.

    Attributes:
        masker (Masker): The factored masker.
        hidden (str): The share carried by |Ψ⟩ (`"A"` or `"B"`).
        unitary (Unitary): N, from `(C, S)` to the two remaining shares.
        partner_state (PureState): |Ψ⟩ on `(hidden, S)`.
        residual (float): Operator-norm distance between V and the factorization
            after global phase alignment.
    """

    masker: Masker
    hidden: str = "A"
    unitary: Unitary
    partner_state: PureState
    residual: float

    def __str__(self):
        return f"DualMasker({self.masker}, hidden={self.hidden}, residual={self.residual:.2e})"

    def as_masker(self) -> Masker:
        """The dual viewed as a masker of its own, with safe state Tr_hidden |Ψ⟩⟨Ψ|."""
        kept = tuple(label for label in ("A", "B", "K") if label != self.hidden)
        safe = partial_trace(self.partner_state, keep=("S",))
        safe = DensityOperator(register=safe.register, matrix=safe.matrix)
        out = self.unitary.out_register
        return Masker(
            family=f"{self.masker.family}-dual",
            d=self.masker.d,
            unitary=Unitary(
                in_register=self.unitary.in_register,
                out_register=Register.of(A=out.dims[0], B=out.dims[1]),
                matrix=self.unitary.matrix,
            ),
            safe_state=safe,
            layout=MaskerLayout(
                safe_wires=("S",), a_wires=(kept[0],), b_wires=(kept[1],), share_roles=kept
            ),
        )


class MaskingReport(_QottBaseModel):
    """Outcome of the masking certificate.

    Attributes:
        family (str): Masker family.
        d (int): Secret dimension.
        probe_count (int): Number of probe inputs.
        deviation_a (float): Max pairwise trace distance of the A marginals.
        deviation_b (float): Max pairwise trace distance of the B marginals.
        unmask_fidelity (float): Min fidelity of unmask(mask(ψ)) with ψ.
        safe_entropy (float): S(ω_S) in bits.
        passed (bool): Both deviations ≤ 1e-9 and fidelity ≥ 1 − 1e-9.
    """

    family: str
    d: int
    probe_count: int
    deviation_a: float
    deviation_b: float
    unmask_fidelity: float
    safe_entropy: float
    passed: bool

    @property
    def max_deviation(self) -> float:
        return max(self.deviation_a, self.deviation_b)


class QssReport(_QottBaseModel):
    """Outcome of the (2,3)-threshold sharing check on the shares A, B, K.

    Attributes:
        share_deviations (dict[str, float]): Max pairwise trace distance of each
            single-share marginal over the probes.
        share_entropies (dict[str, float]): Entropy of each single-share marginal.
        recovery_fidelities (dict[str, float]): Min recovery fidelity for the pairs
            `"AB"` (via M†), `"BK"` (via N†) and `"AK"` (via the synthesized decoder).
        passed (bool): All single shares hide and all pairs recover.
    """

    family: str
    d: int
    share_deviations: dict[str, float]
    share_entropies: dict[str, float]
    recovery_fidelities: dict[str, float]
    passed: bool


class EntropyAudit(_QottBaseModel):
    """Safe-state entropy against the randomness-cost bounds.

    Attributes:
        safe_entropy (float): S(ω_S) in bits.
        general_bound (float): log₂d, the bound for every masker.
        separable_bound (float): 2log₂d, the bound for maskers with separable output.
        meets_general_bound (bool): S(ω_S) ≥ log₂d − 1e-9.
        tight_general (bool): S(ω_S) = log₂d within 1e-9.
        tight_separable (bool): S(ω_S) = 2log₂d within 1e-9.
        strictly_above_general (bool): S(ω_S) > log₂d + 1e-9.
    """

    family: str
    d: int
    safe_entropy: float
    general_bound: float
    separable_bound: float
    meets_general_bound: bool
    tight_general: bool
    tight_separable: bool
    strictly_above_general: bool


@lru_cache(maxsize=None)
def probe_states(d: int) -> tuple[PureState, ...]:
    """Probe inputs on register `(C,)` whose projectors span the operator space.

    Computational and Fourier basis states, the states (|j⟩ + i|j+1⟩)/√2, and
    the pair superpositions (|j⟩ + |k⟩)/√2 and (|j⟩ + i|k⟩)/√2 for j < k.
    """
    d = check_dim(d)
    register = Register.of(C=d)
    basis = np.eye(d, dtype=np.complex128)
    vectors = [basis[j] for j in range(d)]
    vectors += [fourier(d).matrix[:, j] for j in range(d)]
    vectors += [(basis[j] + 1j * basis[(j + 1) % d]) / np.sqrt(2) for j in range(d)]
    for j, k in combinations(range(d), 2):
        vectors.append((basis[j] + basis[k]) / np.sqrt(2))
        vectors.append((basis[j] + 1j * basis[k]) / np.sqrt(2))
    return tuple(PureState(register=register, amplitudes=v) for v in vectors)


def _max_pairwise_distance(states: list[DensityOperator]) -> float:
    worst = 0.0
    for left, right in combinations(states, 2):
        worst = max(worst, trace_distance(left, right))
    return worst


def _wrap(family: str, d: int, wires: Register, steps, safe: np.ndarray, layout: MaskerLayout) -> Masker:
    # every wire is d-level; output wires are the circuit wires in order, A first
    def size(labels):
        return d ** len(labels)

    if len(layout.a_wires) + len(layout.b_wires) != len(wires):
        raise ValueError(f"Layout of {family} does not cover the {len(wires)} circuit wires")
    matrix = compose_circuit(wires, steps)
    unitary = Unitary(
        in_register=Register.of(C=d, S=size(layout.safe_wires)),
        out_register=Register.of(A=size(layout.a_wires), B=size(layout.b_wires)),
        matrix=matrix,
    )
    safe_state = DensityOperator(register=Register.of(S=size(layout.safe_wires)), matrix=safe)
    return Masker(family=family, d=d, unitary=unitary, safe_state=safe_state, layout=layout)


class MaskersService:
    """Service class for constructing and certifying maskers.

    Constructors are cached per dimension; purifications and dual factorizations
    are cached per masker content.

    Example:
        ```python
        for name in simulator.maskers.family_names():
            masker = simulator.maskers.get_masker(name, 3)
            print(name, simulator.maskers.verify_masking(masker).passed)
        ```
    """

    # fmt: off
    _purification_map: LRUCache[str, SafeKeyState] = LRUCache(maxsize=64)
    _dual_map: LRUCache[tuple[str, str], DualMasker] = LRUCache(maxsize=64)
    # fmt: on

    def __init__(self, simulator: QottSimulator):
        self._simulator = simulator

    def _attach(self, masker: Masker) -> Masker:
        masker._set_simulator(self._simulator)
        return masker

    def clear_caches(self) -> None:
        for constructor in (
            self.masker_four_qudit,
            self.masker_qotp,
            self.masker_minimal,
            self.masker_minimal_dual,
            self.masker_identity,
        ):
            constructor.cache_clear()
        self._purification_map.clear()
        self._dual_map.clear()

    #########################
    #     Constructors      #
    #########################

    def family_names(self) -> tuple[str, ...]:
        """Names accepted by `get_masker`."""
        return ("four-qudit", "qotp", "minimal", "minimal-dual", "identity")

    def get_masker(self, family: Union[MaskerFamily, str], d: int) -> Masker:
        """Look up a masker constructor by family name.

        Raises:
            ValueError: If the family is unknown.
        """
        constructors = {
            "four-qudit": self.masker_four_qudit,
            "qotp": self.masker_qotp,
            "minimal": self.masker_minimal,
            "minimal-dual": self.masker_minimal_dual,
            "identity": self.masker_identity,
        }
        if family not in constructors:
            raise ValueError(
                f"Unknown masker family {family!r}; expected one of {self.family_names()}"
            )
        return constructors[family](d)

    @lru_cache
    def masker_four_qudit(self, d: int) -> Masker:
        """The four-qudit masker.

        Wires C, S1 = |0⟩, S2 = |0⟩, S3 = I/d. X on C controlled by S3; X on S2
        controlled by C and H on S3; X on S1 controlled by S3. The outputs are
        A = (C, S1) and B = (S2, S3). Consumes log₂d bits.
        """
        d = check_dim(d)
        cx = controlled_power(gen_pauli_x(d))
        wires = Register.of(C=d, S1=d, S2=d, S3=d)
        steps = [
            (cx, ("S3", "C")),
            (cx, ("C", "S2")),
            (fourier(d), ("S3",)),
            (cx, ("S3", "S1")),
        ]
        ground = np.zeros((d, d))
        ground[0, 0] = 1.0
        safe = np.kron(np.kron(ground, ground), np.eye(d) / d)
        layout = MaskerLayout(
            safe_wires=("S1", "S2", "S3"), a_wires=("A1", "A2"), b_wires=("B1", "B2")
        )
        return self._attach(_wrap("four-qudit", d, wires, steps, safe, layout))

    @lru_cache
    def masker_qotp(self, d: int) -> Masker:
        """The quantum one-time pad: X^{s1} then Z^{s2} on C from two uniform safe dits.

        Output A = C and B = (S1, S2). Consumes 2log₂d bits and leaves a
        quantum-classical output.
        """
        d = check_dim(d)
        wires = Register.of(C=d, S1=d, S2=d)
        steps = [
            (controlled_power(gen_pauli_x(d)), ("S1", "C")),
            (controlled_power(gen_pauli_z(d)), ("S2", "C")),
        ]
        safe = np.eye(d * d) / (d * d)
        layout = MaskerLayout(safe_wires=("S1", "S2"), a_wires=("A",), b_wires=("B1", "B2"))
        return self._attach(_wrap("qotp", d, wires, steps, safe, layout))

    @lru_cache
    def masker_minimal(self, d: int) -> Masker:
        """The two-wire masker (c, s) -> (c + s, c + 2s); masks for odd d only."""
        d = check_dim(d)
        cx = controlled_power(gen_pauli_x(d))
        wires = Register.of(C=d, S=d)
        steps = [(cx, ("S", "C")), (cx, ("C", "S"))]
        layout = MaskerLayout(safe_wires=("S",), a_wires=("A",), b_wires=("B",))
        return self._attach(_wrap("minimal", d, wires, steps, np.eye(d) / d, layout))

    @lru_cache
    def masker_minimal_dual(self, d: int) -> Masker:
        """The dual of the minimal masker, with outputs playing the shares (B, K).

        H² on C; X² on C controlled by S; X† on S controlled by C; H² on S.
        """
        d = check_dim(d)
        x = gen_pauli_x(d)
        wires = Register.of(C=d, S=d)
        steps = [
            (parity(d), ("C",)),
            (controlled_power(x.power(2)), ("S", "C")),
            (controlled_power(x.dagger()), ("C", "S")),
            (parity(d), ("S",)),
        ]
        layout = MaskerLayout(
            safe_wires=("S",), a_wires=("B",), b_wires=("K",), share_roles=("B", "K")
        )
        return self._attach(_wrap("minimal-dual", d, wires, steps, np.eye(d) / d, layout))

    @lru_cache
    def masker_identity(self, d: int) -> Masker:
        """The non-hiding control: M = I ⊗ I with ω_S = |0⟩⟨0|."""
        d = check_dim(d)
        safe = np.zeros((d, d))
        safe[0, 0] = 1.0
        layout = MaskerLayout(safe_wires=("S",), a_wires=("A",), b_wires=("B",))
        return self._attach(_wrap("identity", d, Register.of(C=d, S=d), [], safe, layout))

    #########################
    #   Masking and unmask  #
    #########################

    def mask(self, m: Masker, rho: Union[PureState, DensityOperator]) -> DensityOperator:
        """The masked state M(ρ ⊗ ω_S)M† on `(A, B)`.

        Raises:
            ValueError: If ρ is not a single d-level subsystem.
        """
        if rho.register.dims != (m.d,):
            raise ValueError(f"Secret must live on one {m.d}-level subsystem, got {rho.register}")
        secret = rho.density() if isinstance(rho, PureState) else rho
        secret = DensityOperator(register=Register.of(C=m.d), matrix=secret.matrix)
        return apply_unitary(m.unitary, tensor(secret, m.safe_state))

    def unmask(self, m: Masker, masked: DensityOperator) -> DensityOperator:
        """Apply M† to a state on `(A, B)`, trace out S and return the state on C.

        Raises:
            ValueError: If `masked` does not live on the masker's output register.
        """
        if masked.register.dims != m.unitary.out_register.dims:
            raise ValueError(
                f"Masked state on {masked.register} does not match {m.unitary.out_register}"
            )
        relabeled = DensityOperator(
            register=m.unitary.out_register, matrix=masked.matrix, unnormalized=masked.unnormalized
        )
        return partial_trace(apply_unitary(m.unitary.dagger(), relabeled), keep=("C",))

    #########################
    #     Purifications     #
    #########################

    def purify_safe(self, m: Masker) -> SafeKeyState:
        """Canonical purification of ω_S with K of dimension rank(ω_S).

        Diagonal safe states are purified in the computational basis; others in
        their eigenbasis.
        """
        key = m.fingerprint()
        if key in self._purification_map:
            return self._purification_map[key]

        omega = m.safe_state.matrix
        off_diagonal = omega - np.diag(np.diag(omega))
        if np.max(np.abs(off_diagonal), initial=0.0) <= TOLERANCE_CONSTRUCTION:
            eigenvalues = np.diag(omega).real
            vectors = np.eye(omega.shape[0], dtype=np.complex128)
        else:
            eigenvalues, vectors = np.linalg.eigh(omega)
        support = [k for k, weight in enumerate(eigenvalues) if weight > SUPPORT_CUTOFF]
        weights = np.sqrt(eigenvalues[support])
        matrix = vectors[:, support] * weights
        matrix = matrix / np.linalg.norm(matrix)
        state = PureState(
            register=Register.of(S=omega.shape[0], K=len(support)),
            amplitudes=matrix.reshape(-1),
        )
        safe_key = SafeKeyState(state=state, masker=m)
        safe_key._set_simulator(self._simulator)
        self._purification_map[key] = safe_key
        return safe_key

    def isometry(self, m: Masker) -> np.ndarray:
        """V = (M ⊗ I_K)(I_C ⊗ |Ω⟩_SK) as a matrix from C to `(A, B, K)`."""
        dims = m.dims
        omega = self.purify_safe(m).amplitudes_sk
        blocks = m.unitary.matrix.reshape(dims["A"] * dims["B"], dims["C"], dims["S"])
        v = np.einsum("xcs,sk->xkc", blocks, omega)
        return v.reshape(-1, dims["C"])

    def _share_register(self, m: Masker) -> Register:
        dims = m.dims
        return Register.of(A=dims["A"], B=dims["B"], K=self.purify_safe(m).key_dim)

    def _outputs(self, m: Masker) -> list[PureState]:
        v = self.isometry(m)
        register = self._share_register(m)
        return [
            PureState(register=register, amplitudes=v @ probe.amplitudes, unnormalized=True)
            for probe in probe_states(m.d)
        ]

    #########################
    #     Certificates      #
    #########################

    def verify_masking(self, m: Masker) -> MaskingReport:
        """Certify that both output marginals are independent of the secret.

        The probes are those of `probe_states`; by linearity, constant marginals
        on them imply constant marginals on every input.

        Returns:
            MaskingReport: Deviations, unmask fidelity and safe entropy. A failing
                certificate is reported, never raised.
        """
        probes = probe_states(m.d)
        outputs = self._outputs(m)
        deviation_a = _max_pairwise_distance([partial_trace(o, keep=("A",)) for o in outputs])
        deviation_b = _max_pairwise_distance([partial_trace(o, keep=("B",)) for o in outputs])

        inverse = m.unitary.dagger()
        worst_fidelity = 1.0
        for probe, output in zip(probes, outputs):
            recovered = partial_trace(apply_unitary(inverse, output, on=("A", "B")), keep=("C",))
            worst_fidelity = min(worst_fidelity, fidelity(probe, recovered))

        safe_entropy = von_neumann_entropy(m.safe_state)
        passed = (
            deviation_a <= MASKING_TOLERANCE
            and deviation_b <= MASKING_TOLERANCE
            and worst_fidelity >= 1 - MASKING_TOLERANCE
        )
        if not passed:
            _logger.warning(
                f"Masker {m} failed the masking certificate: "
                f"deviations A={deviation_a:.3e}, B={deviation_b:.3e}, fidelity={worst_fidelity:.12f}"
            )
        return MaskingReport(
            family=m.family,
            d=m.d,
            probe_count=len(probes),
            deviation_a=deviation_a,
            deviation_b=deviation_b,
            unmask_fidelity=worst_fidelity,
            safe_entropy=safe_entropy,
            passed=passed,
        )

    def qc_structure(self, m: Masker) -> float:
        """Largest off-block mass of a masked probe in the B computational basis.

        Zero means every output is quantum-classical across A|B.
        """
        dims = m.dims
        off_block = ~np.eye(dims["B"], dtype=bool)
        worst = 0.0
        for output in self._outputs(m):
            t = output.amplitudes.reshape(dims["A"], dims["B"], -1)
            rho = np.einsum("abk,cdk->bdac", t, t.conj())
            worst = max(worst, float(np.sum(np.abs(rho[off_block]))))
        return worst

    def entropy_audit(self, m: Masker) -> EntropyAudit:
        """Compare S(ω_S) with the log₂d and 2log₂d randomness-cost bounds."""
        entropy = von_neumann_entropy(m.safe_state)
        general = float(np.log2(m.d))
        return EntropyAudit(
            family=m.family,
            d=m.d,
            safe_entropy=entropy,
            general_bound=general,
            separable_bound=2 * general,
            meets_general_bound=entropy >= general - TOLERANCE_DERIVED,
            tight_general=abs(entropy - general) <= TOLERANCE_DERIVED,
            tight_separable=abs(entropy - 2 * general) <= TOLERANCE_DERIVED,
            strictly_above_general=entropy > general + TOLERANCE_DERIVED,
        )

    #########################
    #   Dual factorization  #
    #########################

    def dual_masker(self, m: Masker, hidden: Literal["A", "B"] = "A") -> DualMasker:
        """Factor the masker isometry against the share `hidden`.

        The constant marginal σ of the hidden share is purified into |Ψ⟩ and the
        map N onto the two other shares is solved for by least squares on the
        support of σ, then completed to a unitary on the orthocomplement.

        Raises:
            ValueError: If the factorization residual exceeds 1e-6, which signals
                a non-masking input.
        """
        key = (m.fingerprint(), hidden)
        if key in self._dual_map:
            return self._dual_map[key]
        if hidden not in ("A", "B"):
            raise ValueError(f"Hidden share must be 'A' or 'B', got {hidden!r}")

        register = self._share_register(m)
        d = m.d
        v = self.isometry(m).reshape(register.dims + (d,))
        if hidden == "B":
            v = np.transpose(v, (1, 0, 2, 3))
        hidden_dim = v.shape[0]
        rest_dim = v.shape[1] * v.shape[2]
        v = v.reshape(hidden_dim, rest_dim, d)
        kept = tuple(label for label in ("A", "B", "K") if label != hidden)

        if (rest_dim % d) != 0:
            raise ValueError(f"Masker {m} cannot be factored: {rest_dim} is not a multiple of {d}")
        ancilla_dim = rest_dim // d

        sigma = np.einsum("xyc,zyc->xz", v, v.conj()) / d
        eigenvalues, vectors = np.linalg.eigh((sigma + sigma.conj().T) / 2)
        support = [k for k, weight in enumerate(eigenvalues) if weight > SUPPORT_CUTOFF]
        rank = len(support)
        if rank > ancilla_dim:
            raise ValueError(f"Masker {m} cannot be factored: rank {rank} > {ancilla_dim}")
        weighted = vectors[:, support] * np.sqrt(eigenvalues[support])

        n = np.zeros((rest_dim, d, ancilla_dim), dtype=np.complex128)
        for c in range(d):
            solution, *_ = np.linalg.lstsq(weighted, v[:, :, c], rcond=None)
            n[:, c, :rank] = solution.T
        n = n.reshape(rest_dim, d * ancilla_dim)
        used = [c * ancilla_dim + i for c in range(d) for i in range(rank)]
        free = [c * ancilla_dim + i for c in range(d) for i in range(rank, ancilla_dim)]
        isometry_defect = np.max(
            np.abs(n[:, used].conj().T @ n[:, used] - np.eye(len(used))), initial=0.0
        )
        if isometry_defect > FACTORIZATION_LIMIT:
            raise ValueError(
                f"Masker {m} cannot be factored: partial dual is not isometric ({isometry_defect:.3e})"
            )
        if free:
            complement = null_space(n[:, used].conj().T)
            n[:, free] = complement[:, : len(free)]

        partner = np.zeros((hidden_dim, ancilla_dim), dtype=np.complex128)
        partner[:, :rank] = weighted
        partner = partner / np.linalg.norm(partner)
        rebuilt = np.einsum("xs,ycs->xyc", partner, n.reshape(rest_dim, d, ancilla_dim))
        overlap = np.vdot(rebuilt.reshape(-1), v.reshape(-1))
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        difference = (v - phase * rebuilt).reshape(hidden_dim * rest_dim, d)
        residual = float(np.linalg.norm(difference, 2))
        if residual > FACTORIZATION_LIMIT:
            raise ValueError(f"Masker {m} cannot be factored: residual {residual:.3e}")
        _logger.debug(f"Dual of {m} against {hidden}: residual {residual:.3e}")

        first, second = kept
        out_dims = {"A": register.dim("A"), "B": register.dim("B"), "K": register.dim("K")}
        dual = DualMasker(
            masker=m,
            hidden=hidden,
            unitary=Unitary(
                in_register=Register.of(C=d, S=ancilla_dim),
                out_register=Register(labels=kept, dims=(out_dims[first], out_dims[second])),
                matrix=n,
            ),
            partner_state=PureState(
                register=Register(labels=(hidden, "S"), dims=(hidden_dim, ancilla_dim)),
                amplitudes=partner.reshape(-1),
            ),
            residual=residual,
        )
        dual._set_simulator(self._simulator)
        self._dual_map[key] = dual
        return dual

    def qss23_check(self, m: Masker) -> QssReport:
        """Check that the purified masker is a (2,3)-threshold scheme on A, B, K.

        Every single share must be independent of the secret, and every pair must
        recover it: (A, B) through M†, (B, K) through the dual N† and (A, K)
        through the factorization against B.
        """
        outputs = self._outputs(m)
        probes = probe_states(m.d)
        deviations, entropies = {}, {}
        for share in ("A", "B", "K"):
            marginals = [partial_trace(o, keep=(share,)) for o in outputs]
            deviations[share] = _max_pairwise_distance(marginals)
            entropies[share] = von_neumann_entropy(marginals[0].normalized())

        recoveries = {"AB": 1.0, "BK": 1.0, "AK": 1.0}
        inverse = m.unitary.dagger()
        decoders = {}
        try:
            decoders["BK"] = self.dual_masker(m, hidden="A").unitary.dagger()
            decoders["AK"] = self.dual_masker(m, hidden="B").unitary.dagger()
        except ValueError as e:
            _logger.error(f"Error factoring masker {m}: {e}")
            recoveries["BK"] = recoveries["AK"] = 0.0

        for probe, output in zip(probes, outputs):
            restored = partial_trace(apply_unitary(inverse, output, on=("A", "B")), keep=("C",))
            recoveries["AB"] = min(recoveries["AB"], fidelity(probe, restored))
            for pair, decoder in decoders.items():
                on = tuple(pair)
                restored = partial_trace(apply_unitary(decoder, output, on=on), keep=("C",))
                recoveries[pair] = min(recoveries[pair], fidelity(probe, restored))

        passed = all(value <= MASKING_TOLERANCE for value in deviations.values()) and all(
            value >= 1 - RECOVERY_TOLERANCE for value in recoveries.values()
        )
        if not passed:
            _logger.warning(f"Masker {m} failed the (2,3)-threshold check: {recoveries}")
        return QssReport(
            family=m.family,
            d=m.d,
            share_deviations=deviations,
            share_entropies=entropies,
            recovery_fidelities=recoveries,
            passed=passed,
        )
