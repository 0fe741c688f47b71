"""
Quantum one-time table (QOTT) module for qottkit.

A QOTT is the commodity a trusted initializer distributes before a commitment:
the masked half of a maximally entangled state |Θ⟩_EC, with the key system of
the purified safe state locked by the generalized Pauli power
X^{j1·i1} Z^{j2·i2}, plus an index card (i1, i2) ∈ Z_p² for Alice and an
index card (j1, j2) ∈ J² for Bob.

Classes:
    QottParams: The prime p, the index set J and the masker.
    IndexCards: Alice's and Bob's index cards.
    QottCommodity: The commodity state on (E, A, B, K) with its cards.
    SrcRow: One row of the shared randomness cost comparison.
    SrcReport: The shared randomness cost comparison.
    QottService: Construction and audits of commodities.

Functions:
    lock_operator: The key lock X^{j1·i1} Z^{j2·i2}.
    unlock_operator: Its inverse for revealed indices.

Example:
    ```python
    params = simulator.qott.params(p=5, J=[1, 2])
    commodity = simulator.qott.build_qott(params, seed=7)
    print(simulator.qott.twirl_check(params))
    print(simulator.qott.src_report(5, [1, 2]).rows)
    ```
"""

import logging
from functools import lru_cache
from itertools import product
from typing import Optional, Sequence

import numpy as np
from pydantic import field_validator, model_validator

from qottkit._qott_model import _QottBaseModel
from qottkit.gates import weyl
from qottkit.maskers import Masker
from qottkit.measures import (
    ensemble_spectrum,
    mutual_information,
    shannon_entropy,
    spectrum_entropy,
    trace_distance,
)
from qottkit.qudits import (
    TOLERANCE_STATE,
    DensityOperator,
    PureState,
    Register,
    Unitary,
    is_prime,
    partial_trace,
)
from qottkit.simulator import QottSimulator

_logger = logging.getLogger(__name__)

TWIRL_TOLERANCE = 1e-10
"""Largest trace distance of a twirled key state from ω_S ⊗ ω_K."""


class QottParams(_QottBaseModel):
    """Parameters of a QOTT.

    Attributes:
        p (int): Prime dimension of the secret and of the lock.
        J (tuple[int, ...]): Bob's index set, a subset of {1, ..., p − 1} with at
            least two elements.
        masker (Masker): A p-dimensional masker whose safe state has the single
            nonzero eigenvalue 1/p with degeneracy p.
    """

    p: int
    J: tuple[int, ...]
    masker: Masker

    @field_validator("J", mode="before")
    @classmethod
    def _sort_indices(cls, value):
        return tuple(sorted(int(j) for j in value))

    @model_validator(mode="after")
    def _check_params(self):
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if len(set(self.J)) != len(self.J):
            raise ValueError(f"J must not repeat indices: {self.J}")
        if len(self.J) < 2:
            raise ValueError(f"J must have at least two elements, got {self.J}")
        if any(j < 1 or j >= self.p for j in self.J):
            raise ValueError(f"J must be a subset of 1..{self.p - 1}, got {self.J}")
        if self.masker.d != self.p:
            raise ValueError(f"Masker dimension {self.masker.d} differs from p = {self.p}")
        eigenvalues = np.linalg.eigvalsh(self.masker.safe_state.matrix)
        nonzero = eigenvalues[eigenvalues > TOLERANCE_STATE]
        if len(nonzero) != self.p or np.max(np.abs(nonzero - 1 / self.p)) > TOLERANCE_STATE:
            raise ValueError(
                f"Safe state of {self.masker} must have eigenvalue 1/{self.p} with "
                f"degeneracy {self.p} and no other nonzero eigenvalue"
            )
        return self

    def __str__(self):
        return f"QottParams(p={self.p}, J={list(self.J)}, masker={self.masker})"

    def twirl_check(self) -> float:
        """Run the twirl check through the attached simulator."""
        return self._require_simulator().qott.twirl_check(self)


class IndexCards(_QottBaseModel):
    """The private index cards.

    Attributes:
        alice (tuple[int, int]): (i1, i2) ∈ Z_p².
        bob (tuple[int, int]): (j1, j2) ∈ J².
    """

    alice: tuple[int, int]
    bob: tuple[int, int]

    def check(self, params: QottParams) -> "IndexCards":
        """Validate the card ranges against `params`.

        Raises:
            ValueError: If an index is out of range.
        """
        if any(not 0 <= i < params.p for i in self.alice):
            raise ValueError(f"Alice's card {self.alice} is not in Z_{params.p}^2")
        if any(j not in params.J for j in self.bob):
            raise ValueError(f"Bob's card {self.bob} is not in J^2 for J = {params.J}")
        return self


class QottCommodity(_QottBaseModel):
    """A QOTT instance.

    Attributes:
        state (PureState): (I_E ⊗ M ⊗ X^{j1 i1} Z^{j2 i2}) |Θ⟩_EC |Ω⟩_SK on (E, A, B, K).
        params (QottParams): Parameters.
        cards (IndexCards): The index cards.
    """

    state: PureState
    params: QottParams
    cards: IndexCards

    def __str__(self):
        return f"QottCommodity(p={self.params.p}, J={list(self.params.J)})"

    def bob_marginal(self) -> DensityOperator:
        """Bob's share, the reduced state on (B, K)."""
        return partial_trace(self.state, keep=("B", "K"))

    def alice_marginal(self) -> DensityOperator:
        """Alice's share, the reduced state on (E, A)."""
        return partial_trace(self.state, keep=("E", "A"))


class SrcRow(_QottBaseModel):
    """One scheme in the shared randomness cost comparison.

    Attributes:
        scheme (str): `qott`, `rivest-bit`, `qotp-via-rivest` or `superdense`.
        formula (str): The closed form.
        formula_bits (float): The closed form evaluated at the report parameters.
        computed_bits (float): The same cost obtained from a spectral or
            enumerated computation.
        note (str): How the row is instantiated.
    """

    scheme: str
    formula: str
    formula_bits: float
    computed_bits: float
    note: str

    @property
    def matches(self) -> bool:
        return abs(self.formula_bits - self.computed_bits) <= 1e-9


class SrcReport(_QottBaseModel):
    """Shared randomness cost of the commitment routes at (p, J).

    Attributes:
        p (int): Prime dimension.
        J (tuple[int, ...]): Index set.
        rivest_field (int): Field size p′ of the classical scheme.
        rows (list[SrcRow]): One row per scheme.
    """

    p: int
    J: tuple[int, ...]
    rivest_field: int
    rows: list[SrcRow]

    def row(self, scheme: str) -> SrcRow:
        return next(row for row in self.rows if row.scheme == scheme)


def lock_operator(p: int, alice: Sequence[int], bob: Sequence[int]) -> Unitary:
    """The key lock X^{j1·i1} Z^{j2·i2} for cards (i1, i2) and (j1, j2)."""
    (i1, i2), (j1, j2) = alice, bob
    return weyl(p, (j1 * i1) % p, (j2 * i2) % p)


def unlock_operator(p: int, revealed: Sequence[int], bob: Sequence[int]) -> Unitary:
    """Z^{−j2·k2} X^{−j1·k1}, Bob's unlock for revealed indices (k1, k2)."""
    return lock_operator(p, revealed, bob).dagger()


class QottService:
    """Service class for QOTT commodities.

    Example:
        ```python
        params = simulator.qott.params(3, [1, 2])
        commodity = simulator.qott.build_qott(params, cards=IndexCards(alice=(0, 0), bob=(1, 1)))
        bob_view = commodity.bob_marginal()
        ```
    """

    def __init__(self, simulator: QottSimulator):
        self._simulator = simulator

    def clear_caches(self) -> None:
        self._params.cache_clear()
        self._superdense_information.cache_clear()

    def params(self, p: int, J: Sequence[int], family: str = "minimal") -> QottParams:
        """Build QottParams with the masker `family` of dimension p.

        The minimal masker is the default; `"four-qudit"` and `"minimal-dual"`
        also meet the safe-state requirement.

        Raises:
            ValueError: If p, J or the masker's safe state is invalid.
        """
        return self._params(int(p), tuple(sorted(int(j) for j in J)), family)

    @lru_cache
    def _params(self, p: int, J: tuple[int, ...], family: str) -> QottParams:
        if not is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        params = QottParams(p=p, J=J, masker=self._simulator.maskers.get_masker(family, p))
        params._set_simulator(self._simulator)
        return params

    def draw_cards(self, params: QottParams, rng: np.random.Generator) -> IndexCards:
        """Draw uniform cards (i1, i2) ∈ Z_p² and (j1, j2) ∈ J²."""
        i1, i2 = (int(i) for i in rng.integers(0, params.p, size=2))
        j1, j2 = (int(j) for j in rng.choice(np.asarray(params.J), size=2))
        return IndexCards(alice=(i1, i2), bob=(j1, j2))

    def commodity_vector(self, params: QottParams, cards: IndexCards) -> np.ndarray:
        """Amplitudes of the commodity state as an array of shape (E, A, B, K)."""
        maskers = self._simulator.maskers
        masker = params.masker
        dims = masker.dims
        v = maskers.isometry(masker)
        key_dim = maskers.purify_safe(masker).key_dim
        lock = lock_operator(params.p, cards.alice, cards.bob).matrix
        amplitudes = (v.T / np.sqrt(params.p)).reshape(params.p, dims["A"] * dims["B"], key_dim)
        amplitudes = amplitudes @ lock.T
        return amplitudes.reshape(params.p, dims["A"], dims["B"], key_dim)

    def build_qott(
        self,
        params: QottParams,
        cards: Optional[IndexCards] = None,
        seed: Optional[int] = None,
    ) -> QottCommodity:
        """Build the commodity for `cards`, drawing them from `seed` when absent.

        Args:
            params (QottParams): Parameters.
            cards (IndexCards | None): Index cards; drawn uniformly when None.
            seed (int | None): Seed of the card draw; defaults to the master seed.

        Returns:
            QottCommodity: The commodity, deterministic under the seed.

        Raises:
            ValueError: If the cards are out of range.
        """
        if cards is None:
            cards = self.draw_cards(params, self._simulator.rng(seed))
        cards.check(params)
        tensor_ = self.commodity_vector(params, cards)
        register = Register(labels=("E", "A", "B", "K"), dims=tensor_.shape)
        commodity = QottCommodity(
            state=PureState(register=register, amplitudes=tensor_.reshape(-1)),
            params=params,
            cards=cards,
        )
        commodity._set_simulator(self._simulator)
        return commodity

    def bob_marginal(self, commodity: QottCommodity) -> DensityOperator:
        return commodity.bob_marginal()

    def alice_marginal(self, commodity: QottCommodity) -> DensityOperator:
        return commodity.alice_marginal()

    def twirl_check(
        self, params: QottParams, bob_cards: Optional[Sequence[tuple[int, int]]] = None
    ) -> float:
        """Max trace distance of the twirled key state from ω_S ⊗ ω_K.

        For each Bob card (j1, j2) the state (I_S ⊗ X^{j1 i1} Z^{j2 i2})|Ω⟩ is
        averaged over all (i1, i2) ∈ Z_p².

        Args:
            params (QottParams): Parameters.
            bob_cards (Sequence[tuple[int, int]] | None): Cards to probe; all of
                J² by default. Cards outside J² (such as (0, 0)) are accepted as
                diagnostic probes.
        """
        p = params.p
        safe_key = self._simulator.maskers.purify_safe(params.masker)
        omega = safe_key.amplitudes_sk
        register = safe_key.state.register
        target = np.kron(params.masker.safe_state.matrix, omega.T @ omega.conj())
        target = DensityOperator(register=register, matrix=target)
        cards = list(bob_cards) if bob_cards is not None else list(product(params.J, repeat=2))

        worst = 0.0
        for bob in cards:
            average = np.zeros((register.total, register.total), dtype=np.complex128)
            for alice in product(range(p), repeat=2):
                locked = (omega @ lock_operator(p, alice, bob).matrix.T).reshape(-1)
                average += np.outer(locked, locked.conj())
            twirled = DensityOperator(register=register, matrix=average / p**2)
            deviation = trace_distance(twirled, target)
            _logger.debug(f"Twirl deviation for Bob card {bob}: {deviation:.3e}")
            worst = max(worst, deviation)
        return worst

    def commodity_entropy(
        self, params: QottParams, J_override: Optional[Sequence[int]] = None
    ) -> float:
        """Entropy in bits of the card registers, read from the commodity states.

        Alice's share is the Holevo information of her card in the commodity
        given Bob's card, S(Σ_i |ψ_ij⟩⟨ψ_ij| / p²) since every |ψ_ij⟩ is pure,
        averaged over Bob's cards. It reaches 2log2(p) only when the locks of
        distinct Alice cards spread the key over the full Weyl twirl. Bob's
        share is the Shannon entropy of his uniform card over J².

        Args:
            params (QottParams): Parameters.
            J_override (Sequence[int] | None): A hypothetical index set, for
                diagnostics outside the |J| ≥ 2 precondition.
        """
        J = tuple(J_override) if J_override is not None else params.J
        p = params.p
        bob_cards = list(product(J, repeat=2))
        holevo = []
        for bob in bob_cards:
            vectors = [
                self.commodity_vector(params, IndexCards(alice=alice, bob=bob)).reshape(-1) / p
                for alice in product(range(p), repeat=2)
            ]
            holevo.append(spectrum_entropy(ensemble_spectrum(vectors)))
            _logger.debug(f"Holevo information of Alice's card given Bob card {bob}: {holevo[-1]:.9f}")
        bob_bits = shannon_entropy(np.full(len(bob_cards), 1.0 / len(bob_cards)))
        return float(np.mean(holevo)) + bob_bits

    def superdense_information(self, params: QottParams) -> float:
        """Mutual information in bits between committed and decoded dit pairs.

        Runs an honest superdense commitment for every pair in Z_p² on fixed
        cards and reads the joint distribution of sent and decoded pairs.
        """
        return self._superdense_information(params.p, params.J, params.masker.family)

    @lru_cache
    def _superdense_information(self, p: int, J: tuple[int, ...], family: str) -> float:
        params = self.params(p, J, family)
        cards = IndexCards(alice=(1, 1), bob=(J[0], J[-1]))
        joint = np.zeros((p * p, p * p))
        for a0, b0 in product(range(p), repeat=2):
            transcript = self._simulator.protocol.superdense_commit(a0, b0, params, cards=cards)
            joint[a0 * p + b0] = np.asarray(transcript.decode_probabilities) / p**2
        return mutual_information(joint)

    def src_report(
        self, p: int, J: Sequence[int], rivest_field: Optional[int] = None
    ) -> SrcReport:
        """Shared randomness cost of four commitment routes at (p, J).

        The Rivest ω(1) term is instantiated by the field size p′ of the
        classical scheme (default p), whose binding failure probability is 1/p′.

        Returns:
            SrcReport: Rows `qott`, `rivest-bit`, `qotp-via-rivest` and `superdense`.
        """
        params = self.params(p, J)
        field = int(rivest_field) if rivest_field is not None else params.p
        baseline = self._simulator.baseline
        log_p = float(np.log2(params.p))
        log_j = float(np.log2(len(params.J)))
        log_field = float(np.log2(field))
        qott_bits = self.commodity_entropy(params)
        superdense_bits = self.superdense_information(params)
        rows = [
            SrcRow(
                scheme="qott",
                formula="2log2(p) + 2log2|J|",
                formula_bits=2 * log_p + 2 * log_j,
                computed_bits=qott_bits,
                note="Holevo information of Alice's card plus the entropy of Bob's card",
            ),
            SrcRow(
                scheme="rivest-bit",
                formula="2log2(p') + log2(p')",
                formula_bits=3 * log_field,
                computed_bits=baseline.src_classical(field),
                note=(
                    f"line/point OTT over Z_{field}; the omega(1) term is log2(p'), "
                    f"the binding failure probability being 1/p'"
                ),
            ),
            SrcRow(
                scheme="qotp-via-rivest",
                formula="6log2(p)",
                formula_bits=6 * log_p,
                computed_bits=2 * baseline.src_classical(params.p),
                note="two classical dit commitments of the one-time pad keys",
            ),
            SrcRow(
                scheme="superdense",
                formula="log2(p) + 2log2|J|",
                formula_bits=log_p + 2 * log_j,
                computed_bits=qott_bits - superdense_bits / 2,
                note=(
                    "one QOTT commits a dit pair; half of the information decoded "
                    "from the p^2 honest superdense commitments rides on the entanglement"
                ),
            ),
        ]
        for row in rows:
            if not row.matches:
                _logger.warning(
                    f"SRC row {row.scheme}: formula {row.formula_bits:.9f} != computed {row.computed_bits:.9f}"
                )
        return SrcReport(p=params.p, J=params.J, rivest_field=field, rows=rows)
