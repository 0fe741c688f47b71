"""
Commitment protocol module for qottkit.

This module runs the three-party qubit-commitment protocol on top of a QOTT:

- SETUP: Ted prepares the commodity, hands (E, A) and the card (i1, i2) to
  Alice, (B, K) and the card (j1, j2) to Bob, and keeps nothing.
- COMMIT: Alice Bell-measures her secret I together with E and sends the
  outcome (a, b) to Bob.
- REVEAL: Alice sends A and her card; Bob unlocks K, applies M†, accepts iff
  (S, K) is found in |Ω⟩, and corrects C with the teleportation correction.

Every register and card access goes through a `ProtocolSession`, which records
it and raises `ViewViolationError` when a party reaches outside its view.

Classes:
    Role: The three parties.
    ViewViolationError: A party touched a register or card it does not hold.
    PartyView: Snapshot of what one party holds and knows.
    Commitment: The classical commit message (a, b).
    DetectorModel: Dark-count model of Bob's acceptance test.
    HonestStrategy, WrongIndicesStrategy, PostCommitChannelStrategy,
        GenericSubchannelsStrategy: Alice's behaviors.
    ProtocolSession: Engine state of one run.
    ProtocolTranscript: Phase-by-phase record of one run.
    ProtocolService: Protocol phases, analyses and Monte Carlo campaigns.

Example:
    ```python
    params = simulator.qott.params(3, [1, 2])
    strategy = HonestStrategy(secret=secret)
    transcript = simulator.protocol.run(params, strategy, seed=7)
    print(transcript.accept, transcript.output_fidelity)

    cheat = simulator.protocol.guessing_strategy(params, secret, guess=1)
    print(simulator.protocol.cheat_analysis(cheat, params).average)
    ```
"""

import hashlib
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from itertools import product
from typing import Annotated, Any, Literal, Optional, Sequence, TypeAlias, Union

import numpy as np
from cachetools import LRUCache
from pydantic import Field, field_validator, model_validator

from qottkit._qott_model import _QottBaseModel
from qottkit.channels import Channel, unitary_channel
from qottkit.gates import (
    bell_basis,
    bell_projectors,
    gen_pauli_x,
    gen_pauli_z,
    max_entangled,
    weyl,
)
from qottkit.measures import fidelity, trace_distance
from qottkit.qott import IndexCards, QottParams, lock_operator, unlock_operator
from qottkit.qudits import (
    TOLERANCE_DERIVED,
    DensityOperator,
    PureState,
    QuantumState,
    Register,
    Unitary,
    apply_operator,
    apply_unitary,
    measure_projective,
    partial_trace,
    permute_subsystems,
    project_onto,
    random_unitary,
    tensor,
)
from qottkit.simulator import QottSimulator

_logger = logging.getLogger(__name__)

ACCEPTANCE_FLOOR = 1e-12
"""Acceptance probabilities at or below this have no conditional output state."""

NEGLIGIBLE_BRANCH = 1e-30
"""Squared norm below which a branch vector is dropped."""


class Role(str, Enum):
    TED = "ted"
    ALICE = "alice"
    BOB = "bob"


class ViewViolationError(RuntimeError):
    """Raised when a party accesses a register or card outside its view."""


#########################
#  Teleport correction  #
#########################


def _correction_candidates() -> dict[str, Any]:
    def x_then_z(sign_a: int, sign_b: int):
        return lambda d, a, b: weyl(d, sign_a * a, sign_b * b).matrix

    def z_then_x(sign_a: int, sign_b: int):
        return lambda d, a, b: (
            gen_pauli_z(d).power(sign_b * b).matrix @ gen_pauli_x(d).power(sign_a * a).matrix
        )

    candidates = {}
    for sign_a, sign_b in product((1, -1), repeat=2):
        a = "a" if sign_a > 0 else "-a"
        b = "b" if sign_b > 0 else "-b"
        candidates[f"X^{a} Z^{b}"] = x_then_z(sign_a, sign_b)
        candidates[f"Z^{b} X^{a}"] = z_then_x(sign_a, sign_b)
    return candidates


def _select_correction(d: int = 3) -> tuple[str, Any]:
    """Pick the first candidate correction that restores a teleported state for every outcome.

    Runs at d = 3: at d = 2 every candidate agrees up to a global phase.
    """
    amplitudes = np.array([1.0, 2.0, 3.0j][:d])
    psi = PureState(register=Register.of(I=d), amplitudes=amplitudes / np.linalg.norm(amplitudes))
    joint = tensor(psi, max_entangled(d, ("E", "C")))
    for name, candidate in _correction_candidates().items():
        restored = True
        for index, bell in enumerate(bell_basis(d)):
            a, b = divmod(index, d)
            branch = project_onto(joint, bell.amplitudes, on=("I", "E")).amplitudes
            corrected = candidate(d, a, b) @ branch
            overlap = abs(np.vdot(psi.amplitudes, corrected)) ** 2 / np.vdot(corrected, corrected).real
            if overlap < 1 - 1e-12:
                restored = False
                break
        if restored:
            return name, candidate
    raise RuntimeError("No teleportation correction restores the teleported state")


CORRECTION_CONVENTION, _correction = _select_correction()
"""Name of the teleportation correction applied by Bob, fixed at import."""


def correction_operator(p: int, a: int, b: int) -> np.ndarray:
    """Bob's correction on C for the commit message (a, b)."""
    return _correction(p, a, b)


#########################
#     Domain models     #
#########################


class AccessRecord(_QottBaseModel):
    phase: str
    role: Role
    resources: tuple[str, ...]
    allowed: bool


class PartyView(_QottBaseModel):
    """What one party holds and knows.

    Attributes:
        role (Role): The party.
        registers (tuple[str, ...]): Labels of the quantum registers it holds.
        knowledge (dict[str, Any]): Its cards and the messages it has received.
    """

    role: Role
    registers: tuple[str, ...]
    knowledge: dict[str, Any]


class PhaseRecord(_QottBaseModel):
    phase: str
    actor: Role
    action: str
    detail: dict[str, Any] = {}


class Commitment(_QottBaseModel):
    """The commit message (a, b), a Bell outcome in Z_d²."""

    a: int = Field(ge=0)
    b: int = Field(ge=0)

    def check(self, p: int) -> "Commitment":
        if self.a >= p or self.b >= p:
            raise ValueError(f"Commitment ({self.a}, {self.b}) is not in Z_{p}^2")
        return self

    def index(self, p: int) -> int:
        return self.a * p + self.b


class DetectorModel(_QottBaseModel):
    """Dark-count model: with probability ε Bob's test accepts regardless of the outcome.

    Attributes:
        epsilon (float): Dark-count probability in [0, 1).
    """

    epsilon: float = Field(default=0.0, ge=0.0, lt=1.0)

    def accept_probability(self, passed: float) -> float:
        return passed + self.epsilon * (1 - passed)


def _as_density(value):
    if isinstance(value, PureState):
        return value.density()
    return value


class _StrategyBase(_QottBaseModel):
    def revealed_indices(self, alice: Sequence[int], p: int) -> tuple[int, int]:
        """The indices Alice reveals, given her card."""
        return (int(alice[0]) % p, int(alice[1]) % p)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()


class _SecretStrategy(_StrategyBase):
    secret: DensityOperator

    @field_validator("secret", mode="before")
    @classmethod
    def _to_density(cls, value):
        return _as_density(value)


class HonestStrategy(_SecretStrategy):
    """Commit `secret` honestly and reveal the true card.

    Attributes:
        secret (DensityOperator): The committed state ρ_I on one p-level subsystem.
    """

    kind: Literal["honest"] = "honest"


class WrongIndicesStrategy(_SecretStrategy):
    """Commit honestly, optionally tamper with A, and reveal wrong indices.

    Attributes:
        secret (DensityOperator): The committed state.
        offset (tuple[int, int]): Revealed indices are the card plus this offset.
        reported (tuple[int, int] | None): Fixed revealed indices, overriding `offset`.
        tamper (Channel | None): Channel applied to A before it is sent.
    """

    kind: Literal["wrong-indices"] = "wrong-indices"
    offset: tuple[int, int] = (1, 0)
    reported: Optional[tuple[int, int]] = None
    tamper: Optional[Channel] = None

    def revealed_indices(self, alice: Sequence[int], p: int) -> tuple[int, int]:
        if self.reported is not None:
            return (self.reported[0] % p, self.reported[1] % p)
        return ((alice[0] + self.offset[0]) % p, (alice[1] + self.offset[1]) % p)


class PostCommitChannelStrategy(_SecretStrategy):
    """Commit honestly, apply Ξ to A after committing, reveal the true card.

    Attributes:
        secret (DensityOperator): The committed state.
        tamper (Channel): Ξ, a channel on A.
    """

    kind: Literal["post-commit-channel"] = "post-commit-channel"
    tamper: Channel


class GenericSubchannelsStrategy(_StrategyBase):
    """Commit with an arbitrary instrument {Δ^{a,b}: EA → A'} and an optional Ξ: A' → A.

    Attributes:
        subchannels (tuple[Channel, ...]): Δ^{a,b} at index a·p + b; their sum
            must be trace preserving.
        tamper (Channel | None): Ξ, applied to A before it is sent.
        offset (tuple[int, int]): Revealed indices are the card plus this offset.
    """

    kind: Literal["generic"] = "generic"
    subchannels: tuple[Channel, ...]
    tamper: Optional[Channel] = None
    offset: tuple[int, int] = (0, 0)

    @model_validator(mode="after")
    def _check_instrument(self):
        count = len(self.subchannels)
        root = math.isqrt(count)
        if count == 0 or root * root != count:
            raise ValueError(f"An instrument needs p^2 subchannels, got {count}")
        first = self.subchannels[0]
        for sub in self.subchannels:
            if sub.in_register != first.in_register or sub.out_register != first.out_register:
                raise ValueError("All subchannels must share their input and output registers")
        total = sum(sub.completeness() for sub in self.subchannels)
        defect = np.max(np.abs(total - np.eye(first.in_register.total)))
        if defect > TOLERANCE_DERIVED:
            raise ValueError(f"Subchannels do not sum to a trace-preserving map: defect {defect}")
        return self

    def revealed_indices(self, alice: Sequence[int], p: int) -> tuple[int, int]:
        return ((alice[0] + self.offset[0]) % p, (alice[1] + self.offset[1]) % p)


AliceStrategy: TypeAlias = Annotated[
    Union[
        HonestStrategy,
        WrongIndicesStrategy,
        PostCommitChannelStrategy,
        GenericSubchannelsStrategy,
    ],
    Field(discriminator="kind"),
]
"""Alice's behavior, discriminated by `kind`."""

HonestCommitStrategy: TypeAlias = Union[
    HonestStrategy, WrongIndicesStrategy, PostCommitChannelStrategy
]
"""Strategies that commit by Bell-measuring a secret."""


class CommitBranch(_QottBaseModel):
    """One commit outcome with its unnormalized post-commit vectors on (R, A, B, K).

    R holds the purification of the secret (dimension 1 for instruments).
    """

    outcome: Commitment
    probability: float
    vectors: tuple[PureState, ...]


class CommittedState(_QottBaseModel):
    """The global state after COMMIT: the sampled message and every branch."""

    commitment: Commitment
    branches: tuple[CommitBranch, ...]

    @property
    def branch_probabilities(self) -> list[float]:
        return [branch.probability for branch in self.branches]


class BranchReveal(_QottBaseModel):
    """Bob's test on one commit branch.

    Attributes:
        outcome (Commitment): The branch.
        commit_probability (float): Probability of the branch.
        pass_probability (float): Unconditional probability of the branch and a
            passing projective test.
        accepted_state (DensityOperator): Unnormalized corrected C-state of the
            passing part.
        rejected_state (DensityOperator): Unnormalized corrected C-state of the
            failing part.
    """

    outcome: Commitment
    commit_probability: float
    pass_probability: float
    accepted_state: DensityOperator
    rejected_state: DensityOperator

    def accept_probability(self, detector: DetectorModel) -> float:
        """Unconditional probability of the branch and acceptance."""
        return self.pass_probability + detector.epsilon * (
            self.commit_probability - self.pass_probability
        )


class RevealOutcome(_QottBaseModel):
    """Result of REVEAL.

    Attributes:
        commitment (Commitment): The committed message.
        revealed (tuple[int, int]): Indices Alice revealed.
        epsilon (float): Dark-count probability used.
        accept_probability (float): Acceptance probability given the committed branch.
        total_accept_probability (float): Acceptance probability over all branches.
        output_state (DensityOperator | None): C-state given acceptance in the
            committed branch.
        branches (tuple[BranchReveal, ...]): Every branch.
    """

    commitment: Commitment
    revealed: tuple[int, int]
    epsilon: float
    accept_probability: float
    total_accept_probability: float
    output_state: Optional[DensityOperator] = None
    branches: tuple[BranchReveal, ...]


class ProtocolTranscript(_QottBaseModel):
    """Phase-by-phase record of one protocol run.

    Attributes:
        p (int): Prime dimension.
        J (tuple[int, ...]): Index set.
        masker (str): Masker family.
        strategy (str): Alice's strategy kind.
        cards (dict[str, tuple[int, int]]): Index cards by owner.
        commitment (Commitment): The commit message.
        revealed (tuple[int, int]): The revealed indices.
        epsilon (float): Dark-count probability.
        branch_probabilities (list[float]): Commit outcome distribution.
        accept_probability (float): Acceptance probability given the commitment.
        total_accept_probability (float): Acceptance probability over all branches.
        accept (bool): Bob's sampled decision.
        output_state (DensityOperator | None): C-state Bob keeps when he accepts.
        output_fidelity (float | None): Fidelity of the output with Alice's secret.
        phases (list[PhaseRecord]): Actions in order.
        branches (list[BranchReveal] | None): Per-branch data, when requested.
    """

    p: int
    J: tuple[int, ...]
    masker: str
    strategy: str
    cards: dict[str, tuple[int, int]]
    commitment: Commitment
    revealed: tuple[int, int]
    epsilon: float
    branch_probabilities: list[float]
    accept_probability: float
    total_accept_probability: float
    accept: bool
    output_state: Optional[DensityOperator] = None
    output_fidelity: Optional[float] = None
    phases: list[PhaseRecord]
    branches: Optional[list[BranchReveal]] = None


class CardAcceptance(_QottBaseModel):
    bob: tuple[int, int]
    acceptance: float


class CheatReport(_QottBaseModel):
    """Card-conditioned acceptance of a strategy, computed from Λ.

    Λ is the state of (S, K) after Alice's operations and M†, before any lock.
    For Bob card j the acceptance is ⟨Ω|(I ⊗ R_j)Λ(I ⊗ R_j)†|Ω⟩ with
    R_j = unlock(k, j)·lock(i, j), folded with the dark-count probability.

    Attributes:
        average (float): Acceptance averaged over Bob's cards.
        maximum (float): Largest per-card acceptance.
        bound (float): 1/|J| + ε.
        within_bound (bool): average ≤ bound + 1e-9.
        lambda_trace (float): Tr Λ.
        lambda_min_eigenvalue (float): Smallest eigenvalue of Λ.
    """

    p: int
    J: tuple[int, ...]
    alice: tuple[int, int]
    revealed: tuple[int, int]
    epsilon: float
    per_card: list[CardAcceptance]
    average: float
    maximum: float
    bound: float
    within_bound: bool
    lambda_trace: float
    lambda_min_eigenvalue: float


class TamperReport(_QottBaseModel):
    """Effect of a post-commit channel Ξ on A with correct revealed indices.

    Attributes:
        accept_probability (float): Simulated acceptance.
        formula_accept_probability (float): ⟨Ψ|(Ξ ⊗ I)(|Ψ⟩⟨Ψ|)|Ψ⟩.
        output_state (DensityOperator | None): Output given acceptance.
        output_distance (float | None): Trace distance of the output from the secret.
    """

    accept_probability: float
    formula_accept_probability: float
    output_state: Optional[DensityOperator] = None
    output_distance: Optional[float] = None


class MonteCarloReport(_QottBaseModel):
    """Sampled acceptance of a strategy over independent transcripts.

    Attributes:
        trials (int): Number of transcripts.
        accepted (int): Number of accepted reveals.
        estimate (float): accepted / trials.
        standard_error (float): Sample standard error.
        exact (float): Exact acceptance averaged over all cards.
        exact_sigma (float): √(exact(1 − exact)/trials).
        within_3_sigma (bool): |estimate − exact| ≤ 3·exact_sigma.
        bound (float): 1/|J| + ε.
        within_bound (bool): estimate ≤ bound + 3σ of the bound.
    """

    p: int
    J: tuple[int, ...]
    strategy: str
    epsilon: float
    seed: int
    trials: int
    accepted: int
    estimate: float
    standard_error: float
    exact: float
    exact_sigma: float
    within_3_sigma: bool
    bound: float
    within_bound: bool


class RepetitionReport(_QottBaseModel):
    """Failure probability of n repeated instances, all of which must accept.

    Attributes:
        n (int): Number of instances per trial.
        estimate (float): Fraction of trials where every instance accepted.
        bound (float): (1/|J| + ε)^n.
        within_bound (bool): estimate ≤ bound + 3σ of the bound.
    """

    n: int
    p: int
    J: tuple[int, ...]
    strategy: str
    epsilon: float
    seed: int
    trials: int
    failures: int
    estimate: float
    standard_error: float
    bound: float
    within_bound: bool


class SuperdenseTranscript(_QottBaseModel):
    """A superdense-coding commitment of two dits.

    Attributes:
        dits (tuple[int, int]): (a0, b0).
        commitment (Commitment): The commit message of the qudit commitment.
        accept_probability (float): Acceptance given the commitment.
        decode_probabilities (list[float]): Bob's Bell outcome distribution on
            (C, D) given acceptance, indexed a·p + b.
        decoded (tuple[int, int]): The most likely decoded pair.
        success_probability (float): Probability of decoding (a0, b0).
        bob_preview (DensityOperator): Bob's state before REVEAL.
    """

    dits: tuple[int, int]
    commitment: Commitment
    accept_probability: float
    decode_probabilities: list[float]
    decoded: tuple[int, int]
    success_probability: float
    bob_preview: DensityOperator


#########################
#        Session        #
#########################


class ProtocolSession:
    """Engine state of one protocol run.

    The session owns the global state, the party views, the index cards, the
    messages each party has received and the access log. Phases are strictly
    ordered: setup, committed, revealed.

    Attributes:
        params (QottParams): Parameters.
        state (PureState): The global commodity state after SETUP.
        phase (str): Current phase.
        views (dict[Role, set[str]]): Registers held by each party.
        access_log (list[AccessRecord]): Every checked access, in order.
        phases (list[PhaseRecord]): Actions taken so far.
    """

    def __init__(self, params: QottParams, state: PureState, cards: IndexCards, rng: np.random.Generator):
        self.params = params
        self.state = state
        self.rng = rng
        self.phase = "setup"
        self.views: dict[Role, set[str]] = {
            Role.TED: set(state.register.labels),
            Role.ALICE: set(),
            Role.BOB: set(),
        }
        self._cards = {Role.ALICE: cards.alice, Role.BOB: cards.bob}
        self._knowledge: dict[Role, dict[str, Any]] = {role: {} for role in Role}
        self.access_log: list[AccessRecord] = []
        self.phases: list[PhaseRecord] = []
        self.strategy = None
        self.reference: Optional[PureState] = None
        self.committed: Optional[CommittedState] = None
        self.revealed: Optional[tuple[int, int]] = None

    def record(self, actor: Role, action: str, **detail) -> None:
        self.phases.append(PhaseRecord(phase=self.phase, actor=actor, action=action, detail=detail))

    def access(self, role: Role, labels: Sequence[str]) -> None:
        """Check and log that `role` touches `labels`.

        Raises:
            ViewViolationError: If a label is not in the party's view.
        """
        labels = tuple(labels)
        allowed = set(labels) <= self.views[role]
        self.access_log.append(
            AccessRecord(phase=self.phase, role=role, resources=labels, allowed=allowed)
        )
        if not allowed:
            missing = sorted(set(labels) - self.views[role])
            raise ViewViolationError(f"{role.value} may not access {missing} during {self.phase}")

    def card(self, role: Role) -> tuple[int, int]:
        """`role` reads its own index card."""
        self.access_log.append(
            AccessRecord(phase=self.phase, role=role, resources=(f"card:{role.value}",), allowed=True)
        )
        return self._cards[role]

    def cards_by_owner(self) -> dict[str, tuple[int, int]]:
        return {role.value: card for role, card in self._cards.items()}

    def deliver_cards(self) -> None:
        for role in (Role.ALICE, Role.BOB):
            self._knowledge[role]["card"] = self._cards[role]

    def hold(self, role: Role, labels: Sequence[str]) -> None:
        """`role` introduces fresh registers of its own."""
        self.views[role] |= set(labels)

    def transfer(self, label: str, sender: Role, to: Role) -> None:
        """Move a register from `sender` to `to`.

        Raises:
            ViewViolationError: If `sender` does not hold the register.
        """
        self.access(sender, (label,))
        self.views[sender].discard(label)
        self.views[to].add(label)
        self.record(sender, "transfer", register=label, to=to.value)

    def send(self, sender: Role, to: Role, key: str, value: Any) -> None:
        self._knowledge[to][key] = value
        self.record(sender, "send", message=key, to=to.value)

    def message(self, role: Role, key: str) -> Any:
        """A message `role` has received.

        Raises:
            ViewViolationError: If no such message was delivered to `role`.
        """
        allowed = key in self._knowledge[role]
        self.access_log.append(
            AccessRecord(phase=self.phase, role=role, resources=(f"message:{key}",), allowed=allowed)
        )
        if not allowed:
            raise ViewViolationError(f"{role.value} has not received {key!r}")
        return self._knowledge[role][key]

    def view(self, role: Role) -> PartyView:
        return PartyView(
            role=role,
            registers=tuple(sorted(self.views[role])),
            knowledge=dict(self._knowledge[role]),
        )


#########################
#    Branch kernels     #
#########################


def _reference_state(secret: DensityOperator) -> PureState:
    """A purification of ρ_I on (R, I)."""
    eigenvalues, vectors = np.linalg.eigh(secret.matrix)
    weights = np.sqrt(np.clip(eigenvalues, 0.0, None))
    amplitudes = (vectors * weights).T
    d = secret.register.total
    return PureState(
        register=Register.of(R=d, I=d),
        amplitudes=amplitudes.reshape(-1) / np.linalg.norm(amplitudes),
    )


def _honest_branches(p: int, state: PureState, reference: PureState) -> tuple[CommitBranch, ...]:
    joint = tensor(reference, state)
    measured = measure_projective(joint, bell_projectors(p), on=("I", "E"))
    branches = []
    for index, (branch, bell) in enumerate(zip(measured, bell_basis(p))):
        vector = project_onto(branch.unnormalized, bell.amplitudes, on=("I", "E"))
        a, b = divmod(index, p)
        branches.append(
            CommitBranch(
                outcome=Commitment(a=a, b=b), probability=branch.probability, vectors=(vector,)
            )
        )
    return tuple(branches)


def _instrument_branches(
    p: int, state: PureState, strategy: GenericSubchannelsStrategy
) -> tuple[CommitBranch, ...]:
    if len(strategy.subchannels) != p * p:
        raise ValueError(f"Instrument has {len(strategy.subchannels)} subchannels, expected {p * p}")
    anchor = PureState(register=Register.of(R=1), amplitudes=[1.0])
    joint = tensor(anchor, state)
    branches = []
    for index, sub in enumerate(strategy.subchannels):
        vectors = tuple(
            v for v in sub.branches(joint, on=sub.in_register.labels) if v.norm2 > NEGLIGIBLE_BRANCH
        )
        a, b = divmod(index, p)
        probability = float(sum(v.norm2 for v in vectors))
        branches.append(
            CommitBranch(outcome=Commitment(a=a, b=b), probability=probability, vectors=vectors)
        )
    return tuple(branches)


def _tampered(vectors: Sequence[PureState], tamper: Optional[Channel]) -> list[PureState]:
    if tamper is None:
        return list(vectors)
    return [w for v in vectors for w in tamper.branches(v, on=("A",)) if w.norm2 > NEGLIGIBLE_BRANCH]


def _relocked(branches: Sequence[CommitBranch], lock: Unitary) -> tuple[CommitBranch, ...]:
    return tuple(
        CommitBranch(
            outcome=branch.outcome,
            probability=branch.probability,
            vectors=tuple(apply_unitary(lock, v, on=("K",)) for v in branch.vectors),
        )
        for branch in branches
    )


#########################
#        Service        #
#########################


class ProtocolService:
    """Service class for the commitment protocol.

    Commit branches of a strategy are computed once on the unlocked commodity
    and locked per card: the lock acts on K alone and commutes with every
    operation Alice performs. Per-card branch tables are cached.

    Example:
        ```python
        session = simulator.protocol.run_setup(params, seed=3)
        commitment, committed = simulator.protocol.run_commit(session, strategy)
        outcome = simulator.protocol.run_reveal(session, DetectorModel(epsilon=0.05))
        ```
    """

    # fmt: off
    _commit_map: LRUCache[tuple, tuple[CommitBranch, ...]] = LRUCache(maxsize=256)
    _table_map: LRUCache[tuple, np.ndarray] = LRUCache(maxsize=4096)
    # fmt: on
    _cache_lock = threading.Lock()

    def __init__(self, simulator: QottSimulator):
        self._simulator = simulator

    def clear_caches(self) -> None:
        with self._cache_lock:
            self._commit_map.clear()
            self._table_map.clear()

    #########################
    #        Phases         #
    #########################

    def run_setup(
        self,
        params: QottParams,
        seed: Optional[int] = None,
        cards: Optional[IndexCards] = None,
    ) -> ProtocolSession:
        """SETUP: Ted builds the commodity and distributes it.

        Afterwards Alice holds (E, A) and her card, Bob holds (B, K) and his
        card, and Ted holds nothing.

        Returns:
            ProtocolSession: Global state, views and cards; deterministic under `seed`.
        """
        rng = self._simulator.rng(seed)
        if cards is None:
            cards = self._simulator.qott.draw_cards(params, rng)
        commodity = self._simulator.qott.build_qott(params, cards=cards)
        session = ProtocolSession(params, commodity.state, cards, rng)
        session.record(Role.TED, "prepare", p=params.p, J=list(params.J))
        session.transfer("E", Role.TED, Role.ALICE)
        session.transfer("A", Role.TED, Role.ALICE)
        session.transfer("B", Role.TED, Role.BOB)
        session.transfer("K", Role.TED, Role.BOB)
        session.deliver_cards()
        session.record(Role.TED, "deliver cards")
        return session

    def _commit_branches(
        self, params: QottParams, state: PureState, strategy, reference: Optional[PureState] = None
    ) -> tuple[CommitBranch, ...]:
        if isinstance(strategy, GenericSubchannelsStrategy):
            return _instrument_branches(params.p, state, strategy)
        if isinstance(strategy, (HonestStrategy, WrongIndicesStrategy, PostCommitChannelStrategy)):
            if reference is None:
                reference = _reference_state(strategy.secret)
            return _honest_branches(params.p, state, reference)
        raise ValueError(f"Strategy {type(strategy).__name__} cannot commit")

    def run_commit(
        self, session: ProtocolSession, strategy: AliceStrategy, reference: Optional[PureState] = None
    ) -> tuple[Commitment, CommittedState]:
        """COMMIT: Alice measures and sends the outcome (a, b) to Bob.

        Honest-commit strategies adjoin the secret on I (purified by R) and
        Bell-measure (I, E); instruments apply Δ^{a,b} to (E, A).

        Args:
            session (ProtocolSession): A session after SETUP.
            strategy (AliceStrategy): Alice's behavior.
            reference (PureState | None): Joint state on (R, I) replacing the
                purification of the strategy's secret.

        Returns:
            tuple[Commitment, CommittedState]: The sampled message and every branch.

        Raises:
            RuntimeError: If the session is not right after SETUP.
            ViewViolationError: If the strategy touches registers Alice does not hold.
        """
        if session.phase != "setup":
            raise RuntimeError(f"Cannot commit in phase {session.phase!r}")
        p = session.params.p
        if isinstance(strategy, GenericSubchannelsStrategy):
            session.access(Role.ALICE, strategy.subchannels[0].in_register.labels)
        else:
            session.hold(Role.ALICE, ("R", "I"))
            session.access(Role.ALICE, ("I", "E"))
        branches = self._commit_branches(session.params, session.state, strategy, reference)

        probabilities = np.array([branch.probability for branch in branches])
        index = int(session.rng.choice(len(branches), p=probabilities / probabilities.sum()))
        commitment = branches[index].outcome
        committed = CommittedState(commitment=commitment, branches=branches)

        session.strategy = strategy
        session.reference = reference
        session.committed = committed
        session.send(Role.ALICE, Role.BOB, "commitment", commitment)
        session.phase = "committed"
        _logger.debug(f"Committed ({commitment.a}, {commitment.b}) at p={p}")
        return commitment, committed

    def _reveal_vectors(
        self,
        params: QottParams,
        branch: CommitBranch,
        revealed: Sequence[int],
        bob: Sequence[int],
        tamper: Optional[Channel],
    ) -> tuple[list[PureState], np.ndarray]:
        """Bob's test on one branch: corrected passing vectors on (R, C) and the full C-state."""
        p = params.p
        masker = params.masker
        omega = self._simulator.maskers.purify_safe(masker).state.amplitudes
        unlock = unlock_operator(p, revealed, bob)
        inverse = masker.unitary.dagger()
        correction = correction_operator(p, branch.outcome.a, branch.outcome.b)

        passing = []
        total = np.zeros((p, p), dtype=np.complex128)
        for vector in _tampered(branch.vectors, tamper):
            vector = apply_unitary(unlock, vector, on=("K",))
            vector = apply_unitary(inverse, vector, on=("A", "B"))
            total += partial_trace(vector, keep=("C",)).matrix
            kept = project_onto(vector, omega, on=("S", "K"))
            passing.append(apply_operator(correction, kept, on=("C",)))
        return passing, correction @ total @ correction.conj().T

    def _reveal_branch(
        self,
        params: QottParams,
        branch: CommitBranch,
        revealed: Sequence[int],
        bob: Sequence[int],
        tamper: Optional[Channel],
    ) -> BranchReveal:
        p = params.p
        passing, total = self._reveal_vectors(params, branch, revealed, bob, tamper)
        accepted = np.zeros((p, p), dtype=np.complex128)
        for vector in passing:
            accepted += partial_trace(vector, keep=("C",)).matrix
        register = Register.of(C=p)
        accepted_state = DensityOperator(register=register, matrix=accepted, unnormalized=True)
        rejected = total - accepted
        return BranchReveal(
            outcome=branch.outcome,
            commit_probability=branch.probability,
            pass_probability=accepted_state.trace,
            accepted_state=accepted_state,
            rejected_state=DensityOperator(
                register=register, matrix=(rejected + rejected.conj().T) / 2, unnormalized=True
            ),
        )

    def run_reveal(
        self,
        session: ProtocolSession,
        detector: Optional[DetectorModel] = None,
        revealed: Optional[Sequence[int]] = None,
    ) -> RevealOutcome:
        """REVEAL: Alice sends A and her indices; Bob tests and corrects.

        Bob unlocks K with Z^{−j2 k2} X^{−j1 k1}, applies M†, projects (S, K) on
        |Ω⟩, folds in the dark-count probability and applies the correction for
        the committed (a, b) to C.

        Args:
            session (ProtocolSession): A committed session.
            detector (DetectorModel | None): Dark-count model; ε = 0 by default.
            revealed (Sequence[int] | None): Overrides the strategy's revealed indices.

        Raises:
            RuntimeError: If the session is not committed.
        """
        if session.phase != "committed":
            raise RuntimeError(f"Cannot reveal in phase {session.phase!r}")
        detector = detector or DetectorModel()
        params = session.params
        p = params.p
        strategy = session.strategy

        alice = session.card(Role.ALICE)
        if revealed is None:
            revealed = strategy.revealed_indices(alice, p)
        revealed = (int(revealed[0]) % p, int(revealed[1]) % p)
        tamper = getattr(strategy, "tamper", None)
        if tamper is not None:
            session.access(Role.ALICE, ("A",))
            session.record(Role.ALICE, "tamper", channel=str(tamper))
        session.transfer("A", Role.ALICE, Role.BOB)
        session.send(Role.ALICE, Role.BOB, "revealed", revealed)
        session.phase = "revealing"

        bob = session.card(Role.BOB)
        commitment = session.message(Role.BOB, "commitment")
        revealed = session.message(Role.BOB, "revealed")
        session.access(Role.BOB, ("A", "B", "K"))
        branches = tuple(
            self._reveal_branch(params, branch, revealed, bob, tamper)
            for branch in session.committed.branches
        )
        chosen = branches[commitment.index(p)]
        conditional = chosen.accept_probability(detector) / chosen.commit_probability
        total = sum(branch.accept_probability(detector) for branch in branches)

        output = None
        weight = chosen.accept_probability(detector)
        if weight > ACCEPTANCE_FLOOR:
            matrix = chosen.accepted_state.matrix + detector.epsilon * chosen.rejected_state.matrix
            output = DensityOperator(register=Register.of(C=p), matrix=matrix / weight)
        session.phase = "revealed"
        session.revealed = revealed
        session.record(Role.BOB, "test", accept_probability=conditional)
        return RevealOutcome(
            commitment=commitment,
            revealed=revealed,
            epsilon=detector.epsilon,
            accept_probability=min(max(conditional, 0.0), 1.0),
            total_accept_probability=min(max(total, 0.0), 1.0),
            output_state=output,
            branches=branches,
        )

    def run(
        self,
        params: QottParams,
        strategy: AliceStrategy,
        detector: Optional[DetectorModel] = None,
        seed: Optional[int] = None,
        cards: Optional[IndexCards] = None,
        full_branches: bool = False,
    ) -> ProtocolTranscript:
        """Run SETUP, COMMIT and REVEAL once and sample Bob's decision.

        Returns:
            ProtocolTranscript: The run, deterministic under `seed`.
        """
        detector = detector or DetectorModel()
        session = self.run_setup(params, seed=seed, cards=cards)
        commitment, committed = self.run_commit(session, strategy)
        outcome = self.run_reveal(session, detector)
        accept = bool(session.rng.random() < outcome.accept_probability)

        output_fidelity = None
        secret = getattr(strategy, "secret", None)
        if outcome.output_state is not None and secret is not None:
            output_fidelity = fidelity(secret, outcome.output_state)
        return ProtocolTranscript(
            p=params.p,
            J=params.J,
            masker=params.masker.family,
            strategy=strategy.kind,
            cards=session.cards_by_owner(),
            commitment=commitment,
            revealed=outcome.revealed,
            epsilon=detector.epsilon,
            branch_probabilities=committed.branch_probabilities,
            accept_probability=outcome.accept_probability,
            total_accept_probability=outcome.total_accept_probability,
            accept=accept,
            output_state=outcome.output_state if accept else None,
            output_fidelity=output_fidelity if accept else None,
            phases=session.phases,
            branches=list(outcome.branches) if full_branches else None,
        )

    #########################
    #   Exact computations  #
    #########################

    def _unlocked_branches(self, params: QottParams, strategy, key: str) -> tuple[CommitBranch, ...]:
        cache_key = (params.masker.fingerprint(), params.p, params.J, key)
        with self._cache_lock:
            if cache_key in self._commit_map:
                return self._commit_map[cache_key]
        cards = IndexCards(alice=(0, 0), bob=(params.J[0], params.J[0]))
        state = self._simulator.qott.build_qott(params, cards=cards).state
        branches = self._commit_branches(params, state, strategy)
        with self._cache_lock:
            self._commit_map[cache_key] = branches
        return branches

    def _card_branches(self, params: QottParams, strategy, key: str, cards: IndexCards):
        lock = lock_operator(params.p, cards.alice, cards.bob)
        return _relocked(self._unlocked_branches(params, strategy, key), lock)

    def _branch_table(self, params: QottParams, strategy, key: str, cards: IndexCards) -> np.ndarray:
        """Rows (commit probability, pass probability) per branch for one pair of cards."""
        revealed = strategy.revealed_indices(cards.alice, params.p)
        cache_key = (params.masker.fingerprint(), params.p, params.J, key, cards.alice, cards.bob, revealed)
        with self._cache_lock:
            if cache_key in self._table_map:
                return self._table_map[cache_key]
        tamper = getattr(strategy, "tamper", None)
        rows = []
        for branch in self._card_branches(params, strategy, key, cards):
            reveal = self._reveal_branch(params, branch, revealed, cards.bob, tamper)
            rows.append((reveal.commit_probability, reveal.pass_probability))
        table = np.array(rows)
        table.flags.writeable = False
        with self._cache_lock:
            self._table_map[cache_key] = table
        return table

    def acceptance_probability(
        self,
        params: QottParams,
        strategy: AliceStrategy,
        cards: IndexCards,
        detector: Optional[DetectorModel] = None,
    ) -> float:
        """Exact acceptance probability for fixed cards: P_pass + ε(1 − P_pass)."""
        detector = detector or DetectorModel()
        table = self._branch_table(params, strategy, strategy.fingerprint(), cards)
        return detector.accept_probability(float(table[:, 1].sum()))

    def _lambda(self, params: QottParams, strategy, key: str) -> np.ndarray:
        """Λ: the (S, K) state after Alice's operations and M† on the unlocked commodity."""
        inverse = params.masker.unitary.dagger()
        tamper = getattr(strategy, "tamper", None)
        total = None
        for branch in self._unlocked_branches(params, strategy, key):
            for vector in _tampered(branch.vectors, tamper):
                vector = apply_unitary(inverse, vector, on=("A", "B"))
                part = partial_trace(vector, keep=("S", "K")).matrix
                total = part if total is None else total + part
        return total

    def _card_acceptance(
        self, params: QottParams, lam: np.ndarray, alice, revealed, bob, detector: DetectorModel
    ) -> float:
        omega = self._simulator.maskers.purify_safe(params.masker).amplitudes_sk
        net = unlock_operator(params.p, revealed, bob).matrix @ lock_operator(params.p, alice, bob).matrix
        probe = (omega @ net.conj()).reshape(-1)
        passed = float(np.vdot(probe, lam @ probe).real)
        return detector.accept_probability(min(max(passed, 0.0), 1.0))

    def cheat_analysis(
        self,
        strategy: AliceStrategy,
        params: QottParams,
        detector: Optional[DetectorModel] = None,
        alice: Sequence[int] = (0, 0),
    ) -> CheatReport:
        """Card-conditioned acceptance of a strategy from the operator Λ.

        Args:
            strategy (AliceStrategy): Any strategy; its revealed indices follow
                from Alice's card `alice`.
            params (QottParams): Parameters.
            detector (DetectorModel | None): Dark-count model.
            alice (Sequence[int]): Alice's card.

        Returns:
            CheatReport: Average over Bob's cards (the security failure
                probability when the revealed indices are wrong) and per-card maximum.
        """
        detector = detector or DetectorModel()
        p = params.p
        alice = (int(alice[0]) % p, int(alice[1]) % p)
        revealed = strategy.revealed_indices(alice, p)
        lam = self._lambda(params, strategy, strategy.fingerprint())
        per_card = [
            CardAcceptance(
                bob=bob, acceptance=self._card_acceptance(params, lam, alice, revealed, bob, detector)
            )
            for bob in product(params.J, repeat=2)
        ]
        values = [card.acceptance for card in per_card]
        average = float(np.mean(values))
        bound = 1 / len(params.J) + detector.epsilon
        if revealed != alice and average > bound + TOLERANCE_DERIVED:
            _logger.warning(f"Binding bound violated: {average:.12f} > {bound:.12f}")
        return CheatReport(
            p=p,
            J=params.J,
            alice=alice,
            revealed=revealed,
            epsilon=detector.epsilon,
            per_card=per_card,
            average=average,
            maximum=float(max(values)),
            bound=bound,
            within_bound=average <= bound + TOLERANCE_DERIVED,
            lambda_trace=float(np.trace(lam).real),
            lambda_min_eigenvalue=float(np.linalg.eigvalsh((lam + lam.conj().T) / 2)[0]),
        )

    def average_acceptance(
        self, params: QottParams, strategy: AliceStrategy, detector: Optional[DetectorModel] = None
    ) -> float:
        """Exact acceptance averaged over uniformly drawn Alice and Bob cards."""
        detector = detector or DetectorModel()
        p = params.p
        lam = self._lambda(params, strategy, strategy.fingerprint())
        values = [
            self._card_acceptance(
                params, lam, alice, strategy.revealed_indices(alice, p), bob, detector
            )
            for alice in product(range(p), repeat=2)
            for bob in product(params.J, repeat=2)
        ]
        return float(np.mean(values))

    def post_commit_tamper(
        self,
        tamper: Channel,
        secret: QuantumState,
        params: QottParams,
        seed: Optional[int] = None,
        cards: Optional[IndexCards] = None,
    ) -> TamperReport:
        """Apply Ξ to A after an honest commit and reveal the correct indices.

        The simulated acceptance is compared with ⟨Ψ|(Ξ ⊗ I)(|Ψ⟩⟨Ψ|)|Ψ⟩, where
        |Ψ⟩_AS is the partner state of the dual masker.
        """
        strategy = PostCommitChannelStrategy(secret=secret, tamper=tamper)
        session = self.run_setup(params, seed=seed, cards=cards)
        self.run_commit(session, strategy)
        outcome = self.run_reveal(session)

        accepted = sum(branch.accepted_state.matrix for branch in outcome.branches)
        probability = float(np.trace(accepted).real)
        partner = self._simulator.maskers.dual_masker(params.masker).partner_state
        formula = 0.0
        for kraus in tamper.kraus:
            moved = apply_operator(kraus, partner, on=("A",))
            formula += abs(np.vdot(partner.amplitudes, moved.amplitudes)) ** 2

        output, distance = None, None
        if probability > ACCEPTANCE_FLOOR:
            output = DensityOperator(register=Register.of(C=params.p), matrix=accepted / probability)
            distance = trace_distance(output, strategy.secret)
        return TamperReport(
            accept_probability=probability,
            formula_accept_probability=float(formula),
            output_state=output,
            output_distance=distance,
        )

    def delayed_teleport_oracle(
        self, strategy: AliceStrategy, params: QottParams
    ) -> list[DensityOperator]:
        """Branch-wise output of plain teleportation with the commitment delayed.

        |Θ⟩_EC is the teleportation resource and the dual-masker partner |Ψ⟩_AS
        is Alice's ancilla: Alice's commit operation and Ξ act on (E, A), the
        ancilla is post-selected on |Ψ⟩ and the correction for (a, b) is applied.

        Returns:
            list[DensityOperator]: Unnormalized C-state per outcome, index a·p + b.
        """
        p = params.p
        partner = self._simulator.maskers.dual_masker(params.masker).partner_state
        base = tensor(max_entangled(p, ("E", "C")), partner)
        branches = self._commit_branches(params, base, strategy)
        tamper = getattr(strategy, "tamper", None)

        outputs = []
        for branch in branches:
            correction = correction_operator(p, branch.outcome.a, branch.outcome.b)
            matrix = np.zeros((p, p), dtype=np.complex128)
            for vector in _tampered(branch.vectors, tamper):
                kept = project_onto(vector, partner.amplitudes, on=("A", "S"))
                kept = apply_operator(correction, kept, on=("C",))
                matrix += partial_trace(kept, keep=("C",)).matrix
            outputs.append(DensityOperator(register=Register.of(C=p), matrix=matrix, unnormalized=True))
        return outputs

    #########################
    #        Hiding         #
    #########################

    def bob_preview(self, session: ProtocolSession) -> DensityOperator:
        """Bob's state after COMMIT, including the classical message register T.

        Bob does not know Alice's card, so his state is averaged over it. The
        result lives on (T, B, K), with R added when Bob holds it.

        Raises:
            RuntimeError: If the session is not committed.
        """
        if session.phase != "committed":
            raise RuntimeError(f"Bob's preview needs a committed session, not {session.phase!r}")
        params = session.params
        p = params.p
        keep = tuple(label for label in ("R", "B", "K") if label in session.views[Role.BOB])
        session.access(Role.BOB, keep)
        bob = session.card(Role.BOB)
        strategy = session.strategy

        unlocked = IndexCards(alice=(0, 0), bob=(params.J[0], params.J[0]))
        state = self._simulator.qott.build_qott(params, cards=unlocked).state
        base = self._commit_branches(params, state, strategy, session.reference)

        blocks = None
        for alice in product(range(p), repeat=2):
            lock = lock_operator(p, alice, bob)
            for index, branch in enumerate(_relocked(base, lock)):
                for vector in branch.vectors:
                    part = partial_trace(vector, keep=keep).matrix
                    if blocks is None:
                        blocks = np.zeros((p * p,) + part.shape, dtype=np.complex128)
                    blocks[index] += part
        blocks /= p * p
        size = blocks.shape[1]
        matrix = np.zeros((p * p * size, p * p * size), dtype=np.complex128)
        for index in range(p * p):
            matrix[index * size : (index + 1) * size, index * size : (index + 1) * size] = blocks[index]
        register = Register.of(T=p * p).concat(session.state.register.sub(("B", "K")))
        if "R" in keep:
            register = Register(
                labels=("T", "R", "B", "K"),
                dims=(p * p, session.reference.register.dim("R"), register.dim("B"), register.dim("K")),
            )
        return DensityOperator(register=register, matrix=matrix)

    def bob_preview_closed_form(self, params: QottParams, secret: QuantumState) -> DensityOperator:
        """(I/p²)_T ⊗ Tr_A[M(ρ ⊗ ω_S)M†] ⊗ ω_K."""
        p = params.p
        maskers = self._simulator.maskers
        b_state = partial_trace(maskers.mask(params.masker, secret), keep=("B",))
        omega = maskers.purify_safe(params.masker).amplitudes_sk
        key_state = omega.T @ omega.conj()
        matrix = np.kron(np.kron(np.eye(p * p) / (p * p), b_state.matrix), key_state)
        register = Register.of(T=p * p, B=b_state.register.total, K=key_state.shape[0])
        return DensityOperator(register=register, matrix=matrix)

    #########################
    #   Superdense coding   #
    #########################

    def superdense_commit(
        self,
        a0: int,
        b0: int,
        params: QottParams,
        seed: Optional[int] = None,
        cards: Optional[IndexCards] = None,
        detector: Optional[DetectorModel] = None,
    ) -> SuperdenseTranscript:
        """Commit two dits by superdense coding.

        Alice prepares |Θ⟩ on (I, D), applies X^{a0} Z^{b0} to I, sends D to Bob
        in the clear and commits I. On reveal Bob Bell-measures (C, D).

        Raises:
            ValueError: If a dit is outside Z_p.
        """
        p = params.p
        if not (0 <= a0 < p and 0 <= b0 < p):
            raise ValueError(f"Dits ({a0}, {b0}) are not in Z_{p}")
        pair = apply_unitary(weyl(p, a0, b0), max_entangled(p, ("I", "R")), on=("I",))
        reference = permute_subsystems(pair, ("R", "I"))
        strategy = HonestStrategy(secret=partial_trace(reference, keep=("I",)))

        session = self.run_setup(params, seed=seed, cards=cards)
        commitment, _ = self.run_commit(session, strategy, reference=reference)
        session.transfer("R", Role.ALICE, Role.BOB)
        preview = self.bob_preview(session)
        outcome = self.run_reveal(session, detector)

        branch = session.committed.branches[commitment.index(p)]
        bob = session.card(Role.BOB)
        passing, _ = self._reveal_vectors(params, branch, outcome.revealed, bob, None)
        joint = np.zeros((p * p, p * p), dtype=np.complex128)
        for vector in passing:
            ordered = vector.tensor.T.reshape(-1)
            joint += np.outer(ordered, ordered.conj())
        weight = float(np.trace(joint).real)
        if weight > ACCEPTANCE_FLOOR:
            decode = [
                float(np.vdot(bell.amplitudes, joint @ bell.amplitudes).real) / weight
                for bell in bell_basis(p, ("C", "R"))
            ]
        else:
            decode = [0.0] * (p * p)
        decoded = divmod(int(np.argmax(decode)), p)
        return SuperdenseTranscript(
            dits=(a0, b0),
            commitment=commitment,
            accept_probability=outcome.accept_probability,
            decode_probabilities=decode,
            decoded=decoded,
            success_probability=decode[a0 * p + b0],
            bob_preview=preview,
        )

    #########################
    #      Monte Carlo      #
    #########################

    def _sample_trial(
        self, params: QottParams, strategy, key: str, detector: DetectorModel, seed: int, stream: tuple
    ) -> bool:
        rng = self._simulator.rng(seed, stream)
        cards = self._simulator.qott.draw_cards(params, rng)
        table = self._branch_table(params, strategy, key, cards)
        weights = table[:, 0] / table[:, 0].sum()
        outcome = int(rng.choice(len(table), p=weights))
        committed, passed = table[outcome]
        if rng.random() < passed / committed:
            return True
        return bool(rng.random() < detector.epsilon)

    def _run_chunks(self, count: int, workers: int, job) -> int:
        size = max(1, math.ceil(count / workers))
        chunks = [range(start, min(start + size, count)) for start in range(0, count, size)]
        if workers <= 1 or len(chunks) <= 1:
            return sum(job(chunk) for chunk in chunks)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return sum(pool.map(job, chunks))

    def monte_carlo(
        self,
        params: QottParams,
        strategy: AliceStrategy,
        detector: Optional[DetectorModel] = None,
        trials: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> MonteCarloReport:
        """Estimate the acceptance probability over independent transcripts.

        Trial t draws its cards, commit outcome and test result from
        `numpy.random.default_rng([seed, t])`, so results do not depend on how
        trials are split between workers.
        """
        detector = detector or DetectorModel()
        trials = int(trials or self._simulator.trials)
        seed = self._simulator.seed if seed is None else int(seed)
        workers = int(workers or self._simulator.workers)
        key = strategy.fingerprint()
        _logger.info(f"Monte Carlo: {trials} trials of {strategy.kind} at p={params.p}, J={list(params.J)}")

        def job(chunk: range) -> int:
            return sum(self._sample_trial(params, strategy, key, detector, seed, (t,)) for t in chunk)

        accepted = self._run_chunks(trials, workers, job)
        estimate = accepted / trials
        exact = self.average_acceptance(params, strategy, detector)
        exact_sigma = math.sqrt(max(exact * (1 - exact), 0.0) / trials)
        bound = 1 / len(params.J) + detector.epsilon
        bound_sigma = math.sqrt(max(bound * (1 - bound), 0.0) / trials)
        _logger.info(f"Monte Carlo: accepted {accepted}/{trials}, exact {exact:.6f}")
        return MonteCarloReport(
            p=params.p,
            J=params.J,
            strategy=strategy.kind,
            epsilon=detector.epsilon,
            seed=seed,
            trials=trials,
            accepted=accepted,
            estimate=estimate,
            standard_error=math.sqrt(estimate * (1 - estimate) / trials),
            exact=exact,
            exact_sigma=exact_sigma,
            within_3_sigma=abs(estimate - exact) <= 3 * exact_sigma + TOLERANCE_DERIVED,
            bound=bound,
            within_bound=estimate <= bound + 3 * bound_sigma + TOLERANCE_DERIVED,
        )

    def repetition_mode(
        self,
        n: int,
        strategy: AliceStrategy,
        params: QottParams,
        detector: Optional[DetectorModel] = None,
        trials: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> RepetitionReport:
        """Run n independent instances per trial; the cheat succeeds only if all accept.

        Instance r of trial t uses `numpy.random.default_rng([seed, t, r])`.

        Raises:
            ValueError: If n < 1.
        """
        if n < 1:
            raise ValueError(f"Repetition count must be >= 1, got {n}")
        detector = detector or DetectorModel()
        trials = int(trials or self._simulator.trials)
        seed = self._simulator.seed if seed is None else int(seed)
        workers = int(workers or self._simulator.workers)
        key = strategy.fingerprint()

        def job(chunk: range) -> int:
            return sum(
                all(
                    self._sample_trial(params, strategy, key, detector, seed, (t, r))
                    for r in range(n)
                )
                for t in chunk
            )

        failures = self._run_chunks(trials, workers, job)
        estimate = failures / trials
        bound = (1 / len(params.J) + detector.epsilon) ** n
        bound_sigma = math.sqrt(max(bound * (1 - bound), 0.0) / trials)
        return RepetitionReport(
            n=n,
            p=params.p,
            J=params.J,
            strategy=strategy.kind,
            epsilon=detector.epsilon,
            seed=seed,
            trials=trials,
            failures=failures,
            estimate=estimate,
            standard_error=math.sqrt(estimate * (1 - estimate) / trials),
            bound=bound,
            within_bound=estimate <= bound + 3 * bound_sigma + TOLERANCE_DERIVED,
        )

    #########################
    #   Adversary family    #
    #########################

    def honest_subchannels(self, params: QottParams, secret: QuantumState) -> tuple[Channel, ...]:
        """The instrument {Δ^{a,b}} of an honest Bell measurement of `secret` with E."""
        p = params.p
        a_dim = params.masker.dims["A"]
        rho = _as_density(secret).matrix
        eigenvalues, vectors = np.linalg.eigh(rho)
        in_register = Register.of(E=p, A=a_dim)
        out_register = Register.of(A=a_dim)
        channels = []
        for bell in bell_basis(p):
            frame = bell.amplitudes.reshape(p, p)
            kraus = []
            for weight, vector in zip(eigenvalues, vectors.T):
                if weight <= NEGLIGIBLE_BRANCH:
                    continue
                row = np.sqrt(weight) * (frame.conj().T @ vector)
                kraus.append(np.kron(row[None, :], np.eye(a_dim)))
            channels.append(
                Channel(
                    in_register=in_register,
                    out_register=out_register,
                    kraus=tuple(kraus),
                    trace_preserving=False,
                )
            )
        return tuple(channels)

    def honest_mixture_strategy(
        self,
        params: QottParams,
        secrets: Sequence[QuantumState],
        weights: Sequence[float],
        offset: tuple[int, int] = (0, 0),
    ) -> GenericSubchannelsStrategy:
        """Instrument mixing honest commits of several secrets with the given weights."""
        weights = np.asarray(weights, dtype=float)
        if len(weights) != len(secrets) or np.any(weights < 0) or abs(weights.sum() - 1) > TOLERANCE_DERIVED:
            raise ValueError("Mixture weights must be a probability vector over the secrets")
        families = [self.honest_subchannels(params, secret) for secret in secrets]
        subchannels = []
        for index in range(params.p**2):
            first = families[0][index]
            kraus = tuple(
                np.sqrt(w) * k for w, family in zip(weights, families) for k in family[index].kraus
            )
            subchannels.append(
                Channel(
                    in_register=first.in_register,
                    out_register=first.out_register,
                    kraus=kraus,
                    trace_preserving=False,
                )
            )
        return GenericSubchannelsStrategy(subchannels=tuple(subchannels), offset=offset)

    def permuted_bell_strategy(
        self,
        params: QottParams,
        secret: QuantumState,
        permutation: Optional[Sequence[int]] = None,
        rng: Optional[np.random.Generator] = None,
        offset: tuple[int, int] = (0, 0),
    ) -> GenericSubchannelsStrategy:
        """Honest Bell measurement whose outcome Alice reports through a permutation."""
        honest = self.honest_subchannels(params, secret)
        if permutation is None:
            rng = rng or self._simulator.rng()
            permutation = rng.permutation(len(honest))
        if sorted(int(k) for k in permutation) != list(range(len(honest))):
            raise ValueError("permutation must reorder all p^2 outcomes")
        subchannels = [None] * len(honest)
        for source, target in enumerate(permutation):
            subchannels[int(target)] = honest[source]
        return GenericSubchannelsStrategy(subchannels=tuple(subchannels), offset=offset)

    def random_generic_strategy(
        self,
        params: QottParams,
        rng: np.random.Generator,
        offset: tuple[int, int] = (0, 0),
        with_tamper: bool = True,
    ) -> GenericSubchannelsStrategy:
        """A rank-one instrument cut from a Haar-random isometry EA → (outcome, A).

        With `with_tamper`, Ξ is a Haar-random unitary on A.
        """
        p = params.p
        a_dim = params.masker.dims["A"]
        isometry = random_unitary(p * p * a_dim, rng)[:, : p * a_dim]
        in_register = Register.of(E=p, A=a_dim)
        out_register = Register.of(A=a_dim)
        subchannels = tuple(
            Channel(
                in_register=in_register,
                out_register=out_register,
                kraus=(isometry[index * a_dim : (index + 1) * a_dim, :],),
                trace_preserving=False,
            )
            for index in range(p * p)
        )
        tamper = None
        if with_tamper:
            tamper = unitary_channel(Unitary.gate(random_unitary(a_dim, rng)))
        return GenericSubchannelsStrategy(subchannels=subchannels, tamper=tamper, offset=offset)

    def guessing_strategy(
        self, params: QottParams, secret: QuantumState, guess: int, delta: int = 1
    ) -> WrongIndicesStrategy:
        """Reveal k1 = i1 + δ after shifting A by X^{guess·δ}.

        With the minimal masker the shift exactly compensates the wrong unlock
        when Bob's j1 equals `guess`, so the strategy attains acceptance 1/|J|.
        """
        p = params.p
        if guess not in params.J:
            raise ValueError(f"Guess {guess} is not in J = {params.J}")
        if delta % p == 0:
            raise ValueError("delta must be nonzero mod p")
        shift = gen_pauli_x(p).power((guess * delta) % p)
        return WrongIndicesStrategy(
            secret=secret, offset=(delta % p, 0), tamper=unitary_channel(shift)
        )
