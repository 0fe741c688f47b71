"""
Classical baseline module for qottkit.

A trusted initializer hands Alice a random line y = a·x + b over Z_p and Bob a
random point (x1, y1) on it. Alice commits m ∈ Z_p with c = m + a and opens by
sending (m, a, b); Bob accepts iff his point lies on the revealed line and the
commit matches.

The pad is the slope a, not the intercept b: Bob's point may have x1 = 0, where
y1 = b, so c = m + b would reveal m to him.

Classes:
    ClassicalOtt: The classical commodity.
    ClassicalTranscript: One commit/reveal run.
    BaselineService: Setup, commit, reveal and exhaustive audits.

Example:
    ```python
    ott = simulator.baseline.rivest_setup(5, seed=1)
    c = simulator.baseline.rivest_commit(ott, 3)
    simulator.baseline.rivest_reveal(ott, c, 3, *ott.alice_card)  # True
    ```
"""

import logging
from collections import Counter
from functools import lru_cache
from itertools import product
from typing import Optional

import numpy as np
from pydantic import model_validator

from qottkit._qott_model import _QottBaseModel
from qottkit.measures import mutual_information, shannon_entropy
from qottkit.qudits import is_prime
from qottkit.simulator import QottSimulator

_logger = logging.getLogger(__name__)


class ClassicalOtt(_QottBaseModel):
    """A classical one-time table over Z_p.

    Attributes:
        p (int): Prime field size.
        alice_card (tuple[int, int]): The line (a, b).
        bob_card (tuple[int, int]): The point (x1, y1), with y1 = a·x1 + b mod p.
    """

    p: int
    alice_card: tuple[int, int]
    bob_card: tuple[int, int]

    @model_validator(mode="after")
    def _check_cards(self):
        p = self.p
        if not is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        if any(not 0 <= v < p for v in self.alice_card + self.bob_card):
            raise ValueError(f"Cards must lie in Z_{p}: {self.alice_card}, {self.bob_card}")
        a, b = self.alice_card
        x1, y1 = self.bob_card
        if (a * x1 + b) % p != y1:
            raise ValueError(f"Point {self.bob_card} is not on the line {self.alice_card}")
        return self


class ClassicalTranscript(_QottBaseModel):
    """One classical commitment.

    Attributes:
        p (int): Field size.
        message (int): The committed value m.
        commit (int): c = m + a mod p.
        reveal (tuple[int, int, int]): The opening (m, a, b).
        accept (bool): Bob's decision.
    """

    p: int
    message: int
    commit: int
    reveal: tuple[int, int, int]
    accept: bool


def _check_value(value: int, p: int, name: str) -> int:
    if not 0 <= value < p:
        raise ValueError(f"{name} must lie in Z_{p}, got {value}")
    return int(value)


class BaselineService:
    """Service class for the classical one-time table commitment."""

    def __init__(self, simulator: QottSimulator):
        self._simulator = simulator

    def rivest_setup(self, p: int, seed: Optional[int] = None) -> ClassicalOtt:
        """Draw a uniform line and a uniform point on it.

        Raises:
            ValueError: If p is not prime.
        """
        if not is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        rng = self._simulator.rng(seed)
        a, b, x1 = (int(v) for v in rng.integers(0, p, size=3))
        return ClassicalOtt(p=p, alice_card=(a, b), bob_card=(x1, (a * x1 + b) % p))

    def rivest_commit(self, ott: ClassicalOtt, m: int) -> int:
        """The commit message c = m + a mod p.

        Raises:
            ValueError: If m is not in Z_p.
        """
        m = _check_value(m, ott.p, "message")
        return (m + ott.alice_card[0]) % ott.p

    def rivest_reveal(self, ott: ClassicalOtt, commit: int, m: int, a: int, b: int) -> bool:
        """Bob's check: his point is on the line (a, b) and c = m + a.

        Raises:
            ValueError: If a value is not in Z_p.
        """
        p = ott.p
        commit = _check_value(commit, p, "commit")
        m = _check_value(m, p, "message")
        a = _check_value(a, p, "a")
        b = _check_value(b, p, "b")
        x1, y1 = ott.bob_card
        return (a * x1 + b) % p == y1 and (m + a) % p == commit

    def run(self, p: int, m: int, seed: Optional[int] = None) -> ClassicalTranscript:
        """An honest setup, commit and reveal of m."""
        ott = self.rivest_setup(p, seed=seed)
        commit = self.rivest_commit(ott, m)
        a, b = ott.alice_card
        return ClassicalTranscript(
            p=p,
            message=m,
            commit=commit,
            reveal=(m, a, b),
            accept=self.rivest_reveal(ott, commit, m, a, b),
        )

    @lru_cache
    def src_classical(self, p: int) -> float:
        """Entropy in bits of the joint card distribution, by enumeration.

        The closed form is 3·log₂p: a, b and x1 are independent and uniform.
        """
        counts = Counter(
            ((a, b), (x1, (a * x1 + b) % p)) for a, b, x1 in product(range(p), repeat=3)
        )
        probabilities = np.array(list(counts.values()), dtype=float) / p**3
        bits = shannon_entropy(probabilities)
        _logger.debug(f"Classical commodity entropy at p={p}: {bits:.12f} bits")
        return bits

    @lru_cache
    def hiding_information(self, p: int) -> float:
        """Mutual information in bits between a uniform m and Bob's view (c, x1, y1)."""
        joint = np.zeros((p, p**3))
        for m, a, b, x1 in product(range(p), repeat=4):
            c = (m + a) % p
            y1 = (a * x1 + b) % p
            joint[m, (c * p + x1) * p + y1] += 1
        return mutual_information(joint / joint.sum())

    @lru_cache
    def binding_success(self, p: int) -> float:
        """Best probability of opening a commitment to m′ ≠ m, by enumeration.

        Alice knows her line; Bob's abscissa x1 is uniform and unknown to her.
        Opening m′ forces the slope a′ = a + m − m′, and she picks the intercept b′.
        """
        best = 0.0
        for a, b, m, m_prime, b_prime in product(range(p), repeat=5):
            if m_prime == m:
                continue
            a_prime = (a + m - m_prime) % p
            hits = sum((a_prime * x1 + b_prime) % p == (a * x1 + b) % p for x1 in range(p))
            best = max(best, hits / p)
        return best
