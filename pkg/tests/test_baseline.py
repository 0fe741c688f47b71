"""
Unit tests for the BaselineService class.

Test Coverage:
    - rivest_setup(): Seeded cards, point on the line, prime check
    - rivest_commit() / rivest_reveal(): Honest opening and rejection of a changed message
    - run(): Honest transcript
    - src_classical(): Enumerated entropy against 3·log₂p
    - hiding_information(): Zero leakage to Bob
    - binding_success(): 1/p cheating probability
"""

import pytest
from pydantic import ValidationError

from qottkit.baseline import ClassicalOtt
from qottkit.simulator import QottSimulator

from .conftest import _MockData


# ==================== Commitment ====================


def test_rivest_setup(simulator: QottSimulator):
    """
    Test that rivest_setup():
    - Places Bob's point on Alice's line
    - Is deterministic under the seed
    - Rejects composite field sizes
    """
    ott = simulator.baseline.rivest_setup(5, seed=1)
    (a, b), (x1, y1) = ott.alice_card, ott.bob_card
    assert (a * x1 + b) % 5 == y1
    assert simulator.baseline.rivest_setup(5, seed=1) == ott

    with pytest.raises(ValueError):
        simulator.baseline.rivest_setup(6)


def test_classical_ott_validation():
    with pytest.raises(ValidationError):
        ClassicalOtt(p=5, alice_card=(1, 2), bob_card=(1, 4))
    with pytest.raises(ValidationError):
        ClassicalOtt(p=5, alice_card=(1, 7), bob_card=(0, 7))
    ClassicalOtt(p=5, alice_card=(1, 2), bob_card=(1, 3))


def test_commit_and_reveal(simulator: QottSimulator):
    """
    Test that rivest_commit() and rivest_reveal():
    - Accept the honest opening
    - Reject an opening of another message with the same line
    - Reject values outside Z_p
    """
    ott = ClassicalOtt(p=5, alice_card=(2, 4), bob_card=(3, 0))
    commit = simulator.baseline.rivest_commit(ott, 3)
    assert commit == 0
    assert simulator.baseline.rivest_reveal(ott, commit, 3, 2, 4)
    assert not simulator.baseline.rivest_reveal(ott, commit, 1, 2, 4)
    assert not simulator.baseline.rivest_reveal(ott, commit, 1, 4, 4)

    with pytest.raises(ValueError):
        simulator.baseline.rivest_commit(ott, 5)
    with pytest.raises(ValueError):
        simulator.baseline.rivest_reveal(ott, commit, 3, -1, 4)


def test_commit_hides_message_at_origin_point(simulator: QottSimulator):
    """
    Test that rivest_commit() with Bob's point at x1 = 0:
    - Gives every commit value for every message over the lines through the point
    """
    p, y1 = 5, 4
    for m in range(p):
        commits = {
            simulator.baseline.rivest_commit(
                ClassicalOtt(p=p, alice_card=(a, y1), bob_card=(0, y1)), m
            )
            for a in range(p)
        }
        assert commits == set(range(p)), m


def test_run(simulator: QottSimulator):
    for p in (2, 3, 7):
        transcript = simulator.baseline.run(p, p - 1, seed=4)
        assert transcript.accept
        assert transcript.reveal[0] == p - 1


# ==================== Audits ====================


def test_exhaustive_audits(simulator: QottSimulator):
    """
    Test that the exhaustive audits:
    - Give 3·log₂p bits of shared randomness
    - Give zero mutual information between m and Bob's view
    - Give binding success 1/p
    """
    for case in _MockData.BASELINE_CASES:
        p = case["p"]
        assert simulator.baseline.src_classical(p) == pytest.approx(case["src_bits"], abs=1e-9)
        assert simulator.baseline.hiding_information(p) == pytest.approx(0.0, abs=1e-12)
        assert simulator.baseline.binding_success(p) == pytest.approx(case["binding"])
