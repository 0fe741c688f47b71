"""
Unit tests for the MaskersService class.

Test Coverage:
    - get_masker(): Lookup by family, unknown families and caching
    - verify_masking(): Certificates for masking and non-masking families
    - entropy_audit(): Randomness cost against the log₂d and 2log₂d bounds
    - purify_safe() / isometry(): Key dimension and isometry property
    - mask() / unmask(): Secret recovery on random mixed states and input validation
    - qc_structure(): Quantum-classical output of the one-time pad
    - dual_masker(): Factorization residual and rejection of non-masking input
    - qss23_check(): Threshold sharing on the purified masker
"""

import numpy as np
import pytest
from pytest_mock import MockerFixture

from qottkit.maskers import MaskersService, probe_states
from qottkit.measures import fidelity
from qottkit.qudits import PureState, Register, random_density
from qottkit.simulator import QottSimulator

from .conftest import _MockData


# ==================== Lookup ====================


def test_get_masker(simulator: QottSimulator):
    """
    Test that get_masker():
    - Builds every listed family with the declared register layout
    - Raises ValueError for an unknown family
    """
    for name in simulator.maskers.family_names():
        masker = simulator.maskers.get_masker(name, 3)
        assert masker.family == name
        assert masker.d == 3
        assert masker.dims["C"] == 3
        assert masker.dims["A"] * masker.dims["B"] == 3 * masker.dims["S"]

    with pytest.raises(ValueError, match="Unknown masker family"):
        simulator.maskers.get_masker("teleport", 3)


def test_get_masker_is_cached(simulator: QottSimulator):
    """
    Test that the masker constructors:
    - Return the same instance on repeated calls
    - Build a fresh instance after clear_caches()
    """
    first = simulator.maskers.get_masker("minimal", 3)
    assert simulator.maskers.get_masker("minimal", 3) is first

    simulator.maskers.clear_caches()
    rebuilt = simulator.maskers.get_masker("minimal", 3)
    assert rebuilt is not first
    assert rebuilt.fingerprint() == first.fingerprint()


def test_probe_states_count():
    for d in (2, 3):
        assert len(probe_states(d)) == 3 * d + d * (d - 1)


# ==================== Certificates ====================


def test_verify_masking(simulator: QottSimulator):
    """
    Test that verify_masking():
    - Passes exactly for the families and dimensions that mask
    - Reports the entropy of the safe state
    - Keeps unmask fidelity at 1 even when masking fails
    """
    for case in _MockData.MASKER_CASES:
        masker = simulator.maskers.get_masker(case["family"], case["d"])
        report = masker.verify()
        assert report.passed is case["masks"], f"{case['family']} d={case['d']}"
        assert report.safe_entropy == pytest.approx(case["safe_entropy"], abs=1e-9)
        assert report.unmask_fidelity == pytest.approx(1.0, abs=1e-9)
        if not case["masks"]:
            assert report.max_deviation > 1e-9


def test_verify_masking_logs_failure(simulator: QottSimulator, mocker: MockerFixture):
    warning = mocker.patch("qottkit.maskers._logger.warning")
    report = simulator.maskers.verify_masking(simulator.maskers.get_masker("identity", 3))
    assert not report.passed
    warning.assert_called_once()


def test_entropy_audit(simulator: QottSimulator):
    """
    Test that entropy_audit():
    - Marks the minimal masker tight against log₂d
    - Marks the one-time pad tight against 2log₂d and strictly above log₂d
    """
    minimal = simulator.maskers.entropy_audit(simulator.maskers.get_masker("minimal", 3))
    assert minimal.general_bound == pytest.approx(np.log2(3))
    assert minimal.meets_general_bound
    assert minimal.tight_general
    assert not minimal.strictly_above_general

    qotp = simulator.maskers.entropy_audit(simulator.maskers.get_masker("qotp", 3))
    assert qotp.tight_separable
    assert qotp.strictly_above_general

    identity = simulator.maskers.entropy_audit(simulator.maskers.get_masker("identity", 3))
    assert not identity.meets_general_bound


def test_qc_structure_of_one_time_pad(simulator: QottSimulator):
    qotp = simulator.maskers.get_masker("qotp", 3)
    assert simulator.maskers.qc_structure(qotp) == pytest.approx(0.0, abs=1e-12)


# ==================== Purification ====================


def test_purify_safe_and_isometry(simulator: QottSimulator):
    """
    Test that purify_safe() and isometry():
    - Give a key of dimension rank(ω_S)
    - Give an isometry V with V†V = I
    - Reuse the cached purification
    """
    masker = simulator.maskers.get_masker("four-qudit", 2)
    safe_key = simulator.maskers.purify_safe(masker)
    assert safe_key.key_dim == 2
    assert simulator.maskers.purify_safe(masker) is safe_key

    v = simulator.maskers.isometry(masker)
    assert v.shape == (masker.dims["A"] * masker.dims["B"] * 2, 2)
    assert np.allclose(v.conj().T @ v, np.eye(2))

    identity = simulator.maskers.get_masker("identity", 3)
    assert simulator.maskers.purify_safe(identity).key_dim == 1


def test_mask_and_unmask(simulator: QottSimulator, plus3: PureState):
    """
    Test that mask() and unmask():
    - Recover the secret
    - Give a masked A marginal equal to I/d for the minimal masker
    - Reject secrets of the wrong dimension
    """
    masker = simulator.maskers.get_masker("minimal", 3)
    masked = simulator.maskers.mask(masker, plus3)
    assert masked.register.labels == ("A", "B")

    marginal = np.trace(masked.matrix.reshape(3, 3, 3, 3), axis1=1, axis2=3)
    assert np.allclose(marginal, np.eye(3) / 3)

    recovered = simulator.maskers.unmask(masker, masked)
    assert np.allclose(recovered.matrix, plus3.density().matrix)

    qubit = PureState(register=Register.of(q=2), amplitudes=[1.0, 0.0])
    with pytest.raises(ValueError):
        simulator.maskers.mask(masker, qubit)


def test_unmask_random_mixed_states(simulator: QottSimulator):
    """
    Test that unmask() after mask():
    - Recovers 50 random mixed secrets with fidelity ≥ 1 − 1e-10
    - Holds for every family at d = 2, 3 and 5
    """
    rng = np.random.default_rng(21)
    for d in (2, 3, 5):
        register = Register.of(C=d)
        for family in simulator.maskers.family_names():
            masker = simulator.maskers.get_masker(family, d)
            for _ in range(50):
                secret = random_density(register, rng)
                recovered = simulator.maskers.unmask(masker, simulator.maskers.mask(masker, secret))
                assert fidelity(recovered, secret) >= 1 - 1e-10, f"{family}.d{d}"


# ==================== Duality ====================


def test_dual_masker(simulator: QottSimulator):
    """
    Test that dual_masker():
    - Factors the minimal masker with a negligible residual
    - Yields a dual that masks in turn
    - Is cached per masker and hidden share
    """
    masker = simulator.maskers.get_masker("minimal", 3)
    dual = simulator.maskers.dual_masker(masker)
    assert dual.residual <= 1e-8
    assert dual.unitary.out_register.labels == ("B", "K")
    assert simulator.maskers.dual_masker(masker) is dual

    assert simulator.maskers.verify_masking(dual.as_masker()).passed

    other = simulator.maskers.dual_masker(masker, hidden="B")
    assert other.unitary.out_register.labels == ("A", "K")


def test_dual_masker_rejects_non_masking(simulator: QottSimulator):
    identity = simulator.maskers.get_masker("identity", 3)
    with pytest.raises(ValueError, match="cannot be factored"):
        simulator.maskers.dual_masker(identity)
    with pytest.raises(ValueError):
        simulator.maskers.dual_masker(simulator.maskers.get_masker("minimal", 3), hidden="K")


def test_qss23_check(simulator: QottSimulator, mocker: MockerFixture):
    """
    Test that qss23_check():
    - Passes for the minimal masker with all pairs recovering
    - Fails for the identity control, whose factorization is rejected
    """
    report = simulator.maskers.qss23_check(simulator.maskers.get_masker("minimal", 3))
    assert report.passed
    for pair in ("AB", "BK", "AK"):
        assert report.recovery_fidelities[pair] >= 1 - 1e-8
    for share in ("A", "B", "K"):
        assert report.share_entropies[share] == pytest.approx(np.log2(3), abs=1e-9)

    spy = mocker.spy(MaskersService, "dual_masker")
    failed = simulator.maskers.qss23_check(simulator.maskers.get_masker("identity", 3))
    assert not failed.passed
    assert failed.recovery_fidelities["BK"] == 0.0
    assert spy.call_count >= 1
