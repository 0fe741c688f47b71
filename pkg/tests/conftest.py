"""
Pytest configuration and fixtures for qottkit testing.

This module provides shared fixtures and expected-value tables for testing
qottkit. The simulator fixture pins the seed and trial count so every sampled
quantity is reproducible, and the cache fixture drops every service cache
between tests so no test observes another's cached maskers or branch tables.

Fixtures:
    simulator: A QottSimulator with a fixed seed and a small trial count.
    params3: QottParams for p = 3, J = {1, 2} with the minimal masker.
    params5: QottParams for p = 5, J = {1, 2} with the minimal masker.
    plus3: The uniform superposition on one qutrit.

Classes:
    _MockData: Expected values loaded from JSON files under tests/responses.
"""

import json
from pathlib import Path
from typing import Any, Final

import pytest

from qottkit.gates import fourier
from qottkit.qott import QottParams
from qottkit.qudits import PureState, Register
from qottkit.simulator import QottSimulator

_TEST_SEED = 7
_TEST_TRIALS = 400


@pytest.fixture
def simulator() -> QottSimulator:
    """
    Fixture that provides a QottSimulator with a fixed seed.

    Yields:
        simulator (QottSimulator): The simulator; its caches are cleared on teardown.
    """
    sim = QottSimulator(seed=_TEST_SEED, trials=_TEST_TRIALS, workers=1)
    yield sim
    sim.clear_caches()


@pytest.fixture
def params3(simulator: QottSimulator) -> QottParams:
    return simulator.qott.params(3, [1, 2])


@pytest.fixture
def params5(simulator: QottSimulator) -> QottParams:
    return simulator.qott.params(5, [1, 2])


@pytest.fixture
def plus3() -> PureState:
    return PureState(register=Register.of(I=3), amplitudes=fourier(3).matrix[:, 0])


_data_cache: dict[str, Any] = {}


def _load_data(file_name: str) -> Any:
    if file_name in _data_cache:
        return _data_cache[file_name].copy()

    path = Path(__file__).parent / "responses" / f"{file_name}.json"
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
        _data_cache[file_name] = data

        if isinstance(data, list):
            if len(data) < 2:
                raise ValueError(
                    f"Number of data items less than two: data has {len(data)} it"
                )

        return data.copy()


class _MockData:
    """
    A container class for expected values used in testing.

    All attributes are class-level constants loaded at module import time.

    Attributes:
        MASKER_CASES (list[dict]): Family, dimension, whether it masks and the
            entropy of its safe state.
        SRC_REPORTS (list[dict]): Shared randomness costs in bits per scheme.
        BASELINE_CASES (list[dict]): Classical commodity entropy and binding
            success per field size.
        REPORTS (list[dict]): Report envelopes that satisfy the shipped schema.
    """

    MASKER_CASES: Final[list[dict]] = _load_data("masker_cases")
    SRC_REPORTS: Final[list[dict]] = _load_data("src_reports")
    BASELINE_CASES: Final[list[dict]] = _load_data("baseline_cases")
    REPORTS: Final[list[dict]] = _load_data("reports")
