"""
Test suite for the ExportsService class in qottkit.exports module.

Test Functions:
    test_export_masker: Validates the files and descriptor of a masker directory
    test_export_commodity: Validates the card file of a commodity directory
    test_export_masker_propagates_write_errors: Ensures OSError is logged and raised
    test_cards_file_lookup: Tests owner lookup in a card file
"""

import json

import pytest
from pytest_mock import MockerFixture

from qottkit.containers import read_header
from qottkit.exports import CARDS_FILE, MASKER_FILE, STATE_FILE, UNITARY_FILE, CardEntry, CardsFile
from qottkit.qott import IndexCards, QottParams
from qottkit.simulator import QottSimulator


# ==================== ExportsService Methods ====================


def test_export_masker(simulator: QottSimulator, tmp_path):
    """
    Test that ExportsService.export_masker():
    - Creates the target directory
    - Writes the descriptor with the masker fingerprint
    - Writes the unitary as a container
    """
    masker = simulator.maskers.get_masker("minimal", 3)
    target = tmp_path / "nested" / "minimal3"
    path = simulator.exports.export_masker(masker, target)

    assert path == target
    descriptor = json.loads((path / MASKER_FILE).read_text())
    assert descriptor["family"] == "minimal"
    assert descriptor["d"] == 3
    assert descriptor["fingerprint"] == masker.fingerprint()

    header = read_header((path / UNITARY_FILE).read_bytes())
    assert header.kind == "unitary"
    assert header.out_labels == ["A", "B"]


def test_export_commodity(simulator: QottSimulator, params3: QottParams, tmp_path):
    """
    Test that ExportsService.export_commodity():
    - Tags every card with its owner
    - Writes the state as a pure container on (E, A, B, K)
    """
    commodity = simulator.qott.build_qott(params3, cards=IndexCards(alice=(2, 0), bob=(1, 2)))
    path = simulator.exports.export_commodity(commodity, tmp_path / "qott")

    cards = json.loads((path / CARDS_FILE).read_text())
    assert cards["p"] == 3
    assert cards["masker"] == "minimal"
    assert {entry["owner"]: entry["indices"] for entry in cards["cards"]} == {
        "alice": [2, 0],
        "bob": [1, 2],
    }
    header = read_header((path / STATE_FILE).read_bytes())
    assert header.kind == "pure"
    assert header.labels == ["E", "A", "B", "K"]


def test_export_masker_propagates_write_errors(
    mocker: MockerFixture, simulator: QottSimulator, tmp_path
):
    """
    Test that ExportsService.export_masker():
    - Logs and re-raises an OSError from the filesystem
    """
    mocker.patch("pathlib.Path.write_text", side_effect=OSError("disk full"))
    mock_error = mocker.patch("qottkit.exports._logger.error")
    with pytest.raises(OSError):
        simulator.exports.export_masker(simulator.maskers.get_masker("minimal", 3), tmp_path)
    mock_error.assert_called_once()


def test_cards_file_lookup():
    cards = CardsFile(
        p=3,
        J=(1, 2),
        masker="minimal",
        cards=[CardEntry(owner="alice", indices=(0, 1)), CardEntry(owner="bob", indices=(2, 2))],
    )
    assert cards.card("bob") == (2, 2)
    with pytest.raises(ValueError):
        cards.card("ted")
