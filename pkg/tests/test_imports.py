"""
Unit tests for the ImportsService class.

This module tests reading fixtures back from disk, verifying that:
- Exported maskers and commodities reload with identical content
- A single owner's card can be read without the other card
- Tampered or mismatched files raise ValueError
- inspect() describes containers and descriptors without decoding payloads
"""

import json

import numpy as np
import pytest

from qottkit.containers import encode_container
from qottkit.exports import CARDS_FILE, MASKER_FILE, SAFE_STATE_FILE, STATE_FILE
from qottkit.qott import IndexCards, QottParams
from qottkit.qudits import DensityOperator, Register
from qottkit.simulator import QottSimulator


# ==================== Maskers ====================


def test_load_masker_round_trip(simulator: QottSimulator, tmp_path):
    """
    Test that ImportsService.load_masker():
    - Rebuilds a masker with the recorded fingerprint
    - Attaches the simulator so verify() works on the loaded masker
    """
    masker = simulator.maskers.get_masker("four-qudit", 2)
    path = simulator.exports.export_masker(masker, tmp_path / "four")
    loaded = simulator.imports.load_masker(path)
    assert loaded.fingerprint() == masker.fingerprint()
    assert loaded.layout == masker.layout
    assert loaded.verify().passed


def test_load_masker_rejects_tampering(simulator: QottSimulator, tmp_path):
    """
    Test that ImportsService.load_masker():
    - Rejects a safe state that no longer matches the fingerprint
    - Rejects a container of the wrong kind
    - Rejects a missing descriptor
    """
    masker = simulator.maskers.get_masker("minimal", 3)
    path = simulator.exports.export_masker(masker, tmp_path / "minimal")

    pure = np.zeros((3, 3))
    pure[0, 0] = 1.0
    swapped = DensityOperator(register=Register.of(S=3), matrix=pure)
    (path / SAFE_STATE_FILE).write_bytes(encode_container(swapped))
    with pytest.raises(ValueError, match="fingerprint"):
        simulator.imports.load_masker(path)

    (path / SAFE_STATE_FILE).write_bytes(encode_container(masker.unitary))
    with pytest.raises(ValueError, match="expected DensityOperator"):
        simulator.imports.load_masker(path)

    (path / MASKER_FILE).unlink()
    with pytest.raises(ValueError, match="Invalid fixture file"):
        simulator.imports.load_masker(path)


# ==================== Commodities ====================


def test_load_commodity_and_card(simulator: QottSimulator, params3: QottParams, tmp_path):
    """
    Test that ImportsService:
    - Reloads a commodity with identical amplitudes and cards
    - Reads one owner's card with load_card()
    """
    cards = IndexCards(alice=(1, 2), bob=(2, 1))
    commodity = simulator.qott.build_qott(params3, cards=cards)
    path = simulator.exports.export_commodity(commodity, tmp_path / "qott")

    loaded = simulator.imports.load_commodity(path)
    assert loaded.cards == cards
    assert np.allclose(loaded.state.amplitudes, commodity.state.amplitudes)
    assert simulator.imports.load_card(path, owner="bob") == (2, 1)
    with pytest.raises(ValueError):
        simulator.imports.load_card(path, owner="ted")


def test_load_commodity_rejects_mismatched_cards(
    simulator: QottSimulator, params3: QottParams, tmp_path
):
    commodity = simulator.qott.build_qott(params3, cards=IndexCards(alice=(1, 2), bob=(2, 1)))
    path = simulator.exports.export_commodity(commodity, tmp_path / "qott")

    cards = json.loads((path / CARDS_FILE).read_text())
    cards["cards"][0]["indices"] = [0, 0]
    (path / CARDS_FILE).write_text(json.dumps(cards))
    with pytest.raises(ValueError, match="does not match"):
        simulator.imports.load_commodity(path)


# ==================== inspect ====================


def test_inspect(simulator: QottSimulator, params3: QottParams, tmp_path):
    """
    Test that ImportsService.inspect():
    - Describes every fixture file of a directory
    - Returns the container header with the schema alias
    - Rejects unknown suffixes and malformed JSON
    """
    commodity = simulator.qott.build_qott(params3, seed=2)
    path = simulator.exports.export_commodity(commodity, tmp_path / "qott")

    listing = simulator.imports.inspect(path)
    assert set(listing) == {CARDS_FILE, STATE_FILE}
    assert listing[STATE_FILE]["schema"] == "qottkit.container/1"
    assert listing[STATE_FILE]["dims"] == [3, 3, 3, 3]

    other = tmp_path / "notes.txt"
    other.write_text("hello")
    with pytest.raises(ValueError, match="Cannot inspect"):
        simulator.imports.inspect(other)

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ValueError):
        simulator.imports.inspect(broken)
