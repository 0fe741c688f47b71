"""
Service class for reading maskers and commodities back from disk.

Fixtures written by `ExportsService` are decoded and re-validated: a masker
must reproduce its recorded fingerprint and a commodity must match the
commodity rebuilt from its parameters and cards.

Classes:
    ImportsService: Service class for reading fixtures.

Example:
    ```python
    masker = simulator.imports.load_masker("/tmp/minimal3")
    commodity = simulator.imports.load_commodity("/tmp/qott")
    bob_card = simulator.imports.load_card("/tmp/qott", owner="bob")
    ```
"""

import json
import logging
from pathlib import Path
from typing import Any, Union

import numpy as np
from pydantic import ValidationError

from qottkit.containers import decode_container, read_header
from qottkit.exports import (
    CARDS_FILE,
    MASKER_FILE,
    SAFE_STATE_FILE,
    STATE_FILE,
    UNITARY_FILE,
    CardsFile,
    MaskerDescriptor,
)
from qottkit.maskers import Masker
from qottkit.qott import IndexCards, QottCommodity
from qottkit.qudits import TOLERANCE_STATE, DensityOperator, PureState, Unitary
from qottkit.simulator import QottSimulator

_logger = logging.getLogger(__name__)


class ImportsService:
    """Service class for reading masker and commodity fixtures.

    Methods:
        load_masker: Rebuild a masker from its directory.
        load_commodity: Rebuild a commodity from its directory.
        load_card: Read a single owner's card.
        inspect: Describe a fixture file or directory without decoding payloads.
    """

    def __init__(self, simulator: QottSimulator):
        self._simulator = simulator

    def _read_json(self, path: Path, model):
        try:
            return model.model_validate(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError, ValidationError) as e:
            _logger.error(f"Error reading {path}: {e}")
            raise ValueError(f"Invalid fixture file {path}: {e}") from e

    def _read_container(self, path: Path, kind: type):
        try:
            value = decode_container(path.read_bytes())
        except OSError as e:
            _logger.error(f"Error reading {path}: {e}")
            raise ValueError(f"Invalid fixture file {path}: {e}") from e
        if not isinstance(value, kind):
            raise ValueError(f"{path} holds a {type(value).__name__}, expected {kind.__name__}")
        return value

    def load_masker(self, directory: Union[str, Path]) -> Masker:
        """Rebuild a masker from a fixture directory.

        Raises:
            ValueError: If a file is missing or malformed, or the rebuilt masker
                does not match the recorded fingerprint.
        """
        directory = Path(directory)
        descriptor = self._read_json(directory / MASKER_FILE, MaskerDescriptor)
        masker = Masker(
            family=descriptor.family,
            d=descriptor.d,
            unitary=self._read_container(directory / UNITARY_FILE, Unitary),
            safe_state=self._read_container(directory / SAFE_STATE_FILE, DensityOperator),
            layout=descriptor.layout,
        )
        if masker.fingerprint() != descriptor.fingerprint:
            raise ValueError(f"Masker in {directory} does not match its recorded fingerprint")
        masker._set_simulator(self._simulator)
        return masker

    def load_card(self, directory: Union[str, Path], owner: str) -> tuple[int, int]:
        """Read only the card tagged with `owner`."""
        cards = self._read_json(Path(directory) / CARDS_FILE, CardsFile)
        return cards.card(owner)

    def load_commodity(self, directory: Union[str, Path]) -> QottCommodity:
        """Rebuild a commodity from a fixture directory.

        The parameters are rebuilt from the recorded p, J and masker family, and
        the stored state must agree with the commodity they define.

        Raises:
            ValueError: If a file is missing or malformed, or the stored state
                differs from the rebuilt one.
        """
        directory = Path(directory)
        cards_file = self._read_json(directory / CARDS_FILE, CardsFile)
        state = self._read_container(directory / STATE_FILE, PureState)
        params = self._simulator.qott.params(cards_file.p, cards_file.J, cards_file.masker)
        cards = IndexCards(alice=cards_file.card("alice"), bob=cards_file.card("bob"))
        rebuilt = self._simulator.qott.build_qott(params, cards=cards)
        if state.register != rebuilt.state.register or (
            np.max(np.abs(state.amplitudes - rebuilt.state.amplitudes)) > TOLERANCE_STATE
        ):
            raise ValueError(f"Commodity state in {directory} does not match its cards")
        commodity = QottCommodity(state=state, params=params, cards=cards)
        commodity._set_simulator(self._simulator)
        return commodity

    def inspect(self, path: Union[str, Path]) -> dict[str, Any]:
        """Describe a `.qtk` file, a JSON descriptor, or every such file of a directory."""
        path = Path(path)
        if path.is_dir():
            return {
                child.name: self.inspect(child)
                for child in sorted(path.iterdir())
                if child.suffix in (".qtk", ".json")
            }
        if path.suffix == ".qtk":
            header = read_header(path.read_bytes())
            return header.model_dump(by_alias=True)
        if path.suffix == ".json":
            try:
                return json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as e:
                _logger.error(f"Error reading {path}: {e}")
                raise ValueError(f"Invalid fixture file {path}: {e}") from e
        raise ValueError(f"Cannot inspect {path}: expected a directory, .qtk or .json file")
