"""
Service class for writing maskers and commodities to disk.

A masker is written as a directory holding `masker.json` (family, dimension,
wire layout and content fingerprint), `unitary.qtk` and `safe_state.qtk`. A
commodity is written as a directory holding `state.qtk` and `cards.json`,
where every card carries the owner allowed to read it.

Classes:
    MaskerDescriptor: Contents of `masker.json`.
    CardEntry: One card of `cards.json`.
    CardsFile: Contents of `cards.json`.
    ExportsService: Service class for writing fixtures.

Example:
    ```python
    path = simulator.exports.export_masker(simulator.maskers.masker_minimal(3), "/tmp/minimal3")
    path = simulator.exports.export_commodity(commodity, "/tmp/qott")
    ```
"""

import logging
from pathlib import Path
from typing import Literal, Optional, Union

from qottkit._qott_model import _QottBaseModel
from qottkit.containers import encode_container
from qottkit.maskers import Masker, MaskerLayout
from qottkit.qott import QottCommodity
from qottkit.simulator import QottSimulator

_logger = logging.getLogger(__name__)

MASKER_FILE = "masker.json"
UNITARY_FILE = "unitary.qtk"
SAFE_STATE_FILE = "safe_state.qtk"
STATE_FILE = "state.qtk"
CARDS_FILE = "cards.json"


class MaskerDescriptor(_QottBaseModel):
    family: str
    d: int
    layout: MaskerLayout
    fingerprint: str


class CardEntry(_QottBaseModel):
    """An index card and the party allowed to read it."""

    owner: Literal["alice", "bob"]
    indices: tuple[int, int]


class CardsFile(_QottBaseModel):
    """The classical part of a commodity.

    Attributes:
        p (int): Prime dimension.
        J (tuple[int, ...]): Index set.
        masker (str): Masker family.
        cards (list[CardEntry]): One card per owner.
    """

    p: int
    J: tuple[int, ...]
    masker: str
    cards: list[CardEntry]

    def card(self, owner: str) -> tuple[int, int]:
        for entry in self.cards:
            if entry.owner == owner:
                return entry.indices
        raise ValueError(f"No card for owner {owner!r}")


class ExportsService:
    """Service class for writing maskers and commodities as fixture directories."""

    def __init__(self, simulator: QottSimulator):
        self._simulator = simulator

    def _write(self, path: Path, content: Union[str, bytes]) -> None:
        try:
            if isinstance(content, bytes):
                path.write_bytes(content)
            else:
                path.write_text(content, encoding="utf-8")
        except OSError as e:
            _logger.error(f"Error writing {path}: {e}")
            raise

    def export_masker(self, masker: Masker, directory: Union[str, Path]) -> Path:
        """Write a masker fixture directory.

        Args:
            masker (Masker): The masker.
            directory (str | Path): Target directory, created when missing.

        Returns:
            Path: The directory.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        descriptor = MaskerDescriptor(
            family=masker.family,
            d=masker.d,
            layout=masker.layout,
            fingerprint=masker.fingerprint(),
        )
        self._write(directory / MASKER_FILE, descriptor.to_json())
        self._write(directory / UNITARY_FILE, encode_container(masker.unitary))
        self._write(directory / SAFE_STATE_FILE, encode_container(masker.safe_state))
        _logger.info(f"Wrote masker {masker} to {directory}")
        return directory

    def export_commodity(
        self, commodity: QottCommodity, directory: Union[str, Path], masker_family: Optional[str] = None
    ) -> Path:
        """Write a commodity fixture directory.

        Args:
            commodity (QottCommodity): The commodity.
            directory (str | Path): Target directory, created when missing.
            masker_family (str | None): Family recorded in `cards.json`; defaults
                to the family of the commodity's masker.

        Returns:
            Path: The directory.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        params = commodity.params
        cards = CardsFile(
            p=params.p,
            J=params.J,
            masker=masker_family or params.masker.family,
            cards=[
                CardEntry(owner="alice", indices=commodity.cards.alice),
                CardEntry(owner="bob", indices=commodity.cards.bob),
            ],
        )
        self._write(directory / STATE_FILE, encode_container(commodity.state))
        self._write(directory / CARDS_FILE, cards.to_json())
        _logger.info(f"Wrote {commodity} to {directory}")
        return directory
