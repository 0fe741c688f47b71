"""qottkit Simulator Module.

This module provides the central simulator object through which every qottkit
service is reached.

The QottSimulator provides access to the following services:

- maskers: Construct and certify quantum maskers
- qott: Build and audit quantum one-time table commodities
- protocol: Run the commitment protocol against honest and adversarial parties
- baseline: Run the classical one-time table commitment
- exports: Write maskers and commodities to disk
- imports: Read them back

Attributes:
    DEFAULT_SEED (int): Master seed used when neither an argument nor `QOTTKIT_SEED` is given.
    DEFAULT_TRIALS (int): Monte Carlo trial count used when neither an argument nor `QOTTKIT_TRIALS` is given.
    DEFAULT_WORKERS (int): Worker threads used when neither an argument nor `QOTTKIT_WORKERS` is given.

Example:
    ```python
    # instantiate the simulator
    simulator = QottSimulator(seed=7)

    # certify a masker
    report = simulator.maskers.verify_masking(simulator.maskers.masker_minimal(3))
    ```
"""

import os
from typing import Optional, Sequence, Union

import numpy as np

DEFAULT_SEED = 2024
"""The default master seed.

Used by the `QottSimulator` in the event no seed is provided and
`QOTTKIT_SEED` is not set."""

DEFAULT_TRIALS = 10_000
"""The default number of Monte Carlo trials."""

DEFAULT_WORKERS = 1
"""The default number of worker threads for Monte Carlo campaigns."""

_env_seed = os.getenv("QOTTKIT_SEED")
_env_trials = os.getenv("QOTTKIT_TRIALS")
_env_workers = os.getenv("QOTTKIT_WORKERS")


def _read_int(value: Union[int, str, None], default: int, variable: str, minimum: int) -> int:
    if value is None:
        return default
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise ValueError(
            f'Invalid value {value!r} for "{variable}": expected an integer.'
        ) from None
    if number < minimum:
        raise ValueError(f'Invalid value {number} for "{variable}": must be >= {minimum}.')
    return number


class QottSimulator:
    """The entry point to the qottkit services.

    The simulator owns the run configuration (master seed, Monte Carlo trial
    count and worker count) and one instance of every service. Services reach
    each other through the simulator, so a single simulator shares caches
    between them.

    Attributes:
        seed (int): Master seed of every sampled quantity.
        trials (int): Default number of Monte Carlo trials.
        workers (int): Worker threads used for Monte Carlo chunks.
        maskers (MaskersService): Service for maskers.
        qott (QottService): Service for QOTT commodities.
        protocol (ProtocolService): Service for the commitment protocol.
        baseline (BaselineService): Service for the classical baseline.
        exports (ExportsService): Service for writing fixtures.
        imports (ImportsService): Service for reading fixtures.

    Example:
        ```python
        # explicit configuration
        simulator = QottSimulator(seed=7, trials=2000)

        # or rely on QOTTKIT_SEED, QOTTKIT_TRIALS and QOTTKIT_WORKERS
        simulator = QottSimulator()
        ```
    """

    def __init__(
        self,
        seed: Optional[Union[int, str]] = _env_seed,
        trials: Optional[Union[int, str]] = _env_trials,
        workers: Optional[Union[int, str]] = _env_workers,
    ):
        """Initialize the simulator and its services.

        Args:
            seed (int | None): Master seed. Defaults to `QOTTKIT_SEED`, then `DEFAULT_SEED`.
            trials (int | None): Monte Carlo trials. Defaults to `QOTTKIT_TRIALS`,
                then `DEFAULT_TRIALS`.
            workers (int | None): Worker threads. Defaults to `QOTTKIT_WORKERS`,
                then `DEFAULT_WORKERS`.

        Raises:
            ValueError: If a value is not an integer or is out of range; the
                message names the environment variable.
        """
        self.seed = _read_int(seed, DEFAULT_SEED, "QOTTKIT_SEED", 0)
        self.trials = _read_int(trials, DEFAULT_TRIALS, "QOTTKIT_TRIALS", 1)
        self.workers = _read_int(workers, DEFAULT_WORKERS, "QOTTKIT_WORKERS", 1)

        from qottkit.baseline import BaselineService
        from qottkit.exports import ExportsService
        from qottkit.imports import ImportsService
        from qottkit.maskers import MaskersService
        from qottkit.protocol import ProtocolService
        from qottkit.qott import QottService

        self.maskers = MaskersService(self)
        self.qott = QottService(self)
        self.protocol = ProtocolService(self)
        self.baseline = BaselineService(self)
        self.exports = ExportsService(self)
        self.imports = ImportsService(self)

    def __repr__(self):
        return f"QottSimulator(seed={self.seed}, trials={self.trials}, workers={self.workers})"

    def rng(self, seed: Optional[int] = None, stream: Sequence[int] = ()) -> np.random.Generator:
        """A generator seeded by `[seed, *stream]`, with `seed` defaulting to the master seed.

        Distinct streams give independent generators; the same stream always
        gives the same sequence.
        """
        seed = self.seed if seed is None else seed
        return np.random.default_rng([seed, *stream])

    def clear_caches(self) -> None:
        """Drop every cached masker, purification, dual and branch table."""
        self.maskers.clear_caches()
        self.qott.clear_caches()
        self.protocol.clear_caches()
