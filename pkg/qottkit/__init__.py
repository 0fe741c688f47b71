from importlib.metadata import version, PackageNotFoundError

from qottkit.simulator import QottSimulator

try:
    __version__ = version("qottkit")
except PackageNotFoundError:
    __version__ = "unknown"

__all__ = ["QottSimulator"]
