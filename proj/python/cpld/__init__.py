"""Rate functions, simulation and rare-event estimation for nonnegative
compound Poisson processes."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
