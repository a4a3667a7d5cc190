"""Helmholtz free energies of compressible mixtures and their incompressible limits."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
