"""Bivariate GARCH(1,1) simulation, fitting and extremal-dependence diagnostics."""

from ._extremo import *  # noqa: F401,F403
from ._extremo import __version__  # noqa: F401
