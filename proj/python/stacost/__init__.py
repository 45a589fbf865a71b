"""Energetic cost of counterdiabatic, local counterdiabatic, optimal-control and
inverse-engineering protocols for two-level, oscillator and Jaynes-Cummings models."""

from ._stacost import *  # noqa: F401,F403
from ._stacost import __doc__  # noqa: F401
