"""Coupled-mode simulator for a microcavity-engineered plasmonic nanoparticle and a single quantum emitter."""

__version__ = "0.1.0"

from . import couplings, dynamics, materials, network, quantities  # noqa: E402,F401
