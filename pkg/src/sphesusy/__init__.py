"""Supersymmetric perturbation theory for spheroidal angular wave functions."""
from .susy import (Eigenstate, EnergySeries, LadderParams, ProblemParams, energy_level,
                   excited_state, ground_state, ladder_sequence)
from .symtrig import AlphaSeries, CosPoly, TrigForm

__version__ = "0.1.0"
