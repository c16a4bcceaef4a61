"""Transmit beamforming for MIMO symbiotic-radio backscatter systems.

Computes exact primary/secondary achievable rates, a semidefinite-relaxation
upper bound on the secondary rate, an exact-penalty CCCP locally optimal
beamformer, and MRT baselines, with a Monte Carlo experiment harness.
"""

from srbeam.model import Beamformer, ChannelSet, ProblemSpec, RateReport

__all__ = ["Beamformer", "ChannelSet", "ProblemSpec", "RateReport"]
__version__ = "0.1.0"
