"""Simulation of the entangled-clock proper-time interferometer."""

from .emitter import EmitterParams
from .photonics import DetectorModel, ReadoutProbabilities
from .protocol import (ExperimentConfig, HeraldOutcome, VisibilityPoint, run_entanglement,
                       run_free_evolution, run_postselected, run_readout, visibility_curve)
from .spacetime import ClockSpec, PhaseBundle, SiteWorldline, phase_bundle

__all__ = [
    "ClockSpec", "DetectorModel", "EmitterParams", "ExperimentConfig", "HeraldOutcome", "PhaseBundle",
    "ReadoutProbabilities", "SiteWorldline", "VisibilityPoint", "phase_bundle", "run_entanglement",
    "run_free_evolution", "run_postselected", "run_readout", "visibility_curve",
]
