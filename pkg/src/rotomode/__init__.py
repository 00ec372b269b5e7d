"""Photons in polychromatic rotating modes.

Rotating modes are superpositions of two monochromatic paraxial modes whose
frequencies differ by 2 Delta and whose angular momenta are opposite; their
polarization or transverse intensity pattern rotates uniformly.  The package
builds those modes, evaluates their single-photon fields and runs the
associated two-photon protocols in a truncated Fock space.
"""
from .atom import AtomConfig, StorageResult, absorb, stored_entanglement
from .errors import RotomodeError
from .fields import (
    FieldSnapshot,
    Grid,
    detection_amplitude,
    estimate_pattern_rotation,
    estimate_polarization_rotation,
    mode_function,
    polarization_ellipse,
    snapshot,
    stokes,
)
from .fock import (
    FockState,
    Observable,
    annihilate,
    closed_form_expectations,
    create,
    expect,
    inner,
    project_mode,
    single_photon_state,
    vacuum,
)
from .interference import (
    GaussianSpectrum,
    SampledSpectrum,
    beam_splitter,
    hom_analytic,
    hom_bruteforce,
    make_gaussian_spectrum,
)
from .modes import ModeBasis, ModeLabel, TransverseIndex, make_mode_label, theta_weights
from .protocols import Bb84Config, SingletSpec, bb84_simulate, build_singlet, conditional_correlations
from .transforms import ModePair, SuperpositionMode, build_pair, commutator, verify_unitary

__version__ = "0.1.0"

__all__ = [
    "AtomConfig", "StorageResult", "absorb", "stored_entanglement",
    "RotomodeError",
    "FieldSnapshot", "Grid", "detection_amplitude", "estimate_pattern_rotation",
    "estimate_polarization_rotation", "mode_function", "polarization_ellipse", "snapshot", "stokes",
    "FockState", "Observable", "annihilate", "closed_form_expectations", "create", "expect",
    "inner", "project_mode", "single_photon_state", "vacuum",
    "GaussianSpectrum", "SampledSpectrum", "beam_splitter", "hom_analytic", "hom_bruteforce",
    "make_gaussian_spectrum",
    "ModeBasis", "ModeLabel", "TransverseIndex", "make_mode_label", "theta_weights",
    "Bb84Config", "SingletSpec", "bb84_simulate", "build_singlet", "conditional_correlations",
    "ModePair", "SuperpositionMode", "build_pair", "commutator", "verify_unitary",
]
