"""Multistate linear level-crossing dynamics.

Solve i da/dt = (A + B t) a for Hermitian A and diagonal B over large
symmetric time windows, assemble finite-window scattering probability
matrices, and compare against the closed-form results that exist for this
family: the extreme-slope survival formula, the exact zeros of
counterintuitive within-band transitions, and the one-tilted-level ladder.
"""

from .model import (Band, BandKind, BandTransform, ModelFormatError,
                    ModelSpec, TransitionClass, Violation, bands,
                    canonicalize_bands, classify_transition, format_model,
                    full_unitary, is_canonical, is_valid, load_model,
                    parse_model, validate)
from .presets import (default_window, four_state_band_gap, preset_model,
                      preset_text, two_state, five_state_band,
                      five_state_band_decoupled, PRESET_NAMES)
from .propagator import (IntegratorConfig, IntegratorError, NonFiniteState,
                         PropagationResult, StateVector, StepSizeUnderflow,
                         choose_window, propagate, rhs, write_timeseries_csv)
from .scattering import (ColumnError, SaturationReport, ScatteringMatrix,
                         lab_frame_amplitudes, saturation_check,
                         scattering_matrix, write_amplitude_csv,
                         write_probability_csv)
from .theory import (BEPrediction, DOGeometry, asymptotic_eigenenergy,
                     be_survival, do_oracle, nogo_prediction)

__version__ = "0.1.0"

__all__ = [
    "Band", "BandKind", "BandTransform", "ModelFormatError", "ModelSpec",
    "TransitionClass", "Violation", "bands", "canonicalize_bands",
    "classify_transition", "format_model", "full_unitary", "is_canonical",
    "is_valid", "load_model", "parse_model", "validate",
    "PRESET_NAMES", "default_window", "four_state_band_gap", "preset_model",
    "preset_text", "two_state", "five_state_band", "five_state_band_decoupled",
    "IntegratorConfig", "IntegratorError", "NonFiniteState",
    "PropagationResult", "StateVector", "StepSizeUnderflow", "choose_window",
    "propagate", "rhs", "write_timeseries_csv",
    "ColumnError", "SaturationReport", "ScatteringMatrix",
    "lab_frame_amplitudes", "saturation_check", "scattering_matrix",
    "write_amplitude_csv", "write_probability_csv",
    "BEPrediction", "DOGeometry", "asymptotic_eigenenergy", "be_survival",
    "do_oracle", "nogo_prediction",
    "__version__",
]
