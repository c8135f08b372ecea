"""Built-in benchmark models.

``fig1``             five states: a three-level band of slope 1 over a flat
                     level and a down-sloping level; all cross-band pairs
                     coupled with complex strengths.  The standard stage for
                     counterintuitive suppression.
``fig1-decoupled``   same, with every coupling of band states 2 and 3
                     removed; isolates how the band's presence reshapes the
                     remaining column even though the suppressed entries
                     stay zero either way.
``fig4 <epsilon>``   four states: a two-level band of slope -1 (gap epsilon
                     between the offsets), one rising and one half-slope
                     level.  Sweeping epsilon through zero toggles the 1->2
                     transition between counterintuitive and intuitive.
``lz2``              the two-state crossing with g = 0.5; survival
                     probability exp(-pi/4).
"""

from __future__ import annotations

import numpy as np

from .model import ModelSpec, format_model

__all__ = [
    "PRESET_NAMES",
    "preset_model",
    "preset_text",
    "default_window",
    "five_state_band",
    "five_state_band_decoupled",
    "four_state_band_gap",
    "two_state",
]

_FIVE_STATE_COUPLINGS = {
    (0, 3): 0.4 + 0.12j,
    (0, 4): 0.25 + 0.2j,
    (1, 3): 0.1 + 0.7j,
    (1, 4): 0.5 + 0.1j,
    (2, 3): 0.8 + 0.0j,
    (2, 4): 0.3 + 0.24j,
    (3, 4): 0.6 + 0.9j,
}


def five_state_band() -> ModelSpec:
    return ModelSpec.from_pairs(
        beta=[1.0, 1.0, 1.0, 0.0, -0.8],
        alpha=[0.0, 0.3, 0.5, 0.0, -0.4],
        pairs=_FIVE_STATE_COUPLINGS,
    )


def five_state_band_decoupled() -> ModelSpec:
    pairs = {ij: g for ij, g in _FIVE_STATE_COUPLINGS.items()
             if 1 not in ij and 2 not in ij}
    return ModelSpec.from_pairs(
        beta=[1.0, 1.0, 1.0, 0.0, -0.8],
        alpha=[0.0, 0.3, 0.5, 0.0, -0.4],
        pairs=pairs,
    )


def four_state_band_gap(epsilon: float = 0.5) -> ModelSpec:
    """Band pair at slope -1 with offsets (0, -epsilon) plus two crossing levels."""
    return ModelSpec.from_pairs(
        beta=[-1.0, -1.0, 1.0, 0.5],
        alpha=[0.0, -float(epsilon), 0.0, -0.5],
        pairs={
            (0, 2): 0.4 - 0.1j,
            (0, 3): 0.6 + 0.0j,
            (1, 2): 0.4 + 0.5j,
            (1, 3): 0.2 + 0.3j,
        },
    )


def two_state() -> ModelSpec:
    return ModelSpec.from_pairs(
        beta=[1.0, -1.0],
        alpha=[0.0, 0.0],
        pairs={(0, 1): 0.5 + 0.0j},
    )


PRESET_NAMES = ("fig1", "fig1-decoupled", "fig4", "lz2")


def preset_model(name: str, epsilon: float | None = None) -> ModelSpec:
    """Look up a preset; ``epsilon`` applies to ``fig4`` only (default 0.5)."""
    if name == "fig1":
        return five_state_band()
    if name == "fig1-decoupled":
        return five_state_band_decoupled()
    if name == "fig4":
        return four_state_band_gap(0.5 if epsilon is None else epsilon)
    if name == "lz2":
        return two_state()
    raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")


def preset_text(name: str, epsilon: float | None = None) -> str:
    """Model file text for a preset."""
    spec = preset_model(name, epsilon)
    label = name if epsilon is None or name != "fig4" else f"{name} epsilon={epsilon:g}"
    return format_model(spec, comment=f"preset {label}")


def default_window(name: str) -> float | None:
    """Window half-width used by convention for each preset (None = auto)."""
    if name in ("fig1", "fig1-decoupled"):
        return 500.0
    if name == "fig4":
        return 600.0
    return None
