"""Closed-form predictions for linear level-crossing models.

Three independent handles on the numerics live here:

* ``be_survival`` - the product-of-crossings survival amplitude for a state
  whose slope is the extreme (largest or smallest) among all distinct
  slopes.  Each crossed level contributes a two-state Landau-Zener factor;
  states sharing the extreme slope contribute nothing in canonical form.
* ``nogo_prediction`` - the set of within-band transitions expected to
  carry exactly zero asymptotic probability (the counterintuitive ones).
* ``do_oracle`` - exact asymptotic probabilities for the one-sloped-level
  geometry (a single tilted level crossing a ladder of parallel levels),
  where path probabilities compose without interference.
* ``asymptotic_eigenenergy`` - adiabatic eigenvalue of H(t) to first order
  in 1/t, for checking against exact diagonalization at large |t|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (Band, BandKind, ModelSpec, TransitionClass, bands,
                    classify_transition, require_canonical)

__all__ = [
    "BEPrediction",
    "DOGeometry",
    "be_survival",
    "nogo_prediction",
    "do_oracle",
    "asymptotic_eigenenergy",
]


@dataclass(frozen=True)
class BEPrediction:
    """Survival amplitude of an extreme-slope state.

    ``survival_amplitude = exp(-exponent)`` with
    ``exponent = pi * sum_i |coupling[k][i]|^2 / |beta_k - beta_i|`` over all
    states i with a different slope.  The survival probability is the
    square of the amplitude.
    """

    state: int
    survival_amplitude: float
    exponent: float

    @property
    def survival_probability(self) -> float:
        return self.survival_amplitude ** 2


def be_survival(spec: ModelSpec, k: int) -> BEPrediction:
    """Closed-form survival amplitude for state k (0-based).

    Only claimed, and only evaluated, when beta[k] is the maximum or
    minimum of the distinct slopes; anywhere else exponentially growing
    companions invalidate the product picture, so this refuses rather than
    extrapolate.
    """
    require_canonical(spec)
    if not (0 <= k < spec.n):
        raise IndexError(f"state {k} out of range for n={spec.n}")
    distinct = np.unique(spec.beta)
    if spec.beta[k] not in (distinct.max(), distinct.min()):
        raise ValueError(
            f"state {k + 1} has slope {spec.beta[k]:g}, which is neither the "
            "largest nor the smallest slope; the survival formula is not "
            "valid there")
    exponent = 0.0
    for i in range(spec.n):
        if spec.beta[i] != spec.beta[k]:
            exponent += (abs(spec.coupling[k, i]) ** 2
                         / abs(spec.beta[k] - spec.beta[i]))
    exponent *= math.pi
    return BEPrediction(state=k, survival_amplitude=math.exp(-exponent),
                        exponent=exponent)


def nogo_prediction(spec: ModelSpec) -> frozenset[tuple[int, int]]:
    """Ordered (source, target) pairs predicted to have zero probability.

    These are exactly the counterintuitive within-band transitions of the
    extreme bands.  The matrix entry for pair (m, n) is
    ``probabilities[n, m]`` (column = source).
    """
    require_canonical(spec)
    if len({float(b) for b in spec.beta}) < 2:
        raise ValueError("need at least two distinct slopes")
    pairs = set()
    for band in bands(spec):
        if band.kind not in (BandKind.MAX_SLOPE, BandKind.MIN_SLOPE):
            continue
        for m in band.members:
            for n in band.members:
                if m == n or spec.alpha[m] == spec.alpha[n]:
                    continue
                if (classify_transition(spec, m, n)
                        is TransitionClass.COUNTERINTUITIVE):
                    pairs.add((m, n))
    return frozenset(pairs)


@dataclass(frozen=True)
class DOGeometry:
    """One tilted level crossing a band of parallel levels.

    State 0 is the tilted level (slope ``sloped_slope``, offset
    ``sloped_offset``); states 1..M are the band members with common slope
    ``band_slope`` and strictly increasing ``band_offsets``.  ``couplings``
    holds the tilted-to-member matrix elements.
    """

    sloped_slope: float
    sloped_offset: float
    band_slope: float
    band_offsets: tuple[float, ...]
    couplings: tuple[complex, ...]

    def __post_init__(self):
        if self.sloped_slope == self.band_slope:
            raise ValueError("tilted level must have a different slope")
        if len(self.band_offsets) != len(self.couplings):
            raise ValueError("one coupling per band member required")
        if len(self.band_offsets) == 0:
            raise ValueError("band must contain at least one level")
        offs = self.band_offsets
        if any(offs[i] >= offs[i + 1] for i in range(len(offs) - 1)):
            raise ValueError("band offsets must be strictly increasing")
        if not all(np.isfinite(g) for g in self.couplings):
            raise ValueError("couplings must be finite")

    @property
    def n(self) -> int:
        return 1 + len(self.band_offsets)

    def as_model(self) -> ModelSpec:
        """Equivalent ModelSpec (state 0 tilted, 1..M the band)."""
        beta = np.array([self.sloped_slope]
                        + [self.band_slope] * len(self.band_offsets))
        alpha = np.array([self.sloped_offset] + list(self.band_offsets))
        pairs = {(0, m + 1): g for m, g in enumerate(self.couplings)}
        return ModelSpec.from_pairs(beta, alpha, pairs)

    def crossing_order(self) -> list[int]:
        """Band members (1-based state ids) in the order they are crossed.

        The tilted level meets member m at
        ``t_m = (offset_m - sloped_offset) / (sloped_slope - band_slope)``;
        the sign of the slope difference decides whether the ladder is
        climbed upward or downward in offset.
        """
        ids = list(range(1, self.n))
        if self.sloped_slope > self.band_slope:
            return ids  # ascending offsets <=> ascending crossing times
        return ids[::-1]


def do_oracle(geom: DOGeometry, start: int) -> np.ndarray:
    """Exact asymptotic probabilities for the one-tilted-level geometry.

    Every crossing is an isolated two-state event with survival
    ``p_m = exp(-2 pi |g_m|^2 / |slope difference|)``; probabilities compose
    as ordered products along the single crossing sequence, and band-to-band
    moves against the crossing order are impossible (probability exactly 0).
    """
    if not (0 <= start < geom.n):
        raise IndexError(f"state {start} out of range for n={geom.n}")
    gap = abs(geom.sloped_slope - geom.band_slope)
    p = {m: math.exp(-2.0 * math.pi * abs(geom.couplings[m - 1]) ** 2 / gap)
         for m in range(1, geom.n)}
    order = geom.crossing_order()
    out = np.zeros(geom.n)

    if start == 0:
        # Successive leaks off the tilted level, computed as differences so
        # the probabilities telescope to exactly 1.
        remaining = 1.0
        for m in order:
            stay = remaining * p[m]
            out[m] = remaining - stay
            remaining = stay
        out[0] = remaining
        return out

    pos = order.index(start)
    later = order[pos + 1:]
    stay = p[start]
    out[start] = stay
    remaining = 1.0 - stay  # on the tilted level after the first crossing
    for m in later:
        keep = remaining * p[m]
        out[m] = remaining - keep
        remaining = keep
    out[0] = remaining
    return out


def asymptotic_eigenenergy(spec: ModelSpec, k: int, t: float) -> float:
    """Adiabatic eigenvalue of H(t) tracking state k, to first order in 1/t.

    ``beta_k t + alpha_k + sum_i |coupling[k][i]|^2 / ((beta_k - beta_i) t)``
    over states with a different slope.  Valid once every pair of levels is
    far from degeneracy; requires
    ``|t| > 10 * max_pairs (|alpha_i - alpha_j| + 2 |coupling[i][j]|) / |beta_i - beta_j|``
    and matches exact diagonalization with an error falling off as 1/t^2.
    """
    require_canonical(spec)
    if not (0 <= k < spec.n):
        raise IndexError(f"state {k} out of range for n={spec.n}")
    t_min = 0.0
    for i in range(spec.n):
        for j in range(i + 1, spec.n):
            dbeta = abs(spec.beta[i] - spec.beta[j])
            if dbeta == 0:
                continue
            t_min = max(t_min, (abs(spec.alpha[i] - spec.alpha[j])
                                + 2.0 * abs(spec.coupling[i, j])) / dbeta)
    if abs(t) <= 10.0 * t_min:
        raise ValueError(
            f"|t|={abs(t):g} too small for the asymptotic expansion; "
            f"need |t| > {10.0 * t_min:g}")
    energy = spec.beta[k] * t + spec.alpha[k]
    for i in range(spec.n):
        if spec.beta[i] != spec.beta[k]:
            energy += (abs(spec.coupling[k, i]) ** 2
                       / ((spec.beta[k] - spec.beta[i]) * t))
    return float(energy)
