"""Shared fixtures and model generators for the test suite."""

import numpy as np
import pytest

import mlz


@pytest.fixture(scope="session", autouse=True)
def warm_stepper():
    """Trigger kernel compilation once so timed tests measure stepping only."""
    spec = mlz.two_state()
    mlz.propagate(spec, mlz.StateVector.basis(2, 0, -1.0), 1.0,
                  mlz.IntegratorConfig(rtol=1e-6, atol=1e-8, sample_count=2))


def random_canonical_spec(rng, n=None, n_bands=None, band_layout=None,
                          coupling_max=0.8, exponent_range=None,
                          extreme="max"):
    """Draw a canonical model with well-separated slopes.

    band_layout, when given, fixes the number of states per band, ordered
    from the highest slope down.  exponent_range rescales couplings so the
    survival exponent of the extreme band's first state lands inside it
    (keeps survival probabilities measurable).
    """
    if band_layout is None:
        if n is None:
            n = int(rng.integers(2, 7))
        if n_bands is None:
            n_bands = int(rng.integers(2, n + 1))
        sizes = np.ones(n_bands, dtype=int)
        for _ in range(n - n_bands):
            sizes[rng.integers(0, n_bands)] += 1
    else:
        sizes = np.asarray(band_layout, dtype=int)
        n_bands = len(sizes)
        n = int(sizes.sum())

    # Distinct slopes, highest first, with gaps in [0.25, 0.4] so that no
    # pair is near-parallel and the total span stays moderate.
    gaps = rng.uniform(0.25, 0.4, size=n_bands - 1)
    top = rng.uniform(0.2, 1.0)
    slopes = top - np.concatenate(([0.0], np.cumsum(gaps)))

    beta = np.concatenate([np.full(k, s) for s, k in zip(slopes, sizes)])

    # Offsets: distinct within each band (gap >= 0.05) to avoid degeneracies.
    alpha = np.empty(n)
    pos = 0
    for k in sizes:
        for attempt in range(100):
            vals = np.sort(rng.uniform(-0.6, 0.6, size=k))
            if k == 1 or np.min(np.diff(vals)) >= 0.05:
                break
        alpha[pos:pos + k] = vals
        pos += k

    pairs = {}
    for i in range(n):
        for j in range(i + 1, n):
            if beta[i] != beta[j]:
                mag = rng.uniform(0.1, coupling_max)
                phase = rng.uniform(0.0, 2.0 * np.pi)
                pairs[(i, j)] = mag * np.exp(1j * phase)

    spec = mlz.ModelSpec.from_pairs(beta, alpha, pairs)

    if exponent_range is not None:
        k = extreme_band_state(spec, extreme)
        lo, hi = exponent_range
        target = rng.uniform(lo, hi)
        current = mlz.be_survival(spec, k).exponent
        scale = np.sqrt(target / current)
        scale = min(scale, coupling_max / max(abs(g) for g in pairs.values()))
        pairs = {ij: g * scale for ij, g in pairs.items()}
        spec = mlz.ModelSpec.from_pairs(beta, alpha, pairs)
    return spec


def extreme_band_state(spec, which="max"):
    """First member (lowest offset) of the requested extreme band."""
    kind = mlz.BandKind.MAX_SLOPE if which == "max" else mlz.BandKind.MIN_SLOPE
    for band in mlz.bands(spec):
        if band.kind is kind:
            return band.members[0]
    raise AssertionError("spec has no extreme band")
