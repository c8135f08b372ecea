"""Finite-window scattering matrices assembled column by column.

Column j of the matrix is the final interaction-frame state of a run that
starts in basis state j at -T and ends at +T.  Magnitudes (and therefore
all probabilities) are frame independent; the stored amplitude phases are
interaction-frame quantities and change under frame conventions, so only
use them through :func:`lab_frame_amplitudes` when comparing bases.

Columns are propagated independently (optionally on a thread pool; the
stepper releases the GIL) and each column is bit-reproducible regardless
of scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import ModelSpec, require_canonical
from .propagator import (IntegratorConfig, IntegratorError, StateVector,
                         propagate)

__all__ = [
    "ScatteringMatrix",
    "SaturationReport",
    "ColumnError",
    "scattering_matrix",
    "saturation_check",
    "lab_frame_amplitudes",
    "write_probability_csv",
    "write_amplitude_csv",
]


class ColumnError(IntegratorError):
    """Propagation failure tagged with the failing column (0-based)."""

    def __init__(self, column: int, cause: Exception):
        super().__init__(f"column {column + 1} failed: {cause}")
        self.column = column
        self.cause = cause


@dataclass(frozen=True)
class ScatteringMatrix:
    """Asymptotic amplitudes over a finite window [-T, T].

    ``amplitudes[i, j]`` is the interaction-frame amplitude on state i after
    starting in state j; ``probabilities = |amplitudes|**2`` elementwise.
    ``saturation`` is filled only when a saturation check was requested.
    """

    amplitudes: np.ndarray
    probabilities: np.ndarray
    window: float
    column_norm_drift: np.ndarray
    rhs_evals: int
    saturation: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    def unitarity_defect(self) -> float:
        """max |S^dag S - I|, the global accuracy figure of the matrix."""
        s = self.amplitudes
        return float(np.max(np.abs(s.conj().T @ s - np.eye(self.n))))


def _column(spec, j, t_span, config):
    initial = StateVector.basis(spec.n, j, -t_span)
    return propagate(spec, initial, t_span, config)


def scattering_matrix(spec: ModelSpec, window: float,
                      config: IntegratorConfig = IntegratorConfig(),
                      workers: int | None = None) -> ScatteringMatrix:
    """Propagate every basis column over [-window, +window].

    ``workers=None`` picks min(n, cpu count); ``workers=1`` runs serially.
    Column results are identical either way.
    """
    require_canonical(spec)
    if window <= 0:
        raise ValueError("window must be positive")
    n = spec.n
    if workers is None:
        workers = min(n, os.cpu_count() or 1)

    results: list = [None] * n
    if workers <= 1:
        for j in range(n):
            try:
                results[j] = _column(spec, j, window, config)
            except IntegratorError as exc:
                raise ColumnError(j, exc) from exc
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {j: pool.submit(_column, spec, j, window, config)
                       for j in range(n)}
            for j in range(n):
                try:
                    results[j] = futures[j].result()
                except IntegratorError as exc:
                    raise ColumnError(j, exc) from exc

    amplitudes = np.empty((n, n), dtype=complex)
    drifts = np.empty(n)
    nfev = 0
    for j, res in enumerate(results):
        amplitudes[:, j] = res.final_state.amps
        drifts[j] = res.norm_drift
        nfev += res.rhs_evals
    return ScatteringMatrix(
        amplitudes=amplitudes,
        probabilities=np.abs(amplitudes) ** 2,
        window=float(window),
        column_norm_drift=drifts,
        rhs_evals=nfev,
    )


@dataclass(frozen=True)
class SaturationReport:
    """Window-doubling comparison for one column.

    Entry i is saturated when ``|P_i(T) - P_i(2T)| < max(1e-6, 1e-3 * P_i(2T))``;
    the residual tail decays like 1/T, so a surviving relative difference
    between T and 2T marks entries still drifting toward their limits.
    """

    column: int
    window: float
    probabilities_t: np.ndarray
    probabilities_2t: np.ndarray
    deltas: np.ndarray
    saturated: np.ndarray


def saturation_check(spec: ModelSpec, column: int, window: float,
                     config: IntegratorConfig = IntegratorConfig()) -> SaturationReport:
    """Run column at windows T and 2T and flag entries that have converged."""
    require_canonical(spec)
    if not (0 <= column < spec.n):
        raise IndexError(f"column {column} out of range for n={spec.n}")
    try:
        p_t = _column(spec, column, window, config).final_state.probabilities
        p_2t = _column(spec, column, 2.0 * window, config).final_state.probabilities
    except IntegratorError as exc:
        raise ColumnError(column, exc) from exc
    deltas = np.abs(p_t - p_2t)
    saturated = deltas < np.maximum(1e-6, 1e-3 * p_2t)
    return SaturationReport(
        column=column,
        window=float(window),
        probabilities_t=p_t,
        probabilities_2t=p_2t,
        deltas=deltas,
        saturated=saturated,
    )


def lab_frame_amplitudes(spec: ModelSpec, matrix: ScatteringMatrix) -> np.ndarray:
    """Translate interaction-frame amplitudes into the lab frame.

    With ``Phi(t) = diag(exp(+1j*(beta t^2/2 + alpha t)))``, the lab-frame
    full-window propagator is ``Phi(T)^dag @ S @ Phi(-T)``.  Probabilities
    are unchanged; this is for phase-sensitive comparisons such as mapping
    results between a model and its canonicalized form.
    """
    t = matrix.window
    phi_plus = np.exp(1j * (spec.beta * 0.5 * t * t + spec.alpha * t))
    phi_minus = np.exp(1j * (spec.beta * 0.5 * t * t - spec.alpha * t))
    return (phi_plus.conj()[:, None] * matrix.amplitudes) * phi_minus[None, :]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_probability_csv(matrix: ScatteringMatrix, path) -> None:
    """N x N probability block: entry (row i, column j) is |S_ij|^2."""
    n = matrix.n
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("S_ij_prob," + ",".join(f"j{j + 1}" for j in range(n)) + "\n")
        for i in range(n):
            fh.write(f"i{i + 1},"
                     + ",".join(_fmt(float(p)) for p in matrix.probabilities[i])
                     + "\n")


def write_amplitude_csv(matrix: ScatteringMatrix, path) -> None:
    """Companion file: amplitudes as (re, im) column pairs."""
    n = matrix.n
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("S_ij_amp,"
                 + ",".join(f"j{j + 1}_re,j{j + 1}_im" for j in range(n)) + "\n")
        for i in range(n):
            cells = []
            for j in range(n):
                amp = matrix.amplitudes[i, j]
                cells.append(_fmt(amp.real))
                cells.append(_fmt(amp.imag))
            fh.write(f"i{i + 1}," + ",".join(cells) + "\n")
