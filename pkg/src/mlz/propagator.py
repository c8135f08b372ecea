"""Adaptive propagation of i da/dt = H(t) a over finite symmetric windows.

Integration happens in the interaction frame: each component carries
``a_i(t) = exp(+1j * (beta_i t^2/2 + alpha_i t)) * psi_i(t)``, which removes
the fast diagonal phases and leaves bounded oscillatory couplings.  The
frame change is a pure per-component phase, so ``|a_i| == |psi_i|`` and
probabilities read directly off the frame amplitudes.

The stepper is an embedded Dormand-Prince 5(4) pair with a quartic
dense-output interpolant.  The local error estimate per step is held below
``atol + rtol * ||a||``; on top of that the step size is capped so that no
coupling phase advances more than a quarter turn per step, which keeps the
error estimator honest at large |t|.  The state is never renormalized;
norm drift is reported as a global accuracy diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _stepper
from .model import ModelSpec, require_canonical

__all__ = [
    "StateVector",
    "IntegratorConfig",
    "PropagationResult",
    "IntegratorError",
    "StepSizeUnderflow",
    "NonFiniteState",
    "rhs",
    "propagate",
    "choose_window",
    "write_timeseries_csv",
]


class IntegratorError(RuntimeError):
    """Base class for propagation failures."""


class StepSizeUnderflow(IntegratorError):
    """The controller drove the step below 1e-14 of the window span."""


class NonFiniteState(IntegratorError):
    """An amplitude overflowed or became NaN during propagation."""


@dataclass(frozen=True)
class StateVector:
    """Interaction-frame amplitudes at one instant."""

    t: float
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, n: int, k: int, t: float) -> "StateVector":
        """Unit population in diabatic state k (0-based) at time t."""
        amps = np.zeros(n, dtype=complex)
        amps[k] = 1.0
        return cls(t=t, amps=amps)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float | None = None
    initial_step: float | None = None
    sample_count: int = 2000

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("rtol and atol must be positive")
        if self.sample_count < 2:
            raise ValueError("sample_count must be >= 2")


@dataclass(frozen=True)
class PropagationResult:
    """Sampled probabilities plus the final state and run diagnostics."""

    times: np.ndarray
    probabilities: np.ndarray
    final_state: StateVector
    norm_drift: float
    rhs_evals: int
    accepted_steps: int
    rejected_steps: int

    @property
    def samples(self) -> list[tuple[float, np.ndarray]]:
        return [(float(t), row) for t, row in
                zip(self.times, self.probabilities)]


def _pair_arrays(spec: ModelSpec):
    idx_i, idx_j, g = [], [], []
    for i in range(spec.n):
        for j in range(i + 1, spec.n):
            if spec.coupling[i, j] != 0:
                idx_i.append(i)
                idx_j.append(j)
                g.append(spec.coupling[i, j])
    return (np.array(idx_i, dtype=np.int64),
            np.array(idx_j, dtype=np.int64),
            np.array(g, dtype=np.complex128))


def rhs(spec: ModelSpec, state: StateVector) -> np.ndarray:
    """Interaction-frame derivative da/dt at the state's time.

    ``da_i/dt = -1j * sum_j coupling[i][j]
                * exp(1j*((beta_i-beta_j) t^2/2 + (alpha_i-alpha_j) t)) * a_j``
    """
    require_canonical(spec)
    pair_i, pair_j, pair_g = _pair_arrays(spec)
    pair_db = spec.beta[pair_i] - spec.beta[pair_j]
    pair_da = spec.alpha[pair_i] - spec.alpha[pair_j]
    out = np.empty(spec.n, dtype=np.complex128)
    _stepper.rhs_kernel(float(state.t), np.ascontiguousarray(state.amps),
                        out, pair_i, pair_j, pair_g, pair_db, pair_da)
    return out


def propagate(spec: ModelSpec, initial: StateVector, t_final: float,
              config: IntegratorConfig = IntegratorConfig()) -> PropagationResult:
    """Propagate ``initial`` to ``t_final`` (backward runs allowed).

    Raises StepSizeUnderflow or NonFiniteState on integrator failure.
    """
    require_canonical(spec)
    if initial.amps.shape != (spec.n,):
        raise ValueError(
            f"state has {initial.amps.shape[0]} amplitudes, model has {spec.n}")
    if t_final == initial.t:
        raise ValueError("t_final must differ from the initial time")
    if not np.all(np.isfinite(initial.amps.view(float))):
        raise NonFiniteState("initial state contains non-finite amplitudes")

    pair_i, pair_j, pair_g = _pair_arrays(spec)
    sample_ts = np.linspace(initial.t, t_final, config.sample_count)
    sample_probs = np.empty((config.sample_count, spec.n), dtype=float)

    a_final, drift, nfev, nacc, nrej, status = _stepper.dp45_propagate(
        spec.beta, spec.alpha, pair_i, pair_j, pair_g,
        float(initial.t), float(t_final),
        np.ascontiguousarray(initial.amps, dtype=np.complex128),
        config.rtol, config.atol,
        -1.0 if config.max_step is None else float(config.max_step),
        -1.0 if config.initial_step is None else float(config.initial_step),
        sample_ts, sample_probs)

    if status == _stepper.STATUS_UNDERFLOW:
        raise StepSizeUnderflow(
            f"step size underflow near t={initial.t:+g}..{t_final:+g}; "
            "the model is pathological at the requested tolerances")
    if status == _stepper.STATUS_NONFINITE:
        raise NonFiniteState("amplitudes became non-finite during propagation")

    return PropagationResult(
        times=sample_ts,
        probabilities=sample_probs,
        final_state=StateVector(t=float(t_final), amps=a_final),
        norm_drift=float(drift),
        rhs_evals=int(nfev),
        accepted_steps=int(nacc),
        rejected_steps=int(nrej),
    )


_MARGIN_CYCLES = 50.0


def choose_window(spec: ModelSpec, margin: float | None = None) -> float:
    """Half-width T of a symmetric window [-T, T] covering all crossings.

    T is the latest pairwise crossing time plus a margin.  The default
    margin makes every coupled cross-band phase advance by at least 50
    cycles beyond its own crossing (the phase of pair (i,j) grows as
    |beta_i - beta_j| (t - t_cross)^2 / 2), which puts the window well into
    the saturation regime.
    """
    require_canonical(spec)
    latest = 0.0
    any_cross = False
    for i in range(spec.n):
        for j in range(i + 1, spec.n):
            dbeta = spec.beta[i] - spec.beta[j]
            if dbeta == 0:
                continue
            any_cross = True
            t_cross = abs((spec.alpha[j] - spec.alpha[i]) / dbeta)
            latest = max(latest, t_cross)
    if not any_cross:
        raise ValueError("all slopes are equal; no crossings define a window")
    if margin is None:
        pair_db = []
        for i in range(spec.n):
            for j in range(i + 1, spec.n):
                if spec.coupling[i, j] != 0 and spec.beta[i] != spec.beta[j]:
                    pair_db.append(abs(spec.beta[i] - spec.beta[j]))
        if not pair_db:
            margin = 1.0
        else:
            margin = math.sqrt(2.0 * _MARGIN_CYCLES * 2.0 * math.pi / min(pair_db))
    return latest + margin


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_timeseries_csv(result: PropagationResult, path) -> None:
    """CSV with header ``t,P1,...,PN`` and one row per sample."""
    n = result.probabilities.shape[1]
    header = "t," + ",".join(f"P{i + 1}" for i in range(n))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for t, row in zip(result.times, result.probabilities):
            fh.write(_fmt(float(t)) + ","
                     + ",".join(_fmt(float(p)) for p in row) + "\n")
