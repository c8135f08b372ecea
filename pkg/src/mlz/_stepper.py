"""Compiled Dormand-Prince 5(4) core for the interaction-frame equation.

The right-hand side couples amplitude pairs through phases that rotate at a
rate growing linearly in |t|; at the windows of interest (|t| ~ 500) a run
takes millions of steps, so the whole stepping loop lives in one nopython
kernel.  Everything here works on plain arrays; the user-facing wrappers are
in :mod:`mlz.propagator`.
"""

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_NONFINITE = 2

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
# Difference between the 5th- and embedded 4th-order weights.
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)

# Quartic dense-output interpolant (Shampine); row s, powers x^1..x^4.
_P = np.array([
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0],
])

_QUARTER_TURN = 0.25 * 2.0 * np.pi


@njit(cache=True, nogil=True)
def rhs_kernel(t, a, out, pair_i, pair_j, pair_g, pair_db, pair_da):
    """da/dt in the interaction frame, accumulated pair by pair."""
    n = a.shape[0]
    for k in range(n):
        out[k] = 0.0 + 0.0j
    half_t2 = 0.5 * t * t
    for p in range(pair_i.shape[0]):
        i = pair_i[p]
        j = pair_j[p]
        theta = pair_db[p] * half_t2 + pair_da[p] * t
        phase = complex(np.cos(theta), np.sin(theta))
        gp = pair_g[p] * phase
        # -1i * gp * a[j] without forming a temporary complex literal
        out[i] += complex(gp.imag, -gp.real) * a[j]
        gc = np.conj(gp)
        out[j] += complex(gc.imag, -gc.real) * a[i]
    return out


@njit(cache=True, nogil=True)
def phase_step_cap(t, pair_db, pair_da):
    """Largest step that keeps every coupling phase under a quarter turn."""
    cap = 1.0e300
    for p in range(pair_db.shape[0]):
        rate = abs(pair_db[p]) * abs(t) + abs(pair_da[p]) + 1e-12
        h = _QUARTER_TURN / rate
        if h < cap:
            cap = h
    return cap


@njit(cache=True, nogil=True)
def dp45_propagate(beta, alpha, pair_i, pair_j, pair_g, t0, t1, a0,
                   rtol, atol, max_step, initial_step,
                   sample_ts, sample_probs):
    """Adaptive propagation from t0 to t1 with dense-output sampling.

    max_step <= 0 means "auto only"; initial_step <= 0 selects one.
    sample_ts must run from t0 to t1 in the direction of integration;
    sample_probs is (len(sample_ts), n) and is filled in place.

    Returns (a_final, norm_drift, rhs_evals, accepted, rejected, status).
    """
    n = a0.shape[0]
    npair = pair_i.shape[0]
    pair_db = np.empty(npair)
    pair_da = np.empty(npair)
    for p in range(npair):
        pair_db[p] = beta[pair_i[p]] - beta[pair_j[p]]
        pair_da[p] = alpha[pair_i[p]] - alpha[pair_j[p]]

    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)

    a = a0.copy()
    k1 = np.empty(n, np.complex128)
    k2 = np.empty(n, np.complex128)
    k3 = np.empty(n, np.complex128)
    k4 = np.empty(n, np.complex128)
    k5 = np.empty(n, np.complex128)
    k6 = np.empty(n, np.complex128)
    k7 = np.empty(n, np.complex128)
    ytmp = np.empty(n, np.complex128)

    norm0 = 0.0
    for i in range(n):
        norm0 += a[i].real * a[i].real + a[i].imag * a[i].imag
    drift = 0.0

    nsamp = sample_ts.shape[0]
    cursor = 0
    while cursor < nsamp and (sample_ts[cursor] - t0) * direction <= 0.0:
        for i in range(n):
            sample_probs[cursor, i] = (a[i].real * a[i].real
                                       + a[i].imag * a[i].imag)
        cursor += 1

    rhs_kernel(t0, a, k1, pair_i, pair_j, pair_g, pair_db, pair_da)
    nfev = 1
    nacc = 0
    nrej = 0

    h = initial_step
    if h <= 0.0:
        h = span * 1e-3
        cap0 = phase_step_cap(t0, pair_db, pair_da)
        if h > cap0:
            h = cap0
    if max_step > 0.0 and h > max_step:
        h = max_step

    t = t0
    blown_up = False
    while (t1 - t) * direction > 0.0:
        cap = phase_step_cap(t, pair_db, pair_da)
        if max_step > 0.0 and cap > max_step:
            cap = max_step
        if h > cap:
            h = cap
        remaining = (t1 - t) * direction
        if h > remaining:
            h = remaining
        if h < 1e-14 * span:
            if blown_up:
                return a, drift, nfev, nacc, nrej, STATUS_NONFINITE
            return a, drift, nfev, nacc, nrej, STATUS_UNDERFLOW
        hs = h * direction

        for i in range(n):
            ytmp[i] = a[i] + hs * (_A21 * k1[i])
        rhs_kernel(t + _C2 * hs, ytmp, k2, pair_i, pair_j, pair_g,
                   pair_db, pair_da)
        for i in range(n):
            ytmp[i] = a[i] + hs * (_A31 * k1[i] + _A32 * k2[i])
        rhs_kernel(t + _C3 * hs, ytmp, k3, pair_i, pair_j, pair_g,
                   pair_db, pair_da)
        for i in range(n):
            ytmp[i] = a[i] + hs * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        rhs_kernel(t + _C4 * hs, ytmp, k4, pair_i, pair_j, pair_g,
                   pair_db, pair_da)
        for i in range(n):
            ytmp[i] = a[i] + hs * (_A51 * k1[i] + _A52 * k2[i]
                                   + _A53 * k3[i] + _A54 * k4[i])
        rhs_kernel(t + _C5 * hs, ytmp, k5, pair_i, pair_j, pair_g,
                   pair_db, pair_da)
        for i in range(n):
            ytmp[i] = a[i] + hs * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                                   + _A64 * k4[i] + _A65 * k5[i])
        rhs_kernel(t + hs, ytmp, k6, pair_i, pair_j, pair_g, pair_db, pair_da)
        for i in range(n):
            ytmp[i] = a[i] + hs * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i]
                                   + _B5 * k5[i] + _B6 * k6[i])
        rhs_kernel(t + hs, ytmp, k7, pair_i, pair_j, pair_g, pair_db, pair_da)
        nfev += 6

        new_norm = 0.0
        err_sq = 0.0
        for i in range(n):
            new_norm += ytmp[i].real * ytmp[i].real + ytmp[i].imag * ytmp[i].imag
            e = hs * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i]
                      + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i])
            err_sq += e.real * e.real + e.imag * e.imag
        scale = atol + rtol * np.sqrt(new_norm)
        err = np.sqrt(err_sq) / scale

        if err <= 1.0:
            blown_up = False
            t_new = t + hs
            if remaining == h:
                t_new = t1
            ok = True
            for i in range(n):
                if not (np.isfinite(ytmp[i].real) and np.isfinite(ytmp[i].imag)):
                    ok = False
            if not ok:
                return a, drift, nfev, nacc, nrej, STATUS_NONFINITE

            while cursor < nsamp and (sample_ts[cursor] - t_new) * direction <= 0.0:
                x = (sample_ts[cursor] - t) / hs
                x2 = x * x
                x3 = x2 * x
                x4 = x3 * x
                b1 = _P[0, 0] * x + _P[0, 1] * x2 + _P[0, 2] * x3 + _P[0, 3] * x4
                b3 = _P[2, 0] * x + _P[2, 1] * x2 + _P[2, 2] * x3 + _P[2, 3] * x4
                b4 = _P[3, 0] * x + _P[3, 1] * x2 + _P[3, 2] * x3 + _P[3, 3] * x4
                b5 = _P[4, 0] * x + _P[4, 1] * x2 + _P[4, 2] * x3 + _P[4, 3] * x4
                b6 = _P[5, 0] * x + _P[5, 1] * x2 + _P[5, 2] * x3 + _P[5, 3] * x4
                b7 = _P[6, 0] * x + _P[6, 1] * x2 + _P[6, 2] * x3 + _P[6, 3] * x4
                for i in range(n):
                    yi = a[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i]
                                      + b5 * k5[i] + b6 * k6[i] + b7 * k7[i])
                    sample_probs[cursor, i] = (yi.real * yi.real
                                               + yi.imag * yi.imag)
                cursor += 1

            t = t_new
            for i in range(n):
                a[i] = ytmp[i]
                k1[i] = k7[i]
            nacc += 1
            d = abs(new_norm - norm0)
            if d > drift:
                drift = d
            if err == 0.0:
                factor = 10.0
            else:
                factor = 0.9 * err ** -0.2
                if factor > 10.0:
                    factor = 10.0
            h = h * factor
        else:
            nrej += 1
            if np.isfinite(err):
                blown_up = False
                factor = 0.9 * err ** -0.2
                if factor < 0.2:
                    factor = 0.2
            else:
                # Overflow/NaN in the trial step: shrink hard; if the step
                # size underflows while this persists, report a blow-up.
                blown_up = True
                factor = 0.2
            h = h * factor

    # Roundoff stragglers: report the final state for any unsampled times.
    while cursor < nsamp:
        for i in range(n):
            sample_probs[cursor, i] = (a[i].real * a[i].real
                                       + a[i].imag * a[i].imag)
        cursor += 1

    return a, drift, nfev, nacc, nrej, STATUS_OK
