"""Five-state benchmark: a three-level band crossed by two tilted levels.

Starting from the bottom state of the band, the two within-band transitions
(1 -> 2, 1 -> 3) are classically impossible: no sequence of pairwise level
crossings reaches them.  During the evolution their populations still rise
well above 0.1 -- and then die away, leaving final probabilities orders of
magnitude below everything else.  Meanwhile the survival probability of
state 1 lands on the closed-form product over its crossings.

Run:  python demos/five_state_band.py
Writes five_state_band_timeseries.csv; plot with e.g.
    python -c "import pandas as pd; pd.read_csv('five_state_band_timeseries.csv').plot(x='t', logy=True); import matplotlib.pyplot as plt; plt.show()"
"""

import numpy as np

import mlz


def main():
    spec = mlz.five_state_band()
    print(__doc__.split("\n")[0])
    print()
    print("Band structure:")
    for band in mlz.bands(spec):
        members = ", ".join(str(m + 1) for m in band.members)
        print(f"  slope {band.slope:+.1f}: states [{members}]  ({band.kind.value})")
    print()
    print("Forbidden (counterintuitive) transitions:",
          ", ".join(f"{m + 1}->{n + 1}"
                    for m, n in sorted(mlz.nogo_prediction(spec))))
    print()

    window = 500.0
    config = mlz.IntegratorConfig(sample_count=4000)
    print(f"Propagating from t=-{window:g} to t=+{window:g} "
          f"(rtol {config.rtol:g}) ...")
    result = mlz.propagate(spec, mlz.StateVector.basis(5, 0, -window),
                           window, config)

    p_final = result.final_state.probabilities
    p2, p3 = result.probabilities[:, 1], result.probabilities[:, 2]
    print(f"  norm drift {result.norm_drift:.2e}, "
          f"{result.accepted_steps} steps\n")

    print("Transients of the forbidden entries:")
    print(f"  max P2(t) = {p2.max():.3f}   max P3(t) = {p3.max():.3f}   "
          "(both exceed 0.1 mid-run)")
    print()
    print("Final probabilities:")
    for i, p in enumerate(p_final):
        note = ""
        if i == 0:
            be = mlz.be_survival(spec, 0).survival_probability
            note = f"   <- closed form exp(-2 exponent) = {be:.4f}"
        if i in (1, 2):
            note = "   <- forbidden, finite-window residual"
        print(f"  P{i + 1} = {p:.3e}{note}")

    mlz.write_timeseries_csv(result, "five_state_band_timeseries.csv")
    print("\nWrote five_state_band_timeseries.csv "
          f"({result.times.shape[0]} samples).")

    print("\nControl: decoupling the two upper band states entirely ...")
    control = mlz.propagate(mlz.five_state_band_decoupled(),
                            mlz.StateVector.basis(5, 0, -window), window,
                            mlz.IntegratorConfig())
    pc = control.final_state.probabilities
    print(f"  P4 = {pc[3]:.3f} (was {p_final[3]:.3f}), "
          f"P5 = {pc[4]:.3f} (was {p_final[4]:.3f})")
    print("  The silent band still reshapes the other matrix elements;")
    print(f"  P1 = {pc[0]:.3f} is unchanged, as the closed form demands.")


if __name__ == "__main__":
    main()
