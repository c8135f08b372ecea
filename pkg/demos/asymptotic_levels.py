"""Adiabatic energies at large |t|: first-order tails vs exact eigenvalues.

Far from the crossing region every level is nearly diabatic; the leading
correction to its energy is a sum of coupling-squared over gap terms
falling off as 1/t.  The demo tracks the top level of the five-state
benchmark, comparing the first-order expression against dense Hermitian
diagonalization, and shows the 1/t^2 error decay.

Run:  python demos/asymptotic_levels.py
"""

import numpy as np

import mlz


def main():
    spec = mlz.five_state_band()
    state = 2  # top of the slope-1 band at large positive t

    print(__doc__.split("\n")[0])
    print(f"\nTracking state {state + 1} "
          f"(slope {spec.beta[state]:g}, offset {spec.alpha[state]:g})\n")
    print(f"{'t':>8} {'diabatic':>14} {'first-order':>14} "
          f"{'exact':>14} {'error':>10}")
    errors = {}
    for t in (50.0, 100.0, 200.0, 400.0, 800.0):
        diabatic = spec.beta[state] * t + spec.alpha[state]
        approx = mlz.asymptotic_eigenenergy(spec, state, t)
        exact = np.linalg.eigvalsh(spec.hamiltonian(t))[-1]
        errors[t] = abs(approx - exact)
        print(f"{t:8.0f} {diabatic:14.6f} {approx:14.6f} {exact:14.6f} "
              f"{errors[t]:10.2e}")

    print("\nError ratios between doubled times (expect about 4):")
    for t in (50.0, 100.0, 200.0, 400.0):
        print(f"  err({t:.0f}) / err({2 * t:.0f}) = "
              f"{errors[t] / errors[2 * t]:.2f}")


if __name__ == "__main__":
    main()
