#!/usr/bin/env python3
"""The three analytic routes to the negativity probability, side by side.

For two-block kernels there is a closed form in terms of the regularized
incomplete beta function.  For arbitrary kernels there is a numerical
characteristic-function inversion.  And in the large-N limit everything
collapses to a single Gaussian tail value.  This script shows the three
agreeing with each other wherever their domains overlap.
"""
import numpy as np

from wignerlab import (
    cf_inversion_exact,
    clt_probability,
    limit_quantumness,
    random_spectrum,
    two_block_exact,
    two_block_spectrum,
)


def main():
    limit = limit_quantumness()
    print(f"large-N limit: {limit.value:.15f}  (method={limit.method})")
    print()

    print("closed form vs characteristic-function inversion, two-block kernels:")
    print(f"{'N':>4s} {'k':>3s} {'beta closed form':>20s} {'cf inversion':>20s} {'diff':>10s}")
    for n, k in [(2, 1), (3, 2), (5, 1), (8, 2), (16, 3), (32, 1)]:
        beta = two_block_exact(n, k).value
        cf = cf_inversion_exact(two_block_spectrum(n, k)).value
        print(f"{n:>4d} {k:>3d} {beta:>20.15f} {cf:>20.15f} {abs(beta - cf):>10.2e}")

    print()
    print("cf inversion on random spectra (no closed form exists here):")
    rng = np.random.default_rng(5)
    for n in (3, 6, 12):
        spec = random_spectrum(n, rng)
        result = cf_inversion_exact(spec)
        print(f"  N={n:<3d} value={result.value:.12f} "
              f"est_err={result.estimated_abs_error:.1e}")

    print()
    print("the reduced Gaussian form is constant in its free parameter and")
    print("equal to the limit:")
    for t in (0.0, 0.5, 2.0, 10.0):
        p = clt_probability(t).value
        print(f"  t={t:<5g} value={p:.15f} |value-limit|={abs(p - limit.value):.1e}")


if __name__ == "__main__":
    main()
