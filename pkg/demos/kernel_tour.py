#!/usr/bin/env python3
"""Tour of the kernel spectra this package works with.

Walks through the two-block family for a few dimensions, checks the two
trace constraints that every admissible spectrum must satisfy, and shows
that a negative eigenvalue is always present.  Ends with a couple of
randomly generated spectra to show the constraints are not special to
the closed-form family.
"""
import numpy as np

from wignerlab import (
    master_residuals,
    random_spectrum,
    two_block_spectrum,
)


def describe(spec):
    r1, r2 = master_residuals(spec)
    parts = ", ".join(f"{v:+.6f} x{m}" for v, m in spec.eigenvalues)
    print(f"  N={spec.dimension:<4d} {spec.label:<16s} [{parts}]")
    print(f"        residuals: trace={r1:+.2e}, purity={r2:+.2e}, "
          f"min eigenvalue={spec.values[-1]:+.6f}")


def main():
    print("Two-block family (k levels share the negative eigenvalue):")
    for n, k in [(2, 1), (3, 1), (4, 2), (8, 3), (64, 1)]:
        describe(two_block_spectrum(n, k))

    print()
    print("The trace constraints pin the two values exactly; at N=2 the")
    print("family reduces to the unique qubit spectrum (1 +/- sqrt(3))/2:")
    spec = two_block_spectrum(2, 1)
    print(f"  computed: {spec.values}")
    print(f"  exact:    ({(1 + np.sqrt(3)) / 2}, {(1 - np.sqrt(3)) / 2})")

    print()
    print("Random spectra satisfying the same constraints:")
    rng = np.random.default_rng(2024)
    for n in (3, 5, 16):
        describe(random_spectrum(n, rng))

    print()
    print("Every admissible spectrum has at least one negative eigenvalue;")
    print("scanning N=2..128, k=1..3 of the two-block family:")
    worst = max(two_block_spectrum(n, k).values[-1]
                for n in range(2, 129) for k in (1, 2, 3) if k <= n - 1)
    print(f"  largest (least negative) bottom eigenvalue found: {worst:+.6f}")
    print("  all negative" if worst < 0 else "  VIOLATION")


if __name__ == "__main__":
    main()
