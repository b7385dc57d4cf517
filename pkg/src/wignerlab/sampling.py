"""Random states, random unitaries, and Wigner values.

Complex normal convention: real and imaginary parts of every Ginibre entry
are independent standard normals (each variance 1), so |z_ij|^2 is
chi-square with 2 degrees of freedom and mean 2.

Ginibre draws consume 2 N^2 standard normals per matrix in a fixed order:
row-major over entries, real part then imaginary part.  The batch variants
draw sample-major in the same per-matrix order, so a batch of one is
bit-identical to a single draw from the same stream.
"""
from __future__ import annotations

import numpy as np

from .kernels import KernelSpectrum

__all__ = [
    "sample_ginibre",
    "ginibre_batch",
    "hs_state",
    "sample_row_energies",
    "row_energies_batch",
    "haar_unitary",
    "haar_batch",
    "wigner_value",
]


def ginibre_batch(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of `count` Ginibre matrices, shape (count, n, n) complex."""
    g = rng.standard_normal((count, n, n, 2))
    return g[..., 0] + 1j * g[..., 1]


def sample_ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    """One n x n Ginibre matrix: i.i.d. standard-normal real and imaginary parts."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return ginibre_batch(1, n, rng)[0]


def hs_state(z: np.ndarray) -> np.ndarray:
    """Density matrix z^dagger z / tr(z^dagger z) of a Hilbert-Schmidt-random state.

    Hermitian, unit trace, and positive semidefinite by construction.
    """
    z = np.asarray(z)
    w = z.conj().T @ z
    tr = np.trace(w).real
    if tr <= 0.0:
        raise ValueError("cannot normalize the zero matrix to a state")
    return w / tr


def row_energies_batch(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """`count` rows of n independent gamma(shape=n, scale=2) deviates."""
    return rng.gamma(float(n), 2.0, size=(count, n))


def sample_row_energies(n: int, rng: np.random.Generator) -> np.ndarray:
    """Diagonal of z z^dagger without materializing z.

    Each row energy sums n squared moduli of complex-normal entries, i.e. n
    chi-square(2) terms, which is exactly a gamma(shape=n, scale=2) deviate,
    so the n diagonal entries are sampled directly.
    """
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return row_energies_batch(1, n, rng)[0]


def haar_batch(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of `count` Haar-random unitaries, shape (count, n, n)."""
    z = ginibre_batch(count, n, rng)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    # fix the QR gauge: rotate columns so R has positive real diagonal
    q = q * (d / np.abs(d))[:, None, :]
    return q


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary via QR of a Ginibre matrix with phase fix."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return haar_batch(1, n, rng)[0]


def wigner_value(rho: np.ndarray, spectrum: KernelSpectrum, unitary: np.ndarray) -> float:
    """Wigner-type symbol of the state `rho` at the phase-space point `unitary`.

    Evaluates tr(rho U P U^dagger) with P the diagonal matrix of the kernel
    eigenvalues in decreasing order.  The result is real for Hermitian rho;
    an imaginary residue beyond 1e-10 raises.
    """
    rho = np.asarray(rho)
    unitary = np.asarray(unitary)
    n = spectrum.dimension
    if rho.shape != (n, n) or unitary.shape != (n, n):
        raise ValueError(
            f"dimension mismatch: state {rho.shape}, point {unitary.shape}, kernel N={n}"
        )
    p = spectrum.expanded()
    value = complex(np.einsum("ij,jk,k,ik->", rho, unitary, p, unitary.conj()))
    if abs(value.imag) > 1e-10:
        raise ValueError(f"imaginary residue {value.imag:.3e} exceeds 1e-10; state not Hermitian?")
    return value.real
