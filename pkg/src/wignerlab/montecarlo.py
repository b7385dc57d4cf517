"""Seeded Monte Carlo estimation of negativity probabilities.

Stream discipline: trials are split into fixed chunks of 2**16 samples;
chunk i draws from ``default_rng(SeedSequence(entropy=seed, spawn_key=(i,)))``
and the reduction is an integer sum of per-chunk negative counts.  Counts
are therefore bit-identical for any worker count, and independent of the
internal sub-batch size because consecutive draws from one generator
concatenate exactly as a single larger draw would.

Fast path: for the diagonal phase-space point the Wigner value of a
Hilbert-Schmidt sample z has the sign of sum_j p_j (z^dagger z)_jj, the
column energies of z, and each column energy is a gamma(shape N, scale 2)
deviate, so no matrix is materialized.
"""
from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .kernels import KernelSpectrum, random_spectrum, two_block_spectrum
from .sampling import haar_batch

__all__ = [
    "CHUNK",
    "NegativityEstimate",
    "wilson_interval",
    "estimate_global",
    "estimate_state",
    "KernelSelector",
    "SweepConfig",
    "SweepRecord",
    "SweepError",
    "run_sweep",
]

#: Samples per work unit; one derived random stream per chunk.
CHUNK = 1 << 16

# float64 scalars drawn per internal sub-batch, to cap working memory
_GAMMA_BUDGET = 8_388_608
_GINIBRE_BUDGET = 8_388_608


class SweepError(RuntimeError):
    """A sweep point failed; the message identifies which one."""


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _chunks(trials: int) -> list[tuple[int, int]]:
    full, rem = divmod(trials, CHUNK)
    sizes = [CHUNK] * full + ([rem] if rem else [])
    return list(enumerate(sizes))


def _count_fast_gamma(seed: int, n: int, weights: np.ndarray, chunk: tuple[int, int]) -> int:
    index, size = chunk
    rng = _chunk_rng(seed, index)
    rows = max(1, _GAMMA_BUDGET // n)
    negatives = 0
    done = 0
    while done < size:
        m = min(rows, size - done)
        g = rng.gamma(float(n), 2.0, size=(m, n))
        negatives += int(np.count_nonzero(g @ weights < 0.0))
        done += m
    return negatives


def _count_full_ginibre(seed: int, n: int, weights: np.ndarray,
                        point: np.ndarray | None, chunk: tuple[int, int]) -> int:
    index, size = chunk
    rng = _chunk_rng(seed, index)
    rows = max(1, _GINIBRE_BUDGET // (2 * n * n))
    negatives = 0
    done = 0
    while done < size:
        m = min(rows, size - done)
        g = rng.standard_normal((m, n, n, 2))
        if point is None:
            energies = (g[..., 0] ** 2 + g[..., 1] ** 2).sum(axis=1)
        else:
            zu = (g[..., 0] + 1j * g[..., 1]) @ point
            energies = (zu.real**2 + zu.imag**2).sum(axis=1)
        negatives += int(np.count_nonzero(energies @ weights < 0.0))
        done += m
    return negatives


def _count_state(seed: int, n: int, weights: np.ndarray,
                 rho: np.ndarray, chunk: tuple[int, int]) -> int:
    index, size = chunk
    rng = _chunk_rng(seed, index)
    rows = max(1, _GINIBRE_BUDGET // (2 * n * n))
    negatives = 0
    done = 0
    while done < size:
        m = min(rows, size - done)
        u = haar_batch(m, n, rng)
        # diagonal of U^dagger rho U, batched, dotted with the eigenvalues
        diag = (u.conj() * (rho @ u)).sum(axis=1)
        values = (diag @ weights).real
        negatives += int(np.count_nonzero(values < 0.0))
        done += m
    return negatives


def _map_reduce(worker, chunks: list[tuple[int, int]], workers: int) -> int:
    if workers == 1 or len(chunks) == 1:
        return sum(map(worker, chunks))
    try:
        with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
            return sum(pool.map(worker, chunks))
    except OSError as exc:
        # same counts either way; the pool only changes who runs the chunks
        warnings.warn(f"process pool unavailable ({exc}); running chunks serially",
                      RuntimeWarning, stacklevel=2)
        return sum(map(worker, chunks))


def wilson_interval(negatives: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Parameters
    ----------
    negatives : int
        Observed successes, 0 <= negatives <= trials.
    trials : int
        Number of Bernoulli trials, >= 1.
    z : float
        Normal quantile, e.g. 1.96 for 95%, 3.0 for a 3-sigma band.

    Returns
    -------
    (low, high) : tuple of float
        Interval in [0, 1]; low is exactly 0.0 when negatives == 0 and
        high is exactly 1.0 when negatives == trials.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= negatives <= trials:
        raise ValueError(f"negatives {negatives} outside [0, {trials}]")
    if not z > 0.0:
        raise ValueError(f"z must be positive, got {z!r}")
    p = negatives / trials
    zz = z * z
    denom = 1.0 + zz / trials
    center = (p + zz / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + zz / (4.0 * trials * trials))
    low = 0.0 if negatives == 0 else max(0.0, center - half)
    high = 1.0 if negatives == trials else min(1.0, center + half)
    return low, high


@dataclass(frozen=True)
class NegativityEstimate:
    """A Monte Carlo negativity frequency with its Wilson interval.

    ``p_hat`` is exactly ``negatives / trials``; ``method`` names the
    sampling path (``"fast-gamma"``, ``"full-ginibre"``, or
    ``"haar-phase-point"``).
    """

    trials: int
    negatives: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int
    method: str

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.negatives <= self.trials:
            raise ValueError("negatives outside [0, trials]")
        if self.p_hat != self.negatives / self.trials:
            raise ValueError("p_hat is not negatives/trials")
        if not 0.0 <= self.ci_low <= self.p_hat <= self.ci_high <= 1.0:
            raise ValueError("interval does not bracket p_hat inside [0, 1]")


def _check_trials_seed(trials: int, seed: int) -> None:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit non-negative integer, got {seed}")


def _finish(trials: int, negatives: int, seed: int, method: str, z: float) -> NegativityEstimate:
    low, high = wilson_interval(negatives, trials, z)
    return NegativityEstimate(trials=trials, negatives=negatives, p_hat=negatives / trials,
                              ci_low=low, ci_high=high, seed=seed, method=method)


def estimate_global(spectrum: KernelSpectrum, trials: int, seed: int,
                    method: str = "fast-gamma", workers: int = 1, *,
                    z: float = 1.96, phase_point: np.ndarray | None = None) -> NegativityEstimate:
    """Estimate the probability that a random state has a negative Wigner value.

    Samples Hilbert-Schmidt-random states and counts negative Wigner values
    at a fixed phase-space point (the identity unless ``phase_point`` says
    otherwise; the result is point-independent either way).

    Parameters
    ----------
    spectrum : KernelSpectrum
        Kernel eigenvalues with multiplicities; validated before use.
    trials : int
        Sample count, >= 1.
    seed : int
        Master seed; fully determines the counts together with ``trials``.
    method : str
        ``"fast-gamma"`` draws the N column energies directly as
        gamma(N, 2) deviates; ``"full-ginibre"`` materializes z and reduces
        it, useful as an end-to-end cross-check of the fast path.
    workers : int
        Process count for chunk fan-out.  Counts do not depend on it.
    z : float
        Normal quantile for the Wilson interval.
    phase_point : ndarray, optional
        Unitary matrix to evaluate at instead of the identity; requires
        ``method="full-ginibre"``.

    Returns
    -------
    NegativityEstimate
    """
    spectrum.validate()
    _check_trials_seed(trials, seed)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if method not in ("fast-gamma", "full-ginibre"):
        raise ValueError(f"unknown method {method!r}")
    n = spectrum.dimension
    weights = spectrum.expanded()
    if phase_point is not None:
        if method != "full-ginibre":
            raise ValueError("a custom phase-space point requires method='full-ginibre'")
        point = np.ascontiguousarray(phase_point, dtype=complex)
        if point.shape != (n, n):
            raise ValueError(f"phase point shape {point.shape} does not match N={n}")
        if np.abs(point.conj().T @ point - np.eye(n)).max() > 1e-10:
            raise ValueError("phase point is not unitary within 1e-10")
        worker = partial(_count_full_ginibre, seed, n, weights, point)
    elif method == "full-ginibre":
        worker = partial(_count_full_ginibre, seed, n, weights, None)
    else:
        worker = partial(_count_fast_gamma, seed, n, weights)
    negatives = _map_reduce(worker, _chunks(trials), workers)
    return _finish(trials, negatives, seed, method, z)


def estimate_state(rho: np.ndarray, spectrum: KernelSpectrum, trials: int, seed: int,
                   workers: int = 1, *, z: float = 1.96) -> NegativityEstimate:
    """Estimate the phase-space volume fraction where a state's Wigner value is negative.

    Draws Haar-random unitaries U and counts tr(rho U P U^dagger) < 0.

    The state must be Hermitian within 1e-12 and have unit trace within
    1e-12; positive semidefiniteness is the caller's responsibility.
    """
    spectrum.validate()
    _check_trials_seed(trials, seed)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    n = spectrum.dimension
    rho = np.ascontiguousarray(rho, dtype=complex)
    if rho.shape != (n, n):
        raise ValueError(f"state shape {rho.shape} does not match kernel N={n}")
    if np.abs(rho - rho.conj().T).max() > 1e-12:
        raise ValueError("state is not Hermitian within 1e-12")
    if abs(complex(np.trace(rho)) - 1.0) > 1e-12:
        raise ValueError("state trace differs from 1 by more than 1e-12")
    worker = partial(_count_state, seed, n, spectrum.expanded(), rho)
    negatives = _map_reduce(worker, _chunks(trials), workers)
    return _finish(trials, negatives, seed, "haar-phase-point", z)


@dataclass(frozen=True)
class KernelSelector:
    """Kernel family choice applied across sweep dimensions.

    ``two_block(k)`` picks the two-eigenvalue kernel at every N > k;
    ``random(seed)`` draws one random spectrum per N, deterministically
    from the selector's own seed.
    """

    kind: str
    k: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "two-block":
            if self.k is None or self.k < 1:
                raise ValueError("two-block selector needs k >= 1")
            if self.seed is not None:
                raise ValueError("two-block selector takes no seed")
        elif self.kind == "random":
            if self.seed is None or not 0 <= self.seed < 2**64:
                raise ValueError("random selector needs a 64-bit seed")
            if self.k is not None:
                raise ValueError("random selector takes no k")
        else:
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @classmethod
    def two_block(cls, k: int) -> "KernelSelector":
        return cls(kind="two-block", k=k)

    @classmethod
    def random(cls, seed: int) -> "KernelSelector":
        return cls(kind="random", seed=seed)

    def valid_for(self, n_levels: int) -> bool:
        """Whether this family exists at dimension ``n_levels``."""
        if n_levels < 2:
            return False
        return self.kind == "random" or self.k <= n_levels - 1

    def build(self, n_levels: int) -> KernelSpectrum:
        """Materialize the spectrum for one dimension."""
        if self.kind == "two-block":
            return two_block_spectrum(n_levels, self.k)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(n_levels,)))
        return random_spectrum(n_levels, rng, label=f"random s={self.seed}")

    def describe(self) -> str:
        if self.kind == "two-block":
            return f"two-block k={self.k}"
        return f"random s={self.seed}"


@dataclass(frozen=True)
class SweepConfig:
    """Grid of (dimension, kernel) points estimated with shared settings."""

    dimensions: tuple[int, ...]
    kernels: tuple[KernelSelector, ...]
    trials: int
    seed: int
    workers: int = 1
    z: float = 1.96
    method: str = "fast-gamma"

    def __post_init__(self) -> None:
        object.__setattr__(self, "dimensions", tuple(int(n) for n in self.dimensions))
        object.__setattr__(self, "kernels", tuple(self.kernels))
        if any(n < 2 for n in self.dimensions):
            raise ValueError("every dimension must be >= 2")
        _check_trials_seed(self.trials, self.seed)
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.method not in ("fast-gamma", "full-ginibre"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class SweepRecord:
    """One estimated sweep point, CSV-row shaped."""

    dimension: int
    kernel_label: str
    k: int | None
    method: str
    trials: int
    negatives: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int
    wall_time_s: float


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Estimate every valid (dimension, kernel) point of the grid.

    Points are ordered dimension-major.  Each point gets its own seed
    derived from (config.seed, grid index), so records are bit-identical
    across runs and worker counts, wall time aside.  Grid points where the
    kernel family does not exist (two-block k > N-1) are skipped without a
    record.  A failing point aborts the sweep with the point identified.
    """
    records: list[SweepRecord] = []
    grid = [(n, sel) for n in config.dimensions for sel in config.kernels]
    for index, (n, selector) in enumerate(grid):
        if not selector.valid_for(n):
            continue
        point_seed = int(np.random.SeedSequence(
            entropy=(config.seed, index)).generate_state(1, np.uint64)[0])
        start = time.perf_counter()
        try:
            spectrum = selector.build(n)
            est = estimate_global(spectrum, config.trials, point_seed,
                                  method=config.method, workers=config.workers, z=config.z)
        except Exception as exc:
            raise SweepError(
                f"sweep point N={n}, kernel {selector.describe()} failed: {exc}") from exc
        records.append(SweepRecord(
            dimension=n, kernel_label=spectrum.label, k=selector.k, method=est.method,
            trials=est.trials, negatives=est.negatives, p_hat=est.p_hat,
            ci_low=est.ci_low, ci_high=est.ci_high, seed=est.seed,
            wall_time_s=time.perf_counter() - start))
    return records
