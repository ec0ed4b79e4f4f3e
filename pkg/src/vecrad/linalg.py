"""Samples, empirical covariance operators, and spectral quantities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .sampling import RngStream

_SYM_TOL = 1e-9
_POWER_ITER_MAX = 10_000
_POWER_ITER_START = RngStream(0x5EED_5EED, 7)  # fixed sub-seed for start vectors


@dataclass(frozen=True)
class DataSample:
    """N input vectors in R^d, stored as the rows of an (N, d) array."""

    vectors: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.vectors, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 1:
            raise ValueError("empty sample")
        if x.shape[1] < 1:
            raise ValueError("vectors must have dimension >= 1")
        if not np.all(np.isfinite(x)):
            raise ValueError("sample entries must be finite")
        object.__setattr__(self, "vectors", x)
        x.setflags(write=False)

    @property
    def N(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def squared_norms(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.vectors, self.vectors)

    def is_unit_norm(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(np.linalg.norm(self.vectors, axis=1) - 1.0) <= tol))


@dataclass(frozen=True)
class SpectralSummary:
    """Trace and top eigenvalue of an empirical covariance operator."""

    trace: float
    lambda_max: float
    dim: int

    def __post_init__(self):
        if not (0.0 <= self.lambda_max <= self.trace + 1e-9 * max(1.0, self.trace)):
            raise ValueError("need 0 <= lambda_max <= trace")

    @property
    def effective_dimension(self) -> float:
        return self.trace / self.lambda_max if self.lambda_max > 0 else float("inf")


def empirical_covariance(sample: DataSample) -> np.ndarray:
    """Second-moment operator (1/N) sum_i x_i x_i^T of the whole sample."""
    x = sample.vectors
    return x.T @ x / sample.N


def subset_covariance(sample: DataSample, subset: Iterable[int]) -> np.ndarray:
    """Second-moment operator of a subset, normalized by the subset size."""
    idx = np.asarray(sorted(set(int(i) for i in subset)), dtype=np.int64)
    if idx.size == 0:
        raise ValueError("empty subset")
    if idx[0] < 0 or idx[-1] >= sample.N:
        raise ValueError(f"subset index out of range for N={sample.N}")
    x = sample.vectors[idx]
    return x.T @ x / idx.size


def _check_symmetric(op: np.ndarray) -> np.ndarray:
    a = np.asarray(op, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("operator must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    if np.max(np.abs(a - a.T)) > _SYM_TOL * scale:
        raise ValueError("operator is not symmetric within tolerance")
    return 0.5 * (a + a.T)


def largest_eigenvalue(op: np.ndarray, rel_tol: float = 1e-9) -> float:
    """Top eigenvalue of a symmetric PSD operator by power iteration.

    Stops when successive Rayleigh quotients agree to min(rel_tol, 1e-12)
    relative, or after 10,000 iterations.  The start vector comes from a
    fixed sub-seed, so the result is deterministic.
    """
    a = _check_symmetric(op)
    d = a.shape[0]
    gen = _POWER_ITER_START.generator()
    stop = min(rel_tol, 1e-12)
    for _ in range(3):  # restart if the start vector sits in the kernel
        v = gen.standard_normal(d)
        nv = np.linalg.norm(v)
        v /= nv
        rayleigh = 0.0
        for _ in range(_POWER_ITER_MAX):
            w = a @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                rayleigh = 0.0
                break
            v = w / nw
            new = float(v @ (a @ v))
            if abs(new - rayleigh) <= stop * max(abs(new), 1.0e-300):
                rayleigh = new
                break
            rayleigh = new
        if rayleigh > 0.0 or np.max(np.abs(a)) == 0.0:
            return max(rayleigh, 0.0)
    return max(rayleigh, 0.0)


def top_eigenvector(op: np.ndarray) -> np.ndarray:
    """Unit vector aligned with the top eigendirection (same iteration)."""
    a = _check_symmetric(op)
    d = a.shape[0]
    gen = _POWER_ITER_START.generator()
    v = gen.standard_normal(d)
    v /= np.linalg.norm(v)
    for _ in range(_POWER_ITER_MAX):
        w = a @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return v
        w /= nw
        if np.linalg.norm(w - v) <= 1e-13:
            return w
        v = w
    return v


def spectral_norm(rect: np.ndarray, rel_tol: float = 1e-9) -> float:
    """Largest singular value of a rectangular matrix.

    Computed as sqrt of the top eigenvalue of the smaller Gram matrix.
    """
    a = np.asarray(rect, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("entries must be finite")
    gram = a @ a.T if a.shape[0] <= a.shape[1] else a.T @ a
    return float(np.sqrt(max(largest_eigenvalue(gram, rel_tol), 0.0)))


def summarize_spectrum(sample: DataSample, rel_tol: float = 1e-9) -> SpectralSummary:
    c = empirical_covariance(sample)
    trace = float(np.trace(c))
    lam = min(largest_eigenvalue(c, rel_tol), trace) if trace > 0 else 0.0
    return SpectralSummary(trace=trace, lambda_max=lam, dim=sample.d)


def subset_squared_norms(sample: DataSample, index_map) -> np.ndarray:
    """Per-output totals sum_{i in I_t} ||x_i||^2 (equal to |I_t| tr C_t)."""
    sq = sample.squared_norms()
    return np.array([float(sq[list(s)].sum()) for s in index_map.subsets])
