"""Monte Carlo and exact estimators of the vector-valued complexities.

The normalized complexity of a class F is (1/N) E sup_F of the sign-weighted
empirical sum over the support of an index map.  Linear and trace-norm
classes admit an exact per-draw supremum, so the only error is Monte Carlo;
for small supports the expectation is computed exactly by enumerating every
sign pattern.  Composite classes get a projected-gradient ascent over the
hidden layer, which yields a certified lower estimate of each per-draw
supremum.

Trials are embarrassingly parallel: trial i consumes the i-th fixed-size
block of its stream's raw words, and results are reduced in trial order, so
the outcome is independent of the number of threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .classes import (
    Activation,
    CompositeSpec,
    MixedNormSpec,
    TraceNormSpec,
    lp_norm,
    project_weights,
    weight_norm,
)
from .indexing import IndexMap
from .linalg import DataSample, empirical_covariance, top_eigenvector
from .sampling import RngStream, normals_from_words, signs_from_words

_CHUNK = 1024
DEFAULT_ENUMERATION_CAP = 20

ClassSpec = Union[MixedNormSpec, TraceNormSpec, CompositeSpec]


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error."""

    mean: float
    stderr: float
    trials: int
    master_seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")

    def scaled(self, c: float) -> "McEstimate":
        return McEstimate(self.mean * c, self.stderr * abs(c), self.trials, self.master_seed)


@dataclass(frozen=True)
class AscentConfig:
    """Projected-gradient ascent settings for composite suprema.

    step_size defaults to 0.1 * b / sqrt(K); restart 0 starts from the
    projected rank-one matrix aligned with the top data direction, the
    rest start at random feasible points.
    """

    restarts: int = 8
    steps: int = 200
    step_size: Optional[float] = None
    finite_diff: bool = False

    def __post_init__(self):
        if self.restarts < 1 or self.steps < 1:
            raise ValueError("restarts and steps must be positive")
        if self.step_size is not None and self.step_size <= 0:
            raise ValueError("step_size must be positive")


def _cell_layout(index_map: IndexMap):
    """Canonical flat cell order: subsets in output order, sorted inside."""
    slices, subsets = [], []
    pos = 0
    for s in index_map.subsets:
        idx = np.asarray(s, dtype=np.int64)
        slices.append(slice(pos, pos + idx.size))
        subsets.append(idx)
        pos += idx.size
    return slices, subsets


def _component_norms(cells: np.ndarray, sample: DataSample, layout) -> np.ndarray:
    """||V_t|| for every trial row of flat cell values; returns (m, T)."""
    slices, subsets = layout
    out = np.empty((cells.shape[0], len(subsets)))
    for t, (sl, idx) in enumerate(zip(slices, subsets)):
        V = cells[:, sl] @ sample.vectors[idx]
        out[:, t] = np.linalg.norm(V, axis=1)
    return out


def _component_stack(cells: np.ndarray, sample: DataSample, layout) -> np.ndarray:
    """Stack of the matrices with rows V_t; returns (m, T, d)."""
    slices, subsets = layout
    m = cells.shape[0]
    out = np.empty((m, len(subsets), sample.d))
    for t, (sl, idx) in enumerate(zip(slices, subsets)):
        out[:, t, :] = cells[:, sl] @ sample.vectors[idx]
    return out


def _linear_sups(spec, cells: np.ndarray, sample: DataSample, index_map: IndexMap, layout) -> np.ndarray:
    radius = spec.radius(index_map.T)
    if radius == 0.0:
        return np.zeros(cells.shape[0])
    if isinstance(spec, MixedNormSpec):
        norms = _component_norms(cells, sample, layout)
        return radius * lp_norm(norms, spec.q, axis=1)
    stack = _component_stack(cells, sample, layout)
    sigma = np.linalg.svd(stack, compute_uv=False)[:, 0]
    return radius * sigma


def _run_trials(
    trials: int,
    words_per_trial: int,
    stream: RngStream,
    kernel: Callable[[np.ndarray, int], np.ndarray],
    threads: int = 1,
) -> np.ndarray:
    """Fill a per-trial value array; trial i reads its own word block."""
    blocks = max(1, -(-words_per_trial // 4))
    out = np.empty(trials)

    def work(lo: int, hi: int) -> None:
        m = hi - lo
        words = stream.raw(m * blocks * 4, block_offset=lo * blocks)
        words = words.reshape(m, blocks * 4)[:, :words_per_trial]
        out[lo:hi] = kernel(words, lo)

    ranges = [(lo, min(lo + _CHUNK, trials)) for lo in range(0, trials, _CHUNK)]
    if threads <= 1 or len(ranges) == 1:
        for lo, hi in ranges:
            work(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda r: work(*r), ranges))
    return out


def _summarize(values: np.ndarray, scale: float, stream: RngStream) -> McEstimate:
    values = values * scale
    n = values.size
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(float(values.mean()), stderr, n, stream.master_seed)


def _validate(spec, sample: DataSample, index_map: IndexMap, trials: int) -> None:
    if not isinstance(spec, (MixedNormSpec, TraceNormSpec, CompositeSpec)):
        raise TypeError(f"invalid spec: {type(spec).__name__}")
    if index_map.N != sample.N:
        raise ValueError(f"index map expects N={index_map.N}, sample has N={sample.N}")
    if trials < 2:
        raise ValueError("trials must be >= 2")


def estimate_rademacher(
    spec: ClassSpec,
    sample: DataSample,
    index_map: IndexMap,
    trials: int,
    stream: RngStream,
    ascent: Optional[AscentConfig] = None,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of the normalized sign complexity of a class."""
    _validate(spec, sample, index_map, trials)
    if isinstance(spec, CompositeSpec):
        return estimate_composite_rademacher(
            spec, sample, index_map, trials, ascent or AscentConfig(), stream, threads=threads
        )
    layout = _cell_layout(index_map)
    M = index_map.support_size

    def kernel(words, lo):
        cells = signs_from_words(words)
        return _linear_sups(spec, cells, sample, index_map, layout)

    values = _run_trials(trials, M, stream, kernel, threads)
    return _summarize(values, 1.0 / sample.N, stream)


def estimate_gaussian_width(
    spec: ClassSpec,
    sample: DataSample,
    index_map: IndexMap,
    trials: int,
    stream: RngStream,
    normalized: bool = False,
    ascent: Optional[AscentConfig] = None,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo Gaussian width of the class image on the support.

    Unnormalized by default; normalized=True divides by N, matching the
    scale of estimate_rademacher.
    """
    _validate(spec, sample, index_map, trials)
    M = index_map.support_size
    scale = 1.0 / sample.N if normalized else 1.0
    if isinstance(spec, CompositeSpec):
        values = _composite_trials(spec, sample, index_map, trials, ascent or AscentConfig(), stream, threads, gaussian=True)
        return _summarize(values, scale, stream)
    layout = _cell_layout(index_map)

    def kernel(words, lo):
        cells = normals_from_words(words.reshape(-1)).reshape(-1, M)
        return _linear_sups(spec, cells, sample, index_map, layout)

    values = _run_trials(trials, 2 * M, stream, kernel, threads)
    return _summarize(values, scale, stream)


def exact_rademacher(
    spec: Union[MixedNormSpec, TraceNormSpec],
    sample: DataSample,
    index_map: IndexMap,
    max_support: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Exact normalized complexity by enumerating all 2^M sign patterns."""
    if not isinstance(spec, (MixedNormSpec, TraceNormSpec)):
        raise TypeError("exact enumeration requires a mixed-norm or trace-norm class")
    if index_map.N != sample.N:
        raise ValueError(f"index map expects N={index_map.N}, sample has N={sample.N}")
    M = index_map.support_size
    if M > max_support:
        raise ValueError(f"support size {M} exceeds the enumeration cap {max_support}")
    layout = _cell_layout(index_map)
    bit_cols = np.arange(M, dtype=np.uint64)
    total = 0.0
    for lo in range(0, 1 << M, 1 << 14):
        hi = min(lo + (1 << 14), 1 << M)
        patterns = np.arange(lo, hi, dtype=np.uint64)
        cells = 1.0 - 2.0 * ((patterns[:, None] >> bit_cols) & np.uint64(1)).astype(np.float64)
        total += float(_linear_sups(spec, cells, sample, index_map, layout).sum())
    return total / float(1 << M) / sample.N


def estimate_composite_rademacher(
    spec: CompositeSpec,
    sample: DataSample,
    index_map: IndexMap,
    trials: int,
    config: AscentConfig,
    stream: RngStream,
    threads: int = 1,
) -> McEstimate:
    """Ascent-based lower estimate of the composite class complexity."""
    _validate(spec, sample, index_map, trials)
    values = _composite_trials(spec, sample, index_map, trials, config, stream, threads, gaussian=False)
    return _summarize(values, 1.0 / sample.N, stream)


def _composite_trials(
    spec: CompositeSpec,
    sample: DataSample,
    index_map: IndexMap,
    trials: int,
    config: AscentConfig,
    stream: RngStream,
    threads: int,
    gaussian: bool,
) -> np.ndarray:
    layout = _cell_layout(index_map)
    top_dir = top_eigenvector(empirical_covariance(sample))
    M = index_map.support_size
    words_per_trial = 2 * M if gaussian else M

    def kernel(words, lo):
        if gaussian:
            cells = normals_from_words(words.reshape(-1)).reshape(-1, M)
        else:
            cells = signs_from_words(words)
        out = np.empty(cells.shape[0])
        for r in range(cells.shape[0]):
            dense = _dense_values(cells[r], index_map, layout)
            out[r] = _ascend(spec, dense, sample, config, stream.substream(lo + r), top_dir)
        return out

    return _run_trials(trials, words_per_trial, stream, kernel, threads)


def _dense_values(flat: np.ndarray, index_map: IndexMap, layout) -> np.ndarray:
    slices, subsets = layout
    dense = np.zeros((index_map.T, index_map.N))
    for t, (sl, idx) in enumerate(zip(slices, subsets)):
        dense[t, idx] = flat[sl]
    return dense


def _ascend(
    spec: CompositeSpec,
    values: np.ndarray,
    sample: DataSample,
    config: AscentConfig,
    trial_stream: RngStream,
    top_dir: np.ndarray,
) -> float:
    """Maximize sum_t ||(values @ phi(X W^T))_t|| over the W ball.

    The read-out radius a multiplies the result at the end, so the search
    path does not depend on a and the value is exactly homogeneous in it.
    Returns the best value seen at any feasible iterate.
    """
    if spec.a == 0.0 or spec.b == 0.0:
        return 0.0
    X = sample.vectors
    K, d = spec.K, sample.d
    act = spec.activation
    eta = config.step_size if config.step_size is not None else 0.1 * spec.b / math.sqrt(K)

    def value(W):
        U = values @ act(X @ W.T)
        return float(np.linalg.norm(U, axis=1).sum())

    def gradient(W):
        Z = X @ W.T
        U = values @ act(Z)
        un = np.linalg.norm(U, axis=1)
        Uhat = np.divide(U, un[:, None], out=np.zeros_like(U), where=un[:, None] > 0)
        G = values.T @ Uhat  # (N, K)
        return (act.derivative(Z) * G).T @ X

    def numeric_gradient(W):
        g = np.zeros_like(W)
        h = 1e-6 * max(1.0, spec.b)
        for k in range(K):
            for l in range(d):
                Wp = W.copy()
                Wp[k, l] += h
                Wm = W.copy()
                Wm[k, l] -= h
                g[k, l] = (value(Wp) - value(Wm)) / (2.0 * h)
        return g

    best = 0.0
    for r in range(config.restarts):
        if r == 0:
            W = project_weights(spec.w_norm, spec.b, spec.b * np.outer(np.ones(K), top_dir))
        else:
            gen = trial_stream.substream(r).generator()
            R = gen.standard_normal((K, d))
            nv = weight_norm(spec.w_norm, R)
            W = R * (spec.b * gen.random() / nv) if nv > 0 else np.zeros((K, d))
        best = max(best, value(W))
        for _ in range(config.steps):
            g = numeric_gradient(W) if config.finite_diff else gradient(W)
            W = project_weights(spec.w_norm, spec.b, W + eta * g)
            best = max(best, value(W))
    return spec.a * best
