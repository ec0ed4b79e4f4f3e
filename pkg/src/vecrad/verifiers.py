"""Numeric verification of the inequalities behind the bounds.

These checks run on exactly enumerable instances (or a Monte Carlo
estimate with an explicit error band on the random side) and must all
pass: each one is a proved statement, so a failure flags an
implementation defect rather than a statistical fluke.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .indexing import IndexMap
from .linalg import DataSample
from .sampling import RngStream, signs_from_words

_PSD_TOL = 1e-9


@dataclass(frozen=True)
class PsdCheckResult:
    """Outcome of a positive-semidefinite ordering check."""

    min_eigenvalue_of_gap: float
    passed: bool
    instance: str

    def __post_init__(self):
        if self.passed != (self.min_eigenvalue_of_gap >= -_PSD_TOL):
            raise ValueError("passed must reflect the eigenvalue tolerance")


class CheckOutcome(NamedTuple):
    lhs: float
    rhs: float
    passed: bool


def double_factorial(p: int) -> int:
    """(2p-1)!! = product of the odd numbers 1, 3, ..., 2p-1."""
    if p < 1:
        raise ValueError("p must be >= 1")
    out = 1
    for i in range(1, p + 1):
        out *= 2 * i - 1
    return out


def _all_sign_patterns(n: int) -> np.ndarray:
    patterns = np.arange(1 << n, dtype=np.uint64)
    return 1.0 - 2.0 * ((patterns[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)).astype(np.float64)


def check_moment_psd_ordering(sample: DataSample, p: int, max_n: int = 8) -> PsdCheckResult:
    """Exact check that E[Q_V^p] <= (2p-1)!! alpha^(p-1) E[Q_V] in the PSD order.

    V = sum_i eps_i x_i, Q_V = V V^T, alpha = sum_i ||x_i||^2; both sides are
    averaged over all 2^n sign patterns.
    """
    n, d = sample.N, sample.d
    if n > max_n or d > 6 or p > 4:
        raise ValueError(f"instance too large: n={n} (max {max_n}), d={d} (max 6), p={p} (max 4)")
    if p < 1:
        raise ValueError("p must be >= 1")
    signs = _all_sign_patterns(n)
    V = signs @ sample.vectors  # (2^n, d)
    sq = np.einsum("ij,ij->i", V, V)
    lhs = np.einsum("i,ij,ik->jk", sq ** (p - 1), V, V) / signs.shape[0]
    e_q = np.einsum("ij,ik->jk", V, V) / signs.shape[0]
    alpha = float(sample.squared_norms().sum())
    rhs = double_factorial(p) * alpha ** (p - 1) * e_q
    gap_min = float(np.linalg.eigvalsh(rhs - lhs)[0])
    return PsdCheckResult(
        min_eigenvalue_of_gap=gap_min,
        passed=gap_min >= -_PSD_TOL,
        instance=f"n={n} d={d} p={p}",
    )


def check_szarek_lower(
    sample: DataSample,
    trials: int = 10_000,
    stream: RngStream | None = None,
) -> CheckOutcome:
    """E||sum_i eps_i x_i|| >= sqrt(sum_i ||x_i||^2 / 2).

    Exact enumeration up to n = 20 signs; Monte Carlo with a 3-stderr
    allowance beyond that.
    """
    n = sample.N
    rhs = math.sqrt(float(sample.squared_norms().sum()) / 2.0)
    if n <= 20:
        total = 0.0
        for lo in range(0, 1 << n, 1 << 14):
            hi = min(lo + (1 << 14), 1 << n)
            patterns = np.arange(lo, hi, dtype=np.uint64)
            signs = 1.0 - 2.0 * ((patterns[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)).astype(np.float64)
            total += float(np.linalg.norm(signs @ sample.vectors, axis=1).sum())
        lhs = total / float(1 << n)
        return CheckOutcome(lhs, rhs, lhs >= rhs - 1e-9)
    stream = stream or RngStream(0)
    words = stream.raw(trials * n).reshape(trials, n)
    norms = np.linalg.norm(signs_from_words(words) @ sample.vectors, axis=1)
    lhs = float(norms.mean())
    se = float(norms.std(ddof=1) / math.sqrt(trials))
    return CheckOutcome(lhs, rhs, lhs + 3.0 * se >= rhs - 1e-9)


@dataclass(frozen=True)
class MaxAffine:
    """Lipschitz test function z -> max_j (<g_j, z> + c_j).

    The Lipschitz constant is certified by construction as the largest
    gradient norm.
    """

    weights: np.ndarray  # (pieces, T)
    offsets: np.ndarray  # (pieces,)

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.weights, dtype=np.float64))
        c = np.atleast_1d(np.asarray(self.offsets, dtype=np.float64))
        if w.shape[0] != c.shape[0]:
            raise ValueError("one offset per affine piece")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "offsets", c)

    @property
    def lipschitz(self) -> float:
        return float(np.linalg.norm(self.weights, axis=1).max())

    def __call__(self, z: np.ndarray) -> float:
        return float(np.max(self.weights @ np.asarray(z, dtype=np.float64) + self.offsets))


def check_contraction(
    sample: DataSample,
    lipschitz_fns: Sequence[MaxAffine],
    candidates: Sequence[np.ndarray],
    max_support: int = 20,
) -> CheckOutcome:
    """Both sides of the vector contraction inequality, exactly enumerated.

    For the finite class {x -> W x : W in candidates} and per-example
    Lipschitz maps h_i, checks
    E sup_W sum_i eps_i h_i(W x_i) <= sqrt(2) L E sup_W sum_{t,i} eps_ti (W x_i)_t
    with L the largest certified Lipschitz constant.
    """
    n = sample.N
    if len(lipschitz_fns) != n:
        raise ValueError("need one Lipschitz map per example")
    ws = [np.atleast_2d(np.asarray(w, dtype=np.float64)) for w in candidates]
    if not ws:
        raise ValueError("need at least one candidate function")
    T = ws[0].shape[0]
    if any(w.shape != (T, sample.d) for w in ws):
        raise ValueError("candidates must share the shape (T, d)")
    if n > max_support or T * n > max_support:
        raise ValueError(f"support too large: lhs has {n} signs, rhs has {T * n} (max {max_support})")
    L = max(h.lipschitz for h in lipschitz_fns)

    F = np.stack([sample.vectors @ w.T for w in ws])  # (J, n, T)
    HV = np.array([[h(F[j, i]) for i, h in enumerate(lipschitz_fns)] for j in range(len(ws))])

    signs_lhs = _all_sign_patterns(n)  # (2^n, n)
    lhs = float(np.max(HV @ signs_lhs.T, axis=0).mean())

    flat = F.reshape(len(ws), n * T)  # sign index (t, i) flattened as i*T + t
    signs_rhs = _all_sign_patterns(n * T)
    rhs_expect = float(np.max(flat @ signs_rhs.T, axis=0).mean())
    rhs = math.sqrt(2.0) * L * rhs_expect
    return CheckOutcome(lhs, rhs, lhs <= rhs + 1e-9)


def check_matrix_concentration(
    sample: DataSample,
    index_map: IndexMap,
    trials: int = 2_000,
    stream: RngStream | None = None,
) -> CheckOutcome:
    """Concentration of the summed rank-one sign operators:

    sqrt(E || sum_t Q_{V_t} ||) <= sqrt(|| E sum_t Q_{V_t} ||) + sqrt(R (ln dim + 1))

    with V_t the per-output sign sums, R = 2 max_t sum_{i in I_t} ||x_i||^2
    and dim the dimension of the span of the data.  The left side is
    estimated by Monte Carlo with a 3-stderr allowance.
    """
    if trials < 100:
        raise ValueError("trials must be >= 100")
    stream = stream or RngStream(0)
    x = sample.vectors
    d = sample.d
    subsets = [np.asarray(s, dtype=np.int64) for s in index_map.subsets]
    M = index_map.support_size

    mean_op = np.zeros((d, d))
    alpha_max = 0.0
    for idx in subsets:
        xs = x[idx]
        mean_op += xs.T @ xs
        alpha_max = max(alpha_max, float(np.einsum("ij,ij->", xs, xs)))
    rank = int(np.linalg.matrix_rank(x))
    rhs = math.sqrt(float(np.linalg.eigvalsh(mean_op)[-1])) + math.sqrt(
        2.0 * alpha_max * (math.log(rank) + 1.0)
    )

    words = stream.raw(trials * M).reshape(trials, M)
    cells = signs_from_words(words)
    ops = np.zeros((trials, d, d))
    pos = 0
    for idx in subsets:
        V = cells[:, pos:pos + idx.size] @ x[idx]
        ops += V[:, :, None] * V[:, None, :]
        pos += idx.size
    norms = np.linalg.eigvalsh(ops)[:, -1]
    mean = float(norms.mean())
    se = float(norms.std(ddof=1) / math.sqrt(trials))
    lhs = math.sqrt(mean)
    se_lhs = se / (2.0 * lhs) if lhs > 0 else se
    return CheckOutcome(lhs, rhs, lhs - 3.0 * se_lhs <= rhs + 1e-9)
