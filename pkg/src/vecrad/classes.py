"""Function classes and their exact per-draw suprema.

For a fixed sign (or Gaussian) draw the supremum of the weighted empirical
sum over each class has a closed form:

* mixed (2,p)-norm ball of radius B*T^(1/p): radius times the dual
  l_q norm of the per-output Euclidean norms ||V_t||, V_t = sum_i eps_ti x_i;
* trace-norm ball of radius B*sqrt(T): radius times the largest singular
  value of the matrix with rows V_t;
* composite class with the read-out layer maximized and the hidden layer
  fixed at W: a * sum_t ||sum_i eps_ti phi(W x_i)||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .linalg import DataSample
from .sampling import GaussMatrix, SignMatrix

_FEAS_TOL = 1e-9


def dual_exponent(p: float) -> float:
    """q with 1/p + 1/q = 1; maps 1 to inf and inf to 1."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def lp_norm(v: np.ndarray, p: float, axis: int = -1) -> np.ndarray:
    """l_p norm of nonnegative entries, p in [1, inf]."""
    if math.isinf(p):
        return np.max(v, axis=axis)
    if p == 1:
        return np.sum(v, axis=axis)
    return np.sum(v**p, axis=axis) ** (1.0 / p)


@dataclass(frozen=True)
class MixedNormSpec:
    """Linear maps with ||W||_{2,p} <= B * T^(1/p)."""

    p: float
    B: float

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be in [1, inf]")
        if self.B < 0:
            raise ValueError("B must be nonnegative")

    @property
    def q(self) -> float:
        return dual_exponent(self.p)

    def radius(self, T: int) -> float:
        scale = 1.0 if math.isinf(self.p) else float(T) ** (1.0 / self.p)
        return self.B * scale


@dataclass(frozen=True)
class TraceNormSpec:
    """Linear maps with trace norm at most B * sqrt(T)."""

    B: float

    def __post_init__(self):
        if self.B < 0:
            raise ValueError("B must be nonnegative")

    def radius(self, T: int) -> float:
        return self.B * math.sqrt(T)


@dataclass(frozen=True)
class Activation:
    """Componentwise activation phi with phi(0) = 0.

    kind is one of identity, relu, tanh; scale s turns it into s*phi,
    so the Lipschitz constant is exactly scale.
    """

    kind: str = "identity"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("identity", "relu", "tanh"):
            raise ValueError(f"unknown activation kind {self.kind!r}")
        if self.scale < 0:
            raise ValueError("scale must be nonnegative")

    @property
    def lipschitz(self) -> float:
        return self.scale

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        if self.kind == "identity":
            return self.scale * z
        if self.kind == "relu":
            return self.scale * np.maximum(z, 0.0)
        return self.scale * np.tanh(z)

    def derivative(self, z: np.ndarray) -> np.ndarray:
        # relu uses subgradient 0 at the kink
        z = np.asarray(z, dtype=np.float64)
        if self.kind == "identity":
            return np.full_like(z, self.scale)
        if self.kind == "relu":
            return self.scale * (z > 0.0).astype(np.float64)
        return self.scale * (1.0 - np.tanh(z) ** 2)


def apply_activation(act: Activation, v: np.ndarray) -> np.ndarray:
    return act(v)


_W_NORMS = ("2inf", "22", "21")


@dataclass(frozen=True)
class CompositeSpec:
    """One-hidden-layer class: read-out rows ||v_t|| <= a over phi(W x).

    The hidden layer W: R^d -> R^K is constrained by one of the mixed norms
    ||W||_{2,inf} <= b, ||W||_{2,2} <= b, ||W||_{2,1} <= b.  l_phi overrides
    the activation's Lipschitz constant when the user wants a looser value.
    """

    K: int
    w_norm: str
    b: float
    a: float
    activation: Activation = field(default_factory=Activation)
    l_phi: Optional[float] = None

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be positive")
        if self.w_norm not in _W_NORMS:
            raise ValueError(f"w_norm must be one of {_W_NORMS}")
        if self.a < 0 or self.b < 0:
            raise ValueError("a and b must be nonnegative")
        if self.l_phi is not None and self.l_phi < 0:
            raise ValueError("l_phi must be nonnegative")

    @property
    def lipschitz_phi(self) -> float:
        return self.activation.lipschitz if self.l_phi is None else self.l_phi


Draw = Union[SignMatrix, GaussMatrix]
LinearSpec = Union[MixedNormSpec, TraceNormSpec]


def weight_norm(w_norm: str, W: np.ndarray) -> float:
    """Mixed norm of the rows of W: max, l2, or l1 of the row norms."""
    rows = np.linalg.norm(np.atleast_2d(W), axis=1)
    if w_norm == "2inf":
        return float(rows.max())
    if w_norm == "22":
        return float(np.linalg.norm(rows))
    if w_norm == "21":
        return float(rows.sum())
    raise ValueError(f"w_norm must be one of {_W_NORMS}")


def _component_sums(values: np.ndarray, sample: DataSample) -> np.ndarray:
    # off-support cells are exactly zero, so a dense product gives V_t
    return values @ sample.vectors


def sup_mixed_norm(spec: MixedNormSpec, draw: Draw, sample: DataSample, index_map) -> float:
    """Exact supremum of the weighted sum over the mixed-norm ball."""
    _check_shapes(draw, sample, index_map)
    norms = np.linalg.norm(_component_sums(draw.values, sample), axis=1)
    return spec.radius(index_map.T) * float(lp_norm(norms, spec.q))


def sup_trace_norm(spec: TraceNormSpec, draw: Draw, sample: DataSample, index_map) -> float:
    """Exact supremum over the trace-norm ball: radius times sigma_max."""
    from .linalg import spectral_norm

    _check_shapes(draw, sample, index_map)
    D = _component_sums(draw.values, sample)
    return spec.radius(index_map.T) * spectral_norm(D)


def sup_composite_given_w(
    spec: CompositeSpec, W: np.ndarray, draw: Draw, sample: DataSample, index_map
) -> float:
    """Supremum over the read-out layer with the hidden layer fixed at W.

    A feasible-point value, hence a lower bound on the full composite
    supremum for the same draw.
    """
    _check_shapes(draw, sample, index_map)
    W = np.asarray(W, dtype=np.float64)
    if W.shape != (spec.K, sample.d):
        raise ValueError(f"W must have shape ({spec.K}, {sample.d})")
    nval = weight_norm(spec.w_norm, W)
    if nval > spec.b * (1.0 + _FEAS_TOL) + 1e-12:
        raise ValueError("W outside ball")
    phi = spec.activation(sample.vectors @ W.T)  # (N, K)
    U = draw.values @ phi  # (T, K)
    return spec.a * float(np.linalg.norm(U, axis=1).sum())


def _check_shapes(draw: Draw, sample: DataSample, index_map) -> None:
    if draw.index_map is not index_map and draw.values.shape != (index_map.T, index_map.N):
        raise ValueError("draw does not match the index map")
    if index_map.N != sample.N:
        raise ValueError(f"index map expects N={index_map.N}, sample has N={sample.N}")


def project_simplex_ball(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection of a nonnegative vector onto {u >= 0, sum u <= r}."""
    v = np.maximum(np.asarray(v, dtype=np.float64), 0.0)
    if v.sum() <= radius:
        return v
    # soft threshold: u_k = max(v_k - tau, 0) with sum u = radius
    s = np.sort(v)[::-1]
    cum = np.cumsum(s)
    k = np.arange(1, v.size + 1)
    cond = s - (cum - radius) / k > 0
    rho = int(np.nonzero(cond)[0][-1])
    tau = (cum[rho] - radius) / (rho + 1)
    return np.maximum(v - tau, 0.0)


def project_weights(w_norm: str, radius: float, W: np.ndarray) -> np.ndarray:
    """Euclidean projection of W onto the mixed-norm ball of the given radius.

    Per-row clipping for 2inf, a global rescale for 22, and row-norm
    soft-thresholding (simplex projection of the row norms) for 21.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    W = np.array(W, dtype=np.float64)
    if not np.all(np.isfinite(W)):
        raise ValueError("W must be finite")
    rows = np.linalg.norm(W, axis=1)
    if w_norm == "2inf":
        scale = np.where(rows > radius, np.divide(radius, rows, out=np.ones_like(rows), where=rows > 0), 1.0)
        return W * scale[:, None]
    if w_norm == "22":
        total = np.linalg.norm(rows)
        return W if total <= radius else W * (radius / total)
    if w_norm == "21":
        if rows.sum() <= radius:
            return W
        target = project_simplex_ball(rows, radius)
        scale = np.divide(target, rows, out=np.zeros_like(rows), where=rows > 0)
        return W * scale[:, None]
    raise ValueError(f"w_norm must be one of {_W_NORMS}")
