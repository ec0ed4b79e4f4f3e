"""Closed-form complexity bounds with per-term breakdown.

Every evaluator returns a BoundReport whose value is the sum of its named
terms.  The general forms hold for arbitrary index maps and data norms; for
unit-norm data with multi-category or multi-task maps the simplified
overlap-factor forms are reported alongside, and they agree with the
general ones to floating-point accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .classes import CompositeSpec, MixedNormSpec, TraceNormSpec
from .indexing import IndexMap, overlap_factor
from .linalg import (
    DataSample,
    empirical_covariance,
    largest_eigenvalue,
    subset_squared_norms,
)

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """An evaluated bound: value = sum of the named additive terms."""

    value: float
    terms: Tuple[Tuple[str, float], ...]
    constants_used: dict = field(default_factory=dict)
    preconditions_checked: Tuple[Tuple[str, bool], ...] = ()
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        total = sum(v for _, v in self.terms)
        if not math.isclose(self.value, total, rel_tol=1e-12, abs_tol=1e-12):
            if not (math.isinf(self.value) and math.isinf(total)):
                raise ValueError("value must equal the sum of its terms")
        for name, v in self.terms:
            if v < 0:
                raise ValueError(f"term {name} must be nonnegative")


@dataclass(frozen=True)
class ChainRuleComponents:
    """Ingredients of the composite bound, all free of unknown constants."""

    lipschitz_F: float
    Q_F: float
    diameter_Y: float
    gwidth_Y: float

    def __post_init__(self):
        for name in ("lipschitz_F", "Q_F", "diameter_Y", "gwidth_Y"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def _per_output_n(index_map: IndexMap) -> float:
    return index_map.N / index_map.T


def _is_simplified(sample: DataSample, index_map: IndexMap) -> bool:
    return sample.is_unit_norm(_UNIT_TOL) and (
        index_map.is_multicategory() or index_map.is_multitask_partition()
    )


def bound_mixed_upper(spec: MixedNormSpec, sample: DataSample, index_map: IndexMap) -> BoundReport:
    """Upper bound for the mixed-norm class, p in [2, inf]:
    (B sqrt(T) / N) sqrt(sum_t |I_t| tr C_t)."""
    if spec.p < 2:
        raise ValueError("p < 2 routed to bound_mixed_small_p")
    alphas = subset_squared_norms(sample, index_map)
    value = spec.B * math.sqrt(index_map.T) / index_map.N * math.sqrt(float(alphas.sum()))
    details = {}
    if _is_simplified(sample, index_map):
        theta = overlap_factor(index_map)
        details["simplified_value"] = spec.B * theta * math.sqrt(1.0 / _per_output_n(index_map))
    return BoundReport(value=value, terms=(("upper", value),), details=details)


def bound_mixed_lower(spec: MixedNormSpec, sample: DataSample, index_map: IndexMap) -> BoundReport:
    """Lower bound for the mixed-norm class, p in [2, inf]:
    (B / (sqrt(2) N)) sum_t sqrt(|I_t| tr C_t)."""
    if spec.p < 2:
        raise ValueError("p < 2 routed to bound_mixed_small_p")
    alphas = subset_squared_norms(sample, index_map)
    value = spec.B / (math.sqrt(2.0) * index_map.N) * float(np.sqrt(alphas).sum())
    details = {}
    if _is_simplified(sample, index_map):
        theta = overlap_factor(index_map)
        details["simplified_value"] = spec.B * theta * math.sqrt(1.0 / (2.0 * _per_output_n(index_map)))
    return BoundReport(value=value, terms=(("lower", value),), details=details)


def bound_mixed_small_p(spec: MixedNormSpec, sample: DataSample, index_map: IndexMap) -> BoundReport:
    """Bound for p in (1, 2]: (2^(1/q) T^(1/p) B sqrt(q) / N)
    (sum_t (|I_t| tr C_t)^(q/2))^(1/q), requiring sum_{i in I_t} ||x_i||^2 >= 1/q."""
    if spec.p == 1:
        raise ValueError("q=inf degenerate; use p>1")
    if spec.p > 2:
        raise ValueError("p > 2 routed to bound_mixed_upper")
    q = spec.q
    alphas = subset_squared_norms(sample, index_map)
    pre = []
    for t, a in enumerate(alphas):
        ok = a >= 1.0 / q
        pre.append((f"sum_sq_norms[{t}] >= 1/q", bool(ok)))
        if not ok:
            raise ValueError(f"precondition failed for output {t}: sum of squared norms {a} < 1/q = {1.0 / q}")
    value = (
        2.0 ** (1.0 / q)
        * index_map.T ** (1.0 / spec.p)
        * spec.B
        * math.sqrt(q)
        / index_map.N
        * float(np.sum(alphas ** (q / 2.0)) ** (1.0 / q))
    )
    details = {}
    if _is_simplified(sample, index_map):
        theta = overlap_factor(index_map)
        details["simplified_value"] = (
            2.0 ** (1.0 / q) * spec.B * theta * math.sqrt(q / _per_output_n(index_map))
        )
    return BoundReport(
        value=value,
        terms=(("small_p", value),),
        preconditions_checked=tuple(pre),
        details=details,
    )


def bound_mixed_mc(spec: MixedNormSpec, sample: DataSample, index_map: IndexMap) -> BoundReport:
    """Multi-category bound for p in [1, 2]: B sqrt(q T tr(C) / n).

    No side condition; at p = 1 the dual exponent is infinite and the bound
    degenerates to +inf (0 when the data is all zero).
    """
    if not index_map.is_multicategory():
        raise ValueError("bound_mixed_mc requires a multi-category index map")
    if spec.p > 2:
        raise ValueError("p > 2 routed to bound_mixed_upper")
    q = spec.q
    trace = float(np.trace(empirical_covariance(sample)))
    n = _per_output_n(index_map)
    if trace == 0.0 or spec.B == 0.0:
        value = 0.0
    elif math.isinf(q):
        value = math.inf
    else:
        value = spec.B * math.sqrt(q * index_map.T * trace / n)
    return BoundReport(value=value, terms=(("mc_small_p", value),), details={"q": q, "trace": trace})


def bound_tracenorm(spec: TraceNormSpec, sample: DataSample, index_map: IndexMap) -> BoundReport:
    """Trace-norm class bound:
    (B/N) sqrt(2 T max_t |I_t| tr(C_t) (ln N + 1)) + (B/N) sqrt(T lambda_max(sum_t |I_t| C_t))."""
    alphas = subset_squared_norms(sample, index_map)
    N, T = index_map.N, index_map.T
    x = sample.vectors
    weighted = np.zeros((sample.d, sample.d))
    for s in index_map.subsets:
        xs = x[list(s)]
        weighted += xs.T @ xs  # |I_t| C_t summed over t
    lam_weighted = largest_eigenvalue(weighted)
    log_term = spec.B / N * math.sqrt(2.0 * T * float(alphas.max()) * (math.log(N) + 1.0))
    spec_term = spec.B / N * math.sqrt(T * lam_weighted)
    details = {}
    if _is_simplified(sample, index_map):
        n = _per_output_n(index_map)
        theta = overlap_factor(index_map)
        lam = largest_eigenvalue(empirical_covariance(sample))
        details["simplified_value"] = spec.B * theta * (
            math.sqrt(2.0 * (math.log(n * T) + 1.0) / (n * T)) + math.sqrt(lam / n)
        )
    return BoundReport(
        value=log_term + spec_term,
        terms=(("log_term", log_term), ("spectral_term", spec_term)),
        details=details,
    )


def quotient_trace_vs_frobenius(sample: DataSample, index_map: IndexMap) -> BoundReport:
    """Bound on the trace-norm/Frobenius complexity quotient for unit-norm data:
    2 sqrt((ln(nT) + 1)/T) + sqrt(2 lambda_max(C) / tr(C))."""
    if not sample.is_unit_norm(_UNIT_TOL):
        raise ValueError("quotient bound requires unit-norm data")
    n = _per_output_n(index_map)
    T = index_map.T
    c = empirical_covariance(sample)
    trace = float(np.trace(c))
    lam = largest_eigenvalue(c)
    log_term = 2.0 * math.sqrt((math.log(n * T) + 1.0) / T)
    spec_term = math.sqrt(2.0 * lam / trace)
    return BoundReport(
        value=log_term + spec_term,
        terms=(("log_term", log_term), ("spectral_term", spec_term)),
        details={"effective_dimension": trace / lam if lam > 0 else math.inf},
    )


def chain_rule_components(spec: CompositeSpec, sample: DataSample, index_map: IndexMap) -> ChainRuleComponents:
    """Lipschitz constant, differential width, diameter and Gaussian width
    bounds for the composite class, free of unknown constants.

    The diameter bounds keep the factor 2 of a symmetric ball, and the
    (2,1)-constrained case uses its own radius b via ||W||_{2,2} <= ||W||_{2,1}.
    """
    theta = overlap_factor(index_map)
    L = spec.a * spec.lipschitz_phi * theta
    Q = L * math.sqrt(index_map.T)
    c = empirical_covariance(sample)
    trace = float(np.trace(c))
    lam = largest_eigenvalue(c)
    N, K, b = sample.N, spec.K, spec.b
    if spec.w_norm == "2inf":
        diameter = 2.0 * b * math.sqrt(K * N * lam)
        gwidth = b * K * math.sqrt(N * trace)
    elif spec.w_norm == "22":
        diameter = 2.0 * b * math.sqrt(N * lam)
        gwidth = b * math.sqrt(K * N * trace)
    else:
        diameter = 2.0 * b * math.sqrt(N * lam)
        gwidth = b * math.sqrt(2.0 * N * (trace + 8.0 * lam * math.log(K)))
    return ChainRuleComponents(lipschitz_F=L, Q_F=Q, diameter_Y=diameter, gwidth_Y=gwidth)


def bound_composite(
    spec: CompositeSpec,
    sample: DataSample,
    index_map: IndexMap,
    c1: float = 1.0,
    c2: float = 1.0,
) -> BoundReport:
    """Composite class bound, by hidden-layer constraint:

    2inf: L a b theta (c1 K sqrt(tr/(nT)) + c2 sqrt(K lam / n))
    22:   L a b theta (c1 sqrt(K tr/(nT)) + c2 sqrt(lam / n))
    21:   L a b theta (c1 sqrt((2 tr + 8 lam ln K)/(nT)) + c2 sqrt(lam / n))

    c1 and c2 are universal constants without published numeric values;
    defaults of 1.0 are flagged as nominal.
    """
    if c1 <= 0 or c2 <= 0:
        raise ValueError("c1 and c2 must be positive")
    theta = overlap_factor(index_map)
    prefactor = spec.lipschitz_phi * spec.a * spec.b * theta
    c = empirical_covariance(sample)
    trace = float(np.trace(c))
    lam = largest_eigenvalue(c)
    n = _per_output_n(index_map)
    T, K = index_map.T, spec.K
    if spec.w_norm == "2inf":
        t1 = prefactor * c1 * K * math.sqrt(trace / (n * T))
        t2 = prefactor * c2 * math.sqrt(K * lam / n)
    elif spec.w_norm == "22":
        t1 = prefactor * c1 * math.sqrt(K * trace / (n * T))
        t2 = prefactor * c2 * math.sqrt(lam / n)
    else:
        t1 = prefactor * c1 * math.sqrt((2.0 * trace + 8.0 * lam * math.log(K)) / (n * T))
        t2 = prefactor * c2 * math.sqrt(lam / n)
    return BoundReport(
        value=t1 + t2,
        terms=(("trace_term", t1), ("spectral_term", t2)),
        constants_used={"c1": c1, "c2": c2},
        details={"nominal_constants": (c1 == 1.0 and c2 == 1.0)},
    )


def risk_dominant_term(alpha: str, lipschitz: float, complexity: float) -> float:
    """Dominant excess-risk term: 2 sqrt(2) L R for multi-category coding,
    2 L R for multi-task."""
    if lipschitz < 0 or complexity < 0:
        raise ValueError("lipschitz and complexity must be nonnegative")
    if alpha == "mc":
        return 2.0 * math.sqrt(2.0) * lipschitz * complexity
    if alpha == "mt":
        return 2.0 * lipschitz * complexity
    raise ValueError("alpha must be 'mc' or 'mt'")
