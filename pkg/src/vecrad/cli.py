"""Command-line front end: estimates, bounds, comparisons, scaling studies,
and the verification suite.  All output is deterministic CSV."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Optional

import numpy as np

from . import bounds as bnd
from .classes import Activation, CompositeSpec, MixedNormSpec, TraceNormSpec
from .datagen import SpectrumSpec, generate, load_dataset, save_dataset
from .estimators import (
    AscentConfig,
    estimate_gaussian_width,
    estimate_rademacher,
    exact_rademacher,
)
from .indexing import IndexMap, multicategory_map, multitask_map, one_vs_one_map, overlap_factor
from .linalg import DataSample, empirical_covariance, largest_eigenvalue, spectral_norm
from .sampling import RngStream, sample_signs
from . import verifiers as ver

COMPARE_FIELDS = [
    "quantity", "class", "alpha", "T", "n_or_N", "K", "p",
    "value", "stderr", "trials", "seed", "status",
]
SCALING_FIELDS = ["sweep_param", "sweep_value"] + COMPARE_FIELDS + ["ratio_to_sqrtT"]
VERIFY_FIELDS = ["check", "instance", "lhs", "rhs", "passed"]


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return repr(x)
    return str(x)


def _check_keys(section: dict, allowed: set, path: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown config field: {path}.{key}")


def _get(section: dict, key: str, path: str, required: bool = True, default=None):
    if key not in section:
        if required:
            raise ConfigError(f"missing config field: {path}.{key}")
        return default
    return section[key]


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(cfg, {"dataset", "index_map", "class", "estimator", "bounds", "sweep", "seed"}, "config")
    return cfg


def _build_spectrum(gen_cfg: dict) -> SpectrumSpec:
    _check_keys(gen_cfg, {"d", "N", "profile", "d_eff", "exponent", "eigenvalues", "unit_norm"}, "dataset.generator")
    profile = _get(gen_cfg, "profile", "dataset.generator")
    unit = bool(_get(gen_cfg, "unit_norm", "dataset.generator", required=False, default=True))
    if profile == "whitened":
        d = int(_get(gen_cfg, "d", "dataset.generator"))
        d_eff = gen_cfg.get("d_eff")
        return SpectrumSpec.whitened(d, None if d_eff is None else int(d_eff), unit_norm=unit)
    if profile == "power_law":
        d = int(_get(gen_cfg, "d", "dataset.generator"))
        return SpectrumSpec.power_law(d, float(_get(gen_cfg, "exponent", "dataset.generator")), unit_norm=unit)
    if profile == "custom":
        eigs = _get(gen_cfg, "eigenvalues", "dataset.generator")
        return SpectrumSpec.custom([float(v) for v in eigs], unit_norm=unit)
    raise ConfigError(f"invalid config field: dataset.generator.profile = {profile!r}")


def build_dataset(cfg: dict, stream: RngStream, n_required: Optional[int] = None) -> DataSample:
    section = _get(cfg, "dataset", "config")
    _check_keys(section, {"path", "generator"}, "dataset")
    if ("path" in section) == ("generator" in section):
        raise ConfigError("dataset needs exactly one of dataset.path or dataset.generator")
    if "path" in section:
        sample = load_dataset(section["path"])
    else:
        gen_cfg = section["generator"]
        spectrum = _build_spectrum(gen_cfg)
        N = gen_cfg.get("N", n_required)
        if N is None:
            raise ConfigError("missing config field: dataset.generator.N")
        sample = generate(spectrum, int(N), stream)
    if n_required is not None and sample.N != n_required:
        raise ConfigError(f"dataset has N={sample.N} but the index map needs N={n_required}")
    return sample


def index_map_size(cfg_map: dict) -> Optional[int]:
    """N implied by the index map, when it determines one (mt only)."""
    kind = _get(cfg_map, "kind", "index_map")
    if kind == "mt":
        return int(_get(cfg_map, "T", "index_map")) * int(_get(cfg_map, "n", "index_map"))
    return None


def build_index_map(cfg_map: dict, N: int) -> IndexMap:
    _check_keys(cfg_map, {"kind", "T", "n", "classes"}, "index_map")
    kind = _get(cfg_map, "kind", "index_map")
    if kind == "mc":
        return multicategory_map(int(_get(cfg_map, "T", "index_map")), N)
    if kind == "mt":
        T, n = int(_get(cfg_map, "T", "index_map")), int(_get(cfg_map, "n", "index_map"))
        if T * n != N:
            raise ConfigError(f"index_map mt needs N = n*T = {n * T}, dataset has N={N}")
        return multitask_map(T, n)
    if kind == "1v1":
        C = int(_get(cfg_map, "classes", "index_map"))
        labels = [(i % C) + 1 for i in range(N)]
        return one_vs_one_map(labels)
    raise ConfigError(f"invalid config field: index_map.kind = {kind!r}")


def build_class(cfg_class: dict):
    kind = _get(cfg_class, "kind", "class")
    if kind == "mixed":
        _check_keys(cfg_class, {"kind", "p", "B"}, "class")
        p = _get(cfg_class, "p", "class")
        p = math.inf if p in ("inf", "Infinity") else float(p)
        return MixedNormSpec(p=p, B=float(_get(cfg_class, "B", "class")))
    if kind == "trace":
        _check_keys(cfg_class, {"kind", "B"}, "class")
        return TraceNormSpec(B=float(_get(cfg_class, "B", "class")))
    if kind == "composite":
        _check_keys(cfg_class, {"kind", "K", "w_norm", "b", "a", "activation", "scale", "l_phi"}, "class")
        act = Activation(
            kind=_get(cfg_class, "activation", "class", required=False, default="identity"),
            scale=float(_get(cfg_class, "scale", "class", required=False, default=1.0)),
        )
        l_phi = cfg_class.get("l_phi")
        return CompositeSpec(
            K=int(_get(cfg_class, "K", "class")),
            w_norm=_get(cfg_class, "w_norm", "class"),
            b=float(_get(cfg_class, "b", "class")),
            a=float(_get(cfg_class, "a", "class")),
            activation=act,
            l_phi=None if l_phi is None else float(l_phi),
        )
    raise ConfigError(f"invalid config field: class.kind = {kind!r}")


def build_estimator(cfg: dict, trials_override: Optional[int]):
    section = cfg.get("estimator", {})
    _check_keys(section, {"trials", "gaussian", "ascent"}, "estimator")
    trials = trials_override if trials_override is not None else int(section.get("trials", 2000))
    if trials < 2:
        raise ConfigError("estimator.trials must be >= 2")
    ascent_cfg = section.get("ascent", {})
    _check_keys(ascent_cfg, {"restarts", "steps", "step_size", "finite_diff"}, "estimator.ascent")
    try:
        ascent = AscentConfig(
            restarts=int(ascent_cfg.get("restarts", 8)),
            steps=int(ascent_cfg.get("steps", 200)),
            step_size=ascent_cfg.get("step_size"),
            finite_diff=bool(ascent_cfg.get("finite_diff", False)),
        )
    except ValueError as exc:
        raise ConfigError(f"estimator.ascent: {exc}") from None
    return trials, bool(section.get("gaussian", False)), ascent


def _class_label(spec) -> str:
    if isinstance(spec, MixedNormSpec):
        p = "inf" if math.isinf(spec.p) else _fmt(spec.p)
        return f"mixed(p={p},B={_fmt(spec.B)})"
    if isinstance(spec, TraceNormSpec):
        return f"trace(B={_fmt(spec.B)})"
    return (
        f"composite(K={spec.K},w={spec.w_norm},b={_fmt(spec.b)},a={_fmt(spec.a)},"
        f"act={spec.activation.kind},L={_fmt(spec.lipschitz_phi)})"
    )


def _base_row(spec, index_map: IndexMap, seed: int, alpha: str) -> dict:
    n_or_n = index_map.N // index_map.T if alpha == "mt" else index_map.N
    return {
        "class": _class_label(spec),
        "alpha": alpha,
        "T": index_map.T,
        "n_or_N": n_or_n,
        "K": spec.K if isinstance(spec, CompositeSpec) else "",
        "p": ("inf" if math.isinf(spec.p) else _fmt(spec.p)) if isinstance(spec, MixedNormSpec) else "",
        "value": "",
        "stderr": "",
        "trials": "",
        "seed": seed,
        "status": "",
    }


def _bound_rows(spec, sample, index_map, cfg_bounds, base, estimate=None):
    """Rows for every bound applicable to the class and map, with sandwich status."""
    rows = []

    def status_upper(value):
        if estimate is None:
            return ""
        return "ok" if estimate.mean - 3.0 * estimate.stderr <= value + 1e-12 else "sandwich_violation"

    def status_lower(value):
        if estimate is None:
            return ""
        return "ok" if value <= estimate.mean + 3.0 * estimate.stderr + 1e-12 else "sandwich_violation"

    def add(quantity, value, status=""):
        rows.append(dict(base, quantity=quantity, value=value, status=status))

    c1 = float(cfg_bounds.get("c1", 1.0))
    c2 = float(cfg_bounds.get("c2", 1.0))
    if isinstance(spec, MixedNormSpec):
        if spec.p >= 2:
            lower = bnd.bound_mixed_lower(spec, sample, index_map)
            upper = bnd.bound_mixed_upper(spec, sample, index_map)
            add("lower_bound", lower.value, status_lower(lower.value))
            add("upper_bound", upper.value, status_upper(upper.value))
        elif spec.p > 1:
            report = bnd.bound_mixed_small_p(spec, sample, index_map)
            add("small_p_bound", report.value, status_upper(report.value))
        if spec.p <= 2 and index_map.is_multicategory():
            report = bnd.bound_mixed_mc(spec, sample, index_map)
            add("mc_bound", report.value, status_upper(report.value))
    elif isinstance(spec, TraceNormSpec):
        report = bnd.bound_tracenorm(spec, sample, index_map)
        add("trace_bound", report.value, status_upper(report.value))
        for name, value in report.terms:
            add(f"trace_bound_{name}", value)
        if sample.is_unit_norm():
            quot = bnd.quotient_trace_vs_frobenius(sample, index_map)
            add("quotient_bound", quot.value)
            for name, value in quot.terms:
                add(f"quotient_{name}", value)
    else:
        report = bnd.bound_composite(spec, sample, index_map, c1=c1, c2=c2)
        add("composite_bound", report.value, status_upper(report.value))
        for name, value in report.terms:
            add(f"composite_{name}", value)
        comp = bnd.chain_rule_components(spec, sample, index_map)
        add("lipschitz_F_bound", comp.lipschitz_F)
        add("Q_F_bound", comp.Q_F)
        add("diameter_Y_bound", comp.diameter_Y)
        add("gwidth_Y_bound", comp.gwidth_Y)
    lip_key = "lipschitz_mc" if base["alpha"] == "mc" else "lipschitz_mt"
    lip = cfg_bounds.get(lip_key)
    if lip is not None and estimate is not None and base["alpha"] in ("mc", "mt"):
        add("risk_dominant_term", bnd.risk_dominant_term(base["alpha"], float(lip), estimate.mean))
    return rows


def _spectrum_rows(sample, index_map, spec, base):
    c = empirical_covariance(sample)
    rows = [
        dict(base, quantity="theta", value=overlap_factor(index_map)),
        dict(base, quantity="trace_of_C", value=float(np.trace(c))),
        dict(base, quantity="lambda_max_of_C", value=largest_eigenvalue(c)),
    ]
    return rows


def run_compare(cfg: dict, seed: int, trials_override: Optional[int], threads: int,
                do_estimate: bool = True, do_bounds: bool = True) -> list:
    master = RngStream(seed)
    cfg_map = _get(cfg, "index_map", "config")
    sample = build_dataset(cfg, master.substream(0), index_map_size(cfg_map))
    index_map = build_index_map(cfg_map, sample.N)
    spec = build_class(_get(cfg, "class", "config"))
    trials, do_gauss, ascent = build_estimator(cfg, trials_override)
    cfg_bounds = cfg.get("bounds", {})
    _check_keys(cfg_bounds, {"c1", "c2", "lipschitz_mc", "lipschitz_mt"}, "bounds")

    base = _base_row(spec, index_map, seed, _get(cfg_map, "kind", "index_map"))
    rows = _spectrum_rows(sample, index_map, spec, base)
    estimate = None
    if do_estimate:
        estimate = estimate_rademacher(spec, sample, index_map, trials, master.substream(1),
                                       ascent=ascent, threads=threads)
        rows.append(dict(base, quantity="estimate", value=estimate.mean,
                         stderr=estimate.stderr, trials=trials, status="ok"))
        if isinstance(spec, (MixedNormSpec, TraceNormSpec)) and index_map.support_size <= 20:
            rows.append(dict(base, quantity="exact", value=exact_rademacher(spec, sample, index_map)))
        if do_gauss:
            gw = estimate_gaussian_width(spec, sample, index_map, trials, master.substream(2),
                                         normalized=True, ascent=ascent, threads=threads)
            rows.append(dict(base, quantity="gauss_width_normalized", value=gw.mean,
                             stderr=gw.stderr, trials=trials))
    if do_bounds:
        rows.extend(_bound_rows(spec, sample, index_map, cfg_bounds, base, estimate))
    return rows


def run_scaling_study(cfg: dict, seed: int, trials_override: Optional[int], threads: int) -> list:
    sweep = _get(cfg, "sweep", "config")
    _check_keys(sweep, {"param", "values"}, "sweep")
    param = _get(sweep, "param", "sweep")
    values = _get(sweep, "values", "sweep")
    if param not in ("T", "n", "K", "d"):
        raise ConfigError(f"invalid config field: sweep.param = {param!r}")
    if not values:
        raise ConfigError("sweep.values must be nonempty")
    cfg_map = dict(_get(cfg, "index_map", "config"))
    _check_keys(cfg_map, {"kind", "T", "n"}, "index_map")
    cfg_class = dict(_get(cfg, "class", "config"))
    dataset_cfg = _get(cfg, "dataset", "config")
    if "generator" not in dataset_cfg:
        raise ConfigError("scaling-study requires dataset.generator")
    trials, _, ascent = build_estimator(cfg, trials_override)
    cfg_bounds = cfg.get("bounds", {})

    master = RngStream(seed)
    rows = []
    for k, value in enumerate(values):
        T = int(cfg_map.get("T", 2))
        n = int(cfg_map.get("n", 8))
        gen_cfg = dict(dataset_cfg["generator"])
        if param == "T":
            T = int(value)
        elif param == "n":
            n = int(value)
        elif param == "d":
            gen_cfg["d"] = int(value)
            if gen_cfg.get("d_eff") is not None:
                gen_cfg["d_eff"] = int(value)
        elif param == "K":
            cfg_class["K"] = int(value)
        N = T * n
        gen_cfg["N"] = N
        point = master.substream(100 + k)
        sample = generate(_build_spectrum(gen_cfg), N, point.substream(0))
        spec = build_class(cfg_class)
        maps = {"mc": multicategory_map(T, N), "mt": multitask_map(T, n)}
        estimates = {}
        for j, (alpha, imap) in enumerate(maps.items()):
            est = estimate_rademacher(spec, sample, imap, trials, point.substream(1 + j),
                                      ascent=ascent, threads=threads)
            estimates[alpha] = est
            base = _base_row(spec, imap, seed, alpha)
            extra = {"sweep_param": param, "sweep_value": value, "ratio_to_sqrtT": ""}
            rows.append(dict(base, quantity="estimate", value=est.mean, stderr=est.stderr,
                             trials=trials, status="ok", **extra))
            rows.extend(dict(r, **extra) for r in _bound_rows(spec, sample, imap, cfg_bounds, base, est))
            if sample.is_unit_norm():
                quot = bnd.quotient_trace_vs_frobenius(sample, imap)
                rows.append(dict(base, quantity="quotient_bound", value=quot.value, **extra))
                for name, term in quot.terms:
                    rows.append(dict(base, quantity=f"quotient_{name}", value=term, **extra))
        ratio = estimates["mc"].mean / estimates["mt"].mean if estimates["mt"].mean > 0 else math.inf
        rel = 0.0
        if estimates["mc"].mean > 0 and estimates["mt"].mean > 0:
            rel = ratio * math.sqrt(
                (estimates["mc"].stderr / estimates["mc"].mean) ** 2
                + (estimates["mt"].stderr / estimates["mt"].mean) ** 2
            )
        base = _base_row(spec, maps["mc"], seed, "")
        rows.append(dict(base, quantity="ratio_mc_over_mt", value=ratio, stderr=rel, trials=trials,
                         sweep_param=param, sweep_value=value,
                         ratio_to_sqrtT=ratio / math.sqrt(T)))
    return rows


def run_verify(seed: int, trials: int = 2000, corrupt: bool = False) -> tuple:
    """Run every verifier family plus the module invariants; returns
    (rows, all_passed)."""
    master = RngStream(seed)
    rows = []

    def add(check, instance, lhs, rhs, passed):
        rows.append({"check": check, "instance": instance, "lhs": lhs, "rhs": rhs,
                     "passed": "pass" if passed else "FAIL"})

    # PSD moment ordering on exactly enumerated sign vectors
    gen = master.substream(0).generator()
    for k in range(25):
        n = int(gen.integers(1, 7))
        d = int(gen.integers(1, 5))
        p = int(gen.integers(1, 4))
        sample = DataSample(gen.standard_normal((n, d)))
        res = ver.check_moment_psd_ordering(sample, p)
        add("moment_psd_ordering", res.instance, res.min_eigenvalue_of_gap, -1e-9, res.passed)

    # lower bound on the expected sign-sum norm
    gen = master.substream(1).generator()
    for k in range(25):
        n = int(gen.integers(1, 11))
        d = int(gen.integers(1, 5))
        sample = DataSample(gen.standard_normal((n, d)))
        lhs, rhs, passed = ver.check_szarek_lower(sample)
        if corrupt:
            rhs, passed = 10.0 * rhs, lhs >= 10.0 * rhs - 1e-9
        add("szarek_lower", f"n={n} d={d}", lhs, rhs, passed)

    # vector contraction inequality on finite classes
    gen = master.substream(2).generator()
    for k in range(25):
        n, T, d = 2, 2, 2
        sample = DataSample(gen.standard_normal((n, d)))
        hs = []
        for _ in range(n):
            g = gen.standard_normal((3, T))
            g *= (gen.random((3, 1)) / np.linalg.norm(g, axis=1, keepdims=True))
            hs.append(ver.MaxAffine(g, gen.standard_normal(3)))
        cands = [gen.standard_normal((T, d)) for _ in range(4)]
        lhs, rhs, passed = ver.check_contraction(sample, hs, cands)
        add("contraction", f"instance={k}", lhs, rhs, passed)

    # operator-norm concentration of summed rank-one sign operators
    for k in range(5):
        gen = master.substream(3).substream(k).generator()
        T, n, d = 2 + k % 3, 4, 4
        sample = DataSample(gen.standard_normal((T * n, d)))
        imap = multitask_map(T, n)
        lhs, rhs, passed = ver.check_matrix_concentration(sample, imap, trials, master.substream(3).substream(50 + k))
        add("matrix_concentration", f"T={T} n={n} d={d}", lhs, rhs, passed)

    # overlap-factor inequality and tightness
    gen = master.substream(4).generator()
    worst = 0.0
    imap = one_vs_one_map([(i % 4) + 1 for i in range(12)])
    theta2 = overlap_factor(imap) ** 2
    for _ in range(100):
        a = gen.random(imap.N)
        worst = max(worst, sum(a[list(s)].sum() for s in imap.subsets) / (theta2 * a.sum()))
    add("theta_inequality", "1v1 C=4 N=12", worst, 1.0, worst <= 1.0 + 1e-12)
    busiest = int(np.argmax(imap.multiplicities()))
    a = np.zeros(imap.N)
    a[busiest] = 1.0
    ratio = sum(a[list(s)].sum() for s in imap.subsets) / (theta2 * a.sum())
    add("theta_tightness", "indicator of busiest example", ratio, 1.0, abs(ratio - 1.0) <= 1e-12)

    # pathwise class nesting under shared draws
    gen_stream = master.substream(5)
    sample = generate(SpectrumSpec.whitened(4), 8, gen_stream.substream(0))
    imap = multicategory_map(3, 8)
    from .classes import sup_mixed_norm

    violations = 0
    for k in range(200):
        draw = sample_signs(gen_stream.substream(1 + k), imap)
        s_inf = sup_mixed_norm(MixedNormSpec(p=math.inf, B=1.0), draw, sample, imap)
        s_3 = sup_mixed_norm(MixedNormSpec(p=3.0, B=1.0), draw, sample, imap)
        s_2 = sup_mixed_norm(MixedNormSpec(p=2.0, B=1.0), draw, sample, imap)
        if not (s_inf <= s_3 + 1e-9 and s_3 <= s_2 + 1e-9):
            violations += 1
    add("nesting_pathwise", "200 shared draws", violations, 0.0, violations == 0)

    # exact enumeration vs Monte Carlo, and the two-sided bounds around it
    est_stream = master.substream(6)
    spec = MixedNormSpec(p=math.inf, B=1.0)
    sample2 = generate(SpectrumSpec.whitened(3), 4, est_stream.substream(0))
    imap2 = multitask_map(2, 2)
    exact = exact_rademacher(spec, sample2, imap2)
    est = estimate_rademacher(spec, sample2, imap2, 4000, est_stream.substream(1))
    add("exact_vs_mc", "mt T=2 n=2", abs(est.mean - exact), 3.0 * est.stderr,
        abs(est.mean - exact) <= 3.0 * est.stderr + 1e-12)
    lower = bnd.bound_mixed_lower(spec, sample2, imap2).value
    upper = bnd.bound_mixed_upper(spec, sample2, imap2).value
    add("sandwich_exact", "mt T=2 n=2", exact, upper, lower - 1e-12 <= exact <= upper + 1e-12)

    # Rademacher vs sqrt(pi/2) Gaussian on the same class
    gw = estimate_gaussian_width(spec, sample2, imap2, 4000, est_stream.substream(2), normalized=True)
    bound = math.sqrt(math.pi / 2.0) * gw.mean
    band = 3.0 * math.sqrt(est.stderr**2 + (math.pi / 2.0) * gw.stderr**2)
    add("rademacher_vs_gaussian", "mt T=2 n=2", est.mean, bound + band, est.mean <= bound + band)

    # projection properties
    gen = master.substream(7).generator()
    ok_ball, ok_idem, ok_nonexp = True, True, True
    from .classes import project_weights, weight_norm

    for kind in ("2inf", "22", "21"):
        for _ in range(50):
            W = gen.standard_normal((3, 4)) * 2.0
            V = gen.standard_normal((3, 4)) * 2.0
            radius = 1.0
            PW, PV = project_weights(kind, radius, W), project_weights(kind, radius, V)
            ok_ball &= weight_norm(kind, PW) <= radius + 1e-9
            ok_idem &= float(np.max(np.abs(project_weights(kind, radius, PW) - PW))) <= 1e-12
            ok_nonexp &= np.linalg.norm(PW - PV) <= np.linalg.norm(W - V) + 1e-9
    add("projection_in_ball", "150 random matrices", float(ok_ball), 1.0, ok_ball)
    add("projection_idempotent", "150 random matrices", float(ok_idem), 1.0, ok_idem)
    add("projection_nonexpansive", "150 random pairs", float(ok_nonexp), 1.0, ok_nonexp)

    # spectral norm consistency
    gen = master.substream(8).generator()
    worst = 0.0
    for _ in range(20):
        D = gen.standard_normal((3, 5))
        s = spectral_norm(D)
        lam = largest_eigenvalue(D.T @ D)
        worst = max(worst, abs(s * s - lam) / max(lam, 1e-30))
    add("sigma_vs_lambda", "20 random 3x5", worst, 1e-9, worst <= 1e-9)

    all_passed = all(r["passed"] == "pass" for r in rows)
    return rows, all_passed


def _write_rows(rows, fields, out_path: Optional[str]) -> None:
    def emit(fh):
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k, "")) for k in fields})

    if out_path:
        with open(out_path, "w", encoding="ascii", newline="") as fh:
            emit(fh)
    else:
        emit(sys.stdout)


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument("--trials", type=int, default=None, help="override estimator.trials")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for trials")
    parser.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vecrad",
        description="Estimate vector-valued sign/Gaussian complexities, evaluate the "
        "matching norm-based bounds, and verify the inequalities they rest on.",
        epilog=(
            "Config files are JSON with sections dataset (path or generator with d, N, "
            "profile whitened|power_law|custom, d_eff, exponent, eigenvalues, unit_norm), "
            "index_map (kind mc|mt|1v1 with T, n, classes), class (kind mixed|trace|composite "
            "with p, B, K, w_norm, b, a, activation, scale, l_phi), estimator (trials, gaussian, "
            "ascent.restarts/steps/step_size/finite_diff; trials default 2000, ascent defaults "
            "8 restarts, 200 steps, step 0.1*b/sqrt(K)), bounds (c1, c2 default 1.0 nominal, "
            "lipschitz_mc, lipschitz_mt), and for scaling-study a sweep (param T|n|K|d, values)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("estimate", "Monte Carlo complexity estimate for one configuration"),
        ("bound", "closed-form bounds for one configuration"),
        ("compare", "estimate plus bounds with sandwich status flags"),
        ("scaling-study", "sweep T, n, K or d and record estimates, bounds and ratios"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config file")
        _add_common(p)

    p = sub.add_parser("verify", help="run every verifier; exit 1 if any check fails")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--out", default=None)
    p.add_argument("--self-test-corrupt", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("gen-data", help="write a generated dataset to a file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            rows, ok = run_verify(args.seed, trials=args.trials, corrupt=args.self_test_corrupt)
            _write_rows(rows, VERIFY_FIELDS, args.out)
            n_fail = sum(r["passed"] != "pass" for r in rows)
            print(f"verify: {len(rows) - n_fail}/{len(rows)} checks passed", file=sys.stderr)
            return 0 if ok else 1
        if args.command == "gen-data":
            cfg = load_config(args.config)
            section = _get(cfg, "dataset", "config")
            if "generator" not in section:
                raise ConfigError("gen-data requires dataset.generator")
            sample = build_dataset(cfg, RngStream(args.seed).substream(0))
            save_dataset(sample, args.out)
            print(f"wrote {sample.N} x {sample.d} dataset to {args.out}", file=sys.stderr)
            return 0
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        if args.command == "scaling-study":
            rows = run_scaling_study(cfg, seed, args.trials, args.threads)
            _write_rows(rows, SCALING_FIELDS, args.out)
            return 0
        do_estimate = args.command in ("estimate", "compare")
        do_bounds = args.command in ("bound", "compare")
        rows = run_compare(cfg, seed, args.trials, args.threads,
                           do_estimate=do_estimate, do_bounds=do_bounds)
        _write_rows(rows, COMPARE_FIELDS, args.out)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
