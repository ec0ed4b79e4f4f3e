import math

import numpy as np
import pytest

from vecrad import (
    Activation,
    CompositeSpec,
    DataSample,
    MixedNormSpec,
    RngStream,
    TraceNormSpec,
    apply_activation,
    multicategory_map,
    multitask_map,
    project_weights,
    sample_signs,
    spectral_norm,
    sup_composite_given_w,
    sup_mixed_norm,
    sup_trace_norm,
    weight_norm,
)

from conftest import unit_sample


def _search_direction_max(value, dim, seed, corners=True):
    """Multi-scale random search for max of `value` over directions in R^dim."""
    gen = np.random.default_rng(seed)
    candidates = [np.ones(dim)]
    if corners:
        candidates += [e for e in np.eye(dim)]
    candidates += [np.abs(gen.standard_normal(dim)) for _ in range(2000)]
    best_c, best = None, -np.inf
    for c in candidates:
        v = value(c)
        if v > best:
            best_c, best = c, v
    for scale in (0.5, 0.2, 0.05, 0.02, 0.005, 0.001):
        for _ in range(400):
            cand = best_c + scale * gen.standard_normal(dim)
            v = value(cand)
            if v > best:
                best_c, best = cand, v
    return best


def ascent_sup_oracle(radius, p, V, seed=0):
    """Independent maximizer of sum_t <w_t, V_t> over the (2,p) ball.

    Each row aligns with V_t by Cauchy-Schwarz (an exact, elementary step),
    which leaves a search over the nonnegative row-norm profile on the l_p
    sphere.  Never uses the dual-norm formula.
    """
    nu = np.linalg.norm(V, axis=1)

    def value(c):
        c = np.maximum(c, 0.0)
        n = np.max(c) if math.isinf(p) else float(np.sum(c**p) ** (1.0 / p))
        return radius * float(c @ nu) / n if n > 0 else 0.0

    return _search_direction_max(value, V.shape[0], seed)


def trace_sup_oracle(radius, D, seed=0):
    """Independent maximizer of <W, D> over the trace-norm ball.

    The objective is linear, so the max sits at an extreme point
    radius * u v^T; the u direction aligns with D v exactly, leaving a
    search over unit vectors v.
    """

    def value(v):
        n = np.linalg.norm(v)
        return radius * float(np.linalg.norm(D @ v)) / n if n > 0 else 0.0

    return _search_direction_max(value, D.shape[1], seed, corners=False)


class TestSupMixedNorm:
    def test_orthonormal_pair_sup(self):
        sample = DataSample(np.eye(2))
        imap = multitask_map(1, 2)
        draw = sample_signs(RngStream(0), imap)
        spec = MixedNormSpec(p=math.inf, B=1.0)
        # T=1: the sup is ||V_1|| and every sign pattern gives sqrt(2)
        assert sup_mixed_norm(spec, draw, sample, imap) == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_zero_radius(self, rng):
        sample = unit_sample(rng, 4, 3)
        imap = multicategory_map(2, 4)
        draw = sample_signs(RngStream(1), imap)
        assert sup_mixed_norm(MixedNormSpec(p=2, B=0.0), draw, sample, imap) == 0.0

    def test_two_equal_component_norms(self):
        # V_1 = V_2 with norm 1 each: sup = B sqrt(T) * sqrt(2) = 2
        sample = DataSample(np.array([[1.0, 0.0]]))
        imap = multicategory_map(2, 1)
        draw = sample_signs(RngStream(4), imap)
        value = sup_mixed_norm(MixedNormSpec(p=2, B=1.0), draw, sample, imap)
        assert value == pytest.approx(2.0, rel=1e-12)

    def test_duality_matches_ascent_oracle(self, rng):
        for k, p in enumerate([2.0, 3.0, math.inf, 1.5, 1.0]):
            T, d, N = 3, 4, 6
            sample = DataSample(rng.standard_normal((N, d)))
            imap = multicategory_map(T, N)
            draw = sample_signs(RngStream(10 + k), imap)
            spec = MixedNormSpec(p=p, B=0.8)
            V = np.asarray(draw.values @ sample.vectors)
            oracle = ascent_sup_oracle(spec.radius(T), p, V, seed=k)
            assert sup_mixed_norm(spec, draw, sample, imap) == pytest.approx(oracle, rel=1e-3)

    def test_pathwise_nesting(self, rng):
        sample = unit_sample(rng, 8, 5)
        imap = multicategory_map(3, 8)
        for k in range(50):
            draw = sample_signs(RngStream(70, k), imap)
            s_inf = sup_mixed_norm(MixedNormSpec(p=math.inf, B=1.0), draw, sample, imap)
            s_p = sup_mixed_norm(MixedNormSpec(p=2.7, B=1.0), draw, sample, imap)
            s_2 = sup_mixed_norm(MixedNormSpec(p=2.0, B=1.0), draw, sample, imap)
            assert s_inf <= s_p * (1 + 1e-12)
            assert s_p <= s_2 * (1 + 1e-12)

    def test_positive_homogeneity(self, rng):
        sample = unit_sample(rng, 5, 3)
        imap = multitask_map(1, 5)
        draw = sample_signs(RngStream(3), imap)
        v1 = sup_mixed_norm(MixedNormSpec(p=2, B=1.3), draw, sample, imap)
        v2 = sup_mixed_norm(MixedNormSpec(p=2, B=2.6), draw, sample, imap)
        assert v2 == 2.0 * v1

    def test_dimension_mismatch(self, rng):
        sample = unit_sample(rng, 4, 3)
        other = unit_sample(rng, 5, 3)
        imap = multicategory_map(2, 4)
        draw = sample_signs(RngStream(0), imap)
        with pytest.raises(ValueError):
            sup_mixed_norm(MixedNormSpec(p=2, B=1.0), draw, other, multicategory_map(2, 5))


class TestSupTraceNorm:
    def test_rank_one_reduction(self, rng):
        sample = unit_sample(rng, 5, 4)
        imap = multitask_map(1, 5)
        draw = sample_signs(RngStream(8), imap)
        tr = sup_trace_norm(TraceNormSpec(B=1.0), draw, sample, imap)
        mx = sup_mixed_norm(MixedNormSpec(p=2, B=1.0), draw, sample, imap)
        assert tr == pytest.approx(mx, rel=1e-12)

    def test_zero_radius(self, rng):
        sample = unit_sample(rng, 4, 2)
        imap = multicategory_map(2, 4)
        draw = sample_signs(RngStream(2), imap)
        assert sup_trace_norm(TraceNormSpec(B=0.0), draw, sample, imap) == 0.0

    def test_identity_rows(self):
        # V_1 = e_1, V_2 = e_2: singular values are (1, 1), sup = B sqrt(2)
        sample = DataSample(np.eye(2))
        imap = multitask_map(2, 1)
        draw = sample_signs(RngStream(5), imap)
        value = sup_trace_norm(TraceNormSpec(B=1.5), draw, sample, imap)
        assert value == pytest.approx(1.5 * math.sqrt(2.0), rel=1e-9)

    def test_matches_spectral_norm_contract(self, rng):
        sample = unit_sample(rng, 6, 4)
        imap = multicategory_map(3, 6)
        draw = sample_signs(RngStream(11), imap)
        D = np.asarray(draw.values @ sample.vectors)
        expect = math.sqrt(3.0) * spectral_norm(D)
        assert sup_trace_norm(TraceNormSpec(B=1.0), draw, sample, imap) == pytest.approx(expect, rel=1e-9)

    def test_trace_ascent_oracle(self, rng):
        sample = DataSample(rng.standard_normal((5, 3)))
        imap = multicategory_map(2, 5)
        draw = sample_signs(RngStream(13), imap)
        spec = TraceNormSpec(B=0.7)
        D = np.asarray(draw.values @ sample.vectors)
        oracle = trace_sup_oracle(spec.radius(2), D, seed=5)
        assert sup_trace_norm(spec, draw, sample, imap) == pytest.approx(oracle, rel=1e-3)


class TestSupComposite:
    def test_zero_readout(self, rng):
        sample = unit_sample(rng, 3, 2)
        imap = multicategory_map(2, 3)
        draw = sample_signs(RngStream(0), imap)
        spec = CompositeSpec(K=2, w_norm="22", b=1.0, a=0.0)
        W = np.zeros((2, 2))
        assert sup_composite_given_w(spec, W, draw, sample, imap) == 0.0

    def test_identity_collapse(self, rng):
        # phi = id and W = c*I reduce to a*c*sum_t ||V_t||
        sample = unit_sample(rng, 4, 3)
        imap = multitask_map(2, 2)
        draw = sample_signs(RngStream(6), imap)
        c = 0.5
        spec = CompositeSpec(K=3, w_norm="2inf", b=1.0, a=2.0, activation=Activation("identity"))
        value = sup_composite_given_w(spec, c * np.eye(3), draw, sample, imap)
        norms = np.linalg.norm(np.asarray(draw.values @ sample.vectors), axis=1)
        assert value == pytest.approx(2.0 * c * norms.sum(), rel=1e-12)

    def test_scalar_case(self):
        sample = DataSample(np.array([[1.0]]))
        imap = multitask_map(1, 1)
        draw = sample_signs(RngStream(0), imap)
        spec = CompositeSpec(K=1, w_norm="22", b=1.0, a=1.0, activation=Activation("identity"))
        assert sup_composite_given_w(spec, np.array([[1.0]]), draw, sample, imap) == pytest.approx(1.0)

    def test_infeasible_w(self, rng):
        sample = unit_sample(rng, 3, 2)
        imap = multicategory_map(1, 3)
        draw = sample_signs(RngStream(1), imap)
        spec = CompositeSpec(K=2, w_norm="21", b=1.0, a=1.0)
        with pytest.raises(ValueError, match="W outside ball"):
            sup_composite_given_w(spec, np.ones((2, 2)), draw, sample, imap)


class TestProjection:
    def test_feasible_unchanged(self, rng):
        for kind in ("2inf", "22", "21"):
            W = rng.standard_normal((3, 4)) * 0.01
            np.testing.assert_array_equal(project_weights(kind, 1.0, W), W)

    def test_row_clip(self):
        W = np.array([[2.0, 0.0], [0.0, 0.5]])
        P = project_weights("2inf", 1.0, W)
        np.testing.assert_allclose(np.linalg.norm(P, axis=1), [1.0, 0.5])

    def test_group_soft_threshold(self):
        # row norms (3, 1) onto sum <= 2: threshold 1 gives (2, 0)
        W = np.array([[3.0, 0.0], [0.0, 1.0]])
        P = project_weights("21", 2.0, W)
        np.testing.assert_allclose(np.linalg.norm(P, axis=1), [2.0, 0.0], atol=1e-12)

    def test_global_rescale(self):
        W = np.array([[3.0, 4.0]])
        P = project_weights("22", 1.0, W)
        assert np.linalg.norm(P) == pytest.approx(1.0)

    def test_properties(self, rng):
        for kind in ("2inf", "22", "21"):
            for _ in range(100):
                W = rng.standard_normal((4, 3)) * 2
                V = rng.standard_normal((4, 3)) * 2
                PW = project_weights(kind, 1.0, W)
                PV = project_weights(kind, 1.0, V)
                assert weight_norm(kind, PW) <= 1.0 + 1e-9
                assert np.max(np.abs(project_weights(kind, 1.0, PW) - PW)) <= 1e-12
                assert np.linalg.norm(PW - PV) <= np.linalg.norm(W - V) + 1e-9

    def test_projection_is_closest_point(self, rng):
        # oracle: no random feasible point may beat the projection distance
        for kind in ("2inf", "22", "21"):
            W = rng.standard_normal((3, 3)) * 2
            P = project_weights(kind, 1.0, W)
            dist = np.linalg.norm(W - P)
            for _ in range(300):
                Z = project_weights(kind, 1.0, rng.standard_normal((3, 3)) * 2)
                assert np.linalg.norm(W - Z) >= dist - 1e-9


class TestActivation:
    def test_relu(self):
        act = Activation("relu")
        np.testing.assert_array_equal(apply_activation(act, np.array([-1.0, 2.0])), [0.0, 2.0])

    def test_tanh_at_zero(self):
        assert Activation("tanh")(np.array([0.0]))[0] == 0.0

    def test_identity(self, rng):
        v = rng.standard_normal(5)
        np.testing.assert_array_equal(Activation("identity")(v), v)

    def test_zero_maps_to_zero(self):
        for kind in ("identity", "relu", "tanh"):
            for scale in (1.0, 2.5):
                assert np.all(Activation(kind, scale)(np.zeros(3)) == 0.0)

    def test_empirical_lipschitz(self, rng):
        for kind in ("identity", "relu", "tanh"):
            for scale in (1.0, 0.5, 3.0):
                act = Activation(kind, scale)
                for _ in range(1000):
                    u, v = rng.standard_normal(4), rng.standard_normal(4)
                    num = np.linalg.norm(act(u) - act(v))
                    den = np.linalg.norm(u - v)
                    assert num <= act.lipschitz * den + 1e-12

    def test_scaled_lipschitz(self):
        assert Activation("relu", 2.0).lipschitz == 2.0
        assert Activation("tanh").lipschitz == 1.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown activation"):
            Activation("sigmoid")
