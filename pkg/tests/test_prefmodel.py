import numpy as np
import pytest

from vibropref.prefmodel import (
    ComparisonRecord,
    FitConvergenceError,
    KernelConfig,
    LikelihoodConfig,
    PreferencePosterior,
    effective_noise,
    fit_map,
    fit_posterior,
    gram,
    index_dataset,
    kernel,
    kernel_matrix,
    laplace,
    log_posterior,
    posterior_cov,
    posterior_mean,
    predict,
    predict_pair,
)
from vibropref.signal import NormalizedPoint


def random_point(rng):
    return NormalizedPoint(tuple(rng.uniform(size=4)))


def random_dataset(rng, n_points=10, n_records=20):
    pts = [random_point(rng) for _ in range(n_points)]
    recs = []
    for _ in range(n_records):
        i, j = rng.choice(n_points, size=2, replace=False)
        recs.append(
            ComparisonRecord(
                pts[i], pts[j], int(rng.choice([-1, 1])), int(rng.integers(1, 6))
            )
        )
    return pts, recs


class TestEffectiveNoise:
    # sqrt(2*0.1^2 + u(c)^2) evaluated by hand for the default table
    def test_very_sure(self):
        rec = ComparisonRecord(
            NormalizedPoint((0.0,) * 4), NormalizedPoint((1.0,) * 4), +1, 5
        )
        assert effective_noise(rec, LikelihoodConfig()) == pytest.approx(
            0.14177446878757827, rel=1e-12
        )

    def test_very_unsure(self):
        rec = ComparisonRecord(
            NormalizedPoint((0.0,) * 4), NormalizedPoint((1.0,) * 4), +1, 1
        )
        assert effective_noise(rec, LikelihoodConfig()) == pytest.approx(
            9.001111042532472, rel=1e-12
        )

    def test_midpoint(self):
        rec = ComparisonRecord(
            NormalizedPoint((0.0,) * 4), NormalizedPoint((1.0,) * 4), +1, 3
        )
        assert effective_noise(rec, LikelihoodConfig()) == pytest.approx(
            1.705872210923198, rel=1e-12
        )

    def test_strictly_decreasing_in_confidence(self):
        cfg = LikelihoodConfig()
        a = NormalizedPoint((0.0,) * 4)
        b = NormalizedPoint((1.0,) * 4)
        noises = [effective_noise(ComparisonRecord(a, b, +1, c), cfg) for c in range(1, 6)]
        assert all(x > y for x, y in zip(noises, noises[1:]))

    def test_table_validation(self):
        with pytest.raises(ValueError):
            LikelihoodConfig(confidence_noise={1: 9.0, 2: 3.0, 3: 3.0, 4: 0.6, 5: 0.01})
        with pytest.raises(ValueError):
            LikelihoodConfig(confidence_noise={1: 9.0, 2: 3.0, 3: 1.7})
        with pytest.raises(ValueError):
            LikelihoodConfig(baseline_jitter=0.0)


class TestKernel:
    def test_self_covariance_is_signal_variance(self):
        cfg = KernelConfig(signal_variance=1.3)
        x = NormalizedPoint((0.2, 0.4, 0.6, 0.8))
        assert kernel(x, x, cfg) == pytest.approx(1.3, rel=1e-12)

    def test_one_lengthscale_apart(self):
        # distance equal to the lengthscale gives exp(-1/2)
        cfg = KernelConfig()
        x = NormalizedPoint((0.0, 0.0, 0.0, 0.0))
        y = NormalizedPoint((0.25, 0.0, 0.0, 0.0))
        assert kernel(x, y, cfg) == pytest.approx(0.6065306597126334, rel=1e-12)

    def test_matrix_matches_pairwise(self):
        rng = np.random.default_rng(0)
        cfg = KernelConfig()
        pts = [random_point(rng) for _ in range(6)]
        K = kernel_matrix(pts, pts, cfg)
        for i in range(6):
            for j in range(6):
                assert K[i, j] == pytest.approx(kernel(pts[i], pts[j], cfg), rel=1e-12)
        np.testing.assert_allclose(K, K.T, atol=0)

    def test_gram_adds_jitter_and_is_choleskyable(self):
        rng = np.random.default_rng(1)
        cfg = KernelConfig(gram_jitter=1e-6)
        pts = [random_point(rng) for _ in range(8)]
        K = gram(pts, cfg)
        assert K[0, 0] == pytest.approx(cfg.signal_variance + 1e-6, rel=1e-12)
        np.linalg.cholesky(K)


class TestIndexDataset:
    def test_dedup_by_exact_coords(self):
        a = NormalizedPoint((0.1, 0.2, 0.3, 0.4))
        b = NormalizedPoint((0.5, 0.6, 0.7, 0.8))
        a2 = NormalizedPoint((0.1, 0.2, 0.3, 0.4))
        recs = [ComparisonRecord(a, b, +1, 3), ComparisonRecord(b, a2, -1, 2)]
        pts, ia, ib = index_dataset(recs)
        assert len(pts) == 2
        assert list(ia) == [0, 1]
        assert list(ib) == [1, 0]

    def test_extra_points_lead_the_ordering(self):
        a = NormalizedPoint((0.1, 0.2, 0.3, 0.4))
        b = NormalizedPoint((0.5, 0.6, 0.7, 0.8))
        probe = NormalizedPoint((0.9, 0.9, 0.9, 0.9))
        pts, ia, ib = index_dataset([ComparisonRecord(a, b, +1, 3)], points=[probe])
        assert pts[0] == probe and len(pts) == 3


class TestLogPosterior:
    def test_value_at_zero_is_records_times_log_half(self):
        rng = np.random.default_rng(2)
        _, recs = random_dataset(rng, n_points=6, n_records=9)
        pts, _, _ = index_dataset(recs)
        value, _, _ = log_posterior(
            np.zeros(len(pts)), recs, KernelConfig(), LikelihoodConfig()
        )
        assert value == pytest.approx(9 * np.log(0.5), rel=1e-12)

    def test_gradient_and_hessian_match_finite_differences(self):
        rng = np.random.default_rng(3)
        kcfg, lcfg = KernelConfig(), LikelihoodConfig()
        for _ in range(10):
            _, recs = random_dataset(rng, n_points=7, n_records=12)
            pts, _, _ = index_dataset(recs)
            n = len(pts)
            f = rng.normal(scale=0.5, size=n)
            _, grad, hess = log_posterior(f, recs, kcfg, lcfg)
            h = 1e-5
            fd_grad = np.empty(n)
            fd_hess = np.empty((n, n))
            for i in range(n):
                e = np.zeros(n)
                e[i] = h
                vp_, gp_, _ = log_posterior(f + e, recs, kcfg, lcfg)
                vm_, gm_, _ = log_posterior(f - e, recs, kcfg, lcfg)
                fd_grad[i] = (vp_ - vm_) / (2 * h)
                fd_hess[:, i] = (gp_ - gm_) / (2 * h)
            assert np.linalg.norm(grad - fd_grad) / max(1.0, np.linalg.norm(grad)) < 1e-5
            assert np.linalg.norm(hess - fd_hess) / max(1.0, np.linalg.norm(hess)) < 1e-5

    def test_finite_for_extreme_gaps(self):
        # log Phi must not underflow even 30 noise-scales into the tail
        a = NormalizedPoint((0.0,) * 4)
        b = NormalizedPoint((1.0,) * 4)
        lcfg = LikelihoodConfig()
        for c in (1, 3, 5):
            rec = ComparisonRecord(a, b, -1, c)
            sigma = effective_noise(rec, lcfg)
            f = np.array([15.0 * sigma, -15.0 * sigma])
            value, grad_, hess_ = log_posterior(f, [rec], KernelConfig(), lcfg)
            assert np.isfinite(value)
            assert np.all(np.isfinite(grad_)) and np.all(np.isfinite(hess_))

    def test_hessian_is_prior_plus_psd_curvature(self):
        rng = np.random.default_rng(4)
        _, recs = random_dataset(rng, n_points=6, n_records=10)
        pts, _, _ = index_dataset(recs)
        K = gram(pts, KernelConfig())
        f = rng.normal(size=len(pts))
        _, _, hess = log_posterior(f, recs, KernelConfig(), LikelihoodConfig())
        W = -hess - np.linalg.inv(K)
        evals = np.linalg.eigvalsh(0.5 * (W + W.T))
        assert evals.min() > -1e-8


class TestFitMap:
    def test_converges_with_tight_gradient(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            _, recs = random_dataset(rng)
            res = fit_map(recs, KernelConfig(), LikelihoodConfig())
            assert res.converged
            assert res.grad_norm < 1e-8

    def test_same_mode_from_different_starts(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            _, recs = random_dataset(rng)
            res0 = fit_map(recs, KernelConfig(), LikelihoodConfig())
            start = rng.normal(scale=1.0, size=len(res0.points))
            res1 = fit_map(recs, KernelConfig(), LikelihoodConfig(), start=start)
            np.testing.assert_allclose(res0.utilities, res1.utilities, atol=1e-6)

    def test_single_decisive_record_orders_utilities(self):
        a = NormalizedPoint((0.1, 0.1, 0.1, 0.1))
        b = NormalizedPoint((0.9, 0.9, 0.9, 0.9))
        res = fit_map([ComparisonRecord(a, b, +1, 5)], KernelConfig(), LikelihoodConfig())
        f = dict(zip(res.points, res.utilities))
        assert f[a] > f[b]

    @pytest.mark.xfail(
        strict=True,
        reason=(
            "Not true at the top confidence level: with noise scale 0.01 the "
            "choice likelihood is nearly a step function, so any positive gap "
            "satisfies it and the prior shrinks the mode back toward zero "
            "(gap ~ sigma*sqrt(2*log(1/sigma^2)) -> 0 as sigma -> 0). The gap "
            "peaks at c=4 and drops at c=5; see the 1..4 test below for the "
            "range where ordering does hold."
        ),
    )
    def test_map_gap_grows_with_confidence(self):
        a = NormalizedPoint((0.1, 0.1, 0.1, 0.1))
        b = NormalizedPoint((0.9, 0.9, 0.9, 0.9))
        gaps = []
        for c in range(1, 6):
            res = fit_map([ComparisonRecord(a, b, +1, c)], KernelConfig(), LikelihoodConfig())
            f = dict(zip(res.points, res.utilities))
            gaps.append(f[a] - f[b])
        assert all(later > earlier for earlier, later in zip(gaps, gaps[1:]))

    def test_map_gap_grows_through_confidence_four(self):
        a = NormalizedPoint((0.1, 0.1, 0.1, 0.1))
        b = NormalizedPoint((0.9, 0.9, 0.9, 0.9))
        gaps = []
        for c in range(1, 5):
            res = fit_map([ComparisonRecord(a, b, +1, c)], KernelConfig(), LikelihoodConfig())
            f = dict(zip(res.points, res.utilities))
            gaps.append(f[a] - f[b])
        assert all(later > earlier for earlier, later in zip(gaps, gaps[1:]))

    def test_empty_dataset(self):
        res = fit_map([], KernelConfig(), LikelihoodConfig())
        assert res.converged and len(res.points) == 0


class TestLaplace:
    def test_covariance_matches_direct_inverse(self):
        # factored-form covariance vs the textbook (K^-1 + W)^-1, small case
        rng = np.random.default_rng(7)
        _, recs = random_dataset(rng, n_points=6, n_records=10)
        kcfg, lcfg = KernelConfig(), LikelihoodConfig()
        res = fit_map(recs, kcfg, lcfg)
        post = laplace(res, recs, kcfg, lcfg)
        K = gram(res.points, kcfg)
        _, _, hess = log_posterior(res.utilities, recs, kcfg, lcfg)
        direct = np.linalg.inv(-hess)
        np.testing.assert_allclose(post.laplace_covariance, direct, atol=1e-8)

    def test_covariance_symmetric_psd_and_below_prior(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            _, recs = random_dataset(rng, n_points=8, n_records=14)
            post = fit_posterior(recs)
            S = post.laplace_covariance
            assert np.max(np.abs(S - S.T)) <= 1e-10
            assert np.linalg.eigvalsh(S).min() >= -1e-8
            K = gram(post.points, post.kernel_config)
            assert np.linalg.eigvalsh(K - S).min() >= -1e-8

    def test_rejects_unconverged_map(self):
        rng = np.random.default_rng(9)
        _, recs = random_dataset(rng)
        res = fit_map(recs, KernelConfig(), LikelihoodConfig(), max_iter=1, tol=1e-16)
        assert not res.converged
        with pytest.raises(FitConvergenceError):
            laplace(res, recs, KernelConfig(), LikelihoodConfig())


class TestPrediction:
    def test_prior_prediction(self):
        post = fit_posterior([])
        x = NormalizedPoint((0.3, 0.3, 0.3, 0.3))
        mean, var = predict(post, x)
        assert mean == 0.0
        assert var == pytest.approx(1.0, rel=1e-12)

    def test_prior_pair_stats(self):
        post = fit_posterior([])
        kcfg = post.kernel_config
        a = NormalizedPoint((0.1, 0.1, 0.1, 0.1))
        b = NormalizedPoint((0.9, 0.9, 0.9, 0.9))
        m, v = predict_pair(post, a, b)
        assert m == 0.0
        expected_v = 2.0 * kcfg.signal_variance - 2.0 * kernel(a, b, kcfg)
        assert v == pytest.approx(expected_v, rel=1e-12)

    def test_pair_variance_zero_for_identical_points(self):
        rng = np.random.default_rng(10)
        _, recs = random_dataset(rng)
        post = fit_posterior(recs)
        x = NormalizedPoint((0.4, 0.4, 0.4, 0.4))
        m, v = predict_pair(post, x, x)
        assert m == 0.0
        assert v == pytest.approx(0.0, abs=1e-12)

    def test_decisive_comparison_orders_means(self):
        a = NormalizedPoint((0.1, 0.1, 0.1, 0.1))
        b = NormalizedPoint((0.9, 0.9, 0.9, 0.9))
        post = fit_posterior([ComparisonRecord(a, b, +1, 5)])
        assert posterior_mean(post, a)[0] > posterior_mean(post, b)[0]

    def test_observation_shrinks_variance_at_queried_points(self):
        a = NormalizedPoint((0.1, 0.1, 0.1, 0.1))
        b = NormalizedPoint((0.9, 0.9, 0.9, 0.9))
        post = fit_posterior([ComparisonRecord(a, b, +1, 4)])
        _, var_a = predict(post, a)
        assert var_a < post.kernel_config.signal_variance

    def test_batch_cov_diag_matches_scalar_predict(self):
        rng = np.random.default_rng(11)
        _, recs = random_dataset(rng)
        post = fit_posterior(recs)
        probes = rng.uniform(size=(5, 4))
        cov = posterior_cov(post, probes)
        for k in range(5):
            _, var = predict(post, probes[k])
            assert cov[k, k] == pytest.approx(var, rel=1e-10)

    @pytest.mark.xfail(
        strict=True,
        reason=(
            "Refitting the mode after each answer re-evaluates every record's "
            "probit curvature there; a new record that shifts the mode can push "
            "an old record into its likelihood tail, deflating its weight and "
            "raising approximate variance. Holds only for fixed-curvature "
            "incremental updates, which this model intentionally does not use."
        ),
    )
    def test_variance_never_increases_when_appending_records(self):
        rng = np.random.default_rng(12)
        pts = [random_point(rng) for _ in range(8)]
        probes = rng.uniform(size=(32, 4))
        recs = []
        prev = None
        for _ in range(15):
            i, j = rng.choice(8, size=2, replace=False)
            recs.append(
                ComparisonRecord(pts[i], pts[j], int(rng.choice([-1, 1])), int(rng.integers(1, 6)))
            )
            post = fit_posterior(recs)
            var = np.diag(posterior_cov(post, probes)).copy()
            if prev is not None:
                assert np.max(var - prev) <= 1e-8
            prev = var


class TestSerialization:
    def test_round_trip_preserves_predictions(self):
        rng = np.random.default_rng(13)
        _, recs = random_dataset(rng)
        post = fit_posterior(recs)
        back = PreferencePosterior.from_json_dict(post.to_json_dict())
        probes = rng.uniform(size=(10, 4))
        np.testing.assert_allclose(
            posterior_mean(back, probes), posterior_mean(post, probes), atol=1e-12
        )
        np.testing.assert_allclose(
            posterior_cov(back, probes), posterior_cov(post, probes), atol=1e-12
        )
        assert back.points == post.points
        assert [r.choice for r in back.dataset] == [r.choice for r in post.dataset]

    def test_record_validation(self):
        a = NormalizedPoint((0.1, 0.2, 0.3, 0.4))
        b = NormalizedPoint((0.5, 0.6, 0.7, 0.8))
        with pytest.raises(ValueError):
            ComparisonRecord(a, b, 0, 3)
        with pytest.raises(ValueError):
            ComparisonRecord(a, b, +1, 6)
