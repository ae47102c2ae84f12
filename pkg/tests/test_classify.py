"""Scorer unit tests: closed-form anchors, dual feasibility, fusion rules."""

import math

import numpy as np
import pytest

from kda.classify import (
    KKT_TOL,
    GaussianModel,
    NnModel,
    OcsvmModel,
    ScoreNormalizer,
    fit_score_normalizer,
    fuse_scores,
    gaussian_score,
    gaussian_train,
    nn_score,
    nn_train,
    ocsvm_dual_objective,
    ocsvm_kkt_residual,
    ocsvm_score,
    ocsvm_train,
    rbf_kernel,
)
from kda.core import FeatureVector
from oracles import qp_capped_simplex


def _vec(*values: float) -> FeatureVector:
    return FeatureVector(values=tuple(float(v) for v in values), kind="original")


def _random_training(rng, l, dim):
    return [_vec(*rng.normal(0, 1, dim)) for _ in range(l)]


# ------------------------------------------------------------------- rbf


def test_rbf_at_equal_points_is_one():
    assert rbf_kernel((1.0, 2.0), (1.0, 2.0), gamma=0.7) == 1.0


def test_rbf_unit_distance_unit_gamma():
    assert rbf_kernel((0.0,), (1.0,), gamma=1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_rbf_symmetric():
    rng = np.random.default_rng(2)
    for _ in range(10):
        a, b = rng.normal(0, 1, 3), rng.normal(0, 1, 3)
        assert rbf_kernel(a, b, 0.5) == pytest.approx(rbf_kernel(b, a, 0.5), rel=1e-15)


def test_rbf_rejects_bad_args():
    with pytest.raises(ValueError, match="dimension mismatch"):
        rbf_kernel((1.0,), (1.0, 2.0), 1.0)
    with pytest.raises(ValueError, match="gamma"):
        rbf_kernel((1.0,), (2.0,), 0.0)


# ---------------------------------------------------------------- oc-svm


def test_identical_training_points_score_zero():
    # all kernel entries are 1, so rho = 1 and every training point sits
    # exactly on the hyperplane
    model = ocsvm_train([_vec(2.0, 3.0)] * 5, nu=0.5, gamma=1.0)
    assert ocsvm_score(model, _vec(2.0, 3.0)) == pytest.approx(0.0, abs=1e-9)


def test_single_training_point_degenerates():
    model = ocsvm_train([_vec(1.0, 4.0)], nu=0.5, gamma=0.3)
    assert model.alphas == (1.0,)
    assert model.rho == 1.0
    assert ocsvm_score(model, _vec(1.0, 4.0)) == pytest.approx(0.0, abs=1e-12)


def test_dual_feasibility_and_kkt():
    rng = np.random.default_rng(17)
    for nu in (0.25, 0.5, 1.0):
        for _ in range(20):
            l = int(rng.integers(2, 7))
            training = _random_training(rng, l, 2)
            model = ocsvm_train(training, nu=nu, gamma=1.0)
            alpha = np.asarray(model.alphas)
            cap = 1.0 / (nu * l)
            assert abs(alpha.sum() - 1.0) <= 1e-9
            assert np.all(alpha >= 0.0) and np.all(alpha <= cap + 1e-15)
            assert ocsvm_kkt_residual(model) <= KKT_TOL


def test_nu_property_bounds_sv_and_outlier_fractions():
    rng = np.random.default_rng(29)
    for nu in (0.25, 0.5, 1.0):
        for _ in range(15):
            l = int(rng.integers(2, 7))
            model = ocsvm_train(_random_training(rng, l, 3), nu=nu, gamma=0.8)
            alpha = np.asarray(model.alphas)
            cap = 1.0 / (nu * l)
            bounded = int(np.sum(alpha >= cap - 1e-9))
            support = int(np.sum(alpha > 1e-9))
            assert bounded / l <= nu + 1e-9
            assert support / l >= nu - 1e-9


def test_objective_matches_projected_gradient_oracle():
    rng = np.random.default_rng(41)
    for _ in range(20):
        l = int(rng.integers(2, 7))
        x = rng.normal(0, 1, (l, 2))
        gamma = float(rng.uniform(0.1, 2.0))
        model = ocsvm_train([_vec(*row) for row in x], nu=0.5, gamma=gamma)
        diff = x[:, None, :] - x[None, :, :]
        q = np.exp(-gamma * np.sum(diff * diff, axis=2))
        a_star = qp_capped_simplex(q, cap=1.0 / (0.5 * l))
        assert ocsvm_dual_objective(model) <= 0.5 * float(a_star @ q @ a_star) + 1e-4


def test_margin_support_vectors_score_zero():
    rng = np.random.default_rng(53)
    found = 0
    for _ in range(30):
        l = int(rng.integers(3, 7))
        training = _random_training(rng, l, 2)
        model = ocsvm_train(training, nu=0.5, gamma=1.0)
        cap = 1.0 / (0.5 * l)
        for sv, a in zip(model.support_vectors, model.alphas):
            if 1e-9 < a < cap - 1e-9:
                assert abs(ocsvm_score(model, _vec(*sv))) <= 1e-6
                found += 1
    assert found > 0  # the sweep actually exercised margin SVs


def test_score_far_from_all_svs_approaches_minus_rho():
    model = ocsvm_train(_random_training(np.random.default_rng(5), 4, 2), nu=0.5, gamma=1.0)
    far = ocsvm_score(model, _vec(1e4, 1e4))
    assert far == pytest.approx(-model.rho, abs=1e-12)


def test_score_equals_direct_summation():
    rng = np.random.default_rng(67)
    model = ocsvm_train(_random_training(rng, 5, 3), nu=0.5, gamma=0.9)
    x = rng.normal(0, 1, 3)
    want = sum(
        a * rbf_kernel(sv, x, model.gamma)
        for sv, a in zip(model.support_vectors, model.alphas)
    ) - model.rho
    assert ocsvm_score(model, _vec(*x)) == pytest.approx(want, abs=1e-12)


def test_training_is_deterministic():
    rng = np.random.default_rng(71)
    training = _random_training(rng, 5, 2)
    a = ocsvm_train(training, nu=0.5, gamma=1.1)
    b = ocsvm_train(training, nu=0.5, gamma=1.1)
    assert a == b  # bit-identical dataclasses


def test_nu_one_terminates_immediately():
    # nu=1 pins every alpha at 1/l: the initial point is the only feasible
    # one and training must not burn iterations discovering that
    rng = np.random.default_rng(83)
    model = ocsvm_train(_random_training(rng, 6, 2), nu=1.0, gamma=0.5)
    np.testing.assert_allclose(model.alphas, 1.0 / 6.0, rtol=0, atol=1e-15)
    assert ocsvm_kkt_residual(model) <= KKT_TOL


def test_ocsvm_train_rejects_bad_nu():
    with pytest.raises(ValueError, match="nu"):
        ocsvm_train([_vec(0.0), _vec(1.0)], nu=0.0)
    with pytest.raises(ValueError, match="nu"):
        ocsvm_train([_vec(0.0), _vec(1.0)], nu=1.5)


def test_ocsvm_default_gamma_is_one_over_dim():
    model = ocsvm_train(_random_training(np.random.default_rng(1), 3, 4))
    assert model.gamma == 0.25


def test_ocsvm_model_invariants():
    with pytest.raises(ValueError, match="count mismatch"):
        OcsvmModel(support_vectors=((0.0,),), alphas=(0.5, 0.5), rho=1.0, gamma=1.0, nu=0.5)
    with pytest.raises(ValueError, match="mixed dimensionality"):
        OcsvmModel(support_vectors=((0.0,), (0.0, 1.0)), alphas=(0.5, 0.5), rho=1.0, gamma=1.0, nu=0.5)


# -------------------------------------------------------------- gaussian


def test_gaussian_peak_at_mu():
    model = gaussian_train([_vec(1.0, 3.0), _vec(3.0, 5.0)])
    assert model.mu == (2.0, 4.0)
    peak = gaussian_score(model, _vec(2.0, 4.0))
    want = -0.5 * sum(math.log(2 * math.pi * v) for v in model.diag_sigma)
    assert peak == pytest.approx(want, rel=1e-12)


def test_gaussian_standard_normal_peak():
    model = GaussianModel(mu=(0.0,), diag_sigma=(1.0,))
    assert gaussian_score(model, _vec(0.0)) == pytest.approx(-0.5 * math.log(2 * math.pi), rel=1e-12)


def test_gaussian_matches_direct_log_density():
    rng = np.random.default_rng(97)
    for _ in range(15):
        d = int(rng.integers(1, 6))
        mu = rng.normal(0, 1, d)
        var = rng.uniform(0.5, 3.0, d)
        x = rng.normal(0, 2, d)
        model = GaussianModel(mu=tuple(mu), diag_sigma=tuple(var))
        want = -0.5 * (
            d * math.log(2 * math.pi)
            + float(np.log(var).sum())
            + float(((x - mu) ** 2 / var).sum())
        )
        assert gaussian_score(model, _vec(*x)) == pytest.approx(want, abs=1e-10)


def test_gaussian_decreases_along_rays_from_mu():
    model = GaussianModel(mu=(1.0, -2.0), diag_sigma=(0.5, 2.0))
    direction = np.array([0.3, -0.7])
    scores = [
        gaussian_score(model, _vec(*(np.array(model.mu) + t * direction)))
        for t in (0.0, 0.5, 1.0, 2.0, 4.0)
    ]
    assert all(a > b for a, b in zip(scores, scores[1:]))


def test_gaussian_variance_floor_applied():
    model = gaussian_train([_vec(7.0)] * 5)
    assert model.diag_sigma == (1e-6,)


# -------------------------------------------------------------------- nn


def test_nn_zero_iff_exemplar():
    model = nn_train([_vec(0.0), _vec(10.0)])
    assert nn_score(model, _vec(10.0)) == 0.0
    assert nn_score(model, _vec(4.0)) == -4.0


def test_nn_matches_brute_force():
    rng = np.random.default_rng(101)
    for _ in range(15):
        ex = rng.normal(0, 1, (int(rng.integers(1, 8)), 3))
        x = rng.normal(0, 1, 3)
        model = nn_train([_vec(*row) for row in ex])
        want = -min(float(np.linalg.norm(x - row)) for row in ex)
        assert nn_score(model, _vec(*x)) == pytest.approx(want, abs=1e-12)


def test_nn_is_one_lipschitz():
    rng = np.random.default_rng(103)
    model = nn_train([_vec(*rng.normal(0, 1, 2)) for _ in range(5)])
    for _ in range(20):
        a, b = rng.normal(0, 3, 2), rng.normal(0, 3, 2)
        gap = abs(nn_score(model, _vec(*a)) - nn_score(model, _vec(*b)))
        assert gap <= float(np.linalg.norm(a - b)) + 1e-12


# ----------------------------------------------------------------- fusion


def test_fuse_single_classifier_is_its_z_score():
    n = ScoreNormalizer(mean=2.0, std=4.0)
    assert fuse_scores([10.0], [n]) == 2.0


def test_fuse_equal_normalized_scores_pass_through():
    ns = [ScoreNormalizer(mean=0.0, std=1.0), ScoreNormalizer(mean=-3.0, std=2.0)]
    # raw scores chosen so both normalize to 1.5
    assert fuse_scores([1.5, 0.0], ns) == pytest.approx(1.5)


def test_fuse_symmetric_scores_cancel():
    ns = [ScoreNormalizer(mean=0.0, std=1.0)] * 2
    assert fuse_scores([1.0, -1.0], ns) == 0.0


def test_fuse_median_and_min_combiners():
    ns = [ScoreNormalizer(mean=0.0, std=1.0)] * 3
    assert fuse_scores([1.0, 5.0, 2.0], ns, combiner="median") == 2.0
    assert fuse_scores([1.0, 5.0, 2.0], ns, combiner="min") == 1.0
    with pytest.raises(ValueError, match="unknown combiner"):
        fuse_scores([1.0], ns[:1], combiner="geometric")


def test_fuse_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        fuse_scores([1.0, 2.0], [ScoreNormalizer(mean=0.0, std=1.0)])


def test_fit_score_normalizer_floors_std():
    n = fit_score_normalizer([3.0, 3.0, 3.0])
    assert n.mean == 3.0
    assert n.std == 0.001
    with pytest.raises(ValueError, match="at least one score"):
        fit_score_normalizer([])
