import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_lasso_1d, lstsq_fit, soft
from regresslab import glm, regpath
from regresslab.dataset import add_bias, gen_sparse_regression
from regresslab.exceptions import NotConvergedWarning, ParameterError
from regresslab.regpath import PenaltySpec, penalized_step
from regresslab.rng import Rng


def test_penalized_step_examples():
    theta = np.array([0.7, 2.0, -3.0])
    zero = np.zeros(3)
    l2 = penalized_step(theta, zero, 0.1, PenaltySpec("l2", 2.0))
    np.testing.assert_allclose(l2, [0.7, 0.8 * 2.0, 0.8 * -3.0])
    l1 = penalized_step(np.array([0.0, 2.0, -3.0]), zero, 0.25, PenaltySpec("l1", 2.0))
    np.testing.assert_array_equal(l1, [0.0, 1.5, -2.5])
    g = np.array([0.3, -0.1, 0.2])
    np.testing.assert_array_equal(penalized_step(theta, g, 0.1, PenaltySpec("none")), theta - 0.1 * g)
    np.testing.assert_array_equal(penalized_step([0.0, 0.0], [0.0, 0.0], 1.0, PenaltySpec("l1", 3.0)), [0.0, 0.0])


def test_l2_step_with_sum_gradient_is_ridge_objective_step():
    rng = np.random.default_rng(0)
    x = add_bias(rng.standard_normal((20, 3)))
    y = rng.standard_normal(20)
    theta = rng.standard_normal(4)
    lam, eta = 0.8, 0.01
    g_sum = 2.0 * x.T @ (x @ theta - y)
    ridge_grad = g_sum + 2.0 * lam * np.concatenate([[0.0], theta[1:]])
    # the step's shrinkage eta*lam'*theta descends (lam'/2)||w||^2, so lam' = 2*lam
    stepped = penalized_step(theta, g_sum, eta, PenaltySpec("l2", 2.0 * lam))
    assert np.max(np.abs(stepped - (theta - eta * ridge_grad))) < 1e-12


def test_penalty_validation():
    with pytest.raises(ParameterError):
        PenaltySpec("l3", 1.0)
    with pytest.raises(ParameterError):
        PenaltySpec("l1", -1.0)


def test_lasso_zero_lambda_is_ols():
    rng = np.random.default_rng(1)
    x = add_bias(rng.standard_normal((40, 4)))
    y = rng.standard_normal(40)
    np.testing.assert_allclose(regpath.lasso_cd(x, y, 0.0).theta, lstsq_fit(x, y), atol=1e-6)


def _orthonormal_problem(seed, m=30, n=5):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(np.column_stack([np.ones(m), rng.standard_normal((m, n))]))
    q[:, 0] = 1.0 / np.sqrt(m)
    y = rng.standard_normal(m) * 3
    return q, y - y.mean()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 8.0))
def test_orthonormal_design_soft_threshold(seed, lam):
    q, y = _orthonormal_problem(seed)
    theta = regpath.lasso_cd(q, y, lam).theta
    expected = [soft(float(q[:, k] @ y), lam / 2) for k in range(1, q.shape[1])]
    assert np.max(np.abs(theta[1:] - expected)) < 1e-8
    assert abs(theta[0]) < 1e-8


def test_one_dimensional_minimizer_against_grid():
    for z, rho, lam in ((2.0, 3.0, 1.0), (0.5, -1.0, 4.0), (1.0, 0.2, 0.3)):
        assert soft(rho, lam / 2) / z == pytest.approx(brute_lasso_1d(z, rho, lam), abs=2e-4)


def test_lambda_max_examples():
    rng = np.random.default_rng(2)
    x = add_bias(rng.standard_normal((25, 4)))
    assert regpath.lambda_max(x, np.full(25, 3.0)) == 0.0
    y = rng.standard_normal(25)
    lm = regpath.lambda_max(x, y)
    assert regpath.lambda_max(x, 2 * y) == pytest.approx(2 * lm, rel=1e-14)
    assert np.all(regpath.lasso_cd(x, y, 1.01 * lm).theta[1:] == 0.0)
    assert np.count_nonzero(regpath.lasso_cd(x, y, 0.5 * lm).theta[1:]) >= 1


def test_lasso_objective_monotone_across_sweeps():
    rng = np.random.default_rng(3)
    x = add_bias(rng.standard_normal((30, 6)))
    y = rng.standard_normal(30)
    lam = 0.3 * regpath.lambda_max(x, y)
    theta = np.zeros(7)
    values = [regpath.lasso_objective(x, y, theta, lam)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotConvergedWarning)
        for _ in range(30):
            theta = regpath.lasso_cd(x, y, lam, max_sweeps=1, theta0=theta).theta
            values.append(regpath.lasso_objective(x, y, theta, lam))
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_not_converged_warning():
    rng = np.random.default_rng(4)
    x = add_bias(rng.standard_normal((30, 6)))
    y = rng.standard_normal(30)
    with pytest.warns(NotConvergedWarning):
        result = regpath.lasso_cd(x, y, 0.1, max_sweeps=1)
    assert not result.converged


def test_path_kkt_saturation_and_support():
    d = gen_sparse_regression(rng=Rng(1))
    points = regpath.regularization_path(d.x, d.y_real, "l1")
    assert len(points) == 60
    assert points[0].nonzero_count == 0
    xs = (d.x - d.x.mean(0)) / d.x.std(0)
    design = add_bias(xs)
    scale = max(1.0, points[0].lam)
    for p in points:
        assert regpath.lasso_kkt_violation(design, d.y_real, p.theta, p.lam) <= 1e-6 * scale
    truth = {0, 3, 5}
    supports = [set(np.flatnonzero(np.abs(p.theta[1:]) > regpath.ZERO_TOL)) for p in points]
    assert truth in supports


def test_ridge_path_shrinks_and_never_zero():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((40, 5))
    y = rng.standard_normal(40)
    lambdas = np.geomspace(1e4, 1e-3, 30)
    points = regpath.regularization_path(x, y, "l2", lambdas)
    norms = [np.linalg.norm(p.theta[1:]) for p in points]
    assert all(b >= a for a, b in zip(norms, norms[1:]))
    assert all(p.nonzero_count == 5 for p in points)


def test_ridge_path_points_match_closed_form():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((20, 3))
    y = rng.standard_normal(20)
    p = regpath.regularization_path(x, y, "l2", [2.0], standardize=False)[0]
    ref = glm.fit_ridge_closed(add_bias(x), y, 2.0, penalize_bias=False)
    np.testing.assert_allclose(p.theta, ref, atol=1e-12)


def test_path_rejects_bad_grid():
    x = np.random.default_rng(0).standard_normal((10, 2))
    y = np.arange(10.0)
    with pytest.raises(ParameterError):
        regpath.regularization_path(x, y, "l1", [0.1, 1.0])
    with pytest.raises(ParameterError):
        regpath.regularization_path(x, y, "l0")


def test_path_csv(tmp_path):
    d = gen_sparse_regression(rng=Rng(2))
    points = regpath.regularization_path(d.x, d.y_real, "l1", n_lambdas=10)
    regpath.path_to_csv(points, tmp_path / "p.csv", d.feature_names)
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0].split(",") == ["lambda", "bias", *d.feature_names, "nonzero_count", "train_mse"]
    lams = [float(r.split(",")[0]) for r in lines[1:]]
    assert lams == sorted(lams)
    assert lines[-1].split(",")[-2] == "0"
