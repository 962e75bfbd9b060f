import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regresslab import basis, cv, glm, metrics
from regresslab.cv import FoldPlan
from regresslab.dataset import add_bias, gen_sine
from regresslab.exceptions import ParameterError, ShapeError
from regresslab.rng import Rng


def mse(yhat, y):
    return metrics.regression_metrics(yhat, y).mse


def rmse(yhat, y):
    return metrics.regression_metrics(yhat, y).rmse


def test_split_examples():
    plan = cv.split(5, "loocv", Rng(0))
    assert plan.k == 5 and list(plan.fold_sizes()) == [1] * 5
    assert list(cv.split(10, "kfold", Rng(0), k=3).fold_sizes()) == [4, 3, 3]
    plan = cv.split(10, "holdout", Rng(0), frac=0.2)
    assert plan.indices(0)[1].size == 2 and plan.scored_folds == (0,)


def test_split_errors():
    with pytest.raises(ParameterError):
        cv.split(10, "kfold", Rng(0), k=11)
    with pytest.raises(ParameterError):
        cv.split(10, "kfold", Rng(0), k=1)
    with pytest.raises(ParameterError):
        cv.split(10, "holdout", Rng(0), frac=1.0)
    with pytest.raises(ParameterError):
        cv.split(10, "bootstrap", Rng(0))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 60), st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_folds_partition_rows(m, k, seed):
    k = min(k, m)
    plan = cv.split(m, "kfold", Rng(seed), k=k)
    sizes = plan.fold_sizes()
    assert sizes.sum() == m and sizes.max() - sizes.min() <= 1
    vals = [plan.indices(f)[1] for f in range(k)]
    assert sorted(np.concatenate(vals).tolist()) == list(range(m))
    same = cv.split(m, "kfold", Rng(seed), k=k)
    assert same.folds.tobytes() == plan.folds.tobytes()


def _ols(x, y):
    theta = glm.fit_ols(add_bias(x), y)
    return lambda xn: add_bias(xn) @ theta


def test_relabeling_folds_keeps_mean():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((20, 2))
    y = x @ [1.0, -2.0] + 0.3 * rng.standard_normal(20)
    plan = cv.split(20, "kfold", Rng(1), k=4)
    relabel = np.array([2, 0, 3, 1])
    other = FoldPlan(relabel[plan.folds], 4, "kfold")
    a = cv.cross_validate(x, y, plan, _ols, rmse)
    b = cv.cross_validate(x, y, other, _ols, rmse)
    assert sorted(a.scores) == sorted(b.scores)
    assert a.mean == pytest.approx(b.mean, rel=1e-15)


def test_constant_predictor_scores_metric_of_constant():
    y = np.arange(12.0)
    x = np.zeros((12, 1))
    plan = cv.split(12, "kfold", Rng(2), k=3)
    res = cv.cross_validate(x, y, plan, lambda xt, yt: (lambda xn: np.full(xn.shape[0], 5.0)), mse)
    for fold, score in enumerate(res.scores):
        val = plan.indices(fold)[1]
        assert score == mse(np.full(val.size, 5.0), y[val])


def test_exact_linear_data_two_fold():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((30, 3))
    y = 1.5 + x @ [0.5, -1.0, 2.0]
    res = cv.cross_validate(x, y, cv.split(30, "kfold", Rng(0), k=2), _ols, rmse)
    assert res.mean < 1e-8


def test_cross_validate_errors():
    x = np.ones((5, 1))
    with pytest.raises(ShapeError):
        cv.cross_validate(x, np.ones(5), cv.split(6, "kfold", Rng(0), k=2), _ols, mse)
    one_fold = FoldPlan(np.zeros(5, dtype=np.int64), 1, "kfold")
    with pytest.raises(ParameterError):
        cv.cross_validate(x, np.ones(5), one_fold, _ols, mse)


def _degree_sweep(metric):
    d = gen_sine(10, 0.2, Rng(42))
    plan = cv.split(10, "loocv", Rng(0))

    def factory(k):
        spec = basis.BasisSpec("polynomial", n_features=1, degree=k)

        def fit(xt, yt):
            theta = basis.fit_lbfm_closed(spec, xt, yt)
            return lambda xn: basis.expand(spec, xn) @ theta
        return fit
    return cv.select_hyperparameter(d.x, d.y_real, range(10), plan, factory, metric, on_error="inf")


@pytest.mark.xfail(strict=True, reason="mean per-fold RMSE under LOOCV selects degree 8; see ledger")
def test_degree_sweep_mean_rmse():
    best, _ = _degree_sweep(rmse)
    assert best in range(2, 7)


def test_degree_sweep_mean_squared_error():
    best, table = _degree_sweep(mse)
    assert best in range(2, 7)
    assert table[9].mean > table[3].mean


def _ridge_factory(spec):
    def factory(lam):
        def fit(xt, yt):
            theta = glm.fit_ridge_closed(basis.expand(spec, xt), yt, lam, penalize_bias=False)
            return lambda xn: basis.expand(spec, xn) @ theta
        return fit
    return factory


def test_ridge_selection_prefers_positive_lambda():
    d = gen_sine(10, 0.2, Rng(42))
    spec = basis.BasisSpec("polynomial", n_features=1, degree=9)
    grid = [0.0] + list(np.geomspace(1e-8, 1.0, 17))
    plan = cv.split(10, "loocv", Rng(0))
    best, table = cv.select_hyperparameter(d.x, d.y_real, grid, plan, _ridge_factory(spec), mse,
                                           on_error="inf")
    assert best > 0
    assert min(r.mean for r in table[1:]) < table[0].mean

    shuffled = list(np.random.default_rng(0).permutation(grid))
    best2, _ = cv.select_hyperparameter(d.x, d.y_real, shuffled, plan, _ridge_factory(spec), mse,
                                        on_error="inf")
    assert best2 == best


def test_singleton_and_ties():
    x = np.zeros((6, 1))
    y = np.ones(6)
    plan = cv.split(6, "kfold", Rng(0), k=2)

    def factory(c):
        return lambda xt, yt: (lambda xn: np.ones(xn.shape[0]))
    assert cv.select_hyperparameter(x, y, ["only"], plan, factory, mse)[0] == "only"
    assert cv.select_hyperparameter(x, y, ["a", "b"], plan, factory, mse)[0] == "a"
    with pytest.raises(ParameterError):
        cv.select_hyperparameter(x, y, [], plan, factory, mse)


def test_on_error_inf():
    x = np.linspace(0, 1, 4)[:, None]
    plan = cv.split(4, "kfold", Rng(0), k=2)
    spec = basis.BasisSpec("polynomial", n_features=1, degree=3)

    def fit(xt, yt):
        theta = basis.fit_lbfm_closed(spec, xt, yt)
        return lambda xn: basis.expand(spec, xn) @ theta
    res = cv.cross_validate(x, x[:, 0], plan, fit, mse, on_error="inf")
    assert all(math.isinf(s) for s in res.scores)
    with pytest.raises((ArithmeticError, ValueError)):
        cv.cross_validate(x, x[:, 0], plan, fit, mse)


def test_scores_csv(tmp_path):
    _, table = _degree_sweep(mse)
    cv.scores_to_csv(table, tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0].split(",")[0] == "candidate" and lines[0].split(",")[-1] == "mean"
    assert len(lines) == 11 and len(lines[1].split(",")) == 12
    assert lines[10].split(",")[-1] == "inf"
