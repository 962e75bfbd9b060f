"""Scikit-learn style estimators over the closed forms and the GD driver.

All estimators take raw feature matrices; the bias column is added
internally and reported as ``intercept_``.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import glm
from .dataset import add_bias, one_hot_encode
from .exceptions import ParameterError
from .optim import GdConfig, Schedule, gd_minimize, make_gradient_strategy
from .regpath import PenaltySpec, lasso_cd, penalized_step


class _GdMixin:
    """Shared gradient-descent fitting for the GLM estimators."""

    def _gd_config(self):
        return GdConfig(
            learning_rate=self.learning_rate,
            schedule=Schedule(self.schedule, self.gamma, self.step_size, self.horizon),
            strategy=self.strategy,
            batch_size=self.batch_size,
            delta=self.delta,
            max_iters=self.max_iter,
            seed=self.random_state,
        )

    def _run_gd(self, kind, design, target, theta0):
        cfg = self._gd_config()
        penalty = PenaltySpec(self.penalty, self.alpha)
        source = make_gradient_strategy(cfg.strategy, design, target, kind, cfg.seed, cfg.batch_size)

        # the l2 step shrinks by eta*lam*theta, i.e. descends (lam/2)||theta||^2
        weight = 0.5 if penalty.kind == "l2" else 1.0

        def objective(theta):
            return glm.loss(kind, theta, design, target) + weight * penalty.value(theta)

        def step(theta, grad, eta):
            return penalized_step(theta, grad, eta, penalty)

        theta, trace = gd_minimize(objective, source, theta0, cfg, step_fn=step)
        self.trace_ = trace
        self.n_iter_ = len(trace)
        return theta


_GD_DOC = """
    learning_rate : float
    schedule : {"constant", "step", "exponential", "cosine"}
    gamma, step_size, horizon : schedule parameters
    strategy : {"batch", "stochastic", "minibatch"}
    batch_size : int, for minibatch
    delta : float or None
        Stop when the loss changes by less than this between checks.
    max_iter : int
    penalty : {"none", "l2", "l1"}
        Shrinkage applied in each step (intercept excluded).
    random_state : int
"""


class LinearRegression(_GdMixin, RegressorMixin, BaseEstimator):
    """Least-squares linear regression.

    Parameters
    ----------
    solver : {"closed_form", "gd"}
    alpha : float
        Penalty strength. For ``closed_form`` this is the ridge lambda under
        the SUM convention (0 gives ordinary least squares, and the
        intercept is penalized as in ``(X'X + alpha I)^-1 X'y``). For ``gd``
        it scales the per-step shrinkage of ``penalty`` under the MEAN loss.
    """ + _GD_DOC

    def __init__(self, solver="closed_form", alpha=0.0, learning_rate=0.1, schedule="constant",
                 gamma=1.0, step_size=1, horizon=1, strategy="batch", batch_size=None,
                 delta=1e-8, max_iter=10_000, penalty="none", random_state=0):
        self.solver = solver
        self.alpha = alpha
        self.learning_rate = learning_rate
        self.schedule = schedule
        self.gamma = gamma
        self.step_size = step_size
        self.horizon = horizon
        self.strategy = strategy
        self.batch_size = batch_size
        self.delta = delta
        self.max_iter = max_iter
        self.penalty = penalty
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        design = add_bias(X)
        if self.solver == "closed_form":
            theta = glm.fit_ols(design, y) if self.alpha == 0 else glm.fit_ridge_closed(design, y, self.alpha)
        elif self.solver == "gd":
            theta = self._run_gd("linear", design, y.astype(np.float64), np.zeros(design.shape[1]))
        else:
            raise ParameterError(f"unknown solver {self.solver!r}")
        self.theta_ = theta
        self.intercept_ = float(theta[0])
        self.coef_ = theta[1:]
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "theta_")
        return add_bias(check_array(X)) @ self.theta_


class LogisticRegression(_GdMixin, ClassifierMixin, BaseEstimator):
    """Binary logistic regression trained by gradient descent on the mean
    cross-entropy.

    Parameters
    ----------
    threshold : float
        Decision threshold on the class-1 probability.
    alpha : float
        Penalty strength for ``penalty``.
    """ + _GD_DOC

    def __init__(self, threshold=0.5, alpha=0.0, learning_rate=0.1, schedule="constant",
                 gamma=1.0, step_size=1, horizon=1, strategy="batch", batch_size=None,
                 delta=1e-8, max_iter=10_000, penalty="none", random_state=0):
        self.threshold = threshold
        self.alpha = alpha
        self.learning_rate = learning_rate
        self.schedule = schedule
        self.gamma = gamma
        self.step_size = step_size
        self.horizon = horizon
        self.strategy = strategy
        self.batch_size = batch_size
        self.delta = delta
        self.max_iter = max_iter
        self.penalty = penalty
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, ids = np.unique(y, return_inverse=True)
        if self.classes_.size != 2:
            raise ParameterError("LogisticRegression needs exactly two classes")
        design = add_bias(X)
        theta = self._run_gd("logistic", design, ids.astype(np.float64), np.zeros(design.shape[1]))
        self.theta_ = theta
        self.intercept_ = float(theta[0])
        self.coef_ = theta[1:]
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "theta_")
        return add_bias(check_array(X)) @ self.theta_

    def predict_proba(self, X):
        p = glm.sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return self.classes_[glm.decide(self.predict_proba(X)[:, 1], self.threshold)]


class SoftmaxRegression(_GdMixin, ClassifierMixin, BaseEstimator):
    """Multinomial (softmax) regression trained by gradient descent.

    ``theta_`` has shape (N+1, K), one column per class.
    """ + _GD_DOC

    def __init__(self, alpha=0.0, learning_rate=0.1, schedule="constant", gamma=1.0,
                 step_size=1, horizon=1, strategy="batch", batch_size=None, delta=1e-8,
                 max_iter=10_000, penalty="none", random_state=0):
        self.alpha = alpha
        self.learning_rate = learning_rate
        self.schedule = schedule
        self.gamma = gamma
        self.step_size = step_size
        self.horizon = horizon
        self.strategy = strategy
        self.batch_size = batch_size
        self.delta = delta
        self.max_iter = max_iter
        self.penalty = penalty
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, ids = np.unique(y, return_inverse=True)
        k = self.classes_.size
        if k < 2:
            raise ParameterError("need at least two classes")
        design = add_bias(X)
        onehot = one_hot_encode(ids, k)
        self.theta_ = self._run_gd("softmax", design, onehot, np.zeros((design.shape[1], k)))
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "theta_")
        return glm.predict_softmax(self.theta_, add_bias(check_array(X)))

    def predict(self, X):
        return self.classes_[glm.argmax_class(self.predict_proba(X))]


class GaussianGenerativeClassifier(ClassifierMixin, BaseEstimator):
    """Closed-form classifier from shared-covariance Gaussian class models.

    Two classes yield logistic parameters ``theta_`` (length N+1); more
    classes yield softmax parameters of shape (N+1, K).
    """

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, ids = np.unique(y, return_inverse=True)
        self.model_, self.theta_ = glm.fit_gaussian_generative(X, ids, self.classes_.size)
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "theta_")
        design = add_bias(check_array(X))
        if self.theta_.ndim == 1:
            p = glm.predict_logistic(self.theta_, design)
            return np.column_stack([1.0 - p, p])
        return glm.predict_softmax(self.theta_, design)

    def predict(self, X):
        return self.classes_[glm.argmax_class(self.predict_proba(X))]


class Lasso(RegressorMixin, BaseEstimator):
    """L1-penalized least squares by coordinate descent.

    Minimizes ``||y - X theta||^2 + alpha * ||coef||_1`` (SUM convention,
    intercept unpenalized).
    """

    def __init__(self, alpha=1.0, max_iter=10_000, tol=1e-10):
        self.alpha = alpha
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        result = lasso_cd(add_bias(X), y, self.alpha, self.max_iter, self.tol)
        self.theta_ = result.theta
        self.intercept_ = float(result.theta[0])
        self.coef_ = result.theta[1:]
        self.n_iter_ = result.n_sweeps
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "theta_")
        return add_bias(check_array(X)) @ self.theta_
