"""Kernel functions, Gram matrices and kernel ridge regression."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import NotPositiveDefiniteError, ParameterError, ShapeError
from .linalg import as_matrix, as_vector, cholesky_solve, lu_solve

KERNEL_KINDS = ("linear", "polynomial", "rbf", "laplacian", "sigmoid", "fourier")
#: Relative jitter ``JITTER_RTOL * trace(K) / M`` added when lambda is 0.
JITTER_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Kernel and its hyperparameters.

    polynomial: ``(xi.xj + coef0)^degree`` with degree >= 1, coef0 >= 0
    rbf: ``exp(-||xi-xj||^2 / (2 sigma^2))``; laplacian: ``exp(-||xi-xj|| / sigma)``
    sigmoid: ``tanh(beta xi.xj + offset)`` with beta > 0, offset < 0
    fourier: ``cos(w.(xi-xj))`` with frequency vector ``w``
    """

    kind: str = "rbf"
    degree: int = 2
    coef0: float = 1.0
    sigma: float = 1.0
    beta: float = 1.0
    offset: float = -1.0
    frequency: tuple = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ParameterError(f"unknown kernel {self.kind!r}")
        if self.kind == "polynomial" and (self.degree < 1 or self.coef0 < 0):
            raise ParameterError("polynomial kernel needs degree >= 1 and coef0 >= 0")
        if self.kind in ("rbf", "laplacian") and not self.sigma > 0:
            raise ParameterError("bandwidth sigma must be > 0")
        if self.kind == "sigmoid" and not (self.beta > 0 and self.offset < 0):
            raise ParameterError("sigmoid kernel needs beta > 0 and offset < 0")
        if self.kind == "fourier":
            if self.frequency is None:
                raise ParameterError("fourier kernel needs a frequency vector")
            object.__setattr__(self, "frequency", tuple(float(v) for v in np.ravel(self.frequency)))

    def to_dict(self):
        keys = {
            "linear": (),
            "polynomial": ("degree", "coef0"),
            "rbf": ("sigma",),
            "laplacian": ("sigma",),
            "sigmoid": ("beta", "offset"),
            "fourier": ("frequency",),
        }[self.kind]
        d = {"kind": self.kind}
        for k in keys:
            v = getattr(self, k)
            d[k] = list(v) if isinstance(v, tuple) else v
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def kernel_matrix(spec, a, b):
    """Cross-kernel matrix ``K[i, j] = kappa(a_i, b_j)``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"inputs have {a.shape[1]} and {b.shape[1]} features")
    if spec.kind in ("linear", "polynomial", "sigmoid"):
        dots = a @ b.T
        if spec.kind == "linear":
            return dots
        if spec.kind == "polynomial":
            return (dots + spec.coef0) ** spec.degree
        return np.tanh(spec.beta * dots + spec.offset)
    if spec.kind == "fourier":
        w = np.asarray(spec.frequency)
        if w.size != a.shape[1]:
            raise ShapeError(f"frequency has {w.size} entries for {a.shape[1]} features")
        return np.cos((a @ w)[:, None] - (b @ w)[None, :])
    sq = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2)
    if spec.kind == "rbf":
        return np.exp(-sq / (2.0 * spec.sigma ** 2))
    return np.exp(-np.sqrt(sq) / spec.sigma)


def kernel_eval(spec, xi, xj):
    """``kappa(xi, xj)`` for two vectors."""
    xi = as_vector(xi, "xi")
    xj = as_vector(xj, "xj")
    if xi.shape != xj.shape:
        raise ShapeError(f"vectors have lengths {xi.size} and {xj.size}")
    return float(kernel_matrix(spec, xi[None, :], xj[None, :])[0, 0])


@dataclass(frozen=True, eq=False)
class GramMatrix:
    k: np.ndarray
    jitter: float = 0.0


def gram(spec, x):
    """Symmetric Gram matrix: upper triangle computed, then mirrored."""
    x = as_matrix(x, "x")
    full = kernel_matrix(spec, x, x)
    upper = np.triu(full)
    return GramMatrix(k=upper + np.triu(full, 1).T)


def _solve_regularized(k, y, lam):
    m = k.shape[0]
    jitter = JITTER_RTOL * np.trace(k) / m if lam == 0 else 0.0
    system = k + (lam + jitter) * np.eye(m)
    try:
        alpha = cholesky_solve(system, y)
    except NotPositiveDefiniteError:
        # indefinite kernels (sigmoid) may still give a regular system
        alpha = lu_solve(system, y)
    return alpha, jitter


def kernel_ridge_fit(spec, x_train, y, lam):
    """Dual coefficients ``alpha = (K + lam I)^-1 y``.

    When ``lam == 0`` a jitter of ``JITTER_RTOL * trace(K) / M`` is added and
    recorded on the returned Gram matrix.

    Returns
    -------
    (alpha, GramMatrix)

    Raises
    ------
    SingularMatrixError
        If the (jittered) system cannot be solved.
    """
    if not lam >= 0:
        raise ParameterError("lambda must be >= 0")
    x_train = as_matrix(x_train, "x_train")
    y = as_vector(y, "y")
    if y.shape[0] != x_train.shape[0]:
        raise ShapeError(f"{x_train.shape[0]} training rows but {y.shape[0]} labels")
    g = gram(spec, x_train)
    alpha, jitter = _solve_regularized(g.k, y, lam)
    return alpha, GramMatrix(k=g.k, jitter=jitter)


def kernel_ridge_fit_predict(spec, x_train, y, lam, x_new):
    """Predictions ``y' (K + lam I)^-1 kappa(X, x)`` at the rows of ``x_new``."""
    alpha, _ = kernel_ridge_fit(spec, x_train, y, lam)
    return kernel_matrix(spec, x_new, x_train) @ alpha


def smoother_weights(spec, x_train, lam, x_new):
    """Weights ``w(x) = (K + lam I)^-1 kappa(X, x)`` on the training labels.

    Row i gives the weights whose inner product with ``y`` is the prediction
    at ``x_new[i]``.
    """
    x_train = as_matrix(x_train, "x_train")
    k = gram(spec, x_train).k
    m = k.shape[0]
    jitter = JITTER_RTOL * np.trace(k) / m if lam == 0 else 0.0
    cross = kernel_matrix(spec, x_new, x_train)
    system = k + (lam + jitter) * np.eye(m)
    try:
        return np.array([cholesky_solve(system, c) for c in cross])
    except NotPositiveDefiniteError:
        return np.array([lu_solve(system, c) for c in cross])


class KernelRidge(RegressorMixin, BaseEstimator):
    """Kernel ridge regression.

    Parameters
    ----------
    kernel : str
        One of "linear", "polynomial", "rbf", "laplacian", "sigmoid", "fourier".
    alpha : float
        Ridge penalty lambda (>= 0).
    degree, coef0, sigma, beta, offset, frequency
        Kernel hyperparameters, see :class:`KernelSpec`.

    Attributes
    ----------
    dual_coef_ : ndarray (M,)
    X_fit_ : ndarray (M, N)
    jitter_ : float
    """

    def __init__(self, kernel="rbf", alpha=1.0, degree=2, coef0=1.0, sigma=1.0,
                 beta=1.0, offset=-1.0, frequency=None):
        self.kernel = kernel
        self.alpha = alpha
        self.degree = degree
        self.coef0 = coef0
        self.sigma = sigma
        self.beta = beta
        self.offset = offset
        self.frequency = frequency

    def _spec(self):
        return KernelSpec(kind=self.kernel, degree=self.degree, coef0=self.coef0, sigma=self.sigma,
                          beta=self.beta, offset=self.offset, frequency=self.frequency)

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        self.spec_ = self._spec()
        self.dual_coef_, g = kernel_ridge_fit(self.spec_, X, y, self.alpha)
        self.jitter_ = g.jitter
        self.X_fit_ = X
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "dual_coef_")
        return kernel_matrix(self.spec_, check_array(X), self.X_fit_) @ self.dual_coef_

