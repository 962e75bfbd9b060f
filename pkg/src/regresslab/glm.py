"""Linear, logistic and softmax regression: predictions, losses, gradients
and closed-form estimators.

Parameters are plain arrays with the bias first: ``theta`` of length N+1 for
the binary models and ``thetas`` of shape (N+1, K) for softmax, column k
holding the parameters of class k. Design matrices passed here are already
bias-augmented (column 0 all ones).

Loss conventions
----------------
Iterative training uses the MEAN reduction; closed forms use SUM, matching
``(X'X + lam I)^-1 X'y``. The squared-error loss paired with the gradient
``(1/M) sum (yhat - y) x`` is the half-MSE ``(1/2M) sum (yhat - y)^2``. A
ridge penalty ``lam_sum`` under SUM corresponds to ``lam_sum / M`` under MEAN.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    MulticollinearityError,
    NotPositiveDefiniteError,
    ParameterError,
    ShapeError,
    SingularMatrixError,
)
from .linalg import as_matrix, as_vector, cholesky_solve, solve_normal_equations

MODEL_KINDS = ("linear", "logistic", "softmax")


def sigmoid(z):
    """Logistic function in the overflow-free two-branch form."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def softmax(z):
    """Row-wise softmax with max subtraction."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def _logsumexp(z):
    zmax = np.max(z, axis=-1, keepdims=True)
    return (zmax + np.log(np.sum(np.exp(z - zmax), axis=-1, keepdims=True)))[..., 0]


def _check_dims(theta_rows, x):
    if x.shape[-1] != theta_rows:
        raise ShapeError(f"input has {x.shape[-1]} entries, parameters expect {theta_rows}")


def predict_linear(theta, x_aug):
    """``theta . x`` for one augmented sample, or row-wise for a matrix."""
    theta = np.asarray(theta, dtype=np.float64)
    x_aug = np.asarray(x_aug, dtype=np.float64)
    _check_dims(theta.shape[0], x_aug)
    out = x_aug @ theta
    return float(out) if out.ndim == 0 else out


def predict_logistic(theta, x_aug):
    """Probability of class 1: ``1 / (1 + exp(-theta . x))``."""
    return sigmoid(predict_linear(theta, x_aug))


def predict_softmax(thetas, x_aug):
    """Class probabilities; a vector for one sample, an (M, K) matrix otherwise."""
    thetas = np.asarray(thetas, dtype=np.float64)
    x_aug = np.asarray(x_aug, dtype=np.float64)
    _check_dims(thetas.shape[0], x_aug)
    return softmax(x_aug @ thetas)


def argmax_class(probs):
    """Most probable class; ties go to the lowest index."""
    return np.argmax(np.asarray(probs), axis=-1)


def decide(p, threshold=0.5):
    """Binary decision: 1 iff probability exceeds ``threshold``."""
    return (np.asarray(p) > threshold).astype(np.int64)


def predict(kind, params, x_aug):
    if kind == "linear":
        return predict_linear(params, x_aug)
    if kind == "logistic":
        return predict_logistic(params, x_aug)
    if kind == "softmax":
        return predict_softmax(params, x_aug)
    raise ParameterError(f"unknown model kind {kind!r}")


def _prepare(kind, params, x, y):
    if kind not in MODEL_KINDS:
        raise ParameterError(f"unknown model kind {kind!r}")
    x = as_matrix(x, "x")
    params = np.asarray(params, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_dims(params.shape[0], x)
    if kind == "softmax":
        if params.ndim != 2 or y.shape != (x.shape[0], params.shape[1]):
            raise ShapeError("softmax needs (N+1, K) parameters and an (M, K) one-hot label matrix")
    elif params.ndim != 1 or y.shape != (x.shape[0],):
        raise ShapeError(f"{kind} needs a parameter vector and a length-M label vector")
    return params, x, y


def _reduce(total, m, reduction):
    if reduction == "sum":
        return total
    if reduction == "mean":
        return total / m
    raise ParameterError(f"reduction must be 'mean' or 'sum', got {reduction!r}")


def loss(kind, params, x, y, reduction="mean"):
    """Training loss whose gradient is :func:`gradient`.

    linear: half squared error; logistic: binary cross-entropy;
    softmax: categorical cross-entropy (``y`` one-hot).
    """
    params, x, y = _prepare(kind, params, x, y)
    z = x @ params
    if kind == "linear":
        total = 0.5 * np.sum((z - y) ** 2)
    elif kind == "logistic":
        total = np.sum(np.logaddexp(0.0, z) - y * z)
    else:
        total = np.sum(_logsumexp(z) - np.sum(y * z, axis=1))
    return float(_reduce(total, x.shape[0], reduction))


def gradient(kind, params, x, y, reduction="mean"):
    """Unified gradient ``sum_m (yhat_m - y_m) x_m`` (divided by M for mean)."""
    params, x, y = _prepare(kind, params, x, y)
    z = x @ params
    if kind == "linear":
        resid = z - y
    elif kind == "logistic":
        resid = sigmoid(z) - y
    else:
        resid = softmax(z) - y
    return _reduce(x.T @ resid, x.shape[0], reduction)


def fit_ols(x, y):
    """Least squares on a bias-augmented design (SUM convention).

    Raises
    ------
    MulticollinearityError
        Fewer samples than parameters, or linearly dependent columns.
    """
    x = as_matrix(x, "x")
    y = as_vector(y, "y")
    if x.shape[0] < x.shape[1]:
        raise MulticollinearityError(
            f"{x.shape[0]} samples for {x.shape[1]} parameters: X'X is singular; use ridge (alpha > 0)"
        )
    try:
        return solve_normal_equations(x, y)
    except (NotPositiveDefiniteError, SingularMatrixError) as exc:
        raise MulticollinearityError(
            f"X'X is not invertible (collinear features?): {exc}; use ridge (alpha > 0)"
        ) from exc


def fit_ridge_closed(x, y, lam, penalize_bias=True):
    """Solve ``(X'X + lam I) theta = X'y``.

    With ``penalize_bias=False`` the intercept column is left unpenalized.
    """
    if not lam > 0:
        raise ParameterError(f"ridge lambda must be > 0, got {lam}")
    x = as_matrix(x, "x")
    y = as_vector(y, "y")
    try:
        return solve_normal_equations(x, y, ridge=lam, penalize_bias=penalize_bias)
    except (NotPositiveDefiniteError, SingularMatrixError) as exc:
        # only reachable with an unpenalized, all-zero bias column
        raise MulticollinearityError(str(exc)) from exc


@dataclass(frozen=True)
class GaussianClassModel:
    """Class-conditional Gaussians with one shared covariance.

    Attributes
    ----------
    mus : ndarray (K, N)
    sigma : ndarray (N, N)
    priors : ndarray (K,)
    """

    mus: np.ndarray
    sigma: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=np.float64)
        if np.any(priors <= 0) or abs(priors.sum() - 1.0) > 1e-12:
            raise ParameterError("priors must be positive and sum to 1")

    @property
    def n_classes(self):
        return self.mus.shape[0]


def generative_params(model):
    """Discriminative parameters implied by a Gaussian class model.

    Two classes give a logistic parameter vector ``(b, w)`` with
    ``w = Sigma^-1 (mu1 - mu0)`` and
    ``b = (mu0' Sigma^-1 mu0 - mu1' Sigma^-1 mu1)/2 + log(p1/p0)``.
    More classes give an (N+1, K) softmax matrix with columns
    ``(log p_k - mu_k' Sigma^-1 mu_k / 2, Sigma^-1 mu_k)``.
    """
    mus = np.asarray(model.mus, dtype=np.float64)
    priors = np.asarray(model.priors, dtype=np.float64)
    solved = np.array([cholesky_solve(model.sigma, mu) for mu in mus])  # Sigma^-1 mu_k
    quad = np.einsum("kn,kn->k", mus, solved)
    if mus.shape[0] == 2:
        w = solved[1] - solved[0]
        b = 0.5 * (quad[0] - quad[1]) + np.log(priors[1] / priors[0])
        return np.concatenate([[b], w])
    biases = np.log(priors) - 0.5 * quad
    return np.vstack([biases[None, :], solved.T])


def fit_gaussian_generative(x, y_class, k=None):
    """Estimate priors, class means and pooled covariance, then map to
    logistic (K=2) or softmax (K>2) parameters.

    The pooled covariance is the summed within-class scatter divided by M.

    Returns
    -------
    (GaussianClassModel, params)
    """
    x = as_matrix(x, "x")
    y = np.asarray(y_class, dtype=np.int64)
    if y.shape != (x.shape[0],):
        raise ShapeError("one class id per row required")
    k = int(y.max()) + 1 if k is None else int(k)
    if k < 2:
        raise ParameterError("need at least two classes")
    mus = np.empty((k, x.shape[1]))
    scatter = np.zeros((x.shape[1], x.shape[1]))
    counts = np.bincount(y, minlength=k)
    if np.any(counts < 2):
        raise ParameterError(f"every class needs >= 2 samples, counts are {counts.tolist()}")
    for c in range(k):
        xc = x[y == c]
        mus[c] = xc.mean(axis=0)
        dc = xc - mus[c]
        scatter += dc.T @ dc
    sigma = scatter / x.shape[0]
    sigma = 0.5 * (sigma + sigma.T)
    model = GaussianClassModel(mus=mus, sigma=sigma, priors=counts / x.shape[0])
    return model, generative_params(model)


def gaussian_log_density(model, x, c):
    """``log N(x; mu_c, Sigma)`` computed directly from the density."""
    x = np.asarray(x, dtype=np.float64)
    d = x - model.mus[c]
    n = d.size
    _, logdet = np.linalg.slogdet(model.sigma)
    maha = d @ cholesky_solve(model.sigma, d)
    return -0.5 * (n * np.log(2 * np.pi) + logdet + maha)
