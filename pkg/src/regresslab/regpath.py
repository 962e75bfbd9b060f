"""L1/L2 penalties: penalized gradient steps, coordinate-descent LASSO and
regularization paths.

All objectives here use the SUM convention
``sum_m (theta . x_m - y_m)^2 + lam * Omega(theta)``; the intercept
(coordinate 0) is never penalized. Under the MEAN convention the same
solution is obtained with ``lam / M``.
"""

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import add_bias, fmt17
from .exceptions import NotConvergedWarning, ParameterError, ShapeError
from .glm import fit_ridge_closed
from .linalg import as_matrix, as_vector

#: Coefficients with magnitude at or below this count as zero.
ZERO_TOL = 1e-10


@dataclass(frozen=True)
class PenaltySpec:
    kind: str = "none"  # "none" | "l2" | "l1"
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "l1", "l2"):
            raise ParameterError(f"unknown penalty {self.kind!r}")
        if not self.lam >= 0:
            raise ParameterError("penalty lambda must be >= 0")

    def value(self, theta):
        """``lam * Omega(theta)`` over the non-bias coordinates."""
        w = np.asarray(theta, dtype=np.float64)[1:]
        if self.kind == "l2":
            return self.lam * float(np.sum(w ** 2))
        if self.kind == "l1":
            return self.lam * float(np.sum(np.abs(w)))
        return 0.0


def penalized_step(theta, grad, eta, penalty):
    """One gradient step with the penalty's shrinkage term.

    l2 subtracts ``eta*lam*theta``; l1 subtracts ``eta*lam*sign(theta)``
    with ``sign(0) = 0``. Index 0 (bias) only takes the plain step.
    Note the l2 term is the gradient of ``(lam/2) * ||theta||^2``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if theta.shape != grad.shape:
        raise ShapeError(f"theta {theta.shape} and gradient {grad.shape} differ")
    new = theta - eta * grad
    if penalty.kind == "none" or penalty.lam == 0:
        return new
    if penalty.kind == "l2":
        shrink = eta * penalty.lam * theta
    else:
        shrink = eta * penalty.lam * np.sign(theta)
    shrink = np.array(shrink, copy=True)
    shrink[0] = 0.0
    return new - shrink


def soft_threshold(rho, t):
    """``sign(rho) * max(|rho| - t, 0)``."""
    return np.sign(rho) * np.maximum(np.abs(rho) - t, 0.0)


@dataclass
class LassoResult:
    theta: np.ndarray
    n_sweeps: int
    converged: bool


def lasso_objective(x, y, theta, lam):
    r = y - x @ theta
    return float(r @ r + lam * np.sum(np.abs(theta[1:])))


def lasso_cd(x, y, lam, max_sweeps=10_000, tol=1e-10, theta0=None):
    """Cyclic coordinate descent for ``||y - X theta||^2 + lam * ||theta[1:]||_1``.

    ``x`` must be bias-augmented. Each coordinate is set to its exact 1-D
    minimizer ``soft(rho_n, lam/2) / z_n`` with
    ``rho_n = x_n . (y - yhat without n)`` and ``z_n = ||x_n||^2``; the bias
    takes ``rho_0 / z_0``. Iteration stops once a full sweep moves no
    coordinate by more than ``tol``; otherwise a NotConvergedWarning is
    issued and the last iterate returned.
    """
    x = as_matrix(x, "x")
    y = as_vector(y, "y")
    if x.shape[0] != y.shape[0]:
        raise ShapeError(f"x has {x.shape[0]} rows but y has {y.shape[0]}")
    if not lam >= 0:
        raise ParameterError("lambda must be >= 0")
    n = x.shape[1]
    theta = np.zeros(n) if theta0 is None else np.array(theta0, dtype=np.float64, copy=True)
    z = np.einsum("mn,mn->n", x, x)
    resid = y - x @ theta
    half = 0.5 * lam
    for sweep in range(1, max_sweeps + 1):
        largest = 0.0
        for k in range(n):
            old = theta[k]
            if z[k] == 0.0:
                new = 0.0
            else:
                rho = x[:, k] @ resid + z[k] * old
                new = rho / z[k] if k == 0 else soft_threshold(rho, half) / z[k]
            if new != old:
                resid -= x[:, k] * (new - old)
                theta[k] = new
                largest = max(largest, abs(new - old))
        if largest <= tol:
            return LassoResult(theta, sweep, True)
    warnings.warn(f"lasso_cd did not converge in {max_sweeps} sweeps (lambda={lam})",
                  NotConvergedWarning, stacklevel=2)
    return LassoResult(theta, max_sweeps, False)


def lambda_max(x, y):
    """Smallest lambda whose LASSO solution has every non-bias coefficient 0:
    ``2 * max_n |x_n . (y - mean(y))|`` over the non-bias columns of the
    augmented design ``x``."""
    x = as_matrix(x, "x")
    y = as_vector(y, "y")
    if x.shape[1] < 2:
        return 0.0
    return float(2.0 * np.max(np.abs(x[:, 1:].T @ (y - y.mean()))))


def lasso_kkt_violation(x, y, theta, lam):
    """Largest violation of the LASSO stationarity conditions.

    Zero coordinates need ``|2 x_n . r| <= lam``; non-zero ones need
    ``2 x_n . r == lam * sign(theta_n)``; the bias needs ``x_0 . r == 0``.
    """
    r = y - x @ theta
    corr = 2.0 * (x.T @ r)
    worst = abs(corr[0])
    for k in range(1, x.shape[1]):
        if abs(theta[k]) > ZERO_TOL:
            worst = max(worst, abs(corr[k] - lam * np.sign(theta[k])))
        else:
            worst = max(worst, abs(corr[k]) - lam)
    return float(max(worst, 0.0))


@dataclass(frozen=True)
class PathPoint:
    lam: float
    theta: np.ndarray
    nonzero_count: int
    train_mse: float


def default_lambda_grid(lam_max, n=60, ratio=1e-4):
    """``n`` log-spaced values from ``lam_max`` down to ``lam_max * ratio``."""
    if lam_max <= 0:
        raise ParameterError("lambda_max is 0 (constant response): no path to trace")
    return np.geomspace(lam_max, lam_max * ratio, n)


def regularization_path(x, y, penalty_kind="l1", lambdas=None, standardize=True,
                        n_lambdas=60, max_sweeps=10_000, tol=1e-10):
    """Coefficients across a descending lambda grid.

    ``x`` holds raw features (no bias column). With ``standardize`` the
    features are centered and scaled to unit population std first, and the
    reported coefficients refer to the standardized features. L1 points use
    warm-started :func:`lasso_cd`; L2 points use the closed form with an
    unpenalized intercept.
    """
    if penalty_kind not in ("l1", "l2"):
        raise ParameterError(f"penalty_kind must be 'l1' or 'l2', got {penalty_kind!r}")
    x = as_matrix(x, "x")
    y = as_vector(y, "y")
    if standardize:
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        x = (x - mean) / np.where(std > 0, std, 1.0)
    design = add_bias(x)
    if lambdas is None:
        lambdas = default_lambda_grid(lambda_max(design, y), n_lambdas)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if np.any(lambdas <= 0) or np.any(np.diff(lambdas) >= 0):
        raise ParameterError("lambdas must be positive and strictly descending")

    points = []
    theta = None
    for lam in lambdas:
        if penalty_kind == "l1":
            theta = lasso_cd(design, y, lam, max_sweeps=max_sweeps, tol=tol, theta0=theta).theta
        else:
            theta = fit_ridge_closed(design, y, lam, penalize_bias=False)
        r = y - design @ theta
        points.append(PathPoint(
            lam=float(lam),
            theta=theta.copy(),
            nonzero_count=int(np.sum(np.abs(theta[1:]) > ZERO_TOL)),
            train_mse=float(np.mean(r ** 2)),
        ))
    return points


def path_to_csv(points, path, feature_names=None):
    """Write one row per path point: lambda, coefficients, nonzero_count, train_mse.

    Rows are ordered by ascending lambda, so the last row is the most
    heavily penalized fit.
    """
    n = points[0].theta.size if points else 0
    names = ["bias"] + list(feature_names or [f"x{i}" for i in range(n - 1)])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lambda"] + names + ["nonzero_count", "train_mse"])
        for p in sorted(points, key=lambda q: q.lam):
            writer.writerow([fmt17(p.lam)] + [fmt17(v) for v in p.theta]
                            + [p.nonzero_count, fmt17(p.train_mse)])
