"""Basis-function expansions and linear basis function models.

A basis maps raw features ``x`` (M x N) to a design ``Phi`` whose column 0
is the constant 1 followed by one column per basis function; any linear
estimator can then be fitted on ``Phi``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import CombinatorialBlowupError, ParameterError, ShapeError
from .glm import fit_ols, fit_ridge_closed, sigmoid
from .linalg import as_matrix
from .rng import as_rng

BASIS_KINDS = ("polynomial", "rbf", "sigmoid", "fourier")
MAX_MULTI_INDICES = 10_000
KMEANS_ITERATIONS = 50


def enumerate_multi_indices(n, k):
    """Exponent tuples of all monomials in ``n`` variables of total degree <= k.

    Ordered by total degree, then reverse-lexicographically within a degree
    (for n=2, k=2: 00, 10, 01, 20, 11, 02).
    """
    if n < 1 or k < 0:
        raise ParameterError("need n >= 1 and k >= 0")
    count = math.comb(n + k, k)
    if count > MAX_MULTI_INDICES:
        raise CombinatorialBlowupError(f"{count} monomials exceeds the limit of {MAX_MULTI_INDICES}")

    def with_total(dims, total):
        if dims == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in with_total(dims - 1, total - first):
                yield (first,) + rest

    return [idx for d in range(k + 1) for idx in with_total(n, d)]


@dataclass(frozen=True, eq=False)
class BasisSpec:
    """Declarative description of a basis.

    kind : {"polynomial", "rbf", "sigmoid", "fourier"}
    degree : total degree (polynomial)
    centers : (K, N) array and width > 0 (rbf)
    weights : (K, N) array and offsets : (K,) array (sigmoid)
    frequencies : (K, N) array (fourier; emits sin then cos per row)
    """

    kind: str
    n_features: int = 1
    degree: int = 1
    centers: np.ndarray = None
    width: float = 1.0
    weights: np.ndarray = None
    offsets: np.ndarray = None
    frequencies: np.ndarray = None
    exponents: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ParameterError(f"unknown basis kind {self.kind!r}")
        if self.kind == "polynomial":
            if self.degree < 0:
                raise ParameterError("polynomial degree must be >= 0")
            object.__setattr__(self, "exponents",
                               tuple(enumerate_multi_indices(self.n_features, self.degree)))
        elif self.kind == "rbf":
            object.__setattr__(self, "centers", self._mat(self.centers, "centers"))
            if not (math.isfinite(self.width) and self.width > 0):
                raise ParameterError("rbf width must be > 0")
        elif self.kind == "sigmoid":
            object.__setattr__(self, "weights", self._mat(self.weights, "weights"))
            offsets = np.asarray(self.offsets, dtype=np.float64).reshape(-1)
            if offsets.shape[0] != self.weights.shape[0] or not np.all(np.isfinite(offsets)):
                raise ShapeError("one finite offset per sigmoid weight row required")
            object.__setattr__(self, "offsets", offsets)
        else:
            object.__setattr__(self, "frequencies", self._mat(self.frequencies, "frequencies"))

    def _mat(self, a, name):
        if a is None:
            raise ParameterError(f"{self.kind} basis needs {name}")
        a = as_matrix(np.atleast_2d(np.asarray(a, dtype=np.float64)), name)
        if a.shape[1] != self.n_features:
            raise ShapeError(f"{name} has {a.shape[1]} columns, basis expects {self.n_features}")
        return a

    @property
    def n_outputs(self):
        """Columns of the expanded design, including the constant."""
        if self.kind == "polynomial":
            return len(self.exponents)
        if self.kind == "rbf":
            return 1 + self.centers.shape[0]
        if self.kind == "sigmoid":
            return 1 + self.weights.shape[0]
        return 1 + 2 * self.frequencies.shape[0]

    def to_dict(self):
        d = {"kind": self.kind, "n_features": self.n_features}
        if self.kind == "polynomial":
            d["degree"] = self.degree
        elif self.kind == "rbf":
            d.update(centers=self.centers.tolist(), width=self.width)
        elif self.kind == "sigmoid":
            d.update(weights=self.weights.tolist(), offsets=self.offsets.tolist())
        else:
            d["frequencies"] = self.frequencies.tolist()
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        return cls(**{k: v for k, v in d.items() if k != "exponents"})


def expand(spec, x):
    """Design matrix ``Phi`` for ``x`` under ``spec``."""
    x = as_matrix(np.asarray(x, dtype=np.float64).reshape(len(x), -1), "x")
    if x.shape[1] != spec.n_features:
        raise ShapeError(f"x has {x.shape[1]} features, basis expects {spec.n_features}")
    ones = np.ones((x.shape[0], 1))
    if spec.kind == "polynomial":
        cols = [np.prod(x ** np.asarray(alpha, dtype=np.float64), axis=1) for alpha in spec.exponents]
        return np.column_stack(cols)
    if spec.kind == "rbf":
        sq = np.sum((x[:, None, :] - spec.centers[None, :, :]) ** 2, axis=2)
        return np.hstack([ones, np.exp(-sq / (2.0 * spec.width ** 2))])
    if spec.kind == "sigmoid":
        return np.hstack([ones, sigmoid(x @ spec.weights.T + spec.offsets)])
    proj = x @ spec.frequencies.T
    pairs = np.empty((x.shape[0], 2 * proj.shape[1]))
    pairs[:, 0::2] = np.sin(proj)
    pairs[:, 1::2] = np.cos(proj)
    return np.hstack([ones, pairs])


def harmonic_frequencies(count, half_period):
    """``k * pi / L`` for k = 1..count, as a (count, 1) matrix."""
    if half_period <= 0:
        raise ParameterError("half period L must be > 0")
    return (np.arange(1, count + 1) * np.pi / half_period)[:, None]


def kmeans(x, k, rng=None, iterations=KMEANS_ITERATIONS):
    """Lloyd's algorithm from a seeded Forgy start (k distinct rows).

    A cluster that empties keeps its previous center.
    """
    x = as_matrix(x, "x")
    if not 1 <= k <= x.shape[0]:
        raise ParameterError(f"k-means needs 1 <= K <= M, got K={k}, M={x.shape[0]}")
    rng = as_rng(rng)
    centers = x[np.sort(rng.permutation(x.shape[0])[:k])].copy()
    for _ in range(iterations):
        dist = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        labels = np.argmin(dist, axis=1)
        new = centers.copy()
        for c in range(k):
            members = x[labels == c]
            if len(members):
                new[c] = members.mean(axis=0)
        if np.array_equal(new, centers):
            break
        centers = new
    return centers


def _place_centers(x, count, strategy, rng):
    lo, hi = x.min(axis=0), x.max(axis=0)
    if strategy == "grid":
        if x.shape[1] == 1:
            return np.linspace(lo[0], hi[0], count)[:, None]
        per_axis = max(1, round(count ** (1.0 / x.shape[1])))
        axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, x.shape[1])
        return mesh
    if strategy == "random":
        return lo + (hi - lo) * rng.uniform_array((count, x.shape[1]))
    if strategy == "kmeans":
        return kmeans(x, count, rng)
    raise ParameterError(f"unknown init strategy {strategy!r}")


def default_width(centers):
    """Grid spacing in 1-D, otherwise the mean nearest-center distance."""
    k = centers.shape[0]
    if k == 1:
        return 1.0
    dist = np.sqrt(np.sum((centers[:, None, :] - centers[None, :, :]) ** 2, axis=2))
    np.fill_diagonal(dist, np.inf)
    nearest = dist.min(axis=1)
    if centers.shape[1] == 1:
        spread = np.ptp(centers[:, 0]) / (k - 1)
        if spread > 0:
            return float(spread)
    width = float(np.mean(nearest))
    return width if width > 0 else 1.0


def init_basis_params(kind, x, count, strategy="grid", rng=None, width=None):
    """Choose fixed basis parameters from the data.

    rbf: centers by strategy, width by :func:`default_width` unless given.
    sigmoid: transition points placed like rbf centers; all weight vectors
    point along the all-ones direction with steepness ``1/width``.
    fourier: "grid" gives the harmonic ladder ``k*pi/L`` with L the half
    range of the data (1-D only); "random" draws frequencies uniformly in
    ``[-K*pi/L, K*pi/L]`` per feature.
    """
    x = as_matrix(np.asarray(x, dtype=np.float64).reshape(len(x), -1), "x")
    if count < 1:
        raise ParameterError("basis count must be >= 1")
    n = x.shape[1]
    rng = as_rng(rng)
    if kind == "polynomial":
        return BasisSpec("polynomial", n_features=n, degree=count)
    if kind in ("rbf", "sigmoid"):
        centers = _place_centers(x, count, strategy, rng)
        w = float(width) if width is not None else default_width(centers)
        if kind == "rbf":
            return BasisSpec("rbf", n_features=n, centers=centers, width=w)
        direction = np.full(n, 1.0 / (w * math.sqrt(n)))
        weights = np.tile(direction, (centers.shape[0], 1))
        return BasisSpec("sigmoid", n_features=n, weights=weights,
                         offsets=-np.sum(weights * centers, axis=1))
    if kind == "fourier":
        span = np.ptp(x, axis=0)
        half = float(np.max(span)) / 2.0 if np.max(span) > 0 else 1.0
        if strategy == "grid":
            if n != 1:
                raise ParameterError("the harmonic ladder is defined for 1-D inputs")
            return BasisSpec("fourier", n_features=1, frequencies=harmonic_frequencies(count, half))
        if strategy == "random":
            top = count * np.pi / half
            return BasisSpec("fourier", n_features=n,
                             frequencies=rng.uniform_array((count, n), -top, top))
        raise ParameterError(f"fourier basis supports 'grid' or 'random', not {strategy!r}")
    raise ParameterError(f"unknown basis kind {kind!r}")


def fit_lbfm_closed(spec, x, y, lam=0.0):
    """Least squares (``lam == 0``) or ridge on the expanded design."""
    phi = expand(spec, x)
    if lam < 0:
        raise ParameterError("lambda must be >= 0")
    if lam == 0:
        return fit_ols(phi, y)
    return fit_ridge_closed(phi, y, lam)


class BasisExpansion(TransformerMixin, BaseEstimator):
    """Transformer mapping raw features to basis-function features.

    Parameters
    ----------
    kind : {"polynomial", "rbf", "sigmoid", "fourier"}
    n_basis : int
        Degree for polynomials, number of basis functions otherwise.
    strategy : {"grid", "random", "kmeans"}
    width : float, optional
        RBF width / sigmoid scale; derived from the centers when None.
    include_bias : bool
        Keep the constant column.
    random_state : int
    """

    def __init__(self, kind="polynomial", n_basis=3, strategy="grid", width=None,
                 include_bias=True, random_state=0):
        self.kind = kind
        self.n_basis = n_basis
        self.strategy = strategy
        self.width = width
        self.include_bias = include_bias
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X)
        self.spec_ = init_basis_params(self.kind, X, self.n_basis, self.strategy,
                                       self.random_state, self.width)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        phi = expand(self.spec_, check_array(X))
        return phi if self.include_bias else phi[:, 1:]


class BasisFunctionRegressor(RegressorMixin, BaseEstimator):
    """Linear basis function model fitted in closed form.

    ``alpha`` is the ridge penalty under the SUM convention (0 = least
    squares). The intercept (constant basis function) is penalized along with
    the rest, as in ``(Phi'Phi + alpha I)^-1 Phi'y``.
    """

    def __init__(self, kind="polynomial", n_basis=3, strategy="grid", width=None,
                 alpha=0.0, random_state=0):
        self.kind = kind
        self.n_basis = n_basis
        self.strategy = strategy
        self.width = width
        self.alpha = alpha
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        self.spec_ = init_basis_params(self.kind, X, self.n_basis, self.strategy,
                                       self.random_state, self.width)
        self.coef_ = fit_lbfm_closed(self.spec_, X, y, self.alpha)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return expand(self.spec_, check_array(X)) @ self.coef_
