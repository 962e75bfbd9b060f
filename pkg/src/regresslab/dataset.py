"""Datasets: container, CSV I/O, encodings and synthetic generators."""

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .exceptions import (
    EmptyInputError,
    ParameterError,
    ParseError,
    SchemaError,
    ShapeError,
)
from .linalg import as_matrix, as_vector, cholesky
from .rng import as_rng

RENTAL_PAIRS = ((78, 6600), (71, 6500), (60, 4900), (48, 4500), (52, 3800), (45, 4300))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus exactly one label column (real or class id).

    Attributes
    ----------
    x : ndarray of shape (M, N)
    y_real : ndarray of shape (M,) or None
    y_class : int ndarray of shape (M,) or None
        0-based class ids.
    feature_names : tuple of str
    label_name : str
    bias_augmented : bool
        If True, column 0 of ``x`` is all ones.
    """

    x: np.ndarray
    y_real: np.ndarray = None
    y_class: np.ndarray = None
    feature_names: tuple = field(default=())
    label_name: str = "y"
    bias_augmented: bool = False

    def __post_init__(self):
        x = as_matrix(self.x, "x")
        object.__setattr__(self, "x", x)
        if (self.y_real is None) == (self.y_class is None):
            raise SchemaError("exactly one of y_real / y_class must be given")
        if self.y_real is not None:
            y = as_vector(self.y_real, "y_real")
            object.__setattr__(self, "y_real", y)
        else:
            y = np.asarray(self.y_class)
            if y.ndim != 1 or (y.size and (not np.all(y == np.round(y)) or y.min() < 0)):
                raise SchemaError("y_class must be a 1-D list of non-negative integers")
            y = y.astype(np.int64)
            object.__setattr__(self, "y_class", y)
        if y.shape[0] != x.shape[0]:
            raise ShapeError(f"x has {x.shape[0]} rows but labels have {y.shape[0]}")
        names = tuple(self.feature_names) or tuple(f"x{i}" for i in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise ShapeError(f"{len(names)} feature names for {x.shape[1]} columns")
        object.__setattr__(self, "feature_names", names)
        if self.bias_augmented and (x.shape[1] == 0 or not np.all(x[:, 0] == 1.0)):
            raise SchemaError("bias_augmented dataset must have an all-ones column 0")

    @property
    def n_samples(self):
        return self.x.shape[0]

    @property
    def n_features(self):
        return self.x.shape[1]

    @property
    def label_kind(self):
        return "real" if self.y_real is not None else "class"

    @property
    def y(self):
        return self.y_real if self.y_real is not None else self.y_class

    def with_bias(self):
        """Copy with a leading column of ones (no-op if already augmented)."""
        if self.bias_augmented:
            return self
        x = add_bias(self.x)
        return replace(self, x=x, feature_names=("bias",) + self.feature_names, bias_augmented=True)

    def subset(self, rows):
        rows = np.asarray(rows)
        kwargs = {"x": self.x[rows]}
        if self.y_real is not None:
            kwargs["y_real"] = self.y_real[rows]
        else:
            kwargs["y_class"] = self.y_class[rows]
        return replace(self, **kwargs)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is b
            return a.shape == b.shape and np.array_equal(a, b)

        return (
            same(self.x, other.x)
            and same(self.y_real, other.y_real)
            and same(self.y_class, other.y_class)
            and self.feature_names == other.feature_names
            and self.label_name == other.label_name
            and self.bias_augmented == other.bias_augmented
        )

    __hash__ = None


def add_bias(x):
    """Prepend a column of ones."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return np.hstack([np.ones((x.shape[0], 1)), x])


def fmt17(value):
    """17-significant-digit decimal; round-trips every finite float64."""
    return format(float(value), ".17g")


def save_csv(d, path):
    """Write ``d`` with a header row; labels go in the last column."""
    header = list(d.feature_names) + [d.label_name]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        labels = d.y_real if d.y_real is not None else d.y_class
        for row, label in zip(d.x, labels):
            cells = [fmt17(v) for v in row]
            cells.append(fmt17(label) if d.y_real is not None else str(int(label)))
            writer.writerow(cells)


def load_csv(path, label_column="y", label_kind="real", one_based=False):
    """Read a header-first numeric CSV.

    Parameters
    ----------
    path : path-like
    label_column : str
        Header name of the label column; every other column is a feature.
    label_kind : {"real", "class"}
    one_based : bool
        Class labels in the file start at 1; they are shifted to 0-based.
    """
    if label_kind not in ("real", "class"):
        raise ParameterError(f"label_kind must be 'real' or 'class', got {label_kind!r}")
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyInputError(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    if len(rows) == 1:
        raise EmptyInputError(f"{path}: no data rows after header")
    if label_column not in header:
        raise SchemaError(f"{path}: label column {label_column!r} not in header {header}")
    label_idx = header.index(label_column)

    values = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}: row {i} has {len(row)} cells, expected {len(header)}", row=i)
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"{path}: non-numeric cell {cell!r} at row {i}, column {j + 1}",
                                 row=i, col=j + 1) from None
            if not math.isfinite(v):
                raise ParseError(f"{path}: non-finite cell at row {i}, column {j + 1}", row=i, col=j + 1)
            values[i - 2, j] = v

    feature_idx = [j for j in range(len(header)) if j != label_idx]
    x = values[:, feature_idx]
    names = tuple(header[j] for j in feature_idx)
    labels = values[:, label_idx]
    if label_kind == "real":
        return Dataset(x=x, y_real=labels, feature_names=names, label_name=label_column)

    for i, v in enumerate(labels):
        if v != int(v) or v < (1 if one_based else 0):
            raise ParseError(f"{path}: invalid class label {v!r} at row {i + 2}",
                             row=i + 2, col=label_idx + 1)
    ids = labels.astype(np.int64) - (1 if one_based else 0)
    return Dataset(x=x, y_class=ids, feature_names=names, label_name=label_column)


def fixture_rental():
    """Six (area m^2, monthly rent) pairs used as the running linear-fit example."""
    pairs = np.array(RENTAL_PAIRS, dtype=np.float64)
    return Dataset(x=pairs[:, :1], y_real=pairs[:, 1], feature_names=("area",), label_name="rent")


def one_hot_encode(y_class, k):
    """M x k indicator matrix for 0-based class ids."""
    ids = np.asarray(y_class, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= k):
        raise ParameterError(f"class ids must lie in [0, {k}), got range [{ids.min()}, {ids.max()}]")
    out = np.zeros((ids.shape[0], k))
    out[np.arange(ids.shape[0]), ids] = 1.0
    return out


def standardize(d):
    """Center each feature and scale to unit population std.

    Constant columns are centered only; their recorded std is 1.

    Returns
    -------
    (Dataset, means, stds)
    """
    if d.bias_augmented:
        raise ParameterError("standardize before adding the bias column")
    if d.n_samples < 2:
        raise ParameterError("standardize needs at least 2 rows")
    means = d.x.mean(axis=0)
    stds = d.x.std(axis=0)
    stds = np.where(stds > 0, stds, 1.0)
    return replace(d, x=(d.x - means) / stds), means, stds


def gen_sine(m, noise_std=0.2, rng=None):
    """``y = sin(2 pi x) + N(0, noise_std^2)`` on an inclusive grid over [0, 1]."""
    if m < 2:
        raise ParameterError("gen_sine needs m >= 2")
    if noise_std < 0:
        raise ParameterError("noise_std must be non-negative")
    rng = as_rng(rng)
    x = np.linspace(0.0, 1.0, m)
    y = np.sin(2.0 * np.pi * x)
    if noise_std > 0:
        y = y + noise_std * rng.normal_array(m)
    return Dataset(x=x[:, None], y_real=y, feature_names=("x",))


def gen_two_gaussians(m_per_class, mu0, mu1, sigma, rng=None):
    """Two Gaussian classes with shared covariance; class 0 rows first."""
    mu0 = as_vector(mu0, "mu0")
    mu1 = as_vector(mu1, "mu1")
    sigma = as_matrix(sigma, "sigma")
    if mu0.shape != mu1.shape or sigma.shape != (mu0.size, mu0.size):
        raise ShapeError("mean vectors and covariance dimensions disagree")
    L = cholesky(sigma)
    rng = as_rng(rng)
    n = mu0.size
    rows = []
    for mu in (mu0, mu1):
        z = rng.normal_array((m_per_class, n))
        rows.append(mu + z @ L.T)
    labels = np.repeat([0, 1], m_per_class)
    return Dataset(x=np.vstack(rows), y_class=labels)


def gen_sparse_regression(m=100, coef=(3.0, 0.0, 0.0, -2.0, 0.0, 1.5, 0.0, 0.0),
                          noise_std=0.1, intercept=0.0, rng=None):
    """Gaussian design with a sparse true coefficient vector."""
    coef = np.asarray(coef, dtype=np.float64)
    rng = as_rng(rng)
    x = rng.normal_array((m, coef.size))
    y = intercept + x @ coef + noise_std * rng.normal_array(m)
    return Dataset(x=x, y_real=y)
