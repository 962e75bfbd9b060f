"""Train/validation splitting and cross-validated model selection."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dataset import fmt17
from .exceptions import ParameterError, ShapeError
from .rng import as_rng


@dataclass(frozen=True, eq=False)
class FoldPlan:
    """Fold id per row.

    For a holdout plan, fold 0 is the validation set and fold 1 the
    training set; only fold 0 is scored.
    """

    folds: np.ndarray
    k: int
    kind: str
    seed: int = 0

    @property
    def n_rows(self):
        return self.folds.shape[0]

    @property
    def scored_folds(self):
        return (0,) if self.kind == "holdout" else tuple(range(self.k))

    def fold_sizes(self):
        return np.bincount(self.folds, minlength=self.k)

    def indices(self, fold):
        """(train_rows, validation_rows) for ``fold``."""
        return np.flatnonzero(self.folds != fold), np.flatnonzero(self.folds == fold)


def split(m, kind="kfold", rng=None, k=5, frac=0.2):
    """Seeded shuffle, then contiguous assignment of the shuffled rows.

    kind : {"holdout", "kfold", "loocv"}
        holdout puts ``ceil(frac * m)`` rows in validation; kfold makes
        folds whose sizes differ by at most one (larger folds first); loocv
        is kfold with ``k = m``.
    """
    seed = rng if isinstance(rng, int) else getattr(rng, "state", 0)
    rng = as_rng(rng)
    if m < 2:
        raise ParameterError("need at least two rows to split")
    perm = rng.permutation(m)
    folds = np.empty(m, dtype=np.int64)
    if kind == "holdout":
        if not 0 < frac < 1:
            raise ParameterError("holdout fraction must lie in (0, 1)")
        n_val = math.ceil(frac * m)
        if n_val >= m:
            raise ParameterError("holdout leaves no training rows")
        folds[perm[:n_val]] = 0
        folds[perm[n_val:]] = 1
        return FoldPlan(folds, 2, "holdout", seed)
    if kind == "loocv":
        k = m
    elif kind != "kfold":
        raise ParameterError(f"unknown split kind {kind!r}")
    if not 2 <= k <= m:
        raise ParameterError(f"k-fold needs 2 <= k <= m, got k={k}, m={m}")
    base, extra = divmod(m, k)
    start = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        folds[perm[start:start + size]] = fold
        start += size
    return FoldPlan(folds, k, "loocv" if kind == "loocv" else "kfold", seed)


@dataclass(frozen=True)
class CVResult:
    scores: tuple
    mean: float


def _predictor(fitted):
    if hasattr(fitted, "predict"):
        return fitted.predict
    if callable(fitted):
        return fitted
    raise TypeError("fit_fn must return a callable or an object with .predict")


def cross_validate(x, y, plan, fit_fn, metric_fn, on_error="raise"):
    """Fit on each fold's complement and score on the fold.

    Parameters
    ----------
    x, y : arrays with ``plan.n_rows`` rows
    fit_fn : callable(x_train, y_train) -> predictor
        The predictor is a callable or has ``.predict``.
    metric_fn : callable(yhat, y) -> float
    on_error : {"raise", "inf"}
        With "inf", a fold whose fit raises an ArithmeticError or ValueError
        (e.g. fewer rows than parameters) scores ``inf``.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape[0] != plan.n_rows or y.shape[0] != plan.n_rows:
        raise ShapeError(f"plan covers {plan.n_rows} rows, data has {x.shape[0]}")
    scores = []
    for fold in plan.scored_folds:
        train, val = plan.indices(fold)
        if train.size == 0:
            raise ParameterError(f"fold {fold} leaves no training rows")
        try:
            predict = _predictor(fit_fn(x[train], y[train]))
            scores.append(float(metric_fn(predict(x[val]), y[val])))
        except (ArithmeticError, ValueError):
            if on_error != "inf":
                raise
            scores.append(math.inf)
    return CVResult(tuple(scores), float(np.mean(scores)))


@dataclass(frozen=True)
class ScoreRow:
    candidate: object
    scores: tuple
    mean: float


def select_hyperparameter(x, y, candidates, plan, fit_fn_factory, metric_fn, on_error="raise"):
    """Candidate with the smallest mean validation score (first wins ties).

    ``fit_fn_factory(candidate)`` returns a ``fit_fn`` for
    :func:`cross_validate`.

    Returns
    -------
    (best_candidate, list of ScoreRow)
    """
    candidates = list(candidates)
    if not candidates:
        raise ParameterError("need at least one candidate")
    table = []
    for c in candidates:
        res = cross_validate(x, y, plan, fit_fn_factory(c), metric_fn, on_error)
        table.append(ScoreRow(c, res.scores, res.mean))
    best = min(range(len(table)), key=lambda i: (table[i].mean, i))
    return candidates[best], table


def scores_to_csv(table, path):
    """candidate, fold_0 ... fold_{k-1}, mean"""
    width = max(len(r.scores) for r in table)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["candidate"] + [f"fold_{i}" for i in range(width)] + ["mean"])
        for r in table:
            cand = fmt17(r.candidate) if isinstance(r.candidate, float) else str(r.candidate)
            writer.writerow([cand] + [fmt17(s) for s in r.scores] + [fmt17(r.mean)])
