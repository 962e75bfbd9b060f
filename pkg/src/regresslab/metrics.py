"""Error metrics for regression and classification."""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .exceptions import ShapeError, UndefinedMetricError

#: Probabilities are clipped to [PROB_EPS, 1 - PROB_EPS] before taking logs.
PROB_EPS = 1e-12


@dataclass(frozen=True)
class RegressionReport:
    mse: float
    rmse: float
    mae: float
    mape: float = None  # None when some target is exactly 0

    def as_dict(self):
        return {"mse": self.mse, "rmse": self.rmse, "mae": self.mae, "mape": self.mape}


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ClassificationReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    counts: ConfusionCounts
    degenerate: tuple = field(default=())  # names of metrics that hit 0/0

    @property
    def error_rate(self):
        return 1.0 - self.accuracy

    def as_dict(self):
        return {
            "accuracy": self.accuracy,
            "error_rate": self.error_rate,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.counts.tp,
            "fp": self.counts.fp,
            "tn": self.counts.tn,
            "fn": self.counts.fn,
            "degenerate": list(self.degenerate),
        }


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ShapeError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ShapeError("metrics need at least one sample")
    return a, b


def regression_metrics(yhat, y):
    """MSE, RMSE, MAE and MAPE with 1/M averaging."""
    yhat, y = _pair(yhat, y)
    err = yhat - y
    mse = float(np.mean(err ** 2))
    with np.errstate(over="ignore"):  # tiny nonzero labels give an infinite MAPE
        mape = float(np.mean(np.abs(err / y))) if np.all(y != 0) else None
    return RegressionReport(mse=mse, rmse=float(np.sqrt(mse)), mae=float(np.mean(np.abs(err))), mape=mape)


def _ratio(num, den, name, degenerate):
    if den == 0:
        degenerate.append(name)
        return 0.0
    return num / den


def classification_metrics(yhat_class, y_class, positive=1):
    """Accuracy plus one-vs-``positive`` precision, recall and F1.

    Any 0/0 is reported as 0 and its name listed in ``degenerate``.
    """
    yhat = np.asarray(yhat_class).ravel()
    y = np.asarray(y_class).ravel()
    if yhat.shape != y.shape:
        raise ShapeError(f"length mismatch: {yhat.size} vs {y.size}")
    if y.size == 0:
        raise ShapeError("metrics need at least one sample")
    pred_pos = yhat == positive
    true_pos = y == positive
    counts = ConfusionCounts(
        tp=int(np.sum(pred_pos & true_pos)),
        fp=int(np.sum(pred_pos & ~true_pos)),
        tn=int(np.sum(~pred_pos & ~true_pos)),
        fn=int(np.sum(~pred_pos & true_pos)),
    )
    degenerate = []
    accuracy = 1.0 - np.sum(yhat != y) / y.size
    precision = _ratio(counts.tp, counts.tp + counts.fp, "precision", degenerate)
    recall = _ratio(counts.tp, counts.tp + counts.fn, "recall", degenerate)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", degenerate)
    return ClassificationReport(float(accuracy), float(precision), float(recall), float(f1),
                                counts, tuple(degenerate))


def cross_entropy(yhat_prob, y_onehot):
    """Mean over samples of ``-sum_k y_k log(yhat_k)``, probabilities clipped."""
    p = np.asarray(yhat_prob, dtype=np.float64)
    y = np.asarray(y_onehot, dtype=np.float64)
    if p.shape != y.shape:
        raise ShapeError(f"shape mismatch: {p.shape} vs {y.shape}")
    if p.ndim == 1:
        p, y = p[None, :], y[None, :]
    p = np.clip(p, PROB_EPS, 1.0 - PROB_EPS)
    return float(-np.mean(np.sum(y * np.log(p), axis=1)))


def binary_cross_entropy(p_hat, y):
    """Per-sample Bernoulli cross-entropy ``-[y log p + (1-y) log(1-p)]``.

    ``y`` may be any value in [0, 1] (a soft label).
    """
    p = np.clip(np.asarray(p_hat, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)
    y = np.asarray(y, dtype=np.float64)
    return -(y * np.log(p) + (1.0 - y) * np.log1p(-p))


def bernoulli_entropy(q):
    q = np.asarray(q, dtype=np.float64)
    return -(_xlogy(q, q) + _xlogy(1.0 - q, 1.0 - q))


def bernoulli_kl(q, p):
    """KL(Bern(q) || Bern(p))."""
    q = np.asarray(q, dtype=np.float64)
    p = np.clip(np.asarray(p, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)
    return _xlogy(q, q) - _xlogy(q, p) + _xlogy(1.0 - q, 1.0 - q) - _xlogy(1.0 - q, 1.0 - p)


def _xlogy(a, b):
    a, b = np.broadcast_arrays(a, b)
    out = np.zeros(a.shape)
    mask = a != 0
    out[mask] = a[mask] * np.log(b[mask])
    return out if out.ndim else float(out)


def auc(scores, y_class):
    """Area under the ROC curve via the Mann-Whitney rank statistic."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(y_class).ravel()
    if scores.shape != y.shape:
        raise ShapeError(f"length mismatch: {scores.size} vs {y.size}")
    pos = y == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both classes present")
    ranks = rankdata(scores)  # ties share their average rank
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))
