"""Gradient descent driver, learning-rate schedules, batching strategies and
coordinate descent."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import glm
from .exceptions import DivergedError, ParameterError
from .rng import as_rng

#: Loss above this multiple of the starting loss counts as divergence.
DIVERGENCE_FACTOR = 1e12


@dataclass(frozen=True)
class Schedule:
    """Learning-rate schedule.

    kind : {"constant", "step", "exponential", "cosine"}
    gamma : decay factor in (0, 1] (step, exponential)
    step_size : iterations per decay (step)
    horizon : annealing length T (cosine)
    """

    kind: str = "constant"
    gamma: float = 1.0
    step_size: int = 1
    horizon: int = 1

    def __post_init__(self):
        if self.kind not in ("constant", "step", "exponential", "cosine"):
            raise ParameterError(f"unknown schedule {self.kind!r}")
        if not 0 < self.gamma <= 1:
            raise ParameterError("schedule gamma must lie in (0, 1]")
        if self.step_size < 1 or self.horizon < 1:
            raise ParameterError("step_size and horizon must be >= 1")


def schedule_eval(schedule, eta0, t):
    """Learning rate at iteration ``t`` (0-based)."""
    if t < 0:
        raise ParameterError("t must be non-negative")
    if schedule.kind == "constant":
        return eta0
    if schedule.kind == "step":
        return eta0 * schedule.gamma ** (t // schedule.step_size)
    if schedule.kind == "exponential":
        return eta0 * schedule.gamma ** t
    t = min(t, schedule.horizon)
    return eta0 * 0.5 * (1.0 + math.cos(math.pi * t / schedule.horizon))


@dataclass(frozen=True)
class GdConfig:
    """Gradient-descent settings.

    ``delta`` is the loss-change threshold of the stopping rule (None turns
    it off); ``max_iters`` always applies. ``strategy`` is one of
    "batch", "stochastic", "minibatch" (the last needs ``batch_size``).
    """

    learning_rate: float = 0.1
    schedule: Schedule = field(default_factory=Schedule)
    strategy: str = "batch"
    batch_size: int = None
    delta: float = 1e-8
    max_iters: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ParameterError("learning_rate must be >= 0")
        if self.strategy not in ("batch", "stochastic", "minibatch"):
            raise ParameterError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "minibatch" and (self.batch_size is None or self.batch_size < 1):
            raise ParameterError("minibatch strategy needs batch_size >= 1")
        if self.delta is not None and self.delta < 0:
            raise ParameterError("delta must be >= 0")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be >= 1")


@dataclass
class TraceRecord:
    """Per-iteration log: loss of the iterate reached at step ``t``, the
    learning rate used to reach it and the inf-norm of the applied gradient."""

    initial_loss: float = float("nan")
    t: list = field(default_factory=list)
    loss: list = field(default_factory=list)
    eta: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    converged: bool = False

    def append(self, t, loss, eta, grad_norm):
        self.t.append(int(t))
        self.loss.append(float(loss))
        self.eta.append(float(eta))
        self.grad_norm.append(float(grad_norm))

    def __len__(self):
        return len(self.t)

    @property
    def final_loss(self):
        return self.loss[-1] if self.loss else self.initial_loss

    def rows(self):
        return list(zip(self.t, self.loss, self.eta, self.grad_norm))

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "loss", "eta", "grad_inf_norm"])
            for t, loss, eta, g in self.rows():
                writer.writerow([t, format(loss, ".17g"), format(eta, ".17g"), format(g, ".17g")])


def gd_minimize(loss_fn, grad_fn, theta0, cfg=None, step_fn=None, steps_per_check=None):
    """Minimize ``loss_fn`` by ``theta <- theta - eta_t * grad``.

    Parameters
    ----------
    loss_fn : callable(theta) -> float
        Full-data loss; also drives the stopping rule.
    grad_fn : callable(theta) -> array
        Gradient source. A :class:`GradientSource` supplies stochastic or
        mini-batch gradients and sets the check interval to one epoch.
    theta0 : array
    cfg : GdConfig
    step_fn : callable(theta, grad, eta) -> theta, optional
        Replaces the plain update (e.g. a penalized step).
    steps_per_check : int, optional
        Iterations between evaluations of the stopping rule.

    Stops when ``|L_prev - L_new| < delta`` at a check point, or after
    ``max_iters`` updates, and returns the last iterate with its trace.

    Raises
    ------
    DivergedError
        Loss or gradient becomes non-finite, or the loss exceeds
        ``DIVERGENCE_FACTOR`` times its starting value.
    """
    cfg = cfg or GdConfig()
    theta = np.array(theta0, dtype=np.float64, copy=True)
    if steps_per_check is None:
        steps_per_check = getattr(grad_fn, "steps_per_epoch", 1)
    trace = TraceRecord()
    current = float(loss_fn(theta))
    if not math.isfinite(current):
        raise DivergedError("loss is not finite at the starting point", trace)
    trace.initial_loss = current
    ceiling = DIVERGENCE_FACTOR * max(abs(current), 1.0)
    checked = current

    for t in range(cfg.max_iters):
        g = np.asarray(grad_fn(theta), dtype=np.float64)
        if not np.all(np.isfinite(g)):
            raise DivergedError(f"non-finite gradient at iteration {t + 1}", trace)
        eta = schedule_eval(cfg.schedule, cfg.learning_rate, t)
        theta = step_fn(theta, g, eta) if step_fn is not None else theta - eta * g
        current = float(loss_fn(theta))
        trace.append(t + 1, current, eta, np.max(np.abs(g)) if g.size else 0.0)
        if not math.isfinite(current) or current > ceiling:
            raise DivergedError(f"loss {current:.3e} at iteration {t + 1}: diverged", trace)
        if (t + 1) % steps_per_check == 0:
            if cfg.delta is not None and abs(checked - current) < cfg.delta:
                trace.converged = True
                break
            checked = current
    return theta, trace


def batch_index_stream(strategy, m, rng=None, batch_size=None):
    """Yield index arrays forever, one per iteration.

    batch: every row each time. stochastic: one row per step, walking a
    fresh seeded permutation each epoch. minibatch: consecutive blocks of a
    per-epoch permutation, the last short block kept; each block is sorted
    so that ``batch_size >= m`` reproduces the batch gradient bit-for-bit.
    """
    if m < 1:
        raise ParameterError("dataset is empty")
    if strategy == "batch":
        idx = np.arange(m)
        while True:
            yield idx
    rng = as_rng(rng)
    if strategy == "stochastic":
        size = 1
    elif strategy == "minibatch":
        if batch_size is None or batch_size < 1:
            raise ParameterError("minibatch needs batch_size >= 1")
        if batch_size > m:
            raise ParameterError(f"batch_size {batch_size} exceeds the {m} available rows")
        size = batch_size
    else:
        raise ParameterError(f"unknown strategy {strategy!r}")
    while True:
        perm = rng.permutation(m)
        for start in range(0, m, size):
            yield np.sort(perm[start:start + size])


def steps_per_epoch(strategy, m, batch_size=None):
    if strategy == "batch":
        return 1
    if strategy == "stochastic":
        return m
    return -(-m // batch_size)


class GradientSource:
    """Callable gradient provider over a data set.

    ``grad_on(theta, rows)`` computes the mean gradient over ``rows``; each
    call to the source consumes the next index block of the strategy.
    """

    def __init__(self, grad_on, m, strategy="batch", rng=None, batch_size=None):
        self.grad_on = grad_on
        self.strategy = strategy
        self._stream = batch_index_stream(strategy, m, rng, batch_size)
        self.steps_per_epoch = steps_per_epoch(strategy, m, batch_size)

    def next_rows(self):
        return next(self._stream)

    def __call__(self, theta):
        return self.grad_on(theta, self.next_rows())


def make_gradient_strategy(strategy, x, y, model_kind, rng=None, batch_size=None):
    """Gradient source for a GLM under the given batching strategy."""

    def grad_on(theta, rows):
        return glm.gradient(model_kind, theta, x[rows], y[rows], reduction="mean")

    return GradientSource(grad_on, x.shape[0], strategy, rng, batch_size)


def coordinate_descent(loss_fn, theta0, eta, max_sweeps=1000, derivative_free=False,
                       partial_fn=None, tol=0.0):
    """Cyclic coordinate updates.

    With ``partial_fn(theta, k)`` each coordinate takes a gradient step
    ``theta_k -= eta * dL/dtheta_k``. With ``derivative_free`` the
    coordinate moves by ``+eta`` or ``-eta`` only when that neighbour is
    strictly better than both the current point and the opposite neighbour,
    and otherwise stays put.

    Stops after a sweep whose largest coordinate change is ``<= tol``.
    """
    if not eta > 0:
        raise ParameterError("eta must be > 0")
    if not derivative_free and partial_fn is None:
        raise ParameterError("partial_fn is required unless derivative_free=True")
    theta = np.array(theta0, dtype=np.float64, copy=True).reshape(-1)

    def f(th):
        value = float(loss_fn(th))
        if not math.isfinite(value):
            raise DivergedError("non-finite loss during coordinate descent")
        return value

    f(theta)
    for _ in range(max_sweeps):
        largest = 0.0
        for k in range(theta.size):
            old = theta[k]
            if derivative_free:
                here = f(theta)
                theta[k] = old + eta
                up = f(theta)
                theta[k] = old - eta
                down = f(theta)
                if min(here, down) > up:
                    theta[k] = old + eta
                elif min(here, up) > down:
                    theta[k] = old - eta
                else:
                    theta[k] = old
            else:
                d = float(partial_fn(theta, k))
                if not math.isfinite(d):
                    raise DivergedError("non-finite partial derivative")
                theta[k] = old - eta * d
            largest = max(largest, abs(theta[k] - old))
        f(theta)
        if largest <= tol:
            break
    return theta
