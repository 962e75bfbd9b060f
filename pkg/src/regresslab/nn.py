"""Multilayer perceptrons trained by backpropagation.

Layer ``l`` holds a weight matrix of shape ``(K_l, K_{l-1} + 1)`` whose
column 0 is the bias. Hidden layers share one activation; the output layer
is linear, logistic or softmax. Pairing rules keep the output error signal
equal to ``yhat - y``: squared error goes with a linear output,
cross-entropy with a logistic or softmax output.
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import serialize
from .exceptions import ConfigurationError, ParameterError, ShapeError
from .glm import sigmoid, softmax
from .optim import GdConfig, GradientSource, Schedule, gd_minimize
from .rng import as_rng

ACTIVATIONS = ("sigmoid", "tanh", "relu", "identity")
OUTPUT_KINDS = ("linear", "logistic", "softmax")
LOSS_FOR_OUTPUT = {"linear": "mse", "logistic": "xent", "softmax": "xent"}


def activate(kind, z):
    if kind == "sigmoid":
        return sigmoid(z)
    if kind == "tanh":
        return np.tanh(z)
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "identity":
        return np.array(z, dtype=np.float64, copy=True)
    raise ParameterError(f"unknown activation {kind!r}")


def activation_derivative(kind, z, h):
    """Derivative at pre-activation ``z`` given ``h = act(z)``; relu'(0) = 0."""
    if kind == "sigmoid":
        return h * (1.0 - h)
    if kind == "tanh":
        return 1.0 - h ** 2
    if kind == "relu":
        return (z > 0).astype(np.float64)
    return np.ones_like(z)


class FlopCounter:
    """Tallies floating-point operations from the array shapes actually used."""

    def __init__(self):
        self.flops = 0

    def add(self, n):
        self.flops += int(n)


def _count(counter, n):
    if counter is not None:
        counter.add(n)


@dataclass(eq=False)
class MlpNet:
    layer_sizes: tuple
    activation: str
    output_kind: str
    weights: list

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if len(self.layer_sizes) < 2 or min(self.layer_sizes) < 1:
            raise ParameterError("layer_sizes needs an input and an output size, all >= 1")
        if self.activation not in ACTIVATIONS:
            raise ParameterError(f"unknown activation {self.activation!r}")
        if self.output_kind not in OUTPUT_KINDS:
            raise ParameterError(f"unknown output kind {self.output_kind!r}")
        if self.output_kind == "logistic" and self.layer_sizes[-1] != 1:
            raise ParameterError("logistic output needs exactly one output unit")
        if self.output_kind == "softmax" and self.layer_sizes[-1] < 2:
            raise ParameterError("softmax output needs at least two output units")
        self.weights = [np.asarray(w, dtype=np.float64) for w in self.weights]
        expected = self.weight_shapes()
        if [w.shape for w in self.weights] != expected:
            raise ShapeError(f"weight shapes {[w.shape for w in self.weights]} != {expected}")
        if not all(np.all(np.isfinite(w)) for w in self.weights):
            raise ParameterError("weights must be finite")

    def weight_shapes(self):
        s = self.layer_sizes
        return [(s[i + 1], s[i] + 1) for i in range(len(s) - 1)]

    @property
    def n_hidden_layers(self):
        return len(self.layer_sizes) - 2

    @property
    def n_params(self):
        return sum(w.size for w in self.weights)

    def copy(self):
        return MlpNet(self.layer_sizes, self.activation, self.output_kind,
                      [w.copy() for w in self.weights])

    def to_dict(self):
        return {
            "layer_sizes": list(self.layer_sizes),
            "activation": self.activation,
            "output_kind": self.output_kind,
            "weights": np.concatenate([w.ravel() for w in self.weights]).tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        sizes = tuple(d["layer_sizes"])
        shapes = [(sizes[i + 1], sizes[i] + 1) for i in range(len(sizes) - 1)]
        flat = np.asarray(d["weights"], dtype=np.float64)
        if flat.size != sum(a * b for a, b in shapes):
            raise ShapeError("weight vector length does not match layer_sizes")
        return cls(sizes, d["activation"], d["output_kind"], unpack(flat, shapes))


def pack(arrays):
    return np.concatenate([a.ravel() for a in arrays])


def unpack(flat, shapes):
    out, start = [], 0
    for shape in shapes:
        size = shape[0] * shape[1]
        out.append(flat[start:start + size].reshape(shape).copy())
        start += size
    return out


def save_net(net, path):
    serialize.dump(net.to_dict(), path)


def load_net(path):
    return MlpNet.from_dict(serialize.load(path))


def init_mlp(layer_sizes, activation="tanh", output_kind="linear", rng=None, scale=0.5):
    """Weights drawn from Uniform(-scale, scale), biases zero.

    Draws are taken layer by layer in row-major order from the seeded stream.
    """
    if not scale > 0:
        raise ParameterError("init scale must be > 0")
    rng = as_rng(rng)
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or min(sizes) < 1:
        raise ParameterError("layer_sizes needs an input and an output size, all >= 1")
    weights = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        w = np.zeros((fan_out, fan_in + 1))
        w[:, 1:] = rng.uniform_array((fan_out, fan_in), -scale, scale)
        weights.append(w)
    return MlpNet(sizes, activation, output_kind, weights)


@dataclass
class ForwardCache:
    """Pre-activations ``zs[l]`` and activations ``hs[l]`` (``hs[0]`` is the input)."""

    zs: list = field(default_factory=list)
    hs: list = field(default_factory=list)


def _as_batch(net, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != net.layer_sizes[0]:
        raise ShapeError(f"input has {x.shape[1]} features, network expects {net.layer_sizes[0]}")
    return x, single


def forward(net, x, counter=None):
    """Evaluate the network on one sample (vector) or a batch (rows).

    Returns
    -------
    (yhat, ForwardCache)
        ``yhat`` has shape (K_out,) for one sample, (M, K_out) for a batch.
    """
    h, single = _as_batch(net, x)
    m = h.shape[0]
    cache = ForwardCache(hs=[h])
    last = len(net.weights) - 1
    for i, w in enumerate(net.weights):
        z = h @ w[:, 1:].T + w[:, 0]
        _count(counter, 2 * m * w.shape[0] * (w.shape[1] - 1) + m * w.shape[0])
        if i < last:
            h = activate(net.activation, z)
        elif net.output_kind == "linear":
            h = z
        elif net.output_kind == "logistic":
            h = sigmoid(z)
        else:
            h = softmax(z)
        _count(counter, m * w.shape[0])
        cache.zs.append(z)
        cache.hs.append(h)
    return (h[0] if single else h), cache


def _targets(net, y, m):
    y = np.asarray(y, dtype=np.float64)
    k = net.layer_sizes[-1]
    if y.ndim <= 1 and k == 1:
        y = y.reshape(m, 1)
    elif y.ndim == 1 and y.size == k and m == 1:
        y = y[None, :]
    if y.shape != (m, k):
        raise ShapeError(f"targets have shape {y.shape}, expected {(m, k)}")
    return y


def _check_pairing(net, loss_kind):
    if loss_kind not in ("mse", "xent"):
        raise ParameterError(f"unknown loss {loss_kind!r}")
    if LOSS_FOR_OUTPUT[net.output_kind] != loss_kind:
        raise ConfigurationError(
            f"loss {loss_kind!r} cannot be paired with a {net.output_kind} output; "
            "use mse with linear, xent with logistic/softmax"
        )


def loss(net, x, y, loss_kind="mse"):
    """Mean per-sample loss: half squared error, or cross-entropy from logits."""
    _check_pairing(net, loss_kind)
    xb, _ = _as_batch(net, x)
    yhat, cache = forward(net, xb)
    y = _targets(net, y, xb.shape[0])
    z = cache.zs[-1]
    if net.output_kind == "linear":
        per = 0.5 * np.sum((z - y) ** 2, axis=1)
    elif net.output_kind == "logistic":
        per = np.logaddexp(0.0, z[:, 0]) - y[:, 0] * z[:, 0]
    else:
        zmax = z.max(axis=1, keepdims=True)
        lse = zmax[:, 0] + np.log(np.sum(np.exp(z - zmax), axis=1))
        per = lse - np.sum(y * z, axis=1)
    return float(np.mean(per))


def backprop(net, x, y, loss_kind="mse", cache=None, counter=None):
    """Gradients of the mean loss with respect to every weight matrix.

    The output error is ``delta = yhat - y``; hidden errors follow
    ``delta_l = act'(z_l) * (W_{l+1}[:, 1:]' delta_{l+1})``; each weight
    gradient is error times layer input, with the bias slot taking the error
    itself. For a batch the result is the mean of the per-sample gradients.
    """
    _check_pairing(net, loss_kind)
    xb, _ = _as_batch(net, x)
    m = xb.shape[0]
    if cache is None:
        _, cache = forward(net, xb, counter)
    y = _targets(net, y, m)
    delta = cache.hs[-1] - y
    _count(counter, delta.size)
    grads = [None] * len(net.weights)
    for i in range(len(net.weights) - 1, -1, -1):
        w = net.weights[i]
        h_in = cache.hs[i]
        g = np.empty_like(w)
        g[:, 0] = delta.sum(axis=0) / m
        g[:, 1:] = (delta.T @ h_in) / m
        _count(counter, 2 * m * w.size)
        grads[i] = g
        if i > 0:
            back = delta @ w[:, 1:]
            deriv = activation_derivative(net.activation, cache.zs[i - 1], cache.hs[i])
            delta = back * deriv
            _count(counter, 2 * m * w.shape[0] * (w.shape[1] - 1) + 2 * delta.size)
    return grads


def numerical_gradient(net, x, y, loss_kind="mse", step=1e-6):
    """Central finite differences of :func:`loss` for every weight."""
    grads = []
    for i, w in enumerate(net.weights):
        g = np.empty_like(w)
        for idx in np.ndindex(w.shape):
            h = step * (1.0 + abs(w[idx]))
            trial = net.copy()
            trial.weights[i][idx] = w[idx] + h
            up = loss(trial, x, y, loss_kind)
            trial.weights[i][idx] = w[idx] - h
            down = loss(trial, x, y, loss_kind)
            g[idx] = (up - down) / (2 * h)
        grads.append(g)
    return grads


def train_mlp(net, x, y, cfg=None, loss_kind=None):
    """Gradient-descent training with mini-batch backprop.

    Returns
    -------
    (trained net, TraceRecord)
    """
    cfg = cfg or GdConfig()
    loss_kind = loss_kind or LOSS_FOR_OUTPUT[net.output_kind]
    _check_pairing(net, loss_kind)
    xb, _ = _as_batch(net, x)
    y = _targets(net, y, xb.shape[0])
    shapes = net.weight_shapes()

    def rebuild(flat):
        return MlpNet(net.layer_sizes, net.activation, net.output_kind, unpack(flat, shapes))

    def loss_fn(flat):
        return loss(rebuild(flat), xb, y, loss_kind)

    def grad_on(flat, rows):
        return pack(backprop(rebuild(flat), xb[rows], y[rows], loss_kind))

    source = GradientSource(grad_on, xb.shape[0], cfg.strategy, cfg.seed, cfg.batch_size)
    flat, trace = gd_minimize(loss_fn, source, pack(net.weights), cfg)
    return rebuild(flat), trace


@dataclass(frozen=True)
class VanishingReport:
    norms: tuple  # inf-norm of each weight-matrix gradient, input side first
    ratio: float  # first hidden layer / last hidden layer; None if degenerate
    degenerate: bool


def vanishing_diagnostic(net, x, y, loss_kind=None):
    """Per-layer gradient inf-norms and the first/last hidden-layer ratio."""
    if net.n_hidden_layers < 2:
        raise ParameterError("the diagnostic needs at least two hidden layers")
    loss_kind = loss_kind or LOSS_FOR_OUTPUT[net.output_kind]
    grads = backprop(net, x, y, loss_kind)
    norms = tuple(float(np.max(np.abs(g))) for g in grads)
    last = norms[net.n_hidden_layers - 1]
    if last == 0.0:
        return VanishingReport(norms, None, True)
    return VanishingReport(norms, norms[0] / last, False)


def count_flops(net, x, y, loss_kind=None):
    """Flops of one forward plus backward pass over ``x``."""
    counter = FlopCounter()
    backprop(net, x, y, loss_kind or LOSS_FOR_OUTPUT[net.output_kind], counter=counter)
    return counter.flops


class _MlpBase(BaseEstimator):
    def __init__(self, hidden_layer_sizes=(20,), activation="tanh", learning_rate=0.1,
                 max_iter=5000, strategy="batch", batch_size=None, delta=1e-10,
                 init_scale=0.5, random_state=0):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.strategy = strategy
        self.batch_size = batch_size
        self.delta = delta
        self.init_scale = init_scale
        self.random_state = random_state

    def _train(self, X, targets, n_out, output_kind):
        sizes = (X.shape[1],) + tuple(self.hidden_layer_sizes) + (n_out,)
        rng = as_rng(self.random_state)
        net = init_mlp(sizes, self.activation, output_kind, rng, self.init_scale)
        cfg = GdConfig(learning_rate=self.learning_rate, schedule=Schedule(),
                       strategy=self.strategy, batch_size=self.batch_size,
                       delta=self.delta, max_iters=self.max_iter, seed=self.random_state)
        self.net_, self.trace_ = train_mlp(net, X, targets, cfg)
        self.n_features_in_ = X.shape[1]
        return self


class MLPRegressor(RegressorMixin, _MlpBase):
    """Single-output MLP regressor (squared error, linear output)."""

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        return self._train(X, y, 1, "linear")

    def predict(self, X):
        check_is_fitted(self, "net_")
        return forward(self.net_, check_array(X))[0][:, 0]


class MLPClassifier(ClassifierMixin, _MlpBase):
    """MLP classifier: logistic output for two classes, softmax otherwise."""

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, ids = np.unique(y, return_inverse=True)
        if self.classes_.size < 2:
            raise ParameterError("need at least two classes")
        if self.classes_.size == 2:
            return self._train(X, ids.astype(np.float64), 1, "logistic")
        onehot = np.eye(self.classes_.size)[ids]
        return self._train(X, onehot, self.classes_.size, "softmax")

    def predict_proba(self, X):
        check_is_fitted(self, "net_")
        out = forward(self.net_, check_array(X))[0]
        if self.net_.output_kind == "logistic":
            return np.hstack([1.0 - out, out])
        return out

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]
