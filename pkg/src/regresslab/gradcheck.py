"""Finite-difference verification of the analytic gradients."""

import numpy as np

from . import basis, glm, nn
from .dataset import add_bias, one_hot_encode
from .rng import as_rng

DEFAULT_TOLERANCE = 1e-5


def central_difference(f, theta, rel_step=1e-6):
    """Central differences with step ``rel_step * (1 + |theta_i|)`` per entry."""
    theta = np.array(theta, dtype=np.float64, copy=True)
    grad = np.empty_like(theta)
    for idx in np.ndindex(theta.shape):
        h = rel_step * (1.0 + abs(theta[idx]))
        old = theta[idx]
        theta[idx] = old + h
        up = f(theta)
        theta[idx] = old - h
        down = f(theta)
        theta[idx] = old
        grad[idx] = (up - down) / (2.0 * h)
    return grad


def relative_error(analytic, numeric):
    """``||a - n||_inf / max(||a||_inf, ||n||_inf)`` (0 when both vanish)."""
    a = np.concatenate([np.ravel(v) for v in analytic]) if isinstance(analytic, list) else np.ravel(analytic)
    n = np.concatenate([np.ravel(v) for v in numeric]) if isinstance(numeric, list) else np.ravel(numeric)
    scale = max(np.max(np.abs(a)), np.max(np.abs(n)))
    if scale < 1e-300:
        return 0.0
    return float(np.max(np.abs(a - n)) / scale)


def _glm_problem(kind, rng, m=8, n=3, k=3):
    x = add_bias(rng.normal_array((m, n)))
    if kind == "linear":
        return x, rng.normal_array(m), rng.normal_array(n + 1)
    if kind == "logistic":
        y = (rng.uniform_array(m) < 0.5).astype(np.float64)
        return x, y, rng.normal_array(n + 1)
    ids = np.array([rng.randbelow(k) for _ in range(m)])
    return x, one_hot_encode(ids, k), rng.normal_array((n + 1, k))


def check_glm(kind, draws=100, rng=None):
    """Worst relative error of :func:`glm.gradient` over random problems."""
    rng = as_rng(rng)
    worst = 0.0
    for _ in range(draws):
        x, y, theta = _glm_problem(kind, rng)
        analytic = glm.gradient(kind, theta, x, y)
        numeric = central_difference(lambda t: glm.loss(kind, t, x, y), theta)
        worst = max(worst, relative_error(analytic, numeric))
    return worst


def check_lbfm(draws=100, rng=None):
    """Half-MSE gradient on RBF-expanded features."""
    rng = as_rng(rng)
    worst = 0.0
    for _ in range(draws):
        x = rng.uniform_array((10, 1), 0.0, 1.0)
        spec = basis.init_basis_params("rbf", x, 5, "random", rng)
        phi = basis.expand(spec, x)
        y = rng.normal_array(10)
        theta = rng.normal_array(phi.shape[1])
        analytic = glm.gradient("linear", theta, phi, y)
        numeric = central_difference(lambda t: glm.loss("linear", t, phi, y), theta)
        worst = max(worst, relative_error(analytic, numeric))
    return worst


def _random_net(rng):
    n_hidden = 1 + rng.randbelow(2)
    sizes = [1 + rng.randbelow(4)] + [2 + rng.randbelow(5) for _ in range(n_hidden)]
    output = ("linear", "logistic", "softmax")[rng.randbelow(3)]
    sizes.append(1 if output != "softmax" else 3)
    act = ("sigmoid", "tanh")[rng.randbelow(2)]
    return nn.init_mlp(sizes, act, output, rng, scale=1.0)


def check_mlp(draws=100, rng=None):
    """Backprop against central differences on random small smooth nets."""
    rng = as_rng(rng)
    worst = 0.0
    for _ in range(draws):
        net = _random_net(rng)
        for w in net.weights:
            w[:, 0] = rng.uniform_array(w.shape[0], -0.5, 0.5)
        m = 4
        x = rng.normal_array((m, net.layer_sizes[0]))
        if net.output_kind == "linear":
            y = rng.normal_array((m, 1))
        elif net.output_kind == "logistic":
            y = (rng.uniform_array(m) < 0.5).astype(np.float64)
        else:
            y = one_hot_encode([rng.randbelow(3) for _ in range(m)], 3)
        loss_kind = nn.LOSS_FOR_OUTPUT[net.output_kind]
        shapes = net.weight_shapes()

        def f(flat, net=net, x=x, y=y, loss_kind=loss_kind):
            trial = nn.MlpNet(net.layer_sizes, net.activation, net.output_kind, nn.unpack(flat, shapes))
            return nn.loss(trial, x, y, loss_kind)

        analytic = nn.pack(nn.backprop(net, x, y, loss_kind))
        numeric = central_difference(f, nn.pack(net.weights))
        worst = max(worst, relative_error(analytic, numeric))
    return worst


def run_all(draws=100, seed=0, tolerance=DEFAULT_TOLERANCE):
    """Gradient checks for every model family; returns a report dict."""
    rng = as_rng(seed)
    results = {
        "linear": check_glm("linear", draws, rng),
        "logistic": check_glm("logistic", draws, rng),
        "softmax": check_glm("softmax", draws, rng),
        "lbfm": check_lbfm(draws, rng),
        "mlp": check_mlp(draws, rng),
    }
    return {
        "draws_per_model": draws,
        "tolerance": tolerance,
        "max_relative_error": results,
        "passed": {k: v < tolerance for k, v in results.items()},
        "all_passed": all(v < tolerance for v in results.values()),
    }
