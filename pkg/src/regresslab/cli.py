"""Command-line interface.

Subcommands: synth, fit, eval, sweep, gradcheck, version.

Exit status: 0 success, 2 configuration/input error, 3 numerical failure
(divergence, singular system). Diagnostics go to stderr as one line.
"""

import argparse
import copy
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, basis, cv, glm, gradcheck, kernel, metrics, nn, regpath, serialize
from .dataset import (
    add_bias,
    fixture_rental,
    gen_sine,
    gen_sparse_regression,
    gen_two_gaussians,
    load_csv,
    one_hot_encode,
    save_csv,
)
from .exceptions import NumericalError, SchemaError
from .optim import GdConfig, Schedule, gd_minimize, make_gradient_strategy
from .regpath import PenaltySpec, penalized_step
from .rng import Rng

SEED_ENV = "REGRESSLAB_SEED"
MODEL_KINDS = ("linear", "logistic", "softmax", "lbfm", "kernel-ridge", "mlp")
GENERATORS = ("sine", "two-gaussians", "rental", "sparse")

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["data", "model"],
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "data": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "label": {"type": "string"},
                "label_kind": {"enum": ["real", "class"]},
                "one_based": {"type": "boolean"},
                "generator": {"enum": list(GENERATORS)},
                "params": {"type": "object"},
            },
            "oneOf": [{"required": ["path"], "not": {"required": ["generator"]}},
                      {"required": ["generator"], "not": {"required": ["path"]}}],
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": list(MODEL_KINDS)},
                "basis": {
                    "type": "object",
                    "properties": {
                        "kind": {"enum": list(basis.BASIS_KINDS)},
                        "count": {"type": "integer", "minimum": 0},
                        "strategy": {"enum": ["grid", "random", "kmeans"]},
                        "width": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "kernel": {"type": "object", "properties": {"kind": {"enum": list(kernel.KERNEL_KINDS)}}},
                "net": {
                    "type": "object",
                    "properties": {
                        "hidden": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                        "activation": {"enum": list(nn.ACTIVATIONS)},
                        "init_scale": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            },
        },
        "training": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "method": {"enum": ["closed-form", "gd"]},
                "learning_rate": {"type": "number", "minimum": 0},
                "strategy": {"enum": ["batch", "stochastic", "minibatch"]},
                "batch_size": {"type": "integer", "minimum": 1},
                "delta": {"type": ["number", "null"], "minimum": 0},
                "max_iters": {"type": "integer", "minimum": 1},
                "schedule": {
                    "type": "object",
                    "properties": {
                        "kind": {"enum": ["constant", "step", "exponential", "cosine"]},
                        "gamma": {"type": "number"},
                        "step_size": {"type": "integer"},
                        "horizon": {"type": "integer"},
                    },
                },
            },
        },
        "penalty": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["none", "l1", "l2"]},
                "lambda": {"type": "number", "minimum": 0},
                "grid": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
            },
        },
        "cv": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["holdout", "kfold", "loocv"]},
                "folds": {"type": "integer", "minimum": 2},
                "frac": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"directory": {"type": "string"}},
        },
    },
}


class UsageError(Exception):
    """Bad invocation; reported with exit status 2."""


# -- data ------------------------------------------------------------------

def synthesize(kind, seed=0, m=None, noise=None):
    rng = Rng(seed)
    if kind == "rental":
        return fixture_rental()
    if kind == "sine":
        return gen_sine(m or 10, 0.2 if noise is None else noise, rng)
    if kind == "two-gaussians":
        eye = np.eye(2)
        return gen_two_gaussians(m or 100, [-1.0, 0.0], [1.0, 0.0], eye, rng)
    if kind == "sparse":
        return gen_sparse_regression(m or 100, noise_std=0.1 if noise is None else noise, rng=rng)
    raise UsageError(f"unknown generator {kind!r}")


def load_data(cfg, seed):
    data = cfg["data"]
    if "path" in data:
        return load_csv(data["path"], data.get("label", "y"), data.get("label_kind", "real"),
                        data.get("one_based", False))
    params = data.get("params", {})
    return synthesize(data["generator"], seed, params.get("m"), params.get("noise"))


def resolve_seed(cfg):
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise SchemaError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return int(cfg.get("seed", 0))


def validate_config(cfg):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"config error at {where}: {exc.message}") from None


# -- models ----------------------------------------------------------------

def _gd_config(training, seed):
    sched = training.get("schedule", {})
    return GdConfig(
        learning_rate=training.get("learning_rate", 0.1),
        schedule=Schedule(sched.get("kind", "constant"), sched.get("gamma", 1.0),
                          sched.get("step_size", 1), sched.get("horizon", 1)),
        strategy=training.get("strategy", "batch"),
        batch_size=training.get("batch_size"),
        delta=training.get("delta", 1e-8),
        max_iters=training.get("max_iters", 10_000),
        seed=seed,
    )


def _gd_glm(kind, design, target, theta0, training, penalty, seed):
    cfg = _gd_config(training, seed)
    source = make_gradient_strategy(cfg.strategy, design, target, kind, cfg.seed, cfg.batch_size)
    weight = 0.5 if penalty.kind == "l2" else 1.0

    def objective(theta):
        return glm.loss(kind, theta, design, target) + weight * penalty.value(theta)

    theta, trace = gd_minimize(objective, source, theta0, cfg,
                               step_fn=lambda t, g, eta: penalized_step(t, g, eta, penalty))
    return theta, trace


def _n_classes(d):
    return int(d.y_class.max()) + 1


def fit_model(cfg, d, seed):
    """Train per config; returns the model document and the GD trace (or None)."""
    model_cfg = cfg["model"]
    kind = model_cfg["kind"]
    training = cfg.get("training", {})
    pen_cfg = cfg.get("penalty", {})
    penalty = PenaltySpec(pen_cfg.get("kind", "none"), pen_cfg.get("lambda", 0.0))
    default_method = "closed-form" if kind in ("linear", "lbfm", "kernel-ridge") else "gd"
    method = training.get("method", default_method)
    doc = {
        "kind": kind,
        "label": d.label_name,
        "label_kind": d.label_kind,
        "feature_names": list(d.feature_names),
        "method": method,
    }
    trace = None
    classification = kind in ("logistic", "softmax") or (kind == "mlp" and d.label_kind == "class")
    if classification and d.label_kind != "class":
        raise SchemaError(f"model {kind!r} needs class labels (label_kind 'class')")
    if not classification and d.label_kind != "real":
        raise SchemaError(f"model {kind!r} needs real labels (label_kind 'real')")

    if kind in ("linear", "lbfm"):
        if kind == "lbfm":
            bcfg = model_cfg.get("basis", {})
            spec = basis.init_basis_params(bcfg.get("kind", "polynomial"), d.x, bcfg.get("count", 3),
                                           bcfg.get("strategy", "grid"), Rng(seed), bcfg.get("width"))
            design = basis.expand(spec, d.x)
            doc["basis"] = spec.to_dict()
        else:
            design = add_bias(d.x)
        if method == "closed-form":
            if penalty.kind == "l1":
                theta = regpath.lasso_cd(design, d.y_real, penalty.lam).theta
            elif penalty.kind == "l2" and penalty.lam > 0:
                theta = glm.fit_ridge_closed(design, d.y_real, penalty.lam)
            else:
                theta = glm.fit_ols(design, d.y_real)
        else:
            theta, trace = _gd_glm("linear", design, d.y_real, np.zeros(design.shape[1]),
                                   training, penalty, seed)
        doc["theta"] = theta
    elif kind in ("logistic", "softmax"):
        k = _n_classes(d)
        if kind == "logistic" and k != 2:
            raise SchemaError(f"logistic regression needs 2 classes, found {k}")
        design = add_bias(d.x)
        if method == "closed-form":
            _, theta = glm.fit_gaussian_generative(d.x, d.y_class, k)
            if kind == "softmax" and theta.ndim == 1:
                theta = np.column_stack([np.zeros_like(theta), theta])
        elif kind == "logistic":
            theta, trace = _gd_glm("logistic", design, d.y_class.astype(np.float64),
                                   np.zeros(design.shape[1]), training, penalty, seed)
        else:
            theta, trace = _gd_glm("softmax", design, one_hot_encode(d.y_class, k),
                                   np.zeros((design.shape[1], k)), training, penalty, seed)
        doc["theta"] = theta
    elif kind == "kernel-ridge":
        kcfg = dict(model_cfg.get("kernel", {"kind": "rbf"}))
        spec = kernel.KernelSpec.from_dict(kcfg)
        lam = penalty.lam if penalty.kind in ("l2", "none") else 0.0
        alpha, g = kernel.kernel_ridge_fit(spec, d.x, d.y_real, lam)
        doc.update(kernel=spec.to_dict(), dual_coef=alpha, x_train=d.x, jitter=g.jitter, **{"lambda": lam})
    else:
        ncfg = model_cfg.get("net", {})
        if d.label_kind == "class":
            k = _n_classes(d)
            output = "logistic" if k == 2 else "softmax"
            target = d.y_class.astype(np.float64) if k == 2 else one_hot_encode(d.y_class, k)
            n_out = 1 if k == 2 else k
        else:
            output, target, n_out = "linear", d.y_real, 1
        sizes = [d.n_features] + list(ncfg.get("hidden", [20])) + [n_out]
        net = nn.init_mlp(sizes, ncfg.get("activation", "tanh"), output, Rng(seed),
                          ncfg.get("init_scale", 0.5))
        net, trace = nn.train_mlp(net, d.x, target, _gd_config(training, seed))
        doc["net"] = net.to_dict()
    return doc, trace


def predict_from_model(doc, x):
    """Real predictions (regression) or class-probability matrix (classification)."""
    kind = doc["kind"]
    x = np.asarray(x, dtype=np.float64)
    if kind == "linear":
        return add_bias(x) @ np.asarray(doc["theta"])
    if kind == "lbfm":
        return basis.expand(basis.BasisSpec.from_dict(doc["basis"]), x) @ np.asarray(doc["theta"])
    if kind == "logistic":
        p = glm.predict_logistic(np.asarray(doc["theta"]), add_bias(x))
        return np.column_stack([1.0 - p, p])
    if kind == "softmax":
        return glm.predict_softmax(np.asarray(doc["theta"]), add_bias(x))
    if kind == "kernel-ridge":
        spec = kernel.KernelSpec.from_dict(doc["kernel"])
        return kernel.kernel_matrix(spec, x, np.asarray(doc["x_train"])) @ np.asarray(doc["dual_coef"])
    net = nn.MlpNet.from_dict(doc["net"])
    out = nn.forward(net, x)[0]
    if net.output_kind == "linear":
        return out[:, 0]
    if net.output_kind == "logistic":
        return np.column_stack([1.0 - out[:, 0], out[:, 0]])
    return out


def evaluate(doc, d):
    """All applicable error metrics; ``loss`` is MSE or cross-entropy."""
    out = predict_from_model(doc, d.x)
    if d.label_kind == "real":
        report = metrics.regression_metrics(out, d.y_real).as_dict()
        report["loss"] = report["mse"]
        return report
    k = out.shape[1]
    if d.y_class.max() >= k:
        raise SchemaError(f"labels reach class {int(d.y_class.max())} but the model has {k} classes")
    pred = glm.argmax_class(out)
    report = metrics.classification_metrics(pred, d.y_class, positive=1).as_dict()
    report["cross_entropy"] = metrics.cross_entropy(out, one_hot_encode(d.y_class, k))
    report["loss"] = report["cross_entropy"]
    if k == 2 and 0 < d.y_class.sum() < d.y_class.size:
        report["auc"] = metrics.auc(out[:, 1], d.y_class)
    return report


def _coefficient_table(doc):
    if "theta" not in doc:
        return []
    theta = np.asarray(doc["theta"])
    if doc["kind"] == "lbfm":
        names = ["phi0"] + [f"phi{i}" for i in range(1, theta.shape[0])]
    else:
        names = ["bias"] + list(doc["feature_names"])
    if theta.ndim == 1:
        return [{"name": n, "value": v} for n, v in zip(names, theta)]
    return [{"name": n, "class": k, "value": theta[i, k]}
            for i, n in enumerate(names) for k in range(theta.shape[1])]


# -- subcommands -----------------------------------------------------------

def _out_dir(args, cfg):
    directory = args.out or cfg.get("output", {}).get("directory") or "."
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_synth(args):
    seed = resolve_seed({"seed": args.seed})
    d = synthesize(args.kind, seed, args.m, args.noise)
    save_csv(d, args.out)
    print(f"wrote {d.n_samples} rows to {args.out}")


def _config_from_args(args):
    if args.config:
        try:
            cfg = serialize.load(args.config)
        except ValueError as exc:
            raise SchemaError(f"{args.config}: invalid JSON ({exc})") from None
    else:
        cfg = {}
    cfg = copy.deepcopy(cfg)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if getattr(args, "data", None):
        cfg["data"] = {"path": args.data}
    if "data" in cfg and "path" in cfg["data"]:
        if getattr(args, "label", None):
            cfg["data"]["label"] = args.label
        if getattr(args, "label_kind", None):
            cfg["data"]["label_kind"] = args.label_kind
        if getattr(args, "one_based", False):
            cfg["data"]["one_based"] = True
    model = cfg.setdefault("model", {})
    if getattr(args, "model", None):
        model["kind"] = args.model
    if getattr(args, "degree", None) is not None:
        model["basis"] = {"kind": "polynomial", "count": args.degree}
    if getattr(args, "basis", None):
        model["basis"] = {"kind": args.basis, "count": args.n_basis, "strategy": args.strategy_init}
    if getattr(args, "kernel", None):
        model["kernel"] = {"kind": args.kernel}
        if args.sigma is not None:
            model["kernel"]["sigma"] = args.sigma
    if getattr(args, "hidden", None):
        model["net"] = {"hidden": [int(h) for h in args.hidden.split(",")],
                        "activation": args.activation}
    training = cfg.setdefault("training", {})
    if getattr(args, "closed_form", False):
        training["method"] = "closed-form"
    if getattr(args, "gd", False):
        training["method"] = "gd"
    for name, key in (("lr", "learning_rate"), ("iters", "max_iters"), ("strategy", "strategy"),
                      ("batch_size", "batch_size"), ("delta", "delta")):
        value = getattr(args, name, None)
        if value is not None:
            training[key] = value
    if not training:
        cfg.pop("training")
    if getattr(args, "penalty", None):
        cfg.setdefault("penalty", {})["kind"] = args.penalty
    if getattr(args, "lam", None) is not None:
        cfg.setdefault("penalty", {})["lambda"] = args.lam
    if not model:
        cfg.pop("model")
    return cfg


def cmd_fit(args):
    cfg = _config_from_args(args)
    if "data" not in cfg:
        raise UsageError("fit needs --data or a config with a data section")
    if "model" not in cfg:
        cfg["model"] = {"kind": "linear"}
    validate_config(cfg)
    seed = resolve_seed(cfg)
    d = load_data(cfg, seed)
    doc, trace = fit_model(cfg, d, seed)
    out = _out_dir(args, cfg)
    train = evaluate(doc, d)
    report = {
        "model": doc["kind"],
        "method": doc["method"],
        "n_samples": d.n_samples,
        "final_loss": train["loss"],
        "train_metrics": train,
        "iterations": len(trace) if trace is not None else 0,
        "final_objective": trace.final_loss if trace is not None else None,
        "converged": trace.converged if trace is not None else True,
        "coefficients": _coefficient_table(doc),
        "seed": seed,
    }
    serialize.dump(doc, out / "model.json")
    serialize.dump(report, out / "fit_report.json")
    if trace is not None:
        trace.to_csv(out / "trace.csv")
    for row in report["coefficients"]:
        label = row["name"] + (f"[{row['class']}]" if "class" in row else "")
        print(f"{label}\t{row['value']:.6g}")
    print(f"final_loss\t{report['final_loss']:.10g}")


def cmd_eval(args):
    doc = serialize.load(args.model)
    d = load_csv(args.data, args.label or doc.get("label", "y"),
                 args.label_kind or doc.get("label_kind", "real"), args.one_based)
    report = evaluate(doc, d)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    serialize.dump(report, out)
    print(f"loss\t{report['loss']:.10g}")


def _parse_range(text):
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def cmd_sweep(args):
    cfg = _config_from_args(args)
    if "data" not in cfg:
        raise UsageError("sweep needs --data or a config with a data section")
    cfg.setdefault("model", {"kind": "linear"})
    validate_config(cfg)
    seed = resolve_seed(cfg)
    d = load_data(cfg, seed)
    if d.label_kind != "real":
        raise SchemaError("sweep works on real-valued labels")
    out = _out_dir(args, cfg)
    cv_cfg = cfg.get("cv", {})
    kind = args.cv or cv_cfg.get("kind", "kfold")
    folds = args.folds or cv_cfg.get("folds", 5)
    plan = cv.split(d.n_samples, kind, Rng(seed), k=min(folds, d.n_samples), frac=cv_cfg.get("frac", 0.2))

    def mse(yhat, y):
        return metrics.regression_metrics(yhat, y).mse

    penalty = cfg.get("penalty", {}).get("kind", "none")
    if args.degrees:
        degrees = _parse_range(args.degrees)

        def factory(deg):
            spec = basis.BasisSpec("polynomial", n_features=d.n_features, degree=deg)
            lam = cfg.get("penalty", {}).get("lambda", 0.0)

            def fit(xt, yt):
                theta = basis.fit_lbfm_closed(spec, xt, yt, lam)
                return lambda xv: basis.expand(spec, xv) @ theta
            return fit

        best, table = cv.select_hyperparameter(d.x, d.y_real, degrees, plan, factory, mse, on_error="inf")
        cv.scores_to_csv(table, out / "cv_scores.csv")
        print(f"best_degree\t{best}")
        return
    if penalty not in ("l1", "l2"):
        raise UsageError("sweep needs --penalty l1|l2 or --degrees")
    grid = cfg.get("penalty", {}).get("grid")
    if grid is not None:
        grid = sorted(set(grid), reverse=True)
    points = regpath.regularization_path(d.x, d.y_real, penalty, lambdas=grid,
                                         standardize=not args.no_standardize)
    regpath.path_to_csv(points, out / "path.csv", d.feature_names)

    mean = d.x.mean(axis=0)
    std = d.x.std(axis=0)
    xs = d.x if args.no_standardize else (d.x - mean) / np.where(std > 0, std, 1.0)

    def factory(lam):
        def fit(xt, yt):
            design = add_bias(xt)
            if penalty == "l1":
                theta = regpath.lasso_cd(design, yt, lam).theta
            else:
                theta = glm.fit_ridge_closed(design, yt, lam, penalize_bias=False)
            return lambda xv: add_bias(xv) @ theta
        return fit

    lambdas = [p.lam for p in points]
    best, table = cv.select_hyperparameter(xs, d.y_real, lambdas, plan, factory, mse)
    cv.scores_to_csv(table, out / "cv_scores.csv")
    print(f"best_lambda\t{best:.10g}")


def cmd_gradcheck(args):
    seed = resolve_seed({"seed": args.seed or 0})
    report = gradcheck.run_all(args.draws, seed, args.tolerance)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    serialize.dump(report, out)
    for name, err in report["max_relative_error"].items():
        print(f"{name}\t{err:.3e}\t{'PASS' if report['passed'][name] else 'FAIL'}")
    if not report["all_passed"]:
        return 1
    return 0


def cmd_version(args):
    print(f"regresslab {__version__}")


def build_parser():
    parser = argparse.ArgumentParser(prog="regresslab", description="Regression analysis toolkit.")
    sub = parser.add_subparsers(dest="command", metavar="{synth,fit,eval,sweep,gradcheck,version}")
    sub.required = True

    p = sub.add_parser("synth", help="write a generated dataset CSV")
    p.add_argument("--kind", choices=GENERATORS, required=True)
    p.add_argument("--m", type=int, help="rows (per class for two-gaussians)")
    p.add_argument("--noise", type=float, help="noise standard deviation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    def common(p):
        p.add_argument("--config", help="JSON run config")
        p.add_argument("--data", help="CSV file")
        p.add_argument("--label", help="label column name")
        p.add_argument("--label-kind", choices=["real", "class"])
        p.add_argument("--one-based", action="store_true", help="class labels start at 1")
        p.add_argument("--seed", type=int)
        p.add_argument("--penalty", choices=["none", "l1", "l2"])
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("fit", help="train a model")
    common(p)
    p.add_argument("--model", choices=MODEL_KINDS)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--closed-form", action="store_true")
    mode.add_argument("--gd", action="store_true")
    p.add_argument("--lr", type=float)
    p.add_argument("--iters", type=int)
    p.add_argument("--strategy", choices=["batch", "stochastic", "minibatch"])
    p.add_argument("--batch-size", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--degree", type=int, help="polynomial basis degree (lbfm)")
    p.add_argument("--basis", choices=basis.BASIS_KINDS)
    p.add_argument("--n-basis", type=int, default=9)
    p.add_argument("--strategy-init", choices=["grid", "random", "kmeans"], default="grid")
    p.add_argument("--kernel", choices=kernel.KERNEL_KINDS)
    p.add_argument("--sigma", type=float)
    p.add_argument("--hidden", help="comma-separated hidden layer sizes (mlp)")
    p.add_argument("--activation", choices=nn.ACTIVATIONS, default="tanh")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="score a saved model on a dataset")
    p.add_argument("--model", required=True, help="model.json from fit")
    p.add_argument("--data", required=True)
    p.add_argument("--label")
    p.add_argument("--label-kind", choices=["real", "class"])
    p.add_argument("--one-based", action="store_true")
    p.add_argument("--out", default="metrics.json")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="lambda path or polynomial degree sweep with CV")
    common(p)
    p.add_argument("--degrees", help="degree range, e.g. 0-9 or 1,3,9")
    p.add_argument("--cv", choices=["holdout", "kfold", "loocv"])
    p.add_argument("--folds", type=int)
    p.add_argument("--no-standardize", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gradcheck", help="finite-difference gradient checks")
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--tolerance", type=float, default=gradcheck.DEFAULT_TOLERANCE)
    p.add_argument("--out", default="gradcheck.json")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("version", help="print the version")
    p.set_defaults(func=cmd_version)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status = args.func(args)
    except NumericalError as exc:
        print(f"regresslab: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ValueError, OSError, KeyError, TypeError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"regresslab: error: {msg}", file=sys.stderr)
        return 2
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
