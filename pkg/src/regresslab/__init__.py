"""regresslab: regression models from least squares to backpropagation.

Functional building blocks live in the submodules (``linalg``, ``dataset``,
``metrics``, ``glm``, ``basis``, ``kernel``, ``optim``, ``regpath``,
``nn``, ``cv``); scikit-learn compatible estimators are re-exported here.
"""

from .basis import BasisExpansion, BasisFunctionRegressor
from .dataset import Dataset, fixture_rental, gen_sine, gen_two_gaussians, load_csv, save_csv
from .kernel import KernelRidge
from .linear_model import (
    GaussianGenerativeClassifier,
    Lasso,
    LinearRegression,
    LogisticRegression,
    SoftmaxRegression,
)
from .nn import MLPClassifier, MLPRegressor
from .rng import Rng

__version__ = "0.1.0"

__all__ = [
    "BasisExpansion",
    "BasisFunctionRegressor",
    "Dataset",
    "GaussianGenerativeClassifier",
    "KernelRidge",
    "Lasso",
    "LinearRegression",
    "LogisticRegression",
    "MLPClassifier",
    "MLPRegressor",
    "Rng",
    "SoftmaxRegression",
    "fixture_rental",
    "gen_sine",
    "gen_two_gaussians",
    "load_csv",
    "save_csv",
]
