"""Linear readout: ridge regression on collected states, prediction, RMSE."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, EmptyInput, NonFiniteInput, SingularSystem


@dataclass
class RidgeConfig:
    lam: float = 1e-4      # L2 penalty on the state weights
    intercept: bool = False

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")


@dataclass
class ReadoutWeights:
    w: np.ndarray          # (features,) or (features + 1,) with intercept last
    features: int
    intercept: bool


def fit(states: np.ndarray, targets: np.ndarray, cfg: RidgeConfig = RidgeConfig()) -> ReadoutWeights:
    """Solve min_w ||X w - y||^2 + lam ||w||^2 via the normal equations.

    The SPD system (X^T X + lam I) w = X^T y is solved by Cholesky. With an
    intercept, an all-ones column is appended and excluded from the penalty.
    """
    x = np.ascontiguousarray(states, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"states {x.shape} vs targets {y.shape}")
    if x.shape[0] < 1 or x.shape[1] < 1:
        raise EmptyInput("need at least one row and one column")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise NonFiniteInput("states/targets must be finite")

    features = x.shape[1]
    if cfg.intercept:
        x = np.hstack([x, np.ones((x.shape[0], 1))])
    gram = x.T @ x
    diag = np.full(x.shape[1], cfg.lam)
    if cfg.intercept:
        diag[-1] = 0.0  # intercept column is unpenalized
    gram[np.diag_indices_from(gram)] += diag
    rhs = x.T @ y
    try:
        cho = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
        w = scipy.linalg.cho_solve(cho, rhs, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    return ReadoutWeights(w=w, features=features, intercept=cfg.intercept)


def predict(states: np.ndarray, weights: ReadoutWeights) -> np.ndarray:
    """Apply the trained linear readout row-wise."""
    x = np.asarray(states, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != weights.features:
        raise DimensionMismatch(f"states {x.shape} vs readout with {weights.features} features")
    if weights.intercept:
        return x @ weights.w[:-1] + weights.w[-1]
    return x @ weights.w


def rmse(predicted: np.ndarray, actual: np.ndarray) -> float:
    """Root mean square error sqrt(mean((yhat - y)^2))."""
    yhat = np.asarray(predicted, dtype=np.float64)
    y = np.asarray(actual, dtype=np.float64)
    if yhat.shape != y.shape or yhat.ndim != 1:
        raise DimensionMismatch(f"{yhat.shape} vs {y.shape}")
    if yhat.size == 0:
        raise EmptyInput("rmse of empty vectors")
    return float(np.sqrt(np.mean((yhat - y) ** 2)))
