"""Linear readout training and the delay-reconstruction memory benchmark."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import run_with_inputs
from .reservoir import Reservoir

__all__ = [
    "ReadoutModel",
    "McResult",
    "fit_readout",
    "predict",
    "memory_capacity",
    "write_mc_csv",
]


@dataclass(frozen=True)
class ReadoutModel:
    w_out: np.ndarray  # (m, k)
    ridge: float
    training_error: float  # RMS over all output entries on the training set


def fit_readout(states: np.ndarray, targets: np.ndarray, ridge: float = 0.0) -> ReadoutModel:
    """Solve the (optionally ridge-regularized) normal equations.

    states is (T, k), targets is (T,) or (T, m).  With ridge = 0 this is
    plain linear regression and requires a well-conditioned state matrix;
    a singular one raises with advice to use ridge > 0.
    """
    X = np.atleast_2d(np.asarray(states, dtype=float))
    Y = np.asarray(targets, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] != Y.shape[0]:
        raise ValueError("states and targets must have the same number of rows")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    k = X.shape[1]
    G = X.T @ X
    if ridge > 0:
        G = G + ridge * np.eye(k)
    elif np.linalg.matrix_rank(G) < k:
        raise np.linalg.LinAlgError(
            "normal matrix is singular; refit with ridge > 0"
        )
    coef = np.linalg.solve(G, X.T @ Y)  # (k, m)
    resid = X @ coef - Y
    training_error = float(np.sqrt(np.mean(resid**2)))
    return ReadoutModel(w_out=coef.T, ridge=float(ridge), training_error=training_error)


def predict(model: ReadoutModel, states: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(states, dtype=float))
    if X.shape[1] != model.w_out.shape[1]:
        raise ValueError(
            f"states have {X.shape[1]} columns, readout expects {model.w_out.shape[1]}"
        )
    return X @ model.w_out.T


@dataclass(frozen=True)
class McResult:
    mc_total: float
    per_delay: tuple  # ((delay, score), ...)


def _squared_correlation(a: np.ndarray, b: np.ndarray) -> float:
    a = a - np.mean(a)
    b = b - np.mean(b)
    va = float(np.dot(a, a))
    vb = float(np.dot(b, b))
    if va <= 0.0 or vb <= 0.0:
        return 0.0
    c = float(np.dot(a, b))
    return (c * c) / (va * vb)


def memory_capacity(
    res: Reservoir,
    input_amplitude: float,
    max_delay: int,
    T: int,
    washout: int = 200,
    ridge: float = 1e-8,
    seed: int = 0,
) -> McResult:
    """Sum over delays of held-out squared correlation for delay reconstruction.

    Drives the reservoir with i.i.d. uniform input on [-amplitude, amplitude]
    (seeded), trains one readout per delay d = 1..max_delay to reconstruct
    u_{t-d}, and scores each on the chronologically later half of the run.
    The total is bounded by the number of neurons.
    """
    if max_delay < 1:
        raise ValueError("need max_delay >= 1")
    t_start = max(washout, max_delay)
    n_rows = T - t_start
    if n_rows < 2 * (res.k + 10):
        raise ValueError(
            f"T too small: {T} leaves {n_rows} usable rows after washout/delay; "
            f"need at least {2 * (res.k + 10)}"
        )
    rng = np.random.default_rng(seed)
    u = rng.uniform(-input_amplitude, input_amplitude, size=(T, res.n))
    traj = run_with_inputs(res, u, x0=None)
    rows = np.arange(t_start, T)
    X = traj.states[rows]
    split = rows.size // 2
    X_train, X_test = X[:split], X[split:]
    drive = u[:, 0]
    scores = []
    for d in range(1, max_delay + 1):
        target = drive[rows - d]
        model = fit_readout(X_train, target[:split], ridge=ridge)
        pred = predict(model, X_test)[:, 0]
        scores.append((d, _squared_correlation(pred, target[split:])))
    total = float(sum(s for _, s in scores))
    return McResult(mc_total=total, per_delay=tuple(scores))


def write_mc_csv(path, result: McResult) -> None:
    """Columns delay,score plus a final totals row."""
    with open(path, "w", newline="") as fh:
        fh.write("delay,score\n")
        for d, s in result.per_delay:
            fh.write(f"{d},{s:.17g}\n")
        fh.write(f"total,{result.mc_total:.17g}\n")
