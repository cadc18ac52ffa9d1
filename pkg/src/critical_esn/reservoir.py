"""Reservoir construction and spectral analysis of the recurrent weights.

The interesting regime is the spectral boundary: a normal matrix whose
largest singular value and largest absolute eigenvalue are both exactly 1.
Orthogonal matrices realize that boundary without any numerical tuning, so
they are the constructive choice here.

Two classic spectral checks are exposed through :func:`check_esc`:

* C1 (necessary):   max |eigenvalue| < 1
* C2 (sufficient):  max singular value < 1

plus a flag for sitting on the boundary itself, and whether the
boundary case is covered by the contraction argument for the given
transfer function (tanh and the sine sigmoid are; the identity is not).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .transfer import TransferFunction

__all__ = [
    "Reservoir",
    "SpectralSummary",
    "EscVerdict",
    "make_orthogonal_reservoir",
    "scale_to_spectrum",
    "spectral_summary",
    "check_esc",
    "save_matrix_csv",
    "load_matrix_csv",
]


@dataclass(frozen=True)
class Reservoir:
    """Fixed recurrent weights W (k x k), input weights w_in (k x n), transfer."""

    W: np.ndarray
    w_in: np.ndarray
    tf: TransferFunction

    def __post_init__(self):
        W = np.atleast_2d(np.asarray(self.W, dtype=float))
        w_in = np.atleast_2d(np.asarray(self.w_in, dtype=float))
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("W must be square")
        if w_in.shape[0] != W.shape[0]:
            raise ValueError("w_in must have k rows")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(w_in))):
            raise ValueError("weights must be finite")
        W.setflags(write=False)
        w_in.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "w_in", w_in)

    @property
    def k(self) -> int:
        return self.W.shape[0]

    @property
    def n(self) -> int:
        return self.w_in.shape[1]


@dataclass(frozen=True)
class SpectralSummary:
    max_abs_eigenvalue: float
    max_singular_value: float
    is_normal: bool
    singular_values: tuple  # descending


@dataclass(frozen=True)
class EscVerdict:
    c1_necessary: bool
    c2_sufficient: bool
    critical_boundary: bool
    covered_by_theorem: bool


def make_orthogonal_reservoir(k: int, n: int, input_scale: float, seed: int) -> Reservoir:
    """Reservoir with an orthogonal (hence normal, boundary-spectrum) W.

    W comes from the QR factorization of a seeded Gaussian matrix with the
    usual sign fix on diag(R); every singular value and |eigenvalue| is
    exactly 1.  w_in entries are i.i.d. uniform on [-input_scale, input_scale].
    Deterministic in the seed.  Transfer defaults to tanh; swap via
    dataclasses.replace for other kinds.
    """
    if k <= 0 or n <= 0:
        raise ValueError("need k >= 1 and n >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((k, k))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    w_in = rng.uniform(-input_scale, input_scale, size=(k, n))
    from .transfer import TANH

    return Reservoir(W=q, w_in=w_in, tf=TANH)


def scale_to_spectrum(W: np.ndarray, target: float, mode: str = "singular") -> np.ndarray:
    """Uniformly rescale W so its max singular value (or max |eig|) hits target."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if W.shape[0] != W.shape[1]:
        raise ValueError("W must be square")
    if target <= 0:
        raise ValueError("target must be positive")
    if mode == "singular":
        current = float(np.linalg.svd(W, compute_uv=False)[0])
    elif mode == "eigen":
        current = float(np.max(np.abs(np.linalg.eigvals(W))))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if current == 0.0:
        raise ValueError("zero spectrum cannot be rescaled to a positive target")
    return W * (target / current)


def spectral_summary(W: np.ndarray) -> SpectralSummary:
    """Eigen/singular spectrum plus a normality test (W W^T == W^T W)."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError("W must be square")
    if not np.all(np.isfinite(W)):
        raise ValueError("W must be finite")
    svals = np.linalg.svd(W, compute_uv=False)
    eigs = np.linalg.eigvals(W)
    wmax = float(np.max(np.abs(W))) if W.size else 0.0
    commutator = W @ W.T - W.T @ W
    residual = float(np.max(np.abs(commutator))) if W.size else 0.0
    is_normal = residual <= 1e-9 * (1.0 + wmax * wmax)
    return SpectralSummary(
        max_abs_eigenvalue=float(np.max(np.abs(eigs))),
        max_singular_value=float(svals[0]),
        is_normal=bool(is_normal),
        singular_values=tuple(float(s) for s in svals),
    )


def check_esc(reservoir: Reservoir, tol: float = 1e-9) -> EscVerdict:
    """Spectral echo-state verdict for a reservoir.

    Strict inequalities are certified with a tol margin (inside 1 - tol);
    within tol of the boundary the matrix counts as critical instead, so
    critical_boundary and c2_sufficient are mutually exclusive by
    construction.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = spectral_summary(reservoir.W)
    critical = (
        abs(s.max_singular_value - 1.0) <= tol
        and abs(s.max_abs_eigenvalue - 1.0) <= tol
    )
    c1 = s.max_abs_eigenvalue < 1.0 - tol
    c2 = s.max_singular_value < 1.0 - tol
    covered = critical and reservoir.tf.kind in ("tanh", "sine_sigmoid")
    return EscVerdict(
        c1_necessary=bool(c1),
        c2_sufficient=bool(c2),
        critical_boundary=bool(critical),
        covered_by_theorem=bool(covered),
    )


def save_matrix_csv(path, W: np.ndarray) -> None:
    """Row-major CSV with a '# rows,cols' comment header."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    with open(path, "w", newline="") as fh:
        fh.write(f"# {W.shape[0]},{W.shape[1]}\n")
        for row in W:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_matrix_csv(path) -> np.ndarray:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"empty matrix file: {path}")
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = [[float(v) for v in ln.split(",")] for ln in body]
    out = np.asarray(rows, dtype=float)
    header = [ln for ln in lines if ln.startswith("#")]
    if header:
        try:
            r, c = (int(v) for v in header[0].lstrip("#").split(","))
        except ValueError as exc:
            raise ValueError(f"bad matrix header {header[0]!r}") from exc
        if out.shape != (r, c):
            raise ValueError(f"matrix body {out.shape} does not match header ({r},{c})")
    return out
