"""Input sequences, trajectory simulation, and twin-trajectory experiments.

Time indexing convention used throughout: a trajectory of horizon T holds
states x_1..x_T with

    x_t = theta(W x_{t-1} + w_in u_t),

the initial state x0 lives in the metadata, and the generated input sample
u_0 is aligned with x0 (it is never consumed by a transition).  This keeps
state and input phases locked: on the alternating-input attractor of the
single-neuron family below, x_t and u_t carry the same sign at every t.

Distances in convergence traces use the Euclidean norm.  Once twin states
collide (distance below 1e-300, or bitwise equality), the trace is floored
to exactly zero from that step on and the index is recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .reservoir import Reservoir
from .transfer import SINE_SIGMOID, TANH

__all__ = [
    "Alternating",
    "IidSign",
    "Constant",
    "FileInput",
    "InputSequence",
    "Trajectory",
    "ConvergenceTrace",
    "generate_input",
    "step",
    "run",
    "run_with_inputs",
    "convergence_trace",
    "perturbation_experiment",
    "make_alternating_neuron",
    "alternating_orbit",
    "make_overtuned_neuron",
    "write_trace_csv",
    "write_states_csv",
]

ZERO_FLOOR = 1e-300


@dataclass(frozen=True)
class Alternating:
    """u_t = (-1)^t * amplitude, with u_0 = +amplitude."""

    amplitude: float


@dataclass(frozen=True)
class IidSign:
    """u_t = +/- amplitude, i.i.d. fair signs from the seeded generator."""

    amplitude: float
    seed: int


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class FileInput:
    """Inputs read from a CSV file, one time step per row."""

    path: str


InputSequence = Union[Alternating, IidSign, Constant, FileInput]


def generate_input(spec: InputSequence, T: int, n: int = 1) -> np.ndarray:
    """Materialize the first T input vectors as a (T, n) array.

    Deterministic given the spec (seeds included).  Scalar kinds are
    broadcast across the n input coordinates.
    """
    if T < 1:
        raise ValueError("need T >= 1")
    if isinstance(spec, Alternating):
        signs = np.where(np.arange(T) % 2 == 0, 1.0, -1.0)
        col = signs * spec.amplitude
        return np.tile(col[:, None], (1, n))
    if isinstance(spec, IidSign):
        rng = np.random.default_rng(spec.seed)
        signs = rng.integers(0, 2, size=(T, n)) * 2.0 - 1.0
        return signs * spec.amplitude
    if isinstance(spec, Constant):
        return np.full((T, n), float(spec.value))
    if isinstance(spec, FileInput):
        try:
            data = np.loadtxt(spec.path, delimiter=",", ndmin=2)
        except OSError as exc:
            raise IOError(f"cannot read input file {spec.path!r}: {exc}") from exc
        except ValueError as exc:
            raise IOError(f"ill-formed input file {spec.path!r}: {exc}") from exc
        if data.shape[0] < T:
            raise IOError(f"input file {spec.path!r} has {data.shape[0]} rows, need {T}")
        if data.shape[1] != n:
            raise IOError(f"input file {spec.path!r} has {data.shape[1]} columns, need {n}")
        return data[:T]
    raise TypeError(f"unknown input spec {spec!r}")


@dataclass(frozen=True)
class Trajectory:
    """States x_1..x_T (T x k) and the linear states that produced them.

    states[i] == theta(linear_states[i]) elementwise, for every row.
    """

    states: np.ndarray
    linear_states: np.ndarray
    input_used: object
    x0: np.ndarray


@dataclass(frozen=True)
class ConvergenceTrace:
    """Twin-trajectory distances q_t for t = 0..T-1 (q_0 from the initial pair)."""

    q: np.ndarray
    meta: dict = field(default_factory=dict)
    floor_hit_at: Optional[int] = None


def _as_state(res: Reservoir, x) -> np.ndarray:
    if x is None:
        return np.zeros(res.k)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (res.k,):
        raise ValueError(f"state must have shape ({res.k},)")
    return x


def step(res: Reservoir, x, u):
    """One update: returns (x_next, x_lin_next) with x_lin = W x + w_in u."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if x.shape != (res.k,):
        raise ValueError(f"state must have shape ({res.k},)")
    if u.shape != (res.n,):
        raise ValueError(f"input must have shape ({res.n},)")
    x_lin = res.W @ x + res.w_in @ u
    return res.tf(x_lin), x_lin


def run_with_inputs(res: Reservoir, inputs: np.ndarray, x0=None, input_used=None) -> Trajectory:
    """Drive the reservoir with explicit input rows; inputs[i] produces states[i]."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if inputs.shape[1] != res.n:
        raise ValueError(f"inputs must have {res.n} columns")
    x = _as_state(res, x0)
    T = inputs.shape[0]
    states = np.empty((T, res.k))
    linear = np.empty((T, res.k))
    W, w_in, tf = res.W, res.w_in, res.tf
    for t in range(T):
        xl = W @ x + w_in @ inputs[t]
        x = tf(xl)
        linear[t] = xl
        states[t] = x
    return Trajectory(states=states, linear_states=linear, input_used=input_used, x0=_as_state(res, x0))


def run(res: Reservoir, input_spec: InputSequence, x0, T: int) -> Trajectory:
    """Simulate T transitions from x0; exactly reproducible from its arguments.

    The spec must yield T+1 samples (u_0 is aligned with x0 and skipped),
    so file-backed inputs need at least T+1 rows.
    """
    if T < 1:
        raise ValueError("need T >= 1")
    u = generate_input(input_spec, T + 1, res.n)
    return run_with_inputs(res, u[1:], x0, input_used=input_spec)


def _twin_trace_scalar(res, u_x, u_y, x0, y0, shared_from, meta) -> ConvergenceTrace:
    # k == n == 1 fast path: plain floats, math-module transfer.
    f = res.tf.scalar_fn()
    w = float(res.W[0, 0])
    win = float(res.w_in[0, 0])
    ux = u_x[:, 0].tolist()
    uy = u_y[:, 0].tolist()
    T = len(ux)
    q = np.zeros(T)
    x = float(x0[0])
    y = float(y0[0])
    d = abs(x - y)
    q[0] = d if d > ZERO_FLOOR else 0.0
    floor_at = None
    seen_positive = q[0] > 0.0
    collapsed = q[0] == 0.0 and shared_from <= 1
    for t in range(1, T):
        x = f(w * x + win * ux[t])
        if collapsed:
            y = x
        else:
            y = f(w * y + win * uy[t])
        d = abs(x - y)
        if d <= ZERO_FLOOR:
            d = 0.0
            if t >= shared_from:
                y = x
                collapsed = True
            if seen_positive and floor_at is None:
                floor_at = t
        else:
            seen_positive = True
        q[t] = d
    return ConvergenceTrace(q=q, meta=meta, floor_hit_at=floor_at)


def _twin_trace(res, u_x, u_y, x0, y0, shared_from, meta) -> ConvergenceTrace:
    # shared_from: first step index from which both copies see identical
    # inputs; collapsing y onto x is only sound at or after it.
    if res.k == 1 and res.n == 1:
        return _twin_trace_scalar(res, u_x, u_y, x0, y0, shared_from, meta)
    tf, W, w_in = res.tf, res.W, res.w_in
    T = u_x.shape[0]
    q = np.zeros(T)
    x = x0.copy()
    y = y0.copy()
    d = float(np.linalg.norm(x - y))
    q[0] = d if d > ZERO_FLOOR else 0.0
    floor_at = None
    seen_positive = q[0] > 0.0
    collapsed = q[0] == 0.0 and shared_from <= 1
    for t in range(1, T):
        x = tf(W @ x + w_in @ u_x[t])
        if collapsed:
            y = x
        else:
            y = tf(W @ y + w_in @ u_y[t])
        d = float(np.linalg.norm(x - y))
        if d <= ZERO_FLOOR:
            d = 0.0
            if t >= shared_from:
                y = x.copy()
                collapsed = True
            if seen_positive and floor_at is None:
                floor_at = t
        else:
            seen_positive = True
        q[t] = d
    return ConvergenceTrace(q=q, meta=meta, floor_hit_at=floor_at)


def convergence_trace(res: Reservoir, input_spec: InputSequence, x0, y0, T: int) -> ConvergenceTrace:
    """Distances between twin trajectories driven by one input realization."""
    if T < 1:
        raise ValueError("need T >= 1")
    x0 = _as_state(res, x0)
    y0 = _as_state(res, y0)
    u = generate_input(input_spec, T, res.n)
    meta = {
        "kind": "convergence",
        "input": repr(input_spec),
        "x0": x0.tolist(),
        "y0": y0.tolist(),
        "k": res.k,
    }
    return _twin_trace(res, u, u, x0, y0, 0, meta)


def perturbation_experiment(
    res: Reservoir,
    base_input: InputSequence,
    perturb_at: int,
    delta_u,
    T: int,
    x0=None,
) -> ConvergenceTrace:
    """Twin copies from identical x0; one receives u + delta_u at one step.

    The trace is the distance history after the copies re-join on the shared
    input.  perturb_at indexes the input sample u_t; sample 0 is aligned
    with the initial state and never consumed, so perturb_at = 0 leaves both
    copies identical.
    """
    if not (0 <= perturb_at < T):
        raise ValueError("need 0 <= perturb_at < T")
    x0 = _as_state(res, x0)
    u = generate_input(base_input, T, res.n)
    delta = np.atleast_1d(np.asarray(delta_u, dtype=float))
    if delta.shape != (res.n,):
        raise ValueError(f"delta_u must have shape ({res.n},)")
    u_pert = u.copy()
    u_pert[perturb_at] += delta
    meta = {
        "kind": "perturbation",
        "input": repr(base_input),
        "perturb_at": perturb_at,
        "delta_u": delta.tolist(),
        "x0": x0.tolist(),
        "k": res.k,
    }
    return _twin_trace(res, u, u_pert, x0, x0.copy(), perturb_at + 1, meta)


# -- named single-neuron families ------------------------------------------

def make_alternating_neuron(b: float) -> Reservoir:
    """One-neuron sine-sigmoid net x_{t+1} = theta(-b x_t + (2-b) u_t).

    Under u_t = (-1)^t * a it has the period-2 attractor x_t = (-1)^t * a
    for every b (the -b and 2-b couplings sum the state and input
    contributions to 2a at the linear stage).  With a = pi/4 the attractor
    sits exactly on unit-slope points of the transfer, and b = 1 is the
    critical coupling.  The (2-b) input weight is part of the family
    definition.
    """
    return Reservoir(W=[[-b]], w_in=[[2.0 - b]], tf=SINE_SIGMOID)


def alternating_orbit(amplitude: float = math.pi / 4) -> np.ndarray:
    """The known period-2 attractor states [x at even t, x at odd t]."""
    return np.array([[amplitude], [-amplitude]])


def make_overtuned_neuron(b: float) -> Reservoir:
    """One-neuron tanh net x_{t+1} = tanh(-b x_t + u_t) (unit input coupling)."""
    return Reservoir(W=[[-b]], w_in=[[1.0]], tf=TANH)


# -- CSV export --------------------------------------------------------------

def write_trace_csv(path, trace: ConvergenceTrace) -> None:
    """Columns t,q with full-precision floats; deterministic byte-for-byte."""
    with open(path, "w", newline="") as fh:
        fh.write("t,q\n")
        for t, v in enumerate(trace.q):
            fh.write(f"{t},{v:.17g}\n")


def write_states_csv(path, traj: Trajectory) -> None:
    k = traj.states.shape[1]
    with open(path, "w", newline="") as fh:
        fh.write("t," + ",".join(f"x{i}" for i in range(k)) + "\n")
        for t, row in enumerate(traj.states, start=1):
            fh.write(f"{t}," + ",".join(f"{v:.17g}" for v in row) + "\n")
