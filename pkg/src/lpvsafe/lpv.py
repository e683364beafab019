"""Polytopic LPV plants, gain-scheduled state feedback and simulation.

The plant is

    x(t+1) = A(w(t)) x(t) + B u(t),    A(w) = sum_i w_i A_i,

with the scheduling vector w on the unit simplex, and the controller is
u = K(w) x with K(w) = sum_i w_i K_i.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError, ScheduleError

SIMPLEX_TOL = 1e-9


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SchedulingPoint:
    """Convex weights on the simplex.

    Inputs whose sum is within ``SIMPLEX_TOL`` of one are renormalized so
    rounded data (four printed digits, say) is accepted.
    """

    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float).reshape(-1)
        if w.size == 0:
            raise ScheduleError("scheduling vector is empty")
        if not np.all(np.isfinite(w)):
            raise ScheduleError("scheduling vector has non-finite entries")
        if w.min() < -SIMPLEX_TOL:
            raise ScheduleError(f"negative scheduling weight {w.min():g}")
        total = w.sum()
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ScheduleError(f"scheduling weights sum to {total!r}, not 1")
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        object.__setattr__(self, "w", _frozen(w))

    @property
    def s(self) -> int:
        return self.w.size

    def __eq__(self, other):
        return isinstance(other, SchedulingPoint) and np.array_equal(self.w, other.w)

    def __hash__(self):
        return hash(self.w.tobytes())


ScheduleLike = Union[SchedulingPoint, Sequence[float], np.ndarray]


def as_schedule(w: ScheduleLike) -> SchedulingPoint:
    return w if isinstance(w, SchedulingPoint) else SchedulingPoint(w)


@dataclass(frozen=True, eq=False)
class PolytopicLPV:
    """Vertex matrices ``A_1..A_s`` and a fixed input matrix ``B``."""

    vertices: tuple
    input_matrix: np.ndarray

    def __post_init__(self):
        verts = tuple(_frozen(np.atleast_2d(a)) for a in self.vertices)
        if not verts:
            raise DimensionError("an LPV system needs at least one vertex")
        n = verts[0].shape[0]
        for i, a in enumerate(verts):
            if a.shape != (n, n):
                raise DimensionError(f"vertex {i} has shape {a.shape}, expected {(n, n)}")
        b = np.array(self.input_matrix, dtype=float)
        if b.ndim == 1:
            b = b.reshape(n, -1) if b.size % n == 0 and b.size else b
        if b.ndim != 2 or b.shape[0] != n or b.shape[1] < 1:
            raise DimensionError(f"input matrix has shape {b.shape}, expected ({n}, m)")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "input_matrix", _frozen(b))

    @property
    def n(self) -> int:
        return self.input_matrix.shape[0]

    @property
    def m(self) -> int:
        return self.input_matrix.shape[1]

    @property
    def s(self) -> int:
        return len(self.vertices)

    @property
    def B(self) -> np.ndarray:
        return self.input_matrix

    @property
    def stacked(self) -> np.ndarray:
        """``[A_1, ..., A_s]``, shape ``(n, n*s)``."""
        return np.hstack(self.vertices)

    @classmethod
    def from_stacked(cls, a_stacked, b, s: int) -> "PolytopicLPV":
        a_stacked = np.asarray(a_stacked, dtype=float)
        n = a_stacked.shape[0]
        if a_stacked.shape[1] != n * s:
            raise DimensionError(f"stacked vertices have {a_stacked.shape[1]} columns, expected {n * s}")
        return cls(tuple(a_stacked[:, i * n:(i + 1) * n] for i in range(s)), b)

    def __eq__(self, other):
        return (
            isinstance(other, PolytopicLPV)
            and self.s == other.s
            and np.array_equal(self.input_matrix, other.input_matrix)
            and all(np.array_equal(a, b) for a, b in zip(self.vertices, other.vertices))
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GainSchedule:
    """Vertex gains ``K_1..K_s``, each ``m x n``."""

    gains: tuple

    def __post_init__(self):
        gains = tuple(_frozen(np.atleast_2d(k)) for k in self.gains)
        if not gains:
            raise DimensionError("a gain schedule needs at least one gain")
        shape = gains[0].shape
        for i, k in enumerate(gains):
            if k.shape != shape:
                raise DimensionError(f"gain {i} has shape {k.shape}, expected {shape}")
        object.__setattr__(self, "gains", gains)

    @property
    def s(self) -> int:
        return len(self.gains)

    @property
    def m(self) -> int:
        return self.gains[0].shape[0]

    @property
    def n(self) -> int:
        return self.gains[0].shape[1]

    @property
    def stacked(self) -> np.ndarray:
        """``[K_1, ..., K_s]``, shape ``(m, n*s)``."""
        return np.hstack(self.gains)

    @classmethod
    def from_stacked(cls, k_stacked, s: int, n: int | None = None) -> "GainSchedule":
        k_stacked = np.atleast_2d(np.asarray(k_stacked, dtype=float))
        if n is None:
            if k_stacked.shape[1] % s:
                raise DimensionError(f"{k_stacked.shape[1]} columns do not split into {s} blocks")
            n = k_stacked.shape[1] // s
        if k_stacked.shape[1] != n * s:
            raise DimensionError(f"stacked gains have {k_stacked.shape[1]} columns, expected {n * s}")
        return cls(tuple(k_stacked[:, i * n:(i + 1) * n] for i in range(s)))

    @classmethod
    def zeros(cls, m: int, n: int, s: int) -> "GainSchedule":
        return cls(tuple(np.zeros((m, n)) for _ in range(s)))

    def scaled(self, factor: float) -> "GainSchedule":
        return GainSchedule(tuple(factor * k for k in self.gains))

    def __eq__(self, other):
        return (
            isinstance(other, GainSchedule)
            and self.s == other.s
            and all(np.array_equal(a, b) for a, b in zip(self.gains, other.gains))
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled experiment; arrays are indexed by time along axis 0.

    ``states`` is ``(T+1, n)``, ``inputs`` is ``(T, m)`` and ``schedules``
    is ``(T, s)``.
    """

    states: np.ndarray
    inputs: np.ndarray
    schedules: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.states, dtype=float))
        u = np.array(self.inputs, dtype=float)
        w = np.array(self.schedules, dtype=float)
        u = u.reshape(len(u), -1) if u.size else u.reshape(0, 1)
        w = w.reshape(len(w), -1) if w.size else w.reshape(0, 1)
        if not (len(x) == len(u) + 1 == len(w) + 1):
            raise DimensionError(
                f"inconsistent trajectory lengths: {len(x)} states, {len(u)} inputs, {len(w)} schedules"
            )
        for t, row in enumerate(w):
            try:
                w[t] = SchedulingPoint(row).w
            except ScheduleError as exc:
                raise ScheduleError(f"schedule at t={t}: {exc}") from None
        object.__setattr__(self, "states", _frozen(x))
        object.__setattr__(self, "inputs", _frozen(u))
        object.__setattr__(self, "schedules", _frozen(w))

    @property
    def T(self) -> int:
        return len(self.inputs)

    def __len__(self):
        return self.T

    def __eq__(self, other):
        return (
            isinstance(other, Trajectory)
            and np.array_equal(self.states, other.states)
            and np.array_equal(self.inputs, other.inputs)
            and np.array_equal(self.schedules, other.schedules)
        )

    __hash__ = None


def _check_w(w: ScheduleLike, s: int) -> np.ndarray:
    wv = as_schedule(w).w
    if wv.size != s:
        raise DimensionError(f"scheduling vector has length {wv.size}, system has {s} vertices")
    return wv


def _vec(x, size: int, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size != size:
        raise DimensionError(f"{name} has length {v.size}, expected {size}")
    return v


def eval_A(sys: PolytopicLPV, w: ScheduleLike) -> np.ndarray:
    """State matrix at scheduling point ``w``."""
    wv = _check_w(w, sys.s)
    return np.einsum("i,ijk->jk", wv, np.stack(sys.vertices))


def eval_K(gains: GainSchedule, w: ScheduleLike) -> np.ndarray:
    """Feedback gain at scheduling point ``w``."""
    wv = _check_w(w, gains.s)
    return np.einsum("i,ijk->jk", wv, np.stack(gains.gains))


def step(sys: PolytopicLPV, x, u, w: ScheduleLike) -> np.ndarray:
    x = _vec(x, sys.n, "state")
    u = _vec(u, sys.m, "input")
    return eval_A(sys, w) @ x + sys.B @ u


def _check_gains(sys: PolytopicLPV, gains: GainSchedule) -> None:
    if gains.s != sys.s or gains.m != sys.m or gains.n != sys.n:
        raise DimensionError(
            f"gains are {gains.s} x ({gains.m}x{gains.n}), system needs {sys.s} x ({sys.m}x{sys.n})"
        )


def step_closed_loop(sys: PolytopicLPV, gains: GainSchedule, x, w: ScheduleLike):
    """One closed-loop step. Returns ``(x_next, u)``."""
    _check_gains(sys, gains)
    x = _vec(x, sys.n, "state")
    u = eval_K(gains, w) @ x
    return step(sys, x, u, w), u


def closed_loop_vertices(sys: PolytopicLPV, gains: GainSchedule) -> list:
    """``[A_i + B K_i]`` in vertex order."""
    _check_gains(sys, gains)
    return [a + sys.B @ k for a, k in zip(sys.vertices, gains.gains)]


def simulate(sys: PolytopicLPV, policy, x0, schedules) -> Trajectory:
    """Iterate the plant along a schedule sequence.

    ``policy`` is either a ``GainSchedule`` (closed loop) or an input
    sequence of length T (shape ``(T, m)``, or ``(T,)`` when m = 1).
    """
    sched = [as_schedule(w) for w in schedules]
    if not sched:
        raise DimensionError("schedule sequence is empty")
    T = len(sched)
    if isinstance(policy, GainSchedule):
        _check_gains(sys, policy)
        inputs = None
    else:
        inputs = np.asarray(policy, dtype=float)
        inputs = inputs.reshape(T, -1) if inputs.size == T * sys.m else inputs
        if inputs.shape != (T, sys.m):
            raise DimensionError(f"input sequence has shape {inputs.shape}, expected {(T, sys.m)}")
    states = np.empty((T + 1, sys.n))
    states[0] = _vec(x0, sys.n, "initial state")
    us = np.empty((T, sys.m))
    for t, w in enumerate(sched):
        if inputs is None:
            states[t + 1], us[t] = step_closed_loop(sys, policy, states[t], w)
        else:
            us[t] = inputs[t]
            states[t + 1] = step(sys, states[t], us[t], w)
    return Trajectory(states, us, np.array([w.w for w in sched]))


def simplex_point(rng: np.random.Generator, s: int) -> SchedulingPoint:
    """Uniform draw from the simplex via sorted-uniform gaps."""
    if s < 1:
        raise DimensionError("simplex dimension must be at least 1")
    cuts = np.sort(rng.random(s - 1))
    return SchedulingPoint(np.diff(np.concatenate(([0.0], cuts, [1.0]))))


def sample_scheduling(seed: int, s: int) -> SchedulingPoint:
    """Deterministic uniform sample from the simplex for a given seed."""
    if s < 1:
        raise DimensionError("simplex dimension must be at least 1")
    return simplex_point(np.random.default_rng(seed), s)


def sample_schedules(seed: int, s: int, T: int) -> list:
    rng = np.random.default_rng(seed)
    return [simplex_point(rng, s) for _ in range(T)]
