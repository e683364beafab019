"""Data matrices from an open-loop experiment and their richness checks.

Columns are samples t = 0..T-1::

    U0 = [u(0) ... u(T-1)]          (m x T)
    X0 = [x(0) ... x(T-1)]          (n x T)
    X1 = [x(1) ... x(T)]            (n x T)
    W0 = [w(0) ... w(T-1)]          (s x T)
    XW = W0 (Khatri-Rao) X0         (n*s x T), column t = w(t) kron x(t)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .lpv import PolytopicLPV, SchedulingPoint, Trajectory, simulate
from .optim.linalg import numerical_rank

RANK_RTOL = 1e-8


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def khatri_rao(W0, X0) -> np.ndarray:
    """Column-wise Kronecker product; blocks ordered ``w_1 x, ..., w_s x``."""
    W0 = np.atleast_2d(np.asarray(W0, dtype=float))
    X0 = np.atleast_2d(np.asarray(X0, dtype=float))
    if W0.shape[1] != X0.shape[1]:
        raise DimensionError(f"column counts differ: {W0.shape[1]} vs {X0.shape[1]}")
    s, T = W0.shape
    return (W0[:, None, :] * X0[None, :, :]).reshape(s * X0.shape[0], T)


@dataclass(frozen=True, eq=False)
class DataMatrices:
    U0: np.ndarray
    X0: np.ndarray
    X1: np.ndarray
    W0: np.ndarray
    XW: np.ndarray | None = None

    def __post_init__(self):
        U0, X0, X1, W0 = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (self.U0, self.X0, self.X1, self.W0))
        T = U0.shape[1]
        for name, a in (("X0", X0), ("X1", X1), ("W0", W0)):
            if a.shape[1] != T:
                raise DimensionError(f"{name} has {a.shape[1]} columns, U0 has {T}")
        if X0.shape[0] != X1.shape[0]:
            raise DimensionError(f"X0 has {X0.shape[0]} rows, X1 has {X1.shape[0]}")
        W0 = np.column_stack([SchedulingPoint(W0[:, t]).w for t in range(T)]) if T else W0
        XW = khatri_rao(W0, X0) if self.XW is None else np.atleast_2d(np.asarray(self.XW, dtype=float))
        if XW.shape != (X0.shape[0] * W0.shape[0], T):
            raise DimensionError(f"XW has shape {XW.shape}, expected {(X0.shape[0] * W0.shape[0], T)}")
        for name, a in (("U0", U0), ("X0", X0), ("X1", X1), ("W0", W0), ("XW", XW)):
            object.__setattr__(self, name, _frozen(a))

    @property
    def T(self) -> int:
        return self.U0.shape[1]

    @property
    def n(self) -> int:
        return self.X0.shape[0]

    @property
    def m(self) -> int:
        return self.U0.shape[0]

    @property
    def s(self) -> int:
        return self.W0.shape[0]

    def __eq__(self, other):
        return isinstance(other, DataMatrices) and all(
            np.array_equal(getattr(self, k), getattr(other, k)) for k in ("U0", "X0", "X1", "W0", "XW")
        )

    __hash__ = None


def build_matrices(traj: Trajectory) -> DataMatrices:
    if traj.T < 1:
        raise DimensionError("trajectory needs at least one transition")
    x = traj.states
    return DataMatrices(U0=traj.inputs.T, X0=x[:-1].T, X1=x[1:].T, W0=traj.schedules.T)


def collect(sys: PolytopicLPV, input_signal, schedule_signal, x0) -> DataMatrices:
    """Run an open-loop experiment on ``sys`` and assemble the data."""
    inputs = np.asarray(input_signal, dtype=float)
    if len(inputs) != len(schedule_signal):
        raise DimensionError(f"{len(inputs)} inputs but {len(schedule_signal)} schedules")
    return build_matrices(simulate(sys, inputs, x0, schedule_signal))


@dataclass(frozen=True)
class RankCheck:
    satisfied: bool
    rank: int
    rows: int
    min_singular_value: float
    required_T: int
    full_row_rank: bool

    def __bool__(self):
        return self.satisfied


def check_assumption2(D: DataMatrices, tol: float = RANK_RTOL) -> RankCheck:
    """Whether ``XW`` has full row rank with at least ``n*s + 1`` samples.

    The extra sample leaves ``XW G = I`` with a nontrivial solution set, so
    the gain is not pinned to ``U0 XW^{-1}``.
    """
    rank, sv = numerical_rank(D.XW, tol)
    rows = D.n * D.s
    full = rank == rows
    smin = float(sv[rows - 1]) if sv.size >= rows else 0.0
    need = rows + 1
    return RankCheck(full and D.T >= need, rank, rows, smin, need, full)


def required_samples(n: int, m: int, s: int) -> int:
    """Sample count ``n*m*s + n*s + m`` stated for identifiability."""
    return n * m * s + n * s + m


def check_pe(D: DataMatrices, tol: float = RANK_RTOL) -> RankCheck:
    """Persistence of excitation for identification.

    Satisfied when ``[U0; XW]`` has full row rank *and* the record holds at
    least ``n*m*s + n*s + m`` samples. ``full_row_rank`` reports the rank
    test alone.
    """
    stacked = np.vstack([D.U0, D.XW])
    rank, sv = numerical_rank(stacked, tol)
    rows = stacked.shape[0]
    full = rank == rows
    smin = float(sv[rows - 1]) if sv.size >= rows else 0.0
    need = required_samples(D.n, D.m, D.s)
    return RankCheck(full and D.T >= need, rank, rows, smin, need, full)


def data_residual(D: DataMatrices, sys: PolytopicLPV) -> float:
    """``max |X1 - A_{1,s} XW - B U0|``: zero for exact data from ``sys``."""
    return float(np.max(np.abs(D.X1 - sys.stacked @ D.XW - sys.B @ D.U0)))
