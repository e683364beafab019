"""LMI feasibility by maximizing the smallest-eigenvalue slack.

Given affine symmetric blocks ``M_j(z) = M_j0 + sum_k z_k M_jk`` and
equalities ``A_eq z = b_eq``, the equalities are eliminated through a
null-space parameterization ``z = z0 + N y`` and the problem

    maximize t   subject to   M_j(z0 + N y) - t I >= 0   for all j

is solved with a log-barrier path-following Newton method. The slack is
capped above and ``y`` is kept in a large ball so the barrier problem is
bounded. The final ``z`` is re-checked with ``min_eig`` independently of
the solver's internal state.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError
from .linalg import min_eig, null_space_basis
from .lp import SolveReport

DEFAULT_MARGIN = 1e-7
MAX_ITER = 5000
BALL_RADIUS = 1e6
GAP_RTOL = 1e-9
NEWTON_CAP = 100


@dataclass(frozen=True, eq=False)
class LmiBlock:
    """``M(z) = M0 + sum_k z[k] * Ms[k]``; ``Ms`` has shape ``(nz, d, d)``."""

    M0: np.ndarray
    Ms: np.ndarray

    def __post_init__(self):
        M0 = np.atleast_2d(np.asarray(self.M0, dtype=float))
        Ms = np.asarray(self.Ms, dtype=float)
        d = M0.shape[0]
        if M0.shape != (d, d):
            raise DimensionError(f"block constant term has shape {M0.shape}")
        Ms = Ms.reshape(-1, d, d)
        for name, mat in (("M0", M0[None]), ("Ms", Ms)):
            if mat.size and np.max(np.abs(mat - np.swapaxes(mat, 1, 2))) > 1e-12 * max(1.0, np.max(np.abs(mat))):
                raise DimensionError(f"block term {name} is not symmetric")
        object.__setattr__(self, "M0", 0.5 * (M0 + M0.T))
        object.__setattr__(self, "Ms", 0.5 * (Ms + np.swapaxes(Ms, 1, 2)))

    @property
    def size(self) -> int:
        return self.M0.shape[0]

    @property
    def nvars(self) -> int:
        return self.Ms.shape[0]

    def __call__(self, z) -> np.ndarray:
        return self.M0 + np.tensordot(np.asarray(z, dtype=float), self.Ms, axes=1)

    @classmethod
    def from_affine(cls, fn, nvars: int) -> "LmiBlock":
        """Build a block from an affine matrix-valued callable by probing it."""
        M0 = np.asarray(fn(np.zeros(nvars)), dtype=float)
        Ms = np.empty((nvars,) + M0.shape)
        for k in range(nvars):
            e = np.zeros(nvars)
            e[k] = 1.0
            Ms[k] = np.asarray(fn(e), dtype=float) - M0
        return cls(M0, Ms)


@dataclass(frozen=True, eq=False)
class LmiProblem:
    blocks: tuple
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise DimensionError("an LMI problem needs at least one block")
        nz = blocks[0].nvars
        if any(b.nvars != nz for b in blocks):
            raise DimensionError("all blocks must share the same decision vector")
        if self.A_eq is None or np.size(self.A_eq) == 0:
            A_eq, b_eq = np.zeros((0, nz)), np.zeros(0)
        else:
            A_eq = np.atleast_2d(np.asarray(self.A_eq, dtype=float))
            b_eq = np.asarray(self.b_eq, dtype=float).reshape(-1)
            if A_eq.shape != (b_eq.size, nz):
                raise DimensionError(f"equalities have shape {A_eq.shape}, expected ({b_eq.size}, {nz})")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "A_eq", A_eq)
        object.__setattr__(self, "b_eq", b_eq)

    @property
    def nvars(self) -> int:
        return self.blocks[0].nvars

    def slack(self, z) -> float:
        return min(min_eig(b(z)) for b in self.blocks)


def _newton_center(blocks, y, t, tau, t_cap, radius2, max_iter, budget):
    """Minimize  -tau*t - sum log det(M_j(y) - tI) - log(t_cap - t) - log(R^2 - |y|^2).

    Returns ``(y, t, iterations, converged)`` where ``converged`` is None
    when the line search stalls at working precision.
    """
    p = y.size
    it = 0
    while it < min(max_iter, NEWTON_CAP) and budget[0] > 0:
        it += 1
        budget[0] -= 1
        g = np.zeros(p + 1)
        H = np.zeros((p + 1, p + 1))
        g[p] = -tau
        for M0, Ms in blocks:
            S = M0 + np.tensordot(y, Ms, axes=1) - t * np.eye(M0.shape[0])
            Sinv = np.linalg.inv(S)
            # dS/dy_k = Ms[k]; dS/dt = -I
            SE = np.concatenate([np.einsum("ij,kjl->kil", Sinv, Ms), -Sinv[None]], axis=0)
            g -= np.einsum("kii->k", SE)
            H += np.einsum("aij,bji->ab", SE, SE)
        gap_t = t_cap - t
        g[p] += 1.0 / gap_t
        H[p, p] += 1.0 / gap_t**2
        ball = radius2 - y @ y
        g[:p] += 2.0 * y / ball
        H[:p, :p] += 2.0 * np.eye(p) / ball + 4.0 * np.outer(y, y) / ball**2
        try:
            dx = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            dx = -np.linalg.lstsq(H, g, rcond=None)[0]
        decrement = float(-g @ dx)
        if decrement / 2.0 < 1e-10:
            return y, t, it, True
        # backtracking line search restricted to the barrier domain
        f0 = _barrier_value(blocks, y, t, tau, t_cap, radius2)
        step = 1.0
        while step > 1e-14:
            yn, tn = y + step * dx[:p], t + step * dx[p]
            fn = _barrier_value(blocks, yn, tn, tau, t_cap, radius2)
            if np.isfinite(fn) and fn <= f0 - 0.25 * step * decrement:
                break
            step *= 0.5
        else:
            # no descent left at working precision
            return y, t, it, None
        y, t = yn, tn
    return y, t, it, False


def _barrier_value(blocks, y, t, tau, t_cap, radius2):
    if t >= t_cap or y @ y >= radius2:
        return np.inf
    val = -tau * t - np.log(t_cap - t) - np.log(radius2 - y @ y)
    for M0, Ms in blocks:
        S = M0 + np.tensordot(y, Ms, axes=1) - t * np.eye(M0.shape[0])
        sign, logdet = np.linalg.slogdet(S)
        if sign <= 0:
            return np.inf
        # Cholesky rejects numerically indefinite matrices that slogdet accepts
        try:
            np.linalg.cholesky(S)
        except np.linalg.LinAlgError:
            return np.inf
        val -= logdet
    return val


def solve_lmi(prob: LmiProblem, tol: float = 1e-9, margin: float = DEFAULT_MARGIN,
              max_iter: int = MAX_ITER, radius: float = BALL_RADIUS, trace=None) -> SolveReport:
    """Find ``z`` with every block positive semidefinite.

    Feasible means the equalities hold within ``tol`` and the smallest
    eigenvalue over all blocks is at least ``margin`` at the returned
    point. Otherwise the report is ``infeasible`` with the maximized
    slack in ``certificate``.
    """
    nz = prob.nvars
    if prob.A_eq.shape[0]:
        z0, *_ = np.linalg.lstsq(prob.A_eq, prob.b_eq, rcond=None)
        eq_res = float(np.max(np.abs(prob.A_eq @ z0 - prob.b_eq)))
        if eq_res > tol * max(1.0, float(np.max(np.abs(prob.b_eq)))):
            return SolveReport("infeasible", None, None, eq_res, 0, certificate=-np.inf,
                               message=f"equality constraints inconsistent (residual {eq_res:.3e})")
        N = null_space_basis(prob.A_eq, tol=1e-12)
    else:
        z0, N = np.zeros(nz), np.eye(nz)

    # reduced blocks in y
    blocks = []
    for blk in prob.blocks:
        M0 = blk(z0)
        Ms = np.tensordot(N.T, blk.Ms, axes=1) if N.shape[1] else np.zeros((0,) + M0.shape)
        blocks.append((M0, Ms))
    scale = max(1.0, max(np.max(np.abs(M0)) for M0, _ in blocks))
    p = N.shape[1]

    y = np.zeros(p)
    slack0 = min(min_eig(M0) for M0, _ in blocks)
    t = slack0 - 0.1 * scale
    t_cap = max(t, 0.0) + scale
    radius2 = radius**2
    dims = sum(M0.shape[0] for M0, _ in blocks) + 2
    tau = 1.0 / scale
    budget = [max_iter]
    iterations = 0
    converged = False
    while True:
        y, t, it, ok = _newton_center(blocks, y, t, tau, t_cap, radius2, max_iter, budget)
        iterations += it
        if trace is not None:
            trace.write(json.dumps({"solver": "lmi", "tau": tau, "newton": it, "t": float(t),
                                    "centered": ok}) + "\n")
        if dims / tau < GAP_RTOL * scale:
            converged = True
            break
        if ok is None and dims / tau < 1e-6 * scale:
            # stalled on rounding near the optimum; the gap bound is still tight
            converged = True
            break
        if budget[0] <= 0:
            break
        tau *= 8.0

    z = z0 + N @ y
    slack = prob.slack(z)
    eq_res = float(np.max(np.abs(prob.A_eq @ z - prob.b_eq))) if prob.A_eq.shape[0] else 0.0
    extra = {"slack_t": float(t), "reduced_dim": p}
    if slack >= margin and eq_res <= tol * max(1.0, float(np.max(np.abs(prob.b_eq), initial=0.0))):
        return SolveReport("feasible", z, None, max(0.0, -slack, eq_res), iterations,
                           certificate=slack, extra=extra)
    if not converged:
        return SolveReport("numerical_failure", z, None, max(0.0, -slack), iterations, certificate=slack,
                           message="barrier iterations exhausted before convergence", extra=extra)
    return SolveReport("infeasible", z, None, max(0.0, -slack), iterations, certificate=slack,
                       message=f"best eigenvalue slack {slack:.3e} below margin {margin:g}", extra=extra)
