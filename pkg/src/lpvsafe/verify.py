"""Independent checks of lambda-contractivity.

Nothing here touches the synthesis code. Polyhedral checks are exact: a
linear map sends a polytope into ``lam * S`` iff every vertex lands there,
and a polytopic closed loop is contractive iff each vertex matrix is.
Ellipsoidal checks are eigenvalue tests on ``M' P M - lam^2 P``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .csets import (EllipsoidalCSet, InputConstraintSet, PolyhedralCSet, gauge,
                    gauge_poly, vertices)
from .errors import DimensionError, SetError
from .lpv import GainSchedule, PolytopicLPV, Trajectory, simplex_point, simulate

VERIFY_TOL = 1e-9


def _check_square(mats, n):
    mats = [np.atleast_2d(np.asarray(M, dtype=float)) for M in mats]
    for i, M in enumerate(mats):
        if M.shape != (n, n):
            raise DimensionError(f"closed-loop vertex {i} has shape {M.shape}, expected {(n, n)}")
    return mats


@dataclass(frozen=True)
class PolyVerifyReport:
    ok: bool
    worst_gauge: float
    worst_mode: int
    worst_vertex: tuple
    lam: float

    def __bool__(self):
        return self.ok


def _worst_poly(cl_vertices, S: PolyhedralCSet):
    verts = vertices(S)
    mats = _check_square(cl_vertices, S.n)
    best = (-np.inf, -1, None)
    for i, M in enumerate(mats):
        mapped = (S.F @ (M @ verts.T)).max(axis=0)
        k = int(np.argmax(mapped))
        g = max(0.0, float(mapped[k]))
        if g > best[0]:
            best = (g, i, tuple(float(v) for v in verts[k]))
    return best


def verify_poly_contractive(cl_vertices, S: PolyhedralCSet, lam: float,
                            tol: float = VERIFY_TOL) -> PolyVerifyReport:
    """Exact vertex test: ``max_i max_v gauge(M_i v) <= lam``."""
    g, mode, vert = _worst_poly(cl_vertices, S)
    return PolyVerifyReport(g <= lam + tol, g, mode, vert, lam)


@dataclass(frozen=True)
class EllipVerifyReport:
    ok: bool
    worst_eig: float
    mode: int
    lam: float

    def __bool__(self):
        return self.ok


def verify_ellip_contractive(cl_vertices, E: EllipsoidalCSet, lam: float,
                             tol: float = VERIFY_TOL) -> EllipVerifyReport:
    """``lambda_max(M_i' P M_i - lam^2 P) <= tol`` for every mode."""
    mats = _check_square(cl_vertices, E.n)
    P = E.P
    worst, mode = -np.inf, -1
    for i, M in enumerate(mats):
        Q = M.T @ P @ M - lam**2 * P
        e = float(np.linalg.eigvalsh(0.5 * (Q + Q.T))[-1])
        if e > worst:
            worst, mode = e, i
    return EllipVerifyReport(worst <= tol, worst, mode, lam)


def min_contraction_level(cl_vertices, cset) -> float:
    """Smallest ``lam`` for which ``cset`` is lam-contractive."""
    if isinstance(cset, PolyhedralCSet):
        return _worst_poly(cl_vertices, cset)[0]
    if isinstance(cset, EllipsoidalCSet):
        mats = _check_square(cl_vertices, cset.n)
        root, inv_root = cset.sqrt_factors()
        return max(float(np.linalg.norm(root @ M @ inv_root, 2)) for M in mats)
    raise TypeError(f"not a C-set: {type(cset).__name__}")


@dataclass(frozen=True)
class TrajectoryReport:
    ok: bool
    max_ratio: float
    first_violation: int | None
    ratios: tuple = field(default=(), repr=False)

    def __bool__(self):
        return self.ok


def verify_trajectory(traj: Trajectory, cset, lam: float, tol: float = VERIFY_TOL) -> TrajectoryReport:
    """Check ``gauge(x0) <= 1`` and ``gauge(x(t+1)) <= lam * gauge(x(t))`` along ``traj``.

    ``first_violation`` is the time index ``t`` of the first failing
    transition (0 also flags a start outside the set).
    """
    g = np.array([gauge(cset, x) for x in traj.states])
    first = None
    if g[0] > 1.0 + tol:
        first = 0
    ratios = []
    for t in range(len(g) - 1):
        if g[t] > 1e-12:
            ratios.append(g[t + 1] / g[t])
        if first is None and g[t + 1] > lam * g[t] + tol:
            first = t
    max_ratio = float(max(ratios)) if ratios else 0.0
    return TrajectoryReport(first is None, max_ratio, first, tuple(ratios))


@dataclass(frozen=True)
class InputReport:
    ok: bool
    worst: float
    worst_mode: int
    worst_vertex: tuple

    def __bool__(self):
        return self.ok


def verify_input_constraint(gains: GainSchedule, S: PolyhedralCSet, Uset: InputConstraintSet,
                            tol: float = VERIFY_TOL) -> InputReport:
    """``U K_i k <= 1`` for every mode and every vertex ``k`` of ``S``."""
    if gains.n != S.n or gains.m != Uset.m:
        raise DimensionError("gain, set and input-constraint dimensions disagree")
    verts = vertices(S)
    worst, mode, vert = -np.inf, -1, None
    for i, K in enumerate(gains.gains):
        vals = (Uset.U @ (K @ verts.T)).max(axis=0)
        k = int(np.argmax(vals))
        if vals[k] > worst:
            worst, mode, vert = float(vals[k]), i, tuple(float(v) for v in verts[k])
    return InputReport(worst <= 1.0 + tol, worst, mode, vert)


@dataclass(frozen=True)
class MonteCarloReport:
    trials: int
    passes: int
    failures: tuple
    worst_ratio: float

    @property
    def ok(self) -> bool:
        return self.passes == self.trials


def _boundary_sample(rng, cset) -> np.ndarray:
    d = rng.standard_normal(cset.n)
    d /= np.linalg.norm(d)
    g = gauge(cset, d)
    if g <= 0:
        raise SetError("sampled a recession direction; the set is unbounded")
    return d / g


def monte_carlo_verify(sys: PolytopicLPV, gains: GainSchedule, cset, lam: float,
                       trials: int, horizon: int, seed: int) -> MonteCarloReport:
    """Closed-loop runs from random boundary points under random schedules.

    Trial ``k`` draws from ``default_rng([seed, k])`` so results do not
    depend on evaluation order.
    """
    if trials < 1 or horizon < 1:
        raise ValueError("trials and horizon must be at least 1")
    passes, failures, worst = 0, [], 0.0
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        x0 = _boundary_sample(rng, cset)
        sched = [simplex_point(rng, sys.s) for _ in range(horizon)]
        rep = verify_trajectory(simulate(sys, gains, x0, sched), cset, lam)
        worst = max(worst, rep.max_ratio)
        if rep.ok:
            passes += 1
        else:
            failures.append(k)
    return MonteCarloReport(trials, passes, tuple(failures), worst)


def spectral_radius(M) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(M, dtype=float)))))


__all__ = [
    "EllipVerifyReport", "InputReport", "MonteCarloReport", "PolyVerifyReport", "TrajectoryReport",
    "gauge_poly", "min_contraction_level", "monte_carlo_verify", "spectral_radius",
    "verify_ellip_contractive", "verify_input_constraint", "verify_poly_contractive", "verify_trajectory",
]
