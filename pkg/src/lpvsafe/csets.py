"""Polyhedral and ellipsoidal C-sets and their Minkowski gauge functions.

A polyhedral set is stored as ``{x : F x <= 1}`` and an ellipsoid as
``{x : x' P x <= 1}``. For both, the gauge ``inf{a >= 0 : x in a*S}`` has a
closed form: ``max(0, max_i F_i x)`` and ``sqrt(x' P x)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SetError
from .optim import LinearProgram, solve_lp

CONTAINS_TOL = 1e-9
FEASIBILITY_TOL = 1e-9
DEDUP_TOL = 1e-7


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _vec(x, n):
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size != n:
        raise DimensionError(f"point has length {v.size}, set lives in R^{n}")
    return v


@dataclass(frozen=True, eq=False)
class PolyhedralCSet:
    """``{x : F x <= 1}``. Use :func:`validate_cset` before relying on compactness."""

    F: np.ndarray

    def __post_init__(self):
        F = np.atleast_2d(np.asarray(self.F, dtype=float))
        if F.ndim != 2 or F.shape[0] == 0 or F.shape[1] == 0:
            raise DimensionError(f"facet matrix must be a non-empty q x n array, got shape {F.shape}")
        if not np.all(np.isfinite(F)):
            raise SetError("facet matrix has non-finite entries")
        object.__setattr__(self, "F", _frozen(F))

    @classmethod
    def from_halfspaces(cls, F, b) -> "PolyhedralCSet":
        """Normalize ``{x : F x <= b}`` with ``b > 0`` to unit right-hand side."""
        F = np.atleast_2d(np.asarray(F, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        if b.size != F.shape[0]:
            raise DimensionError(f"{F.shape[0]} facets but {b.size} offsets")
        if np.any(b <= 0):
            raise SetError("offsets must be strictly positive for the origin to be interior")
        return cls(F / b[:, None])

    @property
    def n(self) -> int:
        return self.F.shape[1]

    @property
    def q(self) -> int:
        return self.F.shape[0]

    def gauge(self, x) -> float:
        return gauge_poly(self, x)

    def __eq__(self, other):
        return isinstance(other, PolyhedralCSet) and np.array_equal(self.F, other.F)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class EllipsoidalCSet:
    """``{x : sqrt(x' P x) <= 1}`` with ``P`` symmetric positive definite."""

    P: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DimensionError(f"P must be square, got shape {P.shape}")
        if np.max(np.abs(P - P.T)) > 1e-12 * max(1.0, np.max(np.abs(P))):
            raise SetError("P is not symmetric")
        P = 0.5 * (P + P.T)
        lo = np.linalg.eigvalsh(P)[0]
        if not lo > 0:
            raise SetError(f"P is not positive definite (smallest eigenvalue {lo:g})")
        object.__setattr__(self, "P", _frozen(P))

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def gauge(self, x) -> float:
        return gauge_ellip(self, x)

    def sqrt_factors(self):
        """``(P^{1/2}, P^{-1/2})`` from the eigendecomposition."""
        vals, vecs = np.linalg.eigh(self.P)
        root = np.sqrt(vals)
        return (vecs * root) @ vecs.T, (vecs / root) @ vecs.T

    def __eq__(self, other):
        return isinstance(other, EllipsoidalCSet) and np.array_equal(self.P, other.P)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class InputConstraintSet:
    """``{u : U u <= 1}``; may be unbounded (a slab, say)."""

    U: np.ndarray

    def __post_init__(self):
        U = np.atleast_2d(np.asarray(self.U, dtype=float))
        if U.ndim != 2 or U.shape[1] == 0:
            raise DimensionError(f"U must be a p x m array, got shape {U.shape}")
        object.__setattr__(self, "U", _frozen(U))

    @classmethod
    def box(cls, bounds) -> "InputConstraintSet":
        """``|u_k| <= bounds[k]`` for each input channel."""
        bounds = np.asarray(bounds, dtype=float).reshape(-1)
        m = bounds.size
        eye = np.eye(m) / bounds[:, None]
        return cls(np.vstack([eye, -eye]))

    @property
    def m(self) -> int:
        return self.U.shape[1]

    def contains(self, u, tol: float = CONTAINS_TOL) -> bool:
        u = _vec(u, self.m)
        return bool(np.all(self.U @ u <= 1.0 + tol))

    def __eq__(self, other):
        return isinstance(other, InputConstraintSet) and np.array_equal(self.U, other.U)

    __hash__ = None


def gauge_poly(S: PolyhedralCSet, x) -> float:
    x = _vec(x, S.n)
    return max(0.0, float(np.max(S.F @ x)))


def gauge_ellip(E: EllipsoidalCSet, x) -> float:
    x = _vec(x, E.n)
    return float(np.sqrt(max(0.0, x @ E.P @ x)))


def gauge(cset, x) -> float:
    if isinstance(cset, PolyhedralCSet):
        return gauge_poly(cset, x)
    if isinstance(cset, EllipsoidalCSet):
        return gauge_ellip(cset, x)
    raise TypeError(f"not a C-set: {type(cset).__name__}")


def contains(cset, x, scale: float = 1.0, tol: float = CONTAINS_TOL) -> bool:
    """Whether ``x`` lies in ``scale * cset``."""
    if scale < 0:
        raise ValueError(f"scale must be nonnegative, got {scale}")
    return gauge(cset, x) <= scale + tol


@dataclass(frozen=True)
class CSetReport:
    ok: bool
    reason: str = ""
    direction: tuple | None = None

    def __bool__(self):
        return self.ok


def validate_cset(S: PolyhedralCSet) -> CSetReport:
    """Check that ``S`` is compact with the origin in its interior.

    The origin is interior whenever every row is finite, because the
    right-hand side is fixed at one. Boundedness is decided by maximizing
    each ``+-x_j`` over the recession cone ``{F x <= 0}`` clipped to the
    unit box: any positive optimum is a recession direction.
    """
    F = S.F
    zero = np.flatnonzero(np.all(F == 0.0, axis=1))
    if zero.size:
        return CSetReport(False, f"row {int(zero[0])} of F is zero and bounds nothing")
    n = S.n
    A_ub = np.vstack([F, np.eye(n), -np.eye(n)])
    b_ub = np.concatenate([np.zeros(S.q), np.ones(2 * n)])
    free = np.full(n, -np.inf)
    for j in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = -sign
            rep = solve_lp(LinearProgram(c, A_ub, b_ub, lower=free))
            if rep.status != "optimal":
                return CSetReport(False, f"boundedness LP failed: {rep.status} {rep.message}")
            if -rep.objective > 1e-9:
                d = rep.z / np.max(np.abs(rep.z))
                d = np.where(np.abs(d) < 1e-12, 0.0, d)
                return CSetReport(False, f"unbounded in direction {tuple(float(v) for v in d)}",
                                  tuple(float(v) for v in d))
    if S.q < n + 1:
        return CSetReport(False, f"{S.q} facets cannot bound a set in R^{n}")
    return CSetReport(True)


def vertices(S: PolyhedralCSet) -> np.ndarray:
    """All extreme points of ``S``, one per row.

    Every n-subset of facets is intersected; feasible intersection points
    are kept and deduplicated. Exponential in q, which is fine for the
    handful of facets used here.
    """
    report = validate_cset(S)
    if not report.ok:
        raise SetError(f"cannot enumerate vertices: {report.reason}")
    F, n = S.F, S.n
    found = []
    for rows in itertools.combinations(range(S.q), n):
        sub = F[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12 * max(1.0, np.max(np.abs(sub))) ** n:
            continue
        v = np.linalg.solve(sub, np.ones(n))
        if np.all(F @ v <= 1.0 + FEASIBILITY_TOL):
            if not any(np.max(np.abs(v - u)) <= DEDUP_TOL for u in found):
                found.append(v)
    if not found:
        raise SetError("no vertices found; the set has empty interior")
    return np.array(found)


def boundary_point(cset, direction) -> np.ndarray:
    """Scale ``direction`` onto the boundary (gauge one) of ``cset``."""
    d = np.asarray(direction, dtype=float)
    g = gauge(cset, d)
    if g <= 0:
        raise SetError("direction has zero gauge; the set is unbounded along it")
    return d / g
