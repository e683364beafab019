"""Dense two-phase simplex with Bland's anti-cycling rule.

Problem form::

    minimize    c @ z
    subject to  A_ub @ z <= b_ub
                A_eq @ z == b_eq
                z_k >= 0 where lower[k] == 0, free where lower[k] == -inf

Sizes in this library stay below a few hundred columns, so a dense tableau
is adequate and keeps every run bit-for-bit reproducible.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError

DEFAULT_TOL = 1e-9
PIVOT_TOL = 1e-11
PIVOT_RTOL = 1e-9
REFACTOR_EVERY = 25
MAX_PIVOTS = 50_000


@dataclass(frozen=True, eq=False)
class LinearProgram:
    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lower: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        nv = c.size

        def block(A, b, name):
            if A is None or np.size(A) == 0:
                if b is not None and np.size(b):
                    raise DimensionError(f"{name}: right-hand side given without matrix")
                return np.zeros((0, nv)), np.zeros(0)
            A = np.atleast_2d(np.asarray(A, dtype=float))
            b = np.asarray(b, dtype=float).reshape(-1)
            if A.shape[1] != nv:
                raise DimensionError(f"{name} has {A.shape[1]} columns, objective has {nv}")
            if b.size != A.shape[0]:
                raise DimensionError(f"{name} has {A.shape[0]} rows but {b.size} right-hand sides")
            return A, b

        A_ub, b_ub = block(self.A_ub, self.b_ub, "A_ub")
        A_eq, b_eq = block(self.A_eq, self.b_eq, "A_eq")
        if self.lower is None:
            lower = np.zeros(nv)
        else:
            lower = np.asarray(self.lower, dtype=float).reshape(-1)
            if lower.size != nv:
                raise DimensionError(f"lower has {lower.size} entries, objective has {nv}")
            if not np.all((lower == 0.0) | np.isneginf(lower)):
                raise DimensionError("lower bounds must be 0 or -inf")
        for name, val in (("c", c), ("A_ub", A_ub), ("b_ub", b_ub), ("A_eq", A_eq), ("b_eq", b_eq)):
            if not np.all(np.isfinite(val)):
                raise DimensionError(f"{name} has non-finite entries")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A_ub", A_ub)
        object.__setattr__(self, "b_ub", b_ub)
        object.__setattr__(self, "A_eq", A_eq)
        object.__setattr__(self, "b_eq", b_eq)
        object.__setattr__(self, "lower", lower)

    @property
    def nvars(self) -> int:
        return self.c.size

    def violation(self, z) -> float:
        """Largest constraint violation of ``z`` (0 when feasible)."""
        z = np.asarray(z, dtype=float)
        v = 0.0
        if self.A_ub.shape[0]:
            v = max(v, float(np.max(self.A_ub @ z - self.b_ub)))
        if self.A_eq.shape[0]:
            v = max(v, float(np.max(np.abs(self.A_eq @ z - self.b_eq))))
        bounded = self.lower == 0.0
        if bounded.any():
            v = max(v, float(np.max(-z[bounded])))
        return max(v, 0.0)


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Outcome of an LP or LMI solve.

    ``status`` is one of ``optimal``, ``feasible``, ``infeasible``,
    ``unbounded`` or ``numerical_failure``. For infeasible LPs
    ``certificate`` holds the phase-1 optimum (sum of artificial
    variables); for LMIs it holds the best achievable eigenvalue slack.
    """

    status: str
    z: np.ndarray | None
    objective: float | None
    max_violation: float
    iterations: int
    certificate: float | None = None
    message: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status in ("optimal", "feasible")


class _Tableau:
    """Simplex tableau over ``A x = b`` that periodically refactors its basis
    from the original data, so rounding does not accumulate across pivots."""

    def __init__(self, A, b, cost, basis, trace=None, pivots=0):
        self.A0, self.b0, self.cost = A, b, cost
        self.m, self.n = A.shape
        self.T = np.zeros((self.m + 1, self.n + 1))
        self.basis = np.asarray(basis, dtype=int).copy()
        self.pivots = pivots
        self.trace = trace
        self.refactor()

    def refactor(self) -> bool:
        Bm = self.A0[:, self.basis]
        try:
            X = np.linalg.solve(Bm, np.column_stack([self.A0, self.b0]))
        except np.linalg.LinAlgError:
            return False
        if not np.all(np.isfinite(X)):
            return False
        cB = self.cost[self.basis]
        self.T[: self.m] = X
        self.T[-1, : self.n] = self.cost - cB @ X[:, : self.n]
        self.T[-1, -1] = -cB @ X[:, -1]
        return True

    def objective(self) -> float:
        return float(-self.T[-1, -1])

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j
        self.pivots += 1
        if self.pivots % REFACTOR_EVERY == 0 and not self.refactor():
            return False
        return True

    def run(self, allowed, phase, max_pivots):
        """Bland's rule simplex on the current cost row. Returns a status."""
        T = self.T
        while True:
            if self.pivots >= max_pivots:
                return "iteration_cap"
            red = T[-1, : self.n]
            cand = np.flatnonzero(allowed & (red < -DEFAULT_TOL))
            if cand.size == 0:
                return "optimal"
            j = int(cand[0])
            colj = T[: self.m, j]
            rows = np.flatnonzero(colj > max(PIVOT_TOL, PIVOT_RTOL * float(np.abs(colj).max())))
            if rows.size == 0:
                return "unbounded"
            ratios = np.maximum(T[rows, -1], 0.0) / colj[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(ties[np.argmin(self.basis[ties])])
            if self.trace is not None:
                self.trace.write(json.dumps({
                    "solver": "lp", "phase": phase, "pivot": self.pivots,
                    "entering": j, "leaving": int(self.basis[r]),
                    "objective": float(-T[-1, -1]),
                }) + "\n")
            if not self.pivot(r, j):
                return "singular_basis"


def _standard_form(lp: LinearProgram):
    """Map to ``A x = b, x >= 0`` with ``b >= 0``.

    Column order: original variables, negative parts of free variables,
    slacks of the inequality rows.
    """
    nv = lp.nvars
    free = np.flatnonzero(np.isneginf(lp.lower))
    n_ub = lp.A_ub.shape[0]
    A = np.vstack([
        np.hstack([lp.A_ub, -lp.A_ub[:, free], np.eye(n_ub)]),
        np.hstack([lp.A_eq, -lp.A_eq[:, free], np.zeros((lp.A_eq.shape[0], n_ub))]),
    ])
    b = np.concatenate([lp.b_ub, lp.b_eq])
    c = np.concatenate([lp.c, -lp.c[free], np.zeros(n_ub)])
    neg = b < 0
    A[neg] *= -1.0
    b = np.where(neg, -b, b)
    return A, b, c, free, nv


def _recover(x_std, free, nv):
    z = x_std[:nv].copy()
    z[free] -= x_std[nv: nv + free.size]
    return z


def solve_lp(lp: LinearProgram, tol: float = DEFAULT_TOL, trace=None,
             max_pivots: int = MAX_PIVOTS) -> SolveReport:
    """Solve ``lp`` with the two-phase simplex method.

    ``trace`` may be a writable text stream; one JSON line per pivot is
    written to it.
    """
    A, b, c, free, nv = _standard_form(lp)
    m, n = A.shape
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)

    if m == 0:
        if np.any(c < -tol):
            return SolveReport("unbounded", None, None, 0.0, 0, message="no constraints and a descent direction")
        z = np.zeros(nv)
        return SolveReport("optimal", z, 0.0, lp.violation(z), 0)

    # phase 1: one artificial per row
    A1 = np.hstack([A, np.eye(m)])
    tab = _Tableau(A1, b, np.concatenate([np.zeros(n), np.ones(m)]), np.arange(n, n + m), trace)
    status = tab.run(np.ones(n + m, dtype=bool), 1, max_pivots)
    if status != "optimal" or not tab.refactor():
        return SolveReport("numerical_failure", None, None, np.inf, tab.pivots,
                           message=f"phase 1 ended with status {status}")
    phase1 = tab.objective()
    if phase1 > tol * scale:
        return SolveReport("infeasible", None, None, np.inf, tab.pivots, certificate=float(phase1),
                           message=f"phase-1 optimum {phase1:.3e} > 0")

    # drive remaining artificials out of the basis; drop redundant rows
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if tab.basis[r] >= n:
            row = tab.T[r, :n]
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > 1e-9:
                tab.pivot(r, j)
            else:
                keep[r] = False
    rows = np.flatnonzero(keep)
    basis = tab.basis[rows]
    if np.any(basis >= n):
        return SolveReport("numerical_failure", None, None, np.inf, tab.pivots,
                           message="could not drive artificials out of the basis")
    tab2 = _Tableau(A[rows], b[rows], c, basis, trace, pivots=tab.pivots)
    if not tab2.refactor():
        return SolveReport("numerical_failure", None, None, np.inf, tab.pivots,
                           message="singular basis after phase 1")
    if np.any(tab2.T[: rows.size, -1] < -1e-7 * scale):
        return SolveReport("numerical_failure", None, None, np.inf, tab.pivots,
                           message="phase-1 basis is not primal feasible")
    status = tab2.run(np.ones(n, dtype=bool), 2, max_pivots)
    if status in ("iteration_cap", "singular_basis"):
        return SolveReport("numerical_failure", None, None, np.inf, tab2.pivots,
                           message=f"phase 2 ended with status {status}")
    if status == "unbounded":
        return SolveReport("unbounded", None, None, np.inf, tab2.pivots, message="objective unbounded below")
    T2, basis = tab2.T, tab2.basis

    # recompute the basic solution from the original data to shed tableau drift
    x = np.zeros(n)
    B = A[rows][:, basis]
    try:
        x[basis] = np.linalg.solve(B, b[rows])
    except np.linalg.LinAlgError:
        x[basis] = T2[: rows.size, -1]
    x = np.maximum(x, 0.0)
    z = _recover(x, free, nv)
    viol = lp.violation(z)
    if viol > tol * scale:
        x = np.zeros(n)
        x[basis] = np.maximum(T2[: rows.size, -1], 0.0)
        z2 = _recover(x, free, nv)
        if lp.violation(z2) < viol:
            z, viol = z2, lp.violation(z2)
    if viol > tol * scale:
        return SolveReport("numerical_failure", z, float(lp.c @ z), viol, tab2.pivots,
                           message=f"final point violates constraints by {viol:.3e}")
    return SolveReport("optimal", z, float(lp.c @ z), viol, tab2.pivots, certificate=float(phase1))
