"""Gain-scheduling controller synthesis, model-based and data-based.

Polyhedral sets lead to linear programs in a nonnegative multiplier
``P_{1,s} = [P^1 ... P^s]`` (each ``q x q``) together with either the
stacked gain ``K_{1,s}`` (model-based) or the data parameterization ``G``
(``T x n*s``, data-based), using

    P^i F = F (A_i + B K_i),    P^i 1 <= lam 1,

and, from data, ``A_{1,s} + B K_{1,s} = X1 G`` with ``XW G = I`` and
``K_{1,s} = U0 G``. Ellipsoidal sets lead to one LMI per mode,

    [[lam^2 P, M_i'], [M_i, P^{-1}]] >= 0,   M_i = A_i + B K_i  (or X1 G D_i),

which is the Schur complement of ``M_i' P M_i <= lam^2 P``.

Matrices are vectorized column-major, so ``vec(A X B) = (B' kron A) vec(X)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .csets import EllipsoidalCSet, InputConstraintSet, PolyhedralCSet, validate_cset, vertices
from .data import DataMatrices, check_assumption2
from .errors import DimensionError, InfeasibleError, NumericalFailure, RankConditionError, SetError
from .lpv import GainSchedule, PolytopicLPV, closed_loop_vertices
from .optim import LinearProgram, LmiBlock, LmiProblem, solve_lmi, solve_lp
from .verify import verify_ellip_contractive, verify_input_constraint, verify_poly_contractive

LP_TOL = 1e-9
LMI_MARGIN = 1e-7
LAMBDA_SLACK = 1e-6


def _vec(A) -> np.ndarray:
    return np.asarray(A, dtype=float).reshape(-1, order="F")


def _unvec(v, rows, cols) -> np.ndarray:
    return np.asarray(v, dtype=float).reshape(rows, cols, order="F")


def selector(i: int, n: int, s: int) -> np.ndarray:
    """``D_i``: the ``(n*s) x n`` matrix picking the i-th n-column block."""
    D = np.zeros((n * s, n))
    D[i * n:(i + 1) * n] = np.eye(n)
    return D


@dataclass(frozen=True, eq=False)
class SynthesisCertificate:
    """Decision variables and diagnostics of a successful synthesis.

    ``G`` is ``None`` for model-based results; ``P1s`` is ``None`` for
    ellipsoidal ones.
    """

    kind: str
    lam: float
    gains: GainSchedule
    G: np.ndarray | None = None
    P1s: np.ndarray | None = None
    residuals: dict = field(default_factory=dict)
    closed_loop: tuple = ()

    def multiplier(self, i: int) -> np.ndarray:
        q = self.P1s.shape[0]
        return self.P1s[:, i * q:(i + 1) * q]


def _check_lam(lam: float) -> None:
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"contraction level must lie in [0, 1), got {lam}")


def _check_set(S: PolyhedralCSet, n: int) -> None:
    if S.n != n:
        raise DimensionError(f"set lives in R^{S.n}, system state has dimension {n}")
    rep = validate_cset(S)
    if not rep.ok:
        raise SetError(f"safe set is not a C-set: {rep.reason}")


def _check_data(D: DataMatrices, rank_tol: float = 1e-8) -> None:
    a2 = check_assumption2(D, rank_tol)
    if not a2.satisfied:
        raise RankConditionError(
            f"XW must have full row rank with T >= {a2.required_T}: rank {a2.rank} of {a2.rows}, T = {D.T}",
            rank=a2.rank, required=a2.required_T,
        )


def extract_gains(G, U0, s: int, n: int) -> GainSchedule:
    """``K_i = U0 G D_i``."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    U0 = np.atleast_2d(np.asarray(U0, dtype=float))
    if G.shape[0] != U0.shape[1] or G.shape[1] != n * s:
        raise DimensionError(f"G has shape {G.shape}, expected ({U0.shape[1]}, {n * s})")
    return GainSchedule.from_stacked(U0 @ G, s, n)


# ---- polyhedral LPs -------------------------------------------------------

def _multiplier_rows(q: int, s: int, lam: float):
    """``P_{1,s} (delta_j kron 1) <= lam 1`` for each mode j, in vec(P) coordinates."""
    rows = []
    for j in range(s):
        sel = np.kron(np.eye(s)[:, [j]], np.ones((q, 1)))
        rows.append(np.kron(sel.T, np.eye(q)))
    return np.vstack(rows), np.full(q * s, lam)


def _multiplier_lhs(F: np.ndarray, s: int) -> np.ndarray:
    """vec(P_{1,s} (I_s kron F)) as a matrix acting on vec(P_{1,s})."""
    q = F.shape[0]
    return np.kron(np.kron(np.eye(s), F).T, np.eye(q))


def _vertex_input_rows(Uset: InputConstraintSet, left: np.ndarray, verts, n: int, s: int):
    """Rows of ``U left D_i k <= 1`` in vec(right factor) coordinates, for all i and vertices k."""
    rows = []
    ULeft = Uset.U @ left
    for i in range(s):
        D = selector(i, n, s)
        for k in verts:
            rows.append(np.kron((D @ k)[None, :], ULeft))
    A = np.vstack(rows)
    return A, np.ones(A.shape[0])


def _solve_or_raise(lp: LinearProgram, what: str, tol: float, trace=None):
    rep = solve_lp(lp, tol=tol, trace=trace)
    if rep.status == "infeasible":
        raise InfeasibleError(f"{what} is infeasible (phase-1 value {rep.certificate:.3e})", rep)
    if rep.status != "optimal":
        raise NumericalFailure(f"{what}: LP returned {rep.status}: {rep.message}", rep)
    return rep


def synth_poly_model(sys: PolytopicLPV, S: PolyhedralCSet, lam: float,
                     Uset: InputConstraintSet | None = None, *, tol: float = LP_TOL,
                     lam_slack: float = LAMBDA_SLACK, trace=None):
    """Gains and multipliers from the known plant. Returns ``(gains, P1s)``."""
    _check_lam(lam)
    _check_set(S, sys.n)
    F = S.F
    q, n, m, s = S.q, sys.n, sys.m, sys.s
    nP, nK = q * q * s, m * n * s
    A_eq = np.hstack([_multiplier_lhs(F, s), -np.kron(np.eye(n * s), F @ sys.B)])
    b_eq = _vec(F @ sys.stacked)
    A_ub, b_ub = _multiplier_rows(q, s, lam)
    A_ub = np.hstack([A_ub, np.zeros((A_ub.shape[0], nK))])
    if Uset is not None:
        Ai, bi = _vertex_input_rows(Uset, np.eye(m), vertices(S), n, s)
        A_ub = np.vstack([A_ub, np.hstack([np.zeros((Ai.shape[0], nP)), Ai])])
        b_ub = np.concatenate([b_ub, bi])
    c = np.concatenate([np.ones(nP), np.zeros(nK)])
    lower = np.concatenate([np.zeros(nP), np.full(nK, -np.inf)])
    rep = _solve_or_raise(LinearProgram(c, A_ub, b_ub, A_eq, b_eq, lower), "model-based polyhedral LP", tol, trace)
    P1s = np.maximum(_unvec(rep.z[:nP], q, q * s), 0.0)
    gains = GainSchedule.from_stacked(_unvec(rep.z[nP:], m, n * s), s, n)
    cl = closed_loop_vertices(sys, gains)
    check = verify_poly_contractive(cl, S, lam + lam_slack)
    if not check.ok:
        raise NumericalFailure(f"LP solution fails the vertex check (gauge {check.worst_gauge:.9f} > {lam})")
    if Uset is not None and not verify_input_constraint(gains, S, Uset, tol=lam_slack).ok:
        raise NumericalFailure("LP solution violates the input constraint at a vertex")
    return gains, P1s


def poly_multipliers_exist(cl_vertices, S: PolyhedralCSet, lam: float, tol: float = LP_TOL) -> bool:
    """Feasibility of the multiplier LP with the closed loop fixed."""
    F = S.F
    q, s = S.q, len(cl_vertices)
    A_eq = _multiplier_lhs(F, s)
    b_eq = _vec(F @ np.hstack(cl_vertices))
    A_ub, b_ub = _multiplier_rows(q, s, lam)
    rep = solve_lp(LinearProgram(np.ones(q * q * s), A_ub, b_ub, A_eq, b_eq), tol=tol)
    if rep.status not in ("optimal", "infeasible"):
        raise NumericalFailure(f"multiplier LP returned {rep.status}: {rep.message}", rep)
    return rep.status == "optimal"


def synth_poly_data(D: DataMatrices, S: PolyhedralCSet, lam: float,
                    Uset: InputConstraintSet | None = None, *, tol: float = LP_TOL,
                    lam_slack: float = LAMBDA_SLACK, rank_tol: float = 1e-8, trace=None) -> SynthesisCertificate:
    """Direct synthesis from data for a polyhedral safe set.

    Decision variables are ``P_{1,s} >= 0`` and a free ``G``; the gain is
    ``U0 G``. With ``Uset`` the vertex input constraints are added so that
    ``u = K(w) x`` stays in ``Uset`` for every ``x`` in ``S``.
    """
    _check_lam(lam)
    _check_set(S, D.n)
    _check_data(D, rank_tol)
    F = S.F
    q, n, s, T = S.q, D.n, D.s, D.T
    nP, nG = q * q * s, T * n * s
    A_eq = np.vstack([
        np.hstack([_multiplier_lhs(F, s), -np.kron(np.eye(n * s), F @ D.X1)]),
        np.hstack([np.zeros((n * s * n * s, nP)), np.kron(np.eye(n * s), D.XW)]),
    ])
    b_eq = np.concatenate([np.zeros(q * n * s), _vec(np.eye(n * s))])
    A_ub, b_ub = _multiplier_rows(q, s, lam)
    A_ub = np.hstack([A_ub, np.zeros((A_ub.shape[0], nG))])
    if Uset is not None:
        if Uset.m != D.m:
            raise DimensionError(f"input set acts on R^{Uset.m}, data has {D.m} inputs")
        Ai, bi = _vertex_input_rows(Uset, D.U0, vertices(S), n, s)
        A_ub = np.vstack([A_ub, np.hstack([np.zeros((Ai.shape[0], nP)), Ai])])
        b_ub = np.concatenate([b_ub, bi])
    c = np.concatenate([np.ones(nP), np.zeros(nG)])
    lower = np.concatenate([np.zeros(nP), np.full(nG, -np.inf)])
    what = "data-based polyhedral LP" + (" with input constraints" if Uset is not None else "")
    rep = _solve_or_raise(LinearProgram(c, A_ub, b_ub, A_eq, b_eq, lower), what, tol, trace)
    P1s = np.maximum(_unvec(rep.z[:nP], q, q * s), 0.0)
    G = _unvec(rep.z[nP:], T, n * s)
    gains = extract_gains(G, D.U0, s, n)
    cl = tuple(D.X1 @ G @ selector(i, n, s) for i in range(s))
    check = verify_poly_contractive(cl, S, lam + lam_slack)
    if not check.ok:
        raise NumericalFailure(f"LP solution fails the vertex check (gauge {check.worst_gauge:.9f} > {lam})")
    residuals = {
        "xw_g_identity": float(np.max(np.abs(D.XW @ G - np.eye(n * s)))),
        "multiplier_equality": float(np.max(np.abs(
            np.hstack([P1s[:, i * q:(i + 1) * q] @ F for i in range(s)]) - F @ D.X1 @ G))),
        "multiplier_row_sum_excess": float(np.max(
            [P1s[:, i * q:(i + 1) * q].sum(axis=1).max() for i in range(s)]) - lam),
        "min_multiplier": float(P1s.min()),
        "worst_gauge": check.worst_gauge,
    }
    if Uset is not None:
        inp = verify_input_constraint(gains, S, Uset, tol=lam_slack)
        if not inp.ok:
            raise NumericalFailure(f"LP solution violates the input constraint ({inp.worst:.9f} > 1)")
        residuals["worst_input_ratio"] = inp.worst
    return SynthesisCertificate("poly_data_constrained" if Uset is not None else "poly_data",
                                lam, gains, G=G, P1s=P1s, residuals=residuals, closed_loop=cl)


def synth_poly_data_constrained(D: DataMatrices, S: PolyhedralCSet, Uset: InputConstraintSet,
                                lam: float, **kwargs) -> SynthesisCertificate:
    return synth_poly_data(D, S, lam, Uset, **kwargs)


# ---- ellipsoidal LMIs -----------------------------------------------------

def _contraction_block(E: EllipsoidalCSet, lam: float, closed_loop_of):
    """Affine callable for ``[[lam^2 P, M'], [M, P^{-1}]]`` given ``M = closed_loop_of(z)``."""
    P = E.P
    Pinv = np.linalg.inv(P)
    Pinv = 0.5 * (Pinv + Pinv.T)

    def block(z):
        M = closed_loop_of(z)
        return np.block([[lam**2 * P, M.T], [M, Pinv]])

    return block


def _ellip_finish(kind, lam, gains, cl, E, margin, extra=None, G=None):
    check = verify_ellip_contractive(cl, E, lam)
    if not check.ok:
        raise NumericalFailure(f"LMI solution fails the eigenvalue check (worst {check.worst_eig:.3e})")
    residuals = {"worst_eig": check.worst_eig}
    residuals.update(extra or {})
    return SynthesisCertificate(kind, lam, gains, G=G, residuals=residuals, closed_loop=tuple(cl))


def _solve_lmi_or_raise(prob: LmiProblem, what: str, margin: float, trace=None):
    rep = solve_lmi(prob, margin=margin, trace=trace)
    if rep.status == "infeasible":
        raise InfeasibleError(f"{what} is infeasible (best eigenvalue slack {rep.certificate:.3e})", rep)
    if rep.status != "feasible":
        raise NumericalFailure(f"{what}: {rep.status}: {rep.message}", rep)
    return rep


def synth_ellip_model(sys: PolytopicLPV, E: EllipsoidalCSet, lam: float, *,
                      margin: float = LMI_MARGIN, trace=None) -> GainSchedule:
    """Gains making ``E`` lam-contractive for the known plant (``P`` fixed)."""
    _check_lam(lam)
    if E.n != sys.n:
        raise DimensionError(f"ellipsoid lives in R^{E.n}, system state has dimension {sys.n}")
    n, m, s = sys.n, sys.m, sys.s
    nK = m * n * s
    blocks = []
    for i in range(s):
        fn = _contraction_block(E, lam, lambda z, i=i: sys.vertices[i] + sys.B @ _unvec(z, m, n * s)[:, i * n:(i + 1) * n])
        blocks.append(LmiBlock.from_affine(fn, nK))
    rep = _solve_lmi_or_raise(LmiProblem(blocks), "model-based ellipsoidal LMI", margin, trace)
    gains = GainSchedule.from_stacked(_unvec(rep.z, m, n * s), s, n)
    cert = _ellip_finish("ellip_model", lam, gains, closed_loop_vertices(sys, gains), E, margin,
                         {"lmi_slack": rep.certificate})
    return cert.gains


def synth_ellip_data(D: DataMatrices, E: EllipsoidalCSet, lam: float, *, margin: float = LMI_MARGIN,
                     rank_tol: float = 1e-8, trace=None) -> SynthesisCertificate:
    """Direct synthesis from data for an ellipsoidal safe set.

    ``XW G = I`` is passed as an equality and eliminated by the solver.
    """
    _check_lam(lam)
    if E.n != D.n:
        raise DimensionError(f"ellipsoid lives in R^{E.n}, data state has dimension {D.n}")
    _check_data(D, rank_tol)
    n, s, T = D.n, D.s, D.T
    nG = T * n * s
    blocks = []
    for i in range(s):
        Di = selector(i, n, s)
        fn = _contraction_block(E, lam, lambda z, Di=Di: D.X1 @ _unvec(z, T, n * s) @ Di)
        blocks.append(LmiBlock.from_affine(fn, nG))
    A_eq = np.kron(np.eye(n * s), D.XW)
    b_eq = _vec(np.eye(n * s))
    rep = _solve_lmi_or_raise(LmiProblem(blocks, A_eq, b_eq), "data-based ellipsoidal LMI", margin, trace)
    G = _unvec(rep.z, T, n * s)
    gains = extract_gains(G, D.U0, s, n)
    cl = [D.X1 @ G @ selector(i, n, s) for i in range(s)]
    return _ellip_finish("ellip_data", lam, gains, cl, E, margin,
                         {"lmi_slack": rep.certificate,
                          "xw_g_identity": float(np.max(np.abs(D.XW @ G - np.eye(n * s))))}, G=G)


def bisect_lambda(synthesize, lo: float = 0.0, hi: float = 0.999, tol: float = 1e-4):
    """Smallest feasible level for ``synthesize(lam)`` by bisection.

    ``synthesize`` raises ``InfeasibleError`` when infeasible. Returns
    ``(lam, result)`` for the best feasible level found, or raises if
    ``hi`` itself is infeasible.
    """
    best = (hi, synthesize(hi))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        try:
            best = (mid, synthesize(mid))
            hi = mid
        except InfeasibleError:
            lo = mid
    return best
