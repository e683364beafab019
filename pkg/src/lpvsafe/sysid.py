"""Identification of the polytopic model from persistently exciting data.

With ``[U0; XW]`` of full row rank and a right inverse ``[V1 V2]``, the data
equation ``X1 = A_{1,s} XW + B U0`` gives ``A_{1,s} = X1 V1`` and
``B = X1 V2``. The pseudoinverse is used as the right inverse.
"""
from __future__ import annotations

import numpy as np

from .data import DataMatrices, check_pe
from .errors import DimensionError, RankConditionError
from .lpv import PolytopicLPV, as_schedule


def _require_pe(D: DataMatrices, tol: float) -> None:
    pe = check_pe(D, tol)
    if not pe.satisfied:
        raise RankConditionError(
            f"PE rank condition violated: rank [U0; XW] = {pe.rank} of {pe.rows} rows, "
            f"T = {D.T} samples (need T >= {pe.required_T})",
            rank=pe.rank, required=pe.required_T,
        )


def right_inverse(D: DataMatrices) -> tuple:
    """Pseudoinverse of ``[U0; XW]`` split by column: ``V1`` pairs with ``XW``, ``V2`` with ``U0``."""
    V = np.linalg.pinv(np.vstack([D.U0, D.XW]))
    return V[:, D.m:], V[:, : D.m]


def identify(D: DataMatrices, tol: float = 1e-8, rank_tol: float = 1e-8) -> PolytopicLPV:
    """Recover ``A_1..A_s`` and ``B`` from PE data.

    Raises ``RankConditionError`` when the data is not PE and ``ValueError``
    when the fitted model leaves a residual above ``tol``.
    """
    _require_pe(D, rank_tol)
    V1, V2 = right_inverse(D)
    a_stacked = D.X1 @ V1
    b = D.X1 @ V2
    sys = PolytopicLPV.from_stacked(a_stacked, b, D.s)
    res = float(np.max(np.abs(D.X1 - a_stacked @ D.XW - b @ D.U0)))
    scale = max(1.0, float(np.max(np.abs(D.X1))))
    if res > tol * scale:
        raise ValueError(f"data inconsistent with a polytopic LPV model: residual {res:.3e}")
    return sys


def predict(D: DataMatrices, u, w, x, rank_tol: float = 1e-8) -> np.ndarray:
    """One-step prediction ``X1 [U0; XW]^+ [u; w kron x]`` without a model."""
    _require_pe(D, rank_tol)
    u = np.asarray(u, dtype=float).reshape(-1)
    x = np.asarray(x, dtype=float).reshape(-1)
    wv = as_schedule(w).w
    if u.size != D.m or x.size != D.n or wv.size != D.s:
        raise DimensionError("predict arguments do not match the data dimensions")
    V = np.linalg.pinv(np.vstack([D.U0, D.XW]))
    return D.X1 @ (V @ np.concatenate([u, np.kron(wv, x)]))
