"""JSON and CSV encoding of systems, gains, sets, data and reports.

Floats are written with ``repr`` (shortest round-trip form), so a value
read back is bit-identical and reruns produce byte-identical files.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from pathlib import Path

import numpy as np

from .csets import EllipsoidalCSet, InputConstraintSet, PolyhedralCSet
from .data import DataMatrices
from .lpv import GainSchedule, PolytopicLPV, Trajectory
from .synth import SynthesisCertificate


def _rows(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def _plain(obj):
    """Recursively convert numpy and dataclass values to JSON-ready ones."""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


# ---- object <-> dict --------------------------------------------------------

def system_to_dict(sys: PolytopicLPV) -> dict:
    return {"type": "polytopic_lpv", "A": [_rows(A) for A in sys.vertices], "B": _rows(sys.B)}


def system_from_dict(d: dict) -> PolytopicLPV:
    return PolytopicLPV(tuple(np.array(A, dtype=float) for A in d["A"]), np.array(d["B"], dtype=float))


def gains_to_dict(g: GainSchedule) -> dict:
    return {"type": "gain_schedule", "K": [_rows(K) for K in g.gains]}


def gains_from_dict(d: dict) -> GainSchedule:
    if "K" in d:
        return GainSchedule(tuple(np.array(K, dtype=float) for K in d["K"]))
    return GainSchedule.from_stacked(np.array(d["K_stacked"], dtype=float), int(d["s"]))


def set_to_dict(cset) -> dict:
    if isinstance(cset, PolyhedralCSet):
        return {"type": "polyhedral", "F": _rows(cset.F)}
    if isinstance(cset, EllipsoidalCSet):
        return {"type": "ellipsoidal", "P": _rows(cset.P)}
    raise TypeError(f"not a C-set: {type(cset).__name__}")


def set_from_dict(d: dict):
    if d["type"] == "polyhedral":
        if "b" in d:
            return PolyhedralCSet.from_halfspaces(d["F"], d["b"])
        return PolyhedralCSet(np.array(d["F"], dtype=float))
    if d["type"] == "ellipsoidal":
        return EllipsoidalCSet(np.array(d["P"], dtype=float))
    raise ValueError(f"unknown set type {d['type']!r}")


def input_set_to_dict(U: InputConstraintSet) -> dict:
    return {"U": _rows(U.U)}


def input_set_from_dict(d: dict) -> InputConstraintSet:
    if "box" in d:
        return InputConstraintSet.box(d["box"])
    return InputConstraintSet(np.array(d["U"], dtype=float))


def data_to_dict(D: DataMatrices) -> dict:
    return {"U0": _rows(D.U0), "X0": _rows(D.X0), "X1": _rows(D.X1), "W0": _rows(D.W0), "XW": _rows(D.XW)}


def data_from_dict(d: dict) -> DataMatrices:
    return DataMatrices(U0=d["U0"], X0=d["X0"], X1=d["X1"], W0=d["W0"], XW=d.get("XW"))


def certificate_to_dict(c: SynthesisCertificate) -> dict:
    return {
        "type": "certificate",
        "kind": c.kind,
        "lam": c.lam,
        "gains": gains_to_dict(c.gains),
        "G": None if c.G is None else _rows(c.G),
        "P1s": None if c.P1s is None else _rows(c.P1s),
        "residuals": _plain(c.residuals),
        "closed_loop": [_rows(M) for M in c.closed_loop],
    }


def certificate_from_dict(d: dict) -> SynthesisCertificate:
    return SynthesisCertificate(
        d["kind"], float(d["lam"]), gains_from_dict(d["gains"]),
        G=None if d.get("G") is None else np.array(d["G"], dtype=float),
        P1s=None if d.get("P1s") is None else np.array(d["P1s"], dtype=float),
        residuals=dict(d.get("residuals", {})),
        closed_loop=tuple(np.array(M, dtype=float) for M in d.get("closed_loop", [])),
    )


def report_to_dict(rep) -> dict:
    if dataclasses.is_dataclass(rep):
        out = {f.name: getattr(rep, f.name) for f in dataclasses.fields(rep)}
        if hasattr(rep, "ok") and "ok" not in out:
            out["ok"] = rep.ok
        return _plain(out)
    return _plain(rep)


# ---- CSV --------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    Path(path).write_text(csv_text(header, rows))


def read_csv_matrix(path) -> np.ndarray:
    """Numeric CSV with one header row; lines starting with ``#`` are skipped."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(lines[1:])
    return np.array([[float(v) for v in row] for row in reader], dtype=float)


def trajectory_rows(traj: Trajectory):
    """Rows ``t, x_1..x_n, u_1..u_m, w_1..w_s``; the final state leaves ``u`` and ``w`` empty."""
    n, m, s = traj.states.shape[1], traj.inputs.shape[1], traj.schedules.shape[1]
    header = ["t"] + [f"x_{i + 1}" for i in range(n)] + [f"u_{i + 1}" for i in range(m)] + \
             [f"w_{i + 1}" for i in range(s)]
    rows = []
    for t in range(traj.T + 1):
        if t < traj.T:
            tail = list(traj.inputs[t]) + list(traj.schedules[t])
        else:
            tail = [None] * (m + s)
        rows.append([t] + list(traj.states[t]) + tail)
    return header, rows


def write_trajectory_csv(path, traj: Trajectory) -> None:
    write_csv(path, *trajectory_rows(traj))


def write_gauge_csv(path, runs, lam: float) -> None:
    """Gauge decay per run with the reference envelope ``gauge(x0) * lam**t``."""
    rows = []
    for k, gauges in enumerate(runs):
        g0 = gauges[0]
        rows.extend([k, t, g, g0 * lam**t] for t, g in enumerate(gauges))
    write_csv(path, ["run", "t", "gauge", "bound"], rows)


def write_vertices_csv(path, verts) -> None:
    verts = np.asarray(verts, dtype=float)
    write_csv(path, [f"x_{i + 1}" for i in range(verts.shape[1])], verts.tolist())
