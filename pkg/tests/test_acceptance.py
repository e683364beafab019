"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary (see conftest.py) and when this file is run as a script.
"""
from functools import cache

import numpy as np
import pytest

from lpvsafe import benchmarks as bm
from lpvsafe.csets import EllipsoidalCSet, PolyhedralCSet, boundary_point, gauge, gauge_poly, vertices
from lpvsafe.data import build_matrices, check_assumption2, check_pe, collect, khatri_rao
from lpvsafe.errors import InfeasibleError
from lpvsafe.lpv import PolytopicLPV, closed_loop_vertices, simplex_point, simulate
from lpvsafe.optim import LinearProgram, LmiBlock, LmiProblem, min_eig, solve_lmi, solve_lp
from lpvsafe.synth import (synth_ellip_data, synth_ellip_model, synth_poly_data, synth_poly_data_constrained,
                           synth_poly_model)
from lpvsafe.sysid import identify, predict
from lpvsafe.verify import (min_contraction_level, verify_ellip_contractive, verify_poly_contractive,
                            verify_trajectory)

RESULTS = {}

# exhaustive vertex-gauge oracle values, frozen before the main build
SEC5_GAIN_LEVEL = 0.94
SEC6_MODEL_GAIN_LEVEL = 0.9444933333333334


def record(num, title, ok, detail):
    RESULTS[num] = f"{'PASS' if ok else 'FAIL'}  criterion {num}: {title} ({detail})"
    assert ok, detail


def data_from(sys, T, seed, x0=(1.0, -1.0), lo=-1.0, hi=1.0):
    rng = np.random.default_rng(seed)
    u = rng.uniform(lo, hi, (T, sys.m))
    w = [simplex_point(rng, sys.s) for _ in range(T)]
    return build_matrices(simulate(sys, u, list(x0), w))


def random_polygon(rng):
    ang = np.arange(4) * np.pi / 2 + rng.uniform(-0.4, 0.4, 4)
    return PolyhedralCSet(np.column_stack([np.cos(ang), np.sin(ang)]) * rng.uniform(0.3, 1.5, (4, 1)))


def closed_loop_residual(cert, D, sys):
    return float(np.abs(D.X1 @ cert.G - (sys.stacked + sys.B @ cert.gains.stacked)).max())


# ---- cached certificates, shared with criterion 5 ----

@cache
def sec5_certs():
    S = bm.safe_set()
    return (synth_poly_data(bm.sec5_fixture(), S, bm.SEC5_LAMBDA),
            synth_poly_data(bm.sec5_data(), S, bm.SEC5_LAMBDA))


@cache
def sec6_run():
    sys = bm.sec6_system()
    D = data_from(sys, bm.SEC6_T, seed=0)
    try:
        cert = synth_poly_data_constrained(D, bm.safe_set(), bm.sec6_input_set(), bm.SEC6_LAMBDA)
        return sys, D, cert, None
    except InfeasibleError as e:
        return sys, D, None, e


ELLIP_SYS = PolytopicLPV(([[0.5, 0.4], [0.3, 1.0]], [[0.4, 0.3], [-0.2, 1.1]]), [[0.0], [1.0]])
ELLIP_SET = EllipsoidalCSet([[2.0, 0.3], [0.3, 1.0]])
ELLIP_LAM = 0.9


@cache
def ellip_certs():
    scalar = PolytopicLPV(([[0.5]],), [[1.0]])
    Ds = data_from(scalar, 2, seed=1, x0=(1.0,))
    cs = synth_ellip_data(Ds, EllipsoidalCSet([[1.0]]), 0.9)
    D2 = data_from(ELLIP_SYS, 8, seed=2)
    c2 = synth_ellip_data(D2, ELLIP_SET, ELLIP_LAM)
    return (scalar, Ds, cs), (ELLIP_SYS, D2, c2)


@cache
def equivalence_instances(count=50, lam=0.9):
    """Random plants where the model LP succeeds at ``lam``, with data-based certificates."""
    rng = np.random.default_rng(2023)
    out, tried = [], 0
    while len(out) < count and tried < 400:
        tried += 1
        sys = PolytopicLPV(tuple(rng.uniform(-1.2, 1.2, (2, 2)) for _ in range(2)), rng.uniform(-1, 1, (2, 1)))
        S = random_polygon(rng)
        try:
            gm, _ = synth_poly_model(sys, S, lam)
        except InfeasibleError:
            continue
        D = data_from(sys, 8, seed=int(rng.integers(1 << 30)))
        if not check_assumption2(D).satisfied:
            continue
        try:
            cert = synth_poly_data(D, S, lam)
        except InfeasibleError:
            cert = None
        out.append((sys, S, D, gm, cert))
    return tuple(out), tried


# ---- criteria ----

def test_criterion_1_fixture_reproduction():
    R = build_matrices(simulate(bm.sec5_system(), bm.SEC5_U0.T, bm.SEC5_X0, bm.SEC5_W0.T))
    err = max(np.abs(R.X0 - bm.SEC5_X0_DATA).max(), np.abs(R.X1 - bm.SEC5_X1_DATA).max(),
              np.abs(R.XW - bm.SEC5_XW_PRINTED).max())
    D = bm.sec5_data()
    pe, a2 = check_pe(D).satisfied, check_assumption2(D).satisfied
    ok = err <= 5e-3 and pe is False and a2 is True
    record(1, "printed record reproduced, check_pe false, check_assumption2 true", ok,
           f"max deviation {err:.2e} after the sign erratum; check_pe={pe}, check_assumption2={a2}")


def test_criterion_2_sec5_synthesis():
    S = bm.safe_set()
    fixture_cert, printed_cert = sec5_certs()
    sys = bm.sec5_system()
    ok_cert = all(verify_poly_contractive(c.closed_loop, S, 0.95).ok for c in (fixture_cert, printed_cert))
    ok_plant = verify_poly_contractive(closed_loop_vertices(sys, fixture_cert.gains), S, 0.95).ok
    cl = closed_loop_vertices(sys, bm.sec5_gains())
    ok_pub = verify_poly_contractive(cl, S, 0.95).ok
    lstar = min_contraction_level(cl, S)
    ok = ok_cert and ok_plant and ok_pub and abs(lstar - 0.94) <= 0.01 and abs(lstar - SEC5_GAIN_LEVEL) <= 1e-12
    record(2, "sec5 data-based synthesis and reference gain at 0.95", ok,
           f"certificates verified={ok_cert and ok_plant}, reference gain ok={ok_pub}, level {lstar:.6f}")


def test_criterion_3_sec6_end_to_end():
    sys, D, cert, err = sec6_run()
    S = bm.safe_set()
    model_gain_ok = verify_poly_contractive(closed_loop_vertices(sys, bm.sec6_model_gains()), S,
                                            SEC6_MODEL_GAIN_LEVEL, tol=1e-6).ok
    if cert is None:
        record(3, "sec6 constrained synthesis at 0.84 and closed-loop runs", False,
               f"synthesis infeasible at 0.84 ({err}); any gain needs lam >= 17/18; "
               f"reference model gain passes at its oracle level {SEC6_MODEL_GAIN_LEVEL:.6f}: {model_gain_ok}")
    rng = np.random.default_rng([0, 3])
    decay_ok = input_ok = True
    for k in range(20):
        x0 = boundary_point(S, rng.standard_normal(2))
        traj = simulate(sys, cert.gains, x0, [simplex_point(rng, 2) for _ in range(50)])
        decay_ok &= verify_trajectory(traj, S, bm.SEC6_LAMBDA).ok
        input_ok &= bool(np.all(np.abs(traj.inputs) <= 8.0))
    ok = decay_ok and input_ok and model_gain_ok
    record(3, "sec6 constrained synthesis at 0.84 and closed-loop runs", ok,
           f"decay ok={decay_ok}, inputs ok={input_ok}, model gain ok={model_gain_ok}")


def test_criterion_4_identification():
    sys = bm.sec6_system()
    D = data_from(sys, 12, seed=5)
    pe = check_pe(D)
    model = identify(D)
    err_model = max(max(np.abs(A - B).max() for A, B in zip(model.vertices, sys.vertices)),
                    np.abs(model.B - sys.B).max())
    rng = np.random.default_rng(6)
    err_pred = 0.0
    for _ in range(100):
        x, u, w = rng.uniform(-5, 5, 2), rng.uniform(-2, 2, 1), simplex_point(rng, 2)
        truth = simulate(sys, u[None, :], x, [w]).states[1]
        err_pred = max(err_pred, float(np.abs(predict(D, u, w, x) - truth).max()))
    ok = pe.satisfied and pe.required_T == 9 and err_model <= 1e-8 and err_pred <= 1e-8
    record(4, "identification from T=12 PE data", ok,
           f"required_T={pe.required_T}, model error {err_model:.1e}, prediction error {err_pred:.1e}")


def test_criterion_5_closed_loop_representation():
    pairs = [(sec5_certs()[0], bm.sec5_fixture(), bm.sec5_system())]
    sys, D, cert, _ = sec6_run()
    if cert is not None:
        pairs.append((cert, D, sys))
    sys6 = bm.sec6_system()
    D95 = data_from(sys6, bm.SEC6_T, seed=0)
    pairs.append((synth_poly_data_constrained(D95, bm.safe_set(), bm.sec6_input_set(), 0.95), D95, sys6))
    for plant, Dd, c in ellip_certs():
        pairs.append((c, Dd, plant))
    instances, _ = equivalence_instances()
    pairs += [(c, Dd, s) for s, _, Dd, _, c in instances if c is not None]
    worst = max(closed_loop_residual(c, Dd, s) for c, Dd, s in pairs)
    record(5, "X1 G equals A + B K for every certificate", worst <= 1e-8,
           f"{len(pairs)} certificates from plant-generated data, worst residual {worst:.1e}")


def test_criterion_6_ellipsoidal_path():
    (scalar, Ds, cs), (sys2, D2, c2) = ellip_certs()
    k = cs.gains.gains[0][0, 0]
    ok_scalar = abs(0.5 + k) <= 0.9 + 1e-6
    g_model = synth_ellip_model(sys2, ELLIP_SET, ELLIP_LAM)      # pre-certification by the model LMI
    pre = verify_ellip_contractive(closed_loop_vertices(sys2, g_model), ELLIP_SET, ELLIP_LAM).ok
    rep = verify_ellip_contractive(c2.closed_loop, ELLIP_SET, ELLIP_LAM)
    rep_plant = verify_ellip_contractive(closed_loop_vertices(sys2, c2.gains), ELLIP_SET, ELLIP_LAM, tol=1e-7)
    ok = ok_scalar and pre and rep.ok and rep.worst_eig <= 1e-7 and rep_plant.ok
    record(6, "ellipsoidal data-based synthesis", ok,
           f"scalar |a+bk|={abs(0.5 + k):.4f}, 2-state worst_eig {rep.worst_eig:.3e}, model pre-certified={pre}")


def test_criterion_7_oracle_equivalence():
    instances, tried = equivalence_instances()
    ok_feas = len(instances) >= 50
    for sys, S, D, gm, cert in instances:
        ok_feas &= cert is not None
        if cert is None:
            continue
        ok_feas &= verify_poly_contractive(closed_loop_vertices(sys, gm), S, 0.9 + 1e-6).ok
        ok_feas &= verify_poly_contractive(closed_loop_vertices(sys, cert.gains), S, 0.9 + 1e-6).ok
    # contrived: row 1 of every A_i is outside the reach of B, so small levels are unreachable
    rng = np.random.default_rng(11)
    ok_inf, n_inf = True, 0
    for _ in range(10):
        A = tuple(np.array([[1.0 + rng.uniform(0, 0.5), rng.uniform(-1, 1)], rng.uniform(-1, 1, 2)])
                  for _ in range(2))
        sys = PolytopicLPV(A, [[0.0], [1.0]])
        S = bm.safe_set()
        D = data_from(sys, 8, seed=int(rng.integers(1 << 30)))
        lam = 0.9 / 4
        model_inf = data_inf = False
        try:
            synth_poly_model(sys, S, lam)
        except InfeasibleError:
            model_inf = True
        try:
            synth_poly_data(D, S, lam)
        except InfeasibleError:
            data_inf = True
        ok_inf &= model_inf and data_inf
        n_inf += 1
    record(7, "model-based and data-based synthesis agree", ok_feas and ok_inf,
           f"{len(instances)} feasible instances at 0.9 (from {tried} draws) all matched; "
           f"{n_inf} unreachable-cancellation instances infeasible both ways at 0.225: {ok_inf}")


def test_criterion_8_property_suites():
    rng = np.random.default_rng(8)
    S = bm.safe_set()
    E = EllipsoidalCSet([[2.0, 0.3], [0.3, 1.0]])
    fails = []
    for cset in (S, E):
        for _ in range(500):
            x, y, a = rng.standard_normal(2) * 5, rng.standard_normal(2) * 5, rng.uniform(0, 10)
            if abs(gauge(cset, a * x) - a * gauge(cset, x)) > 1e-12 * max(1.0, a * gauge(cset, x)):
                fails.append("homogeneity")
            if gauge(cset, x + y) > gauge(cset, x) + gauge(cset, y) + 1e-9:
                fails.append("subadditivity")
    if any(abs(gauge_poly(S, v) - 1.0) > 1e-9 for v in vertices(S)):
        fails.append("boundary")
    for _ in range(30):
        A_ub = rng.uniform(-1, 1, (5, 4))
        x = rng.uniform(0, 1, 4)
        b_ub = A_ub @ x + rng.uniform(-0.5, 1, 5)
        lp = LinearProgram(rng.uniform(0, 1, 4), A_ub, b_ub)
        r1, r2 = solve_lp(lp), solve_lp(lp)
        if r1.status != r2.status or (r1.z is not None and not np.array_equal(r1.z, r2.z)):
            fails.append("lp determinism")
        if r1.status == "optimal" and (abs(r1.certificate) > 1e-9 or lp.violation(r1.z) > 1e-9):
            fails.append("lp phase-1 on optimal")
        if r1.status == "infeasible" and not r1.certificate > 1e-9:
            fails.append("lp phase-1 on infeasible")
    for _ in range(20):
        M0 = rng.standard_normal((3, 3))
        Ms = rng.standard_normal((2, 3, 3))
        blk = LmiBlock(M0 + M0.T - rng.uniform(0, 4) * np.eye(3), Ms + np.swapaxes(Ms, 1, 2))
        rep = solve_lmi(LmiProblem([blk]))
        if rep.status == "feasible" and min_eig(blk(rep.z)) < 1e-7:
            fails.append("lmi re-verification")
    for _ in range(50):
        s, n, T = (int(v) for v in rng.integers(1, 5, 3))
        W0, X0 = rng.uniform(0, 1, (s, T)), rng.standard_normal((n, T))
        XW = khatri_rao(W0, X0)
        if any(np.abs(XW[i * n:(i + 1) * n] - W0[i] * X0).max() > 1e-12 for i in range(s)):
            fails.append("khatri-rao")
    implied = 0
    for _ in range(100):
        n, m, s = (int(v) for v in rng.integers(1, 4, 3))
        T = int(rng.integers(1, n * m * s + n * s + m + 4))
        sys = PolytopicLPV(tuple(rng.uniform(-1, 1, (n, n)) for _ in range(s)), rng.uniform(-1, 1, (n, m)))
        D = collect(sys, rng.uniform(-1, 1, (T, m)), [simplex_point(rng, s) for _ in range(T)],
                    rng.uniform(-1, 1, n))
        if check_pe(D).satisfied:
            implied += 1
            if not check_assumption2(D).satisfied:
                fails.append("pe implies assumption 2")
    record(8, "property suites", not fails and implied > 0,
           f"violations: {sorted(set(fails)) or 'none'}; PE held on {implied}/100 datasets")


if __name__ == "__main__":
    import sys as _sys
    raise _sys.exit(pytest.main([__file__, "-q"]))
