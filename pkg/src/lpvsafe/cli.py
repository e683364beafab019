"""Config-driven command line: ``lpvsafe {simulate,synth,verify,identify,demo}``.

Exit codes are the machine contract::

    0  success
    2  configuration error (missing file, bad JSON, schema violation, bad values)
    3  simulation error
    4  infeasible synthesis, violated check, or insufficient data richness
    5  numerical failure of a solver

All human-readable text goes to standard error or to ``summary.txt``.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import benchmarks as bm
from . import serialize as io
from .csets import PolyhedralCSet, boundary_point, gauge, vertices
from .data import DataMatrices, build_matrices, check_assumption2, check_pe, data_residual
from .errors import InfeasibleError, LPVError, NumericalFailure, RankConditionError, SetError
from .lpv import GainSchedule, PolytopicLPV, closed_loop_vertices, simplex_point, simulate
from .synth import (LAMBDA_SLACK, LMI_MARGIN, LP_TOL, SynthesisCertificate, bisect_lambda,
                    synth_ellip_data, synth_ellip_model, synth_poly_data, synth_poly_model)
from .sysid import identify
from .verify import (min_contraction_level, monte_carlo_verify, verify_ellip_contractive,
                     verify_input_constraint, verify_poly_contractive, verify_trajectory)

EXIT_OK, EXIT_CONFIG, EXIT_SIM, EXIT_FAIL, EXIT_NUMERIC = 0, 2, 3, 4, 5
SCHEMA_VERSION = 1


class ConfigError(Exception):
    pass


class SimulationError(Exception):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---- config loading -------------------------------------------------------

def _schema() -> dict:
    return json.loads(resources.files("lpvsafe").joinpath("config_schema.json").read_text())


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path}: {e.msg} at line {e.lineno} column {e.colno}") from None
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(_schema()).iter_errors(cfg))
    if err is not None:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config {path} fails validation at {where}: {err.message}")
    cfg["_base"] = str(path.resolve().parent)
    return cfg


def _resolve(cfg, p) -> Path:
    p = Path(p)
    return p if p.is_absolute() else Path(cfg["_base"]) / p


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path}: {e.msg} at line {e.lineno} column {e.colno}") from None


def build_system(cfg, spec=None) -> PolytopicLPV:
    spec = cfg["system"] if spec is None else spec
    if "benchmark" in spec:
        return bm.sec5_system() if spec["benchmark"] == "sec5" else bm.sec6_system()
    if "identify" in spec:
        if spec["identify"]["source"] == "collect":
            raise ConfigError("an identified system needs recorded data, not a collect spec")
        return identify(build_data(cfg, spec["identify"], None))
    if "file" in spec:
        return io.system_from_dict(_read_json(_resolve(cfg, spec["file"])))
    return io.system_from_dict(spec)


def build_set(cfg):
    spec = cfg["set"]
    if spec.get("benchmark") == "safe_set":
        return bm.safe_set()
    return io.set_from_dict(spec)


def build_gains(cfg) -> GainSchedule:
    spec = cfg["gains"]
    if "benchmark" in spec:
        return {"sec5": bm.sec5_gains, "sec6_model": bm.sec6_model_gains,
                "sec6_data": bm.sec6_data_gains}[spec["benchmark"]]()
    if "file" in spec:
        d = _read_json(_resolve(cfg, spec["file"]))
        return io.gains_from_dict(d["gains"] if d.get("type") == "certificate" else d)
    return io.gains_from_dict(spec)


def build_input_set(cfg):
    spec = cfg.get("input_constraint")
    return None if spec is None else io.input_set_from_dict(spec)


def _csv_block(cfg, path) -> np.ndarray:
    p = _resolve(cfg, path)
    if not p.exists():
        raise ConfigError(f"data file not found: {p}")
    return io.read_csv_matrix(p).T


def build_data(cfg, spec=None, system=None) -> DataMatrices:
    spec = cfg["data"] if spec is None else spec
    src = spec["source"]
    if src == "benchmark":
        return bm.sec5_data()
    if src == "collect":
        sys_ = system if system is not None else build_system(cfg)
        lo, hi = spec.get("input_range", [-1.0, 1.0])
        rng = np.random.default_rng(cfg["seed"])
        u = rng.uniform(lo, hi, (spec["T"], sys_.m))
        w = [simplex_point(rng, sys_.s) for _ in range(spec["T"])]
        return build_matrices(simulate(sys_, u, spec["x0"], w))
    if src == "csv":
        mats = {k: _csv_block(cfg, spec[k]) for k in ("U0", "X0", "X1", "W0")}
    else:
        mats = {k: spec[k] for k in ("U0", "X0", "X1", "W0", "XW") if k in spec}
    for k, v in mats.items():
        if np.asarray(v, dtype=float).size == 0:
            raise ConfigError(f"data matrix {k} is empty")
    return DataMatrices(**mats)


# ---- output helpers ---------------------------------------------------------

def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


@contextlib.contextmanager
def _trace(args, out: Path):
    if args.verbose:
        with open(out / "solver_trace.jsonl", "w") as fh:
            yield fh
    else:
        yield None


def _summary(out: Path, lines) -> None:
    text = "\n".join(lines) + "\n"
    (out / "summary.txt").write_text(text)
    sys.stderr.write(text)


def _lam(cfg) -> float:
    lam = float(cfg["lam"])
    if not 0.0 <= lam < 1.0:
        raise ConfigError(f"lam must lie in [0, 1), got {lam}")
    return lam


def _tol(args, cfg, default):
    if args.tol is not None:
        return args.tol
    return cfg.get("tol", default)


def _check_closed_loop(cl, cset, lam, tol):
    if isinstance(cset, PolyhedralCSet):
        rep = verify_poly_contractive(cl, cset, lam, tol=tol)
        return rep.ok, rep.worst_gauge - lam, rep
    rep = verify_ellip_contractive(cl, cset, lam, tol=tol)
    return rep.ok, rep.worst_eig, rep


# ---- commands -------------------------------------------------------------

def cmd_simulate(cfg, args) -> int:
    out = _outdir(args)
    try:
        system = build_system(cfg)
        cset = build_set(cfg) if "set" in cfg else None
        gains = build_gains(cfg) if "gains" in cfg else None
    except (LPVError, ValueError) as e:
        raise ConfigError(str(e)) from None
    horizon = cfg["horizon"]
    seed = cfg["seed"]
    lam = float(cfg.get("lam", 1.0))
    if "initial_states" in cfg:
        x0s = [np.asarray(x, dtype=float) for x in cfg["initial_states"]]
    else:
        if cset is None:
            raise ConfigError("boundary_samples needs a set")
        rng = np.random.default_rng([seed, 0])
        x0s = [boundary_point(cset, rng.standard_normal(system.n)) for _ in range(cfg["boundary_samples"])]
    if gains is not None:
        policy = gains
    elif "inputs" in cfg:
        policy = np.asarray(cfg["inputs"], dtype=float)
    else:
        policy = np.zeros((horizon, system.m))
    runs = []
    try:
        for k, x0 in enumerate(x0s):
            rng = np.random.default_rng([seed, 1, k])
            sched = [simplex_point(rng, system.s) for _ in range(horizon)]
            traj = simulate(system, policy, x0, sched)
            if not np.all(np.isfinite(traj.states)):
                raise SimulationError(f"run {k}: state became non-finite")
            io.write_trajectory_csv(out / f"trajectory_{k}.csv", traj)
            if cset is not None:
                runs.append([gauge(cset, x) for x in traj.states])
    except (LPVError, ValueError) as e:
        raise SimulationError(str(e)) from None
    if cset is not None:
        io.write_gauge_csv(out / "gauge.csv", runs, lam)
    _summary(out, [f"simulated {len(x0s)} run(s) of {horizon} steps"])
    return EXIT_OK


def _synthesize(cfg, args, trace) -> tuple:
    """Returns (certificate, plant or None)."""
    cset = build_set(cfg)
    lam = _lam(cfg)
    Uset = build_input_set(cfg)
    tol = _tol(args, cfg, LP_TOL)
    mode = cfg.get("mode", "data" if "data" in cfg else "model")
    plant = build_system(cfg) if "system" in cfg else None
    if mode == "model":
        if plant is None:
            raise ConfigError("model-based synthesis needs a system")
        if isinstance(cset, PolyhedralCSet):
            gains, P1s = synth_poly_model(plant, cset, lam, Uset, tol=tol, trace=trace)
            kind = "poly_model_constrained" if Uset is not None else "poly_model"
            return SynthesisCertificate(kind, lam, gains, P1s=P1s,
                                        closed_loop=tuple(closed_loop_vertices(plant, gains))), plant
        if Uset is not None:
            raise ConfigError("input constraints are only supported for polyhedral sets")
        gains = synth_ellip_model(plant, cset, lam, trace=trace)
        return SynthesisCertificate("ellip_model", lam, gains,
                                    closed_loop=tuple(closed_loop_vertices(plant, gains))), plant
    if "data" not in cfg:
        raise ConfigError("data-based synthesis needs a data section")
    D = build_data(cfg, system=plant)
    if isinstance(cset, PolyhedralCSet):
        return synth_poly_data(D, cset, lam, Uset, tol=tol, trace=trace), plant
    if Uset is not None:
        raise ConfigError("input constraints are only supported for polyhedral sets")
    return synth_ellip_data(D, cset, lam, trace=trace), plant


def cmd_synth(cfg, args) -> int:
    out = _outdir(args)
    lines = []
    with _trace(args, out) as trace:
        try:
            cert, plant = _synthesize(cfg, args, trace)
        except (ConfigError, SetError):
            raise
        except InfeasibleError as e:
            _summary(out, ["status: infeasible", f"lam: {cfg['lam']}", str(e)])
            return EXIT_FAIL
        except RankConditionError as e:
            _summary(out, ["status: insufficient data", str(e)])
            return EXIT_FAIL
        except NumericalFailure as e:
            _summary(out, ["status: numerical failure", str(e)])
            return EXIT_NUMERIC
        except (LPVError, ValueError) as e:
            raise ConfigError(str(e)) from None
    cset = build_set(cfg)
    vtol = LAMBDA_SLACK if isinstance(cset, PolyhedralCSet) else LMI_MARGIN
    ok, margin, _ = _check_closed_loop(cert.closed_loop, cset, cert.lam, vtol)
    lines += [f"status: {'feasible' if ok else 'failed re-verification'}", f"lam: {cert.lam}",
              f"kind: {cert.kind}", f"certificate check margin: {margin:.3e}"]
    if plant is not None and plant.n == cert.gains.n and plant.s == cert.gains.s:
        pok, pmargin, _ = _check_closed_loop(closed_loop_vertices(plant, cert.gains), cset, cert.lam, vtol)
        lines.append(f"plant check margin: {pmargin:.3e} ({'ok' if pok else 'violated'})")
        ok = ok and pok
    Uset = build_input_set(cfg)
    if Uset is not None:
        inp = verify_input_constraint(cert.gains, cset, Uset, tol=vtol)
        lines.append(f"worst input ratio: {inp.worst:.6f} ({'ok' if inp.ok else 'violated'})")
        ok = ok and inp.ok
    lines.append("gains K_1s: " + json.dumps(cert.gains.stacked.tolist()))
    io.write_json(out / "certificate.json", io.certificate_to_dict(cert))
    if isinstance(cset, PolyhedralCSet):
        io.write_vertices_csv(out / "set_vertices.csv", vertices(cset))
    _summary(out, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg, args) -> int:
    out = _outdir(args)
    try:
        system = build_system(cfg)
        gains = build_gains(cfg)
        cset = build_set(cfg)
        lam = _lam(cfg)
        Uset = build_input_set(cfg)
        cl = closed_loop_vertices(system, gains)
    except RankConditionError as e:
        _summary(out, ["status: cannot identify system", str(e)])
        return EXIT_FAIL
    except (LPVError, ValueError) as e:
        raise ConfigError(str(e)) from None
    tol = _tol(args, cfg, 1e-9)
    ok, margin, rep = _check_closed_loop(cl, cset, lam, tol)
    report = {"contractive": io.report_to_dict(rep), "min_contraction_level": min_contraction_level(cl, cset)}
    lines = [f"vertex check at lam={lam}: {'ok' if ok else 'violated'} (margin {margin:.3e})",
             f"minimal contraction level: {report['min_contraction_level']:.6f}"]
    if Uset is not None:
        if not isinstance(cset, PolyhedralCSet):
            raise ConfigError("input constraint check needs a polyhedral set")
        inp = verify_input_constraint(gains, cset, Uset, tol=tol)
        report["input"] = io.report_to_dict(inp)
        lines.append(f"input check: {'ok' if inp.ok else 'violated'} (worst ratio {inp.worst:.6f})")
        ok = ok and inp.ok
    if "monte_carlo" in cfg:
        mc = cfg["monte_carlo"]
        mrep = monte_carlo_verify(system, gains, cset, lam, mc["trials"], mc["horizon"], cfg["seed"])
        report["monte_carlo"] = io.report_to_dict(mrep)
        lines.append(f"monte carlo: {mrep.passes}/{mrep.trials} passed (worst ratio {mrep.worst_ratio:.6f})")
        ok = ok and mrep.ok
    report["ok"] = ok
    io.write_json(out / "report.json", report)
    if isinstance(cset, PolyhedralCSet):
        io.write_vertices_csv(out / "set_vertices.csv", vertices(cset))
    _summary(out, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_identify(cfg, args) -> int:
    out = _outdir(args)
    try:
        D = build_data(cfg)
    except (LPVError, ValueError) as e:
        raise ConfigError(str(e)) from None
    pe = check_pe(D)
    diag = {"T": D.T, "rank": pe.rank, "rows": pe.rows, "required_T": pe.required_T,
            "full_row_rank": pe.full_row_rank, "min_singular_value": pe.min_singular_value}
    try:
        model = identify(D, tol=_tol(args, cfg, 1e-8))
    except RankConditionError as e:
        io.write_json(out / "report.json", {"ok": False, "pe": diag, "message": str(e)})
        _summary(out, [str(e)])
        return EXIT_FAIL
    except ValueError as e:
        io.write_json(out / "report.json", {"ok": False, "pe": diag, "message": str(e)})
        _summary(out, [str(e)])
        return EXIT_FAIL
    result = io.system_to_dict(model)
    result["residual"] = data_residual(D, model)
    result["pe"] = diag
    io.write_json(out / "system.json", result)
    _summary(out, [f"identified {model.s}-vertex model (n={model.n}, m={model.m}) from T={D.T} samples",
                   f"data residual: {result['residual']:.3e}"])
    return EXIT_OK


# ---- demos ------------------------------------------------------------------

def _table(out: Path, title: str, checks) -> bool:
    lines = [title]
    for name, ok, detail in checks:
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    allok = all(ok for _, ok, _ in checks)
    lines.append(f"{sum(ok for _, ok, _ in checks)}/{len(checks)} checks passed")
    _summary(out, lines)
    return allok


def _closed_loop_runs(out, system, gains, cset, lam, x0s, horizon, seed, Uset=None):
    """Simulate from each ``x0``; write CSVs; return (all decay ok, all inputs ok, worst ratio)."""
    runs, decay_ok, input_ok, worst = [], True, True, 0.0
    for k, x0 in enumerate(x0s):
        rng = np.random.default_rng([seed, 1, k])
        traj = simulate(system, gains, x0, [simplex_point(rng, system.s) for _ in range(horizon)])
        io.write_trajectory_csv(out / f"trajectory_{k}.csv", traj)
        runs.append([gauge(cset, x) for x in traj.states])
        rep = verify_trajectory(traj, cset, lam)
        decay_ok &= rep.ok
        worst = max(worst, rep.max_ratio)
        if Uset is not None:
            input_ok &= all(Uset.contains(u) for u in traj.inputs)
    io.write_gauge_csv(out / "gauge.csv", runs, lam)
    return decay_ok, input_ok, worst


def demo_sec5(args) -> int:
    out = _outdir(args)
    system, S = bm.sec5_system(), bm.safe_set()
    D = bm.sec5_data()
    checks = []
    R = bm.sec5_fixture()
    err = max(np.abs(R.X0 - D.X0).max(), np.abs(R.X1 - D.X1).max(), np.abs(R.XW - D.XW).max())
    checks.append(("data regenerated from the plant", err <= 5e-3, f"max deviation {err:.2e}"))
    pe = check_pe(D)
    checks.append(("PE condition fails", not pe.satisfied,
                   f"T={D.T} < {pe.required_T} samples needed (rank {pe.rank}/{pe.rows})"))
    a2 = check_assumption2(D)
    checks.append(("XW full row rank with T >= ns+1", a2.satisfied, f"rank {a2.rank}/{a2.rows}, T={D.T}"))
    try:
        identify(D)
        checks.append(("identification refused", False, "identify accepted non-PE data"))
    except RankConditionError as e:
        checks.append(("identification refused", True, str(e).split(":")[0]))
    lam = bm.SEC5_LAMBDA
    io.write_csv(out / "data_U0.csv", ["u_1"], D.U0.T.tolist())
    io.write_csv(out / "data_X0.csv", ["x_1", "x_2"], D.X0.T.tolist())
    io.write_csv(out / "data_X1.csv", ["x_1", "x_2"], D.X1.T.tolist())
    io.write_csv(out / "data_W0.csv", ["w_1", "w_2"], D.W0.T.tolist())
    io.write_vertices_csv(out / "set_vertices.csv", vertices(S))
    try:
        printed = synth_poly_data(D, S, lam, tol=args.tol or LP_TOL)
        rep = verify_poly_contractive(printed.closed_loop, S, lam)
        checks.append(("synthesis on the printed record at lam=0.95", rep.ok,
                       f"worst gauge {rep.worst_gauge:.4f}"))
    except (InfeasibleError, NumericalFailure) as e:
        checks.append(("synthesis on the printed record at lam=0.95", False, str(e)))
    F = bm.sec5_fixture()
    try:
        cert = synth_poly_data(F, S, lam, tol=args.tol or LP_TOL)
        io.write_json(out / "certificate.json", io.certificate_to_dict(cert))
        rep = verify_poly_contractive(closed_loop_vertices(system, cert.gains), S, lam)
        checks.append(("synthesis on the regenerated record at lam=0.95", rep.ok,
                       f"plant worst gauge {rep.worst_gauge:.4f}"))
        res = np.abs(F.X1 @ cert.G - (system.stacked + system.B @ cert.gains.stacked)).max()
        checks.append(("X1 G matches A + B K", res <= 1e-8, f"residual {res:.1e}"))
        ok, _, worst = _closed_loop_runs(out, system, cert.gains, S, lam, list(vertices(S)), 30, args.seed or 0)
        checks.append(("closed-loop gauge decay from set vertices", ok, f"worst ratio {worst:.4f}"))
    except (InfeasibleError, NumericalFailure) as e:
        checks.append(("synthesis on the regenerated record at lam=0.95", False, str(e)))
    K = bm.sec5_gains()
    cl = closed_loop_vertices(system, K)
    rep = verify_poly_contractive(cl, S, lam)
    checks.append(("reference gain contractive at lam=0.95", rep.ok, f"worst gauge {rep.worst_gauge:.4f}"))
    lstar = min_contraction_level(cl, S)
    checks.append(("reference gain contraction level ~0.94", abs(lstar - 0.94) <= 0.01, f"{lstar:.6f}"))
    return EXIT_OK if _table(out, "sec5 checks", checks) else EXIT_FAIL


def demo_sec6(args) -> int:
    out = _outdir(args)
    seed = 0 if args.seed is None else args.seed
    system, S, Uset = bm.sec6_system(), bm.safe_set(), bm.sec6_input_set()
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, (bm.SEC6_T, 1))
    w = [simplex_point(rng, 2) for _ in range(bm.SEC6_T)]
    D = build_matrices(simulate(system, u, boundary_point(S, [1.0, 1.0]), w))
    io.write_json(out / "data.json", io.data_to_dict(D))
    io.write_vertices_csv(out / "set_vertices.csv", vertices(S))
    checks = [("XW full row rank with T >= ns+1", check_assumption2(D).satisfied, f"T={D.T}")]
    lam = bm.SEC6_LAMBDA
    try:
        synth_poly_data(D, S, lam, Uset)
        checks.append((f"constrained synthesis at lam={lam}", True, "feasible"))
    except InfeasibleError:
        floor, _ = bisect_lambda(lambda l: synth_poly_model(system, S, l), 0.5, 0.999, 1e-4)
        checks.append((f"constrained synthesis at lam={lam}", False,
                       f"infeasible; even the model-based LP needs lam >= {floor:.4f}"))
    lam_run = 0.95
    try:
        cert = synth_poly_data(D, S, lam_run, Uset)
        io.write_json(out / "certificate.json", io.certificate_to_dict(cert))
        res = np.abs(D.X1 @ cert.G - (system.stacked + system.B @ cert.gains.stacked)).max()
        checks.append((f"constrained synthesis at lam={lam_run}", True,
                       f"gains {np.round(cert.gains.stacked, 4).tolist()}"))
        checks.append(("X1 G matches A + B K", res <= 1e-8, f"residual {res:.1e}"))
        brng = np.random.default_rng([seed, 0])
        x0s = [boundary_point(S, brng.standard_normal(2)) for _ in range(20)]
        dok, iok, worst = _closed_loop_runs(out, system, cert.gains, S, lam_run, x0s, 50, seed, Uset)
        checks.append((f"gauge decay <= {lam_run} per step (20 runs x 50 steps)", dok, f"worst ratio {worst:.4f}"))
        checks.append(("inputs within [-8, 8]", iok, "all samples"))
    except (InfeasibleError, NumericalFailure) as e:
        checks.append((f"constrained synthesis at lam={lam_run}", False, str(e)))
    for name, K in (("reference model gain", bm.sec6_model_gains()), ("reference data gain", bm.sec6_data_gains())):
        lstar = min_contraction_level(closed_loop_vertices(system, K), S)
        checks.append((f"{name} contractive at lam={lam}", lstar <= lam + 1e-6, f"contraction level {lstar:.6f}"))
    return EXIT_OK if _table(out, "sec6 checks", checks) else EXIT_FAIL


# ---- entry point ------------------------------------------------------------

COMMANDS = {"simulate": cmd_simulate, "synth": cmd_synth, "verify": cmd_verify, "identify": cmd_identify}
DEMOS = {"sec5": demo_sec5, "sec6": demo_sec6}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="lpvsafe_out", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--verbose", action="store_true", help="write solver traces to solver_trace.jsonl")
    common.add_argument("--tol", type=float, default=None, help="override solver/verification tolerance")
    p = argparse.ArgumentParser(prog="lpvsafe", description="Safe gain-scheduling control from data.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--config", required=True, help="JSON config file")
    dp = sub.add_parser("demo", parents=[common])
    dp.add_argument("name")
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        if args.command == "demo":
            if args.name not in DEMOS:
                _log(f"unknown demo {args.name!r}; choose from {sorted(DEMOS)}")
                return EXIT_CONFIG
            return DEMOS[args.name](args)
        cfg = load_config(args.config)
        if cfg["task"] != args.command:
            raise ConfigError(f"config task is {cfg['task']!r}, command is {args.command!r}")
        if args.seed is not None:
            cfg["seed"] = args.seed
        return COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        _log(f"config error: {e}")
        return EXIT_CONFIG
    except SetError as e:
        _log(f"config error: {e}")
        return EXIT_CONFIG
    except SimulationError as e:
        _log(f"simulation error: {e}")
        return EXIT_SIM
    except NumericalFailure as e:
        _log(f"numerical failure: {e}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
