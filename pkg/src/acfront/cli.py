"""Command-line interface.

Exit codes: 0 success / verdict pass, 1 verdict fail, 2 usage or input
error, 3 numerical failure (divergence, pinning, overflow and kin).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional

import numpy as np

from . import flow, harness, phase, sim
from .core import BistableNonlinearity, PhaseSequence
from .errors import AcFrontError, NumericalError, VerificationFailed
from .wave import adjoint_solve, compute_d, load_wave, mfde_residual, solve_r, solve_wave


def _solved_wave(a: float, L: float, h: float):
    w = solve_wave(BistableNonlinearity(a=a), L=L, h=h)
    adjoint_solve(w)
    compute_d(w)
    solve_r(w)
    return w


def _cmd_wave(args) -> int:
    from .wave import save_wave

    w = _solved_wave(args.a, args.L, args.h)
    res = float(np.max(np.abs(mfde_residual(w))))
    print(f"a={args.a:g} c={w.c:.12g} d={w.d:.12g} sup-residual={res:.3e}")
    if args.out:
        save_wave(w, args.out)
        print(f"profile written to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = harness.parse_config(fh.read())
    spec = harness.spec_from_config(cfg)
    w = _solved_wave(spec.a, spec.L, spec.h)
    sim_cfg = sim.SimConfig(w.f, dt=spec.dt, t_end=spec.t_end,
                            record_every=spec.record_every, width=spec.width,
                            height=spec.height, boundary_j=spec.boundary_j)
    u0 = harness.make_initial(spec, w)
    writer = sim.SnapshotWriter(args.out)
    snaps = sim.run(u0, sim_cfg, writer=writer)
    print(f"{len(snaps)} snapshots written to {args.out} "
          f"(index {writer.index_path})")
    return 0


def _cmd_phase(args) -> int:
    t, u = sim.load_snapshot(args.snapshot)
    w = load_wave(args.wave)
    g = phase.extract(u, w)
    defined = int(np.count_nonzero(g.defined_mask))
    print(f"t={t:g} defined_rows={defined}/{u.height}")
    if defined >= 2:
        print(f"flatness={phase.flatness(g):.6g}")
    if g.all_defined:
        print(f"front_error={phase.front_error(u, w, g):.6g}")
    if args.out:
        phase.phase_series_to_csv([(t, g)], args.out)
        print(f"phase written to {args.out}")
    return 0


def _cmd_heat(args) -> int:
    if args.report == "bessel":
        report = flow.bessel_bounds_report([1.0, 5.0, 20.0, 100.0])
        ok = (report["all_order_monotone"] and report["single_sign_change"]
              and report["max_telescope_error"] < 1e-10)
        print(f"order_monotone={report['all_order_monotone']} "
              f"single_sign_change={report['single_sign_change']} "
              f"telescope_error={report['max_telescope_error']:.3e}")
    else:
        height = 2048
        jj = np.arange(height)
        noise = 0.5 * (2.0 * harness.splitmix64_uniform(2, height) - 1.0)
        h0 = PhaseSequence(np.where(jj < height // 2, 0.0, 4.0) + noise,
                           boundary_j="reflect")
        report = flow.decay_report(h0, np.geomspace(10.0, 1000.0, 13))
        ok = (abs(report["slope_first"] + 0.5) <= 0.1
              and abs(report["slope_second"] + 1.0) <= 0.1
              and report["monotone_bound_holds"])
        print(f"slope_first={report['slope_first']:.3f} "
              f"slope_second={report['slope_second']:.3f} "
              f"monotone_bound={report['monotone_bound_holds']}")
    if args.out:
        flow.report_to_ndjson(report, args.out)
        print(f"report written to {args.out}")
    return 0 if ok else 1


def _read_gamma_csv(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = [h.strip().lower() for h in rows[0]]
    if "gamma" in header:
        col = header.index("gamma")
        body = rows[1:]
    elif _is_float_row(rows[0], 0):
        col = 0
        body = rows
    else:
        col = 0
        body = rows[1:]
    return np.array([float(r[col]) for r in body if r and r[col].strip() != ""])


def _is_float_row(row, col) -> bool:
    try:
        float(row[col])
        return True
    except (ValueError, IndexError):
        return False


def _cmd_mcf(args) -> int:
    gamma0 = PhaseSequence(_read_gamma_csv(args.init), boundary_j=args.boundary)
    if args.wave:
        w = load_wave(args.wave)
        c, d = w.c, w.d
        if d is None:
            print("wave file lacks d; pass --c/--d explicitly", file=sys.stderr)
            return 2
    elif args.c is not None and args.d is not None:
        c, d = args.c, args.d
    else:
        print("mcf needs either --wave or both --c and --d", file=sys.stderr)
        return 2
    params = flow.FlowParams(c=c, d=d)
    traj = flow.mcf_solve(gamma0, params,
                          t_grid=np.linspace(0.0, args.t_end, args.samples),
                          delta=args.delta)
    flow.trajectory_to_csv(traj, args.out)
    print(f"trajectory ({len(traj)} times) written to {args.out}")
    return 0


def _cmd_verify_subsuper(args) -> int:
    w = _solved_wave(args.a, 20.0, 0.0625)
    cfg = sim.SimConfig(w.f, t_end=args.t_end, height=64)
    t_grid = np.linspace(0.0, args.t_end, args.t_samples)
    if args.kind == "planar":
        seed_spec = sim.SuperSubSpec(kind="planar", q0=args.q0, q1=args.q1,
                                     mu=1.0, C=1.0)
        try:
            mu, C, report = sim.search_planar_constants(w, seed_spec, cfg, t_grid)
        except VerificationFailed as exc:
            print(f"verdict=fail ({exc})")
            return 1
        print(f"verdict=pass mu={mu:g} C={C:g} "
              f"min_super={report['min_residual_super']:.3e} "
              f"max_sub={report['max_residual_sub']:.3e}")
        return 0
    P = 64
    j = np.arange(P)
    V0 = PhaseSequence(args.v_amplitude * np.sin(2.0 * np.pi * j / P))
    spec = sim.SuperSubSpec(kind="curved", V0=V0)
    report = sim.verify_supersub(spec, w, cfg, t_grid, width=128)
    print(f"verdict={report['verdict']} "
          f"min_super={report['min_residual_super']:.3e} "
          f"max_sub={report['max_residual_sub']:.3e} "
          f"site_super={report['site_super']} site_sub={report['site_sub']}")
    return 0 if report["verdict"] == "pass" else 1


def _cmd_experiment(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = harness.parse_config(fh.read())
        spec = harness.spec_from_config(cfg, name=args.name
                                        if "name" not in cfg else None)
    else:
        spec = harness.default_spec(args.name)
    report = harness.run_experiment(spec)
    for key, v in report.verdicts.items():
        print(f"{key}: value={v['value']:.6g} tolerance={v['tolerance']:g} "
              f"{'pass' if v['pass'] else 'FAIL'}")
    if report.mu_hat is not None:
        print(f"mu_hat={report.mu_hat:.6g} mu_pred={report.mu_pred:.6g}")
    if args.out:
        report.to_ndjson(args.out)
        print(f"report written to {args.out}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acfront",
        description="travelling fronts of the lattice Allen-Cahn equation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wave", help="solve the travelling-wave profile")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--L", type=float, default=20.0)
    p.add_argument("--h", type=float, default=0.0625)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_wave)

    p = sub.add_parser("simulate", help="run a simulation from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="acfront_snapshots")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("phase", help="extract the phase of a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--wave", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_phase)

    p = sub.add_parser("heat", help="heat-kernel diagnostic reports")
    p.add_argument("--report", choices=["decay", "bessel"], required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_heat)

    p = sub.add_parser("mcf", help="run the discrete curvature flow")
    p.add_argument("--init", required=True, help="CSV with a gamma column")
    p.add_argument("--wave", default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--t-end", type=float, default=50.0)
    p.add_argument("--samples", type=int, default=51)
    p.add_argument("--boundary", choices=["periodic", "reflect"], default="periodic")
    p.add_argument("--delta", type=float, default=0.1,
                   help="flatness guard for the curvature-flow regime")
    p.add_argument("--out", default="mcf_trajectory.csv")
    p.set_defaults(func=_cmd_mcf)

    p = sub.add_parser("verify-subsuper", help="verify a super/sub-solution pair")
    p.add_argument("--kind", choices=["planar", "curved"], required=True)
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--q0", type=float, default=0.1)
    p.add_argument("--q1", type=float, default=0.1)
    p.add_argument("--t-end", type=float, default=50.0)
    p.add_argument("--t-samples", type=int, default=26)
    p.add_argument("--v-amplitude", type=float, default=1.0)
    p.set_defaults(func=_cmd_verify_subsuper)

    p = sub.add_parser("experiment", help="run a named experiment pipeline")
    p.add_argument("name", choices=["thm22", "thm23", "thm24", "step"])
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except AcFrontError as exc:
        print(f"verdict failure: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
