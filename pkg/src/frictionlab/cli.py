"""Command-line interface binding the simulators, oracles and experiments.

Exit codes: 0 on success/pass, 1 on run failure or failed verdicts, 2 on
usage errors.  Randomized subcommands take ``--seed``; without it a seed is
generated and printed so every run is reproducible.  ``FRICTIONLAB_OUTDIR``
sets the default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys

import numpy as np

from . import oracle as orc
from . import sde
from .glue import ConePoint, VERTEX
from .harness import ExperimentConfig, run_experiment
from .limitproc import simulate_limit_1d, simulate_limit_cone
from .profiles import PROFILES, make_profile, validate_profile, with_constant_drift
from .scale import ProjectedScale, ScaleEvaluator

__all__ = ["main", "build_parser"]


def _out_dir(args) -> str:
    if getattr(args, "out_dir", None):
        return args.out_dir
    return os.environ.get("FRICTIONLAB_OUTDIR", ".")


def _resolve_seed(args) -> int:
    if args.seed is None:
        seed = secrets.randbelow(2**31)
        print(f"seed: {seed}")
        return seed
    return args.seed


def _profile_from(args):
    params = json.loads(args.profile_params) if getattr(args, "profile_params", None) else {}
    profile = make_profile(args.profile, **params)
    drift = getattr(args, "drift", None)
    if drift:
        profile = with_constant_drift(profile, float(drift))
    return profile


def _add_common(p, seed=True, paths=False):
    p.add_argument("--profile", default="quadratic", choices=sorted(PROFILES),
                   help="built-in friction profile")
    p.add_argument("--profile-params", default=None,
                   help="JSON object of profile factory parameters")
    p.add_argument("--eps", type=str, default="0.1",
                   help="regularization level(s), comma separated")
    if seed:
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (generated and printed when omitted)")
    if paths:
        p.add_argument("--paths", type=int, default=10_000, help="number of Monte Carlo paths")
    p.add_argument("--dt", type=float, default=None, help="time step (scheme default when omitted)")
    p.add_argument("--workers", type=int, default=None, help="cap on simulation threads")
    p.add_argument("--out-dir", default=None, help="output directory (default $FRICTIONLAB_OUTDIR or .)")


def _eps_list(args):
    return [float(tok) for tok in str(args.eps).split(",") if tok]


def _apply_workers(args):
    if getattr(args, "workers", None):
        import numba

        numba.set_num_threads(max(1, args.workers))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="frictionlab",
        description="Monte Carlo laboratory for diffusions with vanishing friction",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate one path and dump it to CSV")
    _add_common(p)
    p.add_argument("--model", choices=("1d", "2d"), default="1d")
    p.add_argument("--q0", type=float, default=0.0, help="start position (y0 for the 2-d model)")
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--scheme", choices=("natural_scale", "euler"), default="natural_scale")
    p.add_argument("--drift", type=float, default=None, help="constant drift value (1-d only)")
    p.add_argument("--thin", type=int, default=1, help="keep every k-th sample")
    p.add_argument("--out", default="path.csv")

    p = sub.add_parser("exit-stats", help="first-exit Monte Carlo summary vs oracle")
    _add_common(p, paths=True)
    p.add_argument("--q0", type=float, default=0.0)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--scheme", choices=("natural_scale", "euler"), default="natural_scale")

    p = sub.add_parser("oracle", help="print an oracle quantity as JSON")
    _add_common(p, seed=False)
    p.add_argument("quantity", choices=(
        "exit-prob", "exit-time", "laplace", "mixing-bounds", "schedule", "resolvent"))
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=None)
    p.add_argument("--lam", type=float, default=1.0, help="Laplace/resolvent parameter")
    p.add_argument("--mode", type=int, default=0, help="angular mode number (resolvent)")
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--delta-prime", type=float, default=0.02)
    p.add_argument("--delta2", type=float, default=0.1)
    p.add_argument("--M", type=int, default=5)
    p.add_argument("--drift", type=float, default=None)

    p = sub.add_parser("mixing", help="angular uniformity experiment at an eps")
    _add_common(p, paths=True)
    p.add_argument("--q0", type=float, default=0.0, help="start height y0")
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=None, help="exit level (schedule value when omitted)")
    p.add_argument("--bins", type=int, default=16)
    p.add_argument("--strict", action="store_true", help="tighten verdicts to 4 sigma")

    p = sub.add_parser("limit-sim", help="simulate the limiting glued process")
    _add_common(p)
    p.add_argument("--model", choices=("1d", "cone"), default="1d")
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--theta0", type=float, default=None)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--out", default="limit_path.csv")

    p = sub.add_parser("converge", help="eps-ladder weak-convergence trend experiment")
    _add_common(p, paths=True)
    p.add_argument("--q0", type=float, default=0.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--with-limit", action="store_true",
                   help="also compare the smallest eps against the limit sampler")

    p = sub.add_parser("report", help="run an experiment described by a config file")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--paths", type=int, default=None, help="override n_paths")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("validate-profile", help="check profile hypotheses on a grid")
    p.add_argument("--profile", default="quadratic", choices=sorted(PROFILES))
    p.add_argument("--profile-params", default=None)
    p.add_argument("--grid-n", type=int, default=10_000)

    p = sub.add_parser("scale-dump", help="dump (q, u_eps, v_eps) tables to CSV")
    _add_common(p, seed=False)
    p.add_argument("--n", type=int, default=1001)
    p.add_argument("--out", default="scale.csv")
    return ap


def _cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    profile = _profile_from(args)
    eps = _eps_list(args)[0]
    if args.model == "1d":
        rec = sde.simulate_path_1d(profile, eps, args.q0, args.T, dt=args.dt,
                                   scheme=args.scheme, seed=seed)
        rows = np.column_stack([rec.times, rec.states])
        header = "t,q"
    else:
        rec = sde.simulate_path_2d(profile, eps, args.theta0, args.q0, args.T,
                                   dt=args.dt, scheme=args.scheme, seed=seed)
        rows = np.column_stack([rec.times, rec.states[:, 0], rec.states[:, 1], rec.clock])
        header = "t,theta,y,clock"
    rows = rows[:: max(1, args.thin)]
    np.savetxt(args.out, rows, delimiter=",", header=header, comments="")
    print(f"wrote {len(rows)} samples to {args.out}"
          + (f" (stopped at {rec.boundary})" if rec.stopped else ""))
    return 0


def _cmd_exit_stats(args) -> int:
    seed = _resolve_seed(args)
    _apply_workers(args)
    profile = _profile_from(args)
    eps = _eps_list(args)[0]
    sample = sde.exit_sample_1d(profile, eps, args.q0, args.lo, args.hi,
                                args.paths, dt=args.dt, scheme=args.scheme, seed=seed)
    ev = ScaleEvaluator(profile, eps)
    out = {
        "seed": seed,
        "p_upper_mc": sample.p_upper,
        "p_upper_oracle": orc.exit_probability(ev, args.q0, args.lo, args.hi),
        "mean_exit_time_mc": float(np.mean(sample.times)),
        "mean_exit_time_oracle": orc.expected_exit_time(ev, args.q0, args.lo, args.hi),
        "paths": args.paths,
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_oracle(args) -> int:
    profile = _profile_from(args)
    eps = _eps_list(args)[0]
    lo = args.lo if args.lo is not None else profile.q_min
    hi = args.hi if args.hi is not None else profile.q_max
    if args.quantity in ("exit-prob", "exit-time", "laplace"):
        ev = ScaleEvaluator(profile, eps)
        if args.quantity == "exit-prob":
            out = {"exit_probability": orc.exit_probability(ev, args.q, lo, hi)}
        elif args.quantity == "exit-time":
            out = {"expected_exit_time": orc.expected_exit_time(ev, args.q, lo, hi)}
        else:
            out = {"laplace_exit_time": orc.laplace_exit_time(ev, args.lam, args.q, lo, hi)}
    elif args.quantity == "mixing-bounds":
        ps = ProjectedScale(profile)
        mb = orc.mixing_bounds(ps, eps, args.delta, args.delta_prime, args.delta2, args.M)
        out = {"p_alpha": mb.p_alpha, "p_beta": mb.p_beta, "p_count": mb.p_count,
               "omega": mb.omega, "rho": mb.rho}
    elif args.quantity == "schedule":
        ps = ProjectedScale(profile)
        s = orc.schedule(ps, eps, enforce=False)
        out = {"M": s.M, "delta": s.delta, "delta_prime": s.delta_prime,
               "delta2": s.delta2,
               "constraint_324": [s.lhs_324, s.rhs_324, s.ok_324],
               "constraint_325": [s.lhs_325, s.rhs_325, s.ok_325]}
    else:  # resolvent
        ps = ProjectedScale(profile)
        sol = orc.resolvent_mode_solve(ps, args.mode, args.lam, lambda y: y if args.mode else 1.0)
        out = {"mode": args.mode, "lam": args.lam,
               "residual_norm": sol.residual_norm,
               "max_abs_g": float(np.max(np.abs(sol.values)))}
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_mixing(args) -> int:
    seed = _resolve_seed(args)
    cfg = ExperimentConfig(
        kind="mixing_uniformity", seed=seed, profile=args.profile,
        profile_params=json.loads(args.profile_params) if args.profile_params else {},
        eps=_eps_list(args), n_paths=args.paths, dt=args.dt, q0=args.q0,
        theta0=args.theta0, delta=args.delta, bins=args.bins, strict=args.strict,
        workers=args.workers, out_dir=_out_dir(args),
    )
    report = run_experiment(cfg)
    print(report.to_json())
    return 0 if report.passed else 1


def _cmd_limit_sim(args) -> int:
    seed = _resolve_seed(args)
    profile = _profile_from(args)
    ps = ProjectedScale(profile)
    dt = args.dt if args.dt is not None else 1e-3
    if args.model == "1d":
        rec = simulate_limit_1d(ps, args.y0, args.T, dt=dt, seed=seed)
        rows = np.column_stack([rec.times, rec.ys])
        header = "t,y"
    else:
        p0 = VERTEX if args.theta0 is None and args.y0 == 0.0 else ConePoint(args.theta0 or 0.0, args.y0)
        rec = simulate_limit_cone(ps, p0, args.T, dt=dt, seed=seed)
        rows = np.column_stack([rec.times, rec.thetas, rec.ys])
        header = "t,theta,y"
    rows = rows[:: max(1, args.thin)]
    np.savetxt(args.out, rows, delimiter=",", header=header, comments="")
    print(f"wrote {len(rows)} samples to {args.out}"
          + (f" (stopped at {rec.boundary})" if rec.stopped else ""))
    return 0


def _cmd_converge(args) -> int:
    seed = _resolve_seed(args)
    eps = _eps_list(args)
    cfg = ExperimentConfig(
        kind="eps_convergence", seed=seed, profile=args.profile,
        profile_params=json.loads(args.profile_params) if args.profile_params else {},
        eps=eps, n_paths=args.paths, dt=args.dt, q0=args.q0, T=args.T,
        workers=args.workers, out_dir=_out_dir(args),
    )
    report = run_experiment(cfg)
    print(report.to_json())
    ok = report.passed
    if args.with_limit:
        cfg2 = ExperimentConfig(
            kind="limit_vs_eps", seed=seed + 1, profile=args.profile,
            eps=[min(eps)], n_paths=args.paths, dt=args.dt, q0=args.q0, T=args.T,
            workers=args.workers,
            out_dir=os.path.join(_out_dir(args), "limit_vs_eps"),
        )
        report2 = run_experiment(cfg2)
        print(report2.to_json())
        ok = ok and report2.passed
    return 0 if ok else 1


def _cmd_report(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.paths is not None:
        cfg.n_paths = args.paths
    if args.out_dir is not None:
        cfg.out_dir = args.out_dir
    if args.workers is not None:
        cfg.workers = args.workers
    if cfg.out_dir is None:
        cfg.out_dir = os.environ.get("FRICTIONLAB_OUTDIR", ".")
    report = run_experiment(cfg)
    print(report.to_json())
    return 0 if report.passed else 1


def _cmd_validate_profile(args) -> int:
    params = json.loads(args.profile_params) if args.profile_params else {}
    profile = make_profile(args.profile, **params)
    rep = validate_profile(profile, args.grid_n)
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    return 0 if rep.all_passed else 1


def _cmd_scale_dump(args) -> int:
    profile = _profile_from(args)
    eps = _eps_list(args)[0]
    ev = ScaleEvaluator(profile, eps)
    ev0 = ScaleEvaluator(profile, 0.0)
    q = np.linspace(profile.q_min, profile.q_max, args.n)
    rows = np.column_stack([q, ev.u(q), ev.v(q), ev0.u(q)])
    np.savetxt(args.out, rows, delimiter=",", header="q,u_eps,v_eps,u_0", comments="")
    print(f"wrote {args.n} rows to {args.out}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "exit-stats": _cmd_exit_stats,
    "oracle": _cmd_oracle,
    "mixing": _cmd_mixing,
    "limit-sim": _cmd_limit_sim,
    "converge": _cmd_converge,
    "report": _cmd_report,
    "validate-profile": _cmd_validate_profile,
    "scale-dump": _cmd_scale_dump,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
