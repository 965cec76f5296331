"""Command-line front end.

Subcommands: ``simulate``, ``solve``, ``phase``, ``mtta``, ``percolation``,
``pcf``.  Parameters come from an optional TOML config file with command-line
flags taking precedence; every command echoes its resolved configuration into
the output directory, writes delimited output plus summary JSON, renders
figures alongside (disable with ``--no-figures``), and exits nonzero with a
machine-readable failure list when any requested computation did not
converge or was censored.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from planar_sis import __version__
from planar_sis.geometry import ModelParams, TorusDomain
from planar_sis import simulator, statistics, percolation, polynomials, phase
from planar_sis import functional

JOBS_ENV = "PLANAR_SIS_JOBS"


# -- small IO helpers ---------------------------------------------------------

def _atomic_write(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_json(path, obj):
    def default(o):
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (np.floating,)):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(f"not JSON serializable: {type(o)}")
    _atomic_write(path, json.dumps(obj, indent=2, default=default,
                                   allow_nan=True) + "\n")


def write_csv(path, fieldnames, rows):
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    os.replace(tmp, path)


def _echo_config(outdir, args, command):
    resolved = {k: v for k, v in sorted(vars(args).items())
                if k not in ("func",) and not k.startswith("_")}
    resolved["command"] = command
    resolved["version"] = __version__
    write_json(os.path.join(outdir, "resolved-config.json"), resolved)


def _finish(outdir, failures):
    if failures:
        write_json(os.path.join(outdir, "failures.json"), {"failures": failures})
        print(f"FAILURES ({len(failures)}): see {outdir}/failures.json",
              file=sys.stderr)
        return 1
    return 0


def _jobs(args):
    if args.jobs is not None:
        return max(1, args.jobs)
    return max(1, int(os.environ.get(JOBS_ENV, "1")))


def _params_from(args) -> ModelParams:
    if getattr(args, "mu", None) is not None and args.a is None:
        return ModelParams.from_mu(alpha=args.alpha, beta=args.beta,
                                   gamma=args.gamma, mu=args.mu,
                                   lam=args.lambda_)
    return ModelParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma,
                       lam=args.lambda_, a=args.a)


# -- simulate -----------------------------------------------------------------

def _run_one_replication(payload):
    (seed, alpha, beta, gamma, lam, a, L, t_max, warmup, snapshot_interval,
     initial, collect_snaps, collect_soj) = payload
    params = ModelParams(alpha=alpha, beta=beta, gamma=gamma, lam=lam, a=a)
    cfg = simulator.SimConfig(
        params=params, dom=TorusDomain(L), seed=seed, t_max=t_max,
        warmup=warmup, snapshot_interval=snapshot_interval,
        initial_condition=initial, collect_snapshots=collect_snaps,
        collect_sojourns=collect_soj)
    return simulator.run(cfg)


def cmd_simulate(args):
    os.makedirs(args.out, exist_ok=True)
    _echo_config(args.out, args, "simulate")
    failures = []
    params = _params_from(args)
    initial = args.initial if args.initial in (simulator.ALL_INFECTED,
                                               simulator.SINGLE_INFECTED) \
        else float(args.initial)
    seeds = simulator.replication_seeds(args.seed, args.reps)
    payloads = [(s, params.alpha, params.beta, params.gamma, params.lam,
                 params.a, args.L, args.t_max, args.warmup,
                 args.snapshot_interval, initial, True, args.sojourns)
                for s in seeds]
    jobs = _jobs(args)
    if jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one_replication, payloads))
    else:
        results = [_run_one_replication(p) for p in payloads]

    p_means = [r.p_mean for r in results]
    summary = results[0].summary()
    summary["seed"] = args.seed
    summary["replications"] = args.reps
    summary["p_mean"] = float(np.mean(p_means))
    summary["p_stderr"] = (float(np.std(p_means, ddof=1) / math.sqrt(len(p_means)))
                           if len(p_means) > 1 else results[0].p_stderr)
    summary["p_per_replication"] = p_means
    write_json(os.path.join(args.out, "run-summary.json"), summary)

    snap_rows = []
    for rep_idx, res in enumerate(results):
        for t, pos, state in res.snapshots:
            for i in range(len(pos)):
                snap_rows.append({"t": t, "id": i, "x": pos[i, 0],
                                  "y": pos[i, 1], "state": int(state[i]),
                                  "rep": rep_idx})
        if res.absorbed and res.t_absorb is not None \
                and res.t_absorb < args.warmup:
            failures.append({"kind": "absorbed_before_warmup",
                             "replication": rep_idx, "t_absorb": res.t_absorb})
    write_csv(os.path.join(args.out, "snapshots.csv"),
              ["t", "id", "x", "y", "state", "rep"], snap_rows)

    # PCF over the pooled snapshots of the first replication
    res0 = results[0]
    if res0.snapshots:
        bw = args.bin_width if args.bin_width else params.a / 20.0
        pcf = statistics.estimate_pcf(res0.snapshots, TorusDomain(args.L),
                                      bin_width=bw, r_max=5.0 * params.a)
        write_csv(os.path.join(args.out, "pcf.csv"),
                  ["r_lo", "r_hi", "xi_psiphi", "xi_phiphi", "xi_psipsi",
                   "counts"], pcf.to_rows())
        if not args.no_figures:
            from planar_sis import plots
            plots.plot_pcf(pcf, os.path.join(args.out, "pcf.png"), a=params.a)
    if not args.no_figures:
        from planar_sis import plots
        plots.plot_timeseries(res0.times, res0.infected_fraction,
                              os.path.join(args.out, "timeseries.png"),
                              title=f"seed {args.seed}, p = {summary['p_mean']:.4f}")
    print(f"p_mean = {summary['p_mean']:.4f} +- {summary['p_stderr']:.4f} "
          f"({args.reps} replication(s))")
    return _finish(args.out, failures)


# -- solve --------------------------------------------------------------------

def cmd_solve(args):
    from planar_sis.closures import registered_names

    if args.method == "poly":
        known = polynomials.MOTION_SPECS if args.case == "motion" \
            else polynomials.NO_MOTION_SPECS
    else:
        known = registered_names()
    if args.spec not in known:
        print(f"error: unknown spec {args.spec!r} for {args.case}/{args.method}; "
              f"registered codes: {', '.join(sorted(known))}", file=sys.stderr)
        raise SystemExit(2)
    os.makedirs(args.out, exist_ok=True)
    _echo_config(args.out, args, "solve")
    failures = []
    mu = args.mu if args.mu is not None else args.lambda_ * math.pi * args.a ** 2
    out = {"spec": args.spec, "method": args.method, "case": args.case,
           "params": {"mu": mu, "alpha": args.alpha, "beta": args.beta,
                      "gamma": args.gamma, "lambda": args.lambda_, "a": args.a}}

    if args.method == "poly":
        if args.case == "motion":
            sol = polynomials.solve_motion_poly(args.spec, mu=mu,
                                                beta=args.beta,
                                                gamma=args.gamma,
                                                alpha=args.alpha)
        else:
            sol = polynomials.solve_no_motion_poly(
                args.spec, mu=mu, beta=args.beta, alpha=args.alpha,
                c=args.c, q=args.q)
        out.update(sol.as_dict())
        if sol.branch == polynomials.UNRESOLVED:
            failures.append({"kind": "unresolved_solve", "spec": args.spec})
        print(f"{args.spec} ({args.case}, poly): p = {sol.p:.6g} "
              f"[{sol.branch}]")
    else:
        a = args.a if args.a is not None else math.sqrt(mu / (args.lambda_ * math.pi))
        params = ModelParams(alpha=args.alpha, beta=args.beta,
                             gamma=args.gamma, lam=args.lambda_, a=a)
        grid = functional.GridConfig()
        if args.case == "motion":
            rep = functional.solve_motion(args.spec, params, grid)
        else:
            if args.c is not None:
                rep = functional.solve_no_motion(args.spec, params, c=args.c,
                                                 q=args.q, grid=grid)
            else:
                ca = percolation.cluster_constants(params.lam, params.a)
                rep = functional.solve_no_motion(args.spec, params,
                                                 c=ca.c_radial(), q=ca.q,
                                                 grid=grid)
        out.update({"p": rep.p, "p_tilde": rep.p_tilde, "w": rep.w,
                    "v": rep.v, "z": rep.z, "converged": rep.converged,
                    "iterations": rep.iterations, "residual": rep.residual,
                    "degenerate": rep.degenerate})
        rows = []
        t = rep.pcf
        for k, r in enumerate(t.xi_psi_phi.radii):
            rows.append({"r_lo": k * t.xi_psi_phi.h,
                         "r_hi": (k + 1) * t.xi_psi_phi.h,
                         "xi_psiphi": t.xi_psi_phi.values[k],
                         "xi_phiphi": t.xi_phi_phi.values[k],
                         "xi_psipsi": t.xi_psi_psi.values[k],
                         "counts": 0})
        write_csv(os.path.join(args.out, "pcf.csv"),
                  ["r_lo", "r_hi", "xi_psiphi", "xi_phiphi", "xi_psipsi",
                   "counts"], rows)
        if not rep.converged and not rep.degenerate:
            failures.append({"kind": "non_converged_solve", "spec": args.spec,
                             "residual": rep.residual})
        if not args.no_figures:
            from planar_sis import plots
            plots.plot_solver_pcf(rep.pcf, os.path.join(args.out, "pcf.png"),
                                  a=params.a,
                                  title=f"{args.spec} ({args.case}), p = {rep.p:.4f}")
        print(f"{args.spec} ({args.case}, functional): p = {rep.p:.6g} "
              f"converged={rep.converged}")
    write_json(os.path.join(args.out, "solution.json"), out)
    return _finish(args.out, failures)


# -- phase --------------------------------------------------------------------

def _parse_range(text):
    parts = [float(x) for x in text.split(":")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("range must be start:stop:step")
    start, stop, step = parts
    n = int(round((stop - start) / step)) + 1
    return [start + k * step for k in range(n) if start + k * step <= stop + 1e-12]


def cmd_phase(args):
    os.makedirs(args.out, exist_ok=True)
    _echo_config(args.out, args, "phase")
    failures = []
    if args.mode == "classify":
        pt = phase.classify(args.spec, args.mu, args.beta, args.alpha)
        write_json(os.path.join(args.out, "classification.json"), pt.to_row())
        print(f"({args.mu}, {args.beta}) -> {pt.region.upper()}"
              + (f"  gamma_c = ({pt.gamma_minus:.6g}, {pt.gamma_plus:.6g})"
                 if pt.gamma_minus is not None else ""))
        return _finish(args.out, failures)

    betas = _parse_range(args.beta_range) if args.beta_range else None
    mus = _parse_range(args.mu_range) if args.mu_range else \
        ([args.mu] if args.mu is not None else None)
    if mus is None or (betas is None):
        raise SystemExit("phase sweep needs --mu (or --mu-range) and --beta-range")

    points = phase.sweep(args.spec, mus, betas, args.alpha)
    write_csv(os.path.join(args.out, "phase.csv"),
              ["mu", "beta", "region", "boolean_supercritical",
               "gamma_minus", "gamma_plus"], [pt.to_row() for pt in points])
    # critical-motion-rate curves over beta at the first mu
    mu0 = mus[0]
    curve_rows_p, curve_rows_m = [], []
    gms, gps = [], []
    for b in betas:
        gm = gp = None
        if 0 < b < args.alpha * mu0:
            gm, gp = phase.gamma_c(args.spec, mu0, b, args.alpha)
        gms.append(np.nan if gm is None else gm)
        gps.append(np.nan if gp is None else gp)
        if gp is not None:
            curve_rows_p.append({"beta": b, "gamma": gp})
            curve_rows_m.append({"beta": b, "gamma": gm})
    write_csv(os.path.join(args.out, "gamma_plus.csv"), ["beta", "gamma"],
              curve_rows_p)
    write_csv(os.path.join(args.out, "gamma_minus.csv"), ["beta", "gamma"],
              curve_rows_m)
    if args.gamma_range:
        rows = [{"gamma": g,
                 "beta_c": phase.beta_c(args.spec, mu0, g, args.alpha)["beta_c"]}
                for g in _parse_range(args.gamma_range)]
        write_csv(os.path.join(args.out, "beta_c.csv"), ["gamma", "beta_c"],
                  rows)
    if not args.no_figures:
        from planar_sis import plots
        plots.plot_gamma_curves(betas, gms, gps,
                                os.path.join(args.out, "gamma_curves.png"),
                                title=f"{args.spec}, mu = {mu0}")
        if len(mus) > 1:
            plots.plot_phase_grid(points,
                                  os.path.join(args.out, "phase.png"),
                                  title=args.spec)
    print(f"classified {len(points)} points; curves over beta at mu = {mu0}")
    return _finish(args.out, failures)


# -- mtta ---------------------------------------------------------------------

def _run_one_extinction(payload):
    (seed, alpha, beta, gamma, lam, a, L, cap) = payload
    params = ModelParams(alpha=alpha, beta=beta, gamma=gamma, lam=lam, a=a)
    cfg = simulator.SimConfig(params=params, dom=TorusDomain(L), seed=seed,
                              t_max=cap, warmup=0.0, collect_snapshots=False)
    res = simulator.run_until_extinction(cfg, cap=cap)
    return res


def cmd_mtta(args):
    os.makedirs(args.out, exist_ok=True)
    _echo_config(args.out, args, "mtta")
    failures = []
    values = [float(v) for v in args.values.split(",")]
    jobs = _jobs(args)
    records = []
    for v in values:
        gamma = v if args.sweep == "gamma" else args.gamma
        beta = v if args.sweep == "beta" else args.beta
        L = v if args.sweep == "L" else args.L
        lam, a = args.lambda_, args.a
        if args.mu is not None and a is None:
            a = math.sqrt(args.mu / (lam * math.pi))
        payloads = [(s, args.alpha, beta, gamma, lam, a, L, args.cap)
                    for s in simulator.replication_seeds(args.seed, args.reps)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_run_one_extinction, payloads))
        else:
            results = [_run_one_extinction(p) for p in payloads]
        rec = statistics.mtta_record(v, L, results)
        records.append(rec)
        if rec.all_censored:
            failures.append({"kind": "all_censored", "param": v})
        print(f"{args.sweep} = {v}: MTTA = {rec.mean:.4g} "
              f"[{rec.ci95_low:.4g}, {rec.ci95_high:.4g}] "
              f"(n={rec.n}, censored={rec.censored_n})")
    write_csv(os.path.join(args.out, "mtta.csv"),
              ["param", "L", "mean", "ci_lo", "ci_hi", "n", "censored_n"],
              [r.to_row() for r in records])
    if not args.no_figures:
        from planar_sis import plots
        plots.plot_mtta(records, os.path.join(args.out, "mtta.png"),
                        xlabel=args.sweep, logx=args.sweep == "gamma")
    return _finish(args.out, failures)


# -- percolation --------------------------------------------------------------

def cmd_percolation(args):
    os.makedirs(args.out, exist_ok=True)
    _echo_config(args.out, args, "percolation")
    failures = []
    lam, a = args.lambda_, args.a
    if args.mu is not None and a is None:
        a = math.sqrt(args.mu / (lam * math.pi))
    ca = percolation.cluster_constants(lam, a)
    out = {"mu_tilde": ca.mu_tilde, "q": ca.q,
           "c": ca.c if math.isfinite(ca.c) else None}
    if args.empirical_L:
        q_sim = percolation.empirical_q(lam, a, TorusDomain(args.empirical_L),
                                        seed=args.seed,
                                        n_samples=args.empirical_samples)
        out["q_empirical"] = q_sim
        print(f"q = {ca.q:.6f}, empirical q = {q_sim:.4f}")
    else:
        print(f"q = {ca.q:.6f}, c = {ca.c:.6f}" if ca.defined
              else "subcritical: q = 0")
    write_json(os.path.join(args.out, "percolation.json"), out)
    if ca.pi is not None:
        rows = [{"r": r, "pi": v} for r, v in zip(ca.pi.radii, ca.pi.values)]
        write_csv(os.path.join(args.out, "pi.csv"), ["r", "pi"], rows)
        if not args.no_figures:
            from planar_sis import plots
            plots.plot_pi_profile(ca.pi, os.path.join(args.out, "pi.png"),
                                  a=a, q=ca.q)
    return _finish(args.out, failures)


# -- pcf ----------------------------------------------------------------------

def cmd_pcf(args):
    os.makedirs(args.out, exist_ok=True)
    _echo_config(args.out, args, "pcf")
    failures = []
    snaps = {}
    with open(args.snapshots) as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            key = (row.get("rep", "0"), row["t"])
            snaps.setdefault(key, []).append(
                (float(row["x"]), float(row["y"]), int(row["state"])))
    snapshots = []
    for (rep, t), entries in sorted(snaps.items()):
        arr = np.array([(x, y) for x, y, _ in entries])
        states = np.array([s for _, _, s in entries], dtype=np.uint8)
        snapshots.append((float(t), arr, states))
    bw = args.bin_width if args.bin_width else args.a / 20.0
    r_max = args.r_max if args.r_max else 5.0 * args.a
    pcf = statistics.estimate_pcf(snapshots, TorusDomain(args.L),
                                  bin_width=bw, r_max=r_max)
    write_csv(os.path.join(args.out, "pcf.csv"),
              ["r_lo", "r_hi", "xi_psiphi", "xi_phiphi", "xi_psipsi",
               "counts"], pcf.to_rows())
    if not pcf.cross_available:
        failures.append({"kind": "cross_pcf_unavailable"})
    if not args.no_figures:
        from planar_sis import plots
        plots.plot_pcf(pcf, os.path.join(args.out, "pcf.png"), a=args.a)
    print(f"estimated PCFs from {pcf.n_snapshots} snapshot(s); "
          f"w plateau = {statistics.w_plateau(pcf, args.a):.4f}")
    return _finish(args.out, failures)


# -- parser -------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--config", default=None, help="TOML config file")
    p.add_argument("--jobs", type=int, default=None,
                   help=f"parallel workers (default ${JOBS_ENV} or 1)")
    p.add_argument("--no-figures", action="store_true",
                   help="skip figure rendering")
    p.add_argument("--seed", type=int, default=1)


def _add_model(p, gamma_default=0.0):
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=gamma_default)
    p.add_argument("--lambda", dest="lambda_", type=float, default=1.0)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--mu", type=float, default=None,
                   help="mean degree; sets a when --a is absent")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="planar-sis",
        description="SIS epidemics on planar Poisson point processes: "
                    "simulation, moment-closure solvers, phase diagrams.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="event-driven simulation runs")
    _add_common(p)
    _add_model(p)
    p.add_argument("--L", type=float, default=40.0)
    p.add_argument("--t-max", dest="t_max", type=float, default=100.0)
    p.add_argument("--warmup", type=float, default=None)
    p.add_argument("--snapshot-interval", dest="snapshot_interval",
                   type=float, default=None)
    p.add_argument("--initial", default=simulator.ALL_INFECTED,
                   help="all_infected | single_infected | fraction in [0,1]")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--sojourns", action="store_true",
                   help="collect susceptible-sojourn durations")
    p.add_argument("--bin-width", dest="bin_width", type=float, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("solve", help="closure-system solutions")
    _add_common(p)
    _add_model(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--method", choices=["poly", "functional"], default="poly")
    p.add_argument("--case", choices=["motion", "no-motion"], default="motion")
    p.add_argument("--c", type=float, default=None,
                   help="cluster PCF plateau override (no-motion)")
    p.add_argument("--q", type=float, default=None,
                   help="infinite-cluster probability override (no-motion)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("phase", help="phase diagram and critical values")
    _add_common(p)
    p.add_argument("mode", nargs="?", choices=["sweep", "classify"],
                   default="sweep")
    p.add_argument("--spec", default="m2bi", choices=list(phase.PHASE_SPECS))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--mu-range", dest="mu_range", default=None,
                   help="start:stop:step")
    p.add_argument("--beta-range", dest="beta_range", default=None,
                   help="start:stop:step")
    p.add_argument("--gamma-range", dest="gamma_range", default=None,
                   help="start:stop:step; also export the beta_c(gamma) curve")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("mtta", help="mean time till absorption sweeps")
    _add_common(p)
    _add_model(p)
    p.add_argument("--L", type=float, default=20.0)
    p.add_argument("--sweep", choices=["gamma", "beta", "L"], default="gamma")
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--cap", type=float, default=simulator.DEFAULT_EXTINCTION_CAP)
    p.set_defaults(func=cmd_mtta)

    p = sub.add_parser("percolation", help="Boolean-cluster quantities")
    _add_common(p)
    p.add_argument("--lambda", dest="lambda_", type=float, default=1.0)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--empirical-L", dest="empirical_L", type=float,
                   default=None, help="torus side for the union-find estimate")
    p.add_argument("--empirical-samples", dest="empirical_samples", type=int,
                   default=1)
    p.set_defaults(func=cmd_percolation)

    p = sub.add_parser("pcf", help="pair correlation functions from snapshots")
    _add_common(p)
    p.add_argument("--snapshots", required=True, help="snapshot CSV path")
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--bin-width", dest="bin_width", type=float, default=None)
    p.add_argument("--r-max", dest="r_max", type=float, default=None)
    p.set_defaults(func=cmd_pcf)
    return ap


def _apply_config_file(args, parser):
    """Fill args from the TOML config for options still at their defaults."""
    if not getattr(args, "config", None):
        return args
    with open(args.config, "rb") as fh:
        data = tomllib.load(fh)
    section = data.get(args.command, data)
    defaults = {}
    for action in parser._actions:
        if action.dest not in (None, "help"):
            defaults[action.dest] = action.default
    for key, value in section.items():
        dest = key.replace("-", "_")
        if dest == "lambda":
            dest = "lambda_"
        if hasattr(args, dest) and getattr(args, dest) == defaults.get(dest):
            setattr(args, dest, value)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub_parser = None
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            sub_parser = action.choices[args.command]
    args = _apply_config_file(args, sub_parser)
    if getattr(args, "a", None) is None and getattr(args, "mu", None) is None \
            and args.command in ("simulate", "mtta", "percolation"):
        parser.error("--a or --mu is required")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
