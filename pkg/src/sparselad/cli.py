"""Command-line interface.

Subcommands: solve, sweep, murange, maxp, ric, mnist. Shared flags:
--seed, --out DIR, --preset {paper,desk}, --config FILE. The config file
holds ``key = value`` lines whose keys mirror SolverConfig / SweepSpec
fields (mu, tau, inner_budget, max_outer, eps_inner, eps_outer, sparsity,
m, n, trials, ...); explicit command-line flags win over config values.

Exit codes: 0 success, 1 input error (bad arguments, unreadable files),
2 internal error.
"""

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import bench, mnistio, probgen, ripdiag, stepsize
from .solvers import SOLVERS, SolverConfig

_SOLVER_CFG_KEYS = {"mu", "tau", "inner_budget", "max_outer", "eps_inner",
                    "eps_outer", "sparsity"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; spec wants 1
        self.exit(1, f"{self.prog}: error: {message}\n")


class InputError(Exception):
    pass


def _parse_scalar(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def read_config(path):
    """key = value lines; '#' starts a comment; values parse as JSON scalars
    or comma lists."""
    cfg = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if "," in value:
            cfg[key] = [_parse_scalar(v.strip()) for v in value.split(",")]
        else:
            cfg[key] = _parse_scalar(value)
    return cfg


def _grid(text):
    """Comma list '0.05,0.1' or inclusive range 'start:step:stop'."""
    if ":" in text:
        start, step, stop = (float(v) for v in text.split(":"))
        if step <= 0:
            raise InputError(f"grid step must be positive in {text!r}")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(n)]
    return [float(v) for v in text.split(",")]


def _int_grid(text):
    return [int(v) for v in text.split(",")]


def _merge(args, config, key, default):
    """Priority: explicit flag > config file > default."""
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _solver_config(args, config, sparsity):
    kw = {}
    for key in _SOLVER_CFG_KEYS:
        val = _merge(args, config, key, None)
        if val is not None:
            kw[key] = val
    kw.setdefault("sparsity", sparsity)
    return SolverConfig(**kw)


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _preset(args, config):
    name = _merge(args, config, "preset", "desk")
    if name not in bench.PRESETS:
        raise InputError(f"unknown preset {name!r}")
    return dict(bench.PRESETS[name])


def cmd_solve(args, config):
    out = _outdir(args)
    if args.problem:
        problem = probgen.load_problem(args.problem)
    else:
        preset = _preset(args, config)
        spec = probgen.ProblemSpec(
            m=_merge(args, config, "m", preset["m"]),
            n=_merge(args, config, "n", preset["n"]),
            s=_merge(args, config, "s", 5),
            signal_kind=_merge(args, config, "signal_kind", probgen.GAUSSIAN),
            outlier_kind=_merge(args, config, "outlier_kind", probgen.GAUSSIAN),
            outlier_scale=_merge(args, config, "outlier_scale", 10.0),
            p=_merge(args, config, "p", 0.1),
            seed=args.seed,
        )
        if spec.p == 0:
            spec = probgen.ProblemSpec(**{**asdict(spec), "outlier_kind": probgen.NONE})
        problem = probgen.generate(spec)
    cfg = _solver_config(args, config, problem.spec.s)
    trace_path = out / f"{args.solver}_trace.jsonl"
    result, outcome = bench.run_single(problem, args.solver, cfg, trace_path=trace_path)
    print(f"solver={args.solver} m={problem.spec.m} n={problem.spec.n} s={problem.spec.s} "
          f"p={problem.spec.p} seed={problem.spec.seed}")
    print(f"rel_err={outcome.rel_err:.6e} success={outcome.success} snr_db={outcome.snr_db:.2f} "
          f"outer_iters={result.outer_iters} terminated_by={result.terminated_by} "
          f"wall_time_s={outcome.wall_time_s:.3f}")
    print(f"trace: {trace_path}")
    return 0


def cmd_sweep(args, config):
    out = _outdir(args)
    preset = _preset(args, config)
    spec = bench.SweepSpec(
        m=_merge(args, config, "m", preset["m"]),
        n=_merge(args, config, "n", preset["n"]),
        signal_kind=_merge(args, config, "signal_kind", probgen.GAUSSIAN),
        outlier_kind=_merge(args, config, "outlier_kind", probgen.GAUSSIAN),
        outlier_scale=_merge(args, config, "outlier_scale", 10.0),
        p_grid=tuple(_merge(args, config, "p_grid", [0.1])),
        s_grid=tuple(_merge(args, config, "s_grid", [5])),
        mu_grid=tuple(_merge(args, config, "mu_grid", [6.0])),
        L_grid=tuple(_merge(args, config, "L_grid", [10])),
        tau_grid=tuple(_merge(args, config, "tau_grid", [0.5])),
        solvers=tuple(_merge(args, config, "solvers", ["gfhtp1", "fhtp1"])),
        trials=_merge(args, config, "trials", preset["trials"]),
        base_seed=args.seed,
    )
    report = bench.run_sweep(spec, workers=args.workers)
    sweep_csv, trials_csv = out / "sweep.csv", out / "trials.csv"
    bench.write_sweep_csv(report, sweep_csv)
    bench.write_trials_csv(report, trials_csv)
    for row in report.rows:
        print(f"p={row.p:<5g} s={row.s:<3d} mu={row.mu:<4g} L={row.L:<3d} tau={row.tau:<4g} "
              f"{row.solver:7s} SR={row.success_rate:.2f} mean_rel_err={row.mean_rel_err:.3e} "
              f"mean_time={row.mean_wall_time_s:.3f}s trials={row.trials} errors={row.errors}")
    print(f"wrote {sweep_csv} and {trials_csv}")
    return 0


def cmd_murange(args, config):
    params = stepsize.FeasibilityParams(
        tau=args.tau, p=args.p,
        epsilon=_merge(args, config, "epsilon", 1e-3),
        delta=_merge(args, config, "delta", 0.01),
        t1_ratio=_merge(args, config, "t1_ratio", 1e-3),
        lam=_merge(args, config, "lam", 1.0),
        variant=args.variant,
    )
    interval = stepsize.feasible_mu_range(params)
    if interval.feasible:
        print(f"variant={args.variant} tau={args.tau} p={args.p}: "
              f"feasible mu in ({interval.lo:.4f}, {interval.hi:.4f})")
    else:
        print(f"variant={args.variant} tau={args.tau} p={args.p}: infeasible (no mu)")
    if not params.in_quantile_window():
        print("note: (tau, p) lies outside the quantile-robustness window p < tau < 1-p")
    return 0


def cmd_maxp(args, config):
    out = _outdir(args)
    grid = stepsize.max_p_grid(
        _grid(args.tau_grid), _grid(args.p_grid),
        epsilon=_merge(args, config, "epsilon", 1e-3),
        delta=_merge(args, config, "delta", 0.01),
        t1_ratio=_merge(args, config, "t1_ratio", 1e-3),
        lam=_merge(args, config, "lam", 1.0),
        variant=args.variant,
    )
    path = out / f"maxp_{args.variant}.csv"
    grid.write_csv(path)
    for tau, best in grid.max_p.items():
        print(f"tau={tau:g}: max feasible p = {'-' if best is None else f'{best:g}'}")
    print(f"wrote {path}")
    return 0


def cmd_ric(args, config):
    out = _outdir(args)
    preset = _preset(args, config)
    m = _merge(args, config, "m", preset["m"])
    n = _merge(args, config, "n", preset["n"])
    spec = probgen.ProblemSpec(m=m, n=n, s=max(args.s, 1), outlier_kind=probgen.NONE,
                               p=0.0, seed=args.seed)
    A = probgen.generate(spec).A
    est = ripdiag.estimate_ric1(A, s=args.s, samples=args.samples, seed=args.seed,
                                mode=args.mode)
    report = {
        "m": m, "n": n, "s": est.s, "samples": est.samples, "seed": args.seed,
        "mode": args.mode, "rng": probgen.RNG_NAME,
        "delta_hat_lower_bound": est.delta_hat,
        "worst_support": [int(i) for i in est.worst_support],
        "worst_direction": [float(v) for v in est.worst_direction],
    }
    path = out / "ric.json"
    path.write_text(json.dumps(report, indent=2))
    print(f"delta_{args.s} >= {est.delta_hat:.6f} (Monte-Carlo lower bound, "
          f"{est.samples} samples)")
    print(f"wrote {path}")
    return 0


def cmd_mnist(args, config):
    out = _outdir(args)
    try:
        images = mnistio.load_idx_images(args.idx)
    except FileNotFoundError as exc:
        raise InputError(f"IDX file not found: {args.idx}") from exc
    indices = _int_grid(args.images)
    solvers = _merge(args, config, "solvers", ["psgd", "fhtp1", "gfhtp1"])
    cfg_proto = _solver_config(args, config, None)
    rows = bench.run_mnist(images, indices, m=args.m, p=args.p, sigma=args.sigma,
                           solver_names=list(solvers), cfg=cfg_proto, seed=args.seed)
    path = out / "mnist.csv"
    bench.write_mnist_csv(rows, path)
    for r in rows:
        print(f"image={r.image_index:<4d} s={r.s:<4d} {r.solver:7s} "
              f"snr_db={r.snr_db:8.2f} rel_err={r.rel_err:.3e} time={r.wall_time_s:.3f}s")
    print(f"wrote {path}")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    common.add_argument("--out", default=".", help="output directory (default .)")
    common.add_argument("--preset", choices=sorted(bench.PRESETS), default=None,
                        help="problem-scale preset: paper (m=1000, n=5000, 100 trials) "
                             "or desk (m=200, n=1000, 20 trials); default desk")
    common.add_argument("--config", default=None, help="key=value config file")

    solver_opts = argparse.ArgumentParser(add_help=False)
    solver_opts.add_argument("--mu", type=float, default=None)
    solver_opts.add_argument("--tau", type=float, default=None)
    solver_opts.add_argument("--inner-budget", dest="inner_budget", type=int, default=None)
    solver_opts.add_argument("--max-outer", dest="max_outer", type=int, default=None)
    solver_opts.add_argument("--eps-inner", dest="eps_inner", type=float, default=None)
    solver_opts.add_argument("--eps-outer", dest="eps_outer", type=float, default=None)
    solver_opts.add_argument("--sparsity", type=int, default=None)

    parser = _Parser(prog="sparselad",
                     description="Outlier-robust sparse recovery benchmarks (LAD pursuit)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", parents=[common, solver_opts],
                             help="generate (or load) one problem and run one solver")
    p_solve.add_argument("--solver", choices=sorted(SOLVERS), default="gfhtp1")
    p_solve.add_argument("--problem", default=None, help="saved problem container to load")
    p_solve.add_argument("--m", type=int, default=None)
    p_solve.add_argument("--n", type=int, default=None)
    p_solve.add_argument("--s", type=int, default=None)
    p_solve.add_argument("--signal-kind", dest="signal_kind",
                         choices=[probgen.GAUSSIAN, probgen.FLAT], default=None)
    p_solve.add_argument("--outlier-kind", dest="outlier_kind",
                         choices=[probgen.GAUSSIAN, probgen.UNIFORM, probgen.NONE], default=None)
    p_solve.add_argument("--outlier-scale", dest="outlier_scale", type=float, default=None)
    p_solve.add_argument("--p", type=float, default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", parents=[common, solver_opts],
                             help="grid sweep over (p, s, mu, L, tau) x solvers")
    p_sweep.add_argument("--m", type=int, default=None)
    p_sweep.add_argument("--n", type=int, default=None)
    p_sweep.add_argument("--signal-kind", dest="signal_kind",
                         choices=[probgen.GAUSSIAN, probgen.FLAT], default=None)
    p_sweep.add_argument("--outlier-kind", dest="outlier_kind",
                         choices=[probgen.GAUSSIAN, probgen.UNIFORM, probgen.NONE], default=None)
    p_sweep.add_argument("--outlier-scale", dest="outlier_scale", type=float, default=None)
    p_sweep.add_argument("--p-grid", dest="p_grid", type=_grid, default=None)
    p_sweep.add_argument("--s-grid", dest="s_grid", type=_int_grid, default=None)
    p_sweep.add_argument("--mu-grid", dest="mu_grid", type=_grid, default=None)
    p_sweep.add_argument("--L-grid", dest="L_grid", type=_int_grid, default=None)
    p_sweep.add_argument("--tau-grid", dest="tau_grid", type=_grid, default=None)
    p_sweep.add_argument("--solvers", type=lambda s: s.split(","), default=None)
    p_sweep.add_argument("--trials", type=int, default=None)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_mu = sub.add_parser("murange", parents=[common],
                          help="feasible step-size interval for (tau, p)")
    p_mu.add_argument("--variant", choices=[stepsize.GENERAL, stepsize.FLAT],
                      default=stepsize.GENERAL)
    p_mu.add_argument("--tau", type=float, required=True)
    p_mu.add_argument("--p", type=float, required=True)
    p_mu.add_argument("--epsilon", type=float, default=None)
    p_mu.add_argument("--delta", type=float, default=None)
    p_mu.add_argument("--t1-ratio", dest="t1_ratio", type=float, default=None)
    p_mu.add_argument("--lam", type=float, default=None)
    p_mu.set_defaults(func=cmd_murange)

    p_maxp = sub.add_parser("maxp", parents=[common],
                            help="max feasible outlier fraction over a (tau, p) grid")
    p_maxp.add_argument("--variant", choices=[stepsize.GENERAL, stepsize.FLAT],
                        default=stepsize.GENERAL)
    p_maxp.add_argument("--tau-grid", dest="tau_grid", default="0.1:0.05:0.7",
                        help="comma list or start:step:stop (default 0.1:0.05:0.7)")
    p_maxp.add_argument("--p-grid", dest="p_grid", default="0.001:0.001:0.499")
    p_maxp.add_argument("--epsilon", type=float, default=None)
    p_maxp.add_argument("--delta", type=float, default=None)
    p_maxp.add_argument("--t1-ratio", dest="t1_ratio", type=float, default=None)
    p_maxp.add_argument("--lam", type=float, default=None)
    p_maxp.set_defaults(func=cmd_maxp)

    p_ric = sub.add_parser("ric", parents=[common],
                           help="Monte-Carlo lower bound on the RIC of a seeded matrix")
    p_ric.add_argument("--m", type=int, default=None)
    p_ric.add_argument("--n", type=int, default=None)
    p_ric.add_argument("--s", type=int, default=5)
    p_ric.add_argument("--samples", type=int, default=10000)
    p_ric.add_argument("--mode", choices=[ripdiag.GAUSSIAN_DIRECTIONS,
                                          ripdiag.VERTEX_DIRECTIONS],
                       default=ripdiag.GAUSSIAN_DIRECTIONS)
    p_ric.set_defaults(func=cmd_ric)

    p_mnist = sub.add_parser("mnist", parents=[common, solver_opts],
                             help="image-recovery protocol on an IDX file")
    p_mnist.add_argument("--idx", required=True, help="path to IDX image file")
    p_mnist.add_argument("--images", default="0,1,2,3,4,5,6,7,8,9",
                         help="comma list of image indices")
    p_mnist.add_argument("--m", type=int, default=700)
    p_mnist.add_argument("--p", type=float, default=0.1)
    p_mnist.add_argument("--sigma", type=float, default=10.0)
    p_mnist.set_defaults(func=cmd_mnist)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = read_config(args.config) if getattr(args, "config", None) else {}
        return args.func(args, config)
    except (InputError, FileNotFoundError, mnistio.IdxFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
