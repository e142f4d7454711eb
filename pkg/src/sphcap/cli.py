"""Command-line front end: sample / fibonacci / hull / metrics / predict /
constants / experiment, with versioned CSV/JSON outputs.

Exit codes: 0 success, 1 usage error, 2 runtime or numeric error (the latter
emits a machine-readable error JSON on stderr).  All randomness flows through
--seed/--trial; outputs are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import tempfile
from functools import lru_cache

import numpy as np

from . import __version__, constants, metrics, oracle, sampling
from .hull import DegenerateInputError, convex_hull, hull_volume_signed
from .montecarlo import ExperimentConfig, run

FORMAT_VERSION = 1


class _Parser(argparse.ArgumentParser):
    # usage problems are exit code 1 (argparse defaults to 2, which we reserve
    # for numeric/domain failures)
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


@lru_cache(maxsize=1)
def build_id() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=here, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"sphcap-{__version__}+g{out.stdout.strip()}"
    except OSError:
        pass
    return f"sphcap-{__version__}"


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if out:
        _write_atomic(out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- statistics tokens

def parse_stat_token(token: str) -> tuple[str, float | None, int | None]:
    """moment_p2 -> (moment, 2.0, None); gap_k3 -> (gap, None, 3); others plain."""
    if token.startswith("moment_p"):
        return "moment", float(token[len("moment_p"):]), None
    if token.startswith("gap_k"):
        return "gap", None, int(token[len("gap_k"):])
    return token, None, None


def stat_token(cfg: ExperimentConfig) -> str:
    if cfg.statistic == "moment":
        p = cfg.p
        return f"moment_p{int(p) if float(p).is_integer() else p}"
    if cfg.statistic == "gap":
        return f"gap_k{cfg.k}"
    return cfg.statistic


# ---------------------------------------------------------------- reference values

def _reference(cfg: ExperimentConfig) -> dict:
    """Machine-readable analytic reference for the measured statistic."""
    d, n = cfg.d, cfg.n_points
    if cfg.statistic == "moment":
        return {
            "id": "scaled_moment_constant",
            "params": {"d": d, "p": cfg.p, "scale_exponent": 1.0 - cfg.p / d},
            "value": constants.c_moment(d, cfg.p),
            "finite_n_prediction": oracle.moment_quadrature(d, cfg.p, n).value,
        }
    if cfg.statistic == "facet_count":
        if d == 1:
            value = float(n)
        elif d == 2:
            value = float(2 * n - 4)
        else:
            value = constants.big_b(d) * n
        return {"id": "expected_facet_count", "params": {"d": d, "n": n}, "value": value}
    if cfg.statistic == "covering":
        if d == 1:
            value = constants.circle_cov_mean(n)
            return {"id": "circle_covering_mean", "params": {"n": n}, "value": value}
        value = constants.covering_coeff(d) * (math.log(n) / n) ** (1.0 / d)
        return {"id": "covering_rate_conjectured", "params": {"d": d, "n": n}, "value": value}
    if cfg.statistic == "separation":
        value = constants.sep_c(d) * n ** (-2.0 / d)
        return {"id": "separation_mean_asymptotic", "params": {"d": d, "n": n}, "value": value}
    if cfg.statistic == "scaled_separation":
        return {"id": "scaled_separation_mean", "params": {"d": d}, "value": constants.sep_c(d)}
    if cfg.statistic == "gap":
        return {
            "id": "circle_gap_mean",
            "params": {"n": n, "k": cfg.k},
            "value": constants.circle_gap_mean(n, cfg.k),
        }
    if cfg.statistic == "weighted_rho2":
        kap = constants.kappa(d)
        const = math.exp(
            constants.ln_gamma(d + 1 + 2.0 / d) - constants.ln_gamma(d + 1.0)
        ) * kap ** (-2.0 / d)
        return {"id": "weighted_rho2_mean", "params": {"d": d, "n": n}, "value": const / n}
    if cfg.statistic == "cap_area_sum":
        if d == 2:
            return {
                "id": "cap_area_sum_exact_d2",
                "params": {"n": n},
                "value": 2.0 * (2.0 * n - 4.0) / (n + 1.0),
            }
        return {
            "id": "cap_area_sum_quadrature",
            "params": {"d": d, "n": n},
            "value": oracle.mean_cap_area_sum(d, n),
        }
    if cfg.statistic == "scaled_hole_radii":
        return {"id": "hole_radius_cdf", "params": {"d": d}, "value": None}
    if cfg.statistic == "angle_dist":
        return {"id": "angle_cdf", "params": {"d": d}, "value": None}
    raise AssertionError(cfg.statistic)


def _curve_grid_upper(cdf, start: float) -> float:
    x = start
    while cdf(x) < 1.0 - 1e-9:
        x *= 2.0
    return x


def _reference_curve(cfg: ExperimentConfig, points: int = 1024) -> dict | None:
    """Sampled analytic pdf/cdf table for distribution-valued statistics."""
    d = cfg.d
    if cfg.statistic == "scaled_hole_radii":
        upper = _curve_grid_upper(lambda x: constants.hole_cdf(d, x), 1.0)
        xs = np.linspace(0.0, upper, points)
        return {
            "id": "hole_radius_cdf",
            "params": {"d": d},
            "x": xs.tolist(),
            "pdf": [constants.hole_pdf(d, float(x)) for x in xs],
            "cdf": [constants.hole_cdf(d, float(x)) for x in xs],
        }
    if cfg.statistic == "scaled_separation":
        upper = _curve_grid_upper(lambda x: constants.sep_limit_cdf(d, x), 1.0)
        xs = np.linspace(0.0, upper, points)
        kap = constants.kappa(d)
        pdf = [
            0.5 * kap * d * float(x) ** (d - 1) * math.exp(-0.5 * kap * float(x) ** d)
            for x in xs
        ]
        return {
            "id": "separation_limit_cdf",
            "params": {"d": d},
            "x": xs.tolist(),
            "pdf": pdf,
            "cdf": [constants.sep_limit_cdf(d, float(x)) for x in xs],
        }
    if cfg.statistic == "angle_dist":
        xs = np.linspace(0.0, math.pi, points)
        return {
            "id": "angle_cdf",
            "params": {"d": d},
            "x": xs.tolist(),
            "pdf": [constants.angle_pdf(d, float(x)) for x in xs],
            "cdf": [constants.cap_area_geodesic(d, float(x)) for x in xs],
        }
    return None


# ---------------------------------------------------------------- subcommands

def _cmd_sample(args) -> int:
    seed = sampling.SeedSpec(args.seed, args.trial)
    config = sampling.sample_uniform(args.d, args.n, seed)
    header = (
        f"sphcap points d={args.d} n={args.n} seed={args.seed} trial={args.trial}",
        f"build {build_id()}",
    )
    _write_atomic(args.out, sampling.format_points(config, header=header))
    return 0


def _cmd_fibonacci(args) -> int:
    config = sampling.fibonacci_s2(args.n)
    header = (f"sphcap fibonacci points n={args.n}", f"build {build_id()}")
    _write_atomic(args.out, sampling.format_points(config, header=header))
    return 0


def _cmd_hull(args) -> int:
    config = sampling.load_external(args.infile)
    hull = convex_hull(config)
    payload = {
        "format_version": FORMAT_VERSION,
        "build": build_id(),
        "input": args.infile,
        "d": config.d,
        "n": config.n,
        "facet_count": hull.facet_count,
        "origin_inside": hull.origin_inside,
        "volume": hull.volume,
        "volume_determinant": hull_volume_signed(config, hull, method="determinant"),
        "surface_area": hull.surface_area,
        "euler_check": hull.euler_check,
    }
    _emit(payload, args.out)
    return 0


def _cmd_metrics(args) -> int:
    config = sampling.load_external(args.infile)
    wanted = [s.strip() for s in args.stats.split(",") if s.strip()]
    unknown = set(wanted) - {"holes", "sep", "angles", "gaps"}
    if unknown:
        raise ValueError(f"unknown stats requested: {sorted(unknown)}")
    payload = {
        "format_version": FORMAT_VERSION,
        "build": build_id(),
        "input": args.infile,
        "d": config.d,
        "n": config.n,
    }
    if "holes" in wanted:
        hull = convex_hull(config)
        holes = metrics.hole_radii(config, hull)
        payload["holes"] = {
            "facet_count": hull.facet_count,
            "origin_inside": hull.origin_inside,
            "covering_rho": holes.covering_rho,
            "covering_alpha": holes.covering_alpha,
            "cap_area_sum": holes.cap_area_sum,
            "weighted_rho2": holes.weighted_rho2,
            "rho": holes.rho.tolist(),
        }
    if "sep" in wanted:
        sep = metrics.separation(config)
        payload["separation"] = {
            "theta_min": sep.theta_min,
            "euclid_min": sep.euclid_min,
            "argmin_pair": list(sep.argmin_pair),
        }
    if "angles" in wanted:
        dist = metrics.pairwise_angle_distribution(config)
        qs = [0.1, 0.25, 0.5, 0.75, 0.9]
        payload["angles"] = {
            "count": dist.n,
            "mean": float(np.mean(dist.samples)),
            "quantiles": {str(q): dist.quantile(q) for q in qs},
        }
    if "gaps" in wanted:
        payload["gaps"] = metrics.circle_gaps(config).tolist()
    _emit(payload, args.out)
    return 0


def _cmd_predict(args) -> int:
    method = args.method
    if method == "quadrature":
        pred = oracle.moment_quadrature(args.d, args.p, args.n)
    elif method == "asymptotic":
        pred = oracle.moment_asymptotic(args.d, args.p, args.n)
    else:
        if args.d != 2:
            raise ValueError("method exact-d2 requires --d 2")
        pred = oracle.moment_exact_d2(args.p, args.n)
    payload = {
        "format_version": FORMAT_VERSION,
        "build": build_id(),
        "d": pred.d,
        "p": pred.p,
        "n": pred.n,
        "method": pred.method,
        "value": pred.value,
    }
    _emit(payload, args.out)
    return 0


def _cmd_constants(args) -> int:
    table = constants.constants_table(args.d)
    payload = {
        "format_version": FORMAT_VERSION,
        "build": build_id(),
        "d": table.d,
        "kappa": table.kappa,
        "big_b": table.big_b,
        "sep_c": table.sep_c,
        "covering_coeff": table.covering_coeff,
        "sep_var_limit": table.sep_var_limit,
        "sep_lower_factor": table.sep_lower_factor,
        "sep_prob_bound": table.sep_prob_bound,
    }
    _emit(payload, args.out)
    return 0


def _load_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {raw.strip()!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


_CONFIG_KEYS = {"d", "n", "trials", "stat", "seed", "workers", "out"}


def _cmd_experiment(args) -> int:
    if args.config:
        file_values = _load_config_file(args.config)
        unknown = set(file_values) - _CONFIG_KEYS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key, val in file_values.items():
            if key in args.given:
                continue    # explicit flags win over the file
            if key in ("d", "n", "trials", "seed", "workers"):
                setattr(args, key, int(val))
            else:
                setattr(args, key, val)
    for required in ("d", "n", "trials", "stat", "seed", "out"):
        if getattr(args, required) is None:
            raise ValueError(f"experiment needs --{required} (flag or config file)")

    statistic, p, k = parse_stat_token(args.stat)
    cfg = ExperimentConfig(
        d=args.d, n_points=args.n, n_trials=args.trials, master_seed=args.seed,
        statistic=statistic, p=p, k=k, output=args.out,
    )
    result = run(cfg, workers=args.workers)
    token = stat_token(cfg)

    if hasattr(result, "raw_samples"):      # Estimate
        samples = result.raw_samples
        trial_ids = np.arange(cfg.n_trials)
        summary = {"kind": "estimate", "mean": result.mean, "stderr": result.stderr,
                   "trials": result.trials}
    else:                                    # pooled EmpiricalDistribution
        samples = result.samples
        per_trial = samples.size // cfg.n_trials
        trial_ids = np.repeat(np.arange(cfg.n_trials), per_trial)
        if trial_ids.size != samples.size:   # facet counts vary per trial; order is pool order
            trial_ids = np.zeros(samples.size, dtype=int)
        summary = {"kind": "pool", "count": result.n, "mean": float(np.mean(samples))}

    lines = ["trial,statistic,value"]
    lines.extend(
        f"{int(t)},{token},{format(v, '.17g')}" for t, v in zip(trial_ids, samples)
    )
    _write_atomic(args.out + ".csv", "\n".join(lines) + "\n")

    payload = {
        "format_version": FORMAT_VERSION,
        "build": build_id(),
        "config": {
            "subcommand": "experiment",
            "d": cfg.d,
            "n": cfg.n_points,
            "trials": cfg.n_trials,
            "seed": cfg.master_seed,
            "stat": token,
            "workers": args.workers,
            "emit_curve": bool(args.emit_curve),
            "out": args.out,
        },
        "result": summary,
        "reference": _reference(cfg),
    }
    if args.emit_curve:
        curve = _reference_curve(cfg)
        if curve is not None:
            payload["curve"] = curve
    _emit(payload, args.out + ".json")
    return 0


# ---------------------------------------------------------------- parser wiring

class _RecordGiven(argparse.Action):
    """Remember which experiment flags were given explicitly on the command line."""

    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.given.add(self.dest)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sphcap", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_sample = sub.add_parser("sample", help="draw seeded uniform points on S^d")
    p_sample.add_argument("--d", type=int, required=True)
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--seed", type=int, required=True)
    p_sample.add_argument("--trial", type=int, default=0)
    p_sample.add_argument("--out", required=True)
    p_sample.set_defaults(func=_cmd_sample)

    p_fib = sub.add_parser("fibonacci", help="deterministic Fibonacci points on S^2")
    p_fib.add_argument("--n", type=int, required=True)
    p_fib.add_argument("--out", required=True)
    p_fib.set_defaults(func=_cmd_fibonacci)

    p_hull = sub.add_parser("hull", help="convex-hull summary of a points file")
    p_hull.add_argument("--in", dest="infile", required=True)
    p_hull.add_argument("--format", choices=["json"], default="json")
    p_hull.add_argument("--out")
    p_hull.set_defaults(func=_cmd_hull)

    p_metrics = sub.add_parser("metrics", help="geometric statistics of a points file")
    p_metrics.add_argument("--in", dest="infile", required=True)
    p_metrics.add_argument("--stats", default="holes,sep")
    p_metrics.add_argument("--format", choices=["json"], default="json")
    p_metrics.add_argument("--out")
    p_metrics.set_defaults(func=_cmd_metrics)

    p_pred = sub.add_parser("predict", help="analytic moment predictions")
    p_pred.add_argument("--d", type=int, required=True)
    p_pred.add_argument("--p", type=float, required=True)
    p_pred.add_argument("--n", type=int, required=True)
    p_pred.add_argument("--method", choices=["quadrature", "asymptotic", "exact-d2"],
                        default="quadrature")
    p_pred.add_argument("--out")
    p_pred.set_defaults(func=_cmd_predict)

    p_const = sub.add_parser("constants", help="dimension constants table")
    p_const.add_argument("--d", type=int, required=True)
    p_const.add_argument("--format", choices=["json"], default="json")
    p_const.add_argument("--out")
    p_const.set_defaults(func=_cmd_constants)

    p_exp = sub.add_parser("experiment", help="seeded Monte Carlo experiment")
    p_exp.add_argument("--d", type=int, action=_RecordGiven)
    p_exp.add_argument("--n", type=int, action=_RecordGiven)
    p_exp.add_argument("--trials", type=int, action=_RecordGiven)
    p_exp.add_argument("--stat", action=_RecordGiven)
    p_exp.add_argument("--seed", type=int, action=_RecordGiven)
    p_exp.add_argument("--out", action=_RecordGiven)
    p_exp.add_argument("--workers", type=int, default=1, action=_RecordGiven)
    p_exp.add_argument("--emit-curve", action="store_true")
    p_exp.add_argument("--config")
    p_exp.set_defaults(func=_cmd_experiment, given=set())
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "given"):
        args.given = set()
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, DegenerateInputError, OSError) as exc:
        error = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(error), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
