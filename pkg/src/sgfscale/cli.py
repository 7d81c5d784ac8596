"""Command-line surface: steady, sweep, laws, ssa, fit, critical.

Every command either prints to stdout or writes CSV/JSON files.  Relative
--out paths can be redirected with the SGFSCALE_OUT_DIR environment
variable.  Errors exit nonzero with a single machine-parsable
`error: ...` line on stderr.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import laws
from .errors import DatasetParseError
from .fitting import Dataset, DeSettings, FitSpec, fit_dataset
from .io import (
    NORMALIZE_MODES,
    ParamsDocument,
    atomic_write_text,
    curve_csv,
    format_float,
    laws_csv,
    normalize_axis,
    parse_dataset,
    ssa_stats_csv,
)
from .model import Contribution, SystemConfig
from .presets import get_preset, preset_names
from .ssa import SsaSettings, run_ensemble
from .steady import (
    DEFAULT_SETTINGS,
    IntegrationSettings,
    find_critical_n,
    integrate_to_steady,
    sweep,
)

OUT_DIR_ENV = "SGFSCALE_OUT_DIR"


def _resolve_out(path):
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _load_params(args):
    if getattr(args, "preset", None):
        rates, contribution, _ = get_preset(args.preset)
    elif getattr(args, "params", None):
        doc = ParamsDocument.read(args.params)
        rates, contribution = doc.rates, doc.contribution
    else:
        raise ValueError("provide --params FILE or --preset NAME")
    if getattr(args, "c_s", None) is not None or getattr(args, "c_g", None) is not None:
        contribution = Contribution(
            c_s=contribution.c_s if args.c_s is None else args.c_s,
            c_g=contribution.c_g if args.c_g is None else args.c_g,
        )
    return rates, contribution


def _settings(args):
    kwargs = {}
    if getattr(args, "tol", None) is not None:
        kwargs["steady_tol"] = args.tol
    return IntegrationSettings(**kwargs) if kwargs else DEFAULT_SETTINGS


def _n_grid(n_min, n_max, n_steps):
    if n_min <= 0 or n_max < n_min:
        raise ValueError("need 0 < n-min <= n-max")
    if n_steps is None:
        # integer spacing by default
        count = int(round(n_max - n_min)) + 1
        grid = n_min + np.arange(count, dtype=float)
        return grid[grid <= n_max + 1e-12]
    if n_steps < 2:
        raise ValueError("--n-steps must be >= 2")
    return np.linspace(n_min, n_max, n_steps)


def _emit(text, out):
    if out:
        atomic_write_text(_resolve_out(out), text)
    else:
        sys.stdout.write(text)


def _add_params_args(parser):
    parser.add_argument("--params", help="parameters JSON file")
    parser.add_argument("--preset", help=f"named preset ({', '.join(preset_names())})")
    parser.add_argument("--c-s", dest="c_s", type=float, default=None,
                        help="override solo contribution")
    parser.add_argument("--c-g", dest="c_g", type=float, default=None,
                        help="override grupo contribution")


def _add_grid_args(parser):
    parser.add_argument("--n-min", type=float, required=True)
    parser.add_argument("--n-max", type=float, required=True)
    parser.add_argument("--n-steps", type=int, default=None,
                        help="number of grid points (default: integer spacing)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sgfscale",
        description="Three-state scalability model: steady states, sweeps, "
        "stochastic runs and rate fitting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", help="fixed point for one system size")
    _add_params_args(p)
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--tol", type=float, default=None, help="steady-state residual tolerance")
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep", help="populations/throughput/speedup over sizes")
    _add_params_args(p)
    _add_grid_args(p)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", help="output CSV (stdout if omitted)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("laws", help="closed-form scalability law curves")
    lawsub = p.add_subparsers(dest="law", required=True)
    for name in ("amdahl", "gustafson"):
        lp = lawsub.add_parser(name)
        lp.add_argument("--sigma", type=float, required=True)
        _add_grid_args(lp)
        lp.add_argument("--out")
    lp = lawsub.add_parser("usl")
    lp.add_argument("--sigma", type=float, required=True)
    lp.add_argument("--kappa", type=float, required=True)
    _add_grid_args(lp)
    lp.add_argument("--out")
    lp = lawsub.add_parser("swarm")
    lp.add_argument("--a", type=float, required=True)
    lp.add_argument("--b", type=float, required=True)
    lp.add_argument("--c", type=float, required=True)
    _add_grid_args(lp)
    lp.add_argument("--out")
    lp = lawsub.add_parser("usl-approx")
    lp.add_argument("--k2", type=float, required=True)
    lp.add_argument("--k4", type=float, required=True)
    _add_grid_args(lp)
    lp.add_argument("--out")
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("ssa", help="stochastic ensemble statistics")
    _add_params_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--record-interval", type=float, default=0.5)
    p.add_argument("--out", help="output CSV (stdout if omitted)")
    p.set_defaults(func=cmd_ssa)

    p = sub.add_parser("fit", help="fit transition rates to a dataset")
    p.add_argument("--data", required=True, help="dataset CSV with header n,x")
    p.add_argument("--normalize", choices=NORMALIZE_MODES, default="none")
    p.add_argument("--fix", action="append", default=[], metavar="NAME=VALUE",
                   help="pin a parameter (repeatable), e.g. --fix k5=0")
    p.add_argument("--pin-cs-first", action="store_true",
                   help="pin c_s to the first data point's x")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pop", type=int, default=None, help="DE population size")
    p.add_argument("--generations", type=int, default=None, help="DE generation cap")
    p.add_argument("--tol", type=float, default=None,
                   help="steady-state residual tolerance for the objective")
    p.add_argument("--out", help="output JSON (stdout if omitted)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("critical", help="interior throughput maximum, if any")
    _add_params_args(p)
    p.add_argument("--n-max", type=float, required=True)
    p.add_argument("--n-steps", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_critical)

    return parser


def cmd_steady(args):
    rates, contribution = _load_params(args)
    cfg = SystemConfig(rates, contribution, args.n)
    fp = integrate_to_steady(cfg, _settings(args))
    doc = {
        "n": args.n,
        "s_star": fp.s_star,
        "g_star": fp.g_star,
        "f_star": fp.f_star,
        "stability": fp.stability.value,
        "residual": fp.residual,
        "throughput": laws.throughput(fp, contribution),
    }
    print(json.dumps(doc, indent=2))
    return 0


def cmd_sweep(args):
    rates, contribution = _load_params(args)
    grid = _n_grid(args.n_min, args.n_max, args.n_steps)
    result = sweep(rates, contribution, grid, _settings(args))
    _emit(curve_csv(result), args.out)
    return 0


def cmd_laws(args):
    grid = _n_grid(args.n_min, args.n_max, args.n_steps)
    if args.law == "amdahl":
        p = laws.AmdahlParams(sigma=args.sigma)
        values = [laws.amdahl_speedup(p, n) for n in grid]
    elif args.law == "gustafson":
        p = laws.GustafsonParams(sigma=args.sigma)
        values = [laws.gustafson_speedup(p, n) for n in grid]
    elif args.law == "usl":
        p = laws.UslParams(sigma=args.sigma, kappa=args.kappa)
        values = [laws.usl_speedup(p, n) for n in grid]
    elif args.law == "swarm":
        p = laws.SwarmParams(a=args.a, b=args.b, c=args.c)
        values = [laws.swarm_performance(p, n) for n in grid]
    else:
        values = [laws.usl_approx_speedup(args.k2, args.k4, n) for n in grid]
    _emit(laws_csv(grid, values), args.out)
    return 0


def cmd_ssa(args):
    rates, _ = _load_params(args)
    settings = SsaSettings(t_end=args.t_end, seed=args.seed, record_interval=args.record_interval)
    stats = run_ensemble(args.n, rates, settings, args.runs)
    _emit(ssa_stats_csv(stats), args.out)
    return 0


def _parse_fixes(pairs):
    fixed = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--fix expects NAME=VALUE, got {pair!r}")
        name, _, value = pair.partition("=")
        try:
            fixed[name.strip()] = float(value)
        except ValueError:
            raise ValueError(f"--fix value for {name!r} is not a number: {value!r}") from None
    return fixed


def cmd_fit(args):
    with open(args.data, encoding="utf-8") as handle:
        data = parse_dataset(handle.read(), label=os.path.basename(args.data))
    data = normalize_axis(data, args.normalize)
    de_kwargs = {"seed": args.seed}
    if args.pop is not None:
        de_kwargs["pop_size"] = args.pop
    if args.generations is not None:
        de_kwargs["max_generations"] = args.generations
    spec = FitSpec(
        fixed=_parse_fixes(args.fix),
        pin_cs_to_first=args.pin_cs_first,
        de=DeSettings(**de_kwargs),
    )
    settings = IntegrationSettings(steady_tol=args.tol) if args.tol else DEFAULT_SETTINGS
    result = fit_dataset(data, spec, settings)
    doc = ParamsDocument(result.rates, result.contribution, label=data.label or None)
    payload = doc.to_dict()
    payload.update(
        mse=result.mse,
        converged=result.converged,
        generations=result.generations_used,
        objective_evaluations=result.objective_evaluations,
        normalize=args.normalize,
    )
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        atomic_write_text(_resolve_out(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_critical(args):
    rates, contribution = _load_params(args)
    grid = _n_grid(1.0, args.n_max, args.n_steps)
    result = sweep(rates, contribution, grid, _settings(args))
    hit = find_critical_n(result)
    if hit is None:
        print("none")
    else:
        n_c, x_max = hit
        print(f"n_c={format_float(n_c)} x_max={format_float(x_max)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, DatasetParseError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


cli_main = main

if __name__ == "__main__":
    sys.exit(main())
