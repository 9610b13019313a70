"""Command-line front end: ``gt-market <subcommand> [flags]``.

Units: times and horizons are in model time units (think years); volatilities
are per square-root time unit; intrinsic budgets ``--T`` are in accumulated
relative variance (the units of sigma_I and delta).

Exit codes: 0 success, 1 input or usage error, 2 internal failure.  Data goes
to files or stdout; diagnostics go to stderr.  Output files are written to a
temporary file and renamed into place, so a failing command leaves no partial
output behind.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
import tempfile
import warnings
from typing import List, Optional

from . import bounds as bd
from .functionals import check_identities, compute_curves, compute_pair_curves, write_curves_csv
from .montecarlo import (
    AnytimeSpec,
    ConfigError,
    ExperimentConfig,
    LilConfig,
    StrategySpec,
    run_coverage,
    run_lil_experiment,
    run_supermartingale_test,
)
from .partitions import build_pair, build_single
from .paths import DriftMode, GbmParams, InputError, PathPair, generate_index, generate_pair, load_csv, write_csv
from .strategies import ExponentMode, MixMode, exponent_values, mix_with_cash, mix_with_stock

log = logging.getLogger("gt_market")

FAMILIES = [f.value for f in bd.BoundFamily]
DRIFTS = [d.value for d in DriftMode]
MIXES = [m.value for m in MixMode]


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- flag types ---------------------------------------------------------------

def _positive(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _nonneg(text):
    v = float(text)
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a nonnegative number, got {text}")
    return v


def _finite(text):
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return v


def _level(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _count(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"must be a 64-bit unsigned integer, got {text}")
    return v


def _strategy(text):
    mode, _, eps = text.partition(":")
    if mode not in MIXES or not eps:
        raise argparse.ArgumentTypeError(f"expected MODE:EPS with MODE in {MIXES}, got {text!r}")
    return f"{mode}:{float(eps)!r}"


# -- parser -------------------------------------------------------------------

def _shared(p, formats=("json",)):
    p.add_argument("--config", metavar="FILE", help="JSON file whose keys replace flags (explicit flags win)")
    p.add_argument("-o", "--output", metavar="FILE", help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0], help=f"output format (default: {formats[0]})")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more diagnostics on stderr (repeatable)")


def _gen_flags(p, need_seed=True):
    g = p.add_argument_group("path generation")
    g.add_argument("--vol", type=_nonneg, default=0.2, help="index volatility sigma, per sqrt(time unit) (default 0.2)")
    g.add_argument("--drift-mode", choices=DRIFTS, default="martingale",
                   help="index log drift: martingale -sigma^2/2, index_numeraire +sigma^2/2, custom --mu")
    g.add_argument("--mu", type=_finite, default=0.0, help="log drift per time unit for --drift-mode custom (default 0)")
    g.add_argument("--stock-vol", type=_nonneg, default=None,
                   help="idiosyncratic stock volatility nu, per sqrt(time unit); omit for index only")
    g.add_argument("--horizon", type=_positive, default=1.0, help="path length in time units (default 1)")
    g.add_argument("--dt", type=_positive, default=1e-4, help="grid step in time units (default 1e-4)")
    if need_seed:
        g.add_argument("--seed", type=_seed, default=0, help="RNG seed, 64-bit unsigned integer (default 0)")


def _ladder_flags(p):
    g = p.add_argument_group("partitions")
    g.add_argument("--n-min", type=_level, default=None, help="coarsest dyadic level, threshold 2^-n (default 2)")
    g.add_argument("--n-max", type=_level, default=None,
                   help="finest dyadic level, used as the limit (default: finest level the grid resolves)")
    g.add_argument("--scale", choices=["absolute", "relative"], default="absolute",
                   help="crossing threshold 2^-n in price units, or 2^-n times the last crossing price")
    g.add_argument("--resolution", choices=["error", "warn", "off"], default="error",
                   help="policy when the grid is too coarse for --n-max (default error)")
    g.add_argument("--estimator", choices=["ratio", "log"], default="ratio",
                   help="increments for the quadratic functionals: relative or log (default ratio)")


def _bound_flags(p, repeat=True):
    g = p.add_argument_group("bounds")
    g.add_argument("--family", choices=FAMILIES, action="append" if repeat else "store", default=[] if repeat else None,
                   help="bound family to evaluate" + (" (repeatable)" if repeat else ""))
    g.add_argument("--delta", type=_positive, default=0.1, help="miss probability delta, dimensionless (default 0.1)")
    g.add_argument("--T", type=_positive, default=None, dest="T",
                   help="intrinsic budget T, in units of sigma_I (ep) or delta (capm)")
    g.add_argument("--epsilon", type=_positive, default=None, help="mixing parameter for *_mixing families, dimensionless")


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="gt-market", description=__doc__.split("\n\n")[0],
                   epilog="Exit codes: 0 success, 1 input error, 2 internal failure.")
    sub = root.add_subparsers(dest="command", parser_class=_Parser, metavar="SUBCOMMAND")
    sub.required = True

    p = sub.add_parser("simulate", help="generate a GBM index (and stock) path as CSV",
                       description="Generate a geometric Brownian motion index path, optionally with a stock.")
    _gen_flags(p)
    _shared(p, ("csv", "json"))

    p = sub.add_parser("analyze", help="partitions, functionals, identities and bounds for one path",
                       description="Analyze a t,index[,stock] CSV path.")
    p.add_argument("--input", metavar="CSV", default=None, help="input CSV with header t,index[,stock] (required)")
    _ladder_flags(p)
    _bound_flags(p)
    g = p.add_argument_group("outputs")
    g.add_argument("--tpd-at", type=_nonneg, default=None, metavar="TIME",
                   help="time (time units) at which to report the performance deficit (default: path end)")
    g.add_argument("--mix", choices=MIXES, default=None, help="mixing strategy for --emit-capital")
    g.add_argument("--mix-epsilon", type=_finite, default=0.5, help="mixing weight eps of --mix, dimensionless (default 0.5)")
    g.add_argument("--dump-ladder", metavar="FILE", default=None, help="write the partition ladder as JSON")
    g.add_argument("--emit-curves", metavar="FILE", default=None,
                   help="write curves CSV: t, n, sigma_I, mu_I[, sigma_S, mu_S, sigma_cross, delta]")
    g.add_argument("--emit-capital", metavar="FILE", default=None,
                   help="write capital CSV: t, capital, relative, theoretical_exponent")
    _shared(p)

    p = sub.add_parser("coverage", help="seeded Monte Carlo coverage, supermartingale or LIL experiments",
                       description="Run a Monte Carlo experiment, or the built-in acceptance suite.")
    p.add_argument("--suite", choices=["acceptance"], default=None, help="run a built-in preset (ignores experiment flags)")
    p.add_argument("--experiment", choices=["coverage", "supermartingale", "lil"], default="coverage",
                   help="experiment kind (default coverage)")
    _gen_flags(p, need_seed=False)
    p.add_argument("--seed", type=_seed, default=0, help="master seed, 64-bit unsigned integer (default 0)")
    p.add_argument("--n-paths", type=_count, default=1000, help="number of simulated paths (default 1000)")
    p.add_argument("--level", type=_level, default=6, help="dyadic level used as the limit (default 6)")
    p.add_argument("--scale", choices=["absolute", "relative"], default="absolute", help="crossing threshold scale")
    _bound_flags(p)
    p.add_argument("--anytime-epsilon", type=_positive, default=None,
                   help="also check the time-uniform band with this eps (mode from --anytime-mode)")
    p.add_argument("--anytime-mode", choices=[m.value for m in ExponentMode], default="equity_premium",
                   help="drift/clock pair for the time-uniform band (default equity_premium)")
    p.add_argument("--strategy", type=_strategy, action="append", default=[], metavar="MODE:EPS",
                   help="supermartingale experiment strategy, e.g. cash_mix:0.5 (repeatable)")
    p.add_argument("--lil-mode", choices=[m.value for m in ExponentMode], default="equity_premium",
                   help="LIL experiment mode (default equity_premium)")
    p.add_argument("--budget", type=_positive, default=1000.0,
                   help="LIL intrinsic budget, in units of sigma_I or delta (default 1000)")
    p.add_argument("--lil-level", type=_level, default=3, help="relative dyadic level for LIL runs (default 3)")
    p.add_argument("--se-multiple", type=_positive, default=3.0, help="pass band in standard errors (default 3)")
    p.add_argument("--workers", type=_count, default=None,
                   help="worker processes (default: CPU count, capped by GT_MARKET_THREADS)")
    p.add_argument("--keep-paths", action="store_true", default=False, help="include per-path outcome codes")
    _shared(p)

    p = sub.add_parser("quantiles", help="Gaussian quantile X(q) against eta(q) = sqrt(2 ln(1/q))",
                       description="Emit the q, X, eta, ratio table on a log-spaced q grid.")
    p.add_argument("--qmin", type=_positive, default=1e-5, help="smallest tail probability q (default 1e-5)")
    p.add_argument("--qmax", type=_positive, default=0.5, help="largest tail probability q, at most 0.5 (default 0.5)")
    p.add_argument("--points", type=_count, default=200, help="number of rows, at least 2 (default 200)")
    _shared(p, ("csv", "json"))

    p = sub.add_parser("report", help="one JSON bundle for one path: functionals, identities, bounds, strategies",
                       description="Generate (or read) one path and bundle every per-path quantity into one JSON.")
    p.add_argument("--input", metavar="CSV", default=None, help="read this CSV instead of generating a path")
    _gen_flags(p)
    _ladder_flags(p)
    _bound_flags(p)
    p.add_argument("--mix-epsilon", type=_finite, default=0.5, help="mixing weight eps for strategy summaries (default 0.5)")
    _shared(p)
    return root


# -- config merging -----------------------------------------------------------

def _subparser(root, name):
    for a in root._actions:
        if isinstance(a, argparse._SubParsersAction):
            return a.choices[name]
    raise KeyError(name)


def parse(argv: List[str]) -> argparse.Namespace:
    """Parse argv; keys from ``--config`` fill in flags that were not given."""
    root = build_parser()
    args = root.parse_args(argv)
    sub = _subparser(root, args.command)
    dests = {a.dest: a for a in sub._actions if a.dest not in ("help",)}
    if args.config is None:
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise UsageError(f"--config: cannot read {args.config}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"--config: {args.config} is not valid JSON: {e}") from None
    if not isinstance(cfg, dict):
        raise UsageError("--config: top level must be a JSON object")

    # a flag counts as explicit when its option string appears on the command line
    given = set()
    for tok in argv:
        opt = tok.split("=", 1)[0]
        for a in dests.values():
            if opt in a.option_strings:
                given.add(a.dest)
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in dests or dest in ("config",):
            raise UsageError(f"--config: unknown key {key!r} for {args.command}")
        if dest in given:
            continue
        action = dests[dest]
        setattr(args, dest, _coerce(action, value, key))
    return args


def _coerce(action, value, key):
    opt = action.option_strings[-1]
    try:
        if isinstance(value, list):
            if not isinstance(action, argparse._AppendAction):
                raise UsageError(f"--config: key {key!r} ({opt}) takes a single value")
            items = [_coerce_one(action, v) for v in value]
            return items
        if isinstance(action, argparse._AppendAction):
            return [_coerce_one(action, value)]
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            if not isinstance(value, bool):
                raise UsageError(f"--config: key {key!r} ({opt}) must be true or false")
            return value
        return _coerce_one(action, value)
    except (argparse.ArgumentTypeError, ValueError, TypeError) as e:
        raise UsageError(f"--config: key {key!r} ({opt}): {e}") from None


def _coerce_one(action, value):
    if value is None:
        return None
    v = action.type(str(value)) if action.type else value
    if action.choices is not None and v not in action.choices:
        raise ValueError(f"invalid choice {v!r}, expected one of {list(action.choices)}")
    return v


# -- output -------------------------------------------------------------------

def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def atomic_write(path: Optional[str], text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename; stdout if path is None or '-'."""
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gt-market-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render(writer, *args) -> str:
    buf = io.StringIO()
    writer(*args, buf)
    return buf.getvalue()


def _require_json(args):
    if args.format != "json":
        raise UsageError(f"--format: {args.command} only writes json")


# -- per-path analysis ----------------------------------------------------------

def _bound_specs(args) -> List[bd.BoundSpec]:
    fams = args.family if isinstance(args.family, list) else ([args.family] if args.family else [])
    if not fams:
        return []
    if args.T is None:
        raise UsageError("--T is required when --family is given")
    specs = []
    for f in fams:
        eps = args.epsilon if bd.BoundFamily(f).needs_epsilon else None
        if bd.BoundFamily(f).needs_epsilon and eps is None:
            raise UsageError(f"--epsilon is required for --family {f}")
        try:
            specs.append(bd.BoundSpec(f, args.delta, args.T, eps))
        except InputError as e:
            raise UsageError(f"--family {f}: {e}") from None
    return specs


def _analysis(path: PathPair, args, specs):
    """Ladder, curves and the JSON summary shared by analyze and report."""
    pair_mode = path.has_stock
    kw = dict(scale=args.scale, resolution=args.resolution)
    if pair_mode:
        ladder = build_pair(path, args.n_min, args.n_max, **kw)
        curves = compute_pair_curves(path, ladder, estimator=args.estimator)
    else:
        ladder = build_single(path, args.n_min, args.n_max, **kw)
        curves = compute_curves(path, ladder, estimator=args.estimator)
    for s in specs:
        if s.family.is_capm and not pair_mode:
            raise UsageError(f"--family {s.family.value} needs a stock column in the input")

    out = {
        "n_points": len(path),
        "horizon": float(path.times[-1]),
        "normalization_factor": path.normalization_factor,
        "ladder": {
            "mode": ladder.mode.value,
            "scale": ladder.scale,
            "levels": {str(n): ladder[n].n_crossings for n in sorted(ladder.levels)},
        },
        "terminal": {name: float(curves.get(name)[-1]) for name in curves.fields},
        "convergence": curves.convergence,
        "identities": check_identities(curves, path).to_dict(),
        "bounds": [bd.evaluate_bound(s, curves).to_dict() for s in specs],
    }
    if pair_mode:
        t = float(path.times[-1]) if getattr(args, "tpd_at", None) is None else args.tpd_at
        d = bd.tpd(curves, t)
        out["tpd"] = {"t": t, "tpd": d.tpd, "residual": d.residual}
    return ladder, curves, out


def _capital(path, ladder, curves, mode, eps):
    if mode is MixMode.CASH:
        cp = mix_with_cash(path, ladder, None, eps)
        ex = exponent_values(curves, ExponentMode.EQUITY_PREMIUM, eps)
    else:
        if not path.has_stock:
            raise UsageError("--mix stock_mix needs a stock column in the input")
        cp = mix_with_stock(path, ladder, None, eps)
        ex = exponent_values(curves, ExponentMode.CAPM, eps)
    return cp, ex


def _capital_csv(cp, ex) -> str:
    buf = io.StringIO()
    buf.write("t,capital,relative,theoretical_exponent\n")
    for row in zip(cp.times, cp.capital, cp.relative, ex):
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


# -- subcommands ----------------------------------------------------------------

def cmd_simulate(args) -> int:
    params = GbmParams(args.vol, args.drift_mode, args.horizon, args.dt, args.seed, args.mu)
    if args.stock_vol is None:
        p = generate_index(params)
        pair = PathPair(p.times, p.values)
    else:
        pair = generate_pair(params, args.stock_vol)
    if args.format == "csv":
        text = _render(write_csv, pair)
    else:
        obj = {"t": pair.times.tolist(), "index": pair.index_values.tolist()}
        if pair.has_stock:
            obj["stock"] = pair.stock_values.tolist()
        text = dump_json(obj)
    atomic_write(args.output, text)
    log.info("wrote %d points", len(pair))
    return 0


def _load(path_arg):
    try:
        return load_csv(path_arg)
    except OSError as e:
        raise UsageError(f"--input: cannot read {path_arg}: {e.strerror}") from None
    except InputError as e:
        raise UsageError(f"--input {path_arg}: {e}") from None


def cmd_analyze(args) -> int:
    _require_json(args)
    if args.input is None:
        raise UsageError("--input is required")
    specs = _bound_specs(args)
    path = _load(args.input)
    ladder, curves, out = _analysis(path, args, specs)
    out["input"] = args.input

    # build every side output in memory first; write only once all succeeded
    side = []
    if args.dump_ladder:
        side.append((args.dump_ladder, ladder.to_json() + "\n"))
    if args.emit_curves:
        side.append((args.emit_curves, _render(write_curves_csv, curves)))
    if args.emit_capital:
        mode = MixMode(args.mix) if args.mix else MixMode.CASH
        cp, ex = _capital(path, ladder, curves, mode, args.mix_epsilon)
        side.append((args.emit_capital, _capital_csv(cp, ex)))
    elif args.mix:
        raise UsageError("--mix only affects --emit-capital")
    main_text = dump_json(out)
    for target, text in side:
        atomic_write(target, text)
    atomic_write(args.output, main_text)
    return 0


def cmd_report(args) -> int:
    _require_json(args)
    specs = _bound_specs(args)
    if args.input is not None:
        path = _load(args.input)
        source = {"input": args.input}
    else:
        params = GbmParams(args.vol, args.drift_mode, args.horizon, args.dt, args.seed, args.mu)
        if args.stock_vol is None:
            p = generate_index(params)
            path = PathPair(p.times, p.values)
        else:
            path = generate_pair(params, args.stock_vol)
        source = {
            "vol": args.vol, "drift_mode": args.drift_mode, "mu": args.mu, "stock_vol": args.stock_vol,
            "horizon": args.horizon, "dt": args.dt, "seed": args.seed,
        }
    ladder, curves, out = _analysis(path, args, specs)
    out["source"] = source
    strategies = {}
    modes = [MixMode.CASH] + ([MixMode.STOCK] if path.has_stock else [])
    for mode in modes:
        cp, ex = _capital(path, ladder, curves, mode, args.mix_epsilon)
        strategies[mode.value] = {
            "epsilon": args.mix_epsilon,
            "level": cp.level,
            "terminal_capital": float(cp.capital[-1]),
            "terminal_relative": cp.terminal_relative,
            "terminal_log_relative": float(cp.log_relative()[-1]) if cp.terminal_relative > 0 else None,
            "theoretical_exponent": float(ex[-1]),
            "stopped_at": cp.stopped_at,
        }
    out["strategies"] = strategies
    atomic_write(args.output, dump_json(out))
    return 0


def cmd_quantiles(args) -> int:
    try:
        rows = bd.quantile_table(args.qmin, args.qmax, args.points)
    except InputError as e:
        raise UsageError(f"--qmin/--qmax/--points: {e}") from None
    if args.format == "csv":
        text = _render(bd.write_quantile_csv, rows)
    else:
        text = dump_json([r._asdict() for r in rows])
    atomic_write(args.output, text)
    return 0


def _experiment_config(args):
    if args.experiment == "lil":
        return LilConfig(
            mode=args.lil_mode,
            index_vol=args.vol,
            stock_vol=args.stock_vol or 0.0,
            drift_mode=args.drift_mode,
            budget=args.budget,
            dt=args.dt,
            level=args.lil_level,
            n_paths=args.n_paths,
            master_seed=args.seed,
        )
    anytime = ()
    if args.anytime_epsilon is not None:
        anytime = (AnytimeSpec(args.anytime_mode, args.anytime_epsilon, args.delta),)
    strategies = tuple(StrategySpec(s.split(":")[0], float(s.split(":")[1])) for s in args.strategy)
    if args.experiment == "coverage":
        bounds_ = tuple(_bound_specs(args))
        if not bounds_ and not anytime:
            raise UsageError("coverage needs --family or --anytime-epsilon (or --suite acceptance)")
        strategies = ()
    else:
        if not strategies:
            raise UsageError("--experiment supermartingale needs at least one --strategy")
        bounds_, anytime = (), ()
    return ExperimentConfig(
        index_vol=args.vol,
        drift_mode=args.drift_mode,
        stock_vol=args.stock_vol,
        horizon=args.horizon,
        dt=args.dt,
        n_paths=args.n_paths,
        master_seed=args.seed,
        level=args.level,
        mu=args.mu,
        scale=args.scale,
        se_multiple=args.se_multiple,
        bounds=bounds_,
        anytime=anytime,
        strategies=strategies,
    )


def _summarize_suite(result) -> None:
    for key, ok in result["verdicts"].items():
        print(f"criterion {key}: {'pass' if ok else 'FAIL'}", file=sys.stderr)


def cmd_coverage(args) -> int:
    _require_json(args)
    if args.suite == "acceptance":
        from .suite import run_acceptance

        result = run_acceptance(args.seed, args.workers)
        text = dump_json(result)
        atomic_write(args.output, text)
        _summarize_suite(result)
        return 0
    try:
        cfg = _experiment_config(args)
    except ConfigError as e:
        raise UsageError(str(e)) from None
    if args.experiment == "coverage":
        result = run_coverage(cfg, args.workers, keep_paths=args.keep_paths)
    elif args.experiment == "supermartingale":
        result = run_supermartingale_test(cfg, args.workers)
    else:
        result = run_lil_experiment(cfg, args.workers)
    atomic_write(args.output, dump_json(result))
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "coverage": cmd_coverage,
    "quantiles": cmd_quantiles,
    "report": cmd_report,
}


def run_cli(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.WARNING - 10 * min(int(args.verbose), 2))
    def show(message, category, *rest, **kw):
        print(f"warning: {message}", file=sys.stderr)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            warnings.showwarning = show
            return COMMANDS[args.command](args)
    except InputError as e:  # ValueError subclasses: bad flags, rows, configs
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        if args.verbose:
            import traceback

            traceback.print_exc()
        return 2
    finally:
        log.removeHandler(handler)


def main() -> None:
    sys.exit(run_cli())
