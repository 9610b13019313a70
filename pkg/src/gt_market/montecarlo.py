"""Seeded Monte Carlo harness.

Every path ``i`` of an experiment draws from its own stream seeded by
``(master_seed, i)``, so results do not depend on how paths are split across
worker processes.  Aggregation always runs in path order.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from . import _kernels
from .bounds import BoundFamily, BoundSpec, anytime_check, evaluate_bound
from .functionals import FunctionalCurves, compute_curves, compute_pair_curves
from .partitions import RESOLUTION_FRACTION, build_pair, build_single, resolution_statistic
from .paths import DriftMode, GbmParams, InputError, generate_index, generate_pair
from .strategies import ExponentMode, MixMode, lil_mixture, mix_with_cash, mix_with_stock

DEFAULT_SE_MULTIPLE = 3.0


class ConfigError(InputError):
    pass


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for path ``index``; a pure function of its two arguments."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def worker_count(requested: Optional[int] = None) -> int:
    cap = os.environ.get("GT_MARKET_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise ConfigError(f"GT_MARKET_THREADS must be an integer, got {cap!r}") from None
    return max(1, int(n))


def content_hash(payload: dict) -> str:
    """git-style blob hash of the canonical JSON encoding."""
    data = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _run_chunk(args):
    fn, config, indices = args
    return [fn(config, i) for i in indices]


def map_paths(fn: Callable, config, n_paths: int, workers: Optional[int] = None) -> list:
    """Apply ``fn(config, i)`` for i in range(n_paths), in order."""
    workers = worker_count(workers)
    if workers == 1 or n_paths < 2 * workers:
        return [fn(config, i) for i in range(n_paths)]
    chunks = np.array_split(np.arange(n_paths), workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [(fn, config, c.tolist()) for c in chunks if c.size])
        return [r for part in parts for r in part]


@dataclass(frozen=True)
class AnytimeSpec:
    mode: ExponentMode
    epsilon: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "mode", ExponentMode(self.mode))
        if not self.epsilon > 0 or not 0 < self.delta <= 1:
            raise ConfigError("anytime checks need epsilon > 0 and delta in (0, 1]")

    @property
    def label(self) -> str:
        return f"anytime_{self.mode.value}(eps={self.epsilon:g},delta={self.delta:g})"

    def to_dict(self) -> dict:
        return {"mode": self.mode.value, "epsilon": self.epsilon, "delta": self.delta}


@dataclass(frozen=True)
class StrategySpec:
    mode: MixMode
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "mode", MixMode(self.mode))

    @property
    def label(self) -> str:
        return f"{self.mode.value}(eps={self.epsilon:g})"

    def to_dict(self) -> dict:
        return {"mode": self.mode.value, "epsilon": self.epsilon}


def bound_label(spec: BoundSpec) -> str:
    eps = "" if spec.epsilon is None else f",eps={spec.epsilon:g}"
    return f"{spec.family.value}(delta={spec.delta:g},T={spec.T:g}{eps})"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment's output.

    ``level`` is the dyadic level used as the limit proxy; ``scale`` and
    ``resolution`` are passed to the ladder builders (``resolution="count"``
    builds anyway and reports how many paths failed the grid check).
    """

    index_vol: float
    drift_mode: DriftMode = DriftMode.MARTINGALE
    stock_vol: Optional[float] = None
    horizon: float = 1.0
    dt: float = 1e-4
    n_paths: int = 1000
    master_seed: int = 0
    level: int = 6
    mu: float = 0.0
    scale: str = "absolute"
    resolution: str = "count"
    se_multiple: float = DEFAULT_SE_MULTIPLE
    bounds: Tuple[BoundSpec, ...] = ()
    anytime: Tuple[AnytimeSpec, ...] = ()
    strategies: Tuple[StrategySpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "drift_mode", DriftMode(self.drift_mode))
        object.__setattr__(self, "bounds", tuple(self.bounds))
        object.__setattr__(self, "anytime", tuple(self.anytime))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if int(self.n_paths) < 1:
            raise ConfigError("n_paths must be at least 1")
        if int(self.level) < 1:
            raise ConfigError("level must be a positive integer")
        if self.resolution not in ("count", "error"):
            raise ConfigError(f"resolution must be 'count' or 'error', got {self.resolution!r}")
        if not self.se_multiple > 0:
            raise ConfigError("se_multiple must be positive")
        self.gbm(0)  # validates vol/dt/horizon
        needs_pair = any(b.family.is_capm for b in self.bounds)
        needs_pair |= any(a.mode is ExponentMode.CAPM for a in self.anytime)
        needs_pair |= any(s.mode is MixMode.STOCK for s in self.strategies)
        if needs_pair and self.stock_vol is None:
            raise ConfigError("CAPM bounds and stock mixing need stock_vol (pair generation)")

    def gbm(self, seed: int) -> GbmParams:
        return GbmParams(self.index_vol, self.drift_mode, self.horizon, self.dt, seed, self.mu)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["drift_mode"] = self.drift_mode.value
        d["bounds"] = [b.to_dict() for b in self.bounds]
        d["anytime"] = [a.to_dict() for a in self.anytime]
        d["strategies"] = [s.to_dict() for s in self.strategies]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["bounds"] = tuple(BoundSpec(**b) for b in d.get("bounds", ()))
        d["anytime"] = tuple(AnytimeSpec(**a) for a in d.get("anytime", ()))
        d["strategies"] = tuple(StrategySpec(**s) for s in d.get("strategies", ()))
        return cls(**d)

    def hash(self) -> str:
        return content_hash(self.to_dict())


@dataclass(frozen=True)
class CoverageResult:
    label: str
    n_paths: int
    hits: int
    frequency: float
    standard_error: float
    target: float
    comparison: str
    passed: bool
    undefined: int = 0
    convention_applied: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def coverage_result(label, hits, n, target, comparison, se_multiple=DEFAULT_SE_MULTIPLE, **extra) -> CoverageResult:
    f = hits / n
    se = math.sqrt(f * (1.0 - f) / n)
    if comparison == "equality_two_sided":
        ok = abs(f - target) <= se_multiple * se
    elif comparison == "at_least":
        ok = f >= target - se_multiple * se
    else:
        raise ConfigError(f"unknown comparison mode {comparison!r}")
    return CoverageResult(label, int(n), int(hits), f, se, float(target), comparison, bool(ok), **extra)


def simulate(config: ExperimentConfig, i: int):
    params = config.gbm(derive_seed(config.master_seed, i))
    if config.stock_vol is None:
        return generate_index(params)
    return generate_pair(params, config.stock_vol)


def _ladder_policy(config):
    return "error" if config.resolution == "error" else "off"


def _resolution_ok(config, *series) -> bool:
    return resolution_statistic(*series, scale=config.scale) <= RESOLUTION_FRACTION * 2.0**-config.level


def _curves(config, path, pair_mode: bool) -> FunctionalCurves:
    n = config.level
    policy = _ladder_policy(config)
    if pair_mode:
        ladder = build_pair(path, n, n, scale=config.scale, resolution=policy)
        return compute_pair_curves(path, ladder)
    ladder = build_single(path, n, n, scale=config.scale, resolution=policy)
    return compute_curves(path, ladder)


def _coverage_path(config: ExperimentConfig, i: int):
    path = simulate(config, i)
    need_single = any(not b.family.is_capm for b in config.bounds) or any(
        a.mode is ExponentMode.EQUITY_PREMIUM for a in config.anytime
    )
    need_pair = config.stock_vol is not None and (
        any(b.family.is_capm for b in config.bounds) or any(a.mode is ExponentMode.CAPM for a in config.anytime)
    )
    series = [path.index_values if config.stock_vol is not None else path.values]
    if need_pair:
        series.append(path.stock_values)
    res_ok = _resolution_ok(config, *series)

    single = _curves(config, path, False) if need_single else None
    paired = _curves(config, path, True) if need_pair else None
    # per check: 0 miss, 1 hit, 2 undefined (miss), 3 hit by convention
    codes = []
    for spec in config.bounds:
        curves = paired if spec.family.is_capm else single
        try:
            rep = evaluate_bound(spec, curves)
        except InputError:
            codes.append(2)
            continue
        codes.append(3 if rep.convention_applied else int(rep.hit))
    for spec in config.anytime:
        curves = paired if spec.mode is ExponentMode.CAPM else single
        codes.append(int(anytime_check(curves, spec.mode, spec.epsilon, spec.delta).holds))
    return np.array(codes, dtype=np.int8), res_ok


def run_coverage(config: ExperimentConfig, workers: Optional[int] = None, keep_paths: bool = False) -> dict:
    """Hit frequencies for every bound and anytime check in ``config``.

    Gaussian bounds are compared as equalities (|f - target| within the SE
    band), everything else as lower bounds.  Returns a JSON-ready dict with the
    config echoed and hashed.
    """
    if not config.bounds and not config.anytime:
        raise ConfigError("coverage run has no bounds or anytime checks")
    notes = []
    if any(b.family.is_clt for b in config.bounds) and config.drift_mode is not DriftMode.INDEX_NUMERAIRE:
        notes.append(
            "Gaussian targets are exact under index_numeraire generation; "
            f"drift_mode is {config.drift_mode.value}"
        )
    rows = map_paths(_coverage_path, config, config.n_paths, workers)
    codes = np.stack([r[0] for r in rows])
    res_fail = int(sum(not r[1] for r in rows))
    n = config.n_paths
    results = []
    for j, spec in enumerate(config.bounds):
        col = codes[:, j]
        hits = int(np.sum((col == 1) | (col == 3)))
        results.append(
            coverage_result(
                bound_label(spec), hits, n, max(0.0, 1.0 - spec.delta),
                spec.family.target_kind, config.se_multiple,
                undefined=int(np.sum(col == 2)), convention_applied=int(np.sum(col == 3)),
            )
        )
    for j, spec in enumerate(config.anytime, start=len(config.bounds)):
        hits = int(np.sum(codes[:, j] == 1))
        results.append(coverage_result(spec.label, hits, n, 1.0 - spec.delta, "at_least", config.se_multiple))
    out = {
        "config": config.to_dict(),
        "config_hash": config.hash(),
        "resolution_failures": res_fail,
        "notes": notes,
        "results": [r.to_dict() for r in results],
    }
    if keep_paths:
        out["per_path_codes"] = codes.tolist()
    return out


@dataclass(frozen=True)
class SupermartingaleResult:
    label: str
    n_paths: int
    mean: float
    standard_error: float
    passed: bool
    stopped: int

    def to_dict(self) -> dict:
        return asdict(self)


def _supermartingale_path(config: ExperimentConfig, i: int):
    path = simulate(config, i)
    n = config.level
    policy = _ladder_policy(config)
    single = pair = None
    out = []
    for s in config.strategies:
        if s.mode is MixMode.CASH:
            if single is None:
                single = build_single(path, n, n, scale=config.scale, resolution=policy)
            cp = mix_with_cash(path, single, n, s.epsilon)
        else:
            if pair is None:
                pair = build_pair(path, n, n, scale=config.scale, resolution=policy)
            cp = mix_with_stock(path, pair, n, s.epsilon)
        out.append((cp.terminal_relative, cp.stopped_at is not None))
    return out


def run_supermartingale_test(config: ExperimentConfig, workers: Optional[int] = None) -> dict:
    """Mean terminal index-relative capital per strategy; passes if <= 1 + k SE."""
    if not config.strategies:
        raise ConfigError("supermartingale run has no strategies")
    rows = map_paths(_supermartingale_path, config, config.n_paths, workers)
    n = config.n_paths
    results = []
    for j, s in enumerate(config.strategies):
        rel = np.array([r[j][0] for r in rows])
        stopped = int(sum(r[j][1] for r in rows))
        mean = float(np.mean(rel))
        se = float(np.std(rel, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        results.append(SupermartingaleResult(s.label, n, mean, se, mean <= 1.0 + config.se_multiple * se, stopped))
    return {
        "config": config.to_dict(),
        "config_hash": config.hash(),
        "results": [r.to_dict() for r in results],
    }


@dataclass(frozen=True)
class LilConfig:
    """Long-horizon iterated-logarithm experiment.

    Paths are simulated in log space without being stored, on the relative
    dyadic partition of level ``level``, until the clock (sigma_I for the
    equity-premium mode, delta for capm) reaches ``budget``.
    """

    mode: ExponentMode = ExponentMode.EQUITY_PREMIUM
    index_vol: float = 1.0
    stock_vol: float = 0.0
    drift_mode: DriftMode = DriftMode.INDEX_NUMERAIRE
    budget: float = 1000.0
    dt: float = 3e-4
    level: int = 3
    n_paths: int = 100
    master_seed: int = 0
    min_argument: float = math.e
    kappa: float = 0.1
    weight_exponent: float = 1.1
    k_max: int = 60
    ratio_limit: float = 1.3
    quantile: float = 0.95
    mixture_limit: float = 100.0
    max_steps: int = 10**9

    def __post_init__(self):
        object.__setattr__(self, "mode", ExponentMode(self.mode))
        object.__setattr__(self, "drift_mode", DriftMode(self.drift_mode))
        if not self.budget > 0 or not self.dt > 0 or int(self.n_paths) < 1:
            raise ConfigError("budget, dt and n_paths must be positive")
        if not self.index_vol >= 0 or not self.stock_vol >= 0:
            raise ConfigError("volatilities must be nonnegative")
        # 99.9% two-sided Gaussian step against half the relative threshold
        vol = math.hypot(self.index_vol, self.stock_vol) if self.mode is ExponentMode.CAPM else self.index_vol
        step = math.expm1(3.2905 * vol * math.sqrt(self.dt))
        if step > RESOLUTION_FRACTION * 2.0**-self.level:
            raise ConfigError(
                f"dt={self.dt} too coarse for level {self.level}: typical large step {step:.3g} "
                f"exceeds {RESOLUTION_FRACTION * 2.0 ** -self.level:.3g}"
            )

    @property
    def log_drift(self) -> float:
        return GbmParams(self.index_vol, self.drift_mode, 1.0, 0.5).log_drift

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        d["drift_mode"] = self.drift_mode.value
        return d

    def hash(self) -> str:
        return content_hash(self.to_dict())


CHUNK = 1 << 18


def stream_curves(config: LilConfig, seed: int) -> FunctionalCurves:
    """Functionals at the crossing times of one long simulated path.

    Returned curves hold a single level and are sampled at crossing times only
    (``grid_index`` holds step numbers, not positions in a stored grid).
    """
    capm = config.mode is ExponentMode.CAPM
    rng = np.random.default_rng(int(seed))
    sd_i = config.index_vol * math.sqrt(config.dt)
    drift_i = config.log_drift * config.dt
    sd_b = config.stock_vol * math.sqrt(config.dt)
    drift_b = -0.5 * config.stock_vol**2 * config.dt
    h = 2.0**-config.level
    cap = int(4 * config.budget / h**2) + 1024
    rec = np.zeros((cap, 9))
    count = 0
    state = np.zeros(12)
    empty = np.empty(0)
    while state[11] == 0.0:
        if state[0] >= config.max_steps:
            raise ConfigError(f"clock did not reach budget {config.budget} within {config.max_steps} steps")
        z_i = rng.standard_normal(CHUNK)
        z_b = rng.standard_normal(CHUNK) if capm else empty
        count = _kernels.stream_chunk(
            z_i, z_b, state, rec, count, sd_i, drift_i, sd_b, drift_b, h, config.budget, capm
        )
        if count >= cap:
            rec = np.concatenate([rec, np.zeros_like(rec)])
            cap = rec.shape[0]
    rec = np.concatenate([np.zeros((1, 9)), rec[:count]])
    steps = rec[:, 0].astype(np.int64)
    if capm:
        names = ("sigma_I", "mu_I", "sigma_S", "mu_S", "sigma_cross", "delta")
        cols = (1, 2, 4, 5, 6, 7)
        log_stock = rec[:, 8]
    else:
        names, cols, log_stock = ("sigma_I", "mu_I"), (1, 2), None
    data = {name: rec[:, c][None, :].copy() for name, c in zip(names, cols)}
    return FunctionalCurves(
        times=steps * config.dt,
        grid_index=steps,
        levels=(config.level,),
        data=data,
        log_index=rec[:, 3].copy(),
        log_stock=None if log_stock is None else log_stock.copy(),
        scale="relative",
        convergence={k: float("nan") for k in names},
    )


def _lil_path(config: LilConfig, i: int):
    from .bounds import lil_ratio

    curves = stream_curves(config, derive_seed(config.master_seed, i))
    ratios = lil_ratio(curves, config.mode, config.min_argument)
    abs_max = float(np.nanmax(np.abs(ratios)))
    mix = lil_mixture(curves, config.mode, config.kappa, config.weight_exponent, config.k_max, "both")
    final = float(ratios[-1])
    return abs_max, final, mix.max_ratio(), curves.times[-1]


def run_lil_experiment(config: LilConfig, workers: Optional[int] = None) -> dict:
    """Distribution of the largest |LIL ratio| per path and mixture boundedness."""
    if config.budget <= config.min_argument:
        raise ConfigError(f"LIL region empty: budget {config.budget} does not exceed {config.min_argument:.4g}")
    if config.mode is ExponentMode.CAPM and config.stock_vol == 0:
        return {
            "config": config.to_dict(),
            "config_hash": config.hash(),
            "applicable": False,
            "reason": "stock coincides with index: delta stays 0, so the CAPM LIL premise fails",
        }
    rows = map_paths(_lil_path, config, config.n_paths, workers)
    max_ratio = np.array([r[0] for r in rows])
    mix = np.array([r[2] for r in rows])
    q = float(np.quantile(max_ratio, config.quantile))
    bounded = int(np.sum(mix < config.mixture_limit))
    return {
        "config": config.to_dict(),
        "config_hash": config.hash(),
        "applicable": True,
        "max_ratio_quantiles": {str(p): float(np.quantile(max_ratio, p)) for p in (0.5, 0.9, 0.95, 0.99)},
        "max_ratio_quantile": q,
        "ratio_passed": bool(q <= config.ratio_limit),
        "final_ratio_abs_quantile": float(np.quantile(np.abs([r[1] for r in rows]), config.quantile)),
        "mixture_max_over_initial": [float(x) for x in mix],
        "mixture_bounded_paths": bounded,
        "mixture_passed": bool(bounded >= math.ceil(0.99 * config.n_paths)),
        "mean_physical_horizon": float(np.mean([r[3] for r in rows])),
    }
