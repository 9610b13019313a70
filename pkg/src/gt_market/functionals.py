"""Path functionals built on crossing ladders.

For a level ``n`` with crossing grid indices ``c_0 = 0 < c_1 < ...`` the
relative increments are ``m_k = (I(c_k) - I(c_{k-1})) / I(c_{k-1})`` (and
``s_k`` for the stock).  Every functional is evaluated at each requested grid
time ``t`` with the last increment truncated at ``t``:

    sigma_I     sum m_k^2            mu_I   sum m_k
    sigma_S     sum s_k^2            mu_S   sum s_k
    sigma_cross sum s_k m_k          delta  sum (s_k - m_k)^2

so between crossings the curves move with the price instead of jumping only
at crossing times.  The finest level of the ladder stands in for the limit
``n -> inf``; the distance to the next coarser level is reported as a
convergence diagnostic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np

from .paths import InputError, PathPair, PricePath
from .partitions import LadderMode, PartitionLadder, build_pair, build_single

SINGLE_FIELDS = ("sigma_I", "mu_I")
PAIR_FIELDS = ("sigma_I", "mu_I", "sigma_S", "mu_S", "sigma_cross", "delta")


@dataclass(frozen=True, eq=False)
class FunctionalCurves:
    """Per-level functionals sampled at ``times`` (grid positions ``grid_index``).

    ``data[name]`` has shape ``(len(levels), len(times))``.  ``log_index`` is
    ``ln I`` and ``log_stock`` is ``ln(S/S(0))`` at the same sample points.
    """

    times: np.ndarray
    grid_index: np.ndarray
    levels: tuple
    data: Dict[str, np.ndarray]
    log_index: np.ndarray
    log_stock: Optional[np.ndarray] = None
    estimator: str = "ratio"
    scale: str = "absolute"
    convergence: Dict[str, float] = field(default_factory=dict)

    @property
    def limit_level(self) -> int:
        return self.levels[-1]

    @property
    def is_pair(self) -> bool:
        return "delta" in self.data

    @property
    def fields(self) -> tuple:
        return PAIR_FIELDS if self.is_pair else SINGLE_FIELDS

    def get(self, name: str, level: Optional[int] = None) -> np.ndarray:
        if name not in self.data:
            raise InputError(f"curve {name!r} not available (pair curves needed?)")
        row = self.levels.index(self.limit_level if level is None else level)
        return self.data[name][row]

    def __getattr__(self, name):
        # curves.sigma_I etc. give the limit-level curve
        if name in PAIR_FIELDS:
            data = object.__getattribute__(self, "data")
            if name in data:
                return self.get(name)
        raise AttributeError(name)

    def value_at(self, name: str, t: float, level: Optional[int] = None) -> float:
        """Curve value at the last sample time <= t (curves are right-continuous)."""
        pos = self.position_at(t)
        return float(self.get(name, level)[pos])

    def position_at(self, t: float) -> int:
        if t < self.times[0] or t > self.times[-1]:
            raise InputError(f"time {t} outside the sampled range [{self.times[0]}, {self.times[-1]}]")
        return int(np.searchsorted(self.times, t, side="right") - 1)


def _truncated_sums(values: np.ndarray, cross: np.ndarray, at: np.ndarray, log_increments: bool):
    """Increment bookkeeping shared by all functionals.

    Returns completed-increment array ``inc`` (length K), the number of
    completed increments preceding each sample ``pos`` and the truncated
    partial increment at each sample.
    """
    base_vals = values[cross]
    if log_increments:
        inc = np.diff(np.log(base_vals))
    else:
        inc = np.diff(base_vals) / base_vals[:-1]
    # last crossing strictly before the sample; sample 0 has none
    pos = np.searchsorted(cross, at, side="left") - 1
    started = pos >= 0
    pos = np.maximum(pos, 0)
    base = base_vals[pos]
    if log_increments:
        partial = np.where(started, np.log(values[at]) - np.log(base), 0.0)
    else:
        partial = np.where(started, (values[at] - base) / base, 0.0)
    return inc, pos, partial


def _cum(x: np.ndarray) -> np.ndarray:
    out = np.empty(x.size + 1)
    out[0] = 0.0
    np.cumsum(x, out=out[1:])
    return out


def _check_ladder(values: np.ndarray, ladder: PartitionLadder, label: str) -> None:
    if ladder.n_points != values.size:
        raise InputError(f"ladder was built on {ladder.n_points} points but the {label} has {values.size}")
    lvl = ladder[ladder.n_max]
    if not np.array_equal(values[lvl.indices], lvl.index_values if label != "stock" else lvl.stock_values):
        raise InputError(f"ladder does not belong to this {label} path")


def _sample_points(n: int, at) -> np.ndarray:
    if at is None:
        return np.arange(n)
    at = np.asarray(at, dtype=np.int64)
    if at.ndim != 1 or at.size == 0 or at[0] < 0 or at[-1] >= n or np.any(np.diff(at) <= 0):
        raise InputError("sample points must be increasing grid indices inside the path")
    return at


def _convergence(data: Dict[str, np.ndarray]) -> Dict[str, float]:
    out = {}
    for name, arr in data.items():
        out[name] = float(np.max(np.abs(arr[-1] - arr[-2]))) if arr.shape[0] > 1 else float("nan")
    return out


def compute_curves(
    path: Union[PricePath, PathPair],
    ladder: PartitionLadder,
    *,
    at: Optional[Sequence[int]] = None,
    estimator: str = "ratio",
    levels: Optional[Sequence[int]] = None,
) -> FunctionalCurves:
    """Index functionals sigma_I and mu_I for every ladder level.

    ``ladder`` may be a single-index ladder of this path or a pair ladder
    built on a pair whose index is this path; in the second case the shared
    crossing times are used.  ``estimator="log"`` measures the quadratic
    functional with log increments instead of relative ones; mu_I is the
    same either way.
    """
    if estimator not in ("ratio", "log"):
        raise InputError(f"unknown estimator {estimator!r}")
    values = path.index_values if isinstance(path, PathPair) else path.values
    times = path.times
    if ladder.mode is LadderMode.SINGLE_STOCK:
        raise InputError("compute_curves needs an index or pair ladder, got a stock ladder")
    _check_ladder(values, ladder, "index")
    at = _sample_points(values.size, at)
    lvls = tuple(sorted(ladder.levels) if levels is None else levels)

    sig = np.empty((len(lvls), at.size))
    mu = np.empty((len(lvls), at.size))
    for row, n in enumerate(lvls):
        cross = ladder[n].indices
        m, pos, pm = _truncated_sums(values, cross, at, False)
        mu[row] = _cum(m)[pos] + pm
        if estimator == "log":
            m, pos, pm = _truncated_sums(values, cross, at, True)
        sig[row] = _cum(m * m)[pos] + pm * pm
    data = {"sigma_I": sig, "mu_I": mu}
    return FunctionalCurves(
        times=times[at],
        grid_index=at,
        levels=lvls,
        data=data,
        log_index=np.log(values[at]),
        estimator=estimator,
        scale=ladder.scale,
        convergence=_convergence(data),
    )


def compute_pair_curves(
    pair: PathPair,
    ladder: PartitionLadder,
    *,
    at: Optional[Sequence[int]] = None,
    estimator: str = "ratio",
    levels: Optional[Sequence[int]] = None,
) -> FunctionalCurves:
    """All six functionals on the shared pair ladder."""
    if ladder.mode is not LadderMode.PAIR:
        raise InputError(f"compute_pair_curves needs a pair ladder, got {ladder.mode.value}")
    if estimator not in ("ratio", "log"):
        raise InputError(f"unknown estimator {estimator!r}")
    pair.require_stock()
    ivals, svals = pair.index_values, pair.stock_values
    _check_ladder(ivals, ladder, "index")
    at = _sample_points(ivals.size, at)
    lvls = tuple(sorted(ladder.levels) if levels is None else levels)

    data = {name: np.empty((len(lvls), at.size)) for name in PAIR_FIELDS}
    log = estimator == "log"
    for row, n in enumerate(lvls):
        cross = ladder[n].indices
        m, pos, pm = _truncated_sums(ivals, cross, at, False)
        s, _, ps = _truncated_sums(svals, cross, at, False)
        data["mu_I"][row] = _cum(m)[pos] + pm
        data["mu_S"][row] = _cum(s)[pos] + ps
        if log:
            m, _, pm = _truncated_sums(ivals, cross, at, True)
            s, _, ps = _truncated_sums(svals, cross, at, True)
        data["sigma_I"][row] = _cum(m * m)[pos] + pm * pm
        data["sigma_S"][row] = _cum(s * s)[pos] + ps * ps
        data["sigma_cross"][row] = _cum(s * m)[pos] + ps * pm
        d = s - m
        data["delta"][row] = _cum(d * d)[pos] + (ps - pm) ** 2
    return FunctionalCurves(
        times=pair.times[at],
        grid_index=at,
        levels=lvls,
        data=data,
        log_index=np.log(ivals[at]),
        log_stock=np.log(svals[at] / svals[0]),
        estimator=estimator,
        scale=ladder.scale,
        convergence=_convergence(data),
    )


def first_passage(curves: FunctionalCurves, which: str, T: float) -> Optional[int]:
    """Sample position where the limit-level curve ``which`` first reaches T."""
    if not T > 0:
        raise InputError(f"intrinsic-time budget T must be positive, got {T}")
    if which not in ("sigma_I", "delta"):
        raise InputError(f"intrinsic clock must be 'sigma_I' or 'delta', got {which!r}")
    curve = curves.get(which)
    reached = curve >= T
    if not reached.any():
        return None
    return int(np.argmax(reached))


def intrinsic_time(curves: FunctionalCurves, which: str, T: float) -> Optional[float]:
    """First time the sigma_I (or delta) clock reaches T; ``None`` if it never does."""
    pos = first_passage(curves, which, T)
    return None if pos is None else float(curves.times[pos])


@dataclass(frozen=True)
class IdentityReport:
    mu_identity_gap: float
    delta_identity_gap: Optional[float]
    partition_consistency_sigma_gap: Optional[float]
    partition_consistency_mu_gap: Optional[float]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def check_identities(
    curves: FunctionalCurves,
    path: Union[PricePath, PathPair],
    *,
    level: Optional[int] = None,
) -> IdentityReport:
    """Measure how far the sampled curves are from the exact limit identities.

    * ``mu_identity_gap``: max |mu_I - ln I - sigma_I/2|.
    * ``delta_identity_gap``: max |delta - sigma_S - sigma_I + 2 sigma_cross|
      (pair curves only).
    * partition consistency: max distance between sigma_I (and mu_I) computed
      on the single-index ladder and on the shared pair ladder.  The missing
      ladder is built here with the same levels and scale.  Needs stock data.
    """
    n = curves.limit_level if level is None else level
    sig, mu = curves.get("sigma_I", n), curves.get("mu_I", n)
    mu_gap = float(np.max(np.abs(mu - curves.log_index - 0.5 * sig)))

    delta_gap = None
    if curves.is_pair:
        resid = curves.get("delta", n) - curves.get("sigma_S", n) - sig + 2 * curves.get("sigma_cross", n)
        delta_gap = float(np.max(np.abs(resid)))

    sig_gap = mu_gap_c = None
    if isinstance(path, PathPair) and path.has_stock:
        if curves.is_pair:
            other_ladder = build_single(path, n, n, scale=curves.scale, resolution="off")
            other = compute_curves(path, other_ladder, at=curves.grid_index, estimator=curves.estimator)
        else:
            other_ladder = build_pair(path, n, n, scale=curves.scale, resolution="off")
            other = compute_pair_curves(path, other_ladder, at=curves.grid_index, estimator=curves.estimator)
        sig_gap = float(np.max(np.abs(other.get("sigma_I") - sig)))
        mu_gap_c = float(np.max(np.abs(other.get("mu_I") - mu)))
    return IdentityReport(mu_gap, delta_gap, sig_gap, mu_gap_c)


def write_curves_csv(curves: FunctionalCurves, fh) -> None:
    """Long-format CSV: one row per (level, sample time)."""
    names = list(curves.fields)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "n", *names])
    for n in curves.levels:
        cols = [curves.get(name, n) for name in names]
        for i, t in enumerate(curves.times):
            w.writerow([repr(float(t)), n, *(repr(float(c[i])) for c in cols)])
