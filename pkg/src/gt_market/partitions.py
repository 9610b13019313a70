"""Dyadic crossing-time ladders.

Level ``n`` of a ladder lists the times T^n_0 = 0 < T^n_1 < ... at which the
price has moved by at least ``2**-n`` since the previous crossing.  For a
single asset the move of that asset is watched; for a pair the larger of the
two moves is.  On a sampled path the crossing is the first grid point where
the threshold is reached or exceeded, so every recorded increment overshoots
``2**-n`` by at most one grid jump.

``scale="relative"`` replaces the absolute threshold by ``2**-n`` times the
price at the previous crossing.  That variant is scale-free and is what makes
very long runs (prices spanning hundreds of e-folds) tractable.
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np

from ._kernels import crossing_indices
from .paths import InputError, PathPair, PricePath

MAX_DEFAULT_LEVEL = 10
MIN_CROSSINGS = 30
RESOLUTION_QUANTILE = 0.999
RESOLUTION_FRACTION = 0.5


class ResolutionError(InputError):
    """The grid is too coarse for the requested dyadic level."""


class ResolutionWarning(UserWarning):
    pass


class SparseLevelWarning(UserWarning):
    pass


class LadderMode(str, enum.Enum):
    SINGLE_INDEX = "single_index"
    SINGLE_STOCK = "single_stock"
    PAIR = "pair"


@dataclass(frozen=True, eq=False)
class PartitionLevel:
    level: int
    threshold: float
    indices: np.ndarray
    times: np.ndarray
    index_values: np.ndarray
    stock_values: Optional[np.ndarray]
    truncated: bool

    @property
    def n_crossings(self) -> int:
        """Number of completed crossings (entry 0 at t=0 excluded)."""
        return self.indices.size - 1

    def to_dict(self) -> dict:
        out = {
            "level": self.level,
            "threshold": self.threshold,
            "truncated": self.truncated,
            "grid_index": self.indices.tolist(),
            "time": self.times.tolist(),
            "index_value": self.index_values.tolist(),
        }
        if self.stock_values is not None:
            out["stock_value"] = self.stock_values.tolist()
        return out


@dataclass(frozen=True, eq=False)
class PartitionLadder:
    levels: Dict[int, PartitionLevel]
    mode: LadderMode
    n_points: int
    scale: str = "absolute"

    @property
    def n_min(self) -> int:
        return min(self.levels)

    @property
    def n_max(self) -> int:
        return max(self.levels)

    def __getitem__(self, n: int) -> PartitionLevel:
        try:
            return self.levels[n]
        except KeyError:
            raise KeyError(f"level {n} not in ladder [{self.n_min}, {self.n_max}]") from None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "scale": self.scale,
            "n_points": self.n_points,
            "levels": [self.levels[n].to_dict() for n in sorted(self.levels)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def step_moves(values: np.ndarray, scale: str = "absolute") -> np.ndarray:
    moves = np.abs(np.diff(values))
    if scale == "relative":
        moves = moves / values[:-1]
    return moves


def resolution_statistic(*series: np.ndarray, scale: str = "absolute") -> float:
    """99.9th percentile of per-step moves, the worst over the given series."""
    stats = [np.quantile(step_moves(v, scale), RESOLUTION_QUANTILE) for v in series if v.size > 1]
    return float(max(stats)) if stats else 0.0


def max_resolved_level(*series: np.ndarray, scale: str = "absolute", cap: int = MAX_DEFAULT_LEVEL) -> int:
    """Largest n <= cap whose threshold passes the resolution check (0 if none)."""
    stat = resolution_statistic(*series, scale=scale)
    if stat == 0.0:
        return cap
    # RESOLUTION_FRACTION * 2**-n >= stat
    n = int(np.floor(np.log2(RESOLUTION_FRACTION / stat)))
    return max(0, min(cap, n))


def _check_resolution(series, n_max: int, scale: str, policy: str) -> None:
    if policy == "off":
        return
    stat = resolution_statistic(*series, scale=scale)
    limit = RESOLUTION_FRACTION * 2.0**-n_max
    if stat > limit:
        msg = (
            f"grid too coarse for n_max={n_max}: 99.9th percentile step move {stat:.3g} "
            f"exceeds {limit:.3g} (half the level threshold)"
        )
        if policy == "error":
            raise ResolutionError(msg)
        warnings.warn(msg, ResolutionWarning, stacklevel=3)


def _levels(series, n_min, n_max, scale, policy):
    if policy not in ("error", "warn", "off"):
        raise InputError(f"unknown resolution policy {policy!r}")
    if scale not in ("absolute", "relative"):
        raise InputError(f"unknown partition scale {scale!r}")
    if n_max is None:
        n_max = max_resolved_level(*series, scale=scale)
        if n_max < (n_min or 1):
            raise ResolutionError(
                f"no dyadic level >= {n_min} passes the resolution check on this grid"
            )
    if n_min is None:
        n_min = min(2, n_max)
    if not (1 <= n_min <= n_max):
        raise InputError(f"need 1 <= n_min <= n_max, got n_min={n_min}, n_max={n_max}")
    _check_resolution(series, n_max, scale, policy)
    return int(n_min), int(n_max)


def _build(times, x, y, n_min, n_max, scale, policy, stock_out):
    n_min, n_max = _levels([x] if y is None else [x, y], n_min, n_max, scale, policy)
    y_arr = np.empty(0) if y is None else y
    levels = {}
    for n in range(n_min, n_max + 1):
        h = 2.0**-n
        idx = crossing_indices(x, y_arr, h, scale == "relative")
        if idx.size - 1 < MIN_CROSSINGS and policy != "off":
            warnings.warn(
                f"level {n} has only {idx.size - 1} crossings; limit estimates are unreliable",
                SparseLevelWarning,
                stacklevel=3,
            )
        levels[n] = PartitionLevel(
            level=n,
            threshold=h,
            indices=idx,
            times=times[idx],
            index_values=x[idx],
            stock_values=None if stock_out is None else stock_out[idx],
            truncated=bool(idx[-1] != x.size - 1),
        )
    return levels


def build_single(
    path: Union[PricePath, PathPair],
    n_min: Optional[int] = None,
    n_max: Optional[int] = None,
    *,
    asset: str = "index",
    scale: str = "absolute",
    resolution: str = "error",
) -> PartitionLadder:
    """Crossing ladder for one asset.

    Parameters
    ----------
    path : PricePath or PathPair
        The asset path.  For a pair, ``asset`` picks ``"index"`` or ``"stock"``.
    n_min, n_max : int, optional
        Level range.  ``n_max`` defaults to the finest level passing the
        resolution check (capped at 10); ``n_min`` defaults to 2.
    scale : {"absolute", "relative"}
    resolution : {"error", "warn", "off"}
        What to do when the grid is too coarse for ``n_max``.
    """
    if isinstance(path, PathPair):
        if asset == "stock":
            path.require_stock()
            values, mode = path.stock_values, LadderMode.SINGLE_STOCK
        else:
            values, mode = path.index_values, LadderMode.SINGLE_INDEX
        times = path.times
    else:
        values, times = path.values, path.times
        mode = LadderMode.SINGLE_STOCK if asset == "stock" else LadderMode.SINGLE_INDEX
    levels = _build(times, values, None, n_min, n_max, scale, resolution, None)
    return PartitionLadder(levels, mode, values.size, scale)


def build_pair(
    pair: PathPair,
    n_min: Optional[int] = None,
    n_max: Optional[int] = None,
    *,
    scale: str = "absolute",
    resolution: str = "error",
) -> PartitionLadder:
    """Shared crossing ladder for index and stock: triggers on the larger move."""
    if not isinstance(pair, PathPair):
        raise InputError("build_pair needs a PathPair")
    pair.require_stock()
    levels = _build(
        pair.times, pair.index_values, pair.stock_values, n_min, n_max, scale, resolution, pair.stock_values
    )
    return PartitionLadder(levels, LadderMode.PAIR, pair.index_values.size, scale)
