"""Positive price paths: simulation, CSV ingestion and normalization.

Index paths are simulated by exact geometric Brownian motion stepping on a
regular grid, so positivity never depends on the step size.  A stock path is
built on top of an index path as ``S = I * exp(nu*B - nu^2 t/2)`` with an
independent Brownian driver ``B``, which makes ``S/I`` a martingale.
"""

from __future__ import annotations

import csv
import enum
import io
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np


class InputError(ValueError):
    """Bad user-supplied data or parameters."""


class CsvParseError(InputError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class PositivityError(InputError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class MonotonicityError(InputError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class DriftMode(str, enum.Enum):
    MARTINGALE = "martingale"
    INDEX_NUMERAIRE = "index_numeraire"
    CUSTOM = "custom"


def _as_float_array(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_grid(times: np.ndarray) -> None:
    if times.ndim != 1 or times.size == 0:
        raise InputError("time grid must be a non-empty 1-d sequence")
    if times[0] != 0.0:
        raise InputError(f"time grid must start at 0, got {times[0]!r}")
    steps = np.diff(times)
    if np.any(~(steps > 0)):
        bad = int(np.argmax(~(steps > 0))) + 1
        raise MonotonicityError(bad, "times must be strictly increasing")


def _check_positive(values: np.ndarray, name: str) -> None:
    if np.any(~(values > 0)) or not np.all(np.isfinite(values)):
        bad = int(np.argmax(~((values > 0) & np.isfinite(values))))
        raise PositivityError(bad, f"{name} must be finite and strictly positive")


@dataclass(frozen=True, eq=False)
class PricePath:
    """A sampled positive price trajectory.

    ``normalization_factor`` is the divisor that was applied to the raw
    prices; it is 1 for paths that were never rescaled.
    """

    times: np.ndarray
    values: np.ndarray
    normalization_factor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "times", _as_float_array(self.times))
        object.__setattr__(self, "values", _as_float_array(self.values))
        _check_grid(self.times)
        if self.values.shape != self.times.shape:
            raise InputError("values and times must have the same length")
        _check_positive(self.values, "prices")
        if not self.normalization_factor > 0:
            raise InputError("normalization factor must be positive")

    def __len__(self) -> int:
        return self.times.size

    def scaled(self, c: float) -> "PricePath":
        """The same path multiplied by a positive constant (factor untouched)."""
        if not c > 0:
            raise InputError("scale must be positive")
        return PricePath(self.times, self.values * c, self.normalization_factor)


@dataclass(frozen=True, eq=False)
class PathPair:
    """Index and (optionally) stock prices on one shared time grid.

    The index is normalized so that ``index_values[0] == 1``; the stock is
    kept in its own units.  ``stock_values`` is ``None`` when the data came
    without a stock column, and pair-only operations refuse such objects.
    """

    times: np.ndarray
    index_values: np.ndarray
    stock_values: Optional[np.ndarray] = None
    normalization_factor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "times", _as_float_array(self.times))
        object.__setattr__(self, "index_values", _as_float_array(self.index_values))
        _check_grid(self.times)
        if self.index_values.shape != self.times.shape:
            raise InputError("index values and times must have the same length")
        _check_positive(self.index_values, "index prices")
        if self.index_values[0] != 1.0:
            raise InputError("index must be normalized to 1 at t=0")
        if self.stock_values is not None:
            object.__setattr__(self, "stock_values", _as_float_array(self.stock_values))
            if self.stock_values.shape != self.times.shape:
                raise InputError("stock values and times must have the same length")
            _check_positive(self.stock_values, "stock prices")

    def __len__(self) -> int:
        return self.times.size

    @property
    def has_stock(self) -> bool:
        return self.stock_values is not None

    @property
    def index(self) -> PricePath:
        return PricePath(self.times, self.index_values, self.normalization_factor)

    @property
    def stock(self) -> PricePath:
        self.require_stock()
        return PricePath(self.times, self.stock_values)

    def require_stock(self) -> None:
        if self.stock_values is None:
            raise InputError("this operation needs a stock column, but the data has none")


@dataclass(frozen=True)
class GbmParams:
    """Geometric Brownian motion settings for the index.

    Parameters
    ----------
    vol : float
        Volatility per unit of (abstract) time.
    drift_mode : DriftMode
        ``martingale`` makes I a martingale (log drift -vol^2/2),
        ``index_numeraire`` makes 1/I a martingale (log drift +vol^2/2),
        ``custom`` uses ``mu`` as the log drift.
    horizon, dt : float
        Grid end and spacing.
    seed : int
        Seed for the path; generation is a pure function of the params.
    mu : float
        Log drift, used only in custom mode.
    """

    vol: float
    drift_mode: DriftMode = DriftMode.MARTINGALE
    horizon: float = 1.0
    dt: float = 1e-4
    seed: int = 0
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "drift_mode", DriftMode(self.drift_mode))
        if not self.vol >= 0:
            raise InputError("vol must be nonnegative")
        if not self.dt > 0:
            raise InputError("dt must be positive")
        if not self.horizon > 0:
            raise InputError("horizon must be positive")
        if not self.dt < self.horizon:
            raise InputError("dt must be smaller than horizon")
        if int(self.seed) < 0:
            raise InputError("seed must be nonnegative")

    @property
    def log_drift(self) -> float:
        if self.drift_mode is DriftMode.MARTINGALE:
            return -0.5 * self.vol**2
        if self.drift_mode is DriftMode.INDEX_NUMERAIRE:
            return 0.5 * self.vol**2
        return float(self.mu)

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon / self.dt)))


def _grid(n_steps: int, dt: float) -> np.ndarray:
    return np.arange(n_steps + 1, dtype=float) * dt


def _log_gbm(rng: np.random.Generator, vol: float, drift: float, n: int, dt: float) -> np.ndarray:
    steps = vol * np.sqrt(dt) * rng.standard_normal(n) + drift * dt
    out = np.empty(n + 1)
    out[0] = 0.0
    np.cumsum(steps, out=out[1:])
    return out


def generate_index(params: GbmParams) -> PricePath:
    """Simulate ``I(t+dt) = I(t) exp(vol sqrt(dt) xi + drift dt)`` from I(0)=1."""
    n = params.n_steps
    rng = np.random.default_rng(int(params.seed))
    log_i = _log_gbm(rng, params.vol, params.log_drift, n, params.dt)
    return PricePath(_grid(n, params.dt), np.exp(log_i))


def generate_pair(
    index_params: GbmParams,
    stock_vol: float,
    horizon: Optional[float] = None,
    dt: Optional[float] = None,
    seed: Optional[int] = None,
) -> PathPair:
    """Simulate an index path and a stock ``S = I exp(nu B - nu^2 t/2)``.

    ``horizon``, ``dt`` and ``seed`` override the values in ``index_params``.
    The index normals are drawn first from the same stream, so the index
    component equals ``generate_index`` for the same parameters.
    """
    overrides = {}
    if horizon is not None:
        overrides["horizon"] = horizon
    if dt is not None:
        overrides["dt"] = dt
    if seed is not None:
        overrides["seed"] = seed
    params = GbmParams(**{**index_params.__dict__, **overrides})
    if not stock_vol >= 0:
        raise InputError("stock_vol must be nonnegative")

    n = params.n_steps
    rng = np.random.default_rng(int(params.seed))
    log_i = _log_gbm(rng, params.vol, params.log_drift, n, params.dt)
    log_ratio = _log_gbm(rng, stock_vol, -0.5 * stock_vol**2, n, params.dt)
    return PathPair(_grid(n, params.dt), np.exp(log_i), np.exp(log_i + log_ratio))


def normalize(path: PricePath) -> PricePath:
    """Divide by the first value so the path starts at exactly 1."""
    if len(path) == 0:
        raise InputError("cannot normalize an empty path")
    first = float(path.values[0])
    values = path.values / first
    values[0] = 1.0
    return PricePath(path.times, values, path.normalization_factor * first)


def _parse_float(text: str, row: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise CsvParseError(row, f"cannot parse {column} value {text!r}") from None


def load_csv(source) -> PathPair:
    """Read ``t,index[,stock]`` CSV data into a :class:`PathPair`.

    ``source`` may be a path, an open text stream, or a string holding the CSV
    text itself (recognised by containing a newline).  Lines starting with
    ``#`` are ignored.  Times are shifted so the first row is at t=0, and the
    index is divided by its first value; the divisor is kept as
    ``normalization_factor``.  Row numbers in errors are 1-based file lines.
    """
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(os.fspath(source), encoding="utf-8") as fh:
            text = fh.read()

    lines = [(i + 1, line) for i, line in enumerate(text.splitlines())]
    lines = [(i, line) for i, line in lines if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise CsvParseError(1, "no header line")

    header_row, header_line = lines[0]
    header = [h.strip() for h in next(csv.reader(io.StringIO(header_line)))]
    if header[:2] != ["t", "index"] or len(header) > 3 or (len(header) == 3 and header[2] != "stock"):
        raise CsvParseError(header_row, f"expected header 't,index[,stock]', got {header_line!r}")
    has_stock = len(header) == 3

    times, index, stock = [], [], []
    for row, line in lines[1:]:
        fields = [f.strip() for f in next(csv.reader(io.StringIO(line)))]
        if len(fields) != len(header):
            raise CsvParseError(row, f"expected {len(header)} fields, got {len(fields)}")
        t = _parse_float(fields[0], row, "t")
        i = _parse_float(fields[1], row, "index")
        if not np.isfinite(t):
            raise CsvParseError(row, "time is not finite")
        if not (i > 0 and np.isfinite(i)):
            raise PositivityError(row, f"index price must be positive, got {fields[1]}")
        if times and not t > times[-1]:
            raise MonotonicityError(row, f"time {fields[0]} does not increase")
        if has_stock:
            s = _parse_float(fields[2], row, "stock")
            if not (s > 0 and np.isfinite(s)):
                raise PositivityError(row, f"stock price must be positive, got {fields[2]}")
            stock.append(s)
        times.append(t)
        index.append(i)

    if not times:
        raise CsvParseError(header_row, "no data rows")
    t = np.asarray(times) - times[0]
    factor = index[0]
    idx = np.asarray(index) / factor
    idx[0] = 1.0
    return PathPair(t, idx, np.asarray(stock) if has_stock else None, normalization_factor=factor)


def write_csv(pair: PathPair, fh) -> None:
    """Write a pair (or index-only pair) in the same CSV layout ``load_csv`` reads."""
    w = csv.writer(fh, lineterminator="\n")
    if pair.has_stock:
        w.writerow(["t", "index", "stock"])
        for row in zip(pair.times, pair.index_values, pair.stock_values):
            w.writerow([repr(float(v)) for v in row])
    else:
        w.writerow(["t", "index"])
        for row in zip(pair.times, pair.index_values):
            w.writerow([repr(float(v)) for v in row])
