"""Mixing strategies and the exponential processes they approximate.

A mixing strategy rebalances only at the crossing times of one ladder level.
Over the k-th crossing interval it earns ``(1+eps) m_k`` (index mixed with
cash) or ``(1-eps) m_k + eps s_k`` (index mixed with stock), so its capital at
the K-th crossing is the product of ``1 +`` those returns.  Between crossings
the holdings are constant and the capital is marked to market.  Capital is
frozen at 0 from the first grid time its marked value is no longer positive.

Divided by the index, these capital processes track

    cash:  exp(eps (mu_I - sigma_I) - eps^2/2 sigma_I)
    stock: exp(eps (mu_S - mu_I + sigma_I - sigma_cross) - eps^2/2 delta)

up to a cubic Taylor remainder in the increments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import logsumexp, zeta

from .functionals import FunctionalCurves
from .paths import InputError, PathPair, PricePath
from .partitions import LadderMode, PartitionLadder


class MixMode(str, enum.Enum):
    CASH = "cash_mix"
    STOCK = "stock_mix"


class ExponentMode(str, enum.Enum):
    EQUITY_PREMIUM = "equity_premium"
    CAPM = "capm"


@dataclass(frozen=True, eq=False)
class CapitalProcess:
    times: np.ndarray
    capital: np.ndarray
    relative: np.ndarray
    stopped_at: Optional[float]
    epsilon: float
    mode: MixMode
    level: int
    crossing_index: np.ndarray

    @property
    def terminal_relative(self) -> float:
        return float(self.relative[-1])

    def log_relative(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.relative)


def _factors(values: np.ndarray, cross: np.ndarray):
    """Relative move since the last crossing strictly before each grid point."""
    n = values.size
    j = np.arange(n)
    pos = np.maximum(np.searchsorted(cross, j, side="left") - 1, 0)
    base = values[cross[pos]]
    partial = (values - base) / base
    partial[0] = 0.0
    return pos, partial


def _run(times, index_values, cross, step_return, epsilon, mode, level):
    pos, _ = _factors(index_values, cross)
    q = 1.0 + step_return  # value multiplier since the last crossing
    q[0] = 1.0
    dead = q <= 0.0
    # capital at crossing k = prod of q at crossings 1..k
    q_cross = q[cross[1:]]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_q = np.where(q_cross > 0, np.log(np.where(q_cross > 0, q_cross, 1.0)), -np.inf)
    log_prod = np.concatenate([[0.0], np.cumsum(log_q)])
    with np.errstate(divide="ignore", invalid="ignore"):
        capital = np.exp(log_prod[pos]) * q
    stopped_at = None
    if dead.any():
        first = int(np.argmax(dead))
        capital[first:] = 0.0
        stopped_at = float(times[first])
    capital[0] = 1.0
    relative = capital / index_values
    return CapitalProcess(times, capital, relative, stopped_at, float(epsilon), mode, level, cross)


def _level_indices(ladder: PartitionLadder, level: Optional[int], n_points: int) -> tuple:
    n = ladder.n_max if level is None else level
    if ladder.n_points != n_points:
        raise InputError("ladder does not match the path length")
    return n, ladder[n].indices


def mix_with_cash(
    path: Union[PricePath, PathPair],
    ladder: PartitionLadder,
    level: Optional[int] = None,
    epsilon: float = 0.0,
) -> CapitalProcess:
    """Hold ``(1+eps)`` times the capital in the index and the rest in cash.

    eps = 0 is buy-and-hold, eps = -1 is all cash, eps in [-1, 0] is a convex
    mix.  Outside that range the position is leveraged or short and the
    process may be stopped at 0.
    """
    if ladder.mode is LadderMode.SINGLE_STOCK:
        raise InputError("mix_with_cash needs an index ladder")
    values = path.index_values if isinstance(path, PathPair) else path.values
    n, cross = _level_indices(ladder, level, values.size)
    _, m = _factors(values, cross)
    return _run(path.times, values, cross, (1.0 + epsilon) * m, epsilon, MixMode.CASH, n)


def mix_with_stock(
    pair: PathPair,
    ladder: PartitionLadder,
    level: Optional[int] = None,
    epsilon: float = 0.0,
) -> CapitalProcess:
    """Hold ``(1-eps)`` of the capital in the index and ``eps`` in the stock."""
    pair.require_stock()
    if ladder.mode is not LadderMode.PAIR:
        raise InputError("mix_with_stock needs a pair ladder")
    n, cross = _level_indices(ladder, level, pair.index_values.size)
    _, m = _factors(pair.index_values, cross)
    _, s = _factors(pair.stock_values, cross)
    ret = (1.0 - epsilon) * m + epsilon * s
    return _run(pair.times, pair.index_values, cross, ret, epsilon, MixMode.STOCK, n)


@dataclass(frozen=True, eq=False)
class TheoreticalExponent:
    times: np.ndarray
    values: np.ndarray
    mode: ExponentMode
    epsilon: float


def exponent_values(curves: FunctionalCurves, mode, epsilon: float, level: Optional[int] = None) -> np.ndarray:
    mode = ExponentMode(mode)
    if mode is ExponentMode.EQUITY_PREMIUM:
        sig = curves.get("sigma_I", level)
        drift = curves.get("mu_I", level) - sig
        return epsilon * drift - 0.5 * epsilon**2 * sig
    if not curves.is_pair:
        raise InputError("the capm exponent needs pair curves")
    drift = capm_drift(curves, level)
    return epsilon * drift - 0.5 * epsilon**2 * curves.get("delta", level)


def capm_drift(curves: FunctionalCurves, level: Optional[int] = None) -> np.ndarray:
    """mu_S - mu_I + sigma_I - sigma_cross."""
    return (
        curves.get("mu_S", level)
        - curves.get("mu_I", level)
        + curves.get("sigma_I", level)
        - curves.get("sigma_cross", level)
    )


def theoretical_exponent(curves: FunctionalCurves, mode, epsilon: float, level: Optional[int] = None) -> TheoreticalExponent:
    """Log of the exponential test process at every sample time."""
    vals = exponent_values(curves, mode, epsilon, level)
    return TheoreticalExponent(curves.times, vals, ExponentMode(mode), float(epsilon))


@dataclass(frozen=True, eq=False)
class LilMixture:
    times: np.ndarray
    log_values: np.ndarray
    kappa: float
    weight_exponent: float
    k_max: int
    direction: str
    initial: float
    tail_weight: float

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    def max_ratio(self) -> float:
        """Largest value relative to the starting capital."""
        return float(np.exp(np.max(self.log_values) - np.log(self.initial)))


def lil_mixture(
    curves: FunctionalCurves,
    mode,
    kappa: float = 0.1,
    weight_exponent: float = 1.1,
    k_max: int = 60,
    direction: str = "both",
    level: Optional[int] = None,
) -> LilMixture:
    """Weighted mixture of exponential processes over eps_k = (1+kappa)^-k.

    Weights are ``k**-weight_exponent`` for k = 1..k_max.  ``direction`` picks
    the +eps processes, the -eps processes, or the average of both mixtures.
    ``tail_weight`` is the weight dropped by truncating at ``k_max``.
    """
    if not kappa > 0:
        raise InputError("kappa must be positive")
    if not weight_exponent > 1:
        raise InputError("weight_exponent must exceed 1")
    if int(k_max) < 1:
        raise InputError("k_max must be at least 1")
    if direction not in ("plus", "minus", "both"):
        raise InputError(f"direction must be plus, minus or both, got {direction!r}")
    mode = ExponentMode(mode)
    k = np.arange(1, int(k_max) + 1, dtype=float)
    log_w = -weight_exponent * np.log(k)
    eps = (1.0 + kappa) ** -k

    if mode is ExponentMode.EQUITY_PREMIUM:
        sig = curves.get("sigma_I", level)
        drift = curves.get("mu_I", level) - sig
        var = sig
    else:
        if not curves.is_pair:
            raise InputError("the capm mixture needs pair curves")
        drift = capm_drift(curves, level)
        var = curves.get("delta", level)

    quad = -0.5 * np.outer(eps**2, var)
    lin = np.outer(eps, drift)
    plus = logsumexp(log_w[:, None] + lin + quad, axis=0)
    minus = logsumexp(log_w[:, None] - lin + quad, axis=0)
    if direction == "plus":
        log_values = plus
    elif direction == "minus":
        log_values = minus
    else:
        log_values = np.logaddexp(plus, minus) - np.log(2.0)
    initial = float(np.exp(logsumexp(log_w)))
    tail = float(zeta(weight_exponent, int(k_max) + 1))
    return LilMixture(curves.times, log_values, float(kappa), float(weight_exponent), int(k_max), direction, initial, tail)
