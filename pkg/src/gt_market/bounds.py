"""Confidence statements for the index growth and for the stock/index pair.

Two families of intervals are evaluated at the intrinsic time tau_T where a
variation clock reaches its budget T:

* Gaussian ("CLT") intervals for ``ln I(tau_T) - T/2`` with radius
  ``z * sqrt(T)``, exact under the index-numeraire Brownian picture;
* mixing intervals with radius ``ln(2/delta)/eps + eps T/2`` (or its minimum
  over eps, ``sqrt(2 T ln(2/delta))``), which hold for the index alone and for
  the CAPM statistic ``mu_S - mu_I + sigma_I - sigma_cross``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import asdict, dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .functionals import FunctionalCurves, first_passage
from .paths import InputError
from .strategies import ExponentMode, capm_drift

# Acklam's rational approximation to the lower-tail normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _lower_quantile_rational(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    if p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )
    return -_lower_quantile_rational(1.0 - p)


def gaussian_quantile(p: float) -> float:
    """Upper p-quantile z_p of the standard Gaussian: P(xi >= z_p) = p.

    Returns ``-inf`` for p >= 1.  The rational approximation is polished with
    one Newton step on the CDF, which brings the error to ~1e-15.
    """
    p = float(p)
    if not p > 0:
        raise InputError(f"quantile level must be positive, got {p}")
    if p >= 1.0:
        return -math.inf
    if p == 0.5:
        return 0.0
    # z_p = -Phi^{-1}(p); work in the tail where p is represented exactly
    x = _lower_quantile_rational(p)
    if p < 0.5:
        err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    else:
        err = (1.0 - p) - 0.5 * math.erfc(x / math.sqrt(2.0))
    x -= err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return -x


class BoundFamily(str, enum.Enum):
    EP_CLT_TWO_SIDED = "ep_clt_two_sided"
    EP_CLT_LOWER = "ep_clt_lower"
    EP_CLT_UPPER = "ep_clt_upper"
    EP_MIXING = "ep_mixing"
    EP_OPTIMIZED = "ep_optimized"
    CAPM_MIXING = "capm_mixing"
    CAPM_OPTIMIZED = "capm_optimized"

    @property
    def is_capm(self) -> bool:
        return self.value.startswith("capm")

    @property
    def is_clt(self) -> bool:
        return "clt" in self.value

    @property
    def needs_epsilon(self) -> bool:
        return self in (BoundFamily.EP_MIXING, BoundFamily.CAPM_MIXING)

    @property
    def sidedness(self) -> str:
        if self is BoundFamily.EP_CLT_LOWER:
            return "lower"
        if self is BoundFamily.EP_CLT_UPPER:
            return "upper"
        return "two_sided"

    @property
    def target_kind(self) -> str:
        """``equality`` for the Gaussian statements, ``at_least`` for mixing ones."""
        return "equality_two_sided" if self.is_clt else "at_least"


@dataclass(frozen=True)
class BoundSpec:
    family: BoundFamily
    delta: float
    T: float
    epsilon: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "family", BoundFamily(self.family))
        if not self.delta > 0:
            raise InputError(f"delta must be positive, got {self.delta}")
        if not self.family.is_clt and self.delta > 1:
            raise InputError(f"delta must lie in (0, 1] for {self.family.value}, got {self.delta}")
        if not self.T > 0:
            raise InputError(f"T must be positive, got {self.T}")
        if self.family.needs_epsilon:
            if self.epsilon is None or not self.epsilon > 0:
                raise InputError(f"{self.family.value} needs a positive epsilon")
        elif self.epsilon is not None:
            raise InputError(f"{self.family.value} takes no epsilon")

    @property
    def half_width(self) -> float:
        f, d, T = self.family, self.delta, self.T
        if f is BoundFamily.EP_CLT_TWO_SIDED:
            return gaussian_quantile(d / 2) * math.sqrt(T)
        if f.is_clt:
            return gaussian_quantile(d) * math.sqrt(T)
        if f.needs_epsilon:
            return mixing_half_width(self.epsilon, d, T)
        return optimal_epsilon(d, T)[1]

    def to_dict(self) -> dict:
        return {"family": self.family.value, "delta": self.delta, "T": self.T, "epsilon": self.epsilon}


def _covered(statistic: float, half_width: float, sidedness: str) -> bool:
    if sidedness == "lower":
        return statistic > -half_width
    if sidedness == "upper":
        return statistic < half_width
    return abs(statistic) < half_width


@dataclass(frozen=True)
class BoundReport:
    spec: BoundSpec
    tau: Optional[float]
    statistic: Optional[float]
    half_width: float
    hit: bool
    convention_applied: bool = False

    def recompute_hit(self) -> bool:
        if self.convention_applied:
            return True
        return _covered(self.statistic, self.half_width, self.spec.family.sidedness)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spec"] = self.spec.to_dict()
        return d


def mixing_half_width(epsilon: float, delta: float, T: float) -> float:
    return math.log(2.0 / delta) / epsilon + 0.5 * epsilon * T


def optimal_epsilon(delta: float, T: float) -> Tuple[float, float]:
    """Minimizer and minimum of ``ln(2/delta)/eps + eps T/2`` over eps > 0."""
    if not 0 < delta <= 1:
        raise InputError(f"delta must lie in (0, 1], got {delta}")
    if not T > 0:
        raise InputError(f"T must be positive, got {T}")
    log_term = math.log(2.0 / delta)
    return math.sqrt(2.0 * log_term / T), math.sqrt(2.0 * T * log_term)


def ep_interval(spec: BoundSpec, curves: FunctionalCurves, path=None) -> BoundReport:
    """Evaluate an index-growth bound at tau_T, the time sigma_I reaches T.

    The statistic is ``ln I(tau_T) - T/2`` for the Gaussian and optimized
    families and ``mu_I(tau_T) - T`` for the fixed-eps mixing family.  Raises
    if sigma_I never reaches T on the sampled path.
    """
    if spec.family.is_capm:
        raise InputError(f"{spec.family.value} is not an index-growth bound")
    if path is not None and len(path) != curves.grid_index[-1] + 1:
        raise InputError("curves were not computed on this path")
    pos = first_passage(curves, "sigma_I", spec.T)
    if pos is None:
        raise InputError(
            f"sigma_I never reaches T={spec.T} (terminal value {curves.get('sigma_I')[-1]:.4g}); "
            "use a longer path or a smaller T"
        )
    if spec.family is BoundFamily.EP_MIXING:
        statistic = float(curves.get("mu_I")[pos] - spec.T)
    else:
        statistic = float(curves.log_index[pos] - spec.T / 2)
    hw = spec.half_width
    return BoundReport(spec, float(curves.times[pos]), statistic, hw, _covered(statistic, hw, spec.family.sidedness))


def capm_interval(spec: BoundSpec, curves: FunctionalCurves, pair=None) -> BoundReport:
    """Evaluate a CAPM bound at tau_T, the time delta reaches T.

    If delta never reaches T the event counts as having happened (the stock
    never became different enough from the index), flagged by
    ``convention_applied``.
    """
    if not spec.family.is_capm:
        raise InputError(f"{spec.family.value} is not a CAPM bound")
    if not curves.is_pair:
        raise InputError("CAPM bounds need pair curves")
    hw = spec.half_width
    pos = first_passage(curves, "delta", spec.T)
    if pos is None:
        return BoundReport(spec, None, None, hw, True, convention_applied=True)
    statistic = float(capm_drift(curves)[pos])
    return BoundReport(spec, float(curves.times[pos]), statistic, hw, abs(statistic) < hw)


def evaluate_bound(spec: BoundSpec, curves: FunctionalCurves) -> BoundReport:
    return capm_interval(spec, curves) if spec.family.is_capm else ep_interval(spec, curves)


class AnytimeResult(NamedTuple):
    holds: bool
    first_violation: Optional[float]


def anytime_check(curves: FunctionalCurves, mode, epsilon: float, delta: float) -> AnytimeResult:
    """Check the time-uniform band ``|drift| < ln(2/delta)/eps + eps/2 * clock``.

    Equity-premium mode uses drift ``mu_I - sigma_I`` with clock sigma_I; CAPM
    mode uses ``mu_S - mu_I + sigma_I - sigma_cross`` with clock delta.
    """
    if not epsilon > 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta <= 1:
        raise InputError(f"delta must lie in (0, 1], got {delta}")
    mode = ExponentMode(mode)
    if mode is ExponentMode.EQUITY_PREMIUM:
        clock = curves.get("sigma_I")
        drift = curves.get("mu_I") - clock
    else:
        if not curves.is_pair:
            raise InputError("the CAPM band needs pair curves")
        clock = curves.get("delta")
        drift = capm_drift(curves)
    band = math.log(2.0 / delta) / epsilon + 0.5 * epsilon * clock
    bad = ~(np.abs(drift) < band)
    if not bad.any():
        return AnytimeResult(True, None)
    return AnytimeResult(False, float(curves.times[int(np.argmax(bad))]))


class Deficit(NamedTuple):
    tpd: float
    residual: float


def tpd(curves: FunctionalCurves, t: float) -> Deficit:
    """Theoretical performance deficit delta_t/2 and the residual
    ``ln(S_t/S_0) - ln I_t + delta_t/2``."""
    if not curves.is_pair:
        raise InputError("the performance deficit needs pair curves")
    pos = curves.position_at(t)
    half = 0.5 * float(curves.get("delta")[pos])
    resid = float(curves.log_stock[pos] - curves.log_index[pos]) + half
    return Deficit(half, resid)


class QuantileRow(NamedTuple):
    q: float
    X: float
    eta: float
    ratio: float


def quantile_table(q_min: float = 1e-5, q_max: float = 0.5, points: int = 200) -> List[QuantileRow]:
    """Gaussian upper quantile X(q) against eta(q) = sqrt(2 ln(1/q)), log-spaced in q."""
    if not (0 < q_min < q_max <= 0.5):
        raise InputError(f"need 0 < q_min < q_max <= 0.5, got q_min={q_min}, q_max={q_max}")
    if int(points) < 2:
        raise InputError("points must be at least 2")
    qs = np.geomspace(q_min, q_max, int(points))
    qs[0], qs[-1] = q_min, q_max
    rows = []
    for q in qs:
        x = gaussian_quantile(float(q))
        eta = math.sqrt(2.0 * math.log(1.0 / q))
        rows.append(QuantileRow(float(q), x, eta, x / eta))
    return rows


def write_quantile_csv(rows: List[QuantileRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["q", "X", "eta", "ratio"])
    for r in rows:
        w.writerow([repr(v) for v in r])


def lil_ratio(curves: FunctionalCurves, mode, min_argument: float = math.e) -> np.ndarray:
    """Iterated-logarithm ratios along the curves, NaN where undefined.

    Equity-premium mode: ``(ln I - sigma_I/2) / sqrt(2 sigma_I ln ln sigma_I)``.
    CAPM mode: ``(mu_S - mu_I + sigma_I - sigma_cross) / sqrt(2 delta ln ln delta)``.
    Only points whose clock exceeds ``min_argument`` (at least e) get a value.
    """
    mode = ExponentMode(mode)
    if min_argument < math.e:
        raise InputError("min_argument must be at least e so that ln ln is positive")
    if mode is ExponentMode.EQUITY_PREMIUM:
        clock = curves.get("sigma_I")
        num = curves.log_index - 0.5 * clock
    else:
        if not curves.is_pair:
            raise InputError("the CAPM ratio needs pair curves")
        clock = curves.get("delta")
        num = capm_drift(curves)
    valid = clock > min_argument
    if not valid.any():
        raise InputError(f"LIL region empty: the clock never exceeds {min_argument:.4g}")
    out = np.full(clock.shape, np.nan)
    c = clock[valid]
    out[valid] = num[valid] / np.sqrt(2.0 * c * np.log(np.log(c)))
    return out
