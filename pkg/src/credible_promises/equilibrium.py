"""Cost of reneging and the maximal incentive-compatible promise d*(delta)."""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import ClassVar, Optional

import numpy as np

from .payoffs import Source, delta_v
from .stage_game import Status, VoterRegime

D_TOL = 1e-10
DELTA_TOL = 1e-12

# Descending scan grid for the largest sign change of the incentive gap.
# The log-spaced tail catches roots that sit just above zero near a threshold.
_SCAN = np.unique(np.concatenate([np.linspace(0.0, 1.0, 2001)[1:], np.logspace(-15, -3, 97)]))[::-1]


class VariantKind(str, enum.Enum):
    BENCHMARK = "benchmark"
    NON_NAIVE_G = "nonnaive-g"
    NON_NAIVE_B = "nonnaive-b"
    LIMITED = "limited"


class SolveMethod(str, enum.Enum):
    CLOSED_PRINTED = "ClosedPrinted"
    NUMERIC_ROOT = "NumericRoot"


@dataclass(frozen=True)
class Variant:
    kind: VariantKind
    k: Optional[int] = None

    BENCHMARK: ClassVar["Variant"]
    NON_NAIVE_G: ClassVar["Variant"]
    NON_NAIVE_B: ClassVar["Variant"]

    def __post_init__(self):
        if self.kind is VariantKind.LIMITED:
            VoterRegime.limited(self.k)  # validates k
        elif self.k is not None:
            raise ValueError("k only applies to the limited-punishment variant")

    @classmethod
    def limited(cls, k: int) -> "Variant":
        return cls(VariantKind.LIMITED, k)

    @classmethod
    def parse(cls, text: str) -> "Variant":
        """``benchmark``, ``nonnaive-g``, ``nonnaive-b`` or ``limited-k<k>``."""
        t = text.strip().lower()
        if t.startswith("limited-k") or (t.startswith("k") and t[1:].isdigit()):
            digits = t.rsplit("k", 1)[1]
            if not digits.isdigit():
                raise ValueError(f"bad limited-punishment variant {text!r}")
            return cls.limited(int(digits))
        try:
            return cls(VariantKind(t))
        except ValueError:
            raise ValueError(f"unknown variant {text!r}") from None

    @property
    def regime(self) -> VoterRegime:
        if self.kind is VariantKind.BENCHMARK:
            return VoterRegime.naive()
        if self.kind is VariantKind.LIMITED:
            return VoterRegime.limited(self.k)
        return VoterRegime.non_naive()

    @property
    def opponent(self) -> Status:
        return Status.BAD if self.kind is VariantKind.NON_NAIVE_B else Status.GOOD

    @property
    def needs_source(self) -> bool:
        return self.kind is VariantKind.NON_NAIVE_B

    def __str__(self):
        return f"limited-k{self.k}" if self.kind is VariantKind.LIMITED else self.kind.value


Variant.BENCHMARK = Variant(VariantKind.BENCHMARK)
Variant.NON_NAIVE_G = Variant(VariantKind.NON_NAIVE_G)
Variant.NON_NAIVE_B = Variant(VariantKind.NON_NAIVE_B)


@dataclass(frozen=True)
class EquilibriumPoint:
    delta: float
    variant: Variant
    d_star: float
    method: SolveMethod
    clamped: bool
    note: Optional[str] = None
    raw: Optional[float] = None
    source: Optional[Source] = None


def _check_delta(delta) -> None:
    arr = np.asarray(delta)
    if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr >= 1):
        raise ValueError(f"discount factor must lie in [0, 1), got {delta}")


def cost_factor(regime: VoterRegime, delta: float) -> float:
    """Discounted weight of the punishment stream (periods 1, 2, ...)."""
    _check_delta(delta)
    if regime.infinite_punishment:
        return delta / (1.0 - delta)
    # k+1 Bad periods after reneging
    return sum(delta ** j for j in range(1, regime.k + 2))


def cost_of_reneging(regime: VoterRegime, opponent: Status, d, delta: float,
                     source: Source = Source.INTEGRAND_FAITHFUL):
    return cost_factor(regime, delta) * delta_v(regime, opponent, d, source)


def incentive_gap(regime: VoterRegime, opponent: Status, d, delta: float,
                  source: Source = Source.INTEGRAND_FAITHFUL):
    """Cost of reneging minus the one-period gain ``d``; >= 0 means credible."""
    d = np.asarray(d, dtype=float) if np.ndim(d) else d
    return cost_of_reneging(regime, opponent, d, delta, source) - d


def _resolve_source(variant: Variant, source) -> Source:
    if source is None:
        if variant.needs_source:
            raise ValueError("the nonnaive-b variant needs an explicit payoff source")
        return Source.INTEGRAND_FAITHFUL
    return Source(source)


def d_star_numeric(variant: Variant, delta: float, source: Optional[Source] = None,
                   tol: float = D_TOL) -> EquilibriumPoint:
    """Largest d in [0, 1] whose promise is incentive-compatible.

    Scans the gap from d = 1 downward for the first nonnegative value, then
    bisects the bracketing cell. d = 0 always qualifies.
    """
    _check_delta(delta)
    src = _resolve_source(variant, source)
    regime, opp = variant.regime, variant.opponent

    def gap(d):
        return incentive_gap(regime, opp, d, delta, src)

    values = gap(_SCAN)
    # rounding can leave the gap a few ulps below zero when the root is d = 1 itself
    if values[0] >= -1e-13:
        return EquilibriumPoint(delta, variant, 1.0, SolveMethod.NUMERIC_ROOT,
                                clamped=bool(values[0] > 1e-12), source=src)
    ok = np.flatnonzero(values >= 0)
    if ok.size == 0:
        # no positive root; flag when the reduced gap gap(d)/d is already negative at 0+
        h = 1e-12
        return EquilibriumPoint(delta, variant, 0.0, SolveMethod.NUMERIC_ROOT,
                                clamped=bool(gap(h) / h < -1e-9), source=src)
    i = int(ok[0])
    lo, hi = float(_SCAN[i]), float(_SCAN[i - 1])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return EquilibriumPoint(delta, variant, lo, SolveMethod.NUMERIC_ROOT, clamped=False, source=src)


# --- printed closed forms -----------------------------------------------------

# Where each printed formula switches from 0 to its positive branch.
PRINTED_THRESHOLDS = {
    Variant.BENCHMARK: 0.5,
    Variant.NON_NAIVE_G: 3 / 5,
    Variant.limited(1): 3 / 5,
    Variant.limited(2): 11 / 20,
    Variant.limited(3): 3 / 5,
}


def _printed_raw(variant: Variant, delta: float, gated: bool = True) -> float:
    if variant == Variant.BENCHMARK:
        if gated and delta <= 0.5:
            return 0.0
        if delta >= 0.75:
            return 1.0
        return 1.5 * (1 - math.sqrt((4 - 5 * delta) / (3 * delta)))
    if variant == Variant.NON_NAIVE_G:
        if gated and delta <= 3 / 5:
            return 0.0
        radicand = 3 - 2 / delta
        return math.sqrt(3) * math.sqrt(radicand) if radicand >= 0 else math.nan
    if variant == Variant.NON_NAIVE_B:
        return 6 * (1 - 1 / delta) if delta > 0 else -math.inf
    if variant.kind is VariantKind.LIMITED and variant.k in (1, 2, 3):
        if gated and delta < PRINTED_THRESHOLDS[variant]:
            return 0.0
        s = sum(delta ** j for j in range(variant.k + 1))
        radicand = 4 / (3 * delta * s) - 1 / 3
        return 1.5 * (1 - math.sqrt(radicand))
    raise ValueError(f"no printed closed form for variant {variant}")


def d_star_closed(variant: Variant, delta: float, gated: bool = True) -> EquilibriumPoint:
    """Evaluate the printed piecewise formula, clamp to [0, 1] and annotate.

    With ``gated=False`` the positive branch is used at every delta, ignoring
    the printed branch point; clamping then supplies the zero branch.
    """
    _check_delta(delta)
    raw = _printed_raw(variant, delta, gated)
    notes = []
    if math.isnan(raw):
        notes.append("printed radicand negative; no real value")
        value = 0.0
    else:
        value = min(max(raw, 0.0), 1.0)
        if value != raw:
            notes.append(f"raw printed value {raw:.10g} outside [0, 1]")
    clamped = bool(notes)
    printed_t = PRINTED_THRESHOLDS.get(variant)
    if printed_t is not None:
        exact_t = threshold_delta(variant)
        if exact_t is not None and min(printed_t, exact_t) < delta < max(printed_t, exact_t):
            notes.append(f"printed branch threshold {printed_t:.10g} disagrees with "
                         f"numeric zero-crossing {exact_t:.10g}")
    return EquilibriumPoint(delta, variant, value, SolveMethod.CLOSED_PRINTED, clamped,
                            note="; ".join(notes) or None, raw=raw)


def d_star_sensitivity(variant: Variant, delta: float) -> float:
    """Printed analytic derivative of d* with respect to delta."""
    if variant == Variant.BENCHMARK:
        lo, hi = 0.5, 0.75
        f = lambda t: math.sqrt(3 * t / (4 - 5 * t)) / t ** 2  # noqa: E731
    elif variant == Variant.NON_NAIVE_G:
        lo, hi = 2 / 3, 0.75
        f = lambda t: math.sqrt(3 * t / (3 * t - 2)) / t ** 2  # noqa: E731
    elif variant == Variant.NON_NAIVE_B:
        lo, hi = 0.0, 1.0
        f = lambda t: 1 / t ** 2  # noqa: E731
    else:
        raise ValueError(f"no printed derivative for variant {variant}")
    if not lo < delta < hi:
        raise ValueError(f"delta={delta} is not strictly inside the branch ({lo:.6g}, {hi:.6g}) of {variant}")
    return f(delta)


@functools.lru_cache(maxsize=None)
def threshold_delta(variant: Variant, source: Optional[Source] = None,
                    tol: float = DELTA_TOL) -> Optional[float]:
    """Smallest delta with d* > 0, by bisection; None if d* stays 0 on [0, 1)."""
    src = _resolve_source(variant, source)

    def positive(delta: float) -> bool:
        return d_star_numeric(variant, delta, src).d_star > 0

    lo, hi = 0.0, 1.0 - 1e-9
    if not positive(hi):
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
