"""One-shot election: campaign, vote, office.

Every (voter regime, reputation pair) combination maps to a region table.
Regions are listed in precedence order over the square
``x_L in [-1, 0]``, ``x_R in [0, 1]``; the first matching region fixes the
winner and the implemented policy. Boundaries between regions have measure
zero, so the precedence only matters for exact ties.

The same table objects drive the scalar :func:`play_stage` and the
vectorized :func:`resolve_stage` used by the quadrature and Monte Carlo
estimators.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]
RngLike = Union[None, int, np.random.Generator]

FOREVER = math.inf


class Side(str, enum.Enum):
    L = "L"
    R = "R"


class Status(str, enum.Enum):
    GOOD = "G"
    BAD = "B"


class RegimeKind(str, enum.Enum):
    NAIVE = "naive"
    NON_NAIVE = "nonnaive"
    LIMITED = "limited"


class PromiseMode(str, enum.Enum):
    """How far toward (and past) the median a Good candidate may be pushed."""

    UNCAPPED = "uncapped"
    CAPPED_AT_MEDIAN = "capped"


@dataclass(frozen=True)
class VoterRegime:
    kind: RegimeKind
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind is RegimeKind.LIMITED:
            if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
                raise ValueError(f"limited punishment needs an integer k >= 1, got {self.k!r}")
        elif self.k is not None:
            raise ValueError(f"k only applies to limited punishment, got k={self.k!r}")

    @classmethod
    def naive(cls) -> "VoterRegime":
        return cls(RegimeKind.NAIVE)

    @classmethod
    def non_naive(cls) -> "VoterRegime":
        return cls(RegimeKind.NON_NAIVE)

    @classmethod
    def limited(cls, k: int) -> "VoterRegime":
        return cls(RegimeKind.LIMITED, k)

    @property
    def table_kind(self) -> RegimeKind:
        """Limited punishment plays the naive stage strategies."""
        return RegimeKind.NON_NAIVE if self.kind is RegimeKind.NON_NAIVE else RegimeKind.NAIVE

    @property
    def infinite_punishment(self) -> bool:
        return self.kind is not RegimeKind.LIMITED

    def __str__(self):
        return f"limited-k{self.k}" if self.kind is RegimeKind.LIMITED else self.kind.value


@dataclass(frozen=True)
class Reputation:
    """Good iff no punishment periods remain.

    ``punishment_remaining`` counts the Bad periods left, including the
    current one; :data:`FOREVER` marks permanent punishment.
    """

    punishment_remaining: float = 0

    def __post_init__(self):
        r = self.punishment_remaining
        if r != FOREVER and (r < 0 or r != int(r)):
            raise ValueError(f"punishment_remaining must be a nonnegative integer or FOREVER, got {r!r}")

    @classmethod
    def good(cls) -> "Reputation":
        return cls(0)

    @classmethod
    def bad(cls, periods: float = FOREVER) -> "Reputation":
        if periods == 0:
            raise ValueError("a Bad reputation needs at least one punishment period")
        return cls(periods)

    @property
    def status(self) -> Status:
        return Status.GOOD if self.punishment_remaining == 0 else Status.BAD

    @property
    def is_good(self) -> bool:
        return self.punishment_remaining == 0


@dataclass(frozen=True)
class IdealPoint:
    side: Side
    value: float

    def __post_init__(self):
        lo, hi = (-1.0, 0.0) if self.side is Side.L else (0.0, 1.0)
        if not lo <= self.value <= hi:
            raise ValueError(f"ideal point of {self.side.value} must lie in [{lo}, {hi}], got {self.value}")


@dataclass(frozen=True)
class StageOutcome:
    promise_L: Optional[float]
    promise_R: Optional[float]
    winner: Side
    implemented: float
    utility_L: float
    utility_R: float
    reneged: bool = False
    region: str = ""


def utility(x: ArrayLike, ideal: ArrayLike) -> ArrayLike:
    """Linear loss ``-|x - ideal|``."""
    return -abs(x - ideal)


def _check_reach(d: float) -> None:
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"reach d must lie in [0, 1], got {d}")


def max_credible_promise(ideal: IdealPoint, d: float, mode: PromiseMode = PromiseMode.UNCAPPED) -> float:
    """Policy at distance ``d`` from ``ideal`` toward the median."""
    _check_reach(d)
    if ideal.side is Side.L:
        return _push_left(ideal.value, d, mode)
    return _push_right(ideal.value, d, mode)


def _push_left(xl: ArrayLike, d: float, mode: PromiseMode) -> ArrayLike:
    p = xl + d
    return np.minimum(p, 0.0) if mode is PromiseMode.CAPPED_AT_MEDIAN else p


def _push_right(xr: ArrayLike, d: float, mode: PromiseMode) -> ArrayLike:
    p = xr - d
    return np.maximum(p, 0.0) if mode is PromiseMode.CAPPED_AT_MEDIAN else p


# --- region tables -----------------------------------------------------------

Condition = Callable[[ArrayLike, ArrayLike, float], ArrayLike]
Policy = Callable[[ArrayLike, ArrayLike, float, PromiseMode], ArrayLike]

CLOSER = "closer"


@dataclass(frozen=True)
class Region:
    name: str
    when: Condition
    winner: str  # "L", "R" or CLOSER (ideal nearer the median wins, coin on exact tie)
    policy: Optional[Policy]  # None: the winner implements his ideal point


Table = Sequence[Region]


NAIVE_GG: Table = (
    Region("N1", lambda xl, xr, d: (xr <= 1 - d) & (xl <= -xr - d), "R", lambda xl, xr, d, m: xr),
    Region("N5", lambda xl, xr, d: (xl <= -d) & (-xl - d <= xr) & (xr <= -xl), "R",
           lambda xl, xr, d, m: -xl - d),
    Region("N3", lambda xl, xr, d: (xr <= d) & (xl >= -d), CLOSER, lambda xl, xr, d, m: 0.0 * xl),
    Region("N4", lambda xl, xr, d: (xr >= d) & (-xr <= xl) & (xl <= -xr + d), "L",
           lambda xl, xr, d, m: -xr + d),
    Region("N2", lambda xl, xr, d: (xr >= d) & (xl >= -xr + d), "L", lambda xl, xr, d, m: xl),
)

NON_NAIVE_GG: Table = (
    NAIVE_GG[0],
    Region("N5", NAIVE_GG[1].when, "R", lambda xl, xr, d, m: _push_right(xr, d, m)),
    NAIVE_GG[2],
    Region("N4", NAIVE_GG[3].when, "L", lambda xl, xr, d, m: _push_left(xl, d, m)),
    Region("N2", NAIVE_GG[4].when, "L", lambda xl, xr, d, m: _push_left(xl, d, m)),
)

# self = L Good, opponent = R Bad. GB2 implements -x_R (the printed u_L(x_L)
# integrand does not reproduce the printed total).
NAIVE_GB: Table = (
    Region("GB1", lambda xl, xr, d: (xr <= 1 - d) & (xl <= -xr - d), "R", lambda xl, xr, d, m: xr),
    Region("GB2", lambda xl, xr, d: (xl <= -xr) & (xl >= -xr - d), "L", lambda xl, xr, d, m: -xr),
    Region("GB3", lambda xl, xr, d: (xr >= 1 - d) & (xl <= -xr), "L", lambda xl, xr, d, m: -xr),
    Region("GB4", lambda xl, xr, d: xl >= -xr, "L", lambda xl, xr, d, m: xl),
)

NON_NAIVE_GB: Table = (NAIVE_GB[0],) + tuple(
    Region(r.name, r.when, "L", lambda xl, xr, d, m: _push_left(xl, d, m)) for r in NAIVE_GB[1:]
)

# self = L Bad, opponent = R Good; identical under both regimes.
BG: Table = (
    Region("NBG1", lambda xl, xr, d: xl <= -xr, "R", lambda xl, xr, d, m: xr),
    Region("NBG2", lambda xl, xr, d: (xr >= d) & (-xr <= xl) & (xl <= -xr + d), "R",
           lambda xl, xr, d, m: -xl),
    Region("NBG3", lambda xl, xr, d: (xr <= d) & (xl >= -xr), "R", lambda xl, xr, d, m: -xl),
    Region("NBG4", lambda xl, xr, d: (xr >= d) & (xl >= -xr + d), "L", lambda xl, xr, d, m: xl),
)

BB: Table = (
    Region("BB", lambda xl, xr, d: np.full(np.shape(xl), True), CLOSER, None),
)

TableKey = tuple  # (RegimeKind, Status self, Status opponent)

TABLES: Mapping[TableKey, Table] = {
    (RegimeKind.NAIVE, Status.GOOD, Status.GOOD): NAIVE_GG,
    (RegimeKind.NAIVE, Status.GOOD, Status.BAD): NAIVE_GB,
    (RegimeKind.NAIVE, Status.BAD, Status.GOOD): BG,
    (RegimeKind.NAIVE, Status.BAD, Status.BAD): BB,
    (RegimeKind.NON_NAIVE, Status.GOOD, Status.GOOD): NON_NAIVE_GG,
    (RegimeKind.NON_NAIVE, Status.GOOD, Status.BAD): NON_NAIVE_GB,
    (RegimeKind.NON_NAIVE, Status.BAD, Status.GOOD): BG,
    (RegimeKind.NON_NAIVE, Status.BAD, Status.BAD): BB,
}


def table_for(regime: VoterRegime, status_L: Status, status_R: Status,
              tables: Optional[Mapping[TableKey, Table]] = None) -> Table:
    return (tables or TABLES)[(regime.table_kind, Status(status_L), Status(status_R))]


def _rng(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(0 if rng is None else rng)


def _check_ideals(xl, xr) -> None:
    xl = np.asarray(xl)
    xr = np.asarray(xr)
    if np.any(xl < -1) or np.any(xl > 0):
        raise ValueError("x_L must lie in [-1, 0]")
    if np.any(xr < 0) or np.any(xr > 1):
        raise ValueError("x_R must lie in [0, 1]")


@dataclass
class StageArrays:
    """Vectorized stage result: L-wins mask, implemented policy, region index."""

    l_wins: np.ndarray
    implemented: np.ndarray
    region: np.ndarray
    table: Table

    def utility_L(self, xl) -> np.ndarray:
        return -np.abs(self.implemented - xl)

    def utility_R(self, xr) -> np.ndarray:
        return -np.abs(self.implemented - xr)


def resolve_stage(table: Table, xl: np.ndarray, xr: np.ndarray, d: float,
                  mode: PromiseMode = PromiseMode.UNCAPPED, rng: RngLike = None) -> StageArrays:
    """Classify every ``(x_L, x_R)`` pair and return winners and policies."""
    xl = np.asarray(xl, dtype=float)
    xr = np.asarray(xr, dtype=float)
    xl, xr = np.broadcast_arrays(xl, xr)
    conds = [np.broadcast_to(np.asarray(r.when(xl, xr, d), dtype=bool), xl.shape) for r in table]
    region = np.select(conds, list(range(len(table))), default=-1)
    if np.any(region < 0):
        i = int(np.flatnonzero(region.ravel() < 0)[0])
        raise RuntimeError(f"no region matched x_L={xl.ravel()[i]}, x_R={xr.ravel()[i]}, d={d}")

    l_wins = np.zeros(xl.shape, dtype=bool)
    for i, r in enumerate(table):
        hit = region == i
        if r.winner == "L":
            l_wins[hit] = True
        elif r.winner == CLOSER:
            a, b = -xl[hit], xr[hit]
            lw = a < b
            tie = a == b
            if np.any(tie):
                lw[tie] = _rng(rng).random(int(tie.sum())) < 0.5
            l_wins[hit] = lw

    implemented = np.where(l_wins, xl, xr)
    for i, r in enumerate(table):
        if r.policy is None:
            continue
        hit = region == i
        if np.any(hit):
            p = np.broadcast_to(np.asarray(r.policy(xl, xr, d, mode), dtype=float), xl.shape)
            implemented = np.where(hit, p, implemented)
    return StageArrays(l_wins, implemented, region, table)


def play_stage(regime: VoterRegime, rep_L: Reputation, rep_R: Reputation, x_L: float, x_R: float,
               d: float, mode: PromiseMode = PromiseMode.UNCAPPED, rng: RngLike = None,
               tables: Optional[Mapping[TableKey, Table]] = None) -> StageOutcome:
    """Play one election with equilibrium strategies.

    ``rng`` (a seed or a Generator) is consulted only on exact ties.
    """
    _check_reach(d)
    _check_ideals(x_L, x_R)
    x_L, x_R = float(x_L), float(x_R)
    table = table_for(regime, rep_L.status, rep_R.status, tables)

    for region in table:
        if bool(region.when(x_L, x_R, d)):
            break
    else:
        raise RuntimeError(f"no region matched x_L={x_L}, x_R={x_R}, d={d}")

    if region.winner == CLOSER:
        a, b = -x_L, x_R
        l_wins = a < b if a != b else bool(_rng(rng).random() < 0.5)
    else:
        l_wins = region.winner == "L"
    winner = Side.L if l_wins else Side.R
    if region.policy is None:
        implemented = x_L if l_wins else x_R
    else:
        implemented = float(region.policy(x_L, x_R, d, mode))

    def promise(rep: Reputation, side: Side, ideal: float) -> float:
        # voters disbelieve a Bad candidate and expect the ideal point
        if not rep.is_good:
            return ideal
        if side is winner:
            return implemented
        return max_credible_promise(IdealPoint(side, ideal), d, mode)

    return StageOutcome(
        promise_L=promise(rep_L, Side.L, x_L),
        promise_R=promise(rep_R, Side.R, x_R),
        winner=winner,
        implemented=implemented,
        utility_L=-abs(implemented - x_L),
        utility_R=-abs(implemented - x_R),
        region=region.name,
    )


def mirror_outcome(outcome: StageOutcome) -> StageOutcome:
    """Relabel an outcome under the reflection x -> -x with L and R swapped."""
    return StageOutcome(
        promise_L=None if outcome.promise_R is None else -outcome.promise_R,
        promise_R=None if outcome.promise_L is None else -outcome.promise_L,
        winner=Side.R if outcome.winner is Side.L else Side.L,
        implemented=-outcome.implemented,
        utility_L=outcome.utility_R,
        utility_R=outcome.utility_L,
        reneged=outcome.reneged,
        region=outcome.region,
    )
