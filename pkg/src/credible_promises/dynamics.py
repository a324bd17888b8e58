"""Repeated elections with reputation state machines."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .payoffs import Pair, Source, delta_v, draw_ideals
from .stage_game import (
    FOREVER,
    PromiseMode,
    Reputation,
    Side,
    StageOutcome,
    Status,
    VoterRegime,
    play_stage,
    resolve_stage,
    table_for,
)


class DeviationKind(str, enum.Enum):
    NEVER = "never"
    ALWAYS = "always"
    ONE_SHOT = "one-shot"


@dataclass(frozen=True)
class DeviationPolicy:
    kind: DeviationKind = DeviationKind.NEVER
    period: Optional[int] = None

    def __post_init__(self):
        if self.kind is DeviationKind.ONE_SHOT:
            if self.period is None or self.period < 0:
                raise ValueError("one-shot deviation needs a period t >= 0")

    @classmethod
    def never(cls) -> "DeviationPolicy":
        return cls(DeviationKind.NEVER)

    @classmethod
    def always(cls) -> "DeviationPolicy":
        return cls(DeviationKind.ALWAYS)

    @classmethod
    def at(cls, t: int) -> "DeviationPolicy":
        return cls(DeviationKind.ONE_SHOT, t)

    @classmethod
    def parse(cls, text: str) -> "DeviationPolicy":
        """``never``, ``always`` or ``at:<t>``."""
        t = text.strip().lower()
        if t.startswith("at:"):
            return cls.at(int(t[3:]))
        return cls(DeviationKind(t))

    def renege_at(self, t: int) -> bool:
        if self.kind is DeviationKind.ALWAYS:
            return True
        return self.kind is DeviationKind.ONE_SHOT and t == self.period


@dataclass(frozen=True)
class PeriodRecord:
    t: int
    x_L: float
    x_R: float
    rep_L: Reputation
    rep_R: Reputation
    outcome: StageOutcome


@dataclass
class Trajectory:
    regime: VoterRegime
    delta: float
    d: float
    records: List[PeriodRecord] = field(default_factory=list)
    discounted_L: float = 0.0
    discounted_R: float = 0.0

    def statuses(self, side: Side) -> List[Status]:
        return [(r.rep_L if side is Side.L else r.rep_R).status for r in self.records]


def _next_reputation(regime: VoterRegime, rep: Reputation, reneged: bool) -> Reputation:
    if reneged:
        return Reputation.bad(FOREVER if regime.infinite_punishment else regime.k + 1)
    r = rep.punishment_remaining
    if r == 0 or r == FOREVER:
        return rep
    return Reputation(r - 1)


def simulate_history(regime: VoterRegime, delta: float, d: float, horizon: int, seed: int = 0,
                     policy_L: DeviationPolicy = DeviationPolicy(), policy_R: DeviationPolicy = DeviationPolicy(),
                     initial_reps: Tuple[Reputation, Reputation] = (Reputation(), Reputation()),
                     mode: PromiseMode = PromiseMode.UNCAPPED) -> Trajectory:
    """Play ``horizon`` elections, periods t = 0 .. horizon-1.

    A winner whose policy says to renege implements his ideal point instead
    of the believed promise. Reneging is only recorded when that changes the
    implemented policy, so a Bad winner or a promise at the ideal point
    cannot renege.
    """
    if not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise ValueError(f"horizon must be a positive integer, got {horizon!r}")
    if not 0 <= delta < 1:
        raise ValueError(f"discount factor must lie in [0, 1), got {delta}")
    draw_ss, tie_ss = np.random.SeedSequence(seed).spawn(2)
    draw_rng = np.random.Generator(np.random.PCG64(draw_ss))
    tie_rng = np.random.Generator(np.random.PCG64(tie_ss))

    rep_L, rep_R = initial_reps
    traj = Trajectory(regime, delta, d)
    for t in range(horizon):
        xl, xr = draw_ideals(draw_rng, 1)
        xl, xr = float(xl[0]), float(xr[0])
        out = play_stage(regime, rep_L, rep_R, xl, xr, d, mode, rng=tie_rng)

        winner_rep, winner_ideal, policy = (
            (rep_L, xl, policy_L) if out.winner is Side.L else (rep_R, xr, policy_R))
        reneged = (winner_rep.is_good and policy.renege_at(t) and out.implemented != winner_ideal)
        if reneged:
            out = replace(out, implemented=winner_ideal, utility_L=-abs(winner_ideal - xl),
                          utility_R=-abs(winner_ideal - xr), reneged=True)
        traj.records.append(PeriodRecord(t, xl, xr, rep_L, rep_R, out))
        w = delta ** t
        traj.discounted_L += w * out.utility_L
        traj.discounted_R += w * out.utility_R

        rep_L = _next_reputation(regime, rep_L, reneged and out.winner is Side.L)
        rep_R = _next_reputation(regime, rep_R, reneged and out.winner is Side.R)
    return traj


def tail_bound(delta: float, horizon: int) -> float:
    """Bound on the discounted utility dropped by truncating at ``horizon``."""
    return delta ** (horizon + 1) * 2.0 / (1.0 - delta)


def empirical_discounted_value(regime: VoterRegime, pair: Pair, delta: float, d: float, horizon: int,
                               reps: int, seed: int = 0,
                               mode: PromiseMode = PromiseMode.UNCAPPED) -> Tuple[float, float]:
    """Monte Carlo mean and stderr of sum_{t=1..horizon} delta^t u_t with fixed reputations."""
    if reps < 1 or horizon < 1:
        raise ValueError("reps and horizon must be positive")
    pair = Pair(pair)
    table = table_for(regime, pair.self_status, pair.opponent)
    draw_ss, tie_ss = np.random.SeedSequence(seed).spawn(2)
    draw_rng = np.random.Generator(np.random.PCG64(draw_ss))
    tie_rng = np.random.Generator(np.random.PCG64(tie_ss))

    totals = np.zeros(reps)
    for t in range(1, horizon + 1):
        xl, xr = draw_ideals(draw_rng, reps)
        u = resolve_stage(table, xl, xr, d, mode, tie_rng).utility_L(xl)
        totals += delta ** t * u
    mean = float(totals.mean())
    stderr = 0.0 if reps == 1 else float(totals.std(ddof=1) / math.sqrt(reps))
    return mean, stderr


def deviation_profitability(regime: VoterRegime, opponent_state: Reputation, delta: float, d: float,
                            deviation_period_offset: int = 0,
                            source: Source = Source.INTEGRAND_FAITHFUL) -> Tuple[float, bool]:
    """Cost minus gain of a Good winner reneging, from payoff-stream algebra.

    The opponent enters the base period with ``opponent_state`` and the
    deviation is considered ``deviation_period_offset`` periods later, which
    must fall inside the opponent's punishment window. Keeping and reneging
    streams agree except on the periods the deviator spends Bad, where the
    per-period difference is ``v_G,opp - v_B,opp`` for the opponent's status
    at that date.
    """
    if not 0 <= delta < 1:
        raise ValueError(f"discount factor must lie in [0, 1), got {delta}")
    o = deviation_period_offset
    window = opponent_state.punishment_remaining
    if o < 0 or (o != 0 and o >= window):
        raise ValueError(f"offset {o} is outside the opponent's punishment window ({window} periods)")
    if regime.infinite_punishment and not opponent_state.is_good and window != FOREVER:
        raise ValueError("under infinite punishment a Bad opponent stays Bad forever")

    diff_vs_good = delta_v(regime, Status.GOOD, d, source)
    diff_vs_bad = delta_v(regime, Status.BAD, d, source)
    # opponent still Bad at j periods after the decision iff o + j < window
    if regime.infinite_punishment:
        per = diff_vs_good if opponent_state.is_good else diff_vs_bad
        cost = delta / (1.0 - delta) * per
    else:
        cost = 0.0
        for j in range(1, regime.k + 2):
            per = diff_vs_bad if o + j < window else diff_vs_good
            cost += delta ** j * per
    gap = cost - d
    return gap, bool(gap < 0)
