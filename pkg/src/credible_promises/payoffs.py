"""One-shot expected payoff of candidate L under uniform ideal-point draws.

Three routes to the same number:

* :func:`v_closed` -- hard-coded polynomials in ``d``;
* :func:`v_quadrature` -- integration of the stage tables;
* :func:`v_monte_carlo` -- seeded sampling of the stage tables.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from .stage_game import (
    PromiseMode,
    RegimeKind,
    Status,
    TableKey,
    Table,
    VoterRegime,
    resolve_stage,
    table_for,
)


class Pair(str, enum.Enum):
    """Reputation pair (candidate L first, opponent R second)."""

    GG = "GG"
    GB = "GB"
    BG = "BG"
    BB = "BB"

    @property
    def self_status(self) -> Status:
        return Status(self.value[0])

    @property
    def opponent(self) -> Status:
        return Status(self.value[1])

    @classmethod
    def of(cls, self_status: Status, opponent: Status) -> "Pair":
        return cls(Status(self_status).value + Status(opponent).value)


class Source(str, enum.Enum):
    AS_PRINTED = "printed"
    INTEGRAND_FAITHFUL = "faithful"


class Method(str, enum.Enum):
    CLOSED_PRINTED = "ClosedPrinted"
    CLOSED_INTEGRAND_FAITHFUL = "ClosedIntegrandFaithful"
    QUADRATURE = "Quadrature"
    MONTE_CARLO = "MonteCarlo"


@dataclass(frozen=True)
class PayoffValue:
    value: float
    method: Method
    stderr: Optional[float] = None
    error_bound: Optional[float] = None
    n: Optional[int] = None


class QuadratureError(RuntimeError):
    pass


# Ascending coefficients in d. Printed forms:
#   naive     v_GG = -1/2                      v_GB = -1/6 - (1-d)^3/3
#             v_BG = -5/6 + (1-d)^3/3          v_BB = -1/2
#   non-naive v_GG = (1-d)^3/2 - d^2/2 + d - 1 v_GB = -d^2/6 - 1/2
#             v_BG, v_BB as naive
# The printed non-naive v_GB does not follow from its own integrands; the
# integrand-faithful value is -(1-d)^2/2 - d (1 - (1-d)^2/2).
_PRINTED = {
    (RegimeKind.NAIVE, Pair.GG): (-0.5,),
    (RegimeKind.NAIVE, Pair.GB): (-0.5, 1.0, -1.0, 1 / 3),
    (RegimeKind.NAIVE, Pair.BG): (-0.5, -1.0, 1.0, -1 / 3),
    (RegimeKind.NAIVE, Pair.BB): (-0.5,),
    (RegimeKind.NON_NAIVE, Pair.GG): (-0.5, -0.5, 1.0, -0.5),
    (RegimeKind.NON_NAIVE, Pair.GB): (-0.5, 0.0, -1 / 6),
    (RegimeKind.NON_NAIVE, Pair.BG): (-0.5, -1.0, 1.0, -1 / 3),
    (RegimeKind.NON_NAIVE, Pair.BB): (-0.5,),
}
_FAITHFUL_OVERRIDES = {
    (RegimeKind.NON_NAIVE, Pair.GB): (-0.5, 0.5, -1.5, 0.5),
}

# The printed expressions, kept verbatim for adjudication.
PRINTED_EXPRESSIONS = {
    (RegimeKind.NAIVE, Pair.GG): lambda d: -0.5 + 0 * d,
    (RegimeKind.NAIVE, Pair.GB): lambda d: -1 / 6 - (1 - d) ** 3 / 3,
    (RegimeKind.NAIVE, Pair.BG): lambda d: -5 / 6 + (1 - d) ** 3 / 3,
    (RegimeKind.NAIVE, Pair.BB): lambda d: -0.5 + 0 * d,
    (RegimeKind.NON_NAIVE, Pair.GG): lambda d: (1 - d) ** 3 / 2 - d ** 2 / 2 + d - 1,
    (RegimeKind.NON_NAIVE, Pair.GB): lambda d: -d ** 2 / 6 - 0.5,
    (RegimeKind.NON_NAIVE, Pair.BG): lambda d: -5 / 6 + (1 - d) ** 3 / 3,
    (RegimeKind.NON_NAIVE, Pair.BB): lambda d: -0.5 + 0 * d,
}


def _as_regime(regime) -> VoterRegime:
    if not isinstance(regime, VoterRegime):
        raise TypeError(f"expected a VoterRegime, got {regime!r}")
    return regime


def closed_polynomial(regime: VoterRegime, pair: Pair, source: Source = Source.AS_PRINTED) -> Polynomial:
    kind = _as_regime(regime).table_kind
    key = (kind, Pair(pair))
    try:
        source = Source(source)
    except ValueError:
        raise ValueError(f"unknown payoff source {source!r}") from None
    if source is Source.INTEGRAND_FAITHFUL and key in _FAITHFUL_OVERRIDES:
        return Polynomial(_FAITHFUL_OVERRIDES[key])
    return Polynomial(_PRINTED[key])


def _check_d(d) -> None:
    arr = np.asarray(d)
    if np.any(arr < 0) or np.any(arr > 1) or np.any(np.isnan(arr)):
        raise ValueError(f"reach d must lie in [0, 1], got {d}")


def v_closed(regime: VoterRegime, pair: Pair, d: float, source: Source = Source.AS_PRINTED) -> PayoffValue:
    _check_d(d)
    poly = closed_polynomial(regime, pair, source)
    method = Method.CLOSED_PRINTED if Source(source) is Source.AS_PRINTED else Method.CLOSED_INTEGRAND_FAITHFUL
    return PayoffValue(float(poly(d)), method)


def delta_v(regime: VoterRegime, opponent: Status, d, source: Source = Source.AS_PRINTED):
    """``v_{G,opp} - v_{B,opp}``; accepts scalar or array ``d``."""
    _check_d(d)
    opponent = Status(opponent)
    diff = closed_polynomial(regime, Pair.of(Status.GOOD, opponent), source) \
        - closed_polynomial(regime, Pair.of(Status.BAD, opponent), source)
    out = diff(np.asarray(d, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


# --- quadrature ----------------------------------------------------------------

_GL2 = np.polynomial.legendre.leggauss(2)
_GL3 = np.polynomial.legendre.leggauss(3)


def _gl(rule, lo, hi):
    x, w = rule
    mid = 0.5 * (lo + hi)[:, None]
    half = 0.5 * (hi - lo)[:, None]
    return mid + half * x[None, :], half * w[None, :]


def _inner_breakpoints(xr: float, d: float) -> np.ndarray:
    # Region boundaries plus kinks of |policy - x_L| along the x_L axis.
    cand = np.array([-1.0, 0.0, -xr - d, -xr, -xr + d, -d, -d / 2, xr - d])
    cand = np.clip(cand, -1.0, 0.0)
    return np.unique(cand)


def _inner_integral(table: Table, xr: float, d: float, mode: PromiseMode, rng, max_splits: int = 30) -> float:
    """Exact-on-linear-pieces integral of u_L over x_L in [-1, 0]."""
    bp = _inner_breakpoints(xr, d)
    lo, hi = bp[:-1], bp[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    total = 0.0
    for it in range(max_splits + 1):
        if lo.size == 0:
            break
        x2, w2 = _gl(_GL2, lo, hi)
        x3, w3 = _gl(_GL3, lo, hi)
        xs = np.concatenate([x2.ravel(), x3.ravel()])
        u = resolve_stage(table, xs, np.full(xs.shape, xr), d, mode, rng).utility_L(xs)
        u2 = u[: x2.size].reshape(x2.shape)
        u3 = u[x2.size:].reshape(x3.shape)
        q2 = (u2 * w2).sum(axis=1)
        q3 = (u3 * w3).sum(axis=1)
        # A missed kink shows up as disagreement between the two rules.
        bad = np.abs(q3 - q2) > 1e-14 * (hi - lo) + 1e-16
        if it == max_splits:
            bad[:] = False
        total += float(q3[~bad].sum())
        mid = 0.5 * (lo[bad] + hi[bad])
        lo, hi = np.concatenate([lo[bad], mid]), np.concatenate([mid, hi[bad]])
    return total


def v_quadrature(regime: VoterRegime, pair: Pair, d: float, abs_tol: float = 1e-8,
                 mode: PromiseMode = PromiseMode.UNCAPPED, max_subdivisions: int = 200,
                 tables: Optional[Mapping[TableKey, Table]] = None, seed: int = 0) -> PayoffValue:
    """Integrate candidate L's stage utility over the unit square of draws."""
    if not abs_tol > 0:
        raise ValueError("abs_tol must be positive")
    _check_d(d)
    pair = Pair(pair)
    table = table_for(_as_regime(regime), pair.self_status, pair.opponent, tables)
    rng = np.random.default_rng(seed)

    def outer(xr: float) -> float:
        return _inner_integral(table, xr, d, mode, rng)

    points = sorted({p for p in (d / 2, d, 1.5 * d, 2 * d, 1 - d, 0.5) if 0 < p < 1})
    if max_subdivisions <= len(points):
        raise ValueError(f"max_subdivisions must exceed the {len(points)} break points")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(outer, 0.0, 1.0, points=points or None, epsabs=abs_tol / 4, epsrel=0.0,
                             limit=max_subdivisions, full_output=1)
    value, abserr = res[0], res[1]
    if len(res) > 3 or abserr > abs_tol:
        msg = res[3] if len(res) > 3 else "error estimate above tolerance"
        raise QuadratureError(f"quadrature did not converge within {max_subdivisions} subdivisions "
                              f"(estimate {value}, error {abserr}): {msg}")
    return PayoffValue(float(value), Method.QUADRATURE, error_bound=float(abserr))


# --- Monte Carlo ---------------------------------------------------------------

MC_CHUNK = 1 << 18


def draw_ideals(rng: np.random.Generator, size) -> tuple:
    """Independent uniform draws: x_L on [-1, 0], x_R on [0, 1]."""
    u = rng.random(tuple(np.atleast_1d(size)) + (2,))
    return -u[..., 0], u[..., 1]


def v_monte_carlo(regime: VoterRegime, pair: Pair, d: float, n: int, seed: int = 0,
                  mode: PromiseMode = PromiseMode.UNCAPPED,
                  tables: Optional[Mapping[TableKey, Table]] = None) -> PayoffValue:
    """Sample mean of L's stage utility; stderr is sample std / sqrt(n)."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    _check_d(d)
    pair = Pair(pair)
    table = table_for(_as_regime(regime), pair.self_status, pair.opponent, tables)
    draw_ss, tie_ss = np.random.SeedSequence(seed).spawn(2)
    draw_rng = np.random.Generator(np.random.PCG64(draw_ss))
    tie_rng = np.random.Generator(np.random.PCG64(tie_ss))

    # Chan et al. pairwise merge of (count, mean, M2) per chunk.
    count, mean, m2 = 0, 0.0, 0.0
    remaining = int(n)
    while remaining:
        m = min(MC_CHUNK, remaining)
        xl, xr = draw_ideals(draw_rng, m)
        u = resolve_stage(table, xl, xr, d, mode, tie_rng).utility_L(xl)
        c_mean = float(u.mean())
        c_m2 = float(((u - c_mean) ** 2).sum())
        total = count + m
        delta = c_mean - mean
        mean += delta * m / total
        m2 += c_m2 + delta * delta * count * m / total
        count = total
        remaining -= m
    stderr = 0.0 if n == 1 else math.sqrt(m2 / (n - 1)) / math.sqrt(n)
    return PayoffValue(mean, Method.MONTE_CARLO, stderr=stderr, n=int(n))
