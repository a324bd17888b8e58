"""Parameter sweeps and figure tables written as CSV."""

from __future__ import annotations

import csv
import enum
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from .equilibrium import (
    PRINTED_THRESHOLDS,
    EquilibriumPoint,
    Variant,
    VariantKind,
    d_star_closed,
    d_star_numeric,
    threshold_delta,
)
from .payoffs import Source

SWEEP_COLUMNS = ("delta", "variant", "source", "d_star", "method", "clamped", "threshold_flag")
FIGURE_GRID = np.round(np.arange(50, 100) / 100.0, 2)


class SweepMethod(str, enum.Enum):
    NUMERIC = "numeric"
    CLOSED = "closed"
    BOTH = "both"

    def methods(self) -> Tuple[str, ...]:
        return ("numeric", "closed") if self is SweepMethod.BOTH else (self.value,)


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x) + 0.0, ".10g")  # + 0.0 drops the sign of -0.0
    return str(x)


@dataclass(frozen=True)
class SweepSpec:
    variants: Tuple[Variant, ...]
    delta_from: float
    delta_to: float
    steps: int
    sources: Tuple[Source, ...] = (Source.INTEGRAND_FAITHFUL,)
    out: Path = Path("sweep.csv")
    seed: int = 0
    method: SweepMethod = SweepMethod.NUMERIC
    workers: int = 4
    grid: Tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not self.variants:
            raise ValueError("at least one variant is required")
        if not self.sources:
            raise ValueError("at least one payoff source is required")
        if not isinstance(self.steps, int) or self.steps < 2:
            raise ValueError(f"steps must be an integer >= 2, got {self.steps!r}")
        if not self.delta_from < self.delta_to:
            raise ValueError(f"delta-from ({self.delta_from}) must be below delta-to ({self.delta_to})")
        if self.delta_from < 0 or self.delta_to >= 1:
            raise ValueError("delta grid must lie in [0, 1)")
        if self.method is not SweepMethod.NUMERIC:
            for v in self.variants:
                if v.kind is VariantKind.LIMITED and v.k > 3:
                    raise ValueError(f"no printed closed form for {v}; use --method numeric")
        grid = np.linspace(self.delta_from, self.delta_to, self.steps)
        object.__setattr__(self, "grid", tuple(float(g) for g in np.round(grid, 12)))


def threshold_flag(variant: Variant, delta: float) -> bool:
    """True when delta lies between the printed branch point and the numeric one."""
    printed = PRINTED_THRESHOLDS.get(variant)
    if printed is None:
        return False
    exact = threshold_delta(variant)
    return exact is not None and min(printed, exact) < delta < max(printed, exact)


def _solve(job) -> EquilibriumPoint:
    delta, variant, source, method = job
    if method == "closed":
        return d_star_closed(variant, delta)
    return d_star_numeric(variant, delta, source)


def sweep_rows(spec: SweepSpec) -> List[List[str]]:
    jobs = [(delta, v, s, m)
            for delta in spec.grid
            for v in spec.variants
            for s in spec.sources
            for m in spec.method.methods()]
    # map keeps submission order, so rows come out in grid order
    with ThreadPoolExecutor(max_workers=max(1, spec.workers)) as pool:
        points = list(pool.map(_solve, jobs))
    rows = []
    for (delta, v, s, _), p in zip(jobs, points):
        rows.append([fmt(delta), str(v), s.value, fmt(p.d_star), p.method.value,
                     fmt(p.clamped), fmt(threshold_flag(v, delta))])
    return rows


def render_csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def run_sweep(spec: SweepSpec) -> Path:
    return write_text(spec.out, render_csv(SWEEP_COLUMNS, sweep_rows(spec)))


FIGURE1_COLUMNS = ("delta", "benchmark", "nonnaive_g", "nonnaive_b_printed", "nonnaive_b_faithful")
FIGURE2_COLUMNS = ("delta", "benchmark", "limited_k1", "limited_k2", "limited_k3")


def figure_rows(grid=FIGURE_GRID) -> Tuple[List[List[str]], List[List[str]]]:
    fig1, fig2 = [], []
    for delta in grid:
        delta = float(delta)
        bench = d_star_numeric(Variant.BENCHMARK, delta).d_star
        fig1.append([fmt(delta), fmt(bench),
                     fmt(d_star_numeric(Variant.NON_NAIVE_G, delta).d_star),
                     fmt(d_star_numeric(Variant.NON_NAIVE_B, delta, Source.AS_PRINTED).d_star),
                     fmt(d_star_numeric(Variant.NON_NAIVE_B, delta, Source.INTEGRAND_FAITHFUL).d_star)])
        fig2.append([fmt(delta), fmt(bench)]
                    + [fmt(d_star_numeric(Variant.limited(k), delta).d_star) for k in (1, 2, 3)])
    return fig1, fig2


def emit_figures(out_dir: Path = Path(".")) -> Tuple[Path, Path]:
    out_dir = Path(out_dir)
    fig1, fig2 = figure_rows()
    return (write_text(out_dir / "figure1.csv", render_csv(FIGURE1_COLUMNS, fig1)),
            write_text(out_dir / "figure2.csv", render_csv(FIGURE2_COLUMNS, fig2)))
