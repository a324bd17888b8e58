"""Command-line entry point: sweep, figures, verify, simulate."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .dynamics import DeviationPolicy, simulate_history
from .equilibrium import Variant, VariantKind
from .payoffs import Source
from .stage_game import PromiseMode, Reputation, VoterRegime
from .sweep import SweepMethod, SweepSpec, render_csv, write_text, emit_figures, fmt, run_sweep
from .verify import Tolerances, verify_consistency

EXIT_OK, EXIT_MISMATCH, EXIT_ARGS, EXIT_IO = 0, 1, 2, 3

ALL_VARIANTS = ("benchmark", "nonnaive-g", "nonnaive-b", "limited")

DEFAULTS = {
    "sweep": {"variant": "benchmark", "delta_from": "0.5", "delta_to": "0.99", "steps": "50",
              "source": "faithful", "k": "1,2,3", "seed": "0", "out": "sweep.csv", "method": "numeric",
              "workers": "4"},
    "figures": {"out": "."},
    "verify": {"out": "report.json"},
    "simulate": {"variant": "benchmark", "k": "1", "delta": "0.7", "d": "0.3", "horizon": "20",
                 "seed": "0", "out": "trajectory.csv", "deviate_l": "never", "deviate_r": "never",
                 "rep_l": "good", "rep_r": "good", "mode": "uncapped"},
}


class UsageError(ValueError):
    pass


def read_config(path: Path) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, value = (p.strip() for p in line.split("=", 1))
            out[key.replace("-", "_").lower()] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="credible-promises",
                                     description="Maximal credible campaign promises under reputation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="flat key = value file; flags override it")
        p.add_argument("--out", help="output path")

    sw = sub.add_parser("sweep", help="d* over a delta grid, written as CSV")
    common(sw)
    sw.add_argument("--variant", action="append",
                    help="benchmark, nonnaive-g, nonnaive-b, limited, limited-k<k> or all (repeatable)")
    sw.add_argument("--delta-from", dest="delta_from")
    sw.add_argument("--delta-to", dest="delta_to")
    sw.add_argument("--steps")
    sw.add_argument("--source", action="append", help="printed or faithful (repeatable)")
    sw.add_argument("--k", help="comma-separated punishment lengths for 'limited'")
    sw.add_argument("--seed")
    sw.add_argument("--method", help="numeric, closed or both")
    sw.add_argument("--workers")

    fg = sub.add_parser("figures", help="write figure1.csv and figure2.csv into --out")
    common(fg)

    vf = sub.add_parser("verify", help="check printed formulas against numeric oracles")
    common(vf)
    vf.add_argument("--tol", help="one tolerance applied to every check")

    sim = sub.add_parser("simulate", help="simulate a finite history of elections")
    common(sim)
    sim.add_argument("--variant", help="benchmark, nonnaive or limited")
    sim.add_argument("--k")
    sim.add_argument("--delta")
    sim.add_argument("--d")
    sim.add_argument("--horizon")
    sim.add_argument("--seed")
    sim.add_argument("--deviate-L", dest="deviate_l", help="never, always or at:<t>")
    sim.add_argument("--deviate-R", dest="deviate_r", help="never, always or at:<t>")
    sim.add_argument("--rep-L", dest="rep_l", help="good or bad")
    sim.add_argument("--rep-R", dest="rep_r", help="good or bad")
    sim.add_argument("--mode", help="uncapped or capped")
    return parser


def _merge(args: argparse.Namespace) -> Dict[str, object]:
    values: Dict[str, object] = dict(DEFAULTS[args.command])
    if args.config is not None:
        cfg = read_config(args.config)
        unknown = set(cfg) - set(values) - {"tol"}
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(cfg)
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            values[key] = value
    return values


def _split(value) -> List[str]:
    items = value if isinstance(value, list) else [value]
    return [p.strip() for item in items for p in str(item).split(",") if p.strip()]


def _number(values, key, kind=float):
    try:
        return kind(values[key])
    except (TypeError, ValueError):
        raise UsageError(f"--{key.replace('_', '-')} expects a number, got {values[key]!r}") from None


def _variants(names: List[str], ks: List[int]) -> List[Variant]:
    out: List[Variant] = []
    for name in names:
        if name == "all":
            out += _variants(list(ALL_VARIANTS), ks)
        elif name == "limited":
            out += [Variant.limited(k) for k in ks]
        else:
            out.append(Variant.parse(name))
    return list(dict.fromkeys(out))


def _sweep(values) -> int:
    ks = [int(k) for k in _split(values["k"])]
    spec = SweepSpec(
        variants=tuple(_variants(_split(values["variant"]), ks)),
        delta_from=_number(values, "delta_from"),
        delta_to=_number(values, "delta_to"),
        steps=_number(values, "steps", int),
        sources=tuple(dict.fromkeys(Source(s) for s in _split(values["source"]))),
        out=Path(values["out"]),
        seed=_number(values, "seed", int),
        method=SweepMethod(values["method"]),
        workers=_number(values, "workers", int),
    )
    path = run_sweep(spec)
    print(f"wrote {path}")
    return EXIT_OK


def _figures(values) -> int:
    for path in emit_figures(Path(values["out"])):
        print(f"wrote {path}")
    return EXIT_OK


def _verify(values) -> int:
    tol = Tolerances() if values.get("tol") is None else Tolerances.uniform(_number(values, "tol"))
    report = verify_consistency(tol)
    write_text(Path(values["out"]), report.to_json())
    summary = ", ".join(f"{v} {k}" for k, v in report.to_dict()["summary"].items())
    print(f"wrote {values['out']}: {summary}")
    for c in report.unexpected:
        print(f"UNEXPECTED {c.claim_id} ({c.location}): expected {c.expected!r}, got {c.computed!r}",
              file=sys.stderr)
    return report.exit_code


_SIM_COLUMNS = ("t", "x_L", "x_R", "rep_L", "rep_R", "punish_L", "punish_R", "winner", "implemented",
                "utility_L", "utility_R", "reneged", "region")


def _sim_regime(name: str, k: int) -> VoterRegime:
    name = name.strip().lower()
    if name in ("benchmark", "naive"):
        return VoterRegime.naive()
    if name in ("nonnaive", "nonnaive-g", "nonnaive-b", "non-naive"):
        return VoterRegime.non_naive()
    if name == "limited":
        return VoterRegime.limited(k)
    v = Variant.parse(name)
    if v.kind is VariantKind.LIMITED:
        return v.regime
    raise UsageError(f"unknown regime {name!r}")


def _rep(text: str, regime: VoterRegime) -> Reputation:
    t = text.strip().lower()
    if t not in ("good", "bad"):
        raise UsageError(f"reputation must be good or bad, got {text!r}")
    if t == "good":
        return Reputation.good()
    return Reputation.bad() if regime.infinite_punishment else Reputation.bad(regime.k + 1)


def _simulate(values) -> int:
    regime = _sim_regime(str(values["variant"]), _number(values, "k", int))
    mode = {"uncapped": PromiseMode.UNCAPPED, "capped": PromiseMode.CAPPED_AT_MEDIAN}.get(values["mode"])
    if mode is None:
        raise UsageError(f"--mode must be uncapped or capped, got {values['mode']!r}")
    traj = simulate_history(regime, _number(values, "delta"), _number(values, "d"),
                            _number(values, "horizon", int), seed=_number(values, "seed", int),
                            policy_L=DeviationPolicy.parse(values["deviate_l"]),
                            policy_R=DeviationPolicy.parse(values["deviate_r"]),
                            initial_reps=(_rep(values["rep_l"], regime), _rep(values["rep_r"], regime)), mode=mode)
    rows = []
    for r in traj.records:
        o = r.outcome
        rows.append([r.t, fmt(r.x_L), fmt(r.x_R), r.rep_L.status.value, r.rep_R.status.value,
                     fmt(float(r.rep_L.punishment_remaining)), fmt(float(r.rep_R.punishment_remaining)),
                     o.winner.value, fmt(o.implemented), fmt(o.utility_L), fmt(o.utility_R),
                     fmt(o.reneged), o.region])
    write_text(Path(values["out"]), render_csv(_SIM_COLUMNS, rows))
    print(f"wrote {values['out']}: discounted utility L {fmt(traj.discounted_L)}, R {fmt(traj.discounted_R)}")
    return EXIT_OK


_COMMANDS = {"sweep": _sweep, "figures": _figures, "verify": _verify, "simulate": _simulate}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        values = _merge(args)
        return _COMMANDS[args.command](values)
    except OSError as exc:
        where = exc.filename if exc.filename is not None else ""
        print(f"error: I/O failure {where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
