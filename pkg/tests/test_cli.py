import csv
import json

import pytest

from credible_promises.cli import main
from credible_promises.equilibrium import Variant
from credible_promises.payoffs import Source
from credible_promises.stage_game import TABLES, RegimeKind, Region, Status
from credible_promises.sweep import SWEEP_COLUMNS, SweepSpec, run_sweep
from credible_promises.verify import CheckStatus, Tolerances, load_ledger, verify_consistency


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def report():
    return verify_consistency()


def test_benchmark_sweep(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--variant", "benchmark", "--delta-from", "0.5", "--delta-to", "0.8",
                 "--steps", "4", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [float(r["d_star"]) for r in rows] == pytest.approx([0.0, 0.381966, 0.768075, 1.0], abs=1e-6)
    assert list(rows[0]) == list(SWEEP_COLUMNS)
    text = out.read_text(encoding="utf-8")
    assert text.endswith("\n")
    assert "0.3819660112" in text


def test_trivial_grid(tmp_path):
    out = run_sweep(SweepSpec((Variant.BENCHMARK,), 0.0, 0.4, 2, out=tmp_path / "t.csv"))
    assert [r["d_star"] for r in read_rows(out)] == ["0", "0"]


def test_all_variants_reproduce_orderings(tmp_path):
    out = tmp_path / "all.csv"
    assert main(["sweep", "--variant", "all", "--delta-from", "0.69", "--delta-to", "0.7", "--steps", "2",
                 "--source", "printed", "--source", "faithful", "--out", str(out)]) == 0
    at = {(r["variant"], r["source"]): float(r["d_star"]) for r in read_rows(out) if r["delta"] == "0.7"}
    for src in ("printed", "faithful"):
        assert at[("nonnaive-b", src)] < at[("nonnaive-g", src)] < at[("benchmark", src)]
        assert at[("limited-k1", src)] < at[("limited-k2", src)] < at[("limited-k3", src)] \
            < at[("benchmark", src)]


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\nvariant = limited\nk = 2\ndelta-from = 0.6\n"
                   "delta_to = 0.7\nsteps = 3\n", encoding="utf-8")
    out = tmp_path / "c.csv"
    assert main(["sweep", "--config", str(cfg), "--steps", "2", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [(r["delta"], r["variant"]) for r in rows] == [("0.6", "limited-k2"), ("0.7", "limited-k2")]


def test_closed_and_numeric_rows(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["sweep", "--variant", "limited-k3", "--delta-from", "0.55", "--delta-to", "0.7",
                 "--steps", "2", "--method", "both", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [r["method"] for r in rows] == ["NumericRoot", "ClosedPrinted"] * 2
    assert rows[0]["threshold_flag"] == "true"
    assert rows[2]["threshold_flag"] == "false"


@pytest.mark.parametrize("argv", [
    ["sweep", "--delta-from", "0.8", "--delta-to", "0.5"],
    ["sweep", "--steps", "1"],
    ["sweep", "--delta-to", "1.0"],
    ["sweep", "--variant", "strategic"],
    ["sweep", "--source", "guess"],
    ["sweep", "--steps", "many"],
    ["sweep", "--variant", "limited-k5", "--method", "closed"],
    ["sweep", "--nonsense"],
    ["simulate", "--horizon", "0"],
    [],
])
def test_invalid_arguments_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "x.csv")] if argv else argv) == 2
    assert not (tmp_path / "x.csv").exists()


def test_io_error_exit_3(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    assert main(["sweep", "--steps", "2", "--out", str(blocker / "s.csv")]) == 3
    assert str(blocker) in capsys.readouterr().err


def test_missing_config_is_io_error(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "none.cfg")]) == 3


def test_sweep_is_byte_identical(tmp_path):
    args = ["sweep", "--variant", "all", "--delta-from", "0.5", "--delta-to", "0.9", "--steps", "9"]
    assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.csv"), "--workers", "1"]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_figures(tmp_path):
    assert main(["figures", "--out", str(tmp_path)]) == 0
    fig1 = {r["delta"]: r for r in read_rows(tmp_path / "figure1.csv")}
    fig2 = {r["delta"]: r for r in read_rows(tmp_path / "figure2.csv")}
    assert len(fig1) == len(fig2) == 50
    row = fig2["0.7"]
    assert [float(row[c]) for c in ("benchmark", "limited_k1", "limited_k2", "limited_k3")] == \
        pytest.approx([0.7680749453, 0.1692076032, 0.4013885298, 0.5294579099], abs=1e-9)
    row = fig2["0.6"]
    assert [float(row[c]) for c in ("benchmark", "limited_k1", "limited_k2", "limited_k3")] == \
        pytest.approx([0.3819660112, 0.0, 0.1579789837, 0.2558962593], abs=1e-9)
    assert float(fig1["0.75"]["benchmark"]) == 1.0
    assert float(fig1["0.75"]["nonnaive_g"]) == 1.0


def test_simulate_writes_trajectory(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["simulate", "--variant", "limited", "--k", "1", "--deviate-L", "always", "--horizon", "30",
                 "--seed", "3", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 30
    t = next(int(r["t"]) for r in rows if r["reneged"] == "true" and r["winner"] == "L")
    assert [rows[t + j]["rep_L"] for j in (1, 2, 3)] == ["B", "B", "G"]


def test_default_verification(report):
    assert report.exit_code == 0
    assert not report.unexpected
    families = {c.family for c in report.documented}
    for fam in ("dstar.nonnaive-b.printed", "payoff.nonnaive.GB.printed", "derivative.nonnaive-b.printed",
                "threshold.nonnaive-g", "threshold.limited-k1", "threshold.limited-k2", "threshold.limited-k3"):
        assert fam in families
    assert len(families) >= 5
    assert families <= set(load_ledger())


def test_every_ledger_entry_is_exercised(report):
    assert set(load_ledger()) <= {c.family for c in report.documented}


def test_degenerate_tolerance_matches_everything():
    r = verify_consistency(Tolerances.uniform(10.0))
    assert all(c.status is CheckStatus.MATCH for c in r.checks)


def test_dropping_integrand_correction_is_caught():
    tables = dict(TABLES)
    key = (RegimeKind.NAIVE, Status.GOOD, Status.BAD)
    # second region implements the winner's own ideal instead of -x_R
    gb = list(tables[key])
    gb[1] = Region(gb[1].name, gb[1].when, "L", lambda xl, xr, d, m: xl)
    tables[key] = tuple(gb)
    r = verify_consistency(tables=tables)
    assert r.exit_code == 1
    assert {c.family for c in r.unexpected} >= {"payoff.naive.GB.printed"}
    assert r.find("payoff.naive.GB.printed@d=0.5").status is CheckStatus.UNEXPECTED


def test_verify_cli_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--out", str(a)]) == 0
    assert main(["verify", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    summary = json.loads(a.read_text(encoding="utf-8"))["summary"]
    assert summary["unexpected-mismatch"] == 0


def test_nonnaive_b_source_in_sweep(tmp_path):
    out = run_sweep(SweepSpec((Variant.NON_NAIVE_B,), 0.6, 0.7, 2,
                              sources=(Source.AS_PRINTED, Source.INTEGRAND_FAITHFUL), out=tmp_path / "b.csv"))
    rows = read_rows(out)
    assert [r["source"] for r in rows] == ["printed", "faithful", "printed", "faithful"]
    assert float(rows[3]["d_star"]) == pytest.approx(0.0483998976, abs=1e-9)
