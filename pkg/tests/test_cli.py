import csv
import io
import math
import subprocess
import sys

import pytest

from gusqkd.cli import main, parse_angle, parse_grid
from gusqkd.decoy import STATS_COLUMNS
from gusqkd.keyrate import REPORT_COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def sections(text):
    return [s.strip() for s in text.split("\n\n") if s.strip()]


class TestParsers:
    @pytest.mark.parametrize(
        "text, value", [("pi/2", math.pi / 2), ("pi/4", math.pi / 4), ("PI", math.pi), ("3pi/4", 0.75 * math.pi), ("0.5", 0.5)]
    )
    def test_angle(self, text, value):
        assert parse_angle(text) == pytest.approx(value, abs=1e-15)

    def test_grid(self):
        assert parse_grid("0:150:5") == [5.0 * i for i in range(31)]
        assert parse_grid("0.1,0.9") == [0.1, 0.9]


class TestKeyrateSweep:
    def test_default_grid(self, capsys):
        code, out, _ = run(capsys, "keyrate-sweep")
        assert code == 0
        table = rows(out)
        assert tuple(table[0]) == REPORT_COLUMNS
        assert len(table) == 31 * 4 * 2
        assert [float(r["L_km"]) for r in table[:31]] == [5.0 * i for i in range(31)]

    def test_optimum_at_100km(self, capsys):
        _, out, _ = run(capsys, "keyrate-sweep", "--lengths", "100", "--delta-phi", "pi/2")
        best = max(rows(out), key=lambda r: float(r["r_prime"]))
        assert float(best["two_mu"]) == 0.9

    def test_parallel_rows_in_grid_order(self, capsys):
        _, serial, _ = run(capsys, "keyrate-sweep", "--lengths", "0:40:10")
        _, parallel, _ = run(capsys, "keyrate-sweep", "--lengths", "0:40:10", "--workers", "4")
        assert serial == parallel

    def test_svg(self, capsys, tmp_path):
        path = tmp_path / "fig.svg"
        code, _, _ = run(capsys, "keyrate-sweep", "--lengths", "0:100:50", "--format", "svg", "-o", str(path))
        text = path.read_text()
        assert code == 0
        assert text.startswith("<svg") and text.count("<polyline") == 16


class TestUsd:
    def test_columns_and_invariant(self, capsys):
        _, out, _ = run(capsys, "usd")
        table = rows(out)
        assert set(table[0]) == {"n_states", "two_mu", "usd_exact", "usd_tail_bound", "usd_pure_coherent", "usd_safe"}
        assert all(float(r["usd_exact"]) <= float(r["usd_tail_bound"]) for r in table)


class TestFigures:
    def test_fig2(self, capsys):
        _, out, _ = run(capsys, "reproduce-fig2")
        table = rows(out)
        assert len(table) == 4 * 501
        for r in table:
            mean = float(r["two_mu"])
            if mean == 0:
                assert float(r["usd_exact"]) == 0.0
            if r["n_states"] == "2":
                assert float(r["usd_exact"]) == pytest.approx(-math.expm1(-mean), abs=1e-12)
            assert float(r["usd_tail_bound"]) >= float(r["usd_exact"])

    def test_fig2_svg_has_dashed_bounds(self, capsys):
        _, out, _ = run(capsys, "reproduce-fig2", "--format", "svg")
        assert out.count("stroke-dasharray") == 2 * 4

    def test_fig3(self, capsys):
        _, out, _ = run(capsys, "reproduce-fig3")
        assert len(rows(out)) == 31 * 4 * 2


class TestAttackBound:
    def test_columns(self, capsys):
        _, out, _ = run(capsys, "attack-bound", "--points", "11")
        table = rows(out)
        assert tuple(table[0]) == ("q", "ancilla_overlap", "chi", "chi_envelope")
        assert float(table[0]["chi"]) == 0.0
        assert all(float(r["chi_envelope"]) >= float(r["chi"]) for r in table)


class TestSimulate:
    ARGS = ("simulate", "--seed", "1", "--pulses", "200000", "--length", "10")

    def test_layout(self, capsys):
        code, out, _ = run(capsys, *self.ARGS)
        assert code == 0
        stats, bounds, report, checks = sections(out)
        assert out.splitlines()[0] == ",".join(STATS_COLUMNS)
        assert [r["class"] for r in rows(stats)] == ["signal", "decoy1", "decoy2"]
        assert set(rows(bounds)[0]) == {"p0_lower", "p1_lower", "q1_upper", "feasible", "diagnostic"}
        assert tuple(rows(report)[0]) == REPORT_COLUMNS
        assert all(r["consistent"] == "1" for r in rows(checks))

    def test_byte_identical(self, capsys):
        assert run(capsys, *self.ARGS)[1] == run(capsys, *self.ARGS)[1]

    def test_seed_reported_when_absent(self, capsys):
        _, _, err = run(capsys, "simulate", "--pulses", "1000")
        assert err.startswith("seed: ")

    def test_dark_only_session(self, capsys):
        code, out, _ = run(capsys, "simulate", "--seed", "3", "--pulses", "100000", "--two-mu", "0", "--dark-count", "0.02")
        assert code == 0
        stats, _, report, _ = sections(out)
        q_hat = float(rows(stats)[0]["q_hat"])
        assert abs(q_hat - 0.5) < 5 * math.sqrt(0.25 / float(rows(stats)[0]["clicks"]))
        assert float(rows(report)[0]["r_prime"]) <= 0

    def test_invalid_config_exits_nonzero(self, capsys):
        code, _, err = run(capsys, "simulate", "--seed", "1", "--two-nu1", "0.0001", "--two-nu2", "0.01")
        assert code != 0
        assert "decoy2" in err


class TestAnalyze:
    def test_roundtrip_from_stats(self, capsys, tmp_path):
        _, out, _ = run(capsys, "simulate", "--seed", "5", "--pulses", "300000", "--length", "0")
        path = tmp_path / "stats.csv"
        path.write_text(sections(out)[0])
        code, analyzed, _ = run(capsys, "analyze", "--stats", str(path), "--length", "0")
        assert code == 0
        assert sections(analyzed) == sections(out)[:3]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gusqkd", "attack-bound", "--points", "2"], capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("q,ancilla_overlap,chi,chi_envelope\n")
