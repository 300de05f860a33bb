"""Tests for the command-line front end: formats, determinism, exit codes."""

import io
import math
import xml.etree.ElementTree as ET
from contextlib import redirect_stdout

import pytest

from hypermap import __version__
from hypermap.cli import run


def run_capture(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(argv)
    return code, buf.getvalue()


def parse_csv(text):
    lines = text.strip().splitlines()
    assert lines[0].startswith("# hypermap")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return header, rows


class TestConstants:
    def test_k1_delta_star(self):
        code, out = run_capture(["constants", "--k", "1"])
        assert code == 0
        header, rows = parse_csv(out)
        values = {r[0]: r[1] for r in rows}
        # the closed form evaluates to 0.2626786 (a linearized evaluation
        # would give 0.262665, 1.4e-5 lower)
        assert float(values["delta_star"]) == pytest.approx(0.262665, abs=5e-5)
        assert float(values["delta_star"]) == pytest.approx(
            math.acos(-1 / (4 * math.pi)) / (2 * math.pi), rel=1e-15
        )

    def test_strip_rows_with_m(self):
        code, out = run_capture(["constants", "--k", "10", "--m", "3"])
        assert code == 0
        _, rows = parse_csv(out)
        names = [r[0] for r in rows]
        assert "delta_(3)" in names and "delta_(-3)" in names

    def test_undefined_flagged(self):
        code, out = run_capture(["constants", "--k", "0.3"])
        assert code == 0
        _, rows = parse_csv(out)
        flags = {r[0]: r[2] for r in rows}
        assert flags["delta_hat_T_plus"] == "false"
        assert flags["delta_plus"] == "true"


class TestField:
    def test_grid8_symmetry(self):
        code, out = run_capture(["field", "--k", "3", "--time", "forward", "--grid", "8"])
        assert code == 0
        _, rows = parse_csv(out)
        assert len(rows) == 8
        theta = [float(r[2]) for r in rows]
        for j in (1, 2, 3):
            assert theta[j] == pytest.approx(theta[8 - j], abs=1e-12)

    def test_header_records_parameters(self):
        _, out = run_capture(["field", "--k", "3", "--grid", "4", "--seed", "99"])
        head = out.splitlines()[0]
        assert f"hypermap {__version__}" in head
        assert "k=3" in head and "seed=99" in head and "grid=4" in head


class TestDeterminism:
    def test_byte_identical_reruns(self):
        argv = ["cones", "--k", "25", "--m", "2", "--samples", "30000", "--seed", "42", "--format", "csv"]
        _, a = run_capture(argv)
        _, b = run_capture(argv)
        assert a == b

    def test_tangency_deterministic(self):
        argv = ["tangency", "--k", "2", "--grid", "64"]
        _, a = run_capture(argv)
        _, b = run_capture(argv)
        assert a == b


class TestCones:
    def test_exit_code_matches_failures(self):
        code, out = run_capture(
            ["cones", "--k", "25", "--m", "2", "--samples", "20000", "--format", "csv"]
        )
        _, rows = parse_csv(out)
        failures = int(float({r[0]: r[1] for r in rows}["failures"]))
        assert code == (0 if failures == 0 else 1)

    def test_negative_control_fails(self):
        code, out = run_capture(
            ["cones", "--k", "25", "--m", "2", "--samples", "5000", "--inside-strip", "--format", "csv"]
        )
        assert code == 1
        _, rows = parse_csv(out)
        assert int(float({r[0]: r[1] for r in rows}["failures"])) > 0

    def test_slope_failures_zero(self):
        _, out = run_capture(
            ["cones", "--k", "25", "--m", "5", "--samples", "50000", "--format", "csv"]
        )
        _, rows = parse_csv(out)
        values = {r[0]: r[1] for r in rows}
        assert int(float(values["slope_failures"])) == 0
        assert 0.8 < float(values["slope_min"]) <= float(values["slope_max"]) < 1.2


class TestLeaf:
    def test_csv_columns(self):
        code, out = run_capture(
            ["leaf", "--k", "10", "--field", "F1", "--x", "0.3", "--y", "0.2513",
             "--max-arc", "1.5", "--step", "0.001"]
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["seg_id", "x", "y"]
        assert len(rows) > 100
        for r in rows[:50]:
            assert 0.0 <= float(r[1]) <= 1.0 and 0.0 <= float(r[2]) <= 1.0

    def test_svg_parses(self):
        code, out = run_capture(
            ["leaf", "--k", "10", "--field", "E1", "--y", "0.6", "--max-arc", "1.0",
             "--format", "svg"]
        )
        assert code == 0
        root = ET.fromstring(out)
        assert root.tag.endswith("svg")
        assert root.get("viewBox") == "0 0 1 1"


class TestTangencyCommand:
    def test_rows_and_landmarks(self):
        code, out = run_capture(["tangency", "--k", "2", "--grid", "64"])
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["kind", "name", "ytilde", "y", "x", "branch", "residual"]
        curve_rows = [r for r in rows if r[0] == "curve"]
        landmark_rows = [r for r in rows if r[0] == "landmark"]
        assert len(curve_rows) == 128  # both branches
        assert [r[1] for r in landmark_rows] == [f"P{i}" for i in range(1, 9)]
        assert all(float(r[6]) < 1e-8 for r in rows)


class TestVerify:
    def test_default_klist_passes(self):
        code, out = run_capture(["verify", "--k-list", "1,5"])
        assert code == 0
        assert "result PASS" in out
        assert "FAIL" not in out.replace("result PASS", "")


class TestFigures:
    def test_writes_svg_set(self, tmp_path):
        outdir = tmp_path / "figs"
        code, _ = run_capture(
            ["figures", "--k", "1", "--grid", "256", "--step", "0.005", "--out", str(outdir)]
        )
        assert code == 0
        names = sorted(p.name for p in outdir.glob("*.svg"))
        assert names == [
            "foliation_backward.svg",
            "foliation_forward.svg",
            "phi_backward.svg",
            "phi_forward.svg",
            "tangency_plane.svg",
            "tangency_torus.svg",
            "theta_backward.svg",
            "theta_forward.svg",
        ]
        for p in outdir.glob("*.svg"):
            ET.parse(p)  # well-formed XML

    def test_forward_foliation_shows_closed_leaves(self, tmp_path):
        # The bold closed leaves sit at render height 1 - delta^* and
        # delta^* (the y axis is flipped into screen coordinates).
        outdir = tmp_path / "figs"
        run(["figures", "--k", "1", "--grid", "128", "--step", "0.01", "--out", str(outdir)])
        text = (outdir / "foliation_forward.svg").read_text()
        delta_star = math.acos(-1 / (4 * math.pi)) / (2 * math.pi)
        assert f"{1 - delta_star:.6f}" in text
        assert 'stroke="#108010"' in text


class TestArgumentErrors:
    def test_unknown_subcommand(self):
        assert run(["frobnicate"]) == 2

    def test_bad_k(self):
        assert run(["constants", "--k", "-1"]) == 2

    def test_no_args(self):
        assert run([]) == 2
