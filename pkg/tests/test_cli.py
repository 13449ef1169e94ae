import csv
import json
import math
from fractions import Fraction

import pytest

from favardlab.cli import main
from favardlab.favard import check_convexity
from favardlab.ifs import IFS2D, Similitude2D, dump_config


def run(*argv):
    return main(list(argv))


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.fixture
def overlap_config(tmp_path):
    # ratio sum 1 and nesting hold, but alpha decays too fast for the
    # n=3 window bound: the one honest exit-3 certificate input
    pair = IFS2D("overlap-pair",
                 (Similitude2D.of(Fraction(1, 2), 0, 0),
                  Similitude2D.of(Fraction(1, 2), Fraction(1, 4), 0)),
                 (0, 0, 1, 1))
    path = tmp_path / "pair.cfg"
    dump_config(pair, path)
    return str(path)


class TestExitCodes:
    def test_usage_no_subcommand(self, capsys):
        assert run() == 2
        capsys.readouterr()

    def test_usage_missing_source(self, capsys):
        assert run("alpha", "--slope", "1/2") == 2
        capsys.readouterr()

    def test_usage_bad_slope(self, capsys):
        assert run("alpha", "--preset", "four-corner",
                   "--slope", "not-a-slope") == 2
        assert "error:" in capsys.readouterr().err

    def test_usage_unknown_preset(self, capsys):
        assert run("validate", "--preset", "no-such-set") == 2
        capsys.readouterr()

    def test_usage_missing_config_file(self, capsys):
        assert run("validate", "--config", "/nonexistent/x.cfg") == 2
        capsys.readouterr()

    def test_usage_certificate_gasket(self, capsys):
        # ratio sum 3/2 violates the certificate precondition
        assert run("certificate", "--preset", "sierpinski-gasket",
                   "--n", "1") == 2
        capsys.readouterr()

    def test_claim_certificate_fails(self, overlap_config, capsys):
        assert run("certificate", "--config", overlap_config, "--n", "3",
                   "--grid", "16") == 3
        assert "FAIL" in capsys.readouterr().out

    def test_certificate_passes_small_n(self, overlap_config, capsys):
        assert run("certificate", "--config", overlap_config, "--n", "1",
                   "--grid", "16") == 0
        capsys.readouterr()

    def test_claim_convexity_gate(self, monkeypatch, capsys):
        broken = check_convexity([0, 2, 0])
        assert not broken.convex
        monkeypatch.setattr("favardlab.cli.check_convexity",
                            lambda seq: broken)
        assert run("convexity", "--preset", "four-corner",
                   "--slope", "1/2", "--depth", "3") == 3
        assert "NOT convex" in capsys.readouterr().out

    def test_gasket_convexity_exploratory_exit_zero(self, capsys):
        # hypothesis fails, so non-convexity would not be a broken claim
        assert run("convexity", "--preset", "sierpinski-gasket",
                   "--slope", "1/3", "--depth", "4") == 0
        assert "exploratory" in capsys.readouterr().out

    def test_computation_unconverged_favard(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("favard", "--preset", "four-corner", "--n", "1",
                   "--tol", "1e-30", "--refinements", "1",
                   "--out", str(out)) == 1
        payload = json.loads((out / "favard.json").read_text())
        assert payload["status"] == "unconverged"
        capsys.readouterr()

    def test_usage_negative_threads_env(self, monkeypatch, capsys):
        monkeypatch.setenv("FAVARD_LAB_THREADS", "-3")
        assert run("lipschitz", "--preset", "four-corner",
                   "--nodes", "101") == 2
        capsys.readouterr()

    def test_version_exits_zero(self, capsys):
        assert run("--version") == 0
        capsys.readouterr()


class TestOutputs:
    def test_alpha_files_and_schema(self, tmp_path, capsys):
        out = tmp_path / "alpha"
        assert run("alpha", "--preset", "four-corner", "--slope", "1/2",
                   "--depth", "4", "--generations", "--backend", "exact",
                   "--out", str(out)) == 0
        header, rows = read_csv(out / "alpha.csv")
        assert header == ["n", "slope", "sheared", "true"]
        assert len(rows) == 5
        assert rows[0][1] == "1/2"
        assert Fraction(rows[0][2]) == Fraction(3, 2)
        # t=1/2 tiles, so every sheared measure stays 3/2
        assert all(Fraction(r[2]) == Fraction(3, 2) for r in rows)
        scale = 1 / math.sqrt(1.25)
        assert float(rows[0][3]) == pytest.approx(1.5 * scale)

        gheader, grows = read_csv(out / "generations.csv")
        assert gheader == ["n", "chart", "slope", "lo", "hi"]
        assert grows[0] == ["0", "x", "1/2", "0", "3/2"]
        by_n = {}
        for r in grows:
            by_n.setdefault(int(r[0]), []).append(
                (Fraction(r[3]), Fraction(r[4])))
        assert set(by_n) == {0, 1, 2, 3, 4}
        for n, pairs in by_n.items():
            assert sum(hi - lo for lo, hi in pairs) == Fraction(3, 2)

        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["subcommand"] == "alpha"
        assert manifest["parameters"]["snapped_slope"] == "1/2"
        assert manifest["backend"] == "exact"
        assert manifest["wall_time_s"] >= 0
        capsys.readouterr()

    def test_angle_is_snapped_to_rational(self, tmp_path, capsys):
        out = tmp_path / "snap"
        theta = math.atan(0.5)
        assert run("alpha", "--preset", "four-corner",
                   "--angle", str(theta), "--depth", "2",
                   "--out", str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["parameters"]["snapped_slope"] == "1/2"
        capsys.readouterr()

    def test_convexity_files(self, tmp_path, capsys):
        out = tmp_path / "cvx"
        assert run("convexity", "--preset", "four-corner", "--slope", "1/3",
                   "--depth", "5", "--backend", "exact",
                   "--out", str(out)) == 0
        header, rows = read_csv(out / "convexity.csv")
        assert header == ["k", "margin"]
        assert len(rows) == 4
        assert all(Fraction(r[1]) >= 0 for r in rows)
        capsys.readouterr()

    def test_favard_json(self, tmp_path, capsys):
        out = tmp_path / "fav"
        assert run("favard", "--preset", "four-corner", "--n", "0",
                   "--out", str(out)) == 0
        payload = json.loads((out / "favard.json").read_text())
        assert payload["status"] == "converged"
        assert payload["value"] == pytest.approx(8.0, abs=1e-4)
        assert payload["error"] < 1e-6
        capsys.readouterr()

    def test_certificate_files(self, tmp_path, capsys):
        out = tmp_path / "cert"
        assert run("certificate", "--preset", "four-corner", "--n", "2",
                   "--grid", "32", "--out", str(out)) == 0
        header, rows = read_csv(out / "certificate.csv")
        assert header == ["slope", "alpha0", "alpha1", "L", "pass"]
        assert len(rows) == 32
        assert all(r[4] == "true" for r in rows)
        payload = json.loads((out / "certificate.json").read_text())
        assert payload["status"] == "pass"
        assert payload["claimed_bound"] == pytest.approx(1 / 80)
        assert payload["witness"] is None
        capsys.readouterr()

    def test_special_angle(self, tmp_path, capsys):
        out = tmp_path / "sp"
        assert run("special-angle", "--preset", "four-corner",
                   "--slope", "1/2", "--out", str(out)) == 0
        payload = json.loads((out / "special_angle.json").read_text())
        assert payload["tiles"] is True
        assert payload["defect"] == "0"
        assert "tiles" in capsys.readouterr().out

    def test_lipschitz_files(self, tmp_path, capsys):
        out = tmp_path / "lip"
        assert run("lipschitz", "--preset", "four-corner",
                   "--nodes", "401", "--out", str(out)) == 0
        header, rows = read_csv(out / "lipschitz.csv")
        assert header == ["theta", "g"]
        assert len(rows) == 401
        payload = json.loads((out / "lipschitz.json").read_text())
        assert payload["nonnegative"] is True
        assert payload["sup_slope"] < 10.5
        capsys.readouterr()

    def test_dimension_files(self, tmp_path, capsys):
        out = tmp_path / "dim"
        assert run("dimension", "--preset", "sparse-corner(8)",
                   "--depth-min", "3", "--depth-max", "5",
                   "--panels", "2", "--order", "8",
                   "--out", str(out)) == 0
        header, rows = read_csv(out / "decay.csv")
        assert header == ["r", "total", "slope_so_far"]
        assert len(rows) == 3
        assert rows[0][2] == "" and rows[2][2] != ""
        payload = json.loads((out / "fit.json").read_text())
        assert payload["dim_bound"] == pytest.approx(1 - payload["s"])
        assert 0 < payload["s"] < 1
        capsys.readouterr()

    def test_cover_files(self, tmp_path, capsys):
        out = tmp_path / "cov"
        assert run("cover", "--preset", "four-corner", "--slope", "0",
                   "--radius", "1/128", "--exponents", "1/2,3/4",
                   "--intervals", "--out", str(out)) == 0
        header, rows = read_csv(out / "cover.csv")
        assert header == ["r", "count", "min_length", "p", "holder_sum"]
        assert [r[3] for r in rows] == ["1/2", "3/4"]
        payload = json.loads((out / "cover.json").read_text())
        assert payload["floor_ok"] is True
        iheader, irows = read_csv(out / "intervals.csv")
        assert iheader == ["lo", "hi"]
        assert int(payload["count"]) == len(irows)
        capsys.readouterr()

    def test_counterexample_default_lattice(self, tmp_path, capsys):
        out = tmp_path / "ce"
        assert run("counterexample", "--out", str(out)) == 0
        header, rows = read_csv(out / "neighborhood.csv")
        assert header == ["n", "measure"]
        assert [r[1] for r in rows] == \
            ["102", "201/2", "401/8", "401/32", "401/128"]
        payload = json.loads((out / "counterexample.json").read_text())
        assert payload["convex"] is False
        assert payload["first_violation"] == 1
        assert "NOT convex" in capsys.readouterr().out

    def test_counterexample_seesaw(self, tmp_path, capsys):
        out = tmp_path / "ss"
        assert run("counterexample", "--seesaw", "0,1/4,5;20,1/64,3",
                   "--n-max", "5", "--out", str(out)) == 0
        header, rows = read_csv(out / "convexity.csv")
        signs = [1 if Fraction(r[1]) > 0 else -1 for r in rows]
        changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
        assert changes >= 2
        capsys.readouterr()

    def test_counterexample_points_file(self, tmp_path, capsys):
        pts = tmp_path / "pts.txt"
        pts.write_text("# two points\n0\n1/2\n")
        out = tmp_path / "pf"
        assert run("counterexample", "--points-file", str(pts),
                   "--base", "2", "--n-max", "3", "--out", str(out)) == 0
        _, rows = read_csv(out / "neighborhood.csv")
        # n=0 radius is 1: [-1, 1] u [-1/2, 3/2] has measure 5/2
        assert Fraction(rows[0][1]) == Fraction(5, 2)
        # n=1 radius 1/2: [-1/2, 1] exactly
        assert Fraction(rows[1][1]) == Fraction(3, 2)
        capsys.readouterr()

    def test_needle_json(self, tmp_path, capsys):
        out = tmp_path / "ndl"
        assert run("needle", "--preset", "four-corner", "--n", "1",
                   "--trials", "20000", "--seed", "7",
                   "--out", str(out)) == 0
        payload = json.loads((out / "needle.json").read_text())
        assert payload["trials"] == 20000
        assert payload["seed"] == 7
        assert payload["hits"] > 0
        assert payload["estimate"] == pytest.approx(6.6, abs=0.5)
        capsys.readouterr()

    def test_validate_json(self, tmp_path, capsys):
        out = tmp_path / "val"
        assert run("validate", "--preset", "four-corner",
                   "--out", str(out)) == 0
        payload = json.loads((out / "validate.json").read_text())
        assert payload["ratio_sum"] == "1"
        assert payload["nesting"] == "pass"
        capsys.readouterr()

    def test_presets_listing(self, capsys):
        assert run("presets") == 0
        out = capsys.readouterr().out
        assert "four-corner" in out
        assert "sierpinski-gasket" in out


class TestRoundTrip:
    def test_dumped_preset_reproduces_alpha(self, tmp_path, capsys):
        assert run("presets", "--dump", "four-corner") == 0
        cfg_text = capsys.readouterr().out
        cfg = tmp_path / "fc.cfg"
        cfg.write_text(cfg_text)

        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        args = ("--slope", "2/5", "--depth", "5", "--backend", "exact")
        assert run("alpha", "--preset", "four-corner", *args,
                   "--out", str(out_a)) == 0
        assert run("alpha", "--config", str(cfg), *args,
                   "--out", str(out_b)) == 0
        assert (out_a / "alpha.csv").read_bytes() == \
            (out_b / "alpha.csv").read_bytes()
        capsys.readouterr()

    def test_threads_env_matches_flag(self, tmp_path, monkeypatch, capsys):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert run("favard", "--preset", "four-corner", "--n", "1",
                   "--threads", "2", "--out", str(out_a)) == 0
        monkeypatch.setenv("FAVARD_LAB_THREADS", "2")
        assert run("favard", "--preset", "four-corner", "--n", "1",
                   "--out", str(out_b)) == 0
        a = json.loads((out_a / "favard.json").read_text())
        b = json.loads((out_b / "favard.json").read_text())
        assert a["value"] == b["value"]
        capsys.readouterr()

    def test_steep_slope_switches_chart(self, tmp_path, capsys):
        out = tmp_path / "steep"
        assert run("alpha", "--preset", "four-corner", "--slope", "5/2",
                   "--depth", "2", "--out", str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["parameters"]["chart"] == "y"
        assert manifest["parameters"]["snapped_slope"] == "2/5"
        capsys.readouterr()
