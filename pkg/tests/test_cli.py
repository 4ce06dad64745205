"""CLI contract: spec parsing, exit codes, artifact determinism."""

import json
import math
import time

import numpy as np
import pytest

from loewnerqc.cli import main


def write_spec(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def run(tmp_path, *argv):
    return main([str(a) for a in argv])


class TestEvolve:
    def test_constant_field_rows(self, tmp_path):
        spec = write_spec(tmp_path, "ev.json", {
            "schema_version": 1, "setting": "radial",
            "field": {"kind": "constant", "value": [1.0, 0.0]},
            "start": [[0.5, 0.0]], "t_start": 0.0, "t_end": 1.0,
            "samples": 11})
        out = tmp_path / "out"
        assert main(["evolve", "--spec", str(spec), "--out", str(out)]) == 0
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "t,re,im"
        assert len(lines) == 12
        for row in lines[1:]:
            t, re, im = map(float, row.split(","))
            assert abs(complex(re, im) - 0.5 * math.exp(-t)) < 1e-9

    def test_chordal_zero_driving(self, tmp_path):
        spec = write_spec(tmp_path, "ch.json", {
            "schema_version": 1, "setting": "chordal",
            "field": {"kind": "schramm", "driving": {"kind": "zero"}},
            "start": [[1.0, 0.0]], "t_end": 1.0, "samples": 6})
        out = tmp_path / "out"
        assert main(["evolve", "--spec", str(spec), "--out", str(out)]) == 0
        for row in (out / "trajectory.csv").read_text().splitlines()[1:]:
            t, re, im = map(float, row.split(","))
            assert abs(complex(re, im) - math.sqrt(1 + 2 * t)) < 1e-8

    def test_malformed_spec_no_partial_files(self, tmp_path):
        spec = write_spec(tmp_path, "bad.json", {
            "schema_version": 1, "setting": "radial", "mystery": 1,
            "field": {"kind": "constant", "value": [1, 0]},
            "start": [[0.5, 0]]})
        out = tmp_path / "out"
        assert main(["evolve", "--spec", str(spec), "--out", str(out)]) == 2
        assert not out.exists()

    def test_wrong_schema_version(self, tmp_path):
        spec = write_spec(tmp_path, "v2.json", {
            "schema_version": 2,
            "field": {"kind": "constant", "value": [1, 0]},
            "start": [[0.5, 0]]})
        assert main(["evolve", "--spec", str(spec),
                     "--out", str(tmp_path / "o")]) == 2

    def test_unreadable_spec(self, tmp_path):
        assert main(["evolve", "--spec", str(tmp_path / "absent.json"),
                     "--out", str(tmp_path / "o")]) == 2


EXTEND_F2 = {
    "schema_version": 1,
    "chain": {"kind": "starlike", "base": {"name": "scaled-koebe", "k": 0.2}},
    "extension": {"method": "becker", "k": 0.2},
    "grid": {"interior": [0.1, 0.95], "exterior": [1.05, 2.0],
             "radii": 16, "angles": 48},
}


class TestExtend:
    def test_extremal_pass(self, tmp_path):
        spec = write_spec(tmp_path, "f2.json", EXTEND_F2)
        out = tmp_path / "out"
        assert main(["extend", "--spec", str(spec), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["passed"] is True
        assert report["verification"]["max_abs_mu"] <= 0.205
        assert (out / "grid.csv").exists()
        assert (out / "heatmap.ppm").read_bytes().startswith(b"P6\n")

    def test_koebe_fails_with_witness(self, tmp_path, capsys):
        obj = dict(EXTEND_F2)
        obj["chain"] = {"kind": "starlike", "base": {"name": "koebe"}}
        obj["extension"] = {"method": "becker", "k": 0.5}
        spec = write_spec(tmp_path, "koebe.json", obj)
        out = tmp_path / "out"
        assert main(["extend", "--spec", str(spec), "--out", str(out)]) == 1
        report = json.loads((out / "report.json").read_text())
        assert report["passed"] is False
        assert "witness" in report
        assert "U(" in capsys.readouterr().err

    def test_sector_example(self, tmp_path):
        spec = write_spec(tmp_path, "sec.json", {
            "schema_version": 1, "example": {"number": 3, "beta": 0.5},
            "grid": {"interior": [0.1, 0.95], "exterior": [1.05, 2.0],
                     "radii": 16, "angles": 48}})
        out = tmp_path / "out"
        assert main(["extend", "--spec", str(spec), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert abs(report["verification"]["max_abs_mu"] - 0.5) < 5e-3

    def test_grid_override_flag(self, tmp_path):
        spec = write_spec(tmp_path, "f2.json", EXTEND_F2)
        out = tmp_path / "out"
        assert main(["extend", "--spec", str(spec), "--out", str(out),
                     "--grid", "8x24"]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["verification"]["grid"]["radii"] == 8

    def test_unknown_extension_key(self, tmp_path):
        obj = dict(EXTEND_F2)
        obj["extension"] = {"method": "becker", "k": 0.2, "bogus": 1}
        spec = write_spec(tmp_path, "bad.json", obj)
        assert main(["extend", "--spec", str(spec),
                     "--out", str(tmp_path / "o")]) == 2


class TestCheck:
    def test_sugawa_extremal(self, tmp_path):
        spec = write_spec(tmp_path, "s.json", {
            "schema_version": 1, "criterion": "sugawa",
            "function": {"name": "scaled-koebe", "k": 0.2},
            "quantity": "zf'/f", "k": 0.2})
        out = tmp_path / "out"
        assert main(["check", "--spec", str(spec), "--out", str(out)]) == 0
        verdict = json.loads((out / "verdict.json").read_text())
        assert verdict["passed"] is True
        assert 0.18 <= verdict["measured_sup"] <= 0.2

    def test_ahlfors_becker_identity(self, tmp_path):
        spec = write_spec(tmp_path, "ab.json", {
            "schema_version": 1, "criterion": "ahlfors-becker",
            "function": {"name": "identity"}, "c": [0.0, 0.0], "k": 0.0})
        out = tmp_path / "out"
        assert main(["check", "--spec", str(spec), "--out", str(out)]) == 0
        verdict = json.loads((out / "verdict.json").read_text())
        assert verdict["measured_sup"] == 0.0

    def test_classify_koebe(self, tmp_path):
        spec = write_spec(tmp_path, "cl.json", {
            "schema_version": 1, "criterion": "classify",
            "function": {"name": "koebe"}})
        out = tmp_path / "out"
        assert main(["check", "--spec", str(spec), "--out", str(out)]) == 0
        labels = json.loads((out / "verdict.json").read_text())
        assert labels["starlike"]["passed"] is True
        assert labels["convex"]["passed"] is False

    def test_unknown_criterion(self, tmp_path):
        spec = write_spec(tmp_path, "x.json", {
            "schema_version": 1, "criterion": "spectral-gap",
            "function": {"name": "identity"}})
        assert main(["check", "--spec", str(spec),
                     "--out", str(tmp_path / "o")]) == 2

    def test_unknown_function(self, tmp_path):
        spec = write_spec(tmp_path, "x.json", {
            "schema_version": 1, "criterion": "sugawa",
            "function": {"name": "zeta"}})
        assert main(["check", "--spec", str(spec),
                     "--out", str(tmp_path / "o")]) == 2


class TestSuite:
    def test_runs_clean_within_budget(self, tmp_path, capsys):
        out = tmp_path / "out"
        t0 = time.perf_counter()
        rc = main(["suite", "--out", str(out), "--seed", "20240715"])
        elapsed = time.perf_counter() - t0
        assert rc == 0
        assert elapsed <= 120.0
        summary = json.loads((out / "suite.json").read_text())
        assert summary["failures"] == 0
        stdout = capsys.readouterr().out
        assert "PASS" in stdout and "FAIL" not in stdout

    def test_deterministic_per_seed(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["suite", "--out", str(out1), "--seed", "7"]) == 0
        assert main(["suite", "--out", str(out2), "--seed", "7"]) == 0
        assert (out1 / "suite.json").read_bytes() == \
            (out2 / "suite.json").read_bytes()


class TestDeterminism:
    def test_extend_outputs_byte_identical(self, tmp_path):
        spec = write_spec(tmp_path, "f2.json", EXTEND_F2)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert main(["extend", "--spec", str(spec), "--out", str(out1)]) == 0
        assert main(["extend", "--spec", str(spec), "--out", str(out2)]) == 0
        for name in ("report.json", "grid.csv", "heatmap.ppm"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_evolve_outputs_byte_identical(self, tmp_path):
        spec = write_spec(tmp_path, "ev.json", {
            "schema_version": 1, "setting": "radial",
            "field": {"kind": "cayley-reflected"},
            "start": [[0.4, 0.2]], "t_end": 1.5, "samples": 21})
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert main(["evolve", "--spec", str(spec), "--out", str(out1)]) == 0
        assert main(["evolve", "--spec", str(spec), "--out", str(out2)]) == 0
        assert (out1 / "trajectory.csv").read_bytes() == \
            (out2 / "trajectory.csv").read_bytes()
