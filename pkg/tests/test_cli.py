import csv
import io
import json
import os
import shutil
import subprocess
import sys

import pytest

from siegel_lambert.characters import principal_character
from siegel_lambert.cli import (CSV_COLUMNS, EXIT_ERROR, EXIT_FAIL, EXIT_PASS, REPORT_COMPONENTS,
                                ConfigError, RunConfig, emit_report, load_config, main,
                                validate_report_json)
from siegel_lambert.identity import IdentityTask, verify_identity
from siegel_lambert.providers import write_pair_model_file
from siegel_lambert.zeros import read_zero_file


@pytest.fixture(scope="module")
def report(sk10):
    return verify_identity(IdentityTask(sk10, principal_character(1), 1.0))


class TestVerifyCommand:
    def test_main_run(self, tmp_path):
        out = tmp_path / "r.json"
        code = main(["verify", "--model", "sk:10", "--character", "1.0", "--alpha", "1",
                     "--zero-height", "50", "--out", str(out)])
        obj = json.loads(out.read_text())
        validate_report_json(obj)
        assert code == EXIT_PASS
        assert obj["rel_residual"] <= 1e-6
        assert obj["metadata"]["zero_provenance"] == "computed"
        assert set(obj["truncation_bounds"]) >= {"lhs", "whittaker_sum", "zero_sum"}

    def test_deterministic(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            main(["verify", "--alpha", "1", "--out", str(p)])
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_fail_exit_code(self, tmp_path, sk10):
        # coefficients that disagree with the attached evaluator
        coeffs = tmp_path / "c.txt"
        write_pair_model_file(coeffs, sk10)
        lines = coeffs.read_text().splitlines()
        lines[1] = "1 2 0"
        coeffs.write_text("\n".join(lines) + "\n")
        out = tmp_path / "r.json"
        assert main(["verify", "--model", str(coeffs), "--out", str(out)]) == EXIT_FAIL
        assert json.loads(out.read_text())["passed"] is False

    def test_ingested_zeros(self, tmp_path):
        zfile = tmp_path / "z.txt"
        assert main(["zeros", "--height", "50", "--out", str(zfile)]) == EXIT_PASS
        out = tmp_path / "r.json"
        code = main(["verify", "--zeros-file", str(zfile), "--out", str(out)])
        assert code == EXIT_PASS
        assert json.loads(out.read_text())["metadata"]["zero_provenance"] == "ingested"

    def test_csv(self, tmp_path):
        out = tmp_path / "r.csv"
        main(["verify", "--format", "csv", "--out", str(out)])
        rows = list(csv.reader(io.StringIO(out.read_text())))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert [r[0] for r in rows[1:]] == list(REPORT_COMPONENTS)


class TestOtherCommands:
    def test_zeros_file(self, tmp_path):
        out = tmp_path / "zeros.txt"
        assert main(["zeros", "--character", "1.0", "--height", "50", "--out", str(out)]) == 0
        assert len(read_zero_file(out, "1.0")) == 10

    def test_asymptote_csv(self, tmp_path):
        out = tmp_path / "a.csv"
        code = main(["asymptote", "--model", "sk:10", "--alphas", "0.05,0.02,0.01",
                     "--format", "csv", "--out", str(out)])
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert code == EXIT_PASS
        ratios = [float(r["ratio"]) for r in rows]
        assert abs(ratios[-1] - 1) <= 1e-3
        assert [abs(r - 1) for r in ratios] == sorted((abs(r - 1) for r in ratios), reverse=True)

    def test_tabulate(self, tmp_path):
        out = tmp_path / "t.json"
        assert main(["tabulate", "--alphas", "1,0.8", "--out", str(out)]) == EXIT_PASS
        data = json.loads(out.read_text())
        assert len(data) == 2
        for obj in data:
            validate_report_json(obj)

    def test_contour(self, tmp_path):
        out = tmp_path / "c.json"
        assert main(["contour", "--T", "30", "--out", str(out)]) == EXIT_PASS
        obj = json.loads(out.read_text())
        assert obj["balance"] <= 1e-7 and obj["zero_count"] == 3


class TestConfig:
    def test_defaults(self):
        cfg = load_config(["verify"])
        assert cfg == RunConfig(command="verify")

    @pytest.mark.parametrize("in_file,flag,expected", [
        (None, None, 1.0),
        (0.5, None, 0.5),
        (None, "2", 2.0),
        (0.5, "2", 2.0),
    ])
    def test_precedence(self, tmp_path, in_file, flag, expected):
        argv = ["verify"]
        if in_file is not None:
            path = tmp_path / "cfg.json"
            path.write_text(json.dumps({"alpha": in_file, "zero_height": 30}))
            argv += ["--config", str(path)]
        if flag is not None:
            argv += ["--alpha", flag]
        cfg = load_config(argv)
        assert cfg.alpha == expected
        assert cfg.zero_height == (30 if in_file is not None else 50.0)

    @pytest.mark.parametrize("argv,field", [
        (["verify", "--alpha", "-1"], "alpha"),
        (["verify", "--zero-height", "0"], "zero_height"),
        (["verify", "--C0", "-3"], "C0"),
        (["verify", "--tolerance", "0"], "tolerance"),
        (["verify", "--model", "/nonexistent/file"], "model"),
        (["asymptote", "--alphas", "0.1,-2"], "alphas"),
        (["zeros"], "out"),
    ])
    def test_field_errors(self, argv, field):
        with pytest.raises(ConfigError, match=f"^{field}:"):
            load_config(argv)

    def test_unknown_config_key(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"alpah": 1}))
        with pytest.raises(ConfigError, match="alpah"):
            load_config(["verify", "--config", str(path)])

    def test_error_exit_and_attribution(self, tmp_path, capsys):
        path = tmp_path / "z.txt"
        path.write_text("# character=1.0 count=2 error=0\n20\n10\n")
        code = main(["verify", "--zeros-file", str(path), "--out", str(tmp_path / "r.json")])
        assert code == EXIT_ERROR
        assert "error [zeros:ParseError]: line 3" in capsys.readouterr().err
        code = main(["verify", "--character", "5.2"])
        assert code == EXIT_ERROR
        assert "[dirichlet_series:CharacterError]" in capsys.readouterr().err


class TestEmit:
    def test_json_schema(self, report):
        validate_report_json(json.loads(emit_report(report, "json", os.devnull)))

    def test_schema_rejects(self):
        with pytest.raises(ValueError):
            validate_report_json({"components": {}})

    def test_csv_rows(self, report):
        text = emit_report(report, "csv", os.devnull)
        assert len(text.strip().splitlines()) == len(REPORT_COMPONENTS) + 1

    @pytest.mark.parametrize("fmt", ["json", "csv"])
    def test_reemit_identical(self, report, tmp_path, fmt):
        a, b = tmp_path / "a", tmp_path / "b"
        emit_report(report, fmt, str(a))
        emit_report(report, fmt, str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_unwritable(self, report, tmp_path):
        with pytest.raises(OSError):
            emit_report(report, "json", str(tmp_path / "missing" / "r.json"))


@pytest.mark.skipif(shutil.which("siegel-lambert") is None, reason="console script not installed")
def test_console_script(tmp_path):
    env = dict(os.environ, SIEGEL_LAMBERT_CACHE=os.environ["SIEGEL_LAMBERT_CACHE"])
    res = subprocess.run(["siegel-lambert", "verify", "--out", str(tmp_path / "r.json")],
                         capture_output=True, text=True, env=env, timeout=600)
    assert res.returncode == 0, res.stderr
    res = subprocess.run([sys.executable, "-m", "siegel_lambert", "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "verify" in res.stdout and "SIEGEL_LAMBERT_CACHE" in res.stdout
