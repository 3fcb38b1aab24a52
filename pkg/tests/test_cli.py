import math

import pytest

import freqchan.verify
from freqchan.cli import (EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED,
                          RunManifest, UsageError, main, parse_range,
                          replay_manifest)


def _read(path):
    with open(path, newline="") as fh:
        return fh.read()


class TestParseRange:
    def test_simple_grid(self):
        assert parse_range("0:2:0.5") == [0.0, 0.5, 1.0, 1.5, 2.0]

    def test_endpoint_within_half_step(self):
        # 41 points even though 40 * 0.05 lands on 2.0000000000000004.
        assert len(parse_range("0:2:0.05")) == 41

    def test_endpoint_beyond_half_step_excluded(self):
        assert parse_range("0:2:0.6") == pytest.approx([0.0, 0.6, 1.2, 1.8])

    @pytest.mark.parametrize("bad", [
        "1:0:0.1", "0:0:1", "0:1:0", "0:1:-1", "0:1", "0:1:0.1:2",
        "a:b:c", "0:inf:1",
    ])
    def test_rejects_invalid(self, bad):
        with pytest.raises(UsageError):
            parse_range(bad)


class TestExponentsCommand:
    def test_rc_only_csv_shape(self, tmp_path):
        out = tmp_path / "exp.csv"
        code = main(["exponents", "--r", "400", "--rate", "1.5:1.9:0.2",
                     "--which", "rc", "--out", str(out)])
        assert code == EXIT_OK
        lines = _read(out).split("\n")
        assert lines[0] == "R,E_rc,E_ex,argmax_alpha,argmax_xi,argmax_rho,rho_capped"
        assert len(lines) == 5 and lines[-1] == ""
        cells = lines[1].split(",")
        assert cells[2] == "" and cells[5] == "" and cells[6] == ""
        # 17 significant digits round-trip exactly.
        assert float(cells[1]) == pytest.approx(0.389138027, abs=1e-6)
        assert format(float(cells[1]), ".17g") == cells[1]

    def test_ex_only_flags_column(self, tmp_path):
        out = tmp_path / "exp.csv"
        code = main(["exponents", "--r", "400", "--rate", "0.012:0.014:0.002",
                     "--which", "ex", "--out", str(out)])
        assert code == EXIT_OK
        rows = [ln.split(",") for ln in _read(out).strip().split("\n")[1:]]
        assert all(row[1] == "" and row[3] == "" and row[4] == ""
                   for row in rows)
        assert [row[6] for row in rows] == ["0", "0"]
        assert float(rows[0][5]) > 1.0

    def test_gnuplot_two_columns(self, tmp_path):
        out = tmp_path / "exp.csv"
        gp = tmp_path / "exp.dat"
        main(["exponents", "--r", "400", "--rate", "1.5:1.7:0.2",
              "--which", "rc", "--out", str(out), "--gnuplot", str(gp)])
        for line in _read(gp).strip().split("\n"):
            assert len(line.split(" ")) == 2

    def test_gnuplot_needs_single_curve(self, tmp_path):
        code = main(["exponents", "--r", "400", "--rate", "0:1:1",
                     "--which", "both", "--gnuplot", str(tmp_path / "g.dat"),
                     "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_USAGE

    def test_bad_range_is_usage_error(self, tmp_path):
        code = main(["exponents", "--r", "400", "--rate", "0:0:1",
                     "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_USAGE

    def test_unwritable_path_is_io_error(self):
        code = main(["exponents", "--r", "400", "--rate", "1.5:1.6:0.1",
                     "--which", "rc", "--out", "/nonexistent-dir/x.csv"])
        assert code == EXIT_IO


class TestRatesCommand:
    def test_header_and_converse_column(self, tmp_path):
        out = tmp_path / "rates.csv"
        code = main(["rates", "--r", "100:400:100", "--g", "200,1000",
                     "--out", str(out)])
        assert code == EXIT_OK
        lines = _read(out).strip().split("\n")
        assert lines[0] == "r,R_LB,converse,fir_g200,fir_g1000"
        for line in lines[1:]:
            r, rlb, conv = (float(c) for c in line.split(",")[:3])
            assert conv == pytest.approx(0.5 * math.log(r), rel=1e-15)
            assert rlb < conv

    def test_no_budgets(self, tmp_path):
        out = tmp_path / "rates.csv"
        assert main(["rates", "--r", "10:20:10", "--out", str(out)]) == EXIT_OK
        assert _read(out).split("\n")[0] == "r,R_LB,converse"

    def test_bad_budget_is_usage_error(self, tmp_path):
        code = main(["rates", "--r", "10:20:10", "--g", "10,-5",
                     "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_USAGE

    def test_caveat_recorded_in_manifest(self, tmp_path):
        out = tmp_path / "rates.csv"
        main(["rates", "--r", "10:20:10", "--g", "50", "--out", str(out)])
        manifest = RunManifest.read(str(out) + ".manifest")
        assert "extrapolation" in manifest.note


class TestSimulateCommand:
    ARGS = ["simulate", "--n", "10", "--r", "2", "--M", "8",
            "--trials", "400", "--seed", "42"]

    def test_csv_row_and_determinism(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(self.ARGS + ["--out", str(out1)]) == EXIT_OK
        assert main(self.ARGS + ["--out", str(out2)]) == EXIT_OK
        body1, body2 = _read(out1), _read(out2)
        assert body1 == body2
        header, row, tail = body1.split("\n")
        assert header == ("n,r,alpha,M,R,trials,seed,errors,eps_hat,"
                          "wilson_lo,wilson_hi,thm1_bound")
        assert tail == ""
        cells = row.split(",")
        assert cells[0] == "10" and cells[3] == "8" and cells[6] == "42"

    def test_parallelism_not_in_csv(self, tmp_path):
        out1 = tmp_path / "p1.csv"
        out16 = tmp_path / "p16.csv"
        main(self.ARGS + ["--parallelism", "1", "--out", str(out1)])
        main(self.ARGS + ["--parallelism", "16", "--out", str(out16)])
        assert _read(out1) == _read(out16)

    def test_single_message_zero_errors(self, tmp_path):
        out = tmp_path / "m1.csv"
        main(["simulate", "--n", "4", "--r", "2", "--M", "1", "--trials",
              "50", "--seed", "0", "--out", str(out)])
        row = _read(out).strip().split("\n")[1].split(",")
        assert row[7] == "0" and float(row[8]) == 0.0

    def test_rate_spec(self, tmp_path):
        out = tmp_path / "rate.csv"
        main(["simulate", "--n", "10", "--r", "2", "--R", "0.3", "--trials",
              "50", "--seed", "0", "--out", str(out)])
        row = _read(out).strip().split("\n")[1].split(",")
        assert int(row[3]) == round(math.exp(3.0))

    def test_both_size_specs_rejected(self, tmp_path):
        code = main(["simulate", "--n", "10", "--r", "2", "--M", "4",
                     "--R", "0.3", "--trials", "10", "--seed", "0",
                     "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_USAGE

    def test_fractional_reads_rejected(self, tmp_path):
        code = main(["simulate", "--n", "3", "--r", "0.5", "--M", "2",
                     "--trials", "10", "--seed", "0",
                     "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_USAGE

    def test_env_seed_default(self, tmp_path, monkeypatch):
        out_env = tmp_path / "env.csv"
        out_flag = tmp_path / "flag.csv"
        monkeypatch.setenv("FREQCHAN_SEED", "42")
        main(["simulate", "--n", "10", "--r", "2", "--M", "8",
              "--trials", "400", "--out", str(out_env)])
        monkeypatch.delenv("FREQCHAN_SEED")
        main(self.ARGS + ["--out", str(out_flag)])
        assert _read(out_env) == _read(out_flag)

    def test_bad_env_seed_is_usage_error(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FREQCHAN_SEED", "not-a-number")
        code = main(["simulate", "--n", "10", "--r", "2", "--M", "8",
                     "--trials", "10", "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_USAGE


class TestManifests:
    def test_round_trip(self, tmp_path):
        manifest = RunManifest(command="simulate",
                               parameters={"n": "10", "out": "x.csv"},
                               seed=7, wall_time_s=1.25, note="hello")
        path = tmp_path / "m.manifest"
        manifest.write(str(path))
        back = RunManifest.read(str(path))
        assert back.command == "simulate"
        assert back.parameters == {"n": "10", "out": "x.csv"}
        assert back.seed == 7 and back.note == "hello"

    def test_replay_reproduces_bytes(self, tmp_path):
        out = tmp_path / "sim.csv"
        main(["simulate", "--n", "10", "--r", "2", "--M", "8", "--trials",
              "300", "--seed", "5", "--out", str(out)])
        body = _read(out)
        out.unlink()
        assert replay_manifest(str(out) + ".manifest") == EXIT_OK
        assert _read(out) == body

    def test_flag_parameters_replay(self, tmp_path):
        out = tmp_path / "fixed.csv"
        main(["simulate", "--n", "6", "--r", "2", "--M", "4", "--trials",
              "100", "--seed", "1", "--fixed-codebook", "--out", str(out)])
        manifest = RunManifest.read(str(out) + ".manifest")
        assert manifest.parameters["fixed-codebook"] == "true"
        argv = manifest.replay_argv()
        assert "--fixed-codebook" in argv
        body = _read(out)
        out.unlink()
        assert main(argv) == EXIT_OK
        assert _read(out) == body


class TestVerifyCommand:
    def test_special_suite_passes(self, capsys):
        assert main(["verify", "--suite", "special"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out
        assert "checks=" in out and "failed=0" in out

    def test_failing_check_sets_exit_code(self, monkeypatch, capsys):
        monkeypatch.setitem(
            freqchan.verify.SUITES, "special",
            lambda seed: [("forced failure", False, "injected")])
        assert main(["verify", "--suite", "special"]) == EXIT_VERIFY_FAILED
        assert "FAIL forced failure" in capsys.readouterr().out


class TestUsageSurface:
    def test_unknown_command_is_usage_error(self):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_missing_required_flag_is_usage_error(self):
        assert main(["exponents", "--rate", "0:1:1", "--out", "x.csv"]) \
            == EXIT_USAGE

    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
