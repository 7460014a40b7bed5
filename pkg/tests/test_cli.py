import json

import pytest

from rarefied import cli
from rarefied.ellgamma import elliptic_gamma
from rarefied.errors import ConvergenceError
from rarefied.verify import read_jsonl


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def value(text):
    re_, im_ = text.split()
    return complex(float(re_), float(im_.rstrip("j")))


class TestParsing:
    def test_complex_forms(self):
        assert cli.parse_complex("0.5,-0.25") == 0.5 - 0.25j
        assert abs(cli.parse_complex("2@0") - 2) < 1e-15
        assert cli.parse_complex(" 0.3 ") == 0.3
        with pytest.raises(cli.ParseError):
            cli.parse_complex("a,b")

    def test_int_list(self):
        assert cli.parse_int_list("1, 2,3") == (1, 2, 3)
        with pytest.raises(cli.ParseError):
            cli.parse_int_list("1,x")

    def test_format_precision(self):
        assert value(cli.fmt_complex(1 / 3 + 2j)) == pytest.approx(1 / 3 + 2j, rel=1e-14)


class TestEval:
    def test_theta_zero(self, capsys):
        code, out, _ = run(capsys, "eval", "theta", "--z", "1", "--p", "0.3")
        assert code == cli.EXIT_OK and value(out) == 0

    def test_gamma(self, capsys):
        code, out, _ = run(capsys, "eval", "gamma", "--z", "0.5,0.2", "--p", "0.2", "--q", "0.1")
        assert code == 0 and abs(value(out) / elliptic_gamma(0.5 + 0.2j, 0.2, 0.1) - 1) < 1e-13

    def test_rarefied_r1(self, capsys):
        _, a, _ = run(capsys, "eval", "gamma", "--z", "0.7@0.4")
        _, b, _ = run(capsys, "eval", "gamma_rarefied", "--z", "0.7@0.4", "--m", "2", "--r", "1")
        assert abs(value(a) / value(b) - 1) < 1e-12

    def test_beta_sides(self, capsys):
        _, lhs, _ = run(capsys, "eval", "beta_lhs", "--r", "2", "--eps", "1", "--seed", "4")
        _, rhs, _ = run(capsys, "eval", "beta_rhs", "--r", "2", "--eps", "1", "--seed", "4")
        assert abs(value(lhs) / value(rhs) - 1) < 1e-8

    def test_params_file(self, capsys, tmp_path):
        from rarefied.kernels import BalancedParams, Kind
        from rarefied.qseries import Bases

        b = Bases(0.2, 0.15, 1)
        P = BalancedParams(Kind.BETA6, [0.6, 0.6, 0.55, 0.55, 0.5, b.pq / (0.6 * 0.6 * 0.55 * 0.55 * 0.5)], [0] * 6)
        path = tmp_path / "p.json"
        path.write_text(json.dumps(P.as_dict()))
        _, lhs, _ = run(capsys, "eval", "beta_lhs", "--params", str(path))
        _, rhs, _ = run(capsys, "eval", "beta_rhs", "--params", str(path))
        assert abs(value(lhs) / value(rhs) - 1) < 1e-10

    def test_pole_exit(self, capsys):
        code, _, err = run(capsys, "eval", "gamma_lens", "--z", "1", "--r", "2")
        assert code == cli.EXIT_POLE and "pole" in err

    def test_parse_exits(self, capsys):
        assert run(capsys, "eval", "theta")[0] == cli.EXIT_PARSE
        assert run(capsys, "eval", "gamma2", "--z", "0.5")[0] == cli.EXIT_PARSE
        assert run(capsys, "eval", "theta", "--z", "x")[0] == cli.EXIT_PARSE
        with pytest.raises(SystemExit) as exc:
            cli.main(["eval", "nosuch"])
        assert exc.value.code == cli.EXIT_PARSE

    def test_convergence_exit(self, capsys, monkeypatch):
        def boom(*a, **k):
            raise ConvergenceError("forced")

        monkeypatch.setattr(cli, "eval_V", boom)
        assert run(capsys, "eval", "V", "--r", "2")[0] == cli.EXIT_CONVERGENCE


class TestVerify:
    def test_small_campaign(self, capsys, tmp_path):
        ini = tmp_path / "c.ini"
        out = tmp_path / "r.jsonl"
        ini.write_text(
            "[campaign]\nidentities = rfint\nseed = 9\n"
            f"output = {out}\n\n[identity:rfint]\nr = 2\neps = 0,1\ndraws = 2\n"
        )
        code, stdout, _ = run(capsys, "verify", str(ini), "--no-timing")
        assert code == 0 and "rfint" in stdout
        recs = read_jsonl(open(out))
        assert len(recs) == 4 and all(r["pass"] for r in recs)
        assert all("wall_time_ms" not in r for r in recs)
        first = out.read_text()
        run(capsys, "verify", str(ini), "--no-timing", "--jobs", "2")
        assert out.read_text() == first

    def test_failure_exit(self, capsys, tmp_path):
        out = tmp_path / "r.jsonl"
        ini = tmp_path / "c.ini"
        ini.write_text(f"[campaign]\nidentities = rfint\noutput = {out}\n\n[identity:rfint]\nr = 2\neps = 0\ndraws = 1\ntolerance = 1e-30\n")
        code, _, err = run(capsys, "verify", str(ini))
        assert code == cli.EXIT_FAIL and "FAIL rfint" in err

    def test_dump_config_round_trip(self, capsys, tmp_path):
        ini = tmp_path / "c.ini"
        ini.write_text("[campaign]\nsuite = limits\nseed = 5\n\n[sampler]\nt_mag_cap = 0.8\n\n[identity:rahman]\nr = 2\ndraws = 1\n")
        code, dumped, _ = run(capsys, "verify", str(ini), "--dump-config", "--seed", "6")
        assert code == 0
        again = tmp_path / "d.ini"
        again.write_text(dumped)
        cfg = cli.load_config(str(again))
        assert (cfg.suite, cfg.seed, cfg.sampler.t_mag_cap) == ("limits", 6, 0.8)
        assert cfg.overrides["rahman"].r == (2,) and cfg.overrides["rahman"].draws == 1
        assert run(capsys, "verify", str(again), "--dump-config")[1] == dumped

    def test_bad_configs(self, capsys, tmp_path):
        bad = tmp_path / "b.ini"
        bad.write_text("[identity:nosuch]\nr = 1\n")
        assert run(capsys, "verify", str(bad), "--dump-config")[0] == cli.EXIT_PARSE
        bad.write_text("[campaign]\nseed = abc\n")
        assert run(capsys, "verify", str(bad), "--dump-config")[0] == cli.EXIT_PARSE
        assert run(capsys, "verify", "--grid", "12", "--dump-config")[0] == cli.EXIT_PARSE
        assert run(capsys, "verify", str(tmp_path / "missing.ini"))[0] == cli.EXIT_PARSE


class TestReport:
    def test_empty(self, capsys, tmp_path):
        f = tmp_path / "e.jsonl"
        f.write_text("")
        code, out, _ = run(capsys, "report", str(f))
        assert code == 0 and "total 0 records" in out

    def test_single_record_and_csv(self, capsys, tmp_path):
        f = tmp_path / "s.jsonl"
        rec = {"identity_id": "rfint", "pass": True, "rel_dev": 1e-13, "grid_used": 64, "tags": {"r": 2, "eps": 1}}
        f.write_text(json.dumps(rec) + "\n")
        csv_path = tmp_path / "s.csv"
        code, out, _ = run(capsys, "report", str(f), "--csv", str(csv_path))
        assert code == 0 and "1/1" in out and "total 1 records, 1 passed" in out
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "identity_id,r,eps,grid_used,rel_dev,pass" and lines[1] == "rfint,2,1,64,1e-13,1"

    def test_malformed(self, capsys, tmp_path):
        f = tmp_path / "m.jsonl"
        f.write_text("[1, 2]\n")
        assert run(capsys, "report", str(f))[0] == cli.EXIT_PARSE
        assert run(capsys, "report", str(tmp_path / "none.jsonl"))[0] == cli.EXIT_PARSE
