import json
import re
from pathlib import Path

import pytest

from gnplab import __version__
from gnplab.cli import main
from gnplab.io import CsvWriter, dumps, metadata, read_csv, write_json
from gnplab.probe import ResampleTrialRecord
import gnplab.probe as probe_mod

GOLDEN = json.loads((Path(__file__).parent / "golden" / "schemas.json").read_text())

TS = re.compile(r'"timestamp": ?"[^"]*"')


def strip_ts(text):
    return TS.sub('"timestamp": null', text)


def run(argv, capsys=None):
    code = main([str(a) for a in argv])
    return code


def files(d):
    return {p.relative_to(d).as_posix(): strip_ts(p.read_text())
            for p in sorted(Path(d).rglob("*")) if p.is_file()}


def csv_header(path):
    lines = Path(path).read_text().splitlines()
    assert lines[0].startswith("# ")
    meta = json.loads(lines[0][2:])
    return meta, lines[1].split(",")


class TestSchemas:
    def test_probe(self, tmp_path):
        assert run(["probe", "--mode", "giant", "--n", 2000, "--c", 2, "--ell", 2,
                    "--trials", 5, "--out", tmp_path]) == 0
        meta, cols = csv_header(tmp_path / "trials.csv")
        assert cols == GOLDEN["probe_csv"]
        assert set(meta) == set(GOLDEN["meta"])
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert list(summary) == GOLDEN["probe_summary"]

    def test_clt(self, tmp_path):
        assert run(["clt", "--mode", "giant", "--n", "1000,2000", "--c", 2, "--ell", "2,4",
                    "--trials", 100, "--out", tmp_path]) == 0
        for n in (1000, 2000):
            _, cols = csv_header(tmp_path / f"trials_{n}.csv")
            assert cols == GOLDEN["clt_csv_ell_2_4"]
        rep = json.loads((tmp_path / "report.json").read_text())
        assert list(rep) == GOLDEN["clt_report"]
        assert list(rep["per_n"]["1000"]["normality"]) == GOLDEN["normality"]
        assert list(rep["variance_scaling"]) == GOLDEN["variance_scaling"]

    def test_census(self, tmp_path):
        out = tmp_path / "c.csv"
        assert run(["census", "--mode", "giant", "--n", 300, "--c", 2, "--ell", 2,
                    "--out", out]) == 0
        _, cols = csv_header(out)
        assert cols == GOLDEN["census_csv"]
        assert len(out.read_text().splitlines()) == 302

    def test_mantle(self, tmp_path):
        out = tmp_path / "m.json"
        assert run(["mantle", "--mode", "giant", "--n", 2000, "--c", 2, "--trials", 3,
                    "--out", out]) == 0
        assert list(json.loads(out.read_text())) == GOLDEN["mantle"]

    def test_threshold(self, tmp_path, capsys):
        out = tmp_path / "t.json"
        assert run(["threshold", "--k", 3, "--out", out]) == 0
        printed = json.loads(capsys.readouterr().out)
        assert list(printed) == GOLDEN["threshold"]
        assert printed["residual"] < 1e-10
        assert strip_ts(out.read_text()) == strip_ts(dumps(printed))

    def test_sample(self, tmp_path):
        out = tmp_path / "g.txt"
        assert run(["sample", "--n", 500, "--c", 2, "--seed", 1, "--out", out]) == 0
        lines = out.read_text().splitlines()
        meta = json.loads(lines[0][2:])
        assert meta["version"] == __version__ and meta["seed"] == 1
        n, m = map(int, lines[1].split())
        assert n == 500 and len(lines) == m + 2


class TestGraphInput:
    def test_census_and_mantle_from_file(self, tmp_path):
        g = tmp_path / "g.txt"
        assert run(["sample", "--n", 400, "--c", 4, "--out", g]) == 0
        assert run(["census", "--mode", "core", "--graph", g, "--ell", 2,
                    "--out", tmp_path / "c.csv"]) == 0
        assert run(["mantle", "--mode", "core", "--graph", g, "--graph", g,
                    "--out", tmp_path / "m.json"]) == 0
        prof = json.loads((tmp_path / "m.json").read_text())
        assert len(prof["max_sizes"]) == 2
        assert run(["probe", "--mode", "giant", "--graph", g, "--ell", 2, "--trials", 4,
                    "--size-threshold", 30, "--out", tmp_path / "p"]) == 0

    def test_missing_file_is_io_error(self, tmp_path):
        assert run(["census", "--mode", "giant", "--graph", tmp_path / "none.txt",
                    "--ell", 2, "--out", tmp_path / "c.csv"]) == 3

    def test_malformed_file_is_io_error(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("3 1\n0 x\n")
        assert run(["census", "--mode", "giant", "--graph", bad, "--ell", 2,
                    "--out", tmp_path / "c.csv"]) == 3


class TestExitCodes:
    def test_unknown_flag(self, capsys):
        assert run(["probe", "--bogus"]) == 1

    def test_no_subcommand(self):
        assert run([]) == 1

    def test_bad_choice(self, tmp_path):
        assert run(["census", "--mode", "both", "--n", 10, "--c", 1, "--out", tmp_path]) == 1

    def test_missing_n_for_sampling(self, tmp_path):
        assert run(["census", "--mode", "giant", "--ell", 2, "--out", tmp_path / "x"]) == 1

    def test_core_refusal(self, tmp_path, capsys):
        assert run(["clt", "--mode", "core", "--k", 3, "--c", 1.0, "--n", 1000,
                    "--out", tmp_path]) == 1
        assert "c_hat_3" in capsys.readouterr().err

    def test_force_overrides(self, tmp_path):
        assert run(["clt", "--mode", "core", "--k", 3, "--c", 1.0, "--n", 300,
                    "--trials", 5, "--force", "--out", tmp_path]) == 0

    def test_bad_p(self, tmp_path):
        assert run(["probe", "--mode", "giant", "--n", 5, "--c", 10, "--trials", 1,
                    "--out", tmp_path]) == 1

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert run(["probe", "--mode", "giant", "--n", 500, "--c", 2, "--trials", 1,
                    "--out", blocker / "sub"]) == 3

    def test_claim_violation(self, tmp_path, monkeypatch, capsys):
        bad = ResampleTrialRecord(trial=0, mode="giant", n=500, c=2.0, ell=2, k=0, d_size=3,
                                  w_size=1, event_E=True, claim_subset=False, claim_small=False,
                                  claim_locality=True, f_was_edge=False, z=1, z_tilde=1)
        monkeypatch.setattr(probe_mod, "_one_trial", lambda cfg, graph, i: bad)
        assert run(["probe", "--mode", "giant", "--n", 500, "--c", 2, "--trials", 5,
                    "--out", tmp_path]) == 2
        assert "claim violated" in capsys.readouterr().err
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["aborted"] is True and summary["trials"] == 1

    def test_help(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["clt", "--help"])
        assert exc.value.code == 0
        assert "--resume" in capsys.readouterr().out


class TestDeterminism:
    def test_probe_spec_example(self, tmp_path):
        args = ["probe", "--mode", "giant", "--n", 10000, "--c", 2, "--ell", 5,
                "--trials", 1000, "--seed", 7]
        assert run(args + ["--out", tmp_path / "a"]) == 0
        assert run(args + ["--out", tmp_path / "b"]) == 0
        assert files(tmp_path / "a") == files(tmp_path / "b")

    def test_seed_changes_values_not_schema(self, tmp_path):
        base = ["probe", "--mode", "giant", "--n", 3000, "--c", 2, "--ell", 3, "--trials", 30]
        run(base + ["--seed", 1, "--out", tmp_path / "a"])
        run(base + ["--seed", 2, "--out", tmp_path / "b"])
        ma, ca, ra = read_csv(tmp_path / "a" / "trials.csv")
        mb, cb, rb = read_csv(tmp_path / "b" / "trials.csv")
        assert ca == cb and ra != rb
        ja = json.loads((tmp_path / "a" / "summary.json").read_text())
        jb = json.loads((tmp_path / "b" / "summary.json").read_text())
        assert list(ja) == list(jb) and ja != jb

    def test_clt_resume(self, tmp_path):
        args = ["clt", "--mode", "giant", "--n", 1500, "--c", 2, "--ell", 2, "--trials", 120]
        assert run(args + ["--out", tmp_path / "full"]) == 0
        part = tmp_path / "part"
        assert run(args[:-1] + ["40", "--force", "--out", part]) == 0
        assert run(args + ["--resume", "--out", part]) == 0
        a = (tmp_path / "full" / "trials_1500.csv").read_text().splitlines()[1:]
        b = (part / "trials_1500.csv").read_text().splitlines()[1:]
        assert a == b
        ra = json.loads((tmp_path / "full" / "report.json").read_text())
        rb = json.loads((part / "report.json").read_text())
        assert ra["per_n"] == rb["per_n"]

    def test_threads_env_does_not_change_output(self, tmp_path, monkeypatch):
        args = ["probe", "--mode", "giant", "--n", 2000, "--c", 2, "--ell", 2, "--trials", 130]
        monkeypatch.setenv("GNPLAB_THREADS", "2")
        run(args + ["--out", tmp_path / "a"])
        monkeypatch.delenv("GNPLAB_THREADS")
        run(args + ["--threads", "1", "--out", tmp_path / "b"])
        assert files(tmp_path / "a") == files(tmp_path / "b")


class TestWriters:
    def test_empty_stream_header_only(self, tmp_path):
        p = tmp_path / "e.csv"
        with CsvWriter(p, ("a", "b"), {"x": 1}):
            pass
        assert p.read_text().splitlines()[1:] == ["a,b"]

    def test_json_roundtrip(self, tmp_path):
        payload = {"third": 1 / 3, "tiny": 5e-324, "big": 1.7976931348623157e308,
                   "neg": -0.1, "int": 7, "whole": 2.0, "list": [0.1, 0.2], "none": None,
                   "nested": {"b": True, "a": "s"}}
        meta = metadata("x", {"c": 0.1}, seed=3)
        write_json(tmp_path / "r.json", meta, payload)
        back = json.loads((tmp_path / "r.json").read_text())
        assert back["meta"] == meta
        for k, v in payload.items():
            assert back[k] == v and type(back[k]) is type(v)
        assert list(back) == ["meta"] + list(payload)

    def test_17_digits(self):
        assert dumps(0.1).strip() == "0.10000000000000001"

    def test_row_length_checked(self, tmp_path):
        with CsvWriter(tmp_path / "x.csv", ("a",), {}) as w:
            with pytest.raises(ValueError):
                w.write((1, 2))
