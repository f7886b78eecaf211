import json

import pytest

from ualab.cli import main


def test_rho_to_stdout(capsys):
    assert main(["rho", "--k", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "k,rho_k,rho_star" and len(out) == 3


def test_file_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["stats", "--n", "300", "--k", "3", "--trials", "120", "--seed", "5"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["rng"] and meta["version"]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 100\nk = 4\nr = 2\np = 0.0\np = 1.0\ntrials = 2\nseed = 3\n")
    assert main(["scan", "--config", str(cfg)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "p,full_prob,ci_lo,ci_hi,mean_final_fraction"
    assert [ln.split(",")[1] for ln in lines[1:]] == ["0", "1"]
    assert main(["scan", "--config", str(cfg), "--p", "0.5"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 2


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["scan", "--n", "10", "--r", "2", "--p", "0.5", "--p", "0.1"]) == 2
    assert "p_grid" in capsys.readouterr().err
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["stats", "--config", str(bad)]) == 2
    assert main(["stats", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_runtime_abort_exit_3(capsys):
    # vertex 1 is never infected from the empty set, so no certificate exists
    assert main(["percolate", "--n", "20", "--k", "3", "--r", "2", "--p", "0", "--witness", "1"]) == 3
    assert "aborted" in capsys.readouterr().err


def test_witness_dump_and_verify(tmp_path, capsys):
    common = ["--n", "100", "--k", "4", "--r", "2", "--p", "0.4", "--seed", "3"]
    assert main(["percolate", *common, "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["metadata"]["full"] is True
    assert main(["percolate", *common]) == 0
    rounds = capsys.readouterr().out.splitlines()[1:]
    assert len(rounds) >= 2
    cert = tmp_path / "w.json"
    from ualab.harness import build_config, percolate_trace

    _, trace, _ = percolate_trace(build_config("percolate", {}, {"n_grid": [100], "k": 4, "r": 2, "p_grid": [0.4], "master_seed": 3}))
    x = trace.rounds[-1][0]
    assert main(["percolate", *common, "--witness", str(x), "--witness-out", str(cert)]) == 0
    capsys.readouterr()
    assert main(["witness", "verify", str(cert), *common]) == 0
    assert capsys.readouterr().out.strip() == "valid"
    data = json.loads(cert.read_text())
    data["edges"] = data["edges"][1:]
    cert.write_text(json.dumps(data))
    assert main(["witness", "verify", str(cert), *common]) == 1
    assert capsys.readouterr().out.startswith("invalid:")


@pytest.mark.parametrize("cmd", ["expansion", "walk", "oracle", "witness"])
def test_other_subcommands_run(cmd, capsys):
    extra = {
        "expansion": ["--n", "20", "--trials", "2"],
        "walk": ["--n", "12", "--k", "2", "--t-max", "5"],
        "oracle": ["--n", "50", "--trials", "20"],
        "witness": ["--n", "60", "--r", "2", "--p", "0.3", "--trials", "2"],
    }[cmd]
    assert main([cmd, *extra]) == 0
    assert capsys.readouterr().out.count("\n") >= 2
