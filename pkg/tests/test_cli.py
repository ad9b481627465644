"""End-to-end runs of the command-line front end via main(argv)."""

import json

import numpy as np
import pytest

from perclab.cli import main
from perclab.pairing import (
    Multigraph,
    format_multigraph,
    parse_configuration,
    read_configuration,
)
from perclab.percolation import parse_outcome


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_sample_writes_configuration(tmp_path, capsys):
    out = tmp_path / "conf.txt"
    code, _, err = run_cli(
        capsys, "sample", "--n", "10", "--d", "3", "--seed", "4", "-o", str(out)
    )
    assert code == 0
    cfg = read_configuration(out)
    assert cfg.seq.n == 10
    assert np.array_equal(cfg.seq.degrees, np.full(10, 3))


def test_sample_multigraph_to_stdout(capsys):
    code, stdout, _ = run_cli(
        capsys, "sample", "--n", "6", "--d", "4", "--seed", "0", "--multigraph"
    )
    assert code == 0
    cfg = parse_configuration(stdout)
    assert cfg.seq.n == 6


def test_sample_impossible_exits_one(capsys):
    # no simple cubic graph on 2 vertices exists
    code, _, err = run_cli(capsys, "sample", "--n", "2", "--d", "3", "--seed", "0")
    assert code == 1
    assert "error" in err


def test_percolate_pipeline(tmp_path, capsys):
    conf = tmp_path / "conf.txt"
    outc = tmp_path / "out.txt"
    assert run_cli(capsys, "sample", "--n", "30", "--d", "4", "--seed", "1",
                   "-o", str(conf))[0] == 0
    code, _, _ = run_cli(
        capsys, "percolate", "-i", str(conf), "--alpha", "0.5", "--seed", "2",
        "-o", str(outc),
    )
    assert code == 0
    out = parse_outcome(outc.read_text())
    assert out.original_n == 30
    assert sum(out.census) == 30 - out.r


def test_percolate_requires_exactly_one_rate(tmp_path, capsys):
    conf = tmp_path / "conf.txt"
    run_cli(capsys, "sample", "--n", "10", "--d", "3", "--seed", "1", "-o", str(conf))
    with pytest.raises(SystemExit) as exc:
        main(["percolate", "-i", str(conf), "--alpha", "0.5", "--p", "0.1"])
    assert exc.value.code == 2
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc2:
        main(["percolate", "-i", str(conf)])
    assert exc2.value.code == 2
    capsys.readouterr()


def test_analyze_accepts_outcome_and_edge_list(tmp_path, capsys):
    conf = tmp_path / "conf.txt"
    outc = tmp_path / "out.txt"
    run_cli(capsys, "sample", "--n", "40", "--d", "4", "--seed", "3", "-o", str(conf))
    run_cli(capsys, "percolate", "-i", str(conf), "--alpha", "0.4", "--seed", "5",
            "-o", str(outc))
    code, stdout, _ = run_cli(capsys, "analyze", "-i", str(outc), "--K", "3")
    assert code == 0
    rep = json.loads(stdout)
    assert rep["n"] + len(parse_outcome(outc.read_text()).deleted) == 40

    edges = tmp_path / "graph.txt"
    g = Multigraph(4, np.array([[0, 1], [1, 2], [2, 3], [3, 0]]))
    edges.write_text(format_multigraph(g))
    code2, stdout2, _ = run_cli(capsys, "analyze", "-i", str(edges))
    assert code2 == 0
    rep2 = json.loads(stdout2)
    assert rep2["two_core_size"] == 4
    assert rep2["giant_size"] == 4


def test_analyze_rejects_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("definitely not a graph\n")
    code, _, err = run_cli(capsys, "analyze", "-i", str(bad))
    assert code == 1
    assert "error" in err


def test_expansion_certificate(tmp_path, capsys):
    edges = tmp_path / "k4.txt"
    g = Multigraph(4, np.array([[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]))
    edges.write_text(format_multigraph(g))
    code, stdout, _ = run_cli(capsys, "expansion", "-i", str(edges))
    assert code == 0
    cert = json.loads(stdout)
    assert cert["exact_beta"] == 1.0
    assert cert["witness"] == [1, 2]

    code2, stdout2, _ = run_cli(capsys, "expansion", "-i", str(edges), "--bounds")
    cert2 = json.loads(stdout2)
    assert code2 == 0
    assert cert2["exact_beta"] is None
    assert cert2["lower_bound"] > 0


def test_theory_json(capsys):
    code, stdout, _ = run_cli(
        capsys, "theory", "--n", "100000", "--d", "4", "--alpha", "0.5"
    )
    assert code == 0
    pred = json.loads(stdout)
    assert pred["K"] == 3
    assert pred["regime"] == "c"
    assert pred["mu"][2] == pytest.approx(6.0)


def test_theory_run_length_flag(capsys):
    code, stdout, _ = run_cli(
        capsys, "theory", "--n", "1000", "--d", "3", "--alpha", "0.3",
        "--run-length", "2", "--run-length", "4",
    )
    assert code == 0
    pred = json.loads(stdout)
    assert sorted(pred["deg2_paths"]) == ["2", "4"]  # JSON object keys


def test_experiment_writes_outputs(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "n = 300\nd = 4\nalpha = 0.4\ntrials = 2\nbase_seed = 11\nmode = multigraph\n"
    )
    outdir = tmp_path / "results"
    code, stdout, _ = run_cli(
        capsys, "experiment", "--config", str(cfg), "-o", str(outdir)
    )
    assert code == 0
    assert (outdir / "trials.csv").exists()
    assert (outdir / "report.json").exists()
    rep = json.loads((outdir / "report.json").read_text())
    assert len(rep["records"]) == 2
    lines = (outdir / "trials.csv").read_text().strip().splitlines()
    assert len(lines) == 3  # header + 2 rows


def test_uniformity_exit_code(capsys):
    code, stdout, _ = run_cli(
        capsys, "uniformity", "--seed", "3",
        "--matching-samples", "1500", "--conditional-samples", "0",
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["passed"]


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    capsys.readouterr()


def test_missing_file_exits_one(capsys):
    code, _, err = run_cli(capsys, "analyze", "-i", "/nonexistent/path.txt")
    assert code == 1
    assert "error" in err
