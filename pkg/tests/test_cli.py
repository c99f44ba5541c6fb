import json

import pytest
from click.testing import CliRunner

from mpqc import __version__
from mpqc.cli import main


@pytest.fixture
def cli():
    runner = CliRunner()
    return lambda *args: runner.invoke(main, [str(a) for a in args])


@pytest.fixture
def files(tmp_path):
    bad = tmp_path / "bad.code"
    bad.write_text("4 3\n1100\n0110\n0011\n")
    empty = tmp_path / "empty.code"
    empty.write_text("")
    garbage = tmp_path / "garbage.code"
    garbage.write_text("15 2\n111111111111111\n10x\n")
    circ = tmp_path / "c.txt"
    circ.write_text("input 1 +\nh 1\nccz 1 2 3\n")
    badcirc = tmp_path / "bad.txt"
    badcirc.write_text("h 1\ntoffoli 1 2 3\n")
    return dict(bad=bad, empty=empty, garbage=garbage, circ=circ, badcirc=badcirc, tmp=tmp_path)


def test_version(cli):
    res = cli("--version")
    assert res.exit_code == 0 and __version__ in res.output


def test_verify_rm15(cli):
    res = cli("code", "verify", "rm15")
    assert res.exit_code == 0 and res.output.strip() == "triorthogonal"


def test_verify_witness(cli, files):
    res = cli("code", "verify", files["bad"])
    assert res.exit_code == 1 and "(rows 1,2)" in res.output
    res = cli("code", "verify", files["bad"], "--format", "json")
    assert res.exit_code == 1 and json.loads(res.stdout)["witness"] == [1, 2]


@pytest.mark.parametrize("key", ["empty", "garbage"])
def test_verify_parse_errors(cli, files, key):
    res = cli("code", "verify", files[key])
    assert res.exit_code == 2 and "error:" in res.output


def test_verify_garbage_names_line(cli, files):
    assert "line 3" in cli("code", "verify", files["garbage"]).output


def test_verify_missing_file(cli):
    assert cli("code", "verify", "/nonexistent/x.code").exit_code == 2


def test_info(cli):
    res = cli("code", "info", "rm15", "--wmax", 6)
    assert res.exit_code == 0 and res.output.strip() == "[[15,1,3]] ccz: exact"
    res = cli("code", "info", "rm15", "--wmax", 2, "--no-ccz")
    assert res.output.strip() == "[[15,1,?]] d > 2"
    rep = json.loads(cli("code", "info", "n23", "--format", "json").stdout)
    assert (rep["n"], rep["k"], rep["d"], rep["ccz"]) == (23, 1, 3, "exact")


def test_list(cli):
    names = cli("code", "list").output.split()
    assert {"rm15", "n23"} <= set(names)


def test_sim_run_honest(cli):
    res = cli("sim", "run", "--seed", 1)
    assert res.exit_code == 0
    assert "outcome: success" in res.output
    assert res.output.count("1.000000") == 16  # 15 outputs plus the joint fidelity
    assert "qubit_peak_per_node: 270" in res.output and "kappa: 15" in res.output


def test_sim_run_injector(cli):
    res = cli("sim", "run", "--adversary", "pauli-inject:nodes=3,7;weight=1;phase=sharing", "--format", "json")
    rep = json.loads(res.stdout)
    assert res.exit_code == 0 and rep["outcome"] == "success"
    assert set(rep["accused"]) <= {3, 7} and rep["accused"]


def test_sim_run_abort_exit_code(cli):
    res = cli("sim", "run", "--t", 1, "--adversary", "pauli-inject:nodes=2,3;weight=2;phase=reconstruction")
    assert res.exit_code == 3 and "outcome: abort" in res.output


def test_sim_run_rejects_bounds(cli):
    res = cli("sim", "run", "--t", 2)
    assert res.exit_code == 2 and "t ≤ ⌊(d−1)/2⌋ = 1 violated" in res.output
    res = cli("sim", "run", "--code", "n23", "--t", 6)
    assert res.exit_code == 2 and "n/4" in res.output


@pytest.mark.parametrize("args", [
    ("--adversary", "warlock:nodes=1"), ("--inputs", "0,1"), ("--code", "nope"), ("--r", 0),
])
def test_sim_run_usage_errors(cli, args):
    assert cli("sim", "run", *args).exit_code == 2


def test_sim_run_circuit_files(cli, files):
    res = cli("sim", "run", "--circuit", files["circ"], "--format", "json")
    rep = json.loads(res.stdout)
    assert res.exit_code == 0 and rep["kappa"] == 16 and rep["config"]["circuit"] == str(files["circ"])
    res = cli("sim", "run", "--circuit", files["badcirc"])
    assert res.exit_code == 2 and "line 2" in res.output


def test_sim_run_byte_identical(cli, files):
    args = ("sim", "run", "--circuit", files["circ"], "--adversary", "liar:nodes=2;rounds=alternate",
            "--seed", 5, "--format", "json")
    out1, out2 = files["tmp"] / "a.json", files["tmp"] / "b.json"
    r1, r2 = cli(*args, "--out", out1), cli(*args, "--out", out2)
    assert out1.read_bytes() == out2.read_bytes()
    assert r1.stdout == r2.stdout
    assert json.loads(out1.read_text())["transcript"]["phases"][-1] == "decision"


def test_sweep(cli):
    res = cli("sim", "sweep", "--runs", 20, "--format", "json")
    rep = json.loads(res.stdout)
    assert res.exit_code == 0
    assert [row["r"] for row in rep["results"]] == [1, 2, 4]
    assert all(row["abort_rate"] == 0 and row["evasion_rate"] == 0 for row in rep["results"])
    res = cli("sim", "sweep", "--runs", 5, "--r", 3, "--adversary", "liar:nodes=4;rounds=all")
    assert res.exit_code == 0 and "0.0000" in res.output


def test_sweep_zero_runs(cli):
    res = cli("sim", "sweep", "--runs", 0)
    assert res.exit_code == 2 and "--runs" in res.output
