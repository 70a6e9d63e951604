import json

import pytest

from penlq import cli, serde


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def mcp_file(tmp_path):
    path = tmp_path / "mcp.json"
    path.write_text('{"family": "mcp", "params": {"gamma": 1.0, "b": 1.0}}')
    return str(path)


@pytest.fixture()
def linear_file(tmp_path):
    path = tmp_path / "linear.json"
    path.write_text('{"family": "linear", "params": {"k": 1.0}}')
    return str(path)


@pytest.fixture()
def tp_file(tmp_path):
    path = tmp_path / "tp.json"
    path.write_text('{"m": 2, "b": [1, 2, 3, 1, 2, 3]}')
    return str(path)


def test_penalty_check_accepts_mcp(capsys, mcp_file):
    code, out, _ = run(capsys, "penalty", "check", "--spec", mcp_file, "--grid", "1000")
    assert code == 0
    report = json.loads(out)
    assert report["overall"] is True and report["family"] == "mcp"


def test_penalty_check_rejects_linear(capsys, linear_file):
    code, out, _ = run(capsys, "penalty", "check", "--spec", linear_file)
    assert code == 2
    assert json.loads(out)["c1"] == 0.0


def test_penalty_fuzz(capsys, mcp_file):
    code, out, _ = run(capsys, "penalty", "fuzz", "--spec", mcp_file, "--trials", "500",
                       "--seed", "3")
    assert code == 0
    report = json.loads(out)
    assert report["subadditivity_violations"] == 0
    assert report["concentration_counterexamples"] == 0


def test_penalty_fuzz_rejects_linear(capsys, linear_file):
    code, _, err = run(capsys, "penalty", "fuzz", "--spec", linear_file, "--trials", "10")
    assert code == 2 and "condition violation" in err


def test_gfun_analyze_contract_keys(capsys, mcp_file):
    code, out, _ = run(capsys, "gfun", "analyze", "--spec", mcp_file, "--q", "2",
                       "--lambda", "1")
    assert code == 0
    record = json.loads(out)
    assert list(record) == [
        "theta", "mu", "tau_hat", "t_star", "h", "delta_bar", "theta_lower", "mu_lower",
    ]
    assert record["theta"] == 1.0 and record["mu"] == 196.0
    assert abs(record["t_star"] - 273.4 / 393) < 1e-8


def test_gfun_analyze_byte_reproducible(capsys, mcp_file):
    _, out1, _ = run(capsys, "gfun", "analyze", "--spec", mcp_file, "--q", "2", "--lambda", "1")
    _, out2, _ = run(capsys, "gfun", "analyze", "--spec", mcp_file, "--q", "2", "--lambda", "1")
    assert out1 == out2


def test_full_pipeline_yes(capsys, tmp_path, mcp_file, tp_file):
    inst = str(tmp_path / "inst.json")
    sol = str(tmp_path / "sol.json")
    code, out, _ = run(capsys, "reduce", "build", "--in", tp_file, "--spec", mcp_file,
                       "--q", "2", "--lambda", "1", "--out", inst)
    assert code == 0
    assert json.loads(out)["rows"] == 13

    code, out, _ = run(capsys, "solve", "--in", inst, "--mode", "structured", "--out", sol)
    assert code == 0
    assert json.loads(out)["gap"] <= 1e-9

    code, out, _ = run(capsys, "decode", "--in", inst, "--sol", sol)
    assert code == 0
    verdict = json.loads(out)
    assert verdict["verdict"] == "yes" and verdict["sums"] == [6, 6]


def test_full_pipeline_no_instance(capsys, tmp_path, mcp_file):
    tp = tmp_path / "tp_no.json"
    tp.write_text('{"m": 2, "b": [3, 3, 3, 3, 3, 5]}')
    inst = str(tmp_path / "inst.json")
    sol = str(tmp_path / "sol.json")
    assert run(capsys, "reduce", "build", "--in", str(tp), "--spec", mcp_file,
               "--q", "2", "--lambda", "1", "--out", inst)[0] == 0
    assert run(capsys, "solve", "--in", inst, "--mode", "hybrid", "--restarts", "1",
               "--seed", "0", "--out", sol)[0] == 0
    code, out, _ = run(capsys, "decode", "--in", inst, "--sol", sol)
    assert code == 3
    assert json.loads(out)["verdict"] == "unknown"


def test_certify(capsys, tmp_path, mcp_file, tp_file):
    inst = str(tmp_path / "inst.json")
    run(capsys, "reduce", "build", "--in", tp_file, "--spec", mcp_file,
        "--q", "2", "--lambda", "1", "--out", inst)
    code, out, _ = run(capsys, "certify", "--in", inst, "--partition", "[[1,2,3],[4,5,6]]")
    assert code == 0
    report = json.loads(out)
    assert report["optimal"] is True and report["gap"] <= 1e-9

    code, out, _ = run(capsys, "certify", "--in", inst, "--partition", "[[1,2,4],[3,5,6]]")
    assert code == 3
    assert json.loads(out)["optimal"] is False


def test_malformed_tp_is_usage_error(capsys, tmp_path, mcp_file):
    tp = tmp_path / "bad.json"
    tp.write_text('{"m": 2, "b": [1, 2, 3, 1, 2, 4]}')  # sum not divisible by m
    code, _, err = run(capsys, "reduce", "build", "--in", str(tp), "--spec", mcp_file,
                       "--q", "2", "--lambda", "1", "--out", str(tmp_path / "x.json"))
    assert code == 1 and "divisible" in err


def test_unknown_command_is_usage_error(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 1 and err


def test_size_guard_exit_code(capsys, tmp_path, mcp_file):
    tp = tmp_path / "big.json"
    tp.write_text(json.dumps({"m": 4, "b": [1] * 12}))
    inst = str(tmp_path / "inst.json")
    assert run(capsys, "reduce", "build", "--in", str(tp), "--spec", mcp_file,
               "--q", "2", "--lambda", "1", "--out", inst)[0] == 0
    code, _, err = run(capsys, "solve", "--in", inst, "--mode", "structured",
                       "--out", str(tmp_path / "s.json"))
    assert code == 5 and "size guard" in err


def test_demo(capsys):
    code, out, _ = run(capsys, "demo")
    assert code == 0
    assert "theta_lower = 1 " in out.replace("  ", " ") or "theta_lower" in out
    assert '"verdict": "yes"' in out
    for token in ("196", "0.69567430", "0.94132315", "0.00625", "3.90625"):
        assert token in out, f"missing {token} in demo output"


def test_instance_file_round_trip(tmp_path, demo_instance):
    path = tmp_path / "inst.json"
    serde.save_instance(path, demo_instance)
    again = serde.load_instance(path)
    assert again.delta == demo_instance.delta
    assert again.epsilon == demo_instance.epsilon
    assert (again.problem.a_matrix == demo_instance.problem.a_matrix).all()


def test_instance_file_tamper_detection(tmp_path, demo_instance):
    path = tmp_path / "inst.json"
    serde.save_instance(path, demo_instance)
    data = json.loads(path.read_text())
    data["A"][0] = 99.0
    path.write_text(json.dumps(data))
    with pytest.raises(ValueError, match="stored matrix"):
        serde.load_instance(path)


def test_dumps_17_digit_round_trip():
    values = [0.00625, 3.90625e-05, 273.4 / 393, 0.9413231552162851, 1.0, -0.0]
    text = serde.dumps({"values": values})
    assert json.loads(text)["values"] == values


def test_written_files_are_byte_reproducible(capsys, tmp_path, mcp_file, tp_file):
    inst_a, inst_b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    sol_a, sol_b = str(tmp_path / "sa.json"), str(tmp_path / "sb.json")
    for inst, sol in ((inst_a, sol_a), (inst_b, sol_b)):
        run(capsys, "reduce", "build", "--in", tp_file, "--spec", mcp_file,
            "--q", "2", "--lambda", "1", "--out", inst)
        run(capsys, "solve", "--in", inst, "--mode", "hybrid", "--restarts", "2",
            "--seed", "5", "--out", sol)
    from pathlib import Path
    assert Path(inst_a).read_bytes() == Path(inst_b).read_bytes()
    assert Path(sol_a).read_bytes() == Path(sol_b).read_bytes()


def test_tp_file_wrapped_form(capsys, tmp_path, mcp_file):
    tp = tmp_path / "wrapped.json"
    tp.write_text('{"tp": {"m": 2, "b": [1, 2, 3, 1, 2, 3]}, "q": 2, "lambda": 1.0}')
    code, out, _ = run(capsys, "reduce", "build", "--in", str(tp), "--spec", mcp_file,
                       "--q", "2", "--lambda", "1", "--out", str(tmp_path / "i.json"))
    assert code == 0 and json.loads(out)["cols"] == 12


def test_instance_meta_contract(tmp_path, demo_instance):
    path = tmp_path / "inst.json"
    serde.save_instance(path, demo_instance)
    data = json.loads(path.read_text())
    assert list(data["meta"]) == [
        "theta", "mu", "tau_hat", "t_star", "h", "delta", "epsilon", "bound",
    ]
    for key in ("rows", "cols", "A", "target", "lambda", "q", "tp", "penalty", "layout"):
        assert key in data
