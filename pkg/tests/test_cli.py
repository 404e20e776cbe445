from liftroute import io as fileio
from liftroute.cli import main
from liftroute.core import Instance


def _instance_a(tmp_path):
    path = tmp_path / "a.csv"
    fileio.write_instance(str(path), Instance([[0.0], [1.0]], [[1.0], [0.0]]))
    return str(path)


def test_gen_writes_file_and_is_seeded(tmp_path, capsys):
    out = tmp_path / "g.csv"
    assert main(["gen", "--n", "5", "--d", "2", "--seed", "4", "--out", str(out)]) == 0
    inst = fileio.read_instance(str(out))
    assert (inst.n, inst.d) == (5, 2)
    assert main(["gen", "--n", "5", "--d", "2", "--seed", "4"]) == 0
    assert capsys.readouterr().out == out.read_text()


def test_solve_pdpc_and_validate_round_trip(tmp_path, capsys):
    inst = _instance_a(tmp_path)
    plan = tmp_path / "p.txt"
    assert main(["solve-pdpc", "--instance", inst, "-c", "2", "--tsp", "mst", "--plan-out", str(plan)]) == 0
    out = capsys.readouterr().out
    assert "sol\t3.0" in out and "lower_bound\t1.0" in out
    assert plan.read_text().splitlines() == ["P 1", "P 2", "D 2", "D 1"]
    assert main(["validate", "--instance", inst, "--plan", str(plan), "-c", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("ok") and "lifo\tTrue" in out


def test_validate_rejects_bad_plan(tmp_path, capsys):
    inst = _instance_a(tmp_path)
    plan = tmp_path / "bad.txt"
    plan.write_text("P 1\nP 2\nD 2\nD 1\n")
    assert main(["validate", "--instance", inst, "--plan", str(plan), "-c", "1"]) == 2
    assert "violation" in capsys.readouterr().out
    plan.write_text("D 1\nP 1\nP 2\nD 2\n")
    assert main(["validate", "--instance", inst, "--plan", str(plan), "-c", "2"]) == 2


def test_solve_pdp_scp_and_oracle(tmp_path, capsys):
    inst = _instance_a(tmp_path)
    assert main(["solve-pdp", "--instance", inst, "-c", "2", "--tsp", "mst"]) == 0
    assert "sol_total\t3.0" in capsys.readouterr().out
    assert main(["solve-scp", "--instance", inst]) == 0
    assert "s0_len" in capsys.readouterr().out
    assert main(["oracle", "--instance", inst, "-c", "2", "--mode", "pdpc"]) == 0
    assert "cost\t2.0" in capsys.readouterr().out
    assert main(["oracle", "--instance", inst, "--mode", "tsp"]) == 0
    assert "length" in capsys.readouterr().out


def test_errors_exit_one(tmp_path):
    assert main(["solve-pdpc", "--instance", str(tmp_path / "missing.csv"), "-c", "2"]) == 1
    inst = _instance_a(tmp_path)
    assert main(["solve-pdpc", "--instance", inst, "-c", "0"]) == 1


def test_experiment_and_probe(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert main(["experiment", "--n", "8", "16", "--c", "1", "2", "--trials", "2", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 2 + 8
    assert main(["bhh-probe", "--n", "1", "50", "--trials", "2"]) == 0
    assert capsys.readouterr().out.splitlines()[-2].startswith("1\t0")
