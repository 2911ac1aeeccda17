import json

import pytest

from config import EXIT_BUDGET, EXIT_CONTRACT, EXIT_OK, EXIT_PARSE
from encoders.json_codec import read_csv
from experiment_cli import main


@pytest.fixture
def involution_pair(tmp_path):
    """x = 1 and x^2 = 1 on two points: the swap fails exactly one relator."""
    path = tmp_path / "involution.txt"
    path.write_text("x\nx xx\n")
    return str(path)


def test_solutions_count(capsys):
    assert main(["solutions", "--system", "commutator", "--n", "3"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "18"


def test_solutions_listing(capsys):
    assert main(["solutions", "--system", "commutator", "--n", "2", "--list"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "4"
    assert len(lines) == 5


def test_eval(capsys):
    assert main(["eval", "xyXY", "(1 2 3); (1 2)"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "(1 3 2)"


def test_eval_at_point(capsys):
    assert main(["eval", "xyXY", "(1 2 3); (1 2)", "--point", "1"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"image": 3, "point": 1, "queries": 4}


def test_reduce(capsys):
    assert main(["reduce", "xXyyYx"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "yx"


def test_defect_and_dist(capsys):
    assert main(["defect", "(1 2 3); (1 2)", "--system", "commutator"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1/1"
    assert main(["dist", "(1 2 3); (1 2)", "--system", "commutator"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["distance"] == "2/3"


def test_dsets_and_marginal(capsys):
    assert main(["dsets", "2 1", "1 2"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"d_S": "1/1", "exact": True}
    assert main(["dsets", "2 1", "1 2", "--heuristic"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["exact"] is False
    assert main(["marginal", "2 1 3", "--A", "x", "--B", "x"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1/3"


def test_parse_error_exit_code(capsys):
    assert main(["reduce", "xqy"]) == EXIT_PARSE
    assert "position 2" in capsys.readouterr().err


def test_budget_exit_code(capsys):
    assert main(["solutions", "--system", "commutator", "--n", "7"]) == EXIT_BUDGET
    assert "budget" in capsys.readouterr().err


def test_missing_seed_is_a_parse_error():
    assert main(["sas", "--system", "commutator", "--n", "3"]) == EXIT_PARSE


def test_sas_report(capsys):
    code = main(["sas", "--system", "commutator", "--n", "3", "--s", "2", "--trials", "50", "--seed", "4",
                 "--instance-model", "solutions"])
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["accept_rate"] == 1.0
    assert report["config"]["seed"] == 4
    assert report["max_queries"] <= report["query_budget"]


def test_contract_violation_exit_code(involution_pair, capsys):
    argv = ["sas", "--system", involution_pair, "--n", "2", "--s", "1", "--trials", "200", "--seed", "3",
            "--validate"]
    assert main(argv) == EXIT_CONTRACT
    report = json.loads(capsys.readouterr().out)
    assert report["separator"]["ok"] is False


def test_amplified_sas_passes_validation(involution_pair, capsys):
    argv = ["sas", "--system", involution_pair, "--n", "2", "--s", "12", "--trials", "200", "--seed", "3",
            "--validate"]
    assert main(argv) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["separator"]["ok"] is True


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    argv = ["sweep", "--system", "commutator", "--n", "3..4", "--s", "1", "3", "--instance-model", "planted",
            "--corruption", "0", "2", "--trials", "10", "--seed", "5", "--out", str(out), "--verify"]
    assert main(argv) == EXIT_OK
    assert out.read_text().startswith("# config: ")
    table = read_csv(out)
    assert len(table) == 8
    assert list(table["n"]) == ["3"] * 4 + ["4"] * 4
    first = out.read_bytes()
    assert main(argv) == EXIT_OK
    assert out.read_bytes() == first
