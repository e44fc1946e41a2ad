import csv
import io
import json

import pytest

from omssc.adversaries import random_trace
from omssc.cli import main, verify_identities
from omssc.core import CapacityError, InvalidInputError
from omssc.harness import RunConfig, parse_source, run
from omssc.io import dumps_trace, loads_trace, read_trace, report_csv, report_json, write_report, write_trace


# -- trace files ------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_trace_round_trip(tmp_path, seed):
    trace = random_trace(6, 3, 25, seed)
    path = tmp_path / "t.jsonl"
    write_trace(trace, path)
    assert read_trace(path) == trace
    assert path.read_text().splitlines()[0] == '{"n": 6, "r": 3}'


def test_trace_rejects_size_mismatch():
    with pytest.raises(InvalidInputError):
        loads_trace('{"n": 4, "r": 2}\n{"set": [1, 2]}\n{"set": [3]}\n')


def test_trace_rejects_duplicates_and_range():
    with pytest.raises(InvalidInputError):
        loads_trace('{"n": 4, "r": 2}\n{"set": [2, 2]}\n')
    with pytest.raises(InvalidInputError):
        loads_trace('{"n": 4, "r": 2}\n{"set": [2, 5]}\n')
    with pytest.raises(InvalidInputError):
        loads_trace("")
    with pytest.raises(InvalidInputError):
        loads_trace('{"n": 4}\n')


def test_unreadable_trace(tmp_path):
    with pytest.raises(InvalidInputError):
        read_trace(tmp_path / "missing.jsonl")


# -- run -----------------------------------------------------------------------------

def test_run_ledger_and_totals():
    rep = run(RunConfig("mtf_first", "adv:last_r", n=7, r=2, m=300, oracles=("static", "greedy")))
    assert len(rep.ledger) == 300
    assert rep.total_cost == rep.ledger.total_access + rep.ledger.total_moving
    assert rep.ratios["static"] == rep.total_cost / rep.oracle_costs["static"]
    assert rep.passed
    assert {a.name for a in rep.audits} == {"ledger_access", "ledger_moving"}


def test_run_from_trace_file(tmp_path):
    trace = random_trace(5, 2, 80, seed=2)
    path = tmp_path / "t.jsonl"
    write_trace(trace, path)
    rep = run(RunConfig("mae", f"trace:{path}", oracles=("static", "dynamic")))
    assert rep.trace == trace
    assert rep.oracle_costs["dynamic"] <= rep.total_cost
    assert any(a.name == "mae_moving" and a.passed for a in rep.audits)


def test_lazy_rounding_random_run_audits_pass():
    rep = run(RunConfig("lazy_rounding", "random", n=5, r=2, m=500, seed=3))
    names = {a.name: a for a in rep.audits}
    for key in ("alg_acc_cost", "moving_cost", "switch_cost", "theorem2"):
        assert names[key].passed and names[key].worst_margin >= 0


def test_mae_dynamic_scheduled_ratio():
    rep = run(RunConfig("mae", "adv:mae_dynamic_lb,k=4", n=26, r=3, m=20 * 20, oracles=("scheduled",)))
    assert rep.ratios["scheduled"] >= 0.8 * 4


def test_run_is_deterministic():
    cfg = RunConfig("mtf_random", "random", n=6, r=2, m=200, seed=5, oracles=("static", "greedy"))
    assert report_json(run(cfg)) == report_json(run(cfg))
    assert report_csv(run(cfg)) == report_csv(run(cfg))


def test_csv_rows_and_monotone(tmp_path):
    rep = run(RunConfig("mtf_all", "random", n=6, r=3, m=50, seed=1, oracles=()))
    path = tmp_path / "r.csv"
    write_report(rep, path, "csv")
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert len(rows) == 50
    assert list(rows[0]) == ["t", "access", "moving", "cumAccess", "cumMoving"]
    for prev, row in zip(rows, rows[1:]):
        assert int(row["cumAccess"]) > int(prev["cumAccess"])
        assert int(row["cumMoving"]) >= int(prev["cumMoving"])


def test_json_report_stable(tmp_path):
    rep = run(RunConfig("mae", "random", n=5, r=2, m=30, seed=0, oracles=("static",)))
    path = tmp_path / "r.json"
    write_report(rep, path, "json")
    data = json.loads(path.read_text())
    assert list(data) == ["config", "totals", "oracle_costs", "ratios", "audits", "steps", "trace"]
    assert json.dumps(data, indent=2) + "\n" == path.read_text()


def test_run_config_validation():
    with pytest.raises(InvalidInputError):
        RunConfig("mae", "random", n=3, r=4, m=1)
    with pytest.raises(InvalidInputError):
        RunConfig("mae", "random", oracles=("best",))
    with pytest.raises(InvalidInputError):
        RunConfig("mae", "random", audits="loud")
    with pytest.raises(InvalidInputError):
        run(RunConfig("mae", "random", n=3))
    with pytest.raises(InvalidInputError):
        run(RunConfig("nope", "random", n=3, r=1, m=2))
    with pytest.raises(InvalidInputError):
        parse_source("file:x")


def test_capacity_violations():
    with pytest.raises(CapacityError):
        run(RunConfig("lazy_rounding", "random", n=9, r=2, m=2))
    with pytest.raises(CapacityError):
        run(RunConfig("mae", "random", n=7, r=2, m=5, oracles=("dynamic",)))


def test_scheduled_oracle_needs_adversary():
    with pytest.raises(InvalidInputError):
        run(RunConfig("mae", "random", n=4, r=2, m=5, oracles=("scheduled",)))


# -- CLI ------------------------------------------------------------------------------

def test_cli_run_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    trace_out = tmp_path / "t.jsonl"
    code = main(["run", "--alg", "mtf_first", "--source", "adv:last_r", "--n", "6", "--r", "2",
                 "--m", "100", "--out", str(out), "--trace-out", str(trace_out), "--audits", "strict"])
    assert code == 0
    assert json.loads(out.read_text())["totals"]["m"] == 100
    assert read_trace(trace_out).m == 100
    assert "ratio vs static" in capsys.readouterr().err


def test_cli_run_csv_stdout(capsys):
    code = main(["run", "--alg", "mtf_relative", "--alg-param", "c=3", "--source", "random", "--n", "5",
                 "--r", "2", "--m", "10", "--format", "csv", "--oracle", "none"])
    assert code == 0
    assert len(capsys.readouterr().out.splitlines()) == 11


def test_cli_errors_exit_nonzero(tmp_path, capsys):
    assert main(["run", "--alg", "mae", "--source", f"trace:{tmp_path}/none", "--oracle", "none"]) == 2
    assert main(["run", "--alg", "lazy_rounding", "--source", "random", "--n", "10", "--r", "2", "--m", "3"]) == 2


def test_cli_gen_trace(tmp_path):
    out = tmp_path / "g.jsonl"
    assert main(["gen-trace", "--n", "5", "--r", "2", "--m", "7", "--seed", "4", "--out", str(out)]) == 0
    assert read_trace(out) == random_trace(5, 2, 7, 4)


def test_cli_bound_and_identities(capsys):
    assert main(["bound", "--theorem1", "7", "2"]) == 0
    assert "9/4" in capsys.readouterr().out
    assert main(["verify-identities", "--n-max", "6"]) == 0
    assert verify_identities(5, io.StringIO())
