import pytest

from experiment import ExperimentConfig, ExperimentTable, TrialMetrics, aggregate
from forwarding import Outcome, RouterKind
from errors import ResultsStoreError
from results_db import ResultsDB


@pytest.fixture
def db(tmp_path):
    return ResultsDB(str(tmp_path / "BD" / "results.db"))


@pytest.fixture
def table():
    rows = [
        TrialMetrics(RouterKind.LAST_OBSERVED_GREEDY, 100, 0, 12.5, 0.8, 6, Outcome.DELIVERED),
        TrialMetrics(RouterKind.MIN_HOP, 100, 0, 9.0, 10 / 9, 5, Outcome.DELIVERED),
        TrialMetrics(RouterKind.ML_FORWARDING, 100, 0, None, None, 3, Outcome.NO_ROUTE),
    ]
    return ExperimentTable(rows=rows, aggregates=aggregate(rows))


def test_saved_sweep_loads_back(db, table):
    config = ExperimentConfig(node_counts=(100,), repetitions=1, base_seed=11)
    sweep_id = db.save_table(config, table)

    assert db.load_table(sweep_id) == table
    sweep = db.get_sweep(sweep_id)
    assert sweep['base_seed'] == 11
    assert sweep['config'] == config.to_dict()
    assert sweep['status'] == 'Completado'


def test_unknown_sweep(db):
    assert db.get_sweep("nope") is None
    assert db.load_table("nope") is None


def test_list_stats_and_delete(db, table):
    config = ExperimentConfig()
    first = db.save_table(config, table)
    second = db.save_table(config, table)

    assert {s['id'] for s in db.list_sweeps()} == {first, second}
    stats = db.get_sweep_stats()
    assert stats['total_sweeps'] == 2
    assert stats['trials_by_outcome'] == {'Delivered': 4, 'NoRoute': 2}

    db.delete_sweep(first)
    assert db.get_sweep(first) is None
    assert [s['id'] for s in db.list_sweeps()] == [second]
    assert db.get_sweep_stats()['trials_by_outcome'] == {'Delivered': 2, 'NoRoute': 1}


def test_path_under_a_regular_file(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(ResultsStoreError):
        ResultsDB(str(blocker / "results.db"))
