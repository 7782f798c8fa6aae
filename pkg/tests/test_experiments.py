import math

import numpy as np
import pytest

from stackjam import experiments as ex
from stackjam.errors import ConfigError, UnknownKindError
from stackjam.hla import LearningParams, hla_run


def quick(doc, epochs=8):
    doc["learning"]["epochs"] = epochs
    doc["learning"]["slots_per_epoch"] = 10
    return doc


def test_summary_stats():
    st = ex.SummaryStats.of([1.0, 2.0, 3.0, 4.0])
    assert st.mean == 2.5
    assert st.sd == pytest.approx(math.sqrt(5.0 / 3.0))
    assert st.ci95 == pytest.approx(1.96 * st.sd / 2.0)
    assert st.reps == 4
    one = ex.SummaryStats.of([7.0])
    assert (one.mean, one.sd, one.ci95, one.reps) == (7.0, 0.0, 0.0, 1)
    same = ex.SummaryStats.of([0.1] * 20)
    assert same.mean == 0.1 and same.sd == 0.0


def test_plan_validation():
    with pytest.raises(UnknownKindError):
        ex.ExperimentPlan("channel-magic")
    with pytest.raises(UnknownKindError):
        ex.ExperimentPlan("channel-hla", "epsilon", (0.1,))
    with pytest.raises(UnknownKindError):
        ex.ExperimentPlan("power-bayesian", "N", (2,))
    with pytest.raises(UnknownKindError):
        ex.ExperimentPlan("sweep", "bogus", (1,))
    with pytest.raises(ConfigError):
        ex.ExperimentPlan("channel-hla", reps=0)
    with pytest.raises(ConfigError):
        ex.ExperimentPlan("channel-hla", sweep_values=())


def test_plan_families():
    assert ex.ExperimentPlan("sweep", "epsilon", (0.0,)).arms == ("bayesian", "average")
    assert ex.ExperimentPlan("sweep", "N", (2,)).arms == ("hla", "random")
    assert ex.ExperimentPlan("channel-random").metrics == ex.CHANNEL_METRICS
    assert ex.ExperimentPlan("sweep", "P_j", (15,)).metrics[0] == "hla.ewaij"


def test_plan_from_config(default_doc):
    plan = ex.ExperimentPlan.from_doc(default_doc, reps=3)
    assert plan.kind == "sweep" and plan.sweep_param == "P_j"
    assert plan.sweep_values == (15.0, 20.0, 25.0) and plan.reps == 3


def test_rows_in_plan_order(default_doc):
    doc = quick(default_doc)
    plan = ex.ExperimentPlan("channel-hla", "N", (2, 3), reps=2, master_seed=4)
    rows = ex.run_plan_rows(plan, doc)
    assert [(r[1], r[2]) for r in rows] == [(v, m) for v in ("2", "3") for m in ex.CHANNEL_METRICS]
    assert all(r[6] == 2 for r in rows)


def test_replication_seeding(default_doc):
    doc = quick(default_doc)
    plan = ex.ExperimentPlan("channel-hla", reps=2, master_seed=10)
    rows = ex.run_plan_rows(plan, doc)
    samples = []
    for r in range(2):
        place, learn = ex.derive_seeds(10 + r)
        sc = ex.channel_scenario(doc, ex.NO_SWEEP, 0.0, place)
        traj = hla_run(sc, LearningParams.from_doc(doc), learn)
        samples.append(ex.trajectory_metrics(traj, 0.5)["ewaij"])
    assert rows[0][2] == "ewaij"
    assert rows[0][3] == pytest.approx(np.mean(samples), rel=1e-12)


def test_parallel_matches_serial(default_doc):
    doc = quick(default_doc, epochs=4)
    serial = ex.run_plan(ex.ExperimentPlan("sweep", reps=3, master_seed=1), doc)
    parallel = ex.run_plan(ex.ExperimentPlan("sweep", reps=3, master_seed=1, jobs=2), doc)
    assert serial == parallel


def test_sweep_values_change_scenario(default_doc):
    sc15 = ex.channel_scenario(default_doc, "P_j", 15.0, 3)
    sc25 = ex.channel_scenario(default_doc, "P_j", 25.0, 3)
    assert sc25.jammer_power == 25.0
    np.testing.assert_array_equal(sc15.jam_gain, sc25.jam_gain)
    assert ex.channel_scenario(default_doc, "N", 6, 3).num_users == 6
    assert ex.channel_scenario(default_doc, "P_n", 2.0, 3).user_power.tolist() == [2.0] * 4


def test_explicit_scenario_rejects_size_sweep(small_doc):
    with pytest.raises(ConfigError):
        ex.channel_scenario(small_doc, "N", 4, 0)


def test_power_plan(default_doc):
    text = ex.run_plan(ex.ExperimentPlan("power-bayesian", "epsilon", (0.0,)), default_doc)
    rows = ex.parse_csv(text)
    assert [r.metric for r in rows] == list(ex.POWER_METRICS)
    assert rows[0].mean == pytest.approx(1.06258, rel=1e-4)


def test_csv_round_trip_and_writing(default_doc, tmp_path):
    out = tmp_path / "r.csv"
    plan = ex.ExperimentPlan("power-average", "user_cost", (0.1, 0.2), out=str(out))
    text = ex.run_plan(plan, default_doc)
    assert out.read_text() == text
    assert text.splitlines()[0] == ",".join(ex.HEADER)
    rows = ex.parse_csv(text)
    assert len(rows) == 2 * len(ex.POWER_METRICS)
    assert rows[0].config_value == "0.1"


def test_unwritable_output(default_doc, tmp_path):
    from stackjam.errors import OutputError

    plan = ex.ExperimentPlan("power-average", out=str(tmp_path / "missing" / "r.csv"))
    with pytest.raises(OutputError):
        ex.run_plan(plan, default_doc)


def test_compare():
    a = "config_param,config_value,metric,mean,sd,ci95,reps\nP_j,15,rate,6.0,1.0,0.3,20\nP_j,15,ewaij,1.0,0,0,20\n"
    b = "config_param,config_value,metric,mean,sd,ci95,reps\nP_j,15,rate,4.0,1.0,0.4,20\n"
    (imp,) = ex.compare(a, b, "rate")
    assert imp.improvement == pytest.approx(0.5)
    assert imp.ci95 == pytest.approx(1.5 * math.hypot(0.05, 0.1))
    assert "improvement" in ex.improvements_to_csv([imp])


def test_compare_within_one_report():
    text = "config_param,config_value,metric,mean,sd,ci95,reps\nnone,-,hla.rate,3.0,0,0,1\nnone,-,random.rate,2.0,0,0,1\n"
    (imp,) = ex.compare(text, text, "hla.rate", "random.rate")
    assert imp.improvement == pytest.approx(0.5) and imp.ci95 == 0.0


def test_parse_rejects_other_files():
    with pytest.raises(ConfigError):
        ex.parse_csv("a,b\n1,2\n")


def test_compare_thirty_percent():
    a = "config_param,config_value,metric,mean,sd,ci95,reps\nnone,-,rate,1.3,0,0,1\n"
    b = "config_param,config_value,metric,mean,sd,ci95,reps\nnone,-,rate,1.0,0,0,1\n"
    (imp,) = ex.compare(a, b, "rate")
    assert imp.improvement == pytest.approx(0.30)


def test_row_count(default_doc):
    default_doc["learning"]["epochs"] = 10
    plan = ex.ExperimentPlan("sweep", "P_j", (10.0, 20.0), reps=2)
    rows = ex.run_plan_rows(plan, default_doc)
    assert len(rows) == 2 * len(plan.metrics)


def test_interval_shrinks_with_reps(default_doc):
    # quadrupling the replications should halve the interval, up to sampling noise
    default_doc["learning"]["epochs"] = 20
    few = ex.run_plan_rows(ex.ExperimentPlan("channel-random", reps=25), default_doc)
    many = ex.run_plan_rows(ex.ExperimentPlan("channel-random", reps=100), default_doc)
    for a, b in zip(few, many):
        assert 1.6 <= a[5] / b[5] <= 2.4, a[2]


def test_hla_beats_random_at_every_user_count(default_doc):
    plan = ex.ExperimentPlan("sweep", "N", (2, 3, 4, 5, 6), reps=5)
    rows = ex.run_plan_rows(plan, default_doc)
    hla = [r[3] for r in rows if r[2] == "hla.rate"]
    rnd = [r[3] for r in rows if r[2] == "random.rate"]
    assert len(hla) == 5 and all(h > r for h, r in zip(hla, rnd)), (hla, rnd)
