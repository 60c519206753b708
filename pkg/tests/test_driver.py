import dataclasses

import pytest

from ftlcg import ColGenConfig, InfeasibleModelError, run_bench, solve
from ftlcg.instance import GeneratorConfig, generate_instance, with_commodities
from ftlcg.lp import MIPConfig
from ftlcg.master import check_schedule
from ftlcg.routing import simulate_schedule

pytestmark = pytest.mark.filterwarnings("ignore")


@pytest.mark.parametrize("pricing", ["p1", "p2", "enum", "random"])
def test_explicit_route_set_each_pricing(inst, routes, pricing):
    cfg = ColGenConfig(pricing=pricing, routes=tuple(routes), backend="native")
    schedule, stats = solve(inst, cfg)
    assert stats.pre_cut_objective == 158
    assert stats.objective == 208 and stats.cut_count == 3
    assert stats.relaxed_objectives == [278, 158]
    assert stats.status == "optimal"
    assert simulate_schedule(schedule, inst).clean and check_schedule(schedule, inst) == []


@pytest.mark.parametrize("generator", ["enumerated", "vns", "ga"])
def test_full_route_set(inst, generator):
    ga = None
    if generator == "ga":
        from ftlcg.heuristics import GAParams
        ga = GAParams(population_size=30, generations=20)
    schedule, stats = solve(inst, ColGenConfig(generator=generator, ga=ga))
    assert stats.objective == 183
    assert simulate_schedule(schedule, inst).clean


def test_insertion_start(inst):
    schedule, stats = solve(inst, ColGenConfig(init="insertion", pricing="enum"))
    assert stats.pre_cut_objective == 158
    assert 183 <= stats.objective <= 208  # the repaired optimum depends on which columns were priced in
    assert simulate_schedule(schedule, inst).clean
    assert stats.stop_reason == "no negative column in the route set"


def test_zero_commodities(inst):
    schedule, stats = solve(with_commodities(inst, []))
    assert schedule.instances == [] and stats.objective == 0


def test_runs_are_deterministic():
    inst = generate_instance(GeneratorConfig(node_count=5, shift_count=2, commodity_count=(6, 8),
                                             units=(14, 20), fit_fleet=True, seed=4))
    for gen in ("vns", "ga"):
        from ftlcg.heuristics import GAParams
        cfg = ColGenConfig(generator=gen, init="insertion", seed=2, max_columns=40, max_iterations=4,
                           ga=GAParams(population_size=20, generations=10))
        a, sa = solve(inst, cfg)
        b, sb = solve(inst, cfg)
        assert a.instances == b.instances and sa.fingerprint() == sb.fingerprint()


def test_relaxed_objective_never_increases():
    inst = generate_instance(GeneratorConfig(node_count=5, shift_count=2, commodity_count=(8, 10),
                                             units=(20, 30), fit_fleet=True, seed=1))
    _, stats = solve(inst, ColGenConfig(max_columns=5, record_columns=True))
    objs = stats.relaxed_objectives
    assert len(objs) > 2
    assert all(b <= a * (1 + 1e-9) for a, b in zip(objs, objs[1:]))
    assert stats.emitted and all(c.estimate < 0 for c in stats.emitted)


def test_infeasible_fleet_is_reported(inst):
    tiny = dataclasses.replace(inst, fleet_size=1)
    with pytest.raises(InfeasibleModelError) as info:
        solve(tiny, ColGenConfig())
    assert info.value.stats.status == "infeasible"


def test_cut_round_limit_marks_incomplete(inst, routes):
    _, stats = solve(inst, ColGenConfig(routes=tuple(routes), cut_rounds=0, backend="native"))
    assert stats.status == "incomplete" and stats.objective == 158


def test_mip_time_limit_flagged():
    inst = generate_instance(GeneratorConfig(node_count=6, shift_count=2, commodity_count=(10, 12),
                                             units=(30, 40), fit_fleet=True, seed=0))
    cfg = ColGenConfig(max_iterations=2, max_columns=60, mip=MIPConfig(node_limit=1), backend="native")
    try:
        _, stats = solve(inst, cfg)
    except InfeasibleModelError as exc:
        stats = exc.stats
    assert stats.status == "limit"


def test_config_validation():
    with pytest.raises(ValueError):
        ColGenConfig(generator="vns", pricing="enum")
    with pytest.raises(ValueError):
        ColGenConfig(max_iterations=0)
    assert ColGenConfig(generator="ga", init="insertion").label() == "ga/p2/insertion"


def test_bench_two_rows(inst, routes, tmp_path):
    cfg = ColGenConfig(routes=tuple(routes), backend="native")
    report = run_bench([("example", inst)], [("p2", cfg)], repeats=2, csv_path=tmp_path / "b.csv")
    assert [r.stats.objective for r in report.rows] == [208, 208]
    assert [r.seed for r in report.rows] == [0, 1]
    assert report.means()[0]["Obj"] == 208
    text = (tmp_path / "b.csv").read_text()
    assert text.splitlines()[0].startswith("instance,config,repeat,seed,T")
    assert len(text.splitlines()) == 3
    assert "example" in report.table()


def test_bench_records_failures(inst):
    tiny = dataclasses.replace(inst, fleet_size=1)
    report = run_bench([("tiny", tiny)], [("p2", ColGenConfig())])
    assert report.rows[0].stats is None and "InfeasibleModelError" in report.rows[0].error
    assert "failed" in report.table()


def test_empty_bench():
    report = run_bench([], [])
    assert report.rows == [] and report.means() == []
    assert report.to_csv().count("\n") == 1
