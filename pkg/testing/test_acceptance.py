"""Seeded sweeps over generated greedy markets, checked against the brute-force oracle."""

import pytest

from conftest import SWEEP_CONTRACT_LIMIT, sweep_market

from contract_market.choice import ALL_PROPERTIES, failing_agents, verify_market
from contract_market.da import Full, RandomSubset, SingleLex, da_outcome, da_run, verify_trace, worker_pessimal
from contract_market.files import dump_market
from contract_market.gen import gen_view_pair
from contract_market.lattice import blair_dominates, join_w, tarski_iterate
from contract_market.model import EMPTY, full_view
from contract_market.oracle import certify, enumerate_view, minimal_stable_above
from contract_market.scenario import (
    COMBINED,
    DisruptionEvent,
    apply_disruption,
    mid_run_disruption,
    new_entrant_report,
    polarity_check,
    reequilibrate,
    stable_join_check,
    worker_pessimal_transfer,
)
from contract_market.stability import is_quasi_stable

pytestmark = pytest.mark.slow

MARKETS = range(200)
DA_MARKETS = range(50)
SCENARIOS = range(100)
RANDOM_SEEDS = range(1, 51)


def test_sweep_covers_every_shape_within_the_contract_limit():
    shapes = set()
    for seed in MARKETS:
        market = sweep_market(seed)
        assert len(market.contracts) <= SWEEP_CONTRACT_LIMIT
        shapes.add((len(market.workers), len(market.firms)))
    assert shapes == {(w, f) for w in range(1, 5) for f in range(1, 5)}


@pytest.mark.parametrize("seed", MARKETS)
def test_generated_markets_certify(seed):
    market = sweep_market(seed)
    assert failing_agents(verify_market(market, ALL_PROPERTIES)) == []
    report = certify(full_view(market))
    assert report.passed, report.to_dict()


@pytest.mark.parametrize("seed", MARKETS)
def test_tarski_iterates_ascend(seed):
    view = full_view(sweep_market(seed))
    for start in enumerate_view(view).quasi_stable:
        iterates = tarski_iterate(view, start).iterates
        assert len(set(iterates)) == len(iterates)
        for lower, upper in zip(iterates, iterates[1:]):
            assert blair_dominates(view, upper, lower, "w")


@pytest.mark.parametrize("seed", DA_MARKETS)
def test_every_strategy_reaches_the_least_stable_allocation_above_the_start(seed):
    view = full_view(sweep_market(seed))
    enumeration = enumerate_view(view)
    strategies = [Full(), SingleLex()] + [RandomSubset(s) for s in RANDOM_SEEDS]
    for start in enumeration.quasi_stable:
        expected = minimal_stable_above(enumeration, start)
        for strategy in strategies:
            trace = da_run(view, start, strategy)
            verdict = verify_trace(view, trace)
            assert verdict, (start, strategy.describe(), verdict.to_dict())
            assert trace.outcome == expected


@pytest.mark.parametrize("seed", SCENARIOS)
def test_disruption_scenarios(seed):
    market = sweep_market(seed)
    pair = gen_view_pair(market, seed)
    event = DisruptionEvent(COMBINED, pair.before, pair.after)
    stable_before = enumerate_view(event.before).stable
    stable_after = enumerate_view(event.after).stable

    for start in enumerate_view(event.before).quasi_stable:
        assert is_quasi_stable(event.after, apply_disruption(start, event))

    assert worker_pessimal_transfer(event) == worker_pessimal(event.after)

    trace = da_run(event.before, EMPTY, SingleLex())
    assert verify_trace(event.before, trace)
    expected = da_outcome(event.after, apply_disruption(EMPTY, event))
    for t in range(len(trace.steps) + 1):
        assert mid_run_disruption(event, EMPTY, t, SingleLex()) == (expected, expected)

    for y in stable_before:
        result = reequilibrate(y, event)
        assert verify_trace(event.after, result.trace)
        assert result.outcome in stable_after
        for y_prime in stable_after:
            assert polarity_check(event.before, event.after, y, y_prime)


@pytest.mark.parametrize("seed", SCENARIOS)
def test_pure_entry_and_lad(seed):
    market = sweep_market(seed)
    pair = gen_view_pair(market, seed, allow_worker_exit=False)
    event = DisruptionEvent(COMBINED, pair.before, pair.after)
    pessimal = worker_pessimal(event.after)

    for y in enumerate_view(event.after).quasi_stable:
        assert stable_join_check(event.after, y, pessimal) == join_w(event.after, y, pessimal)

    for y in enumerate_view(event.before).stable:
        report = new_entrant_report(y, event)
        assert report.outcome == join_w(event.after, y, pessimal)
        assert set(report.new_entrant_slices) == set(event.entering_firms)


@pytest.mark.parametrize("seed", range(0, 200, 10))
def test_runs_are_reproducible(seed):
    assert dump_market(sweep_market(seed)) == dump_market(sweep_market(seed))
    view = full_view(sweep_market(seed))
    strategy = RandomSubset(seed + 1)
    assert da_run(view, EMPTY, strategy).to_dict() == da_run(view, EMPTY, strategy).to_dict()
    assert certify(view).to_dict() == certify(full_view(sweep_market(seed))).to_dict()
