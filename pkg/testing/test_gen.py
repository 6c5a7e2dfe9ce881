import pydantic
import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

from contract_market.choice import GreedyMatroid, failing_agents
from contract_market.errors import SizeLimitError
from contract_market.files import dump_market
from contract_market.gen import GenParams, gen_market, gen_market_with_reports, gen_view_pair
from contract_market.model import EMPTY, full_view
from contract_market.oracle import enumerate_view
from contract_market.prng import SplitMix64


def test_splitmix_reference_value():
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


def test_derived_streams_are_independent():
    first = SplitMix64.derive(3, "agent:w1")
    again = SplitMix64.derive(3, "agent:w1")
    other = SplitMix64.derive(3, "agent:w2")
    draws = [first.next_u64() for _ in range(4)]
    assert draws == [again.next_u64() for _ in range(4)]
    assert draws != [other.next_u64() for _ in range(4)]


def test_below_and_shuffle_stay_in_range():
    stream = SplitMix64(11)
    assert all(0 <= stream.below(7) < 7 for _ in range(200))
    assert sorted(stream.shuffled(range(10))) == list(range(10))
    with pytest.raises(ValueError):
        stream.below(0)


def test_m1_shaped_market():
    market = gen_market(GenParams(n_workers=2, n_firms=2, seed=7))
    assert market.workers == {"w1", "w2"}
    assert market.firms == {"f1", "f2"}
    assert set(market.contracts) == {"w1f1", "w1f2", "w2f1", "w2f2"}
    for agent in market.agents:
        spec = market.choices[agent]
        assert isinstance(spec, GreedyMatroid)
        assert spec.quota == 1
        assert len(market.incident(agent)) == 2


def test_zero_density():
    market = gen_market(GenParams(n_workers=2, n_firms=3, density=0.0, seed=1))
    assert market.contracts == {}
    assert enumerate_view(full_view(market)).quasi_stable == [EMPTY]


def test_same_seed_same_bytes():
    params = GenParams(n_workers=3, n_firms=3, density=0.6, quota_range=(1, 2), seed=42)
    assert dump_market(gen_market(params)) == dump_market(gen_market(params))
    assert dump_market(gen_market(params)) != dump_market(gen_market(params.model_copy(update={"seed": 43})))


def test_multiple_contracts_per_pair():
    market = gen_market(GenParams(n_workers=1, n_firms=1, max_contracts_per_pair=3, seed=5))
    assert set(market.contracts) == {"w1f1-0", "w1f1-1", "w1f1-2"}


def test_size_guard():
    with pytest.raises(SizeLimitError):
        gen_market(GenParams(n_workers=4, n_firms=4, max_contracts_per_pair=4))


def test_quota_range_is_validated():
    with pytest.raises(pydantic.ValidationError):
        GenParams(quota_range=(2, 1))


def test_mixed_family_reports_every_agent():
    market, reports = gen_market_with_reports(GenParams(n_workers=2, n_firms=2, seed=3, family="mixed", table_share=1.0))
    assert set(reports) == set(market.agents)
    assert all(len(rows) == 4 for rows in reports.values())


@given(integers(min_value=0, max_value=2**64 - 1))
@settings(max_examples=40, deadline=None)
def test_greedy_family_always_verifies(seed):
    params = GenParams(n_workers=3, n_firms=2, max_contracts_per_pair=2, density=0.7, quota_range=(1, 3), acceptability_rate=0.8, seed=seed)
    market, reports = gen_market_with_reports(params)
    assert failing_agents(reports) == []


@given(integers(min_value=0, max_value=2**32))
@settings(max_examples=30, deadline=None)
def test_view_pairs_nest(seed):
    market = gen_market(GenParams(n_workers=3, n_firms=3, seed=seed))
    pair = gen_view_pair(market, seed)
    assert pair.before.workers == market.workers
    assert pair.after.firms == market.firms
    assert pair.before.firms and pair.after.workers
    assert pair.entering_firms == market.firms - pair.before.firms
    assert pair.exiting_workers == market.workers - pair.after.workers


@pytest.mark.parametrize("shape", [(1, 8, 1), (2, 4, 2), (4, 2, 2)])
@pytest.mark.parametrize("seed", range(15))
def test_greedy_family_verifies_with_eight_contracts_per_agent(shape, seed):
    n_workers, n_firms, per_pair = shape
    params = GenParams(
        n_workers=n_workers,
        n_firms=n_firms,
        max_contracts_per_pair=per_pair,
        density=0.9,
        quota_range=(1, 5),
        acceptability_rate=0.8,
        seed=seed,
    )
    market, reports = gen_market_with_reports(params)
    assert max(len(market.incident(agent)) for agent in market.agents) <= 8
    assert failing_agents(reports) == []
