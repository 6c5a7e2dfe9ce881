"""
Seeded random markets for property testing.

The greedy-only family (priority scan, one contract per counterpart,
truncated at the quota) is substitutable, path independent and LAD; every
generated agent is run through the verifiers anyway. The mixed family
swaps some agents for random ranked tables and returns their reports.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Literal, Tuple

from pydantic import BaseModel, Field, model_validator

from .choice import ALL_PROPERTIES, GreedyMatroid, RankedTable, VerificationReport, failing_agents, verify_market
from .config import DEFAULT_VERIFIER_CAP
from .errors import PropertyViolation, SizeLimitError
from .model import Contract, Market, SubmarketView, submarket
from .prng import SplitMix64

logger = logging.getLogger(__name__)

TABLE_AGENT_LIMIT = 5


class GenParams(BaseModel):
    n_workers: int = Field(2, ge=1)
    n_firms: int = Field(2, ge=1)
    max_contracts_per_pair: int = Field(1, ge=1)
    density: float = Field(1.0, ge=0.0, le=1.0)
    quota_range: Tuple[int, int] = (1, 1)
    acceptability_rate: float = Field(1.0, ge=0.0, le=1.0)
    seed: int = Field(0, ge=0, lt=2**64)
    family: Literal["greedy-only", "mixed"] = "greedy-only"
    table_share: float = Field(0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _quota_bounds(self) -> "GenParams":
        low, high = self.quota_range
        if low < 1 or high < low:
            raise ValueError("quota_range must satisfy 1 <= min <= max")
        return self


def worker_ids(count: int) -> List[str]:
    return [f"w{index}" for index in range(1, count + 1)]


def firm_ids(count: int) -> List[str]:
    return [f"f{index}" for index in range(1, count + 1)]


def _contracts(params: GenParams) -> Dict[str, Contract]:
    contracts = {}
    for worker in worker_ids(params.n_workers):
        for firm in firm_ids(params.n_firms):
            stream = SplitMix64.derive(params.seed, f"pair:{worker}:{firm}")
            for slot in range(params.max_contracts_per_pair):
                if stream.chance(params.density):
                    contract_id = f"{worker}{firm}" if params.max_contracts_per_pair == 1 else f"{worker}{firm}-{slot}"
                    contracts[contract_id] = Contract(contract_id, worker, firm, terms=f"slot {slot}")
    return contracts


def _greedy_spec(params: GenParams, stream: SplitMix64, ground: List[str]) -> GreedyMatroid:
    low, high = params.quota_range
    quota = low + stream.below(high - low + 1)
    priority = stream.shuffled(ground)
    acceptable = frozenset(c for c in priority if stream.chance(params.acceptability_rate))
    return GreedyMatroid(quota, tuple(priority), acceptable)


def _table_spec(stream: SplitMix64, agent: str, ground: List[str], contracts: Dict[str, Contract]) -> RankedTable:
    """A random ranking over some allocations of the agent's contracts"""
    feasible: List[FrozenSet[str]] = []
    for mask in range(1, 1 << len(ground)):
        entry = frozenset(c for index, c in enumerate(ground) if mask >> index & 1)
        counterparts = [contracts[c].counterpart(agent) for c in entry]
        if len(set(counterparts)) == len(counterparts):
            feasible.append(entry)
    listed = [entry for entry in feasible if stream.chance(0.6)]
    ranking = stream.shuffled(listed + [frozenset()])
    return RankedTable(tuple(ranking))


def gen_market_with_reports(
    params: GenParams, cap: int = DEFAULT_VERIFIER_CAP
) -> Tuple[Market, Dict[str, List[VerificationReport]]]:
    per_agent_limit = max(params.n_workers, params.n_firms) * params.max_contracts_per_pair
    if per_agent_limit > cap:
        raise SizeLimitError(
            f"agents could hold {per_agent_limit} contracts; the choice verifiers are capped at {cap}"
        )

    contracts = _contracts(params)
    workers, firms = worker_ids(params.n_workers), firm_ids(params.n_firms)
    choices = {}
    for agent in workers + firms:
        stream = SplitMix64.derive(params.seed, f"agent:{agent}")
        ground = sorted(c.id for c in contracts.values() if agent in c.endpoints())
        use_table = (
            params.family == "mixed"
            and len(ground) <= TABLE_AGENT_LIMIT
            and stream.chance(params.table_share)
        )
        choices[agent] = _table_spec(stream, agent, ground, contracts) if use_table else _greedy_spec(params, stream, ground)

    market = Market(workers=frozenset(workers), firms=frozenset(firms), contracts=contracts, choices=choices)
    reports = verify_market(market, ALL_PROPERTIES, cap)
    logger.info(f"Generated market seed={params.seed}: {len(contracts)} contracts, family={params.family}")
    return market, reports


def gen_market(params: GenParams, cap: int = DEFAULT_VERIFIER_CAP) -> Market:
    market, reports = gen_market_with_reports(params, cap)
    if params.family == "greedy-only":
        failed = failing_agents(reports)
        if failed:
            raise PropertyViolation("greedy agents failed preference verification", {"agents": failed})
    return market


@dataclass(frozen=True)
class ViewPair:
    """(W, F', X_{F'}) before a disruption and (W', F, X_{W'}) after it"""

    before: SubmarketView
    after: SubmarketView
    entering_firms: FrozenSet[str]
    exiting_workers: FrozenSet[str]


def gen_view_pair(market: Market, seed: int, allow_worker_exit: bool = True) -> ViewPair:
    """Pick nonempty F' ⊆ F and W' ⊆ W for a disruption sweep"""
    stream = SplitMix64.derive(seed, "view-pair")
    firms = sorted(market.firms)
    workers = sorted(market.workers)
    kept_firms = [f for f in firms if stream.chance(0.6)] or [firms[stream.below(len(firms))]]
    kept_workers = workers
    if allow_worker_exit:
        kept_workers = [w for w in workers if stream.chance(0.75)] or [workers[stream.below(len(workers))]]
    return ViewPair(
        before=submarket(market, workers, kept_firms),
        after=submarket(market, kept_workers, firms),
        entering_firms=frozenset(firms) - frozenset(kept_firms),
        exiting_workers=frozenset(workers) - frozenset(kept_workers),
    )
