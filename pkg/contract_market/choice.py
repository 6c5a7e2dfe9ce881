"""
Agent preferences and the choice/rejection functions they induce, plus
exhaustive verifiers for substitutability, path independence, rejection
monotonicity and the law of aggregate demand.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .config import DEFAULT_VERIFIER_CAP
from .errors import InputError, PropertyViolation, SizeLimitError
from .model import ContractSet, Market, as_ids

logger = logging.getLogger(__name__)

SUBSTITUTABILITY = "substitutability"
PATH_INDEPENDENCE = "path-independence"
REJECTION_MONOTONICITY = "rejection-monotonicity"
LAW_OF_AGGREGATE_DEMAND = "law-of-aggregate-demand"
ALL_PROPERTIES = (SUBSTITUTABILITY, PATH_INDEPENDENCE, REJECTION_MONOTONICITY, LAW_OF_AGGREGATE_DEMAND)


@dataclass(frozen=True)
class RankedTable:
    """Explicit strict ranking of allocations; unlisted sets are never chosen"""

    ranking: Tuple[FrozenSet[str], ...]

    kind = "table"

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(frozenset(entry) for entry in self.ranking))

    def validate(self, agent: str, market: Market) -> None:
        location = f"choices.{agent}.ranking"
        ground = market.incident(agent)
        if len(set(self.ranking)) != len(self.ranking):
            raise InputError("ranking lists the same allocation twice", location=location)
        if frozenset() not in self.ranking:
            raise InputError("ranking must include the empty allocation", location=location)
        for index, entry in enumerate(self.ranking):
            outside = entry - ground
            if outside:
                raise InputError(f"contracts not incident to {agent}: {sorted(outside)}", location=f"{location}[{index}]")
            counterparts = [market.counterpart(c, agent) for c in entry]
            if len(set(counterparts)) != len(counterparts):
                raise InputError("entry holds two contracts with one counterpart", location=f"{location}[{index}]")

    def choose(self, agent: str, offered: FrozenSet[str], market: Market) -> FrozenSet[str]:
        for entry in self.ranking:
            if entry <= offered:
                return entry
        return frozenset()


@dataclass(frozen=True)
class GreedyMatroid:
    """Priority scan taking at most one contract per counterpart, up to the quota"""

    quota: int
    priority: Tuple[str, ...]
    acceptable: FrozenSet[str]

    kind = "greedy"

    def __post_init__(self):
        object.__setattr__(self, "priority", tuple(self.priority))
        object.__setattr__(self, "acceptable", frozenset(self.acceptable))

    def validate(self, agent: str, market: Market) -> None:
        location = f"choices.{agent}"
        ground = market.incident(agent)
        if self.quota < 1:
            raise InputError("quota must be a positive integer", location=f"{location}.quota")
        if len(set(self.priority)) != len(self.priority):
            raise InputError("priority ranks a contract twice", location=f"{location}.priority")
        if set(self.priority) != ground:
            raise InputError(
                f"priority must cover exactly the contracts of {agent}: {sorted(ground)}",
                location=f"{location}.priority",
            )
        if not self.acceptable <= ground:
            raise InputError(
                f"acceptable contracts not incident to {agent}: {sorted(self.acceptable - ground)}",
                location=f"{location}.acceptable",
            )

    def choose(self, agent: str, offered: FrozenSet[str], market: Market) -> FrozenSet[str]:
        chosen = []
        used = set()
        for contract_id in self.priority:
            if len(chosen) >= self.quota:
                break
            if contract_id not in offered or contract_id not in self.acceptable:
                continue
            other = market.counterpart(contract_id, agent)
            if other not in used:
                chosen.append(contract_id)
                used.add(other)
        return frozenset(chosen)


ChoiceSpec = Union[RankedTable, GreedyMatroid]


def choose(market: Market, agent: str, contracts: ContractSet) -> FrozenSet[str]:
    """C_i(Y), looking only at Y_i; memoized per market"""
    offered = as_ids(contracts) & market.incident(agent)
    key = (agent, offered)
    chosen = market.choice_cache.get(key)
    if chosen is None:
        chosen = market.choices[agent].choose(agent, offered, market)
        market.choice_cache[key] = chosen
    return chosen


def reject(market: Market, agent: str, contracts: ContractSet) -> FrozenSet[str]:
    """R_i(Y) = Y_i minus C_i(Y)"""
    return (as_ids(contracts) & market.incident(agent)) - choose(market, agent, contracts)


def _one_side(market: Market, agents: Iterable[str]) -> FrozenSet[str]:
    group = frozenset(agents)
    sides = {market.side_of(agent) for agent in group}
    if len(sides) > 1:
        raise InputError(f"agent set mixes workers and firms: {sorted(group)}")
    return group


def choose_side(market: Market, agents: Iterable[str], contracts: ContractSet) -> FrozenSet[str]:
    """C_{W'}(Y) or C_{F'}(Y): the union of per-agent choices"""
    offered = as_ids(contracts)
    chosen: FrozenSet[str] = frozenset()
    for agent in sorted(_one_side(market, agents)):
        chosen |= choose(market, agent, offered)
    return chosen


def reject_side(market: Market, agents: Iterable[str], contracts: ContractSet) -> FrozenSet[str]:
    offered = as_ids(contracts)
    rejected: FrozenSet[str] = frozenset()
    for agent in sorted(_one_side(market, agents)):
        rejected |= reject(market, agent, offered)
    return rejected


@dataclass(frozen=True)
class VerificationReport:
    agent: str
    property: str
    passed: bool
    witness: Optional[Tuple[Tuple[str, ...], Tuple[str, ...]]] = None

    def to_dict(self) -> Dict:
        return {
            "agent": self.agent,
            "property": self.property,
            "passed": self.passed,
            "witness": None if self.witness is None else {"Y": list(self.witness[0]), "Z": list(self.witness[1])},
        }


class _ChoiceTable:
    """C_i evaluated once on every subset of X_i, indexed by bitmask"""

    def __init__(self, market: Market, agent: str, cap: int):
        self.agent = agent
        self.ground: List[str] = sorted(market.incident(agent))
        if len(self.ground) > cap:
            raise SizeLimitError(
                f"agent {agent} has {len(self.ground)} contracts; exhaustive verification is capped at {cap}"
            )
        bit = {contract_id: 1 << index for index, contract_id in enumerate(self.ground)}
        self.full = (1 << len(self.ground)) - 1
        self.chosen: List[int] = []
        for mask in range(self.full + 1):
            picked = choose(market, agent, self.to_set(mask))
            self.chosen.append(sum(bit[c] for c in picked))
        self._findings: Dict[str, Optional[Tuple[int, int]]] = {}

    def finding(self, prop: str) -> Optional[Tuple[int, int]]:
        """First violation of the property, computed once per table"""
        if prop not in self._findings:
            self._findings[prop] = _FINDERS[prop](self)
        return self._findings[prop]

    def to_set(self, mask: int) -> FrozenSet[str]:
        return frozenset(c for index, c in enumerate(self.ground) if mask >> index & 1)

    def to_ids(self, mask: int) -> Tuple[str, ...]:
        return tuple(sorted(self.to_set(mask)))

    def nested_pairs(self) -> Iterator[Tuple[int, int]]:
        """All (Y, Z) with Z ⊆ Y, Y ascending and Z ascending within Y"""
        for y in range(self.full + 1):
            z = 0
            while True:
                yield y, z
                if z == y:
                    break
                z = (z - y) & y


def _report(table: _ChoiceTable, prop: str, violation: Optional[Tuple[int, int]]) -> VerificationReport:
    if violation is None:
        return VerificationReport(table.agent, prop, True)
    y, z = violation
    logger.info(f"{table.agent} violates {prop}: Y={table.to_ids(y)} Z={table.to_ids(z)}")
    return VerificationReport(table.agent, prop, False, (table.to_ids(y), table.to_ids(z)))


def _find_substitutability(table: _ChoiceTable) -> Optional[Tuple[int, int]]:
    chosen = table.chosen
    for y, z in table.nested_pairs():
        if chosen[y] & z & ~chosen[z]:
            return y, z
    return None


def _find_rejection_monotonicity(table: _ChoiceTable) -> Optional[Tuple[int, int]]:
    chosen = table.chosen
    for y, z in table.nested_pairs():
        rejected_y = y & ~chosen[y]
        rejected_z = z & ~chosen[z]
        if rejected_z & ~rejected_y:
            return y, z
    return None


def _find_lad(table: _ChoiceTable) -> Optional[Tuple[int, int]]:
    sizes = [bin(mask).count("1") for mask in table.chosen]
    for y, z in table.nested_pairs():
        if sizes[z] > sizes[y]:
            return y, z
    return None


def _find_rejected_irrelevance(table: _ChoiceTable) -> Optional[Tuple[int, int]]:
    """C(Y) ⊆ Z ⊆ Y implies C(Z) = C(Y)"""
    chosen = table.chosen
    for y, z in table.nested_pairs():
        if chosen[y] & ~z == 0 and chosen[z] != chosen[y]:
            return y, z
    return None


def _find_path_independence(table: _ChoiceTable) -> Optional[Tuple[int, int]]:
    """Path independence holds iff substitutability and irrelevance of rejected
    contracts both hold; the search over all (Y, Z) only runs to find a witness"""
    if table.finding(SUBSTITUTABILITY) is None and _find_rejected_irrelevance(table) is None:
        return None
    chosen = table.chosen
    for y in range(table.full + 1):
        chosen_y = chosen[y]
        for z in range(table.full + 1):
            if chosen[y | z] != chosen[chosen_y | z]:
                return y, z
    raise PropertyViolation(f"path-independence decision and witness search disagree for {table.agent}", {})



_FINDERS: Dict[str, Callable[[_ChoiceTable], Optional[Tuple[int, int]]]] = {
    SUBSTITUTABILITY: _find_substitutability,
    PATH_INDEPENDENCE: _find_path_independence,
    REJECTION_MONOTONICITY: _find_rejection_monotonicity,
    LAW_OF_AGGREGATE_DEMAND: _find_lad,
}


def _verify(market: Market, agent: str, prop: str, cap: int) -> VerificationReport:
    table = _ChoiceTable(market, agent, cap)
    return _report(table, prop, table.finding(prop))


def verify_substitutable(market: Market, agent: str, cap: int = DEFAULT_VERIFIER_CAP) -> VerificationReport:
    return _verify(market, agent, SUBSTITUTABILITY, cap)


def verify_path_independent(market: Market, agent: str, cap: int = DEFAULT_VERIFIER_CAP) -> VerificationReport:
    return _verify(market, agent, PATH_INDEPENDENCE, cap)


def verify_rejection_monotone(market: Market, agent: str, cap: int = DEFAULT_VERIFIER_CAP) -> VerificationReport:
    return _verify(market, agent, REJECTION_MONOTONICITY, cap)


def verify_lad(market: Market, agent: str, cap: int = DEFAULT_VERIFIER_CAP) -> VerificationReport:
    return _verify(market, agent, LAW_OF_AGGREGATE_DEMAND, cap)


def verify_agent(
    market: Market, agent: str, properties: Sequence[str] = ALL_PROPERTIES, cap: int = DEFAULT_VERIFIER_CAP
) -> List[VerificationReport]:
    table = _ChoiceTable(market, agent, cap)
    return [_report(table, prop, table.finding(prop)) for prop in properties]


def verify_market(
    market: Market, properties: Sequence[str] = ALL_PROPERTIES, cap: int = DEFAULT_VERIFIER_CAP
) -> Dict[str, List[VerificationReport]]:
    reports = {agent: verify_agent(market, agent, properties, cap) for agent in sorted(market.agents)}
    failed = sorted(agent for agent, rows in reports.items() if not all(r.passed for r in rows))
    logger.info(f"Verified {len(reports)} agents for {list(properties)}; failing: {failed}")
    return reports


def failing_agents(reports: Dict[str, List[VerificationReport]], prop: Optional[str] = None) -> List[str]:
    return sorted(
        agent
        for agent, rows in reports.items()
        if any(not r.passed and (prop is None or r.property == prop) for r in rows)
    )


def replay_witness(market: Market, report: VerificationReport) -> bool:
    """Re-evaluate the definition on the witness; True iff the violation reproduces"""
    if report.passed or report.witness is None:
        return False
    agent = report.agent
    y, z = frozenset(report.witness[0]), frozenset(report.witness[1])
    if report.property == PATH_INDEPENDENCE:
        return choose(market, agent, y | z) != choose(market, agent, choose(market, agent, y) | z)
    if not z <= y:
        return False
    if report.property == SUBSTITUTABILITY:
        return not (choose(market, agent, y) & z) <= choose(market, agent, z)
    if report.property == REJECTION_MONOTONICITY:
        return not reject(market, agent, z) <= reject(market, agent, y)
    if report.property == LAW_OF_AGGREGATE_DEMAND:
        return len(choose(market, agent, z)) > len(choose(market, agent, y))
    raise InputError(f"unknown property {report.property!r}")


def side_properties_check(market: Market, agents: Iterable[str], y: ContractSet, z: ContractSet) -> bool:
    """Side-wise substitutability, rejection monotonicity (when Z ⊆ Y) and path independence"""
    group = _one_side(market, agents)
    y_ids, z_ids = as_ids(y), as_ids(z)
    if z_ids <= y_ids:
        if not (choose_side(market, group, y_ids) & z_ids) <= choose_side(market, group, z_ids):
            return False
        if not reject_side(market, group, z_ids) <= reject_side(market, group, y_ids):
            return False
    merged = choose_side(market, group, y_ids | z_ids)
    return merged == choose_side(market, group, choose_side(market, group, y_ids) | z_ids)
