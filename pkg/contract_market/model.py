"""
Core entities of a matching market with contracts: contracts, markets,
submarket views and allocations.

Every type here is an immutable value. Contract ids are opaque strings and
their lexicographic order is the canonical order used for iteration.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .errors import InputError

if TYPE_CHECKING:
    from .choice import ChoiceSpec

logger = logging.getLogger(__name__)

WORKER = "worker"
FIRM = "firm"


@dataclass(frozen=True)
class Contract:
    id: str
    worker: str
    firm: str
    terms: str = ""

    def endpoints(self) -> Tuple[str, str]:
        return self.worker, self.firm

    def counterpart(self, agent: str) -> str:
        if agent == self.worker:
            return self.firm
        if agent == self.firm:
            return self.worker
        raise InputError(f"agent {agent!r} is not a party to contract {self.id!r}")


@dataclass(frozen=True, order=True)
class Allocation:
    """A set of contract ids kept in canonical ascending order"""

    members: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    @classmethod
    def of(cls, ids: Union["Allocation", Iterable[str]] = ()) -> "Allocation":
        if isinstance(ids, Allocation):
            return ids
        if isinstance(ids, str):
            raise TypeError("pass an iterable of contract ids, not a single string")
        return cls(tuple(ids))

    @cached_property
    def ids(self) -> FrozenSet[str]:
        return frozenset(self.members)

    def __iter__(self) -> Iterator[str]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, contract_id: object) -> bool:
        return contract_id in self.ids

    def __str__(self) -> str:
        return "{" + ",".join(self.members) + "}"

    def canonical_key(self) -> Tuple[int, Tuple[str, ...]]:
        """Sort key: size first, then lexicographic ids"""
        return len(self.members), self.members


EMPTY = Allocation()

ContractSet = Union[Allocation, Iterable[str]]


def as_ids(contracts: ContractSet) -> FrozenSet[str]:
    if isinstance(contracts, Allocation):
        return contracts.ids
    if isinstance(contracts, frozenset):
        return contracts
    if isinstance(contracts, str):
        raise TypeError("pass an iterable of contract ids, not a single string")
    return frozenset(contracts)


@dataclass(frozen=True)
class Market:
    workers: FrozenSet[str]
    firms: FrozenSet[str]
    contracts: Mapping[str, Contract]
    choices: Mapping[str, "ChoiceSpec"]
    _incidence: Dict[str, FrozenSet[str]] = field(init=False, repr=False, compare=False)
    choice_cache: Dict[Tuple[str, FrozenSet[str]], FrozenSet[str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "workers", frozenset(self.workers))
        object.__setattr__(self, "firms", frozenset(self.firms))
        object.__setattr__(self, "contracts", dict(sorted(self.contracts.items())))
        object.__setattr__(self, "choices", dict(sorted(self.choices.items())))
        object.__setattr__(self, "choice_cache", {})
        self._validate()

    def _validate(self) -> None:
        overlap = self.workers & self.firms
        if overlap:
            raise InputError(f"ids used as both worker and firm: {sorted(overlap)}", location="workers")

        incidence: Dict[str, set] = {agent: set() for agent in self.workers | self.firms}
        for key, contract in self.contracts.items():
            location = f"contracts.{key}"
            if key != contract.id:
                raise InputError(f"contract stored under {key!r} has id {contract.id!r}", location=location)
            if contract.worker not in self.workers:
                raise InputError(f"unknown worker {contract.worker!r}", location=f"{location}.worker")
            if contract.firm not in self.firms:
                raise InputError(f"unknown firm {contract.firm!r}", location=f"{location}.firm")
            incidence[contract.worker].add(contract.id)
            incidence[contract.firm].add(contract.id)
        object.__setattr__(self, "_incidence", {agent: frozenset(ids) for agent, ids in incidence.items()})

        missing = sorted((self.workers | self.firms) - set(self.choices))
        if missing:
            raise InputError(f"agents without a choice spec: {missing}", location="choices")
        extra = sorted(set(self.choices) - (self.workers | self.firms))
        if extra:
            raise InputError(f"choice specs for unknown agents: {extra}", location="choices")
        for agent, spec in self.choices.items():
            spec.validate(agent, self)

    def contract(self, contract_id: str) -> Contract:
        try:
            return self.contracts[contract_id]
        except KeyError:
            raise InputError(f"unknown contract id {contract_id!r}")

    def incident(self, agent: str) -> FrozenSet[str]:
        """X_i: every contract naming the agent"""
        try:
            return self._incidence[agent]
        except KeyError:
            raise InputError(f"unknown agent {agent!r}")

    def side_of(self, agent: str) -> str:
        if agent in self.workers:
            return WORKER
        if agent in self.firms:
            return FIRM
        raise InputError(f"unknown agent {agent!r}")

    def counterpart(self, contract_id: str, agent: str) -> str:
        return self.contract(contract_id).counterpart(agent)

    @property
    def agents(self) -> FrozenSet[str]:
        return self.workers | self.firms


@dataclass(frozen=True)
class SubmarketView:
    """The market (W', F', X_{W'} ∩ X_{F'}) over a shared base market"""

    base: Market
    active_workers: FrozenSet[str]
    active_firms: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, "active_workers", frozenset(self.active_workers))
        object.__setattr__(self, "active_firms", frozenset(self.active_firms))

    @cached_property
    def contracts(self) -> FrozenSet[str]:
        return frozenset(
            contract.id
            for contract in self.base.contracts.values()
            if contract.worker in self.active_workers and contract.firm in self.active_firms
        )

    @property
    def workers(self) -> FrozenSet[str]:
        return self.active_workers

    @property
    def firms(self) -> FrozenSet[str]:
        return self.active_firms

    def side(self, which: str) -> FrozenSet[str]:
        if which in ("w", WORKER):
            return self.active_workers
        if which in ("f", FIRM):
            return self.active_firms
        raise InputError(f"unknown side {which!r}; expected 'w' or 'f'")

    def require_subset(self, contracts: ContractSet, what: str = "allocation") -> FrozenSet[str]:
        ids = as_ids(contracts)
        for contract_id in ids:
            self.base.contract(contract_id)
        outside = ids - self.contracts
        if outside:
            raise InputError(f"{what} uses contracts outside the view: {sorted(outside)}")
        return ids

    def is_full(self) -> bool:
        return self.active_workers == self.base.workers and self.active_firms == self.base.firms

    def describe(self) -> str:
        return f"(W'={sorted(self.active_workers)}, F'={sorted(self.active_firms)}, |X'|={len(self.contracts)})"


def is_allocation(members: ContractSet, market: Market) -> bool:
    """True iff no worker-firm pair holds more than one contract"""
    pairs = set()
    for contract_id in as_ids(members):
        pair = market.contract(contract_id).endpoints()
        if pair in pairs:
            return False
        pairs.add(pair)
    return True


def make_allocation(members: ContractSet, market: Market) -> Allocation:
    allocation = Allocation.of(members)
    if not is_allocation(allocation, market):
        raise InputError(f"{allocation} holds two contracts for one worker-firm pair")
    return allocation


def agent_slice(market: Market, allocation: ContractSet, agent: str) -> Allocation:
    """Y_i"""
    return Allocation.of(as_ids(allocation) & market.incident(agent))


def restrict_contracts(market: Market, contracts: ContractSet, workers: Iterable[str]) -> FrozenSet[str]:
    keep = frozenset(workers)
    return frozenset(c for c in as_ids(contracts) if market.contract(c).worker in keep)


def restrict_allocation(market: Market, allocation: ContractSet, workers: Iterable[str]) -> Allocation:
    """Y_{W'}: the contracts of the given workers"""
    keep = frozenset(workers)
    unknown = keep - market.workers
    if unknown:
        raise InputError(f"not workers of the market: {sorted(unknown)}")
    return Allocation.of(restrict_contracts(market, allocation, keep))


def submarket(market: Market, workers: Iterable[str], firms: Iterable[str]) -> SubmarketView:
    active_workers = frozenset(workers)
    active_firms = frozenset(firms)
    if not active_workers:
        raise InputError("a submarket needs at least one worker", location="workers")
    if not active_firms:
        raise InputError("a submarket needs at least one firm", location="firms")
    unknown = (active_workers - market.workers) | (active_firms - market.firms)
    if unknown:
        raise InputError(f"agents not in the market or on the wrong side: {sorted(unknown)}")
    return SubmarketView(market, active_workers, active_firms)


def full_view(market: Market) -> SubmarketView:
    return SubmarketView(market, market.workers, market.firms)


def dualize(market: Market) -> Market:
    """Exchange the roles of workers and firms"""
    contracts = {
        contract_id: Contract(contract.id, worker=contract.firm, firm=contract.worker, terms=contract.terms)
        for contract_id, contract in market.contracts.items()
    }
    return Market(workers=market.firms, firms=market.workers, contracts=contracts, choices=dict(market.choices))


def dualize_view(view: SubmarketView) -> SubmarketView:
    return SubmarketView(dualize(view.base), view.active_firms, view.active_workers)


def parse_allocation(text: Optional[str], market: Market) -> Allocation:
    """Parse a comma-separated id list such as 'a, d' or '{a,d}'"""
    if text is None:
        return Allocation()
    ids: List[str] = [part.strip() for part in text.strip().strip("{}").split(",") if part.strip()]
    for contract_id in ids:
        market.contract(contract_id)
    return make_allocation(ids, market)
