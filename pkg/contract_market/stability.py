"""
Stability predicates on a submarket view.

The polynomial Γ-based forms are the primary path: is_quasi_stable checks
Y ⊆ C_F'(Γ(Y)) and is_stable checks Y = C_F'(Γ(Y)). The definitional
forms live in the oracle module.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Tuple

from .choice import choose, choose_side, reject_side
from .errors import InputError, PreconditionError, PropertyViolation
from .model import Allocation, ContractSet, SubmarketView, dualize_view

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GammaSet:
    view: SubmarketView
    base: Allocation
    members: FrozenSet[str]


@dataclass(frozen=True)
class BlockReport:
    allocation: Allocation
    gamma: FrozenSet[str]
    blocking_contracts: FrozenSet[str]
    is_ir: bool
    is_quasi_stable: bool
    is_stable: bool

    def to_dict(self) -> Dict:
        return {
            "allocation": list(self.allocation),
            "gamma": sorted(self.gamma),
            "blocking_contracts": sorted(self.blocking_contracts),
            "individually_rational": self.is_ir,
            "quasi_stable": self.is_quasi_stable,
            "stable": self.is_stable,
        }


def _side_choice(view: SubmarketView, which: str, contracts: FrozenSet[str]) -> FrozenSet[str]:
    return choose_side(view.base, view.side(which), contracts)


def is_individually_rational(view: SubmarketView, allocation: ContractSet) -> bool:
    """C_W'(Y) = C_F'(Y) = Y"""
    ids = view.require_subset(allocation)
    return _side_choice(view, "w", ids) == ids and _side_choice(view, "f", ids) == ids


def _gamma_members(view: SubmarketView, ids: FrozenSet[str]) -> FrozenSet[str]:
    market = view.base
    # x ∈ C_W'(Y ∪ {x}) only depends on the choice of w(x)
    return frozenset(x for x in view.contracts if x in choose(market, market.contract(x).worker, ids | {x}))


def gamma(view: SubmarketView, allocation: ContractSet) -> GammaSet:
    """Γ^{X'}_{W'}(Y): contracts the workers would take if offered alongside Y"""
    ids = view.require_subset(allocation)
    if not is_individually_rational(view, ids):
        raise PreconditionError(f"Γ is defined for individually rational allocations; {Allocation.of(ids)} is not")
    return GammaSet(view, Allocation.of(ids), _gamma_members(view, ids))


def blocking_contracts(view: SubmarketView, allocation: ContractSet) -> FrozenSet[str]:
    """B(Y) ∩ X'"""
    ids = view.require_subset(allocation)
    market = view.base
    blocking = set()
    for x in view.contracts - ids:
        offered = ids | {x}
        contract = market.contract(x)
        if x in choose(market, contract.worker, offered) and x in choose(market, contract.firm, offered):
            blocking.add(x)
    return frozenset(blocking)


def firm_choice_of_gamma(view: SubmarketView, allocation: ContractSet) -> FrozenSet[str]:
    """C_F'(Γ(Y))"""
    return _side_choice(view, "f", gamma(view, allocation).members)


def is_quasi_stable(view: SubmarketView, allocation: ContractSet) -> bool:
    """Firm-quasi-stability: IR and Y ⊆ C_F'(Γ(Y)); non-IR input gives False"""
    ids = view.require_subset(allocation)
    if not is_individually_rational(view, ids):
        return False
    return ids <= _side_choice(view, "f", _gamma_members(view, ids))


def is_stable(view: SubmarketView, allocation: ContractSet) -> bool:
    ids = view.require_subset(allocation)
    if not is_individually_rational(view, ids):
        return False
    return ids == _side_choice(view, "f", _gamma_members(view, ids))


def is_worker_quasi_stable(view: SubmarketView, allocation: ContractSet) -> bool:
    """Quasi-stability with the roles of workers and firms exchanged"""
    return is_quasi_stable(dualize_view(view), allocation)


def block_report(view: SubmarketView, allocation: ContractSet) -> BlockReport:
    ids = view.require_subset(allocation)
    ir = is_individually_rational(view, ids)
    members = _gamma_members(view, ids) if ir else frozenset()
    firm_choice = _side_choice(view, "f", members) if ir else frozenset()
    return BlockReport(
        allocation=Allocation.of(ids),
        gamma=members,
        blocking_contracts=blocking_contracts(view, ids),
        is_ir=ir,
        is_quasi_stable=ir and ids <= firm_choice,
        is_stable=ir and ids == firm_choice,
    )


def is_blocking_set(view: SubmarketView, allocation: ContractSet, block: ContractSet) -> bool:
    """Z ⊆ C_W'(Y ∪ Z) ∩ C_F'(Y ∪ Z)"""
    ids = view.require_subset(allocation)
    z = view.require_subset(block, what="blocking set")
    if not z:
        raise InputError("a blocking set must be nonempty")
    if z & ids:
        raise InputError(f"a blocking set must be disjoint from the allocation; shared {sorted(z & ids)}")
    offered = ids | z
    return z <= (_side_choice(view, "w", offered) & _side_choice(view, "f", offered))


def _satisfied(view: SubmarketView, ids: FrozenSet[str], z: FrozenSet[str]) -> Allocation:
    offered = ids | z
    rejected = reject_side(view.base, view.workers, offered) | reject_side(view.base, view.firms, offered)
    return Allocation.of(offered - rejected)


def satisfy(view: SubmarketView, allocation: ContractSet, block: ContractSet) -> Allocation:
    """Y^Z = (Y ∪ Z) minus everything either side rejects from Y ∪ Z"""
    ids = view.require_subset(allocation)
    z = view.require_subset(block, what="blocking set")
    if not is_blocking_set(view, ids, z):
        raise PreconditionError(f"{Allocation.of(z)} is not a blocking set of {Allocation.of(ids)}")
    return _satisfied(view, ids, z)


def satisfy_block_step(
    view: SubmarketView, allocation: ContractSet, proposals: ContractSet
) -> Tuple[FrozenSet[str], Allocation]:
    """Satisfy the block induced by an offer set Y ⊊ X ⊆ C_F'(Γ(Y)).

    Returns (Z, Y^Z) with Z = C_W'(X) minus Y and asserts that Z blocks Y,
    that C_F'(Y ∪ Z) = Y ∪ Z, that C_W'(X) = C_W'(Y ∪ Z) = Y^Z, and that
    Y^Z is quasi-stable and Blair-dominates Y for the workers.
    """
    ids = view.require_subset(allocation)
    offer = view.require_subset(proposals, what="offer set")
    ceiling = firm_choice_of_gamma(view, ids)
    if not (ids < offer <= ceiling):
        raise PreconditionError(
            f"offer set must satisfy Y ⊊ X ⊆ C_F'(Γ(Y)); Y={Allocation.of(ids)} X={Allocation.of(offer)} "
            f"ceiling={Allocation.of(ceiling)}"
        )
    worker_choice = _side_choice(view, "w", offer)
    z = worker_choice - ids
    witness = {"Y": sorted(ids), "X": sorted(offer), "Z": sorted(z)}
    if not z or not is_blocking_set(view, ids, z):
        raise PropertyViolation("C_W'(X) minus Y is not a blocking set of Y", witness)
    if _side_choice(view, "f", ids | z) != ids | z:
        raise PropertyViolation("firms reject part of Y ∪ Z", witness)
    satisfied = _satisfied(view, ids, z)
    if worker_choice != _side_choice(view, "w", ids | z) or worker_choice != satisfied.ids:
        raise PropertyViolation("C_W'(X), C_W'(Y ∪ Z) and Y^Z disagree", witness)
    if _side_choice(view, "w", ids | satisfied.ids) != satisfied.ids:
        raise PropertyViolation("Y^Z does not Blair-dominate Y for the workers", witness)
    if not is_quasi_stable(view, satisfied):
        raise PropertyViolation("Y^Z is not quasi-stable", witness)
    return z, satisfied
