"""
Blair orders, the lattice of firm-quasi-stable allocations and the Tarski
operator T_F(Y) = C_W(C_F(Γ(Y))).
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Sequence, Union

from .choice import choose_side
from .errors import ContractViolation, InputError, PreconditionError, PropertyViolation
from .model import EMPTY, Allocation, ContractSet, Market, SubmarketView, as_ids
from .stability import (
    firm_choice_of_gamma,
    gamma,
    is_individually_rational,
    is_quasi_stable,
    is_stable,
    satisfy_block_step,
)

logger = logging.getLogger(__name__)

Side = Union[str, Iterable[str]]


@dataclass(frozen=True)
class BlairOrder:
    """⪰^B over a set of agents from one side"""

    agents: FrozenSet[str]

    def dominates(self, market: Market, allocation: ContractSet, other: ContractSet) -> bool:
        ids = as_ids(allocation)
        return choose_side(market, self.agents, ids | as_ids(other)) == ids


@dataclass(frozen=True)
class TarskiTrace:
    iterates: List[Allocation]
    fixed_point: Allocation

    @property
    def steps(self) -> int:
        return len(self.iterates) - 1

    def to_dict(self) -> Dict:
        return {"iterates": [list(y) for y in self.iterates], "fixed_point": list(self.fixed_point)}


def side_agents(view: SubmarketView, side: Side) -> FrozenSet[str]:
    if isinstance(side, str):
        return view.side(side)
    agents = frozenset(side)
    if not (agents <= view.workers or agents <= view.firms):
        raise InputError(f"side must be a subset of the view's workers or of its firms: {sorted(agents)}")
    return agents


def dominates(market: Market, agents: Iterable[str], allocation: ContractSet, other: ContractSet) -> bool:
    """C_agents(Y ∪ Y') = Y, with no individual-rationality check (for cross-view comparisons)"""
    return BlairOrder(frozenset(agents)).dominates(market, allocation, other)


def blair_dominates(view: SubmarketView, allocation: ContractSet, other: ContractSet, side: Side = "w") -> bool:
    """Y ⪰^B_side Y' for individually rational Y, Y' of the view"""
    for candidate in (allocation, other):
        if not is_individually_rational(view, candidate):
            raise PreconditionError(f"Blair order compares individually rational allocations; {Allocation.of(as_ids(candidate))} is not")
    return dominates(view.base, side_agents(view, side), allocation, other)


def _require_quasi_stable(view: SubmarketView, *allocations: ContractSet) -> None:
    for allocation in allocations:
        if not is_quasi_stable(view, allocation):
            raise PreconditionError(f"{Allocation.of(as_ids(allocation))} is not firm-quasi-stable in {view.describe()}")


def join_w(view: SubmarketView, allocation: ContractSet, other: ContractSet) -> Allocation:
    """Y ∨_W Y' = C_W(Y ∪ Y')"""
    _require_quasi_stable(view, allocation, other)
    return Allocation.of(choose_side(view.base, view.workers, as_ids(allocation) | as_ids(other)))


def meet_w(
    view: SubmarketView, allocation: ContractSet, other: ContractSet, quasi_stable: Sequence[Allocation]
) -> Allocation:
    """Y ∧_W Y': C_W of the union of every common lower bound in Q_F.

    Only membership of the result in Q_F is checked here; that it is the
    greatest common lower bound is left to the oracle (certify)."""
    if not quasi_stable:
        raise InputError("meet needs the complete enumeration of quasi-stable allocations")
    family = set(quasi_stable)
    y, y_prime = Allocation.of(as_ids(allocation)), Allocation.of(as_ids(other))
    for required in (EMPTY, y, y_prime):
        if required not in family:
            raise InputError(f"quasi-stable enumeration is incomplete: {required} missing")
    workers = view.workers
    union: FrozenSet[str] = frozenset()
    for candidate in quasi_stable:
        if dominates(view.base, workers, y, candidate) and dominates(view.base, workers, y_prime, candidate):
            union |= candidate.ids
    result = Allocation.of(choose_side(view.base, workers, union))
    if result not in family:
        raise PropertyViolation(
            "meet left the set of quasi-stable allocations",
            {"Y": list(y), "Y'": list(y_prime), "meet": list(result)},
        )
    return result


def join_all(view: SubmarketView, allocations: Sequence[ContractSet]) -> Allocation:
    result = EMPTY
    for allocation in allocations:
        result = join_w(view, result, allocation)
    return result


def meet_all(view: SubmarketView, allocations: Sequence[ContractSet], quasi_stable: Sequence[Allocation]) -> Allocation:
    if not allocations:
        raise InputError("meet_all needs at least one allocation")
    result = Allocation.of(as_ids(allocations[0]))
    for allocation in allocations[1:]:
        result = meet_w(view, result, allocation, quasi_stable)
    return result


def tarski(view: SubmarketView, allocation: ContractSet) -> Allocation:
    """T_F(Y) = C_W(C_F(Γ(Y)))"""
    _require_quasi_stable(view, allocation)
    return Allocation.of(choose_side(view.base, view.workers, firm_choice_of_gamma(view, allocation)))


def _step_bound(view: SubmarketView) -> int:
    return 2 ** len(view.contracts)


def tarski_iterate(view: SubmarketView, allocation: ContractSet) -> TarskiTrace:
    current = Allocation.of(as_ids(allocation))
    iterates = [current]
    bound = _step_bound(view)
    while True:
        following = tarski(view, current)
        if following == current:
            break
        iterates.append(following)
        current = following
        if len(iterates) > bound:
            raise ContractViolation(f"Tarski iteration exceeded {bound} steps in {view.describe()}")
    logger.debug(f"Tarski iteration reached {current} after {len(iterates) - 1} steps")
    return TarskiTrace(iterates, current)


def isotone_check(view: SubmarketView, allocation: ContractSet, other: ContractSet) -> bool:
    """For Y ⪰^B_W Y' in Q_F: Γ(Y) ⊆ Γ(Y') and T_F(Y) ⪰^B_W T_F(Y')"""
    _require_quasi_stable(view, allocation, other)
    if not blair_dominates(view, allocation, other, "w"):
        raise InputError(f"isotonicity needs Y ⪰^B_W Y'; {Allocation.of(as_ids(allocation))} does not dominate {Allocation.of(as_ids(other))}")
    witness = {"Y": sorted(as_ids(allocation)), "Y'": sorted(as_ids(other))}
    gamma_y, gamma_other = gamma(view, allocation).members, gamma(view, other).members
    if not gamma_y <= gamma_other:
        raise PropertyViolation("Γ(Y) is not contained in Γ(Y')", {**witness, "extra": sorted(gamma_y - gamma_other)})
    if not blair_dominates(view, tarski(view, allocation), tarski(view, other), "w"):
        raise PropertyViolation("T_F(Y) does not dominate T_F(Y')", witness)
    return True


def climb_to_stable(view: SubmarketView, allocation: ContractSet) -> List[Allocation]:
    """Satisfy one blocking set at a time until stable; every element is quasi-stable"""
    _require_quasi_stable(view, allocation)
    current = Allocation.of(as_ids(allocation))
    path = [current]
    bound = _step_bound(view)
    while not is_stable(view, current):
        _, current = satisfy_block_step(view, current, firm_choice_of_gamma(view, current))
        path.append(current)
        if len(path) > bound:
            raise ContractViolation(f"climb to stability exceeded {bound} steps in {view.describe()}")
    return path
