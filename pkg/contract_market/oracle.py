"""
Brute-force ground truth for small views.

Classifications here use the definitions directly: stability by searching
every nonempty candidate blocking set, quasi-stability through the blocking
contracts rather than Γ. The other modules are checked against this one.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence

from .choice import SUBSTITUTABILITY, choose, choose_side, failing_agents, verify_market
from .config import DEFAULT_ORACLE_CAP, DEFAULT_VERIFIER_CAP
from .errors import MarketError, PropertyViolation, SizeLimitError
from .lattice import Side, dominates, join_w, meet_w, side_agents, tarski
from .model import Allocation, ContractSet, SubmarketView, as_ids, is_allocation
from .stability import blocking_contracts, gamma, is_quasi_stable, is_stable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnumerationResult:
    view: SubmarketView
    all_allocations: List[Allocation]
    ir: List[Allocation]
    stable: List[Allocation]
    quasi_stable: List[Allocation]

    @property
    def counts(self) -> Dict[str, int]:
        return {
            "allocations": len(self.all_allocations),
            "individually_rational": len(self.ir),
            "quasi_stable": len(self.quasi_stable),
            "stable": len(self.stable),
        }

    def to_dict(self) -> Dict:
        return {
            "counts": self.counts,
            "individually_rational": [list(y) for y in self.ir],
            "quasi_stable": [list(y) for y in self.quasi_stable],
            "stable": [list(y) for y in self.stable],
        }


def _check_cap(view: SubmarketView, cap: int) -> None:
    if len(view.contracts) > cap:
        raise SizeLimitError(f"view has {len(view.contracts)} contracts; the oracle is capped at {cap}")


def _is_ir_def(view: SubmarketView, ids: FrozenSet[str]) -> bool:
    market = view.base
    return choose_side(market, view.workers, ids) == ids and choose_side(market, view.firms, ids) == ids


def _blocking_contracts_def(view: SubmarketView, ids: FrozenSet[str]) -> FrozenSet[str]:
    market = view.base
    found = set()
    for x in sorted(view.contracts - ids):
        contract = market.contract(x)
        offered = ids | {x}
        if x in choose(market, contract.worker, offered) and x in choose(market, contract.firm, offered):
            found.add(x)
    return frozenset(found)


def _subsets(pool: Sequence[str], min_size: int = 0) -> Iterator[FrozenSet[str]]:
    """Subsets by size, then lexicographically"""
    ordered = sorted(pool)
    for size in range(min_size, len(ordered) + 1):
        for combo in itertools.combinations(ordered, size):
            yield frozenset(combo)


def find_blocking_set(view: SubmarketView, allocation: ContractSet) -> Optional[FrozenSet[str]]:
    """First nonempty Z ⊆ X' minus Y with Z ⊆ C_W'(Y ∪ Z) ∩ C_F'(Y ∪ Z), or None"""
    ids = view.require_subset(allocation)
    market = view.base
    for z in _subsets(view.contracts - ids, min_size=1):
        offered = ids | z
        if z <= choose_side(market, view.workers, offered) & choose_side(market, view.firms, offered):
            return z
    return None


def is_stable_def(view: SubmarketView, allocation: ContractSet) -> bool:
    ids = view.require_subset(allocation)
    return _is_ir_def(view, ids) and find_blocking_set(view, ids) is None


def is_quasi_stable_def(view: SubmarketView, allocation: ContractSet) -> bool:
    """IR and Y ⊆ C_F'(Y ∪ (B(Y) ∩ X'))"""
    ids = view.require_subset(allocation)
    if not _is_ir_def(view, ids):
        return False
    return ids <= choose_side(view.base, view.firms, ids | _blocking_contracts_def(view, ids))


def enumerate_view(view: SubmarketView, cap: int = DEFAULT_ORACLE_CAP) -> EnumerationResult:
    _check_cap(view, cap)
    everything, ir, stable, quasi = [], [], [], []
    for ids in _subsets(view.contracts):
        if not is_allocation(ids, view.base):
            continue
        allocation = Allocation.of(ids)
        everything.append(allocation)
        if not _is_ir_def(view, ids):
            continue
        ir.append(allocation)
        if is_quasi_stable_def(view, ids):
            quasi.append(allocation)
        if find_blocking_set(view, ids) is None:
            stable.append(allocation)
    result = EnumerationResult(view, everything, ir, stable, quasi)
    logger.info(f"Enumerated {view.describe()}: {result.counts}")
    return result


def maximal_elements(view: SubmarketView, allocations: Sequence[Allocation], side: Side = "w") -> List[Allocation]:
    """Members not strictly Blair-dominated by another member"""
    agents = side_agents(view, side)
    return [
        y
        for y in allocations
        if not any(other != y and dominates(view.base, agents, other, y) for other in allocations)
    ]


def minimal_elements(view: SubmarketView, allocations: Sequence[Allocation], side: Side = "w") -> List[Allocation]:
    agents = side_agents(view, side)
    return [
        y
        for y in allocations
        if not any(other != y and dominates(view.base, agents, y, other) for other in allocations)
    ]


def minimal_stable_above(enumeration: EnumerationResult, start: ContractSet) -> Allocation:
    """The ⪰^B_W-least stable allocation dominating the start"""
    view = enumeration.view
    start_ids = as_ids(start)
    above = [y for y in enumeration.stable if dominates(view.base, view.workers, y, start_ids)]
    least = [y for y in above if all(dominates(view.base, view.workers, other, y) for other in above)]
    if len(least) != 1:
        raise PropertyViolation(
            "no unique least stable allocation above the start",
            {"start": sorted(start_ids), "candidates": [list(y) for y in least]},
        )
    return least[0]


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    checked: int = 0
    witness: Optional[Dict] = None

    def fail(self, **witness) -> None:
        if self.passed:
            self.passed = False
            self.witness = witness

    def to_dict(self) -> Dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked, "witness": self.witness}


@dataclass
class CertificationReport:
    view: SubmarketView
    counts: Dict[str, int]
    checks: List[CheckResult] = field(default_factory=list)
    non_substitutable_agents: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(check for check in self.checks if check.name == name)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "counts": self.counts,
            "non_substitutable_agents": self.non_substitutable_agents,
            "checks": [check.to_dict() for check in self.checks],
        }


def _guarded(check: CheckResult, body: Callable[[CheckResult], None]) -> CheckResult:
    try:
        body(check)
    except MarketError as e:
        check.fail(error=type(e).__name__, message=str(e))
    return check


def certify(
    view: SubmarketView, cap: int = DEFAULT_ORACLE_CAP, verifier_cap: int = DEFAULT_VERIFIER_CAP
) -> CertificationReport:
    """Check the Γ-based machinery, the lattice and the Tarski operator against enumeration"""
    enumeration = enumerate_view(view, cap)
    market = view.base
    workers = view.workers
    quasi = enumeration.quasi_stable
    quasi_set = set(quasi)
    stable_set = set(enumeration.stable)

    reports = verify_market(market, (SUBSTITUTABILITY,), verifier_cap)
    report = CertificationReport(view, enumeration.counts, non_substitutable_agents=failing_agents(reports))

    def predicate_agreement(check: CheckResult) -> None:
        for y in enumeration.all_allocations:
            check.checked += 1
            if is_quasi_stable(view, y) != (y in quasi_set) or is_stable(view, y) != (y in stable_set):
                check.fail(allocation=list(y), quasi_stable_def=y in quasi_set, stable_def=y in stable_set)
                return
        for y in enumeration.ir:
            members = gamma(view, y).members
            if not y.ids <= members:
                check.fail(allocation=list(y), reason="Y not contained in Γ(Y)")
                return
            offered = y.ids | blocking_contracts(view, y)
            if choose_side(market, view.firms, offered) != choose_side(market, view.firms, members):
                check.fail(allocation=list(y), reason="C_F(Y ∪ B(Y)) differs from C_F(Γ(Y))")
                return

    def tarski_fixed_points(check: CheckResult) -> None:
        fixed = set()
        for y in quasi:
            check.checked += 1
            image = tarski(view, y)
            if image not in quasi_set:
                check.fail(allocation=list(y), image=list(image), reason="T_F left Q_F")
                return
            if not dominates(market, workers, image, y):
                check.fail(allocation=list(y), image=list(image), reason="T_F(Y) does not dominate Y")
                return
            if image == y:
                fixed.add(y)
        if fixed != stable_set:
            check.fail(
                fixed_points=[list(y) for y in sorted(fixed)], stable=[list(y) for y in sorted(stable_set)]
            )

    def lattice_laws(check: CheckResult) -> None:
        above = {y: frozenset(u for u in quasi if dominates(market, workers, u, y)) for y in quasi}
        for y, y_prime in itertools.combinations_with_replacement(quasi, 2):
            check.checked += 1
            join = join_w(view, y, y_prime)
            meet = meet_w(view, y, y_prime, quasi)
            pair = {"Y": list(y), "Y'": list(y_prime)}
            if join not in quasi_set:
                check.fail(**pair, join=list(join), reason="join not quasi-stable")
                return
            upper = above[y] & above[y_prime]
            lower = [v for v in quasi if y in above[v] and y_prime in above[v]]
            if join not in upper or not upper <= above[join]:
                check.fail(**pair, join=list(join), reason="join is not the least upper bound")
                return
            if meet not in lower or not all(v in above[meet] for v in lower):
                check.fail(**pair, meet=list(meet), reason="meet is not the greatest lower bound")
                return


    def maximal_stable(check: CheckResult) -> None:
        for y in maximal_elements(view, quasi, "w"):
            check.checked += 1
            if not is_stable(view, y):
                check.fail(allocation=list(y))
                return

    def pairwise_setwise(check: CheckResult) -> None:
        for y in enumeration.ir:
            check.checked += 1
            pairwise = not blocking_contracts(view, y)
            setwise = find_blocking_set(view, y) is None
            if pairwise != setwise:
                check.fail(allocation=list(y), pairwise_stable=pairwise, setwise_stable=setwise)
                return

    for name, body in (
        ("predicate-agreement", predicate_agreement),
        ("tarski-fixed-points", tarski_fixed_points),
        ("lattice-laws", lattice_laws),
        ("maximal-elements-stable", maximal_stable),
        ("pairwise-setwise", pairwise_setwise),
    ):
        report.checks.append(_guarded(CheckResult(name), body))

    outcome = "passed" if report.passed else "FAILED"
    logger.info(f"Certification of {view.describe()} {outcome}; non-substitutable agents: {report.non_substitutable_agents}")
    return report
