"""
Market disruptions and re-equilibration.

An event moves from the view (W, F', X_{F'}) to the view (W', F, X_{W'}) of
one base market: new firms enter and/or some workers leave. The property
checks in this module are always on; a failure raises PropertyViolation.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from .choice import LAW_OF_AGGREGATE_DEMAND, choose_side, failing_agents, verify_market
from .config import DEFAULT_VERIFIER_CAP
from .da import DATrace, Full, ProposalStrategy, da_outcome, da_run, strategy_from_name, worker_pessimal
from .errors import InputError, PreconditionError, PropertyViolation
from .files import load_market, load_scenario_file
from .lattice import dominates, join_w
from .model import (
    Allocation,
    ContractSet,
    Market,
    SubmarketView,
    agent_slice,
    as_ids,
    restrict_allocation,
    restrict_contracts,
    submarket,
)
from .stability import firm_choice_of_gamma, is_quasi_stable, is_stable

logger = logging.getLogger(__name__)

ADD_FIRMS = "add-firms"
REMOVE_WORKERS = "remove-workers"
COMBINED = "combined"


@dataclass(frozen=True)
class DisruptionEvent:
    kind: str
    before: SubmarketView
    after: SubmarketView

    def __post_init__(self):
        if self.kind not in (ADD_FIRMS, REMOVE_WORKERS, COMBINED):
            raise InputError(f"unknown event kind {self.kind!r}")
        if self.before.base is not self.after.base and self.before.base != self.after.base:
            raise InputError("before and after must be views of the same market")
        if not self.after.workers <= self.before.workers:
            raise InputError("workers cannot join in a disruption event")
        if not self.before.firms <= self.after.firms:
            raise InputError("firms cannot leave in a disruption event")

    @property
    def market(self) -> Market:
        return self.before.base

    @property
    def entering_firms(self) -> FrozenSet[str]:
        return self.after.firms - self.before.firms

    @property
    def exiting_workers(self) -> FrozenSet[str]:
        return self.before.workers - self.after.workers

    def is_pure_entry(self) -> bool:
        return self.before.workers == self.after.workers

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "entering_firms": sorted(self.entering_firms),
            "exiting_workers": sorted(self.exiting_workers),
        }


def make_event(
    market: Market, kind: str, firms: Iterable[str] = (), workers: Iterable[str] = ()
) -> DisruptionEvent:
    """Event with entering firms F minus F' and exiting workers W minus W'"""
    entering, leaving = frozenset(firms), frozenset(workers)
    if kind == ADD_FIRMS and leaving:
        raise InputError("an add-firms event cannot remove workers", location="event.workers")
    if kind == REMOVE_WORKERS and entering:
        raise InputError("a remove-workers event cannot add firms", location="event.firms")
    unknown = (entering - market.firms) | (leaving - market.workers)
    if unknown:
        raise InputError(f"event names agents outside the market: {sorted(unknown)}", location="event")
    before = submarket(market, market.workers, market.firms - entering)
    after = submarket(market, market.workers - leaving, market.firms)
    return DisruptionEvent(kind, before, after)


@dataclass
class ScenarioReport:
    event: DisruptionEvent
    start_allocation: Allocation
    restart_allocation: Allocation
    outcome: Optional[Allocation] = None
    trace: Optional[DATrace] = None
    welfare: Dict[str, bool] = field(default_factory=dict)
    new_entrant_slices: Dict[str, Dict[str, List[str]]] = field(default_factory=dict)
    worker_pessimal_after: Optional[Allocation] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "event": self.event.to_dict(),
            "start_allocation": list(self.start_allocation),
            "restart_allocation": list(self.restart_allocation),
            "outcome": None if self.outcome is None else list(self.outcome),
            "welfare": dict(self.welfare),
            "worker_pessimal_after": None if self.worker_pessimal_after is None else list(self.worker_pessimal_after),
            "new_entrant_slices": {firm: dict(rows) for firm, rows in sorted(self.new_entrant_slices.items())},
            "trace": None if self.trace is None else self.trace.to_dict(),
            "notes": list(self.notes),
        }


def apply_disruption(allocation: ContractSet, event: DisruptionEvent) -> Allocation:
    """Y_{W'}: quasi-stable in the after-view whenever Y is in the before-view"""
    start = Allocation.of(event.before.require_subset(allocation))
    if not is_quasi_stable(event.before, start):
        raise PreconditionError(f"{start} is not firm-quasi-stable before the disruption")
    restart = restrict_allocation(event.market, start, event.after.workers)
    if not is_quasi_stable(event.after, restart):
        raise PropertyViolation(
            "restricted allocation lost quasi-stability", {"start": list(start), "restart": list(restart)}
        )
    return restart


def _require_stable(view: SubmarketView, allocation: Allocation, where: str) -> None:
    if not is_stable(view, allocation):
        raise PreconditionError(f"{allocation} is not stable {where}")


def reequilibrate(
    allocation: ContractSet, event: DisruptionEvent, strategy: Optional[ProposalStrategy] = None
) -> ScenarioReport:
    """Run DA from Y_{W'} after the disruption and check the welfare comparison both ways"""
    start = Allocation.of(event.before.require_subset(allocation))
    _require_stable(event.before, start, "before the disruption")
    restart = apply_disruption(start, event)
    trace = da_run(event.after, restart, strategy or Full())
    outcome = trace.outcome

    market = event.market
    workers_gain = dominates(market, event.after.workers, outcome, start)
    firms_lose = dominates(market, event.before.firms, start, outcome)
    witness = {"start": list(start), "outcome": list(outcome)}
    if not workers_gain:
        raise PropertyViolation("outcome does not Blair-dominate the start for the remaining workers", witness)
    if not firms_lose:
        raise PropertyViolation("the start does not Blair-dominate the outcome for the incumbent firms", witness)
    logger.info(f"Re-equilibrated {start} -> {outcome} after {event.to_dict()}")
    return ScenarioReport(
        event=event,
        start_allocation=start,
        restart_allocation=restart,
        outcome=outcome,
        trace=trace,
        welfare={"outcome_dominates_start_for_workers": workers_gain, "start_dominates_outcome_for_firms": firms_lose},
    )


def worker_pessimal_transfer(event: DisruptionEvent) -> Allocation:
    """DA(DA(∅; before)_{W'}; after), checked equal to the after-view's worker-pessimal allocation"""
    before_pessimal = worker_pessimal(event.before)
    transferred = da_outcome(event.after, restrict_allocation(event.market, before_pessimal, event.after.workers))
    after_pessimal = worker_pessimal(event.after)
    if transferred != after_pessimal:
        raise PropertyViolation(
            "worker-pessimal allocation does not transfer across the disruption",
            {"before": list(before_pessimal), "transferred": list(transferred), "after": list(after_pessimal)},
        )
    return transferred


def _check_restricted_prefix(event: DisruptionEvent, trace: DATrace, upto: int) -> None:
    """Along the prefix, restricted offers stay inside the after-view's step bounds"""
    market, after = event.market, event.after
    kept = after.workers
    for step in trace.steps[:upto]:
        previous = restrict_allocation(market, trace.allocation_at(step.t - 1), kept)
        offer = restrict_contracts(market, step.proposals, kept)
        witness = {"t": step.t, "Y_prev": list(previous), "X": sorted(offer)}
        if not previous.ids <= offer <= firm_choice_of_gamma(after, previous):
            raise PropertyViolation("restricted offer set leaves the after-view's step bounds", witness)
        current = restrict_allocation(market, step.allocation, kept)
        if current.ids != choose_side(market, kept, offer):
            raise PropertyViolation("restricted allocation differs from the remaining workers' choice", witness)


def mid_run_disruption(
    event: DisruptionEvent,
    start: ContractSet,
    interrupt_at: int,
    strategy: Optional[ProposalStrategy] = None,
) -> Tuple[Allocation, Allocation]:
    """Disrupt a DA run after interrupt_at steps; the outcome must not depend on when"""
    if interrupt_at < 0:
        raise InputError("interrupt_at must be nonnegative")
    trace = da_run(event.before, start, strategy or Full())
    t = interrupt_at
    if t > len(trace.steps):
        logger.warning(f"interrupt_at={interrupt_at} beyond a {len(trace.steps)}-step run; using the terminal step")
        t = len(trace.steps)
    _check_restricted_prefix(event, trace, len(trace.steps))

    market, kept = event.market, event.after.workers
    interrupted = da_outcome(event.after, restrict_allocation(market, trace.allocation_at(t), kept))
    from_start = da_outcome(event.after, restrict_allocation(market, trace.start, kept))
    if interrupted != from_start:
        raise PropertyViolation(
            "disruption timing changed the outcome",
            {"t": t, "interrupted": list(interrupted), "from_start": list(from_start)},
        )
    return interrupted, from_start


def _verify_lad(market: Market, cap: int) -> None:
    failed = failing_agents(verify_market(market, (LAW_OF_AGGREGATE_DEMAND,), cap), LAW_OF_AGGREGATE_DEMAND)
    if failed:
        raise PreconditionError(f"agents violate the law of aggregate demand: {failed}")


def new_entrant_report(
    allocation: ContractSet, event: DisruptionEvent, cap: int = DEFAULT_VERIFIER_CAP
) -> ScenarioReport:
    """After pure firm entry each new firm gets its worker-pessimal slice; DA(Y) = Y ∨_W DA(∅)"""
    if not event.is_pure_entry():
        raise InputError("new-entrant analysis needs pure firm entry (no worker exits)")
    start = Allocation.of(event.before.require_subset(allocation))
    _require_stable(event.before, start, "before the entry")
    _verify_lad(event.market, cap)

    report = reequilibrate(start, event)
    outcome = report.outcome
    pessimal = worker_pessimal(event.after)
    joined = join_w(event.after, start, pessimal)
    if outcome != joined:
        raise PropertyViolation(
            "DA outcome differs from the join with the worker-pessimal allocation",
            {"outcome": list(outcome), "join": list(joined)},
        )
    market = event.market
    for firm in sorted(event.entering_firms):
        got = agent_slice(market, outcome, firm)
        best = agent_slice(market, pessimal, firm)
        report.new_entrant_slices[firm] = {"outcome": list(got), "worker_pessimal": list(best)}
        if got != best:
            raise PropertyViolation(
                f"entering firm {firm} does not receive its firm-optimal slice",
                {"firm": firm, "outcome": list(got), "worker_pessimal": list(best)},
            )
    report.worker_pessimal_after = pessimal
    return report


def polarity_check(
    view_w: SubmarketView, view_f: SubmarketView, allocation: ContractSet, other: ContractSet
) -> bool:
    """Y stable in (W, F', X_{F'}), Y' stable in (W', F, X_{W'}): Y' ⪰^B_{W'} Y iff Y ⪰^B_{F'} Y'"""
    if view_w.base != view_f.base:
        raise InputError("polarity compares views of one market")
    y = Allocation.of(view_w.require_subset(allocation))
    y_prime = Allocation.of(view_f.require_subset(other))
    if not is_stable(view_w, y):
        raise InputError(f"{y} is not stable in {view_w.describe()}")
    if not is_stable(view_f, y_prime):
        raise InputError(f"{y_prime} is not stable in {view_f.describe()}")
    market = view_w.base
    workers_side = dominates(market, view_f.workers, y_prime, y)
    firms_side = dominates(market, view_w.firms, y, y_prime)
    if workers_side != firms_side:
        raise PropertyViolation(
            "Blair polarity fails",
            {"Y": list(y), "Y'": list(y_prime), "workers_prefer_Y'": workers_side, "firms_prefer_Y": firms_side},
        )
    return True


def stable_join_check(
    view: SubmarketView, allocation: ContractSet, stable: ContractSet, cap: int = DEFAULT_VERIFIER_CAP
) -> Allocation:
    """Under LAD, the join of a quasi-stable and a stable allocation is stable"""
    _verify_lad(view.base, cap)
    if not is_stable(view, stable):
        raise PreconditionError(f"{Allocation.of(as_ids(stable))} is not stable")
    joined = join_w(view, allocation, stable)
    if not is_stable(view, joined):
        raise PropertyViolation(
            "join with a stable allocation is not stable",
            {"Y": sorted(as_ids(allocation)), "stable": sorted(as_ids(stable)), "join": list(joined)},
        )
    return joined


@dataclass(frozen=True)
class Scenario:
    market: Market
    event: DisruptionEvent
    start: Union[str, Allocation]
    strategy: ProposalStrategy
    interrupt_at: Optional[int] = None


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read a scenario file; the market path resolves relative to the scenario file"""
    path = Path(path)
    parsed = load_scenario_file(path)
    market_path = Path(parsed.market)
    if not market_path.is_absolute():
        market_path = path.parent / market_path
    market = load_market(market_path)
    event = make_event(market, parsed.event.kind, parsed.event.firms, parsed.event.workers)
    start: Union[str, Allocation] = parsed.start if isinstance(parsed.start, str) else Allocation.of(parsed.start)
    return Scenario(market, event, start, strategy_from_name(parsed.strategy, parsed.seed), parsed.interrupt_at)


def run_scenario(scenario: Scenario, cap: int = DEFAULT_VERIFIER_CAP) -> ScenarioReport:
    event = scenario.event
    start = worker_pessimal(event.before) if scenario.start == "worker-pessimal" else scenario.start
    logger.info(f"Running scenario {event.to_dict()} from {start}")

    report = reequilibrate(start, event, scenario.strategy)
    report.worker_pessimal_after = worker_pessimal_transfer(event)
    report.notes.append("worker-pessimal allocation transfers across the disruption")

    if scenario.interrupt_at is not None:
        interrupted, _ = mid_run_disruption(event, start, scenario.interrupt_at, scenario.strategy)
        report.notes.append(f"interrupting at step {scenario.interrupt_at} leads to {interrupted}")

    if event.is_pure_entry() and event.entering_firms:
        lad_failures = failing_agents(
            verify_market(scenario.market, (LAW_OF_AGGREGATE_DEMAND,), cap), LAW_OF_AGGREGATE_DEMAND
        )
        if lad_failures:
            report.notes.append(f"new-entrant analysis skipped; LAD fails for {lad_failures}")
        else:
            entrant = new_entrant_report(start, event, cap)
            report.new_entrant_slices = entrant.new_entrant_slices
            report.notes.append("each entering firm receives its firm-optimal slice")
    return report
