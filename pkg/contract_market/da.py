"""
Generalized firm-proposing deferred acceptance from an arbitrary
firm-quasi-stable start.

Each step offers a set X^t with Y^{t-1} ⊊ X^t ⊆ C_F(Γ(Y^{t-1})) and moves
to Y^t = C_W(X^t). Proposal strategies only decide which X^t; a strategy
that leaves those bounds aborts the run.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

from .choice import choose_side
from .errors import ContractViolation, InputError, PreconditionError
from .lattice import dominates
from .model import EMPTY, Allocation, ContractSet, SubmarketView, as_ids, dualize_view
from .prng import SplitMix64
from .stability import firm_choice_of_gamma, is_blocking_set, is_quasi_stable, is_stable, satisfy

logger = logging.getLogger(__name__)

Proposer = Callable[[Allocation, FrozenSet[str]], FrozenSet[str]]


class ProposalStrategy(ABC):
    name = "abstract"

    @abstractmethod
    def proposer(self) -> Proposer:
        """A fresh proposer for one run, mapping (Y^{t-1}, ceiling) to X^t"""

    def describe(self) -> Dict:
        return {"name": self.name}


class Full(ProposalStrategy):
    """X^t = C_F(Γ(Y^{t-1}))"""

    name = "full"

    def proposer(self) -> Proposer:
        return lambda previous, ceiling: ceiling


class SingleLex(ProposalStrategy):
    """X^t adds the lexicographically least eligible contract"""

    name = "single"

    def proposer(self) -> Proposer:
        def propose(previous: Allocation, ceiling: FrozenSet[str]) -> FrozenSet[str]:
            eligible = sorted(ceiling - previous.ids)
            return previous.ids | {eligible[0]}

        return propose


@dataclass(frozen=True)
class RandomSubset(ProposalStrategy):
    """X^t adds a nonempty random subset of the eligible contracts"""

    seed: int = 1
    name = "random"

    def proposer(self) -> Proposer:
        stream = SplitMix64(self.seed)

        def propose(previous: Allocation, ceiling: FrozenSet[str]) -> FrozenSet[str]:
            eligible = sorted(ceiling - previous.ids)
            picked = [contract_id for contract_id in eligible if stream.next_u64() >> 63]
            if not picked:
                picked = [eligible[stream.below(len(eligible))]]
            return previous.ids | frozenset(picked)

        return propose

    def describe(self) -> Dict:
        return {"name": self.name, "seed": self.seed}


def strategy_from_name(name: str, seed: Optional[int] = None) -> ProposalStrategy:
    if name == "full":
        return Full()
    if name == "single":
        return SingleLex()
    if name == "random":
        return RandomSubset(1 if seed is None else seed)
    raise InputError(f"unknown strategy {name!r}; expected full, single or random")


@dataclass(frozen=True)
class DAStep:
    t: int
    proposals: Tuple[str, ...]
    allocation: Allocation
    added: Tuple[str, ...]

    def to_dict(self) -> Dict:
        return {"t": self.t, "X": list(self.proposals), "Z": list(self.added), "Y": list(self.allocation)}


@dataclass(frozen=True)
class DATrace:
    start: Allocation
    steps: List[DAStep] = field(default_factory=list)
    outcome: Allocation = EMPTY
    strategy: Dict = field(default_factory=dict)

    def allocation_at(self, t: int) -> Allocation:
        """Y^t, with Y^0 the start"""
        return self.start if t == 0 else self.steps[t - 1].allocation

    def to_dict(self) -> Dict:
        return {
            "strategy": dict(self.strategy),
            "start": list(self.start),
            "steps": [step.to_dict() for step in self.steps],
            "outcome": list(self.outcome),
        }


def _ids(members) -> str:
    return "{" + ",".join(sorted(members)) + "}"


def trace_to_dict(trace: DATrace) -> Dict:
    return trace.to_dict()


def render_trace(trace: DATrace) -> List[str]:
    """One line per step: t, X^t, Z^t, Y^t"""
    lines = [f"t=0 Y={trace.start}"]
    for step in trace.steps:
        lines.append(f"t={step.t} X={_ids(step.proposals)} Z={_ids(step.added)} Y={step.allocation}")
    lines.append(f"outcome {trace.outcome} after {len(trace.steps)} steps")
    return lines


def _step_cap(view: SubmarketView, step_cap: Optional[int]) -> int:
    return step_cap if step_cap is not None else 2 ** len(view.contracts)


def da_run(
    view: SubmarketView,
    start: ContractSet = EMPTY,
    strategy: Optional[ProposalStrategy] = None,
    step_cap: Optional[int] = None,
) -> DATrace:
    strategy = strategy or Full()
    current = Allocation.of(view.require_subset(start))
    if not is_quasi_stable(view, current):
        raise PreconditionError(f"DA starts from a firm-quasi-stable allocation; {current} is not")

    logger.info(f"DA start {current} in {view.describe()} with {strategy.describe()}")
    propose = strategy.proposer()
    cap = _step_cap(view, step_cap)
    start_allocation = current
    steps: List[DAStep] = []
    while True:
        ceiling = firm_choice_of_gamma(view, current)
        if ceiling == current.ids:
            break
        if not current.ids < ceiling:
            raise ContractViolation(f"quasi-stable {current} is not strictly inside C_F(Γ)={Allocation.of(ceiling)}")
        if len(steps) >= cap:
            raise ContractViolation(f"DA exceeded the step cap {cap} in {view.describe()}")
        offer = frozenset(propose(current, ceiling))
        if not (current.ids < offer <= ceiling):
            raise ContractViolation(
                f"strategy {strategy.name} offered {Allocation.of(offer)} outside ({current}, {Allocation.of(ceiling)}]"
            )
        following = Allocation.of(choose_side(view.base, view.workers, offer))
        step = DAStep(len(steps) + 1, tuple(sorted(offer)), following, tuple(sorted(following.ids - current.ids)))
        logger.debug(f"DA step {step.t}: X={list(step.proposals)} Z={list(step.added)} Y={following}")
        steps.append(step)
        current = following

    logger.info(f"DA terminated at {current} after {len(steps)} steps")
    return DATrace(start_allocation, steps, current, strategy.describe())


def da_outcome(view: SubmarketView, start: ContractSet = EMPTY, step_cap: Optional[int] = None) -> Allocation:
    """DA(Y0; view); the same for every proposal strategy"""
    return da_run(view, start, Full(), step_cap).outcome


def worker_pessimal(view: SubmarketView) -> Allocation:
    """DA(∅; view): the worker-pessimal, firm-optimal stable allocation"""
    return da_outcome(view, EMPTY)


def worker_optimal(view: SubmarketView) -> Allocation:
    """Worker-proposing DA: firm-proposing DA from ∅ in the dual market"""
    return da_outcome(dualize_view(view), EMPTY)


@dataclass(frozen=True)
class TraceVerdict:
    ok: bool
    step: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict:
        return {"ok": self.ok, "step": self.step, "reason": self.reason}


def verify_trace(view: SubmarketView, trace: DATrace) -> TraceVerdict:
    """Re-derive every trace invariant from scratch"""
    try:
        previous = Allocation.of(view.require_subset(trace.start))
    except InputError as e:
        return TraceVerdict(False, 0, str(e))
    if not is_quasi_stable(view, previous):
        return TraceVerdict(False, 0, "start is not firm-quasi-stable")

    for index, step in enumerate(trace.steps, start=1):
        def fail(reason: str) -> TraceVerdict:
            logger.warning(f"Trace check failed at step {index}: {reason}")
            return TraceVerdict(False, index, reason)

        if step.t != index:
            return fail(f"step numbered {step.t}")
        offer = frozenset(step.proposals)
        current = step.allocation
        try:
            view.require_subset(offer)
            view.require_subset(current)
        except InputError as e:
            return fail(str(e))
        if is_stable(view, previous):
            return fail("previous allocation was already stable")
        ceiling = firm_choice_of_gamma(view, previous)
        if not (previous.ids < offer <= ceiling):
            return fail("offer set outside Y^{t-1} ⊊ X^t ⊆ C_F(Γ(Y^{t-1}))")
        if choose_side(view.base, view.workers, offer) != current.ids:
            return fail("Y^t differs from C_W(X^t)")
        if not is_quasi_stable(view, current):
            return fail("Y^t is not firm-quasi-stable")
        if not dominates(view.base, view.workers, current, previous):
            return fail("Y^t does not Blair-dominate Y^{t-1} for the workers")
        added = current.ids - previous.ids
        if frozenset(step.added) != added:
            return fail("Z^t differs from Y^t minus Y^{t-1}")
        if not added or not is_blocking_set(view, previous, added):
            return fail("Z^t is not a blocking set of Y^{t-1}")
        if satisfy(view, previous, added) != current:
            return fail("Y^t differs from the allocation obtained by satisfying Z^t")
        previous = current

    final = len(trace.steps) + 1
    if trace.outcome != previous:
        return TraceVerdict(False, final, "outcome differs from the last allocation")
    if not is_stable(view, previous):
        return TraceVerdict(False, final, "outcome is not stable")
    return TraceVerdict(True)
