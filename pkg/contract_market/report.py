"""
Plain-text rendering of engine results for the command line.

Each renderer returns a list of lines; the CLI prints them or, with
--json, prints the result's to_dict() instead.
"""

import json
from typing import Dict, Iterable, List, Optional

from .choice import VerificationReport
from .lattice import TarskiTrace
from .oracle import CertificationReport, EnumerationResult
from .scenario import ScenarioReport
from .stability import BlockReport


def ids(members: Iterable[str]) -> str:
    return "{" + ",".join(sorted(members)) + "}"


def dump_json(data: Dict) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


def _flag(value: bool) -> str:
    return "true" if value else "false"


def render_verification(reports: Dict[str, List[VerificationReport]]) -> List[str]:
    lines = []
    for agent, rows in reports.items():
        for row in rows:
            line = f"{agent:<8} {row.property:<24} {'pass' if row.passed else 'FAIL'}"
            if row.witness is not None:
                line += f"  Y={ids(row.witness[0])} Z={ids(row.witness[1])}"
            lines.append(line)
    return lines


def render_block_report(report: BlockReport, worker_quasi_stable: Optional[bool] = None) -> List[str]:
    lines = [
        f"allocation            {report.allocation}",
        f"individually_rational {_flag(report.is_ir)}",
        f"quasi_stable          {_flag(report.is_quasi_stable)}",
        f"stable                {_flag(report.is_stable)}",
        f"gamma                 {ids(report.gamma)}",
        f"blocking_contracts    {ids(report.blocking_contracts)}",
    ]
    if worker_quasi_stable is not None:
        lines.append(f"worker_quasi_stable   {_flag(worker_quasi_stable)}")
    return lines


def render_enumeration(result: EnumerationResult) -> List[str]:
    lines = [f"{name}: {count}" for name, count in result.counts.items()]
    lines.append("quasi-stable: " + " ".join(str(y) for y in result.quasi_stable))
    lines.append("stable: " + " ".join(str(y) for y in result.stable))
    return lines


def render_certification(report: CertificationReport) -> List[str]:
    lines = [f"{name}: {count}" for name, count in report.counts.items()]
    if report.non_substitutable_agents:
        lines.append(f"non-substitutable agents: {', '.join(report.non_substitutable_agents)}")
    for check in report.checks:
        line = f"{check.name:<26} {'pass' if check.passed else 'FAIL'} ({check.checked} checked)"
        if check.witness:
            line += f"  {json.dumps(check.witness, ensure_ascii=False)}"
        lines.append(line)
    lines.append("certified" if report.passed else "certification FAILED")
    return lines


def render_tarski(trace: TarskiTrace) -> List[str]:
    lines = [f"{index}: {y}" for index, y in enumerate(trace.iterates)]
    lines.append(f"fixed point {trace.fixed_point} after {trace.steps} steps")
    return lines


def render_scenario(report: ScenarioReport) -> List[str]:
    event = report.event
    lines = [
        f"event {event.kind}: firms enter {ids(event.entering_firms)}, workers exit {ids(event.exiting_workers)}",
        f"start    {report.start_allocation}",
        f"restart  {report.restart_allocation}",
        f"outcome  {report.outcome}",
    ]
    for name, value in report.welfare.items():
        lines.append(f"{name}: {_flag(value)}")
    if report.worker_pessimal_after is not None:
        lines.append(f"worker-pessimal after {report.worker_pessimal_after}")
    for firm, slices in sorted(report.new_entrant_slices.items()):
        lines.append(f"entrant {firm}: outcome {ids(slices['outcome'])} worker-pessimal {ids(slices['worker_pessimal'])}")
    lines.extend(report.notes)
    return lines
