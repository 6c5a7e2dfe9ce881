"""
Command-line surface of the market engine.

Exit codes: 0 on success, 1 on a property or contract violation (the
witness goes to stderr), 2 on input, precondition and size-limit errors.
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import click

from .choice import ALL_PROPERTIES, failing_agents, verify_market
from .config import EngineConfig, load_config
from .da import da_run, render_trace, strategy_from_name, verify_trace, worker_optimal, worker_pessimal
from .errors import ContractViolation, MarketError, PropertyViolation
from .files import dump_market, load_market, save_market
from .gen import GenParams, gen_market_with_reports
from .lattice import blair_dominates, join_w, meet_w, tarski_iterate
from .model import Market, SubmarketView, dualize, parse_allocation, submarket
from .oracle import certify, enumerate_view
from .report import (
    dump_json,
    render_block_report,
    render_certification,
    render_enumeration,
    render_scenario,
    render_tarski,
    render_verification,
)
from .scenario import load_scenario, run_scenario
from .stability import block_report, is_worker_quasi_stable

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(config: EngineConfig, verbose: bool = False) -> None:
    log_path = config.log_path()
    log_path.parent.mkdir(parents=True, exist_ok=True)
    handlers: List[logging.Handler] = [logging.FileHandler(log_path, encoding="utf-8")]
    if verbose:
        stream = logging.StreamHandler(sys.stderr)
        stream.setLevel(logging.DEBUG)
        handlers.append(stream)
    logging.basicConfig(
        level=logging.DEBUG if verbose else config.logging.level,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


class Context:
    def __init__(self, config: EngineConfig, as_json: bool):
        self.config = config
        self.as_json = as_json

    def emit(self, lines: Sequence[str], data) -> None:
        if self.as_json:
            click.echo(dump_json(data))
        else:
            for line in lines:
                click.echo(line)


pass_context = click.make_pass_decorator(Context)


def handled(command: Callable) -> Callable:
    """Map engine errors onto exit codes"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except MarketError as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"error: {e}", err=True)
            if isinstance(e, PropertyViolation) and e.witness:
                click.echo(f"witness: {dump_json(e.witness)}", err=True)
            sys.exit(e.exit_code)

    return wrapper


def _split(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [part.strip() for part in text.split(",") if part.strip()]


def _view(market: Market, workers: Optional[str], firms: Optional[str]) -> SubmarketView:
    return submarket(
        market,
        _split(workers) if workers is not None else market.workers,
        _split(firms) if firms is not None else market.firms,
    )


market_option = click.option("-m", "--market", "market_path", required=True, type=click.Path(), help="Market file")
workers_option = click.option("--workers", default=None, help="Comma-separated workers of the view (default: all)")
firms_option = click.option("--firms", default=None, help="Comma-separated firms of the view (default: all)")
allocation_option = click.option("-a", "--allocation", default="", help="Comma-separated contract ids")


@click.group()
@click.option("--config", "config_path", default=None, type=click.Path(), help="Config file")
@click.option("--verbose", is_flag=True, help="Debug logging on stderr")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], verbose: bool, as_json: bool):
    """Matching markets with contracts: stability, lattices, deferred acceptance and disruptions"""
    try:
        config = load_config(config_path)
    except MarketError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(e.exit_code)
    configure_logging(config, verbose)
    logger.info(f"Config source: {config.source or 'built-in defaults'}; command {ctx.invoked_subcommand}")
    ctx.obj = Context(config, as_json)


@cli.command("verify-prefs")
@market_option
@click.option("--property", "properties", multiple=True, type=click.Choice(ALL_PROPERTIES), help="Restrict the checks")
@pass_context
@handled
def verify_prefs(ctx: Context, market_path: str, properties):
    """Check every agent's choice function for the four preference properties"""
    market = load_market(market_path)
    reports = verify_market(market, properties or ALL_PROPERTIES, ctx.config.limits.verifier_cap)
    ctx.emit(render_verification(reports), {agent: [r.to_dict() for r in rows] for agent, rows in reports.items()})
    if failing_agents(reports):
        sys.exit(1)


@cli.command()
@market_option
@allocation_option
@workers_option
@firms_option
@click.option("--worker-side", is_flag=True, help="Also report worker-quasi-stability")
@pass_context
@handled
def check(ctx: Context, market_path, allocation, workers, firms, worker_side):
    """Individual rationality, quasi-stability and stability of an allocation"""
    market = load_market(market_path)
    view = _view(market, workers, firms)
    y = parse_allocation(allocation, market)
    report = block_report(view, y)
    worker_qs = is_worker_quasi_stable(view, y) if worker_side else None
    data = report.to_dict()
    if worker_qs is not None:
        data["worker_quasi_stable"] = worker_qs
    ctx.emit(render_block_report(report, worker_qs), data)


@cli.command("enumerate")
@market_option
@workers_option
@firms_option
@click.option("--cap", type=int, default=None, help="Override the oracle cap on |X'|")
@pass_context
@handled
def enumerate_command(ctx: Context, market_path, workers, firms, cap):
    """Brute-force enumeration of IR, quasi-stable and stable allocations"""
    view = _view(load_market(market_path), workers, firms)
    result = enumerate_view(view, cap if cap is not None else ctx.config.limits.oracle_cap)
    ctx.emit(render_enumeration(result), result.to_dict())


@cli.command("certify")
@market_option
@workers_option
@firms_option
@click.option("--cap", type=int, default=None, help="Override the oracle cap on |X'|")
@pass_context
@handled
def certify_command(ctx: Context, market_path, workers, firms, cap):
    """Cross-check the engine against the enumeration oracle"""
    view = _view(load_market(market_path), workers, firms)
    limits = ctx.config.limits
    report = certify(view, cap if cap is not None else limits.oracle_cap, limits.verifier_cap)
    ctx.emit(render_certification(report), report.to_dict())
    if not report.passed:
        sys.exit(1)


@cli.command()
@market_option
@workers_option
@firms_option
@click.option("--join", "join_pair", nargs=2, default=None, help="Join of two allocations")
@click.option("--meet", "meet_pair", nargs=2, default=None, help="Meet of two allocations")
@click.option("--compare", "compare_pair", nargs=2, default=None, help="Blair comparison A ⪰ B")
@click.option("--side", type=click.Choice(["w", "f"]), default="w", help="Side for --compare")
@pass_context
@handled
def lattice(ctx: Context, market_path, workers, firms, join_pair, meet_pair, compare_pair, side):
    """Blair-lattice operations on quasi-stable allocations"""
    chosen = [pair for pair in (join_pair, meet_pair, compare_pair) if pair]
    if len(chosen) != 1:
        raise click.UsageError("give exactly one of --join, --meet, --compare")
    market = load_market(market_path)
    view = _view(market, workers, firms)
    first, second = (parse_allocation(text, market) for text in chosen[0])

    if join_pair:
        result = join_w(view, first, second)
        ctx.emit([f"join {first} {second} = {result}"], {"join": list(result)})
    elif meet_pair:
        quasi = enumerate_view(view, ctx.config.limits.oracle_cap).quasi_stable
        result = meet_w(view, first, second, quasi)
        ctx.emit([f"meet {first} {second} = {result}"], {"meet": list(result)})
    else:
        result = blair_dominates(view, first, second, side)
        ctx.emit([f"{first} dominates {second} for side {side}: {str(result).lower()}"], {"dominates": result, "side": side})


@cli.command()
@market_option
@allocation_option
@workers_option
@firms_option
@pass_context
@handled
def tarski(ctx: Context, market_path, allocation, workers, firms):
    """Iterate the Tarski operator to a stable allocation"""
    market = load_market(market_path)
    trace = tarski_iterate(_view(market, workers, firms), parse_allocation(allocation, market))
    ctx.emit(render_tarski(trace), trace.to_dict())


@cli.command()
@market_option
@allocation_option
@workers_option
@firms_option
@click.option("--strategy", type=click.Choice(["full", "single", "random"]), default=None, help="Proposal strategy")
@click.option("--seed", type=int, default=None, help="Seed for the random strategy")
@click.option("--worker-optimal", "worker_optimal_only", is_flag=True, help="Report the worker-optimal stable allocation instead")
@pass_context
@handled
def da(ctx: Context, market_path, allocation, workers, firms, strategy, seed, worker_optimal_only):
    """Generalized firm-proposing deferred acceptance"""
    market = load_market(market_path)
    view = _view(market, workers, firms)
    if worker_optimal_only:
        best, worst = worker_optimal(view), worker_pessimal(view)
        ctx.emit(
            [f"worker-optimal  {best}", f"worker-pessimal {worst}"],
            {"worker_optimal": list(best), "worker_pessimal": list(worst)},
        )
        return

    defaults = ctx.config.defaults
    chosen = strategy_from_name(strategy or defaults.strategy, defaults.seed if seed is None else seed)
    trace = da_run(view, parse_allocation(allocation, market), chosen, ctx.config.limits.da_step_cap)
    verdict = verify_trace(view, trace)
    if not verdict:
        raise ContractViolation(f"trace check failed at step {verdict.step}: {verdict.reason}")
    lines = render_trace(trace)
    ctx.emit(lines, {**trace.to_dict(), "lines": lines})


@cli.command()
@click.option("-s", "--scenario", "scenario_path", required=True, type=click.Path(), help="Scenario file")
@pass_context
@handled
def scenario(ctx: Context, scenario_path):
    """Disrupt a market and re-equilibrate"""
    report = run_scenario(load_scenario(scenario_path), ctx.config.limits.verifier_cap)
    ctx.emit(render_scenario(report), report.to_dict())


@cli.command()
@click.option("--n-workers", type=int, default=2)
@click.option("--n-firms", type=int, default=2)
@click.option("--max-contracts-per-pair", type=int, default=1)
@click.option("--density", type=float, default=1.0)
@click.option("--quota-min", type=int, default=1)
@click.option("--quota-max", type=int, default=1)
@click.option("--acceptability", type=float, default=1.0)
@click.option("--family", type=click.Choice(["greedy-only", "mixed"]), default="greedy-only")
@click.option("--table-share", type=float, default=0.5)
@click.option("--seed", type=int, default=0)
@click.option("-o", "--output", type=click.Path(), default=None, help="Write the market here instead of stdout")
@pass_context
@handled
def gen(ctx: Context, n_workers, n_firms, max_contracts_per_pair, density, quota_min, quota_max, acceptability, family, table_share, seed, output):
    """Generate a seeded random market"""
    try:
        params = GenParams(
            n_workers=n_workers,
            n_firms=n_firms,
            max_contracts_per_pair=max_contracts_per_pair,
            density=density,
            quota_range=(quota_min, quota_max),
            acceptability_rate=acceptability,
            seed=seed,
            family=family,
            table_share=table_share,
        )
    except ValueError as e:
        raise click.BadParameter(str(e))
    market, reports = gen_market_with_reports(params, ctx.config.limits.verifier_cap)
    failed = failing_agents(reports)
    if failed:
        if family == "greedy-only":
            raise PropertyViolation("greedy agents failed preference verification", {"agents": failed})
        click.echo(f"agents failing a preference property: {', '.join(failed)}", err=True)
    if output:
        save_market(market, output)
    else:
        click.echo(dump_market(market), nl=False)


@cli.command()
@market_option
@click.option("-o", "--output", required=True, type=click.Path(), help="Output market file")
@pass_context
@handled
def dual(ctx: Context, market_path, output):
    """Write the market with workers and firms exchanged"""
    save_market(dualize(load_market(market_path)), Path(output))
    click.echo(f"wrote {output}")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code"""
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name="market_engine", standalone_mode=True)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else (0 if e.code is None else 1)
    return 0
