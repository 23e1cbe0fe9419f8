import json
import logging
import sys
import time
from typing import List, Optional, Sequence

import click

from agents.average_agent import AverageAgent
from agents.bennett_agent import BennettAgent
from agents.certification_agent import CertificationAgent
from agents.lemma_agent import LemmaAgent
from agents.value_agent import ValueAgent
from core.constants import compute_constants
from core.dimensions import DimensionCalculator
from core.oracle import NewformOracle
from utils.config import RHO_FAMILIES, ScanConfig, get_family_options, parse_level_range, parse_weight_range
from utils.exceptions import NewformDimensionError, VerificationFailure
from utils.records import OUTPUT_FORMATS, OutputRecord, format_fraction, model_to_dict, render_records, write_report
from utils.scanner import LevelScanner

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger("cli")

OPTIONS = get_family_options()


class NewformCLI(click.Group):
    """Click group translating library errors into exit statuses (1 verification failure, 2 usage)."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except VerificationFailure as e:
            click.echo(f"FAILED: {e}", err=True)
            ctx.exit(1)
        except NewformDimensionError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(2)


class Session:
    """Objects shared by the subcommands of one invocation, built on first use."""

    def __init__(self, config: ScanConfig, timing: bool):
        self.config = config
        self.timing = timing
        self.started = time.perf_counter()
        self._calculator: Optional[DimensionCalculator] = None
        self._scanner: Optional[LevelScanner] = None
        self._certifier: Optional[CertificationAgent] = None

    @property
    def calculator(self) -> DimensionCalculator:
        if self._calculator is None:
            self._calculator = DimensionCalculator(config=self.config)
        return self._calculator

    @property
    def scanner(self) -> LevelScanner:
        if self._scanner is None:
            self._scanner = LevelScanner(self.calculator, self.config)
        return self._scanner

    @property
    def certifier(self) -> CertificationAgent:
        if self._certifier is None:
            self._certifier = CertificationAgent(self.calculator, self.scanner, config=self.config)
        return self._certifier

    def footer(self) -> None:
        if self.timing:
            click.echo(f"# elapsed {time.perf_counter() - self.started:.2f}s", err=True)


def configure_logging(verbose: bool, log_file: Optional[str]) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def _finish(session: Session, report, path: Optional[str], failures: int, summary: str) -> None:
    click.echo(summary)
    if path:
        write_report(report, path)
    session.footer()
    if failures:
        raise VerificationFailure(summary, details=model_to_dict(report))


@click.group(cls=NewformCLI)
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True,
              help="Worker processes for range scans; 1 runs inline")
@click.option("--verbose", is_flag=True, help="Log at DEBUG level on stderr")
@click.option("--log-file", type=click.Path(dir_okay=False), default=None, help="Also write the log to this file")
@click.option("--no-timing", is_flag=True, help="Suppress the elapsed-time footer on stderr")
@click.pass_context
def cli(ctx: click.Context, threads: int, verbose: bool, log_file: Optional[str], no_timing: bool):
    """
    Exact dimensions of cusp form and newform spaces on Gamma0(N) and Gamma1(N).

    Examples:

        app.py dim --family g0plus --level 35 --weight 2

        app.py enumerate --family g0plus --weight 2 --max-dim 100 --format csv

        app.py verify --check oracle --group gamma0 --max-level 20000 --weights 2:24:2
    """
    configure_logging(verbose, log_file)
    ctx.obj = Session(ScanConfig(threads=threads), timing=not no_timing)


@cli.command()
@click.option("--family", type=click.Choice(OPTIONS["table_families"]), required=True)
@click.option("--level", type=click.IntRange(min=1), required=True)
@click.option("--weight", type=int, default=2, show_default=True)
@click.option("--format", "fmt", type=click.Choice(OUTPUT_FORMATS), default="text", show_default=True)
@click.pass_obj
def dim(session: Session, family: str, level: int, weight: int, fmt: str):
    """Print one dimension (or new-form proportion) at a single level."""
    if family in RHO_FAMILIES:
        value = format_fraction(session.calculator.rho(family, level, weight))
    else:
        value = session.calculator.dimension(family, level, weight).value
    record = OutputRecord(family=family, N=level, k=weight, value=value)
    if fmt == "text":
        click.echo(str(value))
    else:
        click.echo(render_records([record], fmt), nl=False)
    session.footer()


def _table_records(session: Session, family: str, k: int, lo: int, hi: int) -> List[OutputRecord]:
    if family not in RHO_FAMILIES:
        values = session.scanner.scan(family, k, lo, hi)
        return [OutputRecord(family=family, N=lo + i, k=k, value=v) for i, v in enumerate(values)]
    records = []
    for N in range(lo, hi + 1):
        ratio = session.calculator.rho(family, N, k)
        records.append(OutputRecord(family=family, N=N, k=k, value=format_fraction(ratio),
                                    extras={"decimal": f"{float(ratio):.12f}"}))
    return records


@cli.command()
@click.option("--family", "families", type=click.Choice(OPTIONS["table_families"]), multiple=True,
              default=("g0",), show_default=True, help="Repeat for several families")
@click.option("--levels", required=True, help="Level range lo..hi")
@click.option("--weights", default="2", show_default=True, help="Weights start:end[:step] or a single weight")
@click.option("--format", "fmt", type=click.Choice(OUTPUT_FORMATS), default="csv", show_default=True)
@click.pass_obj
def table(session: Session, families: Sequence[str], levels: str, weights: str, fmt: str):
    """Tabulate families over a level range and a weight set."""
    lo, hi = parse_level_range(levels)
    records: List[OutputRecord] = []
    for family in families:
        for k in parse_weight_range(weights):
            records.extend(_table_records(session, family, k, lo, hi))
    click.echo(render_records(records, fmt), nl=False)
    session.footer()


@cli.command(name="enumerate")
@click.option("--family", type=click.Choice(["g0plus", "g0"]), default="g0plus", show_default=True)
@click.option("--weight", type=int, default=2, show_default=True)
@click.option("--max-dim", type=click.IntRange(min=0), required=True, help="Dimension bound B")
@click.option("--cutoff", type=click.IntRange(min=1), default=None,
              help="Scan only up to this level; the result is then uncertified")
@click.option("--format", "fmt", type=click.Choice(OUTPUT_FORMATS), default="csv", show_default=True)
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="Write the full result with certificate as JSON")
@click.pass_obj
def enumerate_levels(session: Session, family: str, weight: int, max_dim: int, cutoff: Optional[int], fmt: str,
              report: Optional[str]):
    """List every level whose dimension is at most --max-dim."""
    result = session.certifier.enumerate_small_dim(family, weight, max_dim, cutoff)
    records = [OutputRecord(family=family, N=N, k=weight, value=v) for N, v in result.levels]
    click.echo(render_records(records, fmt), nl=False)
    if report:
        write_report(result, report)
    state = "certified" if result.certified else "uncertified"
    click.echo(f"# {len(records)} levels up to {result.cutoff} ({state})", err=True)
    session.footer()


@cli.command()
@click.option("--check", type=click.Choice(OPTIONS["checks"]), required=True)
@click.option("--group", type=click.Choice(OPTIONS["groups"]), default="gamma0", show_default=True)
@click.option("--max-level", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--weights", default="2", show_default=True, help="Weights start:end[:step] or a single weight")
@click.option("--value-limit", type=click.IntRange(min=0), default=1000, show_default=True,
              help="Largest value for missing-values")
@click.option("--cutoff", type=click.IntRange(min=1), default=None,
              help="Level cutoff for missing-values; defaults to the certified one")
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="Write the full report as JSON")
@click.pass_obj
def verify(session: Session, check: str, group: str, max_level: int, weights: str, value_limit: int,
           cutoff: Optional[int], report: Optional[str]):
    """Run one verification; exit 1 when it finds a mismatch or violation."""
    calculator, scanner, config = session.calculator, session.scanner, session.config
    weight_list = parse_weight_range(weights)
    if check == "oracle":
        result = NewformOracle(calculator, scanner).consistency_scan(group, max_level, weight_list)
        _finish(session, result, report, len(result.mismatches), f"{len(result.mismatches)} mismatches")
    elif check == "convolution-identities":
        result = LemmaAgent(calculator, scanner, config=config).verify_convolution_identities(max_level)
        _finish(session, result, report, len(result.failures),
                f"{len(result.identities)} identities, {len(result.failures)} failing")
    elif check == "bennett-bound":
        result = BennettAgent(calculator, scanner).verify_sharp_bound(max_level)
        _finish(session, result, report, len(result.violations),
                f"{len(result.violations)} violations, {len(result.equality_set)} equality levels")
    elif check == "power-of-two":
        even = [k for k in weight_list if k % 2 == 0]
        result = BennettAgent(calculator, scanner).verify_power_of_two(max_level, range(4, 9), even)
        _finish(session, result, report, len(result.failures),
                f"{result.cases_checked} cases, {len(result.failures)} failures")
    elif check == "lemma-suite":
        result = LemmaAgent(calculator, scanner, config=config).run_suite(max_level)
        _finish(session, result, report, len(result.failed),
                f"{len(result.checks)} checks, failing: {', '.join(result.failed) or 'none'}")
    elif check == "missing-values":
        family = "g0" if group == "gamma0" else "g1"
        if cutoff is None:
            cutoff = session.certifier.certified_cutoff(family, 2, value_limit).cutoff
        result = ValueAgent(calculator, scanner, session.certifier).missing_values(family, 2, value_limit, cutoff)
        _finish(session, result, report, 0,
                f"{len(result.missing)} missing values up to {value_limit}: {result.missing}")
    elif check == "rho-floor":
        lo = min(1000, max_level)
        result = AverageAgent(calculator, scanner, config=config).rho_floor_scan(weight_list[0], lo, max_level)
        failed = result.minimum_decimal <= 0.2
        _finish(session, result, report, int(failed),
                f"minimum {result.minimum} = {result.minimum_decimal:.6f} at N={result.argmin}, "
                f"asymptote {result.asymptote:.6f}")
    elif check == "bennett-residual":
        result = BennettAgent(calculator, scanner).verify_bennett_residual()
        _finish(session, result, report, len(result.violations),
                f"{result.levels_checked} levels, {len(result.violations)} violations")


@cli.command()
@click.option("--target", type=click.Choice(OPTIONS["average_targets"]), required=True)
@click.option("--weight", type=int, default=2, show_default=True)
@click.option("--limit", type=click.IntRange(min=1000), default=100_000, show_default=True)
@click.option("--cutoff-prime", type=click.IntRange(min=2), default=10_000_000, show_default=True,
              help="Euler-product cutoff for the rho constants")
@click.option("--format", "fmt", type=click.Choice(OUTPUT_FORMATS), default="text", show_default=True)
@click.pass_obj
def average(session: Session, target: str, weight: int, limit: int, cutoff_prime: int, fmt: str):
    """Compare a partial sum up to --limit with its predicted main term."""
    config = ScanConfig(**{**model_to_dict(session.config), "euler_cutoff_prime": cutoff_prime})
    result = AverageAgent(session.calculator, session.scanner, config=config).average_ratio(target, weight, limit)
    if fmt == "text":
        click.echo(f"{target} k={weight} x={limit} predicted={result.predicted:.6f} ratio={result.ratio:.6f}")
    else:
        record = OutputRecord(family=target, N=limit, k=weight, value=result.empirical_sum,
                              extras={"predicted": f"{result.predicted:.6f}", "ratio": f"{result.ratio:.6f}"})
        click.echo(render_records([record], fmt), nl=False)
    session.footer()


@cli.command()
@click.option("--cutoff-prime", type=click.IntRange(min=2), default=10_000_000, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.pass_obj
def constants(session: Session, cutoff_prime: int, fmt: str):
    """Print the Euler-product and classical constants with their certified digits."""
    result = compute_constants(cutoff_prime)
    for name, item in model_to_dict(result).items():
        if fmt == "json":
            row = {"name": name, "value": item["value"], "radius": item["radius"], "digits": item["digits"]}
            click.echo(json.dumps(row, separators=(",", ":")))
        else:
            value = getattr(result, name)
            click.echo(f"{name} {value.formatted()} radius={value.radius:.1e} digits={value.digits}")
    session.footer()


@cli.command()
@click.option("--family", type=click.Choice(OPTIONS["families"]), default="g0plus", show_default=True)
@click.option("--weight", type=int, default=2, show_default=True)
@click.option("--max-level", type=click.IntRange(min=1), default=132_000, show_default=True)
@click.option("--value-limit", type=click.IntRange(min=0), default=100, show_default=True)
@click.option("--format", "fmt", type=click.Choice(OUTPUT_FORMATS), default="text", show_default=True)
@click.pass_obj
def coverage(session: Session, family: str, weight: int, max_level: int, value_limit: int, fmt: str):
    """Histogram of how often each value up to --value-limit occurs as a dimension."""
    result = ValueAgent(session.calculator, session.scanner, session.certifier).value_coverage(
        family, weight, max_level, value_limit)
    if fmt == "text":
        click.echo(f"least frequent {result.min_value} ({result.min_multiplicity} levels), "
                   f"most frequent {result.max_value} ({result.max_multiplicity} levels), "
                   f"{result.attained} values attained, initial run 0..{result.initial_run}")
    else:
        records = [OutputRecord(family=family, N=max_level, k=weight, value=v, extras={"multiplicity": str(m)})
                   for v, m in enumerate(result.histogram)]
        click.echo(render_records(records, fmt), nl=False)
    session.footer()


@cli.command()
@click.option("--quick", is_flag=True, help="Reduced ranges for a fast smoke run")
@click.pass_obj
def reproduce(session: Session, quick: bool):
    """Run every reproduction step through the workflow and report pass/fail per step."""
    from workflow_manager import STEPS, ReproductionWorkflow

    if not logging.getLogger().isEnabledFor(logging.INFO):
        logging.getLogger().setLevel(logging.INFO)
    state = ReproductionWorkflow(session.config).run(quick=quick)
    failed = []
    for step in STEPS:
        outcome = state[step]
        click.echo(f"{'PASS' if outcome['passed'] else 'FAIL'} {step}: {outcome['summary']}")
        if not outcome["passed"]:
            failed.append(step)
    session.footer()
    if failed:
        raise VerificationFailure(f"{len(failed)} steps failed: {', '.join(failed)}")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI without exiting the interpreter.

    Args:
        argv: Arguments after the program name

    Returns:
        Exit status: 0 success, 1 verification failure, 2 usage error
    """
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name="app.py", standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
