"""Command-line entry point."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import click
from pydantic import BaseModel

from app.core.exceptions import CKPException, ValidationError
from app.core.logging import get_logger, setup_logging
from app.models.schemas import (
    CLambdaReport,
    ErrorResponse,
    GroupElementSpec,
    HirotaReport,
    PathCountReport,
    PfHfReport,
    SkewReport,
    SuiteReport,
    TauCoefficientModel,
    TauSeriesReport,
    TermModel,
    VerifyAllReport,
    WaveReport,
)
from app.services import ckp
from app.services.fock import ball_process_count, format_zmono, hirota_check
from app.services.matfun import pf_hf_sides
from app.services.partitions import OddPartition, d_squared
from app.services.ring import SuperPoly, format_poly, parse_rational, to_doubled, to_terms
from app.services.verify import DEFAULT_GROUP_ELEMENTS, SUITES, SuiteParams, VerificationService
from config import Settings, settings

logger = get_logger(__name__)


@dataclass
class CommandConfig:
    """Options shared by every subcommand."""

    output_format: str
    workers: int
    normalization: ckp.Normalization
    cap: Fraction
    seed: int
    trials: int


def _terms(p: SuperPoly) -> list[TermModel]:
    return [TermModel(**term) for term in to_terms(p)]


def _cap(text: str | None, config: CommandConfig) -> Fraction:
    if text is None:
        return config.cap
    value = parse_rational(text)
    to_doubled(value)
    return value


def _emit(config: CommandConfig, report: BaseModel, table: list[str]) -> None:
    if config.output_format == "json":
        click.echo(report.model_dump_json(indent=2))
    else:
        click.echo("\n".join(table))


def _suite_table(report: SuiteReport) -> list[str]:
    lines = [f"suite {report.suite}" + (f" (cap {report.cap})" if report.cap else "")]
    for item in report.items:
        status = "PASS" if item.status == "pass" else "FAIL"
        lines.append(f"  {status}  {item.id}" + (f": {item.detail}" if item.detail else ""))
    passed = sum(1 for item in report.items if item.status == "pass")
    lines.append(f"  {passed}/{len(report.items)} passed")
    return lines


class CKPGroup(click.Group):
    """Turns library errors into a message on stderr and their exit code."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except CKPException as e:
            logger.debug(f"{type(e).__name__}: {e.message}")
            config = ctx.obj
            if isinstance(config, CommandConfig) and config.output_format == "json":
                error = ErrorResponse(error=type(e).__name__, message=e.message, detail=e.detail)
                click.echo(error.model_dump_json(indent=2), err=True)
            else:
                message = f"Error: {e.message}"
                if e.detail:
                    message += f" ({e.detail})"
                click.echo(message, err=True)
            ctx.exit(e.exit_code)


@click.group(cls=CKPGroup)
@click.option("--format", "output_format", type=click.Choice(["table", "json"]), default=None, help="Report format.")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker processes for verify.")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False), default=None)
@click.option(
    "--normalization",
    type=click.Choice(["gamma", "vertex"]),
    default=None,
    help=(
        "Odd-time convention for printed polynomials. 'gamma' (default) prints the "
        "engine's own polynomials, e.g. Ĉ_(1) = 1/2*t_1/2, in the normalization every "
        "scalar product, tau and wave computation uses; 'vertex' doubles each odd "
        "time, e.g. Ĉ_(1) = t_1/2."
    ),
)
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None, help="YAML settings file.")
@click.pass_context
def cli(
    ctx: click.Context,
    output_format: str | None,
    workers: int | None,
    log_level: str | None,
    normalization: str | None,
    config_file: str | None,
) -> None:
    """Exact computations and identity checks for the bosonic CKP hierarchy."""
    source: Settings = settings
    path = config_file or settings.settings_file
    if path:
        source = Settings.from_yaml(path)
    if log_level or path:
        setup_logging(log_level or source.log_level)
    ctx.obj = CommandConfig(
        output_format=output_format or source.output_format,
        workers=workers or source.workers,
        normalization=normalization or source.odd_time_normalization,  # type: ignore[arg-type]
        cap=source.cap,
        seed=source.seed,
        trials=source.pfhf_trials,
    )


@cli.command()
@click.option("--partition", required=True, help="Odd partition, e.g. 3,1.")
@click.option("--mode", type=click.Choice(["closed", "engine"]), default="engine", show_default=True)
@click.pass_obj
def clambda(config: CommandConfig, partition: str, mode: str) -> None:
    """Print Ĉ_λ and D_λ."""
    lam = OddPartition.parse(partition)
    cl = ckp.c_lambda(lam, mode)  # type: ignore[arg-type]
    hatC = ckp.normalize(cl.hatC, config.normalization)
    report = CLambdaReport(
        partition=str(lam),
        mode=mode,  # type: ignore[arg-type]
        normalization=config.normalization,
        D=str(cl.D),
        hatC=_terms(hatC),
    )
    _emit(config, report, [f"λ = ({lam})  D = {cl.D}", f"Ĉ = {format_poly(hatC)}"])


@cli.command()
@click.argument("suite", type=click.Choice([*SUITES, "all"]))
@click.option(
    "--cap",
    default=None,
    help=(
        "Weight cap, e.g. 4 or 7/2. Without it each suite uses its own default; "
        "with 'all' a given cap applies to every suite."
    ),
)
@click.option("--max-weight", type=click.IntRange(min=0), default=None, help="Largest |λ| (series order for correlator).")
@click.option("--orders", default=None, help="Comma-separated matrix orders for pfhf.")
@click.option("--trials", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--p", default="1/2", show_default=True)
@click.option("--q", default="1/3", show_default=True)
@click.option("--a", default="1", show_default=True)
@click.option("--g", "group_elements", multiple=True, help="Group element (repeatable).")
@click.option("--k", type=click.IntRange(min=1), default=None, help="Number of super Miwa pairs.")
@click.option("--order", type=click.IntRange(min=0), default=None, help="Series order of correlators.")
@click.pass_obj
def verify(
    config: CommandConfig,
    suite: str,
    cap: str | None,
    max_weight: int | None,
    orders: str | None,
    trials: int | None,
    seed: int | None,
    p: str,
    q: str,
    a: str,
    group_elements: tuple[str, ...],
    k: int | None,
    order: int | None,
) -> None:
    """Run an acceptance suite; exit 1 if any identity fails."""
    for label in group_elements:
        GroupElementSpec.parse(label)
    try:
        order_list = tuple(int(x) for x in orders.split(",")) if orders else (2, 4, 6)
    except ValueError:
        raise ValidationError(f"Malformed --orders: {orders!r}", "use e.g. 2,4,6")
    params = SuiteParams(
        cap=None if cap is None else _cap(cap, config),
        max_weight=max_weight,
        orders=order_list,
        trials=trials or config.trials,
        seed=config.seed if seed is None else seed,
        p=parse_rational(p),
        q=parse_rational(q),
        a=a,
        k=k,
        order=6 if order is None else order,
        group_elements=group_elements or DEFAULT_GROUP_ELEMENTS,
    )
    service = VerificationService(config.workers)
    if suite == "all":
        reports = service.run_all(params)
        summary = VerifyAllReport(suites=reports)
        _emit(config, summary, [line for report in reports for line in _suite_table(report)])
        passed = summary.passed
    else:
        report = service.run(suite, params)
        _emit(config, report, _suite_table(report))
        passed = report.passed
    if not passed:
        raise click.exceptions.Exit(1)


@cli.command("count-paths")
@click.option("--from", "source", default="", show_default=True, help="Start partition.")
@click.option("--to", "target", required=True, help="End partition.")
@click.pass_obj
def count_paths(config: CommandConfig, source: str, target: str) -> None:
    """Print the number of ball-process paths."""
    mu, lam = OddPartition.parse(source), OddPartition.parse(target)
    count = ball_process_count(mu, lam)
    report = PathCountReport(source=str(mu), target=str(lam), count=count)
    _emit(config, report, [str(count)])


@cli.command()
@click.option("--g", "group_element", required=True, help="Group element, e.g. diag:U1/2=1/3.")
@click.option("--cap", default=None)
@click.pass_obj
def tau(config: CommandConfig, group_element: str, cap: str | None) -> None:
    """Print the expansion coefficients of a tau function."""
    spec = GroupElementSpec.parse(group_element)
    series = ckp.tau_series(spec, _cap(cap, config))
    coefficients = {
        str(lam): TauCoefficientModel(D=str(d_squared(lam)), g=_terms(value))
        for lam, value in sorted(series.coefficients.items())
    }
    report = TauSeriesReport(group_element=spec.label(), cap=str(series.cap), coefficients=coefficients)
    table = [f"τ for {spec.label()} to weight {series.cap}"]
    table += [
        f"  ({lam})  D = {d_squared(lam)}  g = {format_poly(value)}"
        for lam, value in sorted(series.coefficients.items())
    ]
    _emit(config, report, table)


@cli.command()
@click.option("--points", required=True, help="Comma-separated distinct rationals.")
@click.pass_obj
def pfhf(config: CommandConfig, points: str) -> None:
    """Evaluate both sides of the Pfaffian-Hafnian identity."""
    values = [parse_rational(x) for x in points.split(",")]
    pf, hf = pf_hf_sides(values)
    report = PfHfReport(points=[str(x) for x in values], pfaffian=str(pf), hafnian=str(hf), equal=pf == hf)
    _emit(config, report, [f"Pf = {pf}", f"Hf = {hf}", "equal" if pf == hf else "DIFFERENT"])
    if pf != hf:
        raise click.exceptions.Exit(1)


@cli.command()
@click.option("--g", "group_element", required=True)
@click.option("--cap", default=None)
@click.pass_obj
def hirota(config: CommandConfig, group_element: str, cap: str | None) -> None:
    """Print the nonzero components of the bilinear residual."""
    spec = GroupElementSpec.parse(group_element)
    cap_value = _cap(cap, config)
    residual = hirota_check(spec, cap_value)
    lines = [
        f"{format_zmono(left)} ⊗ {format_zmono(right)}: {format_poly(value)}"
        for (left, right), value in sorted(residual.items())
    ]
    report = HirotaReport(group_element=spec.label(), cap=str(cap_value), residuals=lines)
    _emit(config, report, lines or [f"residual vanishes to weight {cap_value}"])
    if residual:
        raise click.exceptions.Exit(1)


@cli.command()
@click.option("--alpha", required=True, help="Distinct odd partition of odd length.")
@click.option("--g", "group_element", default="identity", show_default=True)
@click.option("--cap", default=None)
@click.option("--lo", default=None, help="Lowest z exponent (default -cap).")
@click.pass_obj
def wave(config: CommandConfig, alpha: str, group_element: str, cap: str | None, lo: str | None) -> None:
    """Print the normalized wave function ŵ_α."""
    lam = OddPartition.parse(alpha)
    spec = GroupElementSpec.parse(group_element)
    cap_value = _cap(cap, config)
    low = -cap_value if lo is None else parse_rational(lo)
    series = ckp.normalized_wave(lam, spec, cap_value, low)
    coefficients = {str(e): _terms(value) for e, value in series.items()}
    report = WaveReport(alpha=str(lam), group_element=spec.label(), cap=str(cap_value), coefficients=coefficients)
    table = [f"ŵ_({lam}) for {spec.label()} to weight {cap_value}"]
    table += [f"  z^{e}: {format_poly(value)}" for e, value in series.items()]
    _emit(config, report, table)


@cli.command()
@click.option("--partition", required=True)
@click.option("--sub", required=True)
@click.pass_obj
def skew(config: CommandConfig, partition: str, sub: str) -> None:
    """Print the skew polynomial Ĉ_{λ/μ} in the times s."""
    lam, mu = OddPartition.parse(partition), OddPartition.parse(sub)
    value = ckp.normalize(ckp.c_skew(lam, mu), config.normalization, "s")
    report = SkewReport(
        partition=str(lam),
        sub=str(mu),
        D_partition=str(d_squared(lam)),
        D_sub=str(d_squared(mu)),
        hatC=_terms(value),
    )
    _emit(config, report, [f"Ĉ_({lam})/({mu}) = {format_poly(value)}"])


def main() -> None:
    """Main function to run the command line."""
    setup_logging()
    cli(prog_name="ckp")


if __name__ == "__main__":
    main()
