# File: app/routes/cli.py
"""
/app/routes/cli.py
Command-line verbs: validate, run, prices, settle, verify, compare
"""

import logging
from typing import List, Optional, Sequence

import click
import simplejson as json

from app import create_app
from app.models.archive import OUTPUT_FORMATS, RunArchive
from app.models.market_system import ModelKind
from app.services.reporting import emit_report
from app.services.scenario import run_batch
from app.services.system_loader import input_hash, load_system
from app.utils.decorators import handle_engine_errors
from app.utils.errors import VerdictFailure

logger = logging.getLogger(__name__)


SCENARIO_OPTIONS = (
    click.option(
        "--system",
        "systems",
        multiple=True,
        required=True,
        type=click.Path(dir_okay=False),
        help="Market instance file (JSON); repeat for a batch",
    ),
    click.option(
        "--scheme",
        default="both",
        show_default=True,
        type=click.Choice(["baseline", "proposed", "both"], case_sensitive=False),
    ),
    click.option("--format", "output_format", type=click.Choice(OUTPUT_FORMATS), default=None),
    click.option("--out", "output_path", type=click.Path(dir_okay=False), default=None),
    click.option("--tol-gap", type=float, default=None, help="Relative duality gap tolerance"),
    click.option("--tol-money", type=float, default=None, help="Absolute $ tolerance"),
    click.option(
        "--model-kind",
        type=click.Choice([k.value for k in ModelKind]),
        default=None,
        help="Force a formulation instead of inferring it from the data",
    ),
    click.option("--jobs", type=int, default=None, help="Worker threads for a batch"),
    click.option("--export-lp", type=click.Path(dir_okay=False), default=None),
)


def scenario_options(f):
    """Flags shared by every verb that runs a scenario"""
    for option in reversed(SCENARIO_OPTIONS):
        f = option(f)
    return f


def _run(app, systems: Sequence[str], scheme: str, options: dict) -> List[RunArchive]:
    configs = []
    for path in systems:
        export_lp = options.get("export_lp")
        if export_lp and len(systems) > 1:
            stem, dot, ext = export_lp.rpartition(".")
            index = len(configs) + 1
            export_lp = f"{stem}.{index}.{ext}" if dot else f"{export_lp}.{index}"
        configs.append(
            app.scenario_config(
                path,
                scheme=scheme,
                output_format=options.get("output_format"),
                output_path=options.get("output_path"),
                model_kind=options.get("model_kind"),
                tol_gap=options.get("tol_gap"),
                tol_money=options.get("tol_money"),
                export_lp=export_lp,
            )
        )
    jobs = options.get("jobs") or app.config.JOBS
    return run_batch(configs, jobs=jobs)


def _emit(archives: Sequence[RunArchive], output_format: str, sections, output_path) -> None:
    if output_format == "json" and len(archives) > 1:
        rendered = [json.loads(emit_report(a, "json", sections)) for a in archives]
        text = json.dumps(rendered, sort_keys=True, indent=2) + "\n"
    else:
        text = "\n".join(emit_report(a, output_format, sections) for a in archives)

    if output_path:
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"Report written to {output_path}")
    else:
        click.echo(text, nl=False)


def _report_verb(
    sections: Optional[Sequence[str]],
    scheme_override: Optional[str] = None,
    enforce_verdicts: bool = False,
):
    """Build a scenario verb that renders the given sections"""

    def verb(ctx, systems, scheme, **options):
        app = ctx.obj
        archives = _run(app, systems, scheme_override or scheme, options)
        output_format = options.get("output_format") or app.config.OUTPUT_FORMAT
        _emit(archives, output_format, sections, options.get("output_path"))
        if enforce_verdicts:
            failed = [a.system_path for a in archives if not a.passed]
            if failed:
                raise VerdictFailure(f"Verdicts failed for {', '.join(failed)}")

    return verb


@click.group()
@click.pass_context
def cli(ctx):
    """Energy and reserve market clearing with contingency-based pricing."""
    if ctx.obj is None:
        ctx.obj = create_app()


@cli.command()
@click.option("--system", "systems", multiple=True, required=True, type=click.Path(dir_okay=False))
@handle_engine_errors
def validate(systems):
    """Parse and validate instance files."""
    for path in systems:
        system = load_system(path)
        click.echo(
            f"{path}: OK ({system.model_kind.value}, {len(system.buses)} buses, "
            f"{len(system.generators)} generators, {len(system.loads)} loads, "
            f"{len(system.lines)} lines, {len(system.contingencies)} contingencies) "
            f"sha256={input_hash(system)}"
        )


@cli.command()
@scenario_options
@click.pass_context
@handle_engine_errors
def run(ctx, systems, scheme, **options):
    """Clear, price, settle and verify; exit 4 when a verdict fails."""
    _report_verb(None, enforce_verdicts=True)(ctx, systems, scheme, **options)


@cli.command()
@scenario_options
@click.pass_context
@handle_engine_errors
def prices(ctx, systems, scheme, **options):
    """Print the price books."""
    _report_verb(("prices",))(ctx, systems, scheme, **options)


@cli.command()
@scenario_options
@click.pass_context
@handle_engine_errors
def settle(ctx, systems, scheme, **options):
    """Print security charges and settlement tables."""
    _report_verb(("charges", "settlement"))(ctx, systems, scheme, **options)


@cli.command()
@scenario_options
@click.pass_context
@handle_engine_errors
def verify(ctx, systems, scheme, **options):
    """Print the optimality certificate and verdicts; exit 4 when one fails."""
    _report_verb(("summary", "verdicts"), enforce_verdicts=True)(ctx, systems, scheme, **options)


@cli.command()
@scenario_options
@click.pass_context
@handle_engine_errors
def compare(ctx, systems, scheme, **options):
    """Run both schemes and print the differences."""
    _report_verb(("comparison",), scheme_override="both")(ctx, systems, scheme, **options)

