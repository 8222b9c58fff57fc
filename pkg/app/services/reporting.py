# File: app/services/reporting.py
"""
/app/services/reporting.py
Rendering of run archives as tables, JSON or CSV
"""

import csv
import io
import logging
from typing import Iterable, List, Optional, Sequence

import simplejson as json

from app.models.archive import OUTPUT_FORMATS, RunArchive
from app.models.market_system import ModelKind
from app.models.prices import PriceBook, Scheme
from app.models.settlement_report import SchemeComparison, SettlementReport
from app.utils.errors import ConfigError
from app.utils.formatting import format_money, format_price, format_ratio, render_table

logger = logging.getLogger(__name__)

SECTIONS = ("summary", "prices", "charges", "settlement", "verdicts", "comparison")

# Archive keys carried by each section in machine formats
_JSON_KEYS = {
    "summary": (
        "input_hash",
        "system_path",
        "model_kind",
        "objective",
        "solver",
        "optimality",
        "passed",
        "timestamps",
    ),
    "prices": ("price_books",),
    "charges": ("charges",),
    "settlement": ("reports",),
    "verdicts": ("verdicts", "passed"),
    "comparison": ("comparison",),
}


# =============================================================================
# Table mode
# =============================================================================


def render_prices(book: PriceBook, model_kind: ModelKind) -> str:
    """Nodal price table of one scheme, plus line prices on a network"""
    if book.scheme is Scheme.BASELINE:
        table = render_table(
            "Baseline prices ($/MWh)",
            ["Bus", "Energy", "Security"],
            [
                [bus, format_price(book.energy[bus]), format_price(book.security.get(bus, 0.0))]
                for bus in book.buses
            ],
        )
        return table

    table = render_table(
        "Proposed prices ($/MWh)",
        ["Bus", "Energy", "Up reserve", "Down reserve"],
        [
            [
                bus,
                format_price(book.energy[bus]),
                format_price(book.up.get(bus, 0.0)),
                format_price(book.down.get(bus, 0.0)),
            ]
            for bus in book.buses
        ],
    )
    if model_kind is ModelKind.NETWORK and book.transmission_by_state:
        states = list(next(iter(book.transmission_by_state.values())))
        lines = render_table(
            "Proposed transmission prices ($/MWh)",
            ["Line", "Price"] + states,
            [
                [line, format_price(book.transmission.get(line, 0.0))]
                + [format_price(per_state.get(s)) for s in states]
                for line, per_state in book.transmission_by_state.items()
            ],
        )
        table = f"{table}\n\n{lines}"
    return table


def render_settlement(report: SettlementReport) -> str:
    """Generator, consumer, line and system settlement tables of one scheme"""
    label = report.scheme.value.capitalize()
    blocks = [
        render_table(
            f"{label} generator settlement ($)",
            ["Generator", "Energy", "Up", "Down", "Charge", "Revenue", "Cost", "Profit"],
            [
                [
                    row.id,
                    format_money(row.revenue_energy),
                    format_money(row.revenue_up),
                    format_money(row.revenue_dn),
                    format_money(row.security_charge),
                    format_money(row.total_revenue),
                    format_money(row.total_cost),
                    format_money(row.profit),
                ]
                for row in report.generators
            ],
        )
    ]
    if report.consumers:
        blocks.append(
            render_table(
                f"{label} consumer settlement ($)",
                ["Consumer", "Energy", "Up", "Down", "Payment", "Utility", "Cost", "Profit"],
                [
                    [
                        row.id,
                        format_money(row.payment_energy),
                        format_money(row.revenue_up),
                        format_money(row.revenue_dn),
                        format_money(row.payment),
                        "-" if row.inelastic else format_money(row.utility),
                        "-" if row.inelastic else format_money(row.total_cost),
                        "-" if row.inelastic else format_money(row.profit),
                    ]
                    for row in report.consumers
                ],
            )
        )
    if report.transmission:
        blocks.append(
            render_table(
                f"{label} transmission settlement ($)",
                ["Line", "Price", "Capacity", "Revenue"],
                [
                    [
                        row.line_id,
                        format_price(row.price),
                        format_price(row.capacity),
                        format_money(row.revenue),
                    ]
                    for row in report.transmission
                ],
            )
        )
    b = report.balance
    system_rows = [["Generators", format_money(b.generation_revenue)]]
    if report.model_kind is ModelKind.NETWORK:
        system_rows.append(["Transmission", format_money(b.transmission_revenue)])
    system_rows += [
        ["Consumers", format_money(b.consumer_payment)],
        ["Balance", format_money(b.balance)],
    ]
    blocks.append(render_table(f"{label} system settlement ($)", ["Item", "Amount"], system_rows))
    return "\n\n".join(blocks)


def render_charges(archive: RunArchive) -> str:
    if archive.charges is None:
        return ""
    states = sorted({k for parts in archive.charges.breakdown.values() for k in parts})
    return render_table(
        "Security charges ($)",
        ["Generator", "Total"] + states,
        [
            [gen_id, format_money(total)]
            + [
                format_money(archive.charges.breakdown.get(gen_id, {}).get(k, 0.0))
                if k in archive.charges.breakdown.get(gen_id, {})
                else "-"
                for k in states
            ]
            for gen_id, total in archive.charges.charges.items()
        ],
    )


def render_comparison(comparison: SchemeComparison) -> str:
    table = render_table(
        "Proposed minus baseline ($)",
        ["Generator", "Revenue", "Charge", "Profit"],
        [
            [
                gen_id,
                format_money(d["total_revenue"]),
                format_money(d["security_charge"]),
                format_money(d["profit"]),
            ]
            for gen_id, d in comparison.generator_deltas.items()
        ],
    )
    lines = [
        f"Missing money (baseline): {format_money(comparison.missing_money)}",
        f"Security charges (proposed): {format_money(comparison.security_charge_total)}",
    ]
    if comparison.identity_holds is not None:
        lines.append(
            f"Charges cover missing money: {'yes' if comparison.identity_holds else 'no'}"
        )
    if comparison.profit_inflation is not None:
        lines.append(f"Baseline profit inflation: {format_ratio(comparison.profit_inflation)}")
    return f"{table}\n\n" + "\n".join(lines)


def render_summary(archive: RunArchive) -> str:
    opt = archive.optimality
    lines = [
        f"System: {archive.system_path}",
        f"Model: {archive.model_kind.value}",
        f"Input hash: {archive.input_hash}",
        f"Objective: {archive.objective:,.2f}",
        f"Solver: {archive.solver.method} ({archive.solver.message or archive.solver.status}, "
        f"{archive.solver.iterations} iterations)",
        f"Optimality: {'PASS' if opt.passed else 'FAIL'} (gap {opt.duality_gap:.3e})",
    ]
    for name, moment in sorted(archive.timestamps.items()):
        lines.append(f"{name.capitalize()}: {moment}")
    return "\n".join(lines)


def render_verdicts(archive: RunArchive) -> str:
    lines = ["Verdicts", "========"]
    for verdict in archive.verdicts:
        if verdict.passed:
            status = "PASS"
        elif verdict.informational:
            status = "INFO"
        else:
            status = "FAIL"
        lines.append(f"{verdict.name:<32} {status:<5} {verdict.detail}")
    lines.append(f"Overall: {'PASS' if archive.passed else 'FAIL'}")
    return "\n".join(lines)


def _render_table_mode(archive: RunArchive, sections: Sequence[str]) -> str:
    blocks: List[str] = []
    for section in sections:
        if section == "summary":
            blocks.append(render_summary(archive))
        elif section == "prices":
            blocks.extend(
                render_prices(archive.price_books[s], archive.model_kind) for s in archive.schemes
            )
        elif section == "charges" and archive.charges is not None:
            blocks.append(render_charges(archive))
        elif section == "settlement":
            blocks.extend(render_settlement(archive.reports[s]) for s in archive.schemes)
        elif section == "verdicts":
            blocks.append(render_verdicts(archive))
        elif section == "comparison" and archive.comparison is not None:
            blocks.append(render_comparison(archive.comparison))
    return "\n\n".join(blocks) + "\n"


# =============================================================================
# Machine formats
# =============================================================================


def _render_json(archive: RunArchive, sections: Sequence[str]) -> str:
    data = archive.to_dict()
    if tuple(sections) != SECTIONS:
        keys = {key for s in sections for key in _JSON_KEYS[s]}
        data = {k: v for k, v in data.items() if k in keys}
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


_SETTLEMENT_GROUPS = (("generators", "id"), ("consumers", "id"), ("transmission", "line_id"))


def _csv_rows(archive: RunArchive, sections: Sequence[str]) -> Iterable[list]:
    if "summary" in sections:
        yield ["summary", "", "", "objective", archive.objective]
        yield ["summary", "", "", "passed", archive.passed]
    if "prices" in sections:
        for scheme in archive.schemes:
            data = archive.price_books[scheme].to_dict()
            for kind in ("energy", "security", "up", "down", "transmission"):
                for entity, value in data[kind].items():
                    yield ["prices", scheme.value, entity, kind, value]
    if "charges" in sections and archive.charges is not None:
        for gen_id, value in archive.charges.charges.items():
            yield ["charges", Scheme.PROPOSED.value, gen_id, "security_charge", value]
    if "settlement" in sections:
        for scheme in archive.schemes:
            data = archive.reports[scheme].to_dict()
            for group, key in _SETTLEMENT_GROUPS:
                for row in data[group]:
                    for name, value in row.items():
                        if name != key:
                            yield ["settlement", scheme.value, row[key], name, value]
            for name, value in data["balance"].items():
                yield ["settlement", scheme.value, "system", name, value]
    if "verdicts" in sections:
        for verdict in archive.verdicts:
            yield ["verdicts", "", verdict.name, "passed", verdict.passed]
    if "comparison" in sections and archive.comparison is not None:
        for name, value in archive.comparison.to_dict().items():
            if not isinstance(value, dict):
                yield ["comparison", "", "system", name, value]


def _render_csv(archive: RunArchive, sections: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["section", "scheme", "entity", "field", "value"])
    for row in _csv_rows(archive, sections):
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def emit_report(
    archive: RunArchive, output_format: str = "table", sections: Optional[Sequence[str]] = None
) -> str:
    """
    Deterministic rendering of an archive.

    Args:
        archive: Completed run
        output_format: table (whole dollars, thousands separators), json or csv
            (full precision)
        sections: Subset of SECTIONS, all of them by default

    Returns:
        Rendered text ending with a newline
    """
    if output_format not in OUTPUT_FORMATS:
        raise ConfigError(f"Unknown output format '{output_format}'")
    chosen = tuple(s for s in SECTIONS if sections is None or s in sections)
    logger.debug(f"Rendering {archive.system_path} as {output_format}: {', '.join(chosen)}")
    if output_format == "json":
        return _render_json(archive, chosen)
    if output_format == "csv":
        return _render_csv(archive, chosen)
    return _render_table_mode(archive, chosen)
