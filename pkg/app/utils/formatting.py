# File: app/utils/formatting.py
"""
/app/utils/formatting.py
Number formatting and fixed-width tables for reports
"""

from typing import Iterable, List, Optional, Sequence

PRICE_DECIMALS = 4
LABEL_WIDTH = 12
CELL_WIDTH = 14


def _clean_zero(value: float) -> float:
    return 0.0 if value == 0 else value


def round_price(value: float) -> float:
    """Prices are kept at solver precision and rounded to 1e-4 $/MWh for display"""
    return _clean_zero(round(value, PRICE_DECIMALS))


def format_price(value: Optional[float]) -> str:
    """
    Price with at most four decimals and no trailing zeros.

    Args:
        value: Price in $/MWh, or None for a state without a price

    Returns:
        "-" for None, otherwise e.g. "200", "12.5", "-5"
    """
    if value is None:
        return "-"
    text = f"{round_price(value):.{PRICE_DECIMALS}f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def format_money(value: float, separators: bool = True) -> str:
    """Whole dollars, with thousands separators in table mode"""
    rounded = _clean_zero(round(value))
    return f"{rounded:,.0f}" if separators else f"{rounded:.0f}"


def format_ratio(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value * 100:.1f}%"


def table_row(cells: Sequence[str]) -> str:
    """First cell left-aligned, the rest right-aligned in fixed columns"""
    first, rest = cells[0], cells[1:]
    line = f"{first:<{LABEL_WIDTH}}" + "".join(f"{c:>{CELL_WIDTH}}" for c in rest)
    return line.rstrip()


def render_table(title: str, headers: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    lines: List[str] = [title, "=" * len(title), table_row(headers)]
    lines.extend(table_row(row) for row in rows)
    return "\n".join(lines)
