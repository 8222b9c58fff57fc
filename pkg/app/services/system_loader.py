# File: app/services/system_loader.py
"""
/app/services/system_loader.py
Reading, writing and hashing market instance documents
"""

import hashlib
import logging
import math
import os
from typing import Any, Callable, Dict, List, Optional

import simplejson as json

from app.models.market_system import (
    Bus,
    Contingency,
    Generator,
    Line,
    Load,
    MarketSystem,
)
from app.services.validation import validate_system
from app.utils.errors import ParseError

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {
    "buses",
    "generators",
    "loads",
    "lines",
    "contingencies",
    "base_mva",
    "period_hours",
}


class _Reader:
    """Field access on one JSON object, with errors pointing at its path"""

    def __init__(self, data: Any, path: str, source: Optional[str]):
        if not isinstance(data, dict):
            raise ParseError("expected an object", path=source, field=path)
        self.data = data
        self.path = path
        self.source = source

    def _field(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def error(self, key: str, message: str) -> ParseError:
        return ParseError(message, path=self.source, field=self._field(key))

    def check_keys(self, allowed: set) -> None:
        for key in sorted(set(self.data) - allowed):
            raise self.error(key, "unknown field")

    def ident(self, key: str) -> str:
        if key not in self.data:
            raise self.error(key, "missing required field")
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            raise self.error(key, f"expected a string id, got {value!r}")
        value = str(value)
        if not value:
            raise self.error(key, "id must not be empty")
        return value

    def number(self, key: str, default: Optional[float] = None, required: bool = False):
        if key not in self.data or self.data[key] is None:
            if required:
                raise self.error(key, "missing required field")
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(key, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise self.error(key, f"expected a finite number, got {value!r}")
        return float(value)

    def flag(self, key: str) -> bool:
        value = self.data.get(key, False)
        if not isinstance(value, bool):
            raise self.error(key, f"expected true or false, got {value!r}")
        return value

    def id_list(self, key: str) -> List[str]:
        value = self.data.get(key, [])
        if not isinstance(value, list):
            raise self.error(key, "expected a list of ids")
        ids = []
        for i, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (str, int)):
                raise ParseError(
                    f"expected a string id, got {item!r}",
                    path=self.source,
                    field=f"{self._field(key)}[{i}]",
                )
            ids.append(str(item))
        return ids


def _parse_items(
    document: Dict[str, Any],
    key: str,
    parse: Callable[[_Reader], Any],
    source: Optional[str],
    required: bool = False,
) -> tuple:
    if key not in document:
        if required:
            raise ParseError("missing required field", path=source, field=key)
        return ()
    items = document[key]
    if not isinstance(items, list):
        raise ParseError("expected a list", path=source, field=key)
    return tuple(parse(_Reader(item, f"{key}[{i}]", source)) for i, item in enumerate(items))


def _bus(r: _Reader) -> Bus:
    r.check_keys({"id", "is_reference"})
    return Bus(id=r.ident("id"), is_reference=r.flag("is_reference"))


def _generator(r: _Reader) -> Generator:
    r.check_keys(
        {"id", "bus", "g_max", "r_up_max", "r_dn_max", "energy_offer", "up_offer", "dn_offer"}
    )
    return Generator(
        id=r.ident("id"),
        bus=r.ident("bus"),
        g_max=r.number("g_max", required=True),
        r_up_max=r.number("r_up_max", 0.0),
        r_dn_max=r.number("r_dn_max", 0.0),
        energy_offer=r.number("energy_offer", required=True),
        up_offer=r.number("up_offer", 0.0),
        dn_offer=r.number("dn_offer", 0.0),
    )


def _load(r: _Reader) -> Load:
    r.check_keys(
        {
            "id",
            "bus",
            "d_max",
            "r_up_max",
            "r_dn_max",
            "utility",
            "up_offer",
            "dn_offer",
            "fixed_demand",
        }
    )
    fixed = r.number("fixed_demand")
    return Load(
        id=r.ident("id"),
        bus=r.ident("bus"),
        d_max=r.number("d_max", 0.0, required=fixed is None),
        r_up_max=r.number("r_up_max", 0.0),
        r_dn_max=r.number("r_dn_max", 0.0),
        utility=r.number("utility", 0.0, required=fixed is None),
        up_offer=r.number("up_offer", 0.0),
        dn_offer=r.number("dn_offer", 0.0),
        fixed_demand=fixed,
    )


def _line(r: _Reader) -> Line:
    r.check_keys({"id", "from_bus", "to_bus", "reactance", "capacity"})
    return Line(
        id=r.ident("id"),
        from_bus=r.ident("from_bus"),
        to_bus=r.ident("to_bus"),
        reactance=r.number("reactance", required=True),
        capacity=r.number("capacity", required=True),
    )


def _contingency(r: _Reader) -> Contingency:
    r.check_keys({"id", "generators", "lines"})
    return Contingency(
        id=r.ident("id"),
        outaged_generators=frozenset(r.id_list("generators")),
        outaged_lines=frozenset(r.id_list("lines")),
    )


def parse_system(text: str, source: Optional[str] = None) -> MarketSystem:
    """
    Parse a JSON document into a MarketSystem without validating it.

    Raises:
        ParseError: syntax errors carry line and column, structural errors
            carry the JSON path of the offending field
    """
    if not text.strip():
        raise ParseError("empty document", path=source)
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=source, line=e.lineno, column=e.colno)

    top = _Reader(document, "", source)
    top.check_keys(TOP_LEVEL_KEYS)
    return MarketSystem(
        buses=_parse_items(document, "buses", _bus, source, required=True),
        generators=_parse_items(document, "generators", _generator, source, required=True),
        loads=_parse_items(document, "loads", _load, source),
        lines=_parse_items(document, "lines", _line, source),
        contingencies=_parse_items(document, "contingencies", _contingency, source),
        base_mva=top.number("base_mva", 100.0),
        period_hours=top.number("period_hours", 1.0),
    )


def load_system(path: str) -> MarketSystem:
    """
    Read, parse and validate a market instance file.

    Raises:
        ParseError: the file is missing, empty or malformed
        SystemValidationError: the parsed instance breaks an invariant
    """
    if not os.path.isfile(path):
        raise ParseError("file not found", path=path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except UnicodeDecodeError as e:
        raise ParseError(f"invalid UTF-8 at byte {e.start}", path=path)
    system = parse_system(text, source=path)
    validate_system(system)
    logger.info(
        f"Loaded {path}: {len(system.buses)} bus(es), {len(system.generators)} generator(s), "
        f"{len(system.contingencies)} contingency(ies)"
    )
    return system


def dump_system(system: MarketSystem) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline"""
    return json.dumps(system.to_dict(), sort_keys=True, indent=2) + "\n"


def input_hash(system: MarketSystem) -> str:
    """SHA-256 of the canonical JSON"""
    return hashlib.sha256(dump_system(system).encode("utf-8")).hexdigest()
