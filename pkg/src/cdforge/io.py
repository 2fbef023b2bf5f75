"""Text formats for TRS and domain files, plus run manifests.

TRS files hold one ``x y z RULE`` line per triple (``-`` for unassigned);
domain files hold one order per line with alternatives written as single
characters ``1``-``9`` then ``A`` = 10, ``B`` = 11 and so on.
"""

from __future__ import annotations

import hashlib
import json
import logging
import platform
from dataclasses import asdict, dataclass, field
from importlib import resources
from os import PathLike
from pathlib import Path
from typing import Any

from cdforge.core import MAX_N, Domain, NeverRule
from cdforge.trs import Trs, display_triples, rz_index

logger = logging.getLogger(__name__)

ALPHABET = "123456789ABCDEF"
UNASSIGNED = "-"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line


def data_path(name: str) -> Path:
    """Location of a file shipped in ``cdforge/data``."""
    return Path(str(resources.files("cdforge") / "data" / name))


def parse_trs_text(text: str, n: int | None = None, source: str | None = None) -> Trs:
    entries: dict[tuple[int, int, int], tuple[NeverRule | None, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.replace(",", " ").replace("(", " ").replace(")", " ").split()
        if len(fields) != 4:
            raise ParseError(f"expected 'x y z RULE', got {raw.strip()!r}", lineno, source)
        try:
            x, y, z = (int(f) for f in fields[:3])
        except ValueError:
            raise ParseError(f"non-integer alternative in {raw.strip()!r}", lineno, source) from None
        if not x < y < z:
            raise ParseError(f"triple ({x}, {y}, {z}) is not ascending", lineno, source)
        if x < 1:
            raise ParseError(f"alternative {x} below 1", lineno, source)
        if fields[3] == UNASSIGNED:
            rule = None
        else:
            try:
                rule = NeverRule.parse(fields[3])
            except ValueError:
                raise ParseError(f"unknown rule token {fields[3]!r}", lineno, source) from None
        if (x, y, z) in entries:
            raise ParseError(f"duplicate triple ({x}, {y}, {z}), first on line {entries[(x, y, z)][1]}", lineno, source)
        entries[(x, y, z)] = (rule, lineno)
    if not entries:
        raise ParseError("no triples found", None, source)
    top = max(z for _, _, z in entries)
    n = top if n is None else n
    if top > n:
        raise ParseError(f"alternative {top} exceeds n={n}", entries[max(entries, key=lambda t: t[2])][1], source)
    if n > MAX_N:
        raise ParseError(f"n={n} exceeds the size cap of {MAX_N}", None, source)
    return Trs.from_rules(n, {t: rule for t, (rule, _) in entries.items() if rule is not None})


def parse_trs_file(path: str | PathLike, n: int | None = None) -> Trs:
    return parse_trs_text(Path(path).read_text(), n, str(path))


def format_trs(trs: Trs) -> str:
    index = rz_index(trs.n)
    lines = []
    for x, y, z in display_triples(trs.n):
        rule = trs.slots[index[(x, y, z)]]
        lines.append(f"{x} {y} {z} {rule if rule is not None else UNASSIGNED}")
    return "\n".join(lines) + "\n"


def emit_trs_file(trs: Trs, path: str | PathLike) -> None:
    Path(path).write_text(format_trs(trs))


def format_order(order) -> str:
    return "".join(ALPHABET[int(a) - 1] for a in order)


def parse_domain_text(text: str, source: str | None = None) -> Domain:
    orders: list[tuple[int, ...]] = []
    seen: dict[tuple[int, ...], int] = {}
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            order = tuple(ALPHABET.index(ch) + 1 for ch in line.upper())
        except ValueError:
            raise ParseError(f"invalid alternative character in {line!r}", lineno, source) from None
        if n is None:
            n = len(order)
        elif len(order) != n:
            raise ParseError(f"order {line!r} has {len(order)} alternatives, expected {n}", lineno, source)
        if len(set(order)) != len(order):
            raise ParseError(f"repeated alternative in {line!r}", lineno, source)
        if max(order) > n:
            raise ParseError(f"alternative {max(order)} exceeds n={n} in {line!r}", lineno, source)
        if order in seen:
            logger.warning("%s:%d: duplicate order %s (first on line %d), ignored", source or "<domain>", lineno, line, seen[order])
            continue
        seen[order] = lineno
        orders.append(order)
    if n is None:
        raise ParseError("no orders found", None, source)
    return Domain(n, orders)


def parse_domain_file(path: str | PathLike) -> Domain:
    return parse_domain_text(Path(path).read_text(), str(path))


def format_domain(domain: Domain) -> str:
    return "".join(format_order(order) + "\n" for order in domain.orders)


def emit_domain_file(domain: Domain, path: str | PathLike) -> None:
    Path(path).write_text(format_domain(domain))


def file_digest(path: str | PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict[str, Any]
    seed: int | None = None
    tool_version: str = ""
    db_fingerprint: str | None = None
    wall_time: float = 0.0
    best_size: int | None = None
    outputs: dict[str, str] = field(default_factory=dict)
    python: str = field(default_factory=platform.python_version)

    def __post_init__(self) -> None:
        if not self.tool_version:
            from cdforge import __version__

            self.tool_version = __version__

    def record_output(self, path: str | PathLike) -> None:
        self.outputs[Path(path).name] = file_digest(path)

    def write(self, path: str | PathLike) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path: str | PathLike) -> RunManifest:
        return cls(**json.loads(Path(path).read_text()))
