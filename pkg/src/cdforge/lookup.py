"""Five-alternative lookup database.

For every RZ-prefix assignment of the ten triples on five alternatives the
database stores the largest domain size reachable by completing it with
peak-pit rules.  Level ``k`` is a dense ``uint16`` array of ``4**k`` entries
indexed by the base-4 number of the assigned digits (digit minus one per
slot, first triple most significant).
"""

from __future__ import annotations

import hashlib
import logging
import struct
import zlib
from itertools import permutations
from os import PathLike
from pathlib import Path
from collections.abc import Iterable, Sequence

import numpy as np

from cdforge.core import RULE_TABLE, _RULE_ID
from cdforge.trs import DIGIT_RULES, RULE_DIGITS, rz_triples

logger = logging.getLogger(__name__)

DB_ALTERNATIVES = 5
DB_TRIPLES = 10
MAGIC = b"CD5DB\0"
FORMAT_VERSION = 1
_HEADER = struct.Struct(f"<6sH8s{DB_TRIPLES + 1}Q")
_CRC = struct.Struct("<I")


class DbFormatError(ValueError):
    """Raised when a database file cannot be loaded."""


class DbVersionError(DbFormatError):
    pass


class DbChecksumError(DbFormatError):
    pass


def alphabet_fingerprint() -> bytes:
    text = ",".join(f"{d}:{r}" for r, d in sorted(RULE_DIGITS.items(), key=lambda kv: kv[1]))
    return hashlib.sha256(text.encode()).digest()[:8]


class LookupDb:
    """Read-only prefix table; ``levels[k][index]`` is a maximum domain size."""

    def __init__(self, levels: Sequence[np.ndarray]):
        if len(levels) != DB_TRIPLES + 1:
            raise ValueError(f"expected {DB_TRIPLES + 1} levels, got {len(levels)}")
        self.levels = []
        for k, level in enumerate(levels):
            level = np.ascontiguousarray(level, dtype=np.uint16)
            if level.shape != (4**k,):
                raise ValueError(f"level {k} has shape {level.shape}, expected {(4 ** k,)}")
            level.setflags(write=False)
            self.levels.append(level)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LookupDb):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.levels, other.levels))

    def value(self, k: int, index: int) -> int:
        return int(self.levels[k][index])

    def lookup(self, key: str | Iterable[int]) -> int:
        """Value for a state key; its nonzero digits must form a prefix."""
        digits = [int(ch) for ch in key]
        if len(digits) > DB_TRIPLES:
            raise ValueError(f"state key longer than {DB_TRIPLES} digits")
        k = 0
        while k < len(digits) and digits[k]:
            k += 1
        if any(digits[k:]):
            raise ValueError(f"state key {''.join(map(str, digits))!r} is not prefix-assigned")
        index = 0
        for d in digits[:k]:
            if not 1 <= d <= 4:
                raise ValueError(f"state digit {d} outside 1..4")
            index = index * 4 + d - 1
        return int(self.levels[k][index])


def _allowed_masks() -> np.ndarray:
    """``[triple, digit-1]`` -> 120-bit mask over permutations of 1..5 as two uint64 words."""
    perms = np.array(list(permutations(range(1, DB_ALTERNATIVES + 1))), dtype=np.int64)
    pos = np.empty_like(perms)
    pos[np.arange(len(perms))[:, None], perms - 1] = np.arange(DB_ALTERNATIVES)
    masks = np.zeros((DB_TRIPLES, 4, 2), dtype=np.uint64)
    for t, (a, b, c) in enumerate(rz_triples(DB_ALTERNATIVES)):
        pa, pb, pc = pos[:, a - 1], pos[:, b - 1], pos[:, c - 1]
        code = (pa < pb) * 4 + (pa < pc) * 2 + (pb < pc)
        for d, rule in DIGIT_RULES.items():
            allowed = RULE_TABLE[_RULE_ID[rule], code]
            bits = np.flatnonzero(allowed)
            for word in (0, 1):
                sel = bits[(bits >> 6) == word] & 63
                masks[t, d - 1, word] = np.bitwise_or.reduce(np.left_shift(np.uint64(1), sel.astype(np.uint64)), initial=np.uint64(0))
    return masks


def build_db() -> LookupDb:
    """Exact leaf sizes by tree-structured mask intersection, then max-propagation."""
    masks = _allowed_masks()
    level = np.full((1, 2), np.uint64(2**64 - 1), dtype=np.uint64)
    level[0, 1] = np.uint64(2 ** (120 - 64) - 1)
    for t in range(DB_TRIPLES):
        # child index = parent * 4 + (digit - 1)
        level = (level[:, None, :] & masks[t][None, :, :]).reshape(-1, 2)
    leaves = np.bitwise_count(level).sum(axis=1).astype(np.uint16)
    levels = [leaves]
    for _ in range(DB_TRIPLES):
        levels.append(levels[-1].reshape(-1, 4).max(axis=1))
    levels.reverse()
    logger.debug("built lookup database with %d entries", sum(len(v) for v in levels))
    return LookupDb(levels)


def save_db(db: LookupDb, path: str | PathLike) -> None:
    offsets = []
    cursor = _HEADER.size
    for level in db.levels:
        offsets.append(cursor)
        cursor += level.nbytes
    body = _HEADER.pack(MAGIC, FORMAT_VERSION, alphabet_fingerprint(), *offsets)
    body += b"".join(level.astype("<u2").tobytes() for level in db.levels)
    Path(path).write_bytes(body + _CRC.pack(zlib.crc32(body)))


def load_db(path: str | PathLike) -> LookupDb:
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) or raw[: len(MAGIC)] != MAGIC:
        raise DbVersionError(f"{path}: not a lookup database (bad magic)")
    if len(raw) < _HEADER.size + _CRC.size:
        raise DbChecksumError(f"{path}: truncated file")
    _, version, fingerprint, *offsets = _HEADER.unpack_from(raw)
    if version != FORMAT_VERSION:
        raise DbVersionError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    body, (crc,) = raw[: -_CRC.size], _CRC.unpack(raw[-_CRC.size :])
    if zlib.crc32(body) != crc:
        raise DbChecksumError(f"{path}: checksum mismatch (truncated or corrupt)")
    if fingerprint != alphabet_fingerprint():
        raise DbVersionError(f"{path}: built with a different rule-digit alphabet")
    levels = [np.frombuffer(body, dtype="<u2", count=4**k, offset=off) for k, off in enumerate(offsets)]
    return LookupDb(levels)
