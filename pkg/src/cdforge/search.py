"""Database-guided beam search over RZ-ordered rule assignments.

A node is scored from its 5-alternative restrictions: each restriction's
state is looked up in the :class:`~cdforge.lookup.LookupDb` and the
resulting sizes ``1..20`` are weighted and summed.  Assigning RZ triple
``t`` only touches the restrictions containing all three of its members,
and by the RZ restriction property it appends exactly one digit to each of
their prefixes, so the beam keeps every node's per-restriction table index
and updates just those columns.
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from collections.abc import Iterable, Sequence

import numpy as np

from cdforge.core import MAX_N, PEAK_PIT_RULES, build_domain
from cdforge.lookup import DB_ALTERNATIVES, LookupDb
from cdforge.trs import Trs, encode_state, restrict_trs, rz_triples

logger = logging.getLogger(__name__)

MAX_SIZE = 20
DEFAULT_WEIGHTS: tuple[float, ...] = (0,) * 16 + (1, 2, 3, 4)
DEFAULT_STAGE2_WIDTH = 10_000
FIXED_POINT = 1000


def parse_weights(text: str) -> tuple[float, ...]:
    """``"17:1,18:2"`` -> a 20-vector with the given sizes weighted, others zero."""
    weights = [0.0] * MAX_SIZE
    for item in filter(None, (part.strip() for part in text.split(","))):
        size, _, value = item.partition(":")
        size_i = int(size)
        if not 1 <= size_i <= MAX_SIZE:
            raise ValueError(f"weight index {size_i} outside 1..{MAX_SIZE}")
        weights[size_i - 1] = float(value)
    return tuple(weights)


def weight_table(weights: Sequence[float]) -> np.ndarray:
    """Integer weights indexed by size (entry 0 unused); fractional weights become fixed point x1000."""
    if len(weights) != MAX_SIZE:
        raise ValueError(f"weight vector needs {MAX_SIZE} entries, got {len(weights)}")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    scale = 1 if all(float(w).is_integer() for w in weights) else FIXED_POINT
    table = np.zeros(MAX_SIZE + 1, dtype=np.int64)
    table[1:] = np.rint(np.asarray(weights, dtype=float) * scale).astype(np.int64)
    return table


def subset_value_counts(trs: Trs, db: LookupDb) -> Counter[int]:
    """How many 5-alternative restrictions of ``trs`` look up to each size."""
    if trs.n < DB_ALTERNATIVES + 1:
        raise ValueError(f"heuristic needs n >= {DB_ALTERNATIVES + 1}, got {trs.n}")
    counts: Counter[int] = Counter()
    for subset in combinations(range(1, trs.n + 1), DB_ALTERNATIVES):
        counts[db.lookup(encode_state(restrict_trs(trs, subset)))] += 1
    return counts


def heuristic_value(trs: Trs, db: LookupDb, weights: Sequence[float] = DEFAULT_WEIGHTS) -> int:
    """Weighted count of restriction sizes; integer (fixed point when weights are fractional)."""
    table = weight_table(weights)
    return int(sum(table[size] * count for size, count in subset_value_counts(trs, db).items()))


@dataclass(frozen=True)
class BeamConfig:
    n: int
    beam_width: int
    weights: tuple[float, ...] = DEFAULT_WEIGHTS
    stage_split_triple: int | None = None
    chunk_count: int | None = None
    seed: int = 0
    stage1_width: int | None = None

    def __post_init__(self) -> None:
        if not DB_ALTERNATIVES + 1 <= self.n <= MAX_N:
            raise ValueError(f"beam search needs {DB_ALTERNATIVES + 1} <= n <= {MAX_N}, got {self.n}")
        if self.beam_width < 1:
            raise ValueError("beam width must be positive")
        if self.stage_split_triple is not None and not 0 < self.stage_split_triple < len(rz_triples(self.n)):
            raise ValueError(f"split triple {self.stage_split_triple} outside 1..{len(rz_triples(self.n)) - 1}")
        if self.chunk_count is not None and self.chunk_count < 1:
            raise ValueError("chunk count must be positive")
        weight_table(self.weights)


@dataclass
class SearchResult:
    """Distinct domains found, largest first, as ``(trs, size)`` pairs."""

    domains: list[tuple[Trs, int]]
    size_counts: dict[int, int]
    elapsed: float = 0.0
    nodes_evaluated: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def best_size(self) -> int:
        return self.domains[0][1] if self.domains else 0

    @property
    def best(self) -> Trs | None:
        return self.domains[0][0] if self.domains else None


@dataclass(frozen=True)
class _Layout:
    """Static bookkeeping of which 5-subsets each RZ triple touches."""

    subset_count: int
    affected: tuple[np.ndarray, ...]
    level_before: tuple[np.ndarray, ...]


@lru_cache(maxsize=None)
def _layout(n: int) -> _Layout:
    subsets = list(combinations(range(1, n + 1), DB_ALTERNATIVES))
    levels = np.zeros(len(subsets), dtype=np.int64)
    affected, level_before = [], []
    for triple in rz_triples(n):
        hit = np.array([s for s, sub in enumerate(subsets) if set(triple) <= set(sub)], dtype=np.intp)
        affected.append(hit)
        level_before.append(levels[hit].copy())
        levels[hit] += 1
    return _Layout(len(subsets), tuple(affected), tuple(level_before))


@dataclass
class _Beam:
    digits: np.ndarray  # (N, depth) uint8, values 1..4
    index: np.ndarray  # (N, subsets) table index of each restriction's prefix
    score: np.ndarray  # (N,) int64
    rank: np.ndarray  # (N,) position of the node's state key among the beam's keys

    @property
    def depth(self) -> int:
        return self.digits.shape[1]

    def __len__(self) -> int:
        return len(self.score)

    def rerank(self) -> None:
        order = np.lexsort(self.digits.T[::-1]) if self.depth else np.arange(len(self))
        self.rank = np.empty(len(self), dtype=np.int64)
        self.rank[order] = np.arange(len(self))


def _root(n: int, weights: np.ndarray) -> _Beam:
    layout = _layout(n)
    return _Beam(
        digits=np.zeros((1, 0), dtype=np.uint8),
        index=np.zeros((1, layout.subset_count), dtype=np.int64),
        score=np.array([weights[MAX_SIZE] * layout.subset_count], dtype=np.int64),
        rank=np.zeros(1, dtype=np.int64),
    )


def _expand(beam: _Beam, n: int, db: LookupDb, weights: np.ndarray, width: int) -> _Beam:
    """Assign the next RZ triple every way and keep the ``width`` best children.

    Ties on score fall back to the ascending state key, which for same-depth
    children is the parent's key rank followed by the new digit.
    """
    t = beam.depth
    layout = _layout(n)
    aff = layout.affected[t]
    old = beam.index[:, aff]
    new = old[:, :, None] * 4 + np.arange(4)
    delta = np.zeros((len(beam), 4), dtype=np.int64)
    for col, level in enumerate(layout.level_before[t]):
        before = db.levels[level][old[:, col]]
        after = db.levels[level + 1][new[:, col, :]]
        delta += weights[after] - weights[before][:, None]
    score = (beam.score[:, None] + delta).ravel()
    key = (beam.rank[:, None] * 4 + np.arange(4)).ravel()
    keep = np.lexsort((key, -score))[:width]
    parent, digit = np.divmod(keep, 4)
    index = beam.index[parent]
    index[:, aff] = new[parent, :, digit]
    digits = np.concatenate([beam.digits[parent], (digit + 1).astype(np.uint8)[:, None]], axis=1)
    rank = np.empty(len(keep), dtype=np.int64)
    rank[np.argsort(key[keep], kind="stable")] = np.arange(len(keep))
    return _Beam(digits, index, score[keep], rank)


def _run(beam: _Beam, n: int, db: LookupDb, weights: np.ndarray, width: int, stop: int) -> tuple[_Beam, int]:
    evaluated = 0
    while beam.depth < stop:
        evaluated += 4 * len(beam)
        beam = _expand(beam, n, db, weights, width)
    return beam, evaluated


def _finalize(n: int, digit_rows: Iterable[np.ndarray]) -> tuple[list[tuple[Trs, int]], dict[int, int]]:
    """Exact sizes for terminal nodes, deduplicated by domain content."""
    seen: dict[bytes, tuple[Trs, int]] = {}
    for row in digit_rows:
        trs = Trs.from_digits(n, row.tolist())
        domain = build_domain(n, trs)
        fp = domain.fingerprint()
        if fp not in seen or encode_state(trs) < encode_state(seen[fp][0]):
            seen[fp] = (trs, len(domain))
    domains = sorted(seen.values(), key=lambda pair: (-pair[1], encode_state(pair[0])))
    counts = Counter(size for _, size in domains)
    return domains, dict(sorted(counts.items(), reverse=True))


def beam_search(cfg: BeamConfig, db: LookupDb) -> SearchResult:
    """Plain beam search from the empty TRS to full assignments."""
    started = time.perf_counter()
    weights = weight_table(cfg.weights)
    beam, evaluated = _run(_root(cfg.n, weights), cfg.n, db, weights, cfg.beam_width, len(rz_triples(cfg.n)))
    domains, counts = _finalize(cfg.n, beam.digits)
    elapsed = time.perf_counter() - started
    logger.info("n=%d width=%d: best %d in %.2fs", cfg.n, cfg.beam_width, domains[0][1], elapsed)
    return SearchResult(domains, counts, elapsed, evaluated)


def stage_one(cfg: BeamConfig, db: LookupDb) -> list[np.ndarray]:
    """Run the beam to the split triple, shuffle with the seed, split into chunks of digit rows."""
    if cfg.stage_split_triple is None:
        raise ValueError("staged search needs stage_split_triple")
    weights = weight_table(cfg.weights)
    width = cfg.stage1_width or cfg.beam_width
    beam, _ = _run(_root(cfg.n, weights), cfg.n, db, weights, width, cfg.stage_split_triple)
    shuffled = np.random.default_rng(cfg.seed).permutation(len(beam))
    return [beam.digits[chunk] for chunk in np.array_split(shuffled.astype(np.intp), cfg.chunk_count or 1)]


def _beam_from_digits(n: int, digits: np.ndarray, db: LookupDb, weights: np.ndarray) -> _Beam:
    layout = _layout(n)
    count, depth = digits.shape
    index = np.zeros((count, layout.subset_count), dtype=np.int64)
    for t in range(depth):
        aff = layout.affected[t]
        index[:, aff] = index[:, aff] * 4 + (digits[:, t : t + 1].astype(np.int64) - 1)
    levels = np.zeros(layout.subset_count, dtype=np.int64)
    for t in range(depth):
        levels[layout.affected[t]] += 1
    score = np.zeros(count, dtype=np.int64)
    for s in range(layout.subset_count):
        score += weights[db.levels[levels[s]][index[:, s]]]
    beam = _Beam(digits.astype(np.uint8), index, score, np.zeros(count, dtype=np.int64))
    beam.rerank()
    return beam


def staged_search(
    cfg: BeamConfig,
    db: LookupDb,
    chunk_ids: Iterable[int] | None = None,
    chunks: Sequence[np.ndarray] | None = None,
) -> SearchResult:
    """Two-stage search: a shared first stage, then one independent beam per chunk.

    ``chunk_ids`` restricts the second stage to some chunks (array-job mode);
    results of all processed chunks are merged and deduplicated.
    """
    started = time.perf_counter()
    weights = weight_table(cfg.weights)
    if chunks is None:
        chunks = stage_one(cfg, db)
    ids = range(len(chunks)) if chunk_ids is None else list(chunk_ids)
    total = len(rz_triples(cfg.n))
    terminal, evaluated = [], 0
    for cid in ids:
        if not 0 <= cid < len(chunks):
            raise ValueError(f"chunk id {cid} outside 0..{len(chunks) - 1}")
        if len(chunks[cid]) == 0:
            continue
        beam = _beam_from_digits(cfg.n, chunks[cid], db, weights)
        beam, done = _run(beam, cfg.n, db, weights, cfg.beam_width, total)
        evaluated += done
        terminal.extend(beam.digits)
    domains, counts = _finalize(cfg.n, terminal)
    return SearchResult(domains, counts, time.perf_counter() - started, evaluated, {"chunks": list(ids)})


def dynamic_next_triple(trs: Trs, n: int | None = None, *, max_n: int = 7) -> int:
    """RZ index of the unassigned triple whose best rule leaves the smallest partial domain."""
    n = trs.n if n is None else n
    if n != trs.n:
        raise ValueError(f"TRS is on {trs.n} alternatives, not {n}")
    if n > max_n:
        raise ValueError(f"dynamic triple selection is limited to n <= {max_n}")
    open_slots = [k for k, rule in enumerate(trs.slots) if rule is None]
    if not open_slots:
        raise ValueError("TRS is fully assigned")
    best_idx, best_val = -1, None
    for k in open_slots:
        value = max(len(build_domain(n, trs.with_rule(k, rule))) for rule in PEAK_PIT_RULES)
        if best_val is None or value < best_val:
            best_idx, best_val = k, value
    return best_idx

