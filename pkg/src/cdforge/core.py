"""Never rules, linear orders and Condorcet domain construction.

Orders are tuples of alternatives ``1..n`` with position 0 the most
preferred.  A :class:`Domain` keeps its orders as a lexicographically
sorted ``uint8`` matrix together with a packed ``uint64`` key per order
(4 bits per alternative, first position in the most significant nibble),
so numeric order of the keys is lexicographic order of the orders.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import Union

import numpy as np

MAX_N = 15

Triple = tuple[int, int, int]
LinearOrder = tuple[int, ...]


@dataclass(frozen=True, order=True)
class NeverRule:
    """``iNj``: the i-th smallest member of a triple never sits at place j."""

    i: int
    j: int

    def __post_init__(self) -> None:
        if self.i not in (1, 2, 3) or self.j not in (1, 2, 3):
            raise ValueError(f"invalid never rule {self.i}N{self.j}")

    def __str__(self) -> str:
        return f"{self.i}N{self.j}"

    def __repr__(self) -> str:
        return f"NeverRule({self})"

    @classmethod
    def parse(cls, text: str) -> NeverRule:
        text = text.strip().upper()
        if len(text) != 3 or text[1] != "N" or not (text[0].isdigit() and text[2].isdigit()):
            raise ValueError(f"unknown rule token {text!r}")
        return cls(int(text[0]), int(text[2]))


N1_3 = NeverRule(1, 3)
N3_1 = NeverRule(3, 1)
N2_1 = NeverRule(2, 1)
N2_3 = NeverRule(2, 3)
N1_2 = NeverRule(1, 2)
N3_2 = NeverRule(3, 2)

PEAK_PIT_RULES: tuple[NeverRule, ...] = (N1_3, N3_1, N2_1, N2_3)
SIX_RULES: tuple[NeverRule, ...] = PEAK_PIT_RULES + (N1_2, N3_2)
ALL_RULES: tuple[NeverRule, ...] = tuple(NeverRule(i, j) for i in (1, 2, 3) for j in (1, 2, 3))
_RULE_ID = {rule: k for k, rule in enumerate(ALL_RULES)}


def _relative_pattern_table() -> np.ndarray:
    # For a triple a<b<c, the 3-bit code  4*[a before b] + 2*[a before c] + [b before c]
    # fixes the place of every member; entry [rule, code] says whether the rule allows it.
    table = np.ones((len(ALL_RULES), 8), dtype=bool)
    for code in range(8):
        ab, ac, bc = bool(code & 4), bool(code & 2), bool(code & 1)
        places = (1 + (not ab) + (not ac), 1 + ab + (not bc), 1 + ac + bc)
        for rule, k in _RULE_ID.items():
            table[k, code] = places[rule.i - 1] != rule.j
    return table


RULE_TABLE = _relative_pattern_table()


def rule_allows(order: Sequence[int], triple: Triple, rule: NeverRule) -> bool:
    """Return False iff ``order`` puts the rule's ranked member of ``triple`` at its forbidden place."""
    where = {alt: k for k, alt in enumerate(order)}
    member = triple[rule.i - 1]
    place = 1 + sum(where[other] < where[member] for other in triple if other != member)
    return place != rule.j


def pack_orders(orders: np.ndarray) -> np.ndarray:
    """Pack each row of a ``(count, n)`` order matrix into one ``uint64``."""
    orders = np.asarray(orders, dtype=np.uint64)
    n = orders.shape[1]
    shifts = np.arange(4 * (n - 1), -1, -4, dtype=np.uint64)
    return np.bitwise_or.reduce(orders << shifts, axis=1) if n else np.zeros(len(orders), np.uint64)


def unpack_orders(packed: np.ndarray, n: int) -> np.ndarray:
    packed = np.asarray(packed, dtype=np.uint64)
    shifts = np.arange(4 * (n - 1), -1, -4, dtype=np.uint64)
    return ((packed[:, None] >> shifts) & np.uint64(0xF)).astype(np.uint8)


class Domain:
    """An immutable set of linear orders on ``1..n``."""

    __slots__ = ("n", "_orders", "_packed")

    def __init__(self, n: int, orders: Iterable[Sequence[int]] | np.ndarray):
        if n < 1 or n > MAX_N:
            raise ValueError(f"n must be in 1..{MAX_N}, got {n}")
        arr = np.asarray(orders if isinstance(orders, np.ndarray) else list(orders), dtype=np.uint8)
        arr = arr.reshape(-1, n)
        if len(arr):
            expected = np.arange(1, n + 1, dtype=np.uint8)
            if not (np.sort(arr, axis=1) == expected).all():
                raise ValueError("every order must be a permutation of 1..n")
        packed, first = np.unique(pack_orders(arr), return_index=True)
        self.n = n
        self._orders = arr[first]
        self._packed = packed
        self._orders.setflags(write=False)
        self._packed.setflags(write=False)

    @classmethod
    def _from_sorted(cls, n: int, orders: np.ndarray, packed: np.ndarray) -> Domain:
        self = object.__new__(cls)
        self.n = n
        self._orders = orders
        self._packed = packed
        orders.setflags(write=False)
        packed.setflags(write=False)
        return self

    @property
    def orders(self) -> np.ndarray:
        """Sorted ``(size, n)`` matrix of the orders (read-only)."""
        return self._orders

    @property
    def packed(self) -> np.ndarray:
        """Sorted packed keys, one per order (read-only)."""
        return self._packed

    def __len__(self) -> int:
        return len(self._packed)

    def __iter__(self) -> Iterator[LinearOrder]:
        for row in self._orders:
            yield tuple(int(a) for a in row)

    def __contains__(self, order: object) -> bool:
        try:
            arr = np.asarray(order, dtype=np.uint8).reshape(1, self.n)
        except (TypeError, ValueError):
            return False
        key = pack_orders(arr)[0]
        k = np.searchsorted(self._packed, key)
        return bool(k < len(self._packed) and self._packed[k] == key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Domain):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._packed, other._packed)

    def __hash__(self) -> int:
        return hash((self.n, self._packed.tobytes()))

    def __repr__(self) -> str:
        return f"Domain(n={self.n}, size={len(self)})"

    def fingerprint(self) -> bytes:
        """Canonical byte string identifying the order set."""
        return bytes([self.n]) + self._packed.tobytes()

    def is_unitary(self) -> bool:
        return tuple(range(1, self.n + 1)) in self


def _assigned_pairs(assignment) -> Iterable[tuple[Triple, NeverRule]]:
    if hasattr(assignment, "assigned"):
        return assignment.assigned()
    if isinstance(assignment, Mapping):
        return assignment.items()
    return assignment


AssignmentLike = Union["Mapping[Triple, NeverRule]", Iterable[tuple[Triple, NeverRule]]]


def build_domain(n: int, trs: AssignmentLike, *, max_n: int = MAX_N) -> Domain:
    """All orders of ``1..n`` allowed by every assigned (triple, rule) pair.

    ``trs`` may be a :class:`cdforge.trs.Trs`, a mapping ``triple -> rule`` or
    an iterable of pairs; unassigned triples impose nothing.  The domain is
    grown one alternative at a time: alternative ``c`` is inserted into every
    gap of every order on ``1..c-1`` and kept where all triples ``(a, b, c)``
    allow it.
    """
    if n < 3:
        raise ValueError(f"need at least 3 alternatives, got {n}")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the size cap of {max_n}")
    by_top: dict[int, list[tuple[int, int, int]]] = {}
    for (a, b, c), rule in _assigned_pairs(trs):
        if not 1 <= a < b < c <= n:
            raise ValueError(f"invalid triple {(a, b, c)} for n={n}")
        by_top.setdefault(c, []).append((a, b, _RULE_ID[rule]))

    orders = np.ones((1, 1), dtype=np.uint8)
    for m in range(1, n):
        c = m + 1
        rows = len(orders)
        gaps = np.arange(m + 1)
        checks = by_top.get(c)
        if checks:
            pos = np.empty((rows, c), dtype=np.int16)
            pos[np.arange(rows)[:, None], orders] = np.arange(m, dtype=np.int16)
            a_idx, b_idx, rule_ids = (np.array(col) for col in zip(*checks))
            pa = pos[:, a_idx][:, :, None]
            pb = pos[:, b_idx][:, :, None]
            code = ((pa < pb) * 4 + (pa < gaps) * 2 + (pb < gaps)).astype(np.intp)
            ok = RULE_TABLE[rule_ids[None, :, None], code].all(axis=1)
            row_idx, gap_idx = np.nonzero(ok)
        else:
            row_idx = np.repeat(np.arange(rows), m + 1)
            gap_idx = np.tile(gaps, rows)
        cols = np.arange(c)
        src = cols[None, :] - (cols[None, :] > gap_idx[:, None])
        grown = orders[row_idx[:, None], np.minimum(src, m - 1)]
        grown[np.arange(len(row_idx)), gap_idx] = c
        orders = grown

    packed = pack_orders(orders)
    order = np.argsort(packed, kind="stable")
    return Domain._from_sorted(n, orders[order], packed[order])


def restrict_domain(domain: Domain, subset: Iterable[int]) -> Domain:
    """Restrict every order to ``subset`` and relabel it monotonically onto ``1..k``."""
    subset = sorted(set(subset))
    k = len(subset)
    if k < 3:
        raise ValueError(f"restriction needs at least 3 alternatives, got {k}")
    if subset[0] < 1 or subset[-1] > domain.n:
        raise ValueError(f"subset {subset} not within 1..{domain.n}")
    if k == domain.n:
        return domain
    relabel = np.zeros(domain.n + 1, dtype=np.uint8)
    relabel[subset] = np.arange(1, k + 1)
    kept = relabel[domain.orders]
    kept = kept[kept > 0].reshape(len(domain), k)
    packed, first = np.unique(pack_orders(kept), return_index=True)
    return Domain._from_sorted(k, kept[first], packed)


def kendall_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of pairs of alternatives ranked differently by ``a`` and ``b``."""
    if len(a) != len(b):
        raise ValueError("orders differ in length")
    where = {alt: k for k, alt in enumerate(b)}
    seq = [where[alt] for alt in a]
    return sum(1 for i, j in combinations(range(len(seq)), 2) if seq[i] > seq[j])
