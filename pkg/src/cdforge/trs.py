"""Triple-rule systems (TRS): triple ordering, state keys, restriction.

Internally every TRS indexes its triples in RZ order: ``(x1, y1, z1)``
precedes ``(x2, y2, z2)`` when ``x1 < x2``, or ``x1 == x2`` and ``z1 < z2``,
or ``x1 == x2``, ``z1 == z2`` and ``y1 < y2``.  A monotone relabeling keeps
this comparator, so restricting an RZ-prefix assignment to any subset of
alternatives again yields an RZ-prefix assignment.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from cdforge.core import N1_3, N2_1, N2_3, N3_1, NeverRule, Triple

# Frozen for file and database compatibility; 0 means unassigned.
RULE_DIGITS: dict[NeverRule, int] = {N1_3: 1, N3_1: 2, N2_1: 3, N2_3: 4}
DIGIT_RULES: dict[int, NeverRule] = {d: r for r, d in RULE_DIGITS.items()}


def rz_key(triple: Triple) -> tuple[int, int, int]:
    x, y, z = triple
    return (x, z, y)


@lru_cache(maxsize=None)
def rz_triples(n: int) -> tuple[Triple, ...]:
    """All ``C(n, 3)`` triples sorted by the RZ comparator."""
    if n < 3:
        raise ValueError(f"need at least 3 alternatives, got {n}")
    return tuple(sorted(combinations(range(1, n + 1), 3), key=rz_key))


@lru_cache(maxsize=None)
def rz_index(n: int) -> dict[Triple, int]:
    return {t: k for k, t in enumerate(rz_triples(n))}


def display_triples(n: int) -> list[Triple]:
    """Triples in lexicographic order, the layout used for printed tables."""
    return list(combinations(range(1, n + 1), 3))


@dataclass(frozen=True)
class Trs:
    """Rule slots for all triples of ``n`` alternatives, in RZ order."""

    n: int
    slots: tuple[NeverRule | None, ...]

    def __post_init__(self) -> None:
        if len(self.slots) != len(rz_triples(self.n)):
            raise ValueError(f"expected {len(rz_triples(self.n))} slots for n={self.n}, got {len(self.slots)}")

    @classmethod
    def empty(cls, n: int) -> Trs:
        return cls(n, (None,) * len(rz_triples(n)))

    @classmethod
    def from_rules(cls, n: int, rules: Mapping[Triple, NeverRule] | Iterable[tuple[Triple, NeverRule]]) -> Trs:
        index = rz_index(n)
        slots: list[NeverRule | None] = [None] * len(index)
        items = rules.items() if isinstance(rules, Mapping) else rules
        for triple, rule in items:
            triple = tuple(triple)
            if triple not in index:
                raise ValueError(f"{triple} is not an ascending triple of 1..{n}")
            slots[index[triple]] = rule
        return cls(n, tuple(slots))

    @classmethod
    def from_digits(cls, n: int, digits: Iterable[int]) -> Trs:
        return cls(n, tuple(DIGIT_RULES[d] if d else None for d in digits))

    @property
    def triples(self) -> tuple[Triple, ...]:
        return rz_triples(self.n)

    def __len__(self) -> int:
        return len(self.slots)

    def rule(self, triple: Triple) -> NeverRule | None:
        return self.slots[rz_index(self.n)[tuple(triple)]]

    def assigned(self) -> Iterator[tuple[Triple, NeverRule]]:
        for triple, rule in zip(self.triples, self.slots):
            if rule is not None:
                yield triple, rule

    def assigned_count(self) -> int:
        return sum(rule is not None for rule in self.slots)

    def is_complete(self) -> bool:
        return all(rule is not None for rule in self.slots)

    def is_prefix_assigned(self) -> bool:
        k = self.assigned_count()
        return all(rule is not None for rule in self.slots[:k])

    def with_rule(self, where: Triple | int, rule: NeverRule | None) -> Trs:
        idx = where if isinstance(where, int) else rz_index(self.n)[tuple(where)]
        slots = list(self.slots)
        slots[idx] = rule
        return Trs(self.n, tuple(slots))

    def digits(self) -> tuple[int, ...]:
        return tuple(RULE_DIGITS[r] if r is not None else 0 for r in self.slots)


def encode_state(trs: Trs) -> str:
    """Digit string over ``0..4``, one digit per RZ triple."""
    try:
        return "".join(str(d) for d in trs.digits())
    except KeyError as exc:
        raise ValueError(f"rule {exc.args[0]} has no state digit") from None


def decode_state(key: str | Iterable[int], n: int) -> Trs:
    digits = [int(ch) for ch in key]
    expected = len(rz_triples(n))
    if len(digits) != expected:
        raise ValueError(f"state key has {len(digits)} digits, expected {expected} for n={n}")
    bad = [d for d in digits if not 0 <= d <= 4]
    if bad:
        raise ValueError(f"state digit {bad[0]} outside 0..4")
    return Trs.from_digits(n, digits)


def restrict_trs(trs: Trs, subset: Iterable[int]) -> Trs:
    """Keep the triples inside ``subset``, relabeled monotonically onto ``1..k``."""
    subset = sorted(set(subset))
    k = len(subset)
    if k < 3:
        raise ValueError(f"restriction needs at least 3 alternatives, got {k}")
    if subset[0] < 1 or subset[-1] > trs.n:
        raise ValueError(f"subset {subset} not within 1..{trs.n}")
    index = rz_index(trs.n)
    slots = tuple(trs.slots[index[(subset[x - 1], subset[y - 1], subset[z - 1])]] for x, y, z in rz_triples(k))
    return Trs(k, slots)


def fishburn_trs(n: int) -> Trs:
    """Alternating scheme: even middle alternative gets 2N3, odd gets 2N1."""
    return Trs(n, tuple(N2_3 if y % 2 == 0 else N2_1 for _, y, _ in rz_triples(n)))
