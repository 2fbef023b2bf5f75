"""Local-search baselines over fully assigned TRSs: hill climbing and annealing.

The objective is the exact domain size.  Each (triple, rule) pair is
precomputed as a bitset over all ``n!`` orders, so a TRS's size is the
popcount of the AND of its slot masks; prefix and suffix ANDs make a
single-slot move cost two ANDs.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from collections.abc import Sequence

import numpy as np

from cdforge.core import PEAK_PIT_RULES, RULE_TABLE, SIX_RULES, NeverRule, _RULE_ID, build_domain
from cdforge.trs import Trs, rz_triples

MAX_BASELINE_N = 8


@lru_cache(maxsize=8)
def _slot_masks(n: int, alphabet: tuple[NeverRule, ...]) -> tuple[tuple[int, ...], ...]:
    perms = np.array(list(permutations(range(1, n + 1))), dtype=np.int64)
    pos = np.empty_like(perms)
    pos[np.arange(len(perms))[:, None], perms - 1] = np.arange(n)
    masks = []
    for a, b, c in rz_triples(n):
        pa, pb, pc = pos[:, a - 1], pos[:, b - 1], pos[:, c - 1]
        code = (pa < pb) * 4 + (pa < pc) * 2 + (pb < pc)
        row = []
        for rule in alphabet:
            bits = np.packbits(RULE_TABLE[_RULE_ID[rule], code], bitorder="little")
            row.append(int.from_bytes(bits.tobytes(), "little"))
        masks.append(tuple(row))
    return tuple(masks)


class _Objective:
    """Domain size of a rule-index vector, with cheap single-slot what-ifs."""

    def __init__(self, n: int, alphabet: tuple[NeverRule, ...]):
        self.masks = _slot_masks(n, alphabet)
        self.full = (1 << math.factorial(n)) - 1

    def reset(self, state: Sequence[int]) -> int:
        m = len(state)
        self.prefix = [self.full] * (m + 1)
        self.suffix = [self.full] * (m + 1)
        for k in range(m):
            self.prefix[k + 1] = self.prefix[k] & self.masks[k][state[k]]
        for k in range(m - 1, -1, -1):
            self.suffix[k] = self.suffix[k + 1] & self.masks[k][state[k]]
        return self.prefix[m].bit_count()

    def moved(self, slot: int, rule_idx: int) -> int:
        return (self.prefix[slot] & self.masks[slot][rule_idx] & self.suffix[slot + 1]).bit_count()


def _check_n(n: int) -> None:
    if not 3 <= n <= MAX_BASELINE_N:
        raise ValueError(f"baselines support 3 <= n <= {MAX_BASELINE_N}, got {n}")


def _to_trs(n: int, state: Sequence[int], alphabet: tuple[NeverRule, ...]) -> Trs:
    return Trs(n, tuple(alphabet[k] for k in state))


def _checked(n: int, trs: Trs, size: int) -> tuple[Trs, int]:
    built = len(build_domain(n, trs))
    if built != size:
        raise RuntimeError(f"objective reported {size} but the built domain has {built} orders")
    return trs, size


def hill_climb(
    n: int,
    restarts: int = 10,
    seed: int = 0,
    *,
    alphabet: tuple[NeverRule, ...] = PEAK_PIT_RULES,
    budget_secs: float | None = None,
) -> tuple[Trs, int]:
    """Random-restart steepest-ascent hill climbing over single-slot rule changes.

    ``restarts`` counts climbs after the first, so ``restarts=0`` is one climb.
    """
    _check_n(n)
    rng = random.Random(seed)
    objective = _Objective(n, alphabet)
    m, r = len(rz_triples(n)), len(alphabet)
    deadline = None if budget_secs is None else time.monotonic() + budget_secs
    best_state, best_size = None, -1
    for _ in range(restarts + 1):
        state = [rng.randrange(r) for _ in range(m)]
        size = objective.reset(state)
        while True:
            move, move_size = None, size
            for slot in range(m):
                for rule_idx in range(r):
                    if rule_idx != state[slot]:
                        cand = objective.moved(slot, rule_idx)
                        if cand > move_size:
                            move, move_size = (slot, rule_idx), cand
            if move is None:
                break
            state[move[0]] = move[1]
            size = objective.reset(state)
        if size > best_size:
            best_state, best_size = list(state), size
        if deadline is not None and time.monotonic() > deadline:
            break
    return _checked(n, _to_trs(n, best_state, alphabet), best_size)


@dataclass(frozen=True)
class AnnealConfig:
    initial_temperature: float = 5.0
    cooling_rate: float = 0.995
    steps_per_temperature: int = 200
    restarts: int = 20
    seed: int = 0
    rule_alphabet: int = 4
    final_temperature: float = 0.05
    budget_secs: float | None = None

    def __post_init__(self) -> None:
        if self.initial_temperature <= 0 or self.final_temperature <= 0:
            raise ValueError("temperatures must be positive")
        if not 0 < self.cooling_rate < 1:
            raise ValueError("cooling rate must lie in (0, 1)")
        if self.steps_per_temperature < 1 or self.restarts < 1:
            raise ValueError("steps per temperature and restarts must be positive")
        if self.rule_alphabet not in (4, 6):
            raise ValueError("rule alphabet must have 4 or 6 rules")

    @property
    def rules(self) -> tuple[NeverRule, ...]:
        return PEAK_PIT_RULES if self.rule_alphabet == 4 else SIX_RULES


def simulated_annealing(n: int, cfg: AnnealConfig = AnnealConfig()) -> tuple[Trs, int]:
    """Metropolis acceptance on the size change with geometric cooling; ``cfg.restarts`` independent runs."""
    _check_n(n)
    rng = random.Random(cfg.seed)
    alphabet = cfg.rules
    objective = _Objective(n, alphabet)
    m, r = len(rz_triples(n)), len(alphabet)
    deadline = None if cfg.budget_secs is None else time.monotonic() + cfg.budget_secs
    best_state, best_size = None, -1
    for _ in range(cfg.restarts):
        state = [rng.randrange(r) for _ in range(m)]
        size = objective.reset(state)
        run_best, run_size = list(state), size
        temperature = cfg.initial_temperature
        while temperature > cfg.final_temperature:
            for _ in range(cfg.steps_per_temperature):
                slot = rng.randrange(m)
                rule_idx = rng.randrange(r - 1)
                rule_idx += rule_idx >= state[slot]
                cand = objective.moved(slot, rule_idx)
                if cand >= size or rng.random() < math.exp((cand - size) / temperature):
                    state[slot] = rule_idx
                    size = objective.reset(state)
                    if size > run_size:
                        run_best, run_size = list(state), size
            temperature *= cfg.cooling_rate
            if deadline is not None and time.monotonic() > deadline:
                break
        if run_size > best_size:
            best_state, best_size = run_best, run_size
        if deadline is not None and time.monotonic() > deadline:
            break
    return _checked(n, _to_trs(n, best_state, alphabet), best_size)
