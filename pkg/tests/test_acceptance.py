"""Acceptance gate: one PASS/FAIL line per criterion, printed in the summary.

Criterion 10 is a statistical smoke test and only warns.
"""

import random
import time
import warnings
from itertools import combinations

import pytest
from scipy.stats import spearmanr

from cdforge.analysis import compare_domains, graph_stats, subset_size_distribution
from cdforge.baselines import AnnealConfig, simulated_annealing
from cdforge.core import N2_3, PEAK_PIT_RULES, SIX_RULES, build_domain, kendall_distance, restrict_domain
from cdforge.io import format_order, parse_domain_file, parse_trs_file
from cdforge.lookup import build_db
from cdforge.repro import (
    FISHBURN_GRAPH,
    FISHBURN_SIZES,
    RECORD10_GRAPH,
    RECORD10_SUBSETS,
    RECORD11_SUBSETS,
    THREE_ALTERNATIVE_DOMAINS,
    record_files,
)
from cdforge.search import BeamConfig, beam_search, heuristic_value, subset_value_counts
from cdforge.trs import Trs, decode_state, encode_state, fishburn_trs, restrict_trs, rz_triples

from oracles import all_assignments, completion_max, naive_kendall

SEED = 20240601


def timed(fn, *args, **kwargs):
    started = time.perf_counter()
    value = fn(*args, **kwargs)
    return value, time.perf_counter() - started


def random_full(rng, n):
    return Trs(n, tuple(rng.choice(PEAK_PIT_RULES) for _ in rz_triples(n)))


def test_1_three_alternative_domains(report):
    def run():
        return {str(r): {format_order(o) for o in build_domain(3, {(1, 2, 3): r})} for r in SIX_RULES}

    def relabelings(orders):
        # every domain reached by renaming alternatives so that some member becomes 123
        out = set()
        for p in orders:
            rank = {ch: str(k + 1) for k, ch in enumerate(p)}
            out.add(frozenset("".join(rank[ch] for ch in o) for o in orders))
        return out

    built, secs = timed(run)
    classes = {frozenset(r for r, other in built.items() if frozenset(other) in relabelings(orders))
               for orders in built.values()}
    ok = built == THREE_ALTERNATIVE_DOMAINS and sorted(map(len, classes)) == [2, 2, 2] and secs < 1
    pairs = sorted("/".join(sorted(c)) for c in classes)
    report("1", ok, f"six rule domains reproduced, isomorphic pairs {pairs}, {secs:.3f}s")
    assert ok


def test_2_fishburn_sizes(report):
    sizes, secs = timed(lambda: {n: len(build_domain(n, fishburn_trs(n))) for n in range(4, 12)})
    expected = {n: FISHBURN_SIZES[n] for n in range(4, 12)}
    ok = sizes == expected and secs < 60
    report("2", ok, f"n=4..11 sizes {list(sizes.values())}, {secs:.1f}s")
    assert ok


@pytest.mark.slow
def test_2_fishburn_sizes_large(report):
    sizes, secs = timed(lambda: {n: len(build_domain(n, fishburn_trs(n))) for n in (12, 13)})
    ok = sizes == {12: FISHBURN_SIZES[12], 13: FISHBURN_SIZES[13]} and secs < 600
    report("2 (slow)", ok, f"n=12,13 sizes {list(sizes.values())}, {secs:.1f}s")
    assert ok


def test_3_record_verification(report):
    def run():
        out = {}
        for n in (10, 11):
            trs_file, domain_file = record_files(n)
            trs = parse_trs_file(trs_file)
            out[n] = compare_domains(build_domain(n, trs), parse_domain_file(domain_file))
        return out

    reports, secs = timed(run)
    ok = (reports[10].size == 1082 and reports[10].set_match and reports[11].size == 2349
          and reports[11].set_match and secs < 120)
    report("3", ok, f"sizes {reports[10].size}/{reports[11].size}, set match "
                    f"{reports[10].set_match}/{reports[11].set_match}, {secs:.1f}s")
    assert ok


def test_4_subset_distributions(report):
    def run():
        d10 = parse_domain_file(record_files(10)[1])
        d11 = parse_domain_file(record_files(11)[1])
        got10 = {k: subset_size_distribution(d10, k) for k in range(4, 10)}
        got11 = {k: subset_size_distribution(d11, k) for k in (4, 5, 6, 10)}
        return got10, got11

    (got10, got11), secs = timed(run)
    ok10 = got10 == RECORD10_SUBSETS
    ok11 = all(got11[k] == RECORD11_SUBSETS[k] for k in got11)
    powers = 8 in got11[4] and 16 in got11[5] and 32 in got11[6]
    ok = ok10 and ok11 and powers and secs < 300
    report("4", ok, f"n=10 k=4..9 {ok10}, n=11 k=4,5,6,10 {ok11}, sizes 8/16/32 present {powers}, {secs:.1f}s")
    assert ok


def test_5_median_graph_stats(report):
    def run():
        fish = {}
        for n in FISHBURN_GRAPH:
            s = graph_stats(build_domain(n, fishburn_trs(n)))
            fish[n] = (s.width, s.radius, s.centre_count, s.isomorphic_count)
        s = graph_stats(parse_domain_file(record_files(10)[1]))
        return fish, (s.size, s.width, s.radius, s.centre_count, s.isomorphic_count)

    (fish, rec), secs = timed(run)
    ok = fish == FISHBURN_GRAPH and rec == RECORD10_GRAPH and secs < 600
    report("5", ok, f"Fishburn n=4..9 {fish == FISHBURN_GRAPH}, record n=10 {rec}, {secs:.1f}s")
    assert ok


def test_6_lookup_database(report):
    db, secs = timed(build_db)
    empty = db.lookup("0" * 10)
    all_2n3 = db.lookup(encode_state(Trs(5, (N2_3,) * 10)))
    rng = random.Random(SEED)
    triples = rz_triples(5)
    mismatches = 0
    for _ in range(1000):
        k = rng.randint(5, 10)
        digits = [rng.randint(1, 4) for _ in range(k)]
        key = "".join(map(str, digits)) + "0" * (10 - k)
        rules = decode_state(key, 5).slots[:k]
        mismatches += db.lookup(key) != completion_max(5, triples, list(rules))
    ok = secs < 600 and empty == 20 and all_2n3 == 16 and mismatches == 0
    report("6", ok, f"build {secs:.2f}s, empty={empty}, all-2N3={all_2n3}, {mismatches}/1000 prefix mismatches")
    assert ok


def test_7_heuristic_consistency(report, db):
    rng = random.Random(SEED)
    checked = disagree = trs_disagree = 0
    for n in (6, 7):
        for _ in range(200):
            trs = random_full(rng, n)
            d = build_domain(n, trs)
            subsets = list(combinations(range(1, n + 1), 5))
            looked_up = [db.lookup(encode_state(restrict_trs(trs, sub))) for sub in subsets]
            sizes = [len(restrict_domain(d, sub)) for sub in subsets]
            assert sorted(looked_up) == sorted(subset_value_counts(trs, db).elements())
            bad = sum(a != b for a, b in zip(looked_up, sizes))
            checked += len(sizes)
            disagree += bad
            trs_disagree += bad > 0
    record10 = parse_trs_file(record_files(10)[0])
    from_counts = sum(w * RECORD10_SUBSETS[5].get(size, 0) for size, w in ((17, 1), (18, 2), (19, 3), (20, 4)))
    value = heuristic_value(record10, db)
    ok_eq2 = value == from_counts == 720
    ok = disagree == 0 and ok_eq2
    report("7", ok, f"{disagree}/{checked} subset lookups differ from restricted-domain sizes "
                    f"({trs_disagree}/400 TRSs); record n=10 weighted value {value} (expected 720)")
    assert ok


def test_8_search_rediscovery(report, db):
    r6, t6 = timed(beam_search, BeamConfig(6, 1000, seed=0), db)
    r7, t7 = timed(beam_search, BeamConfig(7, 5000, seed=0), db)
    ok = r6.best_size == 45 and r7.best_size == 100 and t6 <= 6.05 and t7 <= 13.1
    report("8", ok, f"n=6 N=1000 -> {r6.best_size} in {t6:.2f}s; n=7 N=5000 -> {r7.best_size} in {t7:.2f}s")
    assert ok


def test_9_property_suites(report, db):
    failures = []
    # restriction commutes with domain construction
    strict = 0
    for assignment in all_assignments(rz_triples(4)):
        trs = Trs.from_rules(4, assignment)
        d = build_domain(4, trs)
        strict += sum(restrict_domain(d, s) != build_domain(3, restrict_trs(trs, s)) for s in combinations(range(1, 5), 3))
    rng = random.Random(SEED)
    for n in range(5, 9):
        for _ in range(20):
            trs = random_full(rng, n)
            d = build_domain(n, trs)
            sub = sorted(rng.sample(range(1, n + 1), rng.randint(3, n - 1)))
            strict += restrict_domain(d, sub) != build_domain(len(sub), restrict_trs(trs, sub))
    if strict:
        failures.append(f"restriction/construction commutation fails in {strict} cases")
    for _ in range(1000):
        n = rng.choice([4, 5, 6])
        trs = Trs(n, tuple(rng.choice(PEAK_PIT_RULES + (None,)) for _ in rz_triples(n)))
        if decode_state(encode_state(trs), n) != trs:
            failures.append("state key round-trip")
            break
    for _ in range(300):
        n = rng.randint(2, 8)
        a, b, c = (rng.sample(range(1, n + 1), n) for _ in range(3))
        if (kendall_distance(a, b) != naive_kendall(a, b) or kendall_distance(a, b) != kendall_distance(b, a)
                or kendall_distance(a, c) > kendall_distance(a, b) + kendall_distance(b, c)):
            failures.append("kendall metric axioms")
            break
    if beam_search(BeamConfig(6, 300, seed=1), db).domains != beam_search(BeamConfig(6, 300, seed=1), db).domains:
        failures.append("beam determinism")
    report("9", not failures, "; ".join(failures) or "commutation, round-trips, metric axioms, determinism")
    assert not failures


def test_10_statistical_smoke(report, db):
    _, sa5 = simulated_annealing(5, AnnealConfig(restarts=3, seed=SEED))
    _, sa6 = simulated_annealing(6, AnnealConfig(restarts=3, seed=SEED))
    rng = random.Random(SEED)
    base = fishburn_trs(6)
    seen, scores, sizes = set(), [], []
    while len(sizes) < 200:
        slots = list(base.slots)
        for k in rng.sample(range(len(slots)), rng.randint(1, 8)):
            slots[k] = rng.choice(PEAK_PIT_RULES)
        trs = Trs(6, tuple(slots))
        if trs.slots in seen:
            continue
        size = len(build_domain(6, trs))
        if size > 28:
            seen.add(trs.slots)
            scores.append(heuristic_value(trs, db))
            sizes.append(size)
    rho = spearmanr(scores, sizes).statistic
    ok = sa5 == 20 and sa6 == 45 and rho >= 0.5
    report("10", ok, f"SA n=5 -> {sa5}, n=6 -> {sa6}; Spearman rho {rho:.3f} on 200 TRSs of size > 28 (warning only)")
    if not ok:
        warnings.warn("statistical smoke test below target", stacklevel=1)
