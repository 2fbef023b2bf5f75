import random
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdforge.core import (
    ALL_RULES,
    N1_3,
    N2_1,
    PEAK_PIT_RULES,
    SIX_RULES,
    Domain,
    NeverRule,
    build_domain,
    kendall_distance,
    pack_orders,
    restrict_domain,
    rule_allows,
    unpack_orders,
)
from cdforge.trs import Trs, fishburn_trs, restrict_trs, rz_triples

from oracles import all_assignments, naive_domain, naive_kendall, naive_restrict


def random_trs(rng, n, rules=PEAK_PIT_RULES, p_assigned=1.0):
    return Trs(n, tuple(rng.choice(rules) if rng.random() < p_assigned else None for _ in rz_triples(n)))


def as_set(domain):
    return set(domain)


class TestRuleAllows:
    def test_forbidden_example(self):
        assert rule_allows([4, 2, 5, 1, 3], (3, 4, 5), N1_3) is False

    def test_identity_passes_1n3(self):
        for triple in combinations(range(1, 7), 3):
            assert rule_allows(list(range(1, 7)), triple, N1_3)

    def test_middle_first(self):
        assert rule_allows([2, 1, 3], (1, 2, 3), N2_1) is False

    @pytest.mark.parametrize("rule", ALL_RULES)
    def test_each_rule_forbids_two_of_six(self, rule):
        allowed = [p for p in permutations((1, 2, 3)) if rule_allows(p, (1, 2, 3), rule)]
        assert len(allowed) == 4
        for p in permutations((1, 2, 3)):
            assert rule_allows(p, (1, 2, 3), rule) == (p.index(rule.i) + 1 != rule.j)

    def test_parse_roundtrip(self):
        for rule in ALL_RULES:
            assert NeverRule.parse(str(rule)) == rule
        with pytest.raises(ValueError):
            NeverRule.parse("4N1")
        with pytest.raises(ValueError):
            NeverRule.parse("1X3")


class TestBuildDomain:
    def test_three_alternatives(self):
        assert {"".join(map(str, o)) for o in build_domain(3, {(1, 2, 3): N1_3})} == {"123", "132", "213", "312"}

    def test_empty_trs_is_full_symmetric_group(self):
        for n in range(3, 7):
            d = build_domain(n, Trs.empty(n))
            assert len(d) == len(list(permutations(range(n))))

    def test_all_1n3_on_four(self):
        assert len(build_domain(4, {t: N1_3 for t in rz_triples(4)})) == 8

    @pytest.mark.parametrize("n", [4, 5, 6])
    @pytest.mark.parametrize("rule", PEAK_PIT_RULES)
    def test_single_rule_law(self, n, rule):
        assert len(build_domain(n, {t: rule for t in rz_triples(n)})) == 2 ** (n - 1)

    def test_exhaustive_oracle_n4(self):
        triples = rz_triples(4)
        for assignment in all_assignments(triples):
            assert as_set(build_domain(4, assignment)) == naive_domain(4, assignment.items())

    @pytest.mark.parametrize("n,trials", [(5, 150), (6, 40)])
    def test_random_oracle(self, n, trials):
        rng = random.Random(n)
        for _ in range(trials):
            trs = random_trs(rng, n, SIX_RULES, p_assigned=rng.choice([0.3, 0.7, 1.0]))
            assert as_set(build_domain(n, trs)) == naive_domain(n, trs.assigned())

    def test_unitary_for_peak_pit(self):
        rng = random.Random(7)
        for n in range(3, 9):
            for _ in range(20):
                assert build_domain(n, random_trs(rng, n)).is_unitary()

    def test_size_cap(self):
        with pytest.raises(ValueError):
            build_domain(16, {})
        with pytest.raises(ValueError):
            build_domain(2, {})

    def test_rejects_bad_triple(self):
        with pytest.raises(ValueError):
            build_domain(4, {(2, 1, 3): N1_3})

    def test_output_sorted_and_deterministic(self):
        d = build_domain(7, fishburn_trs(7))
        rows = [tuple(r) for r in d.orders.tolist()]
        assert rows == sorted(rows)
        assert d == build_domain(7, fishburn_trs(7))


class TestRestrictDomain:
    def test_fishburn5_drop_one(self):
        d = build_domain(5, fishburn_trs(5))
        sizes = [len(restrict_domain(d, [a for a in range(1, 6) if a != drop])) for drop in range(1, 6)]
        assert sizes == [9, 9, 8, 9, 9]

    def test_fishburn5_drop_first_listing(self):
        d = build_domain(5, fishburn_trs(5))
        listed = {"4253", "4523", "5432", "2345", "5423", "2453", "4532", "4235", "2435"}
        # relabel the listed orders on {2,3,4,5} onto 1..4
        expected = {tuple(int(ch) - 1 for ch in s) for s in listed}
        assert as_set(restrict_domain(d, [2, 3, 4, 5])) == expected

    def test_full_subset_is_identity(self):
        d = build_domain(6, fishburn_trs(6))
        assert restrict_domain(d, range(1, 7)) == d

    def test_small_subset_rejected(self):
        d = build_domain(4, {})
        with pytest.raises(ValueError):
            restrict_domain(d, [1, 2])

    def test_matches_naive(self):
        rng = random.Random(3)
        for _ in range(30):
            n = rng.randint(4, 7)
            d = build_domain(n, random_trs(rng, n))
            sub = sorted(rng.sample(range(1, n + 1), rng.randint(3, n - 1)))
            assert as_set(restrict_domain(d, sub)) == naive_restrict(as_set(d), sub)


class TestRestrictionClosure:
    """Restricting a built domain never leaves the domain of the restricted rules.

    The reverse inclusion can fail: rules on triples outside the subset may
    remove orders whose restriction the subset's own rules would allow.
    """

    def test_exhaustive_n4(self):
        strict = 0
        for assignment in all_assignments(rz_triples(4)):
            trs = Trs.from_rules(4, assignment)
            d = build_domain(4, trs)
            for sub in combinations(range(1, 5), 3):
                restricted = as_set(restrict_domain(d, sub))
                rebuilt = as_set(build_domain(3, restrict_trs(trs, sub)))
                assert restricted <= rebuilt
                strict += restricted != rebuilt
        assert strict > 0

    @pytest.mark.parametrize("n,trials", [(5, 60), (6, 40), (7, 20), (8, 10)])
    def test_random(self, n, trials):
        rng = random.Random(100 + n)
        for _ in range(trials):
            trs = random_trs(rng, n)
            d = build_domain(n, trs)
            k = rng.randint(3, n - 1)
            sub = sorted(rng.sample(range(1, n + 1), k))
            assert as_set(restrict_domain(d, sub)) <= as_set(build_domain(k, restrict_trs(trs, sub)))

    @pytest.mark.parametrize("n", [6, 7, 8])
    def test_equal_for_fishburn(self, n):
        trs = fishburn_trs(n)
        d = build_domain(n, trs)
        for sub in combinations(range(1, n + 1), 5):
            assert restrict_domain(d, sub) == build_domain(5, restrict_trs(trs, sub))


class TestKendall:
    def test_reverse(self):
        assert kendall_distance([1, 2, 3, 4], [4, 3, 2, 1]) == 6

    def test_self(self):
        assert kendall_distance([3, 1, 2], [3, 1, 2]) == 0

    def test_two_swaps(self):
        assert kendall_distance([1, 2, 3, 4, 5], [2, 1, 3, 5, 4]) == 2

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 8).flatmap(lambda n: st.tuples(*[st.permutations(range(1, n + 1))] * 3)))
    def test_metric_axioms(self, orders):
        a, b, c = orders
        assert kendall_distance(a, b) == naive_kendall(a, b)
        assert kendall_distance(a, b) == kendall_distance(b, a)
        assert (kendall_distance(a, b) == 0) == (list(a) == list(b))
        assert kendall_distance(a, c) <= kendall_distance(a, b) + kendall_distance(b, c)


class TestDomainType:
    def test_pack_roundtrip(self):
        orders = np.array(list(permutations(range(1, 6))), dtype=np.uint8)
        assert (unpack_orders(pack_orders(orders), 5) == orders).all()

    def test_pack_order_is_lexicographic(self):
        orders = sorted(permutations(range(1, 6)))
        keys = pack_orders(np.array(orders, dtype=np.uint8))
        assert (np.diff(keys.astype(np.float64)) > 0).all()

    def test_dedupes_and_compares(self):
        d = Domain(3, [(1, 2, 3), (1, 2, 3), (3, 2, 1)])
        assert len(d) == 2
        assert (3, 2, 1) in d and (2, 1, 3) not in d
        assert d == Domain(3, [(3, 2, 1), (1, 2, 3)])
        assert hash(d) == hash(Domain(3, [(3, 2, 1), (1, 2, 3)]))

    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            Domain(3, [(1, 1, 2)])

    def test_six_rules_keep_identity(self):
        for rule in SIX_RULES:
            assert build_domain(5, {t: rule for t in rz_triples(5)}).is_unitary()

    def test_fishburn_contains_reverse(self):
        d = build_domain(6, fishburn_trs(6))
        assert tuple(range(6, 0, -1)) in d
