"""Reproduction checks for the published tables.

Each table id maps to a function returning :class:`Check` rows; a run
passes when every row does.  Expected values are the published figures.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass

from cdforge.analysis import compare_domains, graph_stats, subset_size_distribution
from cdforge.core import SIX_RULES, build_domain, restrict_domain
from cdforge.io import data_path, format_order, parse_domain_file, parse_domain_text, parse_trs_file, parse_trs_text
from cdforge.trs import fishburn_trs


@dataclass(frozen=True)
class Check:
    table: str
    name: str
    expected: object
    actual: object

    @property
    def passed(self) -> bool:
        return self.expected == self.actual

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        detail = "" if self.passed else f"  expected {self.expected!r}, got {self.actual!r}"
        return f"{status} {self.table}: {self.name}{detail}"


THREE_ALTERNATIVE_DOMAINS = {
    "1N3": {"123", "132", "213", "312"},
    "2N3": {"123", "213", "231", "321"},
    "3N1": {"123", "132", "213", "231"},
    "2N1": {"123", "132", "312", "321"},
    "1N2": {"123", "132", "231", "321"},
    "3N2": {"123", "213", "312", "321"},
}

FISHBURN5_TRS = """\
1 2 3 2N3
1 2 4 2N3
1 2 5 2N3
1 3 4 2N1
1 3 5 2N1
1 4 5 2N3
2 3 4 2N1
2 3 5 2N1
2 4 5 2N3
3 4 5 2N3
"""

FISHBURN5_DOMAIN = """\
12453 12435 12345 54321 45321 54231 45231 42531 24531 54213
45213 42513 42153 42135 24513 24153 24135 21453 21435 21345
""".replace(" ", "\n")

FISHBURN_SIZES = {4: 9, 5: 20, 6: 45, 7: 100, 8: 222, 9: 488, 10: 1069, 11: 2324, 12: 5034, 13: 10840}
# n -> (width, radius, centre points, isomorphic domains)
FISHBURN_GRAPH = {
    4: (6, 3, 1, 9),
    5: (10, 5, 2, 10),
    6: (15, 8, 6, 45),
    7: (21, 11, 10, 50),
    8: (28, 14, 9, 222),
    9: (36, 18, 16, 244),
}

RECORD10_SUBSETS = {
    4: {8: 90, 9: 120},
    5: {16: 6, 17: 30, 18: 6, 19: 162, 20: 48},
    6: {36: 6, 39: 6, 40: 2, 41: 44, 42: 86, 43: 40, 44: 6, 45: 20},
    7: {87: 6, 89: 2, 91: 4, 92: 16, 93: 22, 94: 18, 95: 8, 96: 16, 97: 6, 98: 16, 100: 6},
    8: {200: 2, 204: 4, 205: 4, 209: 4, 211: 3, 212: 2, 214: 7, 216: 10, 218: 4, 219: 4, 222: 1},
    9: {473: 4, 481: 2, 485: 4},
}
RECORD10_GRAPH = (1082, 41, 21, 57, 1082)

RECORD11_SUBSETS = {
    4: {8: 143, 9: 187},
    5: {16: 28, 17: 46, 18: 5, 19: 279, 20: 104},
    6: {32: 3, 35: 10, 36: 9, 39: 35, 40: 2, 41: 73, 42: 164, 43: 79, 44: 35, 45: 52},
    7: {74: 3, 79: 3, 85: 12, 86: 3, 87: 9, 88: 3, 89: 15, 91: 19, 92: 44, 93: 39, 94: 12, 95: 16,
        96: 39, 97: 52, 98: 42, 100: 19},
    8: {179: 3, 184: 1, 187: 1, 192: 1, 194: 3, 196: 8, 200: 3, 201: 2, 202: 8, 204: 6, 205: 2, 207: 7,
        209: 10, 210: 3, 211: 12, 212: 17, 213: 11, 214: 2, 215: 8, 216: 13, 217: 2, 218: 30, 219: 8, 222: 4},
    9: {415: 1, 426: 1, 431: 1, 448: 2, 451: 2, 452: 1, 457: 1, 460: 1, 466: 4, 468: 2, 470: 2, 473: 4,
        475: 3, 478: 4, 479: 3, 480: 4, 481: 11, 484: 4, 485: 4},
    10: {1021: 1, 1026: 1, 1035: 1, 1045: 2, 1053: 1, 1068: 1, 1074: 2, 1078: 2},
}
RECORD11_GRAPH = (2349, 52, 26, 51, 2349)


def record_files(n: int) -> tuple:
    size = {10: 1082, 11: 2349}[n]
    return data_path(f"trs_n{n}_{size}.txt"), data_path(f"domain_n{n}_{size}.txt")


def record_domain(n: int):
    return parse_domain_file(record_files(n)[1])


def table1(slow: bool = False) -> list[Check]:
    listed = parse_trs_text(FISHBURN5_TRS)
    return [Check("table1", "alternating scheme on 5 alternatives", listed, fishburn_trs(5))]


def table2(slow: bool = False) -> list[Check]:
    checks = []
    for rule in SIX_RULES:
        built = {format_order(o) for o in build_domain(3, {(1, 2, 3): rule})}
        checks.append(Check("table2", f"(1,2,3) -> {rule}", THREE_ALTERNATIVE_DOMAINS[str(rule)], built))
    return checks


def table3(slow: bool = False) -> list[Check]:
    domain = build_domain(5, parse_trs_text(FISHBURN5_TRS))
    listed = parse_domain_text(FISHBURN5_DOMAIN)
    sizes = [len(restrict_domain(domain, [a for a in range(1, 6) if a != drop])) for drop in range(1, 6)]
    return [
        Check("table3", "Fishburn-5 domain equals listing", True, domain == listed),
        Check("table3", "4-alternative restriction sizes", [9, 9, 8, 9, 9], sizes),
    ]


def table4(slow: bool = False) -> list[Check]:
    checks = []
    top = 13 if slow else 11
    for n in range(4, top + 1):
        checks.append(Check("table4", f"Fishburn size n={n}", FISHBURN_SIZES[n], len(build_domain(n, fishburn_trs(n)))))
    for n, expected in FISHBURN_GRAPH.items():
        s = graph_stats(build_domain(n, fishburn_trs(n)))
        checks.append(Check("table4", f"Fishburn width/radius/centres/isomorphic n={n}", expected,
                            (s.width, s.radius, s.centre_count, s.isomorphic_count)))
    return checks


def _record_checks(table: str, n: int) -> list[Check]:
    trs_file, domain_file = record_files(n)
    trs = parse_trs_file(trs_file)
    report = compare_domains(build_domain(n, trs), parse_domain_file(domain_file))
    return [
        Check(table, f"n={n} TRS is fully assigned", True, trs.is_complete()),
        Check(table, f"n={n} built size", report.listed_size, report.size),
        Check(table, f"n={n} built domain equals listing", True, report.set_match),
        Check(table, f"n={n} domain is unitary", True, report.unitary),
    ]


def _subset_checks(table: str, n: int, expected: dict[int, dict[int, int]], ks: Iterable[int]) -> list[Check]:
    domain = record_domain(n)
    return [Check(table, f"n={n} restrictions to k={k}", expected[k], subset_size_distribution(domain, k)) for k in ks]


def _graph_check(table: str, n: int, expected: tuple) -> list[Check]:
    s = graph_stats(record_domain(n))
    return [Check(table, f"n={n} size/width/radius/centres/isomorphic", expected,
                  (s.size, s.width, s.radius, s.centre_count, s.isomorphic_count))]


def table6(slow: bool = False) -> list[Check]:
    return _record_checks("table6", 10)


def table7(slow: bool = False) -> list[Check]:
    return _subset_checks("table7", 10, RECORD10_SUBSETS, range(4, 10))


def table8(slow: bool = False) -> list[Check]:
    return _graph_check("table8", 10, RECORD10_GRAPH) + _graph_check("table8", 11, RECORD11_GRAPH)


def table9(slow: bool = False) -> list[Check]:
    return _record_checks("table9", 11)


def table10(slow: bool = False) -> list[Check]:
    return _subset_checks("table10", 11, RECORD11_SUBSETS, range(4, 10))


def table11(slow: bool = False) -> list[Check]:
    return _subset_checks("table11", 11, RECORD11_SUBSETS, [10])


TABLES: dict[str, Callable[..., list[Check]]] = {
    "table1": table1,
    "table2": table2,
    "table3": table3,
    "table4": table4,
    "table6": table6,
    "table7": table7,
    "table8": table8,
    "table9": table9,
    "table10": table10,
    "table11": table11,
}


def repro(table_id: str, slow: bool = False) -> list[Check]:
    key = table_id.lower()
    if not key.startswith("table"):
        key = "table" + key
    if key not in TABLES:
        raise KeyError(f"unknown table {table_id!r}; known: {', '.join(TABLES)}")
    return TABLES[key](slow=slow)
