"""Construct, search and analyse Condorcet domains defined by never rules on triples."""

__version__ = "0.1.0"

from cdforge.core import (
    ALL_RULES,
    MAX_N,
    N1_2,
    N1_3,
    N2_1,
    N2_3,
    N3_1,
    N3_2,
    PEAK_PIT_RULES,
    SIX_RULES,
    Domain,
    NeverRule,
    build_domain,
    kendall_distance,
    restrict_domain,
    rule_allows,
)
from cdforge.trs import Trs, decode_state, encode_state, fishburn_trs, restrict_trs, rz_triples

__all__ = [
    "ALL_RULES",
    "MAX_N",
    "N1_2",
    "N1_3",
    "N2_1",
    "N2_3",
    "N3_1",
    "N3_2",
    "PEAK_PIT_RULES",
    "SIX_RULES",
    "Domain",
    "NeverRule",
    "Trs",
    "build_domain",
    "decode_state",
    "encode_state",
    "fishburn_trs",
    "kendall_distance",
    "restrict_domain",
    "restrict_trs",
    "rule_allows",
    "rz_triples",
]
