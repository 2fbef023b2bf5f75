"""Median-graph metrics, isomorphism counts and subset-size reports."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from os import PathLike

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from cdforge.core import Domain, build_domain, pack_orders, restrict_domain, unpack_orders

_BFS_BLOCK = 512


class DisconnectedDomainError(ValueError):
    def __init__(self, a: tuple[int, ...], b: tuple[int, ...]):
        super().__init__(f"median graph is disconnected: no path from {a} to {b}")
        self.orders = (a, b)


@dataclass(frozen=True)
class DomainStats:
    size: int
    width: int
    radius: int
    centre_count: int
    isomorphic_count: int | None = None


def median_graph(domain: Domain) -> csr_matrix:
    """Adjacency of orders that differ by one swap of neighbouring alternatives."""
    orders, packed = domain.orders, domain.packed
    size, n = orders.shape
    rows, cols = [], []
    for p in range(n - 1):
        swapped = orders.copy()
        swapped[:, [p, p + 1]] = swapped[:, [p + 1, p]]
        keys = pack_orders(swapped)
        hit = np.searchsorted(packed, keys)
        hit[hit == size] = 0
        found = packed[hit] == keys
        rows.append(np.flatnonzero(found))
        cols.append(hit[found])
    rows_a, cols_a = np.concatenate(rows), np.concatenate(cols)
    data = np.ones(len(rows_a), dtype=np.int8)
    return coo_matrix((data, (rows_a, cols_a)), shape=(size, size)).tocsr()


def eccentricities(domain: Domain) -> np.ndarray:
    """Graph eccentricity of every order; raises if the median graph is disconnected."""
    graph = median_graph(domain)
    n_comp, labels = connected_components(graph, directed=False)
    if n_comp > 1:
        a = int(np.flatnonzero(labels == labels[0])[0])
        b = int(np.flatnonzero(labels != labels[0])[0])
        orders = domain.orders
        raise DisconnectedDomainError(tuple(map(int, orders[a])), tuple(map(int, orders[b])))
    ecc = np.empty(len(domain), dtype=np.int64)
    for start in range(0, len(domain), _BFS_BLOCK):
        sources = np.arange(start, min(start + _BFS_BLOCK, len(domain)))
        dist = shortest_path(graph, directed=False, unweighted=True, indices=sources)
        ecc[sources] = dist.max(axis=1).astype(np.int64)
    return ecc


def isomorphic_count(domain: Domain) -> int:
    """Number of distinct domains obtained by relabeling some member order to the identity."""
    if len(domain) == 0:
        raise ValueError("empty domain")
    orders = domain.orders
    seen = set()
    relabel = np.zeros(domain.n + 1, dtype=np.uint8)
    ranks = np.arange(1, domain.n + 1, dtype=np.uint8)
    for order in orders:
        relabel[order] = ranks
        seen.add(np.sort(pack_orders(relabel[orders])).tobytes())
    return len(seen)


def graph_stats(domain: Domain, *, with_isomorphic: bool = True) -> DomainStats:
    """Width (diameter), radius and centre count of the median graph."""
    ecc = eccentricities(domain)
    radius = int(ecc.min())
    centres = np.flatnonzero(ecc == radius)
    return DomainStats(
        size=len(domain),
        width=int(ecc.max()),
        radius=radius,
        centre_count=len(centres),
        isomorphic_count=isomorphic_count(domain) if with_isomorphic else None,
    )


def subset_size_distribution(domain: Domain, k: int) -> dict[int, int]:
    """``size -> count`` over all ``k``-alternative restrictions, sizes ascending."""
    if not 3 <= k < domain.n:
        raise ValueError(f"k must satisfy 3 <= k < {domain.n}, got {k}")
    counts = Counter(len(restrict_domain(domain, sub)) for sub in combinations(range(1, domain.n + 1), k))
    return dict(sorted(counts.items()))


@dataclass
class VerifyReport:
    size: int
    listed_size: int
    set_match: bool
    unitary: bool
    missing: list[tuple[int, ...]] = field(default_factory=list)
    extra: list[tuple[int, ...]] = field(default_factory=list)
    mismatches: int = 0

    @property
    def size_match(self) -> bool:
        return self.size == self.listed_size

    @property
    def ok(self) -> bool:
        return self.size_match and self.set_match


def compare_domains(built: Domain, listed: Domain, *, sample: int = 10) -> VerifyReport:
    """``missing`` are listed orders the TRS forbids; ``extra`` are built orders not listed."""
    if built.n != listed.n:
        return VerifyReport(len(built), len(listed), False, built.is_unitary(), mismatches=max(len(built), len(listed)))
    missing_keys = np.setdiff1d(listed.packed, built.packed)
    extra_keys = np.setdiff1d(built.packed, listed.packed)

    def decode(keys):
        return [tuple(map(int, row)) for row in unpack_orders(keys[:sample], built.n)]

    return VerifyReport(
        size=len(built),
        listed_size=len(listed),
        set_match=not len(missing_keys) and not len(extra_keys),
        unitary=built.is_unitary(),
        missing=decode(missing_keys),
        extra=decode(extra_keys),
        mismatches=len(missing_keys) + len(extra_keys),
    )


def verify_record(trs_file: str | PathLike, domain_file: str | PathLike) -> VerifyReport:
    """Build the domain of a TRS file and compare it as a set with a listed domain file."""
    from cdforge.io import parse_domain_file, parse_trs_file

    trs = parse_trs_file(trs_file)
    listed = parse_domain_file(domain_file)
    return compare_domains(build_domain(trs.n, trs), listed)
