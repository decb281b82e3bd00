"""Erdos-Renyi sampling and graph Laplacians.

Sampling is deterministic in (seed, trial_index): every trial owns a fresh
PCG64 stream keyed by numpy's SeedSequence((seed, trial_index)), so trials may
run in any order on any worker and still reproduce bit for bit.  Edge
inclusion compares a uniform 64-bit word against floor(q * 2^64), i.e. q is
held as a dyadic rational with the full 53-bit mantissa.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .intlinalg import IntMatrix


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one Monte Carlo trial."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, trial))))


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge ({u}, {v}) for n={self.n}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    def adjacency_lists(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


def graph_from_edge_list(n: int, pairs) -> Graph:
    edges = sorted({(min(u, v), max(u, v)) for u, v in pairs})
    return Graph(n=n, edges=tuple(edges))


def edges_to_json(g: Graph) -> list[list[int]]:
    """Edge list as a JSON-ready array of [u, v] pairs (debugging aid)."""
    return [[u, v] for u, v in g.edges]


@dataclass(frozen=True)
class GraphSampleConfig:
    n: int
    q: float
    seed: int
    connected_only: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one vertex")
        if not (0.0 < self.q < 1.0):
            raise ValueError("edge probability must lie strictly in (0, 1)")


def edge_threshold(q: float) -> int:
    """floor(q * 2^64): a 64-bit draw below this includes the edge."""
    return int(Fraction(q) * (1 << 64))


def potential_edges(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def graph_from_words(n: int, words, threshold: int) -> Graph:
    """Build a graph from explicit 64-bit words (the forced-randomness hook).

    words[i] < threshold includes the i-th pair in combinations order.
    """
    pairs = potential_edges(n)
    if len(words) != len(pairs):
        raise ValueError("need one word per potential edge")
    edges = tuple(e for e, w in zip(pairs, words) if int(w) < threshold)
    return Graph(n=n, edges=edges)


def sample_gnq_with_attempts(cfg: GraphSampleConfig, trial: int) -> tuple[Graph, int]:
    """Sample G(n, q); with connected_only, resample within the trial stream
    until connected.  Returns (graph, attempts); attempts - 1 were discarded.
    """
    rng = trial_rng(cfg.seed, trial)
    thr = edge_threshold(cfg.q)
    k = cfg.n * (cfg.n - 1) // 2
    attempts = 0
    while True:
        attempts += 1
        words = rng.integers(0, 1 << 64, size=k, dtype=np.uint64)
        g = graph_from_words(cfg.n, words, thr)
        if not cfg.connected_only or is_connected(g):
            return g, attempts


def sample_gnq(cfg: GraphSampleConfig, trial: int) -> Graph:
    return sample_gnq_with_attempts(cfg, trial)[0]


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    adj = g.adjacency_lists()
    seen = [False] * g.n
    stack = [0]
    seen[0] = True
    found = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                found += 1
                stack.append(v)
    return found == g.n


def laplacian(g: Graph) -> IntMatrix:
    """Combinatorial Laplacian Deg - Adj; all row and column sums are zero."""
    L = [[0] * g.n for _ in range(g.n)]
    for u, v in g.edges:
        L[u][u] += 1
        L[v][v] += 1
        L[u][v] -= 1
        L[v][u] -= 1
    return L


def reduced_laplacian(g: Graph, delete_vertex: int | None = None) -> IntMatrix:
    """Laplacian with one row and the matching column removed.

    Defaults to the last vertex; nonsingular exactly when g is connected, and
    its determinant counts spanning trees regardless of the deleted vertex.
    """
    if delete_vertex is None:
        delete_vertex = g.n - 1
    if not (0 <= delete_vertex < g.n):
        raise ValueError("delete_vertex out of range")
    L = laplacian(g)
    keep = [i for i in range(g.n) if i != delete_vertex]
    return [[L[i][j] for j in keep] for i in keep]
