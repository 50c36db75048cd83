"""Signed graph data model, edge-list ingestion, sampling and statistics."""
from __future__ import annotations

import gzip
import io
import math
import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp


class EdgeListParseError(ValueError):
    """Raised for a malformed line in an edge-list file."""

    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line.rstrip()!r}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class SignedGraph:
    """Sparse graph with real (possibly negative) edge weights.

    Edges are stored as three parallel arrays sorted by ``(src, dst)``.
    Undirected graphs keep each pair once with ``src < dst``.

    Attributes
    ----------
    n
        Number of nodes; node ids are ``0 .. n-1``.
    directed
        Whether ``(u, v)`` and ``(v, u)`` are distinct edges.
    src, dst, weight
        Edge arrays.
    labels
        External label of every node id (``labels[i]`` is the label of ``i``).
    """

    n: int
    directed: bool
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    labels: tuple = field(default=())

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        weight = np.asarray(self.weight, dtype=np.float64)
        if not (len(src) == len(dst) == len(weight)):
            raise ValueError("edge arrays must have equal length")
        if len(src):
            if src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(src == dst):
                raise ValueError("self-loops are not allowed")
            if not np.all(np.isfinite(weight)):
                raise ValueError("edge weights must be finite")
            if not self.directed and np.any(src > dst):
                raise ValueError("undirected edges must be stored as (min, max)")
        order = np.lexsort((dst, src))
        src, dst, weight = src[order], dst[order], weight[order]
        if len(src) > 1:
            dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if np.any(dup):
                raise ValueError("duplicate edges")
        labels = tuple(self.labels) if self.labels else tuple(range(self.n))
        if len(labels) != self.n:
            raise ValueError("label table size does not match node count")
        for arr in (src, dst, weight):
            arr.setflags(write=False)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple], directed: bool = False,
                   labels: tuple = ()) -> "SignedGraph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples; undirected pairs are canonicalized."""
        rows = [(e[0], e[1], e[2] if len(e) > 2 else 1.0) for e in edges]
        src = np.array([r[0] for r in rows], dtype=np.int64)
        dst = np.array([r[1] for r in rows], dtype=np.int64)
        w = np.array([r[2] for r in rows], dtype=np.float64)
        if not directed:
            src, dst = np.minimum(src, dst), np.maximum(src, dst)
        return cls(n, directed, src, dst, w, labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return (self.n == other.n and self.directed == other.directed
                and np.array_equal(self.src, other.src) and np.array_equal(self.dst, other.dst)
                and np.array_equal(self.weight, other.weight) and self.labels == other.labels)

    __hash__ = None

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """Cached :meth:`adjacency`; treat as read-only."""
        return self.adjacency()

    @property
    def num_edges(self) -> int:
        return len(self.src)

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()))

    def label_index(self) -> dict:
        """Map from external label to node id."""
        return {lab: i for i, lab in enumerate(self.labels)}

    def node_id(self, label) -> int:
        """Resolve an external label (or its string form) to a node id."""
        index = self.label_index()
        if label in index:
            return index[label]
        for lab, i in index.items():
            if str(lab) == str(label):
                return i
        raise KeyError(f"unknown node label {label!r}")

    def adjacency(self) -> sp.csr_matrix:
        """Weighted adjacency matrix; symmetric for undirected graphs."""
        if self.directed:
            rows, cols, vals = self.src, self.dst, self.weight
        else:
            rows = np.concatenate([self.src, self.dst])
            cols = np.concatenate([self.dst, self.src])
            vals = np.concatenate([self.weight, self.weight])
        a = sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))
        a.sort_indices()
        return a

    def degrees(self) -> np.ndarray:
        """Number of incident edges per node (in + out for directed graphs)."""
        return (np.bincount(self.src, minlength=self.n)
                + np.bincount(self.dst, minlength=self.n))

    def has_edge(self, u: int, v: int) -> bool:
        if not self.directed and u > v:
            u, v = v, u
        lo = np.searchsorted(self.src, u, side="left")
        hi = np.searchsorted(self.src, u, side="right")
        j = lo + np.searchsorted(self.dst[lo:hi], v)
        return bool(j < hi and self.dst[j] == v)

    def pair_keys(self) -> np.ndarray:
        """Edges encoded as ``src * n + dst`` (sorted), for vectorized membership tests."""
        return self.src * max(self.n, 1) + self.dst


@dataclass(frozen=True)
class GraphStats:
    nodes: int
    edges: int
    positive_edges: int
    negative_edges: int
    zero_weight_edges: int


def _parse_label(token: str):
    try:
        return int(token)
    except ValueError:
        return token


def _label_sort_key(label):
    # integer labels sort numerically and before string labels
    return (0, label, "") if isinstance(label, int) else (1, 0, label)


def load_edge_list(source) -> SignedGraph:
    """Parse a SNAP/KONECT style edge list into a directed graph.

    ``source`` may be a path (``.gz`` is decompressed) or an iterable of
    lines (text or UTF-8 bytes).
    Node labels are remapped to dense ids in sorted label order, numeric
    labels sorting numerically.
    Self-loops are dropped and repeated ``(src, dst)`` lines have their
    weights summed. Tokens after the third (e.g. KONECT timestamps) are ignored.
    """
    if isinstance(source, (str, os.PathLike)):
        opener = gzip.open if str(source).endswith(".gz") else open
        with opener(source, "rt", encoding="utf-8") as fh:
            return _parse_edge_stream(fh)
    return _parse_edge_stream(source)


def _parse_edge_stream(stream: TextIO) -> SignedGraph:
    accum: dict[tuple, float] = {}
    labels: set = set()
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        stripped = line.strip()
        if not stripped or stripped[0] in "#%":
            continue
        tokens = stripped.split()
        if len(tokens) < 2:
            raise EdgeListParseError(lineno, line, "expected at least two tokens")
        if len(tokens) >= 3:
            try:
                w = float(tokens[2])
            except ValueError:
                raise EdgeListParseError(lineno, line, "non-numeric weight") from None
            if not math.isfinite(w):
                raise EdgeListParseError(lineno, line, "non-finite weight")
        else:
            w = 1.0
        a, b = _parse_label(tokens[0]), _parse_label(tokens[1])
        labels.add(a)
        labels.add(b)
        if a == b:
            continue
        accum[(a, b)] = accum.get((a, b), 0.0) + w

    ordered = sorted(labels, key=_label_sort_key)
    index = {lab: i for i, lab in enumerate(ordered)}
    src = np.fromiter((index[a] for a, _ in accum), dtype=np.int64, count=len(accum))
    dst = np.fromiter((index[b] for _, b in accum), dtype=np.int64, count=len(accum))
    w = np.fromiter(accum.values(), dtype=np.float64, count=len(accum))
    return SignedGraph(len(ordered), True, src, dst, w, tuple(ordered))


def write_edge_list(g: SignedGraph, stream: TextIO, header: str | None = None) -> None:
    """Write ``label label weight`` lines; weights use round-trip ``repr``."""
    if header is not None:
        for line in header.splitlines():
            stream.write(f"# {line}\n")
    stream.write(f"# {'directed' if g.directed else 'undirected'} n={g.n} m={g.num_edges}\n")
    labels = g.labels
    for u, v, w in g.edges():
        stream.write(f"{labels[u]} {labels[v]} {float(w)!r}\n")


def make_undirected(g: SignedGraph) -> SignedGraph:
    """Merge directions by summing weights; pairs summing to exactly 0 are dropped.

    Already-undirected input is returned unchanged.
    """
    if not g.directed:
        return g
    lo = np.minimum(g.src, g.dst)
    hi = np.maximum(g.src, g.dst)
    key = lo * max(g.n, 1) + hi
    uniq, inv = np.unique(key, return_inverse=True)
    summed = np.bincount(inv, weights=g.weight, minlength=len(uniq))
    keep = summed != 0.0
    n = max(g.n, 1)
    return SignedGraph(g.n, False, uniq[keep] // n, uniq[keep] % n, summed[keep], g.labels)


def to_skeleton(g: SignedGraph) -> SignedGraph:
    """Same nodes and edges with every weight set to +1."""
    return SignedGraph(g.n, g.directed, g.src, g.dst, np.ones(g.num_edges), g.labels)


def induced_subgraph(g: SignedGraph, nodes) -> SignedGraph:
    """Subgraph induced on ``nodes``, relabeled densely in increasing original id order."""
    keep = np.zeros(g.n, dtype=bool)
    keep[np.asarray(list(nodes), dtype=np.int64)] = True
    new_id = np.cumsum(keep) - 1
    mask = keep[g.src] & keep[g.dst]
    kept = np.flatnonzero(keep)
    labels = tuple(g.labels[i] for i in kept)
    return SignedGraph(len(kept), g.directed, new_id[g.src[mask]], new_id[g.dst[mask]],
                       g.weight[mask], labels)


def sample_subgraph(g: SignedGraph, target_nodes: int, method: str = "top-degree-induced",
                    seed: int = 0) -> SignedGraph:
    """Induced subgraph on ``target_nodes`` nodes.

    ``top-degree-induced`` keeps the highest-degree nodes (ties to the lower id)
    and ignores ``seed``. ``bfs-ball`` grows a breadth-first ball from a seeded
    random start node, visiting neighbors in id order and restarting from a new
    random unvisited node if a component is exhausted.
    """
    if not 0 < target_nodes <= g.n:
        raise ValueError(f"target_nodes must be in (0, {g.n}], got {target_nodes}")
    if method == "top-degree-induced":
        deg = g.degrees()
        order = np.lexsort((np.arange(g.n), -deg))
        return induced_subgraph(g, order[:target_nodes])
    if method == "bfs-ball":
        rng = np.random.default_rng(seed)
        a = make_undirected(to_skeleton(g)).adjacency() if g.directed else g.adjacency()
        indptr, indices = a.indptr, a.indices
        visited = np.zeros(g.n, dtype=bool)
        chosen: list[int] = []
        while len(chosen) < target_nodes:
            candidates = np.flatnonzero(~visited)
            start = int(candidates[rng.integers(len(candidates))])
            visited[start] = True
            queue = deque([start])
            while queue and len(chosen) < target_nodes:
                u = queue.popleft()
                chosen.append(u)
                for v in indices[indptr[u]:indptr[u + 1]]:
                    if not visited[v]:
                        visited[v] = True
                        queue.append(int(v))
        return induced_subgraph(g, chosen)
    raise ValueError(f"unknown sampling method {method!r}")


def stats(g: SignedGraph) -> GraphStats:
    w = g.weight
    return GraphStats(
        nodes=g.n,
        edges=g.num_edges,
        positive_edges=int(np.count_nonzero(w > 0)),
        negative_edges=int(np.count_nonzero(w < 0)),
        zero_weight_edges=int(np.count_nonzero(w == 0)),
    )


def format_stats_row(name: str, s: GraphStats) -> str:
    """LaTeX table row: ``name & nodes & edges & + edges & - edges``."""
    return " & ".join([name] + [f"{x:,}" for x in
                                (s.nodes, s.edges, s.positive_edges, s.negative_edges)])


def karate_graph() -> SignedGraph:
    """Zachary's karate club as an undirected unit-weight graph (0-based ids)."""
    text = resources.files("ggnet").joinpath("data/karate.edges").read_text(encoding="utf-8")
    return make_undirected(load_edge_list(io.StringIO(text)))


def karate_with_planted_signs(negative_node: int = 23) -> SignedGraph:
    """Karate graph where every edge touching ``negative_node`` is -1 and all others +1."""
    g = karate_graph()
    if not 0 <= negative_node < g.n:
        raise ValueError(f"node {negative_node} is not in the karate graph (0..{g.n - 1})")
    touching = (g.src == negative_node) | (g.dst == negative_node)
    return SignedGraph(g.n, False, g.src, g.dst, np.where(touching, -1.0, 1.0), g.labels)


def _random_pairs(rng: np.random.Generator, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """``m`` distinct unordered pairs drawn uniformly, sorted by ``(min, max)``."""
    if m > n * (n - 1) // 2:
        raise ValueError(f"cannot place {m} edges on {n} nodes")
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < m:
        draw = rng.integers(0, n, size=(2 * (m - len(keys)) + 16, 2))
        draw = draw[draw[:, 0] != draw[:, 1]]
        lo, hi = draw.min(axis=1), draw.max(axis=1)
        fresh = lo * n + hi
        # keep first occurrences in draw order so the result depends only on the seed
        _, first = np.unique(fresh, return_index=True)
        fresh = fresh[np.sort(first)]
        fresh = fresh[~np.isin(fresh, keys)]
        keys = np.concatenate([keys, fresh[: m - len(keys)]])
    keys.sort()
    return keys // n, keys % n


def random_signed_graph(n: int, m: int, positive_fraction: float = 0.8,
                        seed: int = 0) -> SignedGraph:
    """Undirected Erdos-Renyi style graph with ``m`` edges of independent random sign."""
    rng = np.random.default_rng(seed)
    u, v = _random_pairs(rng, n, m)
    w = np.where(rng.random(m) < positive_fraction, 1.0, -1.0)
    return SignedGraph(n, False, u, v, w)


def planted_communities(n: int = 200, avg_degree: float = 10.0, noise: float = 0.1,
                        seed: int = 0) -> SignedGraph:
    """Two equal communities: +1 inside, -1 across, each sign flipped with probability ``noise``.

    Node ``i`` belongs to community ``0`` when ``i < n // 2``.
    """
    rng = np.random.default_rng(seed)
    m = int(round(n * avg_degree / 2))
    u, v = _random_pairs(rng, n, m)
    side = np.arange(n) >= n // 2
    w = np.where(side[u] == side[v], 1.0, -1.0)
    w[rng.random(m) < noise] *= -1.0
    return SignedGraph(n, False, u, v, w)
