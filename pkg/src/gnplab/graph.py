"""Sparse simple graphs, G(n, p) sampling, coupled pairs and rooted balls."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from ._kernels import sample_pairs
from ._validation import ParameterError, check_probability


class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    Stored in CSR form: the neighbours of ``v`` are
    ``indices[indptr[v]:indptr[v + 1]]``, sorted ascending.
    """

    def __init__(self, n, indptr, indices):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False

    @classmethod
    def from_edges(cls, n, edges):
        """Build from an iterable / array of vertex pairs.

        Raises ParameterError on self-loops, duplicates or out-of-range ids.
        """
        n = int(n)
        if n < 0:
            raise ParameterError(f"vertex count must be >= 0, got {n}")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ParameterError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ParameterError("self-loops are not allowed")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key = lo * max(n, 1) + hi
        if np.unique(key).size != key.size:
            raise ParameterError("duplicate edges are not allowed")
        return cls._from_pairs(n, lo, hi)

    @classmethod
    def _from_pairs(cls, n, lo, hi):
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, indptr, dst[order])

    @classmethod
    def empty(cls, n):
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @property
    def m(self):
        return int(self.indices.shape[0] // 2)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adj(self):
        return [self.neighbors(v) for v in range(self.n)]

    def degree(self, v=None):
        d = np.diff(self.indptr)
        return d if v is None else int(d[v])

    def has_edge(self, u, v):
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def edges(self):
        """(m, 2) array of edges ``u < v`` in lexicographic order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def with_edge(self, u, v):
        if u == v:
            raise ParameterError("self-loops are not allowed")
        if self.has_edge(u, v):
            return self
        e = np.vstack([self.edges(), [[min(u, v), max(u, v)]]])
        return Graph._from_pairs(self.n, e[:, 0], e[:, 1])

    def without_edge(self, u, v):
        if not self.has_edge(u, v):
            return self
        e = self.edges()
        keep = ~((e[:, 0] == min(u, v)) & (e[:, 1] == max(u, v)))
        return Graph._from_pairs(self.n, e[keep, 0], e[keep, 1])

    def subgraph_mask(self, alive):
        """Graph on the same vertex ids keeping only edges inside ``alive``."""
        alive = np.asarray(alive, dtype=bool)
        e = self.edges()
        keep = alive[e[:, 0]] & alive[e[:, 1]]
        return Graph._from_pairs(self.n, e[keep, 0], e[keep, 1])

    def relabel(self, perm):
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        e = perm[self.edges()]
        return Graph._from_pairs(self.n, e.min(axis=1), e.max(axis=1))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def check_invariants(self):
        """Raise AssertionError if the adjacency is not a simple undirected graph."""
        for v in range(self.n):
            nb = self.neighbors(v)
            assert np.all(np.diff(nb) > 0), f"unsorted or duplicate neighbours at {v}"
            assert not np.any(nb == v), f"self-loop at {v}"
        e = self.edges()
        rev = Graph._from_pairs(self.n, e[:, 0], e[:, 1])
        assert rev == self, "adjacency is not symmetric"
        assert 2 * self.m == self.indices.shape[0]


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream for one trial.

    The generator is PCG64 seeded by
    ``SeedSequence(seed, spawn_key=(*key, index))``.  SeedSequence hashes
    the whole tuple, so streams for different indices (or experiment keys,
    e.g. the vertex count of a sweep) are independent and any single trial
    can be regenerated in isolation.
    """

    seed: int
    index: int = 0
    key: tuple = ()

    def generator(self):
        spawn = tuple(int(x) for x in self.key) + (int(self.index),)
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=spawn)
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_gnp(n, p, rng):
    """Sample G(n, p) by geometric skipping over pairs in lexicographic order.

    Cost is O(n + m) in expectation rather than O(n^2).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    p = check_probability(p)
    gen = _as_generator(rng)
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph.empty(n)
    if p == 1.0:
        positions = np.arange(total, dtype=np.int64)
    else:
        chunks = []
        last = -1
        batch = max(16, int(total * p + 6 * math.sqrt(total * p) + 16))
        while True:
            gaps = gen.geometric(p, size=batch).astype(np.int64)
            pos = last + np.cumsum(gaps)
            if pos[-1] >= total:
                chunks.append(pos[pos < total])
                break
            chunks.append(pos)
            last = int(pos[-1])
            batch = max(16, batch // 4)
        positions = np.concatenate(chunks)
    us, vs = sample_pairs(n, positions)
    return Graph._from_pairs(n, us, vs)


@dataclass(frozen=True)
class CoupledPair:
    """G- = base (without f) and G+ = base + f."""

    base: Graph
    f: tuple
    f_was_edge: bool = False

    @property
    def minus(self):
        return self.base

    @cached_property
    def plus(self):
        return self.base.with_edge(*self.f)


def make_coupled_pair(g, rng=None, random_pair=False):
    """Couple ``g`` at the pair f.

    f is {0, 1} unless ``random_pair`` is set, in which case it is drawn
    uniformly from ``rng``.  Whether f was an edge of ``g`` is recorded for
    diagnostics only.
    """
    if g.n < 2:
        raise ParameterError("coupled pair needs at least 2 vertices")
    if random_pair:
        gen = _as_generator(rng)
        u, v = (int(x) for x in gen.choice(g.n, size=2, replace=False))
        f = (min(u, v), max(u, v))
    else:
        f = (0, 1)
    was = g.has_edge(*f)
    return CoupledPair(base=g.without_edge(*f), f=f, f_was_edge=was)


@dataclass(frozen=True)
class LocalBall:
    """Induced subgraph on the radius-``ell`` ball around ``root``.

    ``members`` are global vertex ids in BFS order (root first) and ``dist``
    their distances; ``edges`` are induced edges as global-id pairs.
    """

    root: int
    ell: int
    members: np.ndarray
    dist: np.ndarray
    edges: np.ndarray = field(repr=False)

    @property
    def size(self):
        return int(self.members.size)

    @property
    def boundary(self):
        return self.members[self.dist == self.ell]

    @property
    def distances(self):
        return dict(zip(self.members.tolist(), self.dist.tolist()))

    def is_tree(self):
        return self.edges.shape[0] == self.size - 1

    def local_adjacency(self):
        """Dict ``vertex -> set of neighbours`` inside the ball."""
        adj = {int(v): set() for v in self.members}
        for a, b in self.edges.tolist():
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def relabelled(self):
        """Ball as a standalone Graph on ``0..size-1`` (root is 0)."""
        pos = {int(v): i for i, v in enumerate(self.members)}
        e = [(pos[a], pos[b]) for a, b in self.edges.tolist()]
        return Graph.from_edges(self.size, e)


def ball(g, v, ell):
    """BFS ball of radius ``ell`` around ``v`` with its induced edges."""
    if not 0 <= v < g.n:
        raise ParameterError(f"vertex {v} out of range")
    if ell < 0:
        raise ParameterError("radius must be >= 0")
    dist = {v: 0}
    order = [v]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        if dist[u] >= ell:
            continue
        for w in g.neighbors(u).tolist():
            if w not in dist:
                dist[w] = dist[u] + 1
                order.append(w)
    members = np.array(order, dtype=np.int64)
    inside = set(order)
    edges = [(u, w) for u in order for w in g.neighbors(u).tolist() if u < w and w in inside]
    edges.sort()
    return LocalBall(
        root=int(v),
        ell=int(ell),
        members=members,
        dist=np.array([dist[u] for u in order], dtype=np.int64),
        edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
    )


def write_edgelist(g, path, meta_line=None):
    """Write ``n m`` header then one ``u v`` line per edge.

    An optional leading ``#`` comment line carries run metadata.
    """
    lines = []
    if meta_line is not None:
        lines.append("# " + meta_line)
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges().tolist())
    text = "\n".join(lines) + "\n"
    if path is None:
        return text
    Path(path).write_text(text)
    return text


def read_edgelist(path):
    rows = [ln.split() for ln in Path(path).read_text().splitlines()
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ParameterError(f"{path}: empty edge list")
    n, m = (int(x) for x in rows[0])
    edges = [(int(a), int(b)) for a, b in rows[1:]]
    if len(edges) != m:
        raise ParameterError(f"{path}: header says {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)
