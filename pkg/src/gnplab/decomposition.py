"""Components, remainders, k-cores, local k-cores and the event E."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._validation import ParameterError, check_int, size_threshold


@dataclass(frozen=True)
class ComponentLabeling:
    """Component partition of a graph, possibly with some vertices excluded.

    ``comp_id[v]`` is -1 for excluded vertices (their component is empty by
    convention).  Component ids follow the order of each component's
    smallest vertex, and ``largest`` is the biggest component with ties
    going to the smaller id, or -1 when nothing is labelled.
    """

    comp_id: np.ndarray
    sizes: np.ndarray
    largest: int

    @classmethod
    def from_labels(cls, labels, sizes):
        largest = int(np.argmax(sizes)) if sizes.size else -1
        return cls(comp_id=labels, sizes=sizes, largest=largest)

    @property
    def n(self):
        return int(self.comp_id.size)

    @property
    def largest_size(self):
        return int(self.sizes[self.largest]) if self.largest >= 0 else 0

    def component_of(self, v):
        c = self.comp_id[v]
        if c < 0:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(self.comp_id == c)

    def in_largest(self):
        """Boolean mask of the designated largest component."""
        if self.largest < 0:
            return np.zeros(self.n, dtype=bool)
        return self.comp_id == self.largest

    def size_of(self, v):
        c = self.comp_id[v]
        return int(self.sizes[c]) if c >= 0 else 0

    def max_size(self, exclude_largest=False):
        if self.sizes.size == 0:
            return 0
        if not exclude_largest:
            return int(self.sizes.max())
        rest = np.delete(self.sizes, self.largest)
        return int(rest.max()) if rest.size else 0

    def histogram(self):
        """``{size: number of components}`` with int keys, ascending."""
        vals, counts = np.unique(self.sizes, return_counts=True)
        return {int(s): int(c) for s, c in zip(vals, counts)}

    def to_dict(self):
        return {
            "n": self.n,
            "components": int(self.sizes.size),
            "largest_size": self.largest_size,
            "size_histogram": {str(k): v for k, v in self.histogram().items()},
        }


def components(g):
    labels, sizes = _kernels.label_components(g.indptr, g.indices, np.ones(g.n, dtype=np.bool_))
    return ComponentLabeling.from_labels(labels, sizes)


def remainder(g, excluded):
    """Components of ``g - excluded``; excluded vertices get component -1.

    ``excluded`` may be a boolean mask of length n or a collection of ids.
    """
    alive = np.ones(g.n, dtype=np.bool_)
    ex = np.asarray(excluded)
    if ex.dtype == bool:
        if ex.shape != (g.n,):
            raise ParameterError("excluded mask has the wrong length")
        alive &= ~ex
    elif ex.size:
        ex = ex.astype(np.int64).ravel()
        if ex.min() < 0 or ex.max() >= g.n:
            raise ParameterError("excluded vertex out of range")
        alive[ex] = False
    labels, sizes = _kernels.label_components(g.indptr, g.indices, alive)
    return ComponentLabeling.from_labels(labels, sizes)


@dataclass(frozen=True)
class CoreResult:
    k: int
    in_core: np.ndarray
    peel_order: np.ndarray
    mantle_labeling: ComponentLabeling

    @property
    def core(self):
        return np.flatnonzero(self.in_core)

    @property
    def size(self):
        return int(self.in_core.sum())

    def to_dict(self):
        return {
            "k": self.k,
            "core_size": self.size,
            "mantle_max_component": self.mantle_labeling.max_size(),
            "mantle_size_histogram": self.mantle_labeling.to_dict()["size_histogram"],
        }


def kcore(g, k):
    """k-core by peeling the lowest-id vertex of degree < k at every step."""
    k = check_int(k, "k", minimum=0)
    in_core, order = _kernels.peel_kcore(g.indptr, g.indices, k)
    return CoreResult(k=k, in_core=in_core, peel_order=order,
                      mantle_labeling=remainder(g, in_core))


def verify_degenerate_ordering(g, core, order, k):
    """True iff every vertex of ``order`` has fewer than k neighbours among
    earlier vertices of ``order`` together with ``core``.

    A peeling sequence read backwards is such an ordering.
    """
    core = {int(v) for v in np.asarray(core).ravel()}
    order = [int(v) for v in np.asarray(order).ravel()]
    if core.intersection(order):
        raise ParameterError("order and core must be disjoint")
    seen = set(core)
    for v in order:
        if sum(1 for w in g.neighbors(v).tolist() if w in seen) >= k:
            return False
        seen.add(v)
    return True


@dataclass(frozen=True)
class LocalCore:
    root: int
    ell: int
    members: frozenset

    def contains_root(self):
        return self.root in self.members


def local_kcore(b, k):
    """The ell-local k-core of a ball.

    Interior vertices (distance < ell) are deleted while they have fewer than
    k surviving neighbours; boundary vertices are never deleted.  The result
    is the largest subset of the ball that contains the boundary and gives
    every interior member at least k neighbours inside it.
    """
    adj = b.local_adjacency()
    dist = b.distances
    alive = set(adj)
    deg = {v: len(nb) for v, nb in adj.items()}
    stack = [v for v in adj if dist[v] < b.ell and deg[v] < k]
    alive.difference_update(stack)
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w in alive:
                deg[w] -= 1
                if deg[w] < k and dist[w] < b.ell:
                    alive.discard(w)
                    stack.append(w)
    return LocalCore(root=b.root, ell=b.ell, members=frozenset(alive))


def local_remainder_component(b, lc):
    """Component of the root in ball minus local core (empty if root survives)."""
    if b.root in lc.members:
        return frozenset()
    adj = b.local_adjacency()
    seen = {b.root}
    stack = [b.root]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in lc.members and w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def check_event_E(labelings, n, variant="giant", threshold=None):
    """Event E on one or more labelings.

    ``giant``: exactly one component larger than ceil((ln n)^4) in each.
    ``mantle``: no component larger than that in any.
    """
    if isinstance(labelings, ComponentLabeling):
        labelings = [labelings]
    t = size_threshold(n) if threshold is None else threshold
    if variant == "giant":
        return all(int(np.count_nonzero(lab.sizes > t)) == 1 for lab in labelings)
    if variant == "mantle":
        return all(lab.max_size() <= t for lab in labelings)
    raise ParameterError(f"unknown variant {variant!r}")
