"""Membership indicators, their ell-local versions and neighbourhood counts.

Two families of indicators live here.  For the giant, ``phi`` marks the
largest component and ``phi_ell`` marks vertices whose ball reaches radius
ell or is larger than ceil((ln n)^4).  For the k-core, ``phi`` marks the
core and ``phi_ell`` marks roots that survive in their ell-local k-core.
Summing ``phi_ell`` over vertices gives a weighted ell-neighbourhood count;
its truncation keeps only roots whose ball is a tree with 2..t vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import reverse_cuthill_mckee

from . import _kernels
from ._validation import ParameterError, check_int, size_threshold
from .decomposition import components, kcore, local_kcore
from .graph import LocalBall, ball


def phi_giant(labeling, v):
    return int(labeling.comp_id[v] == labeling.largest and labeling.largest >= 0)


def phi_giant_local(b: LocalBall, n, threshold=None):
    t = size_threshold(n) if threshold is None else threshold
    return int(b.boundary.size > 0 or b.size > t)


def phi_core_local(b: LocalBall, k):
    return int(b.root in local_kcore(b, k).members)


@dataclass(frozen=True)
class WeightScheme:
    """A weight in [0, 1] computed from a rooted ball of radius ``ell``.

    ``evaluate`` must depend only on the rooted isomorphism class of the
    ball, never on vertex names.
    """

    ell: int
    evaluate: Callable[[LocalBall], float]

    @classmethod
    def constant(cls, ell, value=1.0):
        return cls(ell, lambda b: value)

    @classmethod
    def giant(cls, ell, n, threshold=None):
        return cls(ell, lambda b: phi_giant_local(b, n, threshold))

    @classmethod
    def core(cls, ell, k):
        return cls(ell, lambda b: phi_core_local(b, k))


@dataclass(frozen=True)
class CountPair:
    x: float
    y: float
    t: int


def default_truncation(c, ell, n):
    """t(c, ell) = ceil((4c)^ell), capped at ceil((ln n)^4)."""
    cap = size_threshold(n)
    try:
        t = math.ceil((4.0 * c) ** ell)
    except OverflowError:
        t = cap
    return int(max(2, min(t, cap)))


def weighted_count(g, scheme, t):
    """Full count X and its truncation Y, one explicit ball per vertex.

    Reference implementation; the ``truncated_*`` functions compute the same
    numbers with compiled kernels.
    """
    t = check_int(t, "t", minimum=0)
    x = 0.0
    y = 0.0
    for v in range(g.n):
        b = ball(g, v, scheme.ell)
        w = float(scheme.evaluate(b))
        if not 0.0 <= w <= 1.0:
            raise ParameterError(f"weight {w} outside [0, 1]")
        x += w
        if b.is_tree() and 2 <= b.size <= t:
            y += w
    return CountPair(x=x, y=y, t=t)


def tree_masks(g, ells, ts):
    """``{ell: mask}`` of roots whose radius-ell ball is a tree with 2..t vertices.

    One BFS per root serves every radius.  The graph is first relabelled in
    reverse Cuthill-McKee order, which only improves memory locality.
    """
    ells = [int(e) for e in ells]
    if not ells:
        return {}
    A = sp.csr_matrix((np.ones(g.indices.size, dtype=np.int8), g.indices, g.indptr),
                      shape=(g.n, g.n))
    perm = reverse_cuthill_mckee(A, symmetric_mode=True).astype(np.int64)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(g.n, dtype=np.int64)
    h = g.relabel(inv)
    sizes, cyc = _kernels.ball_profile(h.indptr, h.indices, max(ells), int(max(ts)))
    sizes = sizes[inv]
    cyc = cyc[inv]
    out = {}
    for ell, t in zip(ells, ts):
        s = sizes[:, ell]
        out[ell] = (cyc > ell) & (s >= 2) & (s <= t)
    return out


def tree_mask(g, ell, t):
    return tree_masks(g, [ell], [t])[int(ell)]


def giant_indicators(g, labeling=None):
    lab = components(g) if labeling is None else labeling
    return lab.in_largest().astype(np.int8)


def giant_local_indicators(g, ell, threshold=None, labeling=None, exact=False):
    """phi_ell for the giant at every vertex.

    ``exact=True`` searches every ball; the default first answers roots whose
    component size already decides the value (same result).
    """
    t = size_threshold(g.n) if threshold is None else threshold
    if exact:
        return _kernels.giant_local_phi(g.indptr, g.indices, int(ell), int(t))
    lab = components(g) if labeling is None else labeling
    return _kernels.giant_local_phi_sized(g.indptr, g.indices, int(ell), int(t),
                                          lab.comp_id, lab.sizes)


def core_indicators(g, k, core=None):
    res = kcore(g, k) if core is None else core
    return res.in_core.astype(np.int8)


def core_local_indicators(g, ell, k, core=None, exact=False):
    """phi_ell for the k-core at every vertex.

    ``exact=True`` peels every ball from scratch; the default reuses the
    global core to skip balls whose answer is forced (same result).
    """
    if exact:
        return _kernels.core_local_phi_direct(g.indptr, g.indices, int(ell), int(k))
    res = kcore(g, k) if core is None else core
    return _kernels.core_local_phi_fast(g.indptr, g.indices, int(ell), int(k),
                                        res.in_core, res.mantle_labeling.comp_id)


def truncated_giant(g, ell, t=None, c=None, threshold=None):
    """(Z~_ell, Z^_ell) as a CountPair."""
    if t is None:
        t = default_truncation(_mean_degree(g, c), ell, g.n)
    phi = giant_local_indicators(g, ell, threshold)
    keep = tree_mask(g, ell, t)
    return CountPair(x=int(phi.sum()), y=int(phi[keep].sum()), t=int(t))


def truncated_core(g, ell, k, t=None, c=None, core=None):
    """(Y~_ell, Y^_ell) as a CountPair."""
    if t is None:
        t = default_truncation(_mean_degree(g, c), ell, g.n)
    phi = core_local_indicators(g, ell, k, core=core)
    keep = tree_mask(g, ell, t)
    return CountPair(x=int(phi.sum()), y=int(phi[keep].sum()), t=int(t))


def _mean_degree(g, c):
    if c is not None:
        return float(c)
    return 2.0 * g.m / g.n if g.n else 0.0


CENSUS_COLUMNS = ("v", "ball_size", "boundary_size", "is_tree", "phi", "phi_ell")


def census(g, mode, ell, k=3, threshold=None):
    """Per-vertex rows ``(v, |B|, |boundary|, is_tree, phi, phi_ell)``."""
    ell = check_int(ell, "ell", minimum=0)
    size, bsize, tree = _kernels.ball_stats(g.indptr, g.indices, ell, g.n, False)
    if mode == "giant":
        phi = giant_indicators(g)
        phil = giant_local_indicators(g, ell, threshold)
    elif mode == "core":
        core = kcore(g, k)
        phi = core.in_core.astype(np.int8)
        phil = core_local_indicators(g, ell, k, core=core)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return [
        (v, int(size[v]), int(bsize[v]), int(tree[v]), int(phi[v]), int(phil[v]))
        for v in range(g.n)
    ]
