"""Compiled inner loops over CSR adjacency (``indptr``, ``indices``).

Everything here works on plain int64 arrays so the public modules can stay
object-oriented while the per-vertex work runs at native speed.  Scratch
arrays are stamped with the current root instead of being cleared, which
keeps a ball evaluation proportional to the ball, not to ``n``.
"""

import heapq

import numpy as np
from numba import njit


@njit(cache=True)
def label_components(indptr, indices, alive):
    """BFS labelling of the subgraph induced on ``alive``.

    Labels are assigned in order of each component's smallest vertex; dead
    vertices get -1.
    """
    n = indptr.shape[0] - 1
    labels = np.full(n, -1, dtype=np.int64)
    sizes = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    ncomp = 0
    for s in range(n):
        if not alive[s] or labels[s] >= 0:
            continue
        labels[s] = ncomp
        head = 0
        tail = 1
        queue[0] = s
        while head < tail:
            u = queue[head]
            head += 1
            for j in range(indptr[u], indptr[u + 1]):
                w = indices[j]
                if alive[w] and labels[w] < 0:
                    labels[w] = ncomp
                    queue[tail] = w
                    tail += 1
        sizes[ncomp] = tail
        ncomp += 1
    return labels, sizes[:ncomp].copy()


@njit(cache=True)
def peel_kcore(indptr, indices, k):
    """Delete the lowest-id vertex of current degree < k until none is left.

    Returns the core mask and the deletion order.  A vertex enters the heap
    exactly once (its degree only decreases), so the heap never holds stale
    entries.
    """
    n = indptr.shape[0] - 1
    deg = np.empty(n, dtype=np.int64)
    in_core = np.ones(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int64)
    heap = [np.int64(0) for _ in range(0)]
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
        if deg[v] < k:
            heap.append(np.int64(v))
    heapq.heapify(heap)
    cnt = 0
    while len(heap) > 0:
        v = heapq.heappop(heap)
        in_core[v] = False
        order[cnt] = v
        cnt += 1
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            if in_core[w]:
                deg[w] -= 1
                if deg[w] == k - 1:
                    heapq.heappush(heap, np.int64(w))
    return in_core, order[:cnt].copy()


@njit(cache=True)
def giant_local_phi(indptr, indices, ell, size_threshold):
    """phi_ell for the giant: 1 iff the radius-ell ball has a nonempty
    boundary or more than ``size_threshold`` vertices.

    BFS stops as soon as either condition is met.
    """
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.int8)
    stamp = np.full(n, -1, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for v in range(n):
        if ell == 0:
            out[v] = 1
            continue
        stamp[v] = v
        dist[v] = 0
        queue[0] = v
        head = 0
        tail = 1
        hit = False
        while head < tail and not hit:
            u = queue[head]
            head += 1
            du = dist[u]
            if du >= ell:
                continue
            for j in range(indptr[u], indptr[u + 1]):
                w = indices[j]
                if stamp[w] != v:
                    stamp[w] = v
                    dist[w] = du + 1
                    queue[tail] = w
                    tail += 1
                    if du + 1 == ell or tail > size_threshold:
                        hit = True
                        break
        if hit:
            out[v] = 1
    return out


@njit(cache=True)
def ball_stats(indptr, indices, ell, size_cap, stop_on_cycle):
    """Per-vertex radius-ell ball size, boundary size and tree flag.

    A ball is a tree iff its induced edge count is size - 1 (balls are
    connected by construction).  If the ball outgrows ``size_cap`` the
    search stops, size is reported as ``size_cap + 1`` and the tree flag is
    False.  With ``stop_on_cycle`` the search also stops at the first
    non-tree induced edge; size and boundary are then lower bounds.
    """
    n = indptr.shape[0] - 1
    size = np.zeros(n, dtype=np.int64)
    bsize = np.zeros(n, dtype=np.int64)
    tree = np.zeros(n, dtype=np.bool_)
    stamp = np.full(n, -1, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for v in range(n):
        stamp[v] = v
        dist[v] = 0
        parent[v] = -1
        queue[0] = v
        head = 0
        tail = 1
        capped = False
        cyc = False
        nb = 1 if ell == 0 else 0
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if du >= ell:
                continue
            for j in range(indptr[u], indptr[u + 1]):
                w = indices[j]
                if stamp[w] != v:
                    stamp[w] = v
                    dist[w] = du + 1
                    parent[w] = u
                    queue[tail] = w
                    tail += 1
                    if du + 1 == ell:
                        nb += 1
                    if tail > size_cap:
                        capped = True
                        break
                elif w != parent[u]:
                    cyc = True
                    if stop_on_cycle:
                        break
            if capped or (cyc and stop_on_cycle):
                break
        if not capped and not cyc and ell > 0:
            # edges between two boundary vertices are never scanned above
            for q in range(tail):
                u = queue[q]
                if dist[u] != ell:
                    continue
                for j in range(indptr[u], indptr[u + 1]):
                    w = indices[j]
                    if stamp[w] == v and dist[w] == ell:
                        cyc = True
                        break
                if cyc:
                    break
        size[v] = size_cap + 1 if capped else tail
        bsize[v] = nb
        tree[v] = (not capped) and (not cyc)
    return size, bsize, tree


@njit(cache=True)
def _peel_ball(indptr, indices, queue, tail, stamp, dist, root, ell, k,
               alive, deg, pinned):
    """Local k-core peeling on the ball held in ``queue[:tail]``.

    ``alive`` and ``deg`` are scratch arrays indexed by global id.  Vertices
    with ``pinned`` set (plus every boundary vertex) are never deleted.
    Returns whether the root survives.
    """
    stack = np.empty(tail, dtype=np.int64)
    top = 0
    for q in range(tail):
        u = queue[q]
        alive[u] = True
    for q in range(tail):
        u = queue[q]
        d = 0
        for j in range(indptr[u], indptr[u + 1]):
            w = indices[j]
            if stamp[w] == root:
                d += 1
        deg[u] = d
        if dist[u] < ell and not pinned[u] and d < k:
            stack[top] = u
            top += 1
            alive[u] = False
    while top > 0:
        top -= 1
        u = stack[top]
        for j in range(indptr[u], indptr[u + 1]):
            w = indices[j]
            if stamp[w] == root and alive[w]:
                deg[w] -= 1
                if deg[w] < k and dist[w] < ell and not pinned[w]:
                    alive[w] = False
                    stack[top] = w
                    top += 1
    return alive[root]


@njit(cache=True)
def core_local_phi_direct(indptr, indices, ell, k):
    """phi_ell for the k-core by full BFS and peeling of every ball."""
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.int8)
    stamp = np.full(n, -1, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    alive = np.zeros(n, dtype=np.bool_)
    deg = np.zeros(n, dtype=np.int64)
    pinned = np.zeros(n, dtype=np.bool_)
    for v in range(n):
        tail = _bfs_ball(indptr, indices, v, ell, stamp, dist, queue)
        if _peel_ball(indptr, indices, queue, tail, stamp, dist, v, ell, k,
                      alive, deg, pinned):
            out[v] = 1
    return out


@njit(cache=True)
def _bfs_ball(indptr, indices, v, ell, stamp, dist, queue):
    stamp[v] = v
    dist[v] = 0
    queue[0] = v
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        if du >= ell:
            continue
        for j in range(indptr[u], indptr[u + 1]):
            w = indices[j]
            if stamp[w] != v:
                stamp[w] = v
                dist[w] = du + 1
                queue[tail] = w
                tail += 1
    return tail


@njit(cache=True)
def core_local_phi_fast(indptr, indices, ell, k, in_core, mantle_labels):
    """phi_ell for the k-core, using the global core to skip work.

    Exact, not approximate.  Core vertices of a ball always survive local
    peeling (core plus boundary is itself a valid set), so a core root
    scores 1 and core vertices can be pinned.  A mantle root whose own
    mantle component sits entirely within distance ell - 1 scores 0: any
    survivor set S inside that component would make core + S a larger
    subgraph of minimum degree k.  Only the remaining roots get a full ball.
    """
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.int8)
    stamp = np.full(n, -1, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    cstamp = np.full(n, -1, dtype=np.int64)
    cdist = np.zeros(n, dtype=np.int64)
    cqueue = np.empty(n, dtype=np.int64)
    alive = np.zeros(n, dtype=np.bool_)
    deg = np.zeros(n, dtype=np.int64)
    for v in range(n):
        if in_core[v]:
            out[v] = 1
            continue
        if ell == 0:
            out[v] = 1
            continue
        # eccentricity of v inside its mantle component
        lab = mantle_labels[v]
        cstamp[v] = v
        cdist[v] = 0
        cqueue[0] = v
        head = 0
        tail = 1
        far = False
        while head < tail and not far:
            u = cqueue[head]
            head += 1
            for j in range(indptr[u], indptr[u + 1]):
                w = indices[j]
                if mantle_labels[w] == lab and cstamp[w] != v:
                    cstamp[w] = v
                    cdist[w] = cdist[u] + 1
                    cqueue[tail] = w
                    tail += 1
                    if cdist[w] >= ell:
                        far = True
                        break
        if not far:
            continue
        tail = _bfs_ball(indptr, indices, v, ell, stamp, dist, queue)
        if _peel_ball(indptr, indices, queue, tail, stamp, dist, v, ell, k,
                      alive, deg, in_core):
            out[v] = 1
    return out


@njit(cache=True)
def sample_pairs(n, positions):
    """Map lexicographic pair indices to (i, j) with i < j."""
    m = positions.shape[0]
    us = np.empty(m, dtype=np.int64)
    vs = np.empty(m, dtype=np.int64)
    i = 0
    start = 0
    rowlen = n - 1
    for t in range(m):
        pos = positions[t]
        while pos >= start + rowlen:
            start += rowlen
            i += 1
            rowlen -= 1
        us[t] = i
        vs[t] = i + 1 + (pos - start)
    return us, vs


@njit(cache=True)
def giant_local_phi_sized(indptr, indices, ell, size_threshold, comp_labels, comp_sizes):
    """Same values as :func:`giant_local_phi`, skipping forced cases.

    A ball lies inside its component, so in a component with more than
    ``size_threshold`` vertices the ball either reaches radius ell or is the
    whole component; either way the answer is 1.  A component with at most
    ell vertices has eccentricity < ell, so the answer is 0.
    """
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.int8)
    stamp = np.full(n, -1, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for v in range(n):
        s = comp_sizes[comp_labels[v]]
        if ell == 0 or s > size_threshold:
            out[v] = 1
            continue
        if s <= ell:
            continue
        stamp[v] = v
        dist[v] = 0
        queue[0] = v
        head = 0
        tail = 1
        hit = False
        while head < tail and not hit:
            u = queue[head]
            head += 1
            du = dist[u]
            if du >= ell:
                continue
            for j in range(indptr[u], indptr[u + 1]):
                w = indices[j]
                if stamp[w] != v:
                    stamp[w] = v
                    dist[w] = du + 1
                    queue[tail] = w
                    tail += 1
                    if du + 1 == ell:
                        hit = True
                        break
        if hit:
            out[v] = 1
    return out


@njit(cache=True)
def ball_profile(indptr, indices, max_ell, size_cap):
    """One BFS of radius ``max_ell`` per root, summarised for every radius.

    Returns ``sizes[v, r]`` = |B(v, r)| for r = 0..max_ell (capped at
    ``size_cap + 1``) and ``cycle_radius[v]``: the smallest r whose ball is
    not a tree (max_ell + 1 if none is found up to ``max_ell``).  A non-tree
    edge {a, b} first appears in the ball of radius max(dist a, dist b).
    Sizes are only filled in for radii up to ``cycle_radius[v]``.
    """
    n = indptr.shape[0] - 1
    L = max_ell
    sizes = np.zeros((n, L + 1), dtype=np.int32)
    cyc = np.full(n, L + 1, dtype=np.int32)
    stamp = np.full(n, -1, dtype=np.int32)
    dist = np.zeros(n, dtype=np.int32)
    parent = np.full(n, -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    level = np.zeros(L + 2, dtype=np.int64)
    for v in range(n):
        stamp[v] = v
        dist[v] = 0
        parent[v] = -1
        queue[0] = v
        head = 0
        tail = 1
        best = L + 1
        capped = False
        for r in range(L + 2):
            level[r] = 0
        level[0] = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if du >= L or du >= best:
                # deeper levels only matter for radii that already hold a cycle
                continue
            for j in range(indptr[u], indptr[u + 1]):
                w = indices[j]
                if stamp[w] != v:
                    stamp[w] = v
                    dist[w] = du + 1
                    parent[w] = u
                    queue[tail] = w
                    tail += 1
                    level[du + 1] += 1
                    if tail > size_cap:
                        capped = True
                        break
                elif w != parent[u]:
                    r = dist[w] if dist[w] > du else du
                    if r < best:
                        best = r
            if capped:
                break
        if not capped and best > L:
            for q in range(tail):
                u = queue[q]
                if dist[u] != L:
                    continue
                for j in range(indptr[u], indptr[u + 1]):
                    w = indices[j]
                    if stamp[w] == v and dist[w] == L:
                        best = L
                        break
                if best == L:
                    break
        acc = 0
        for r in range(L + 1):
            acc += level[r]
            sizes[v, r] = acc
        if capped:
            # levels beyond the one being filled are unknown: mark as over the cap
            filled = dist[queue[tail - 1]]
            for r in range(filled, L + 1):
                sizes[v, r] = size_cap + 1
        cyc[v] = best
    return sizes, cyc
