import zlib
from itertools import combinations

import numpy as np
import pytest

from gnplab import ParameterError
from gnplab import _kernels
from gnplab._validation import size_threshold
from gnplab.decomposition import components, kcore
from gnplab.graph import Graph, RngStream, ball, sample_gnp
from gnplab.local import (CENSUS_COLUMNS, WeightScheme, census, core_local_indicators,
                          default_truncation, giant_indicators, giant_local_indicators,
                          phi_core_local, phi_giant, phi_giant_local, tree_mask,
                          truncated_core, truncated_giant, weighted_count)

from oracles import ahu_code


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n):
    return Graph.from_edges(n, list(combinations(range(n), 2)))


def shuffled(g, rng):
    perm = rng.permutation(g.n)
    return g.relabel(perm), perm


def ahu_weight(b):
    """Isomorphism-invariant weight: hashed AHU code on trees, edge density otherwise."""
    if b.is_tree():
        code = ahu_code(b.local_adjacency(), b.root)
        return (zlib.crc32(code.encode()) % 1000) / 999.0
    return b.edges.shape[0] / (b.size * (b.size - 1) / 2)


class TestPhiGiant:
    def test_connected(self):
        g = path(6)
        assert giant_indicators(g).sum() == 6

    def test_empty_graph(self):
        lab = components(Graph.empty(4))
        assert sum(phi_giant(lab, v) for v in range(4)) == 1

    def test_two_components(self):
        g = Graph.from_edges(10, [(i, i + 1) for i in range(6)] + [(7, 8), (8, 9)])
        assert giant_indicators(g).sum() == 7

    def test_local_isolated(self):
        assert phi_giant_local(ball(Graph.empty(3), 0, 2), 3) == 0

    def test_local_long_path(self):
        g = path(11)
        assert phi_giant_local(ball(g, 5, 3), 11) == 1

    def test_local_small_component(self):
        # a 3-vertex path next to a long path; with ell = 4 the small one has no boundary
        g = Graph.from_edges(23, [(i, i + 1) for i in range(19)] + [(20, 21), (21, 22)])
        lab = components(g)
        for v in (20, 21, 22):
            b = ball(g, v, 4)
            assert phi_giant_local(b, g.n) == 0 == phi_giant(lab, v)

    def test_size_clause(self):
        g = complete(6)
        assert phi_giant_local(ball(g, 0, 2), 6, threshold=5) == 1
        assert phi_giant_local(ball(g, 0, 2), 6, threshold=6) == 0


class TestPhiCore:
    def test_k4_inside(self):
        assert phi_core_local(ball(complete(4), 0, 3), 3) == 1

    def test_isolated(self):
        assert phi_core_local(ball(Graph.empty(2), 0, 2), 3) == 0

    def test_low_degree_root(self):
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (1, 3), (3, 4)])
        assert phi_core_local(ball(g, 0, 4), 2) == 0


class TestWeightedCount:
    def test_constant(self):
        g = sample_gnp(60, 0.05, RngStream(0).generator())
        assert weighted_count(g, WeightScheme.constant(2), 10).x == 60

    def test_single_edge(self):
        cp = weighted_count(path(2), WeightScheme.giant(1, 2), 2)
        assert cp.x == cp.y == 2

    def test_triangle(self):
        cp = weighted_count(complete(3), WeightScheme.constant(1, 0.5), 10)
        assert cp.y == 0 and cp.x == 1.5

    def test_weight_range(self):
        with pytest.raises(ParameterError):
            weighted_count(path(3), WeightScheme.constant(1, 2.0), 5)

    def test_empty_truncations(self):
        g = Graph.empty(5)
        assert truncated_giant(g, 2, t=4).x == truncated_giant(g, 2, t=4).y == 0
        assert truncated_core(g, 2, 3, t=4).x == 0

    def test_path3(self):
        cp = truncated_giant(path(3), 1, t=3, threshold=size_threshold(3))
        assert (cp.x, cp.y) == (3, 3)

    def test_kernels_match_reference(self):
        rng = np.random.default_rng(1)
        for i in range(40):
            n = int(rng.integers(5, 120))
            g = sample_gnp(n, float(rng.uniform(0.5, 5)) / n, rng)
            ell = int(rng.integers(1, 5))
            t = int(rng.integers(2, 40))
            thr = int(rng.integers(2, 30))
            a = weighted_count(g, WeightScheme.giant(ell, n, thr), t)
            b = truncated_giant(g, ell, t=t, threshold=thr)
            assert (a.x, a.y) == (b.x, b.y)
            k = int(rng.integers(2, 5))
            a = weighted_count(g, WeightScheme.core(ell, k), t)
            b = truncated_core(g, ell, k, t=t)
            assert (a.x, a.y) == (b.x, b.y)

    def test_y_le_x(self):
        for i in range(10):
            g = sample_gnp(2000, 2.0 / 2000, RngStream(2, i).generator())
            for ell in (1, 3, 5):
                cp = truncated_giant(g, ell, c=2.0)
                assert 0 <= cp.y <= cp.x <= g.n

    def test_default_truncation(self):
        assert default_truncation(2.0, 2, 10**5) == 64
        assert default_truncation(2.0, 6, 10**5) == size_threshold(10**5)
        assert default_truncation(50.0, 400, 10**5) == size_threshold(10**5)


class TestInvariance:
    def test_ahu_weight_relabelling(self):
        rng = np.random.default_rng(3)
        for i in range(25):
            n = int(rng.integers(10, 80))
            g = sample_gnp(n, float(rng.uniform(0.8, 3)) / n, rng)
            h, _ = shuffled(g, rng)
            for ell in (1, 2, 3):
                s = WeightScheme(ell, ahu_weight)
                a, b = weighted_count(g, s, 12), weighted_count(h, s, 12)
                assert a.x == pytest.approx(b.x, abs=1e-9)
                assert a.y == pytest.approx(b.y, abs=1e-9)

    def test_ahu_distinguishes(self):
        star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        p = path(4)
        assert ahu_code(ball(star, 0, 3).local_adjacency(), 0) != \
            ahu_code(ball(p, 0, 3).local_adjacency(), 0)
        assert ahu_code(ball(p, 0, 3).local_adjacency(), 0) == \
            ahu_code(ball(p, 3, 3).local_adjacency(), 3)

    def test_truncated_counts_relabelling(self):
        rng = np.random.default_rng(4)
        for i in range(10):
            g = sample_gnp(3000, 2.5 / 3000, rng)
            h, perm = shuffled(g, rng)
            for ell in (2, 4):
                assert truncated_giant(g, ell, c=2.5) == truncated_giant(h, ell, c=2.5)
                assert truncated_core(g, ell, 2, c=2.5) == truncated_core(h, ell, 2, c=2.5)
            phi_g = giant_local_indicators(g, 3)
            phi_h = giant_local_indicators(h, 3)
            assert np.array_equal(phi_h[perm], phi_g)

    def test_locality_component_only(self):
        rng = np.random.default_rng(5)
        for i in range(5):
            g = sample_gnp(1500, 1.5 / 1500, rng)
            lab = components(g)
            for v in rng.choice(g.n, 40, replace=False).tolist():
                comp = lab.component_of(v)
                sub = g.subgraph_mask(np.isin(np.arange(g.n), comp))
                for ell in (1, 3, 6):
                    assert phi_giant_local(ball(g, v, ell), g.n) == \
                        phi_giant_local(ball(sub, v, ell), g.n)
                    assert phi_core_local(ball(g, v, ell), 2) == \
                        phi_core_local(ball(sub, v, ell), 2)


class TestKernels:
    @pytest.mark.parametrize("c", [0.7, 1.5, 3.0])
    def test_giant_fast_equals_direct(self, c):
        for i in range(6):
            g = sample_gnp(4000, c / 4000, RngStream(6, i).generator())
            for ell in (1, 2, 5, 9):
                for thr in (5, 60, size_threshold(g.n)):
                    a = giant_local_indicators(g, ell, thr, exact=True)
                    b = giant_local_indicators(g, ell, thr)
                    assert np.array_equal(a, b)

    @pytest.mark.parametrize("c", [3.0, 5.0, 8.0])
    def test_core_fast_equals_direct(self, c):
        for i in range(4):
            g = sample_gnp(3000, c / 3000, RngStream(7, i).generator())
            for k in (2, 3, 4):
                for ell in (1, 2, 4):
                    a = core_local_indicators(g, ell, k, exact=True)
                    b = core_local_indicators(g, ell, k)
                    assert np.array_equal(a, b)

    def test_direct_matches_python(self):
        rng = np.random.default_rng(8)
        for i in range(30):
            n = int(rng.integers(5, 80))
            g = sample_gnp(n, float(rng.uniform(1, 6)) / n, rng)
            ell = int(rng.integers(1, 4))
            k = int(rng.integers(2, 4))
            thr = int(rng.integers(3, 20))
            gl = giant_local_indicators(g, ell, thr, exact=True)
            cl = core_local_indicators(g, ell, k, exact=True)
            for v in range(n):
                b = ball(g, v, ell)
                assert gl[v] == phi_giant_local(b, n, thr)
                assert cl[v] == phi_core_local(b, k)

    def test_tree_mask_matches_balls(self):
        g = sample_gnp(3000, 2.0 / 3000, RngStream(9).generator())
        rng = np.random.default_rng(9)
        for ell, t in ((1, 3), (3, 20), (6, 200)):
            mask = tree_mask(g, ell, t)
            for v in rng.choice(g.n, 300, replace=False).tolist():
                b = ball(g, v, ell)
                assert mask[v] == (b.is_tree() and 2 <= b.size <= t)

    def test_ball_stats(self):
        g = sample_gnp(500, 3.0 / 500, RngStream(10).generator())
        size, bsize, tree = _kernels.ball_stats(g.indptr, g.indices, 3, g.n, False)
        for v in range(0, 500, 7):
            b = ball(g, v, 3)
            assert (size[v], bsize[v], bool(tree[v])) == (b.size, b.boundary.size, b.is_tree())


class TestGiantErrorSide:
    def test_giant_members_have_phi_ell(self):
        for i in range(4):
            g = sample_gnp(20_000, 2.0 / 20_000, RngStream(11, i).generator())
            lab = components(g)
            big = lab.in_largest()
            assert lab.largest_size > size_threshold(g.n)
            for ell in (1, 3, 6):
                phil = giant_local_indicators(g, ell, labeling=lab)
                assert np.all(phil[big] == 1)

    def test_error_set_shrinks(self):
        g = sample_gnp(20_000, 1.8 / 20_000, RngStream(12).generator())
        lab = components(g)
        phi = giant_indicators(g, lab)
        prev = None
        for ell in range(1, 10):
            err = giant_local_indicators(g, ell, labeling=lab) != phi
            if prev is not None:
                assert not np.any(err & ~prev)
            prev = err


class TestCensus:
    def test_rows(self):
        g = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 4)])
        rows = census(g, "core", 1, k=2)
        assert len(CENSUS_COLUMNS) == 6
        assert rows[0] == (0, 3, 2, 0, 1, 1)
        assert rows[3] == (3, 2, 1, 1, 0, 0)
        rows = census(g, "giant", 2)
        assert rows[4][4] == 0 and rows[0][4] == 1

    def test_bad_mode(self):
        with pytest.raises(ParameterError):
            census(path(3), "nope", 1)


@pytest.mark.slow
def test_z_minus_z_tilde_decreases(giant_sweep):
    """Sample variance of Z - Z~_ell falls as ell grows (n = 1e5, c = 2)."""
    v = [r["var_z_minus_z_tilde_over_n"] for r in giant_sweep.approx(100_000)]
    assert v[0] > v[1] > v[2]


@pytest.mark.slow
def test_truncation_variance_decreases(giant_sweep):
    """Var(Z~_ell - Z^_ell)/n falls as ell grows over 2, 4, 6 at n = 1e5."""
    v = [r["var_z_tilde_minus_z_hat_over_n"] for r in giant_sweep.approx(100_000)]
    assert v[0] > v[1] > v[2], v
