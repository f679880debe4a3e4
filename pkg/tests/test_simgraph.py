"""Similarity graph walks, the generic walk floor, and double-count identities."""

import itertools
from fractions import Fraction

import pytest

from dilatelab.configcount import count_scaled_walk_pairs, make_ratio
from dilatelab.errors import TooLargeError
from dilatelab.families import iter_scaled_walk_pairs
from dilatelab.field import make_prime
from dilatelab.geometry import PointSet, random_point_set
from dilatelab.simgraph import (
    SimilarityGraph,
    build_similarity_graph,
    check_incidence_double_counts,
    ms_lower_bound,
    pair_collapse_fibers,
)

SEVEN = make_prime(7)
TWO_POINT = PointSet(SEVEN, 2, [(0, 0), (1, 0)])


def walk_count_by_matrix(adj, k):
    """Walks of length k in an adjacency-matrix graph, by repeated products."""
    n = len(adj)
    vec = [1] * n
    for _ in range(k):
        vec = [sum(vec[i] for i in range(n) if adj[i][j]) for j in range(n)]
    return sum(vec)


def test_two_point_graph_shape():
    g = build_similarity_graph(TWO_POINT, make_ratio(1, SEVEN))
    assert g.vertex_count == 4
    edges = g.edges_direct()
    assert len(edges) == 2 == g.edge_count()
    # the two edges pair equal-coordinates with equal and swapped with swapped
    assert sorted(edges) == [(((0, 0)), (1, 1)), ((0, 1), (1, 0))]


def test_single_point_graph():
    g = build_similarity_graph(PointSet(SEVEN, 2, [(5, 5)]), make_ratio(2, SEVEN))
    assert g.vertex_count == 1
    assert g.edge_count() == 0
    assert g.count_walks(2) == 0


@pytest.mark.parametrize("p", [7, 11])
def test_edge_count_is_half_pair_count(p):
    prime = make_prime(p)
    for seed in range(5):
        E = random_point_set(prime, 2, 5 + seed, seed)
        for r in (1, 2, p - 1):
            ratio = make_ratio(r, prime)
            g = build_similarity_graph(E, ratio)
            s1 = count_scaled_walk_pairs(E, ratio, 1, "walk_dp").value
            assert g.edge_count() * 2 == s1
            assert len(g.edges_direct()) == g.edge_count()


def test_two_point_walks():
    g = build_similarity_graph(TWO_POINT, make_ratio(1, SEVEN))
    assert g.count_walks(1) == 2 * g.edge_count()
    assert g.count_walks(2) == 4  # degrees are all one


@pytest.mark.parametrize("p", [3, 7, 11])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_walks_equal_scaled_pairs(p, k):
    # p = 3 (mod 4): graph walks coincide with the scaled walk-pair count
    prime = make_prime(p)
    for seed in range(3):
        E = random_point_set(prime, 2, min(6, p * p - 1), seed)
        for r in (1, p - 1):
            ratio = make_ratio(r, prime)
            g = build_similarity_graph(E, ratio)
            assert g.count_walks(k) == count_scaled_walk_pairs(E, ratio, k, "walk_dp").value


def test_walks_equal_scaled_pairs_at_scale():
    # the equivalence also holds on a 225-vertex graph
    E = random_point_set(SEVEN, 2, 15, seed=15)
    for r in (1, 5):
        ratio = make_ratio(r, SEVEN)
        g = build_similarity_graph(E, ratio)
        for k in (2, 3):
            assert g.count_walks(k) == count_scaled_walk_pairs(E, ratio, k, "walk_dp").value


def test_walks_match_matrix_power_oracle():
    prime = make_prime(13)  # includes null segments; graph rule still total
    E = PointSet(prime, 2, [(0, 0), (5, 1), (2, 3), (1, 1)])
    ratio = make_ratio(2, prime)
    g = build_similarity_graph(E, ratio)
    n = len(E) ** 2
    vertices = [(i, j) for i in range(len(E)) for j in range(len(E))]
    adj = [[g.adjacent(a, b) for b in vertices] for a in vertices]
    for k in (1, 2, 3):
        assert g.count_walks(k) == walk_count_by_matrix(adj, k)


def test_graph_guard():
    big = random_point_set(make_prime(11), 2, 100, seed=0)
    E = PointSet(make_prime(331), 2, [(i, 0) for i in range(331)])
    with pytest.raises(TooLargeError):
        SimilarityGraph(E, make_ratio(1, make_prime(331)))
    assert len(big) == 100  # guard boundary: 100^2 = 10^4 vertices is fine
    build_similarity_graph(big, make_ratio(1, make_prime(11)))


def test_ms_bound_examples():
    assert ms_lower_bound(3, 3, 2) == 12  # triangle, tight
    assert ms_lower_bound(5, 0, 3) == 0
    assert ms_lower_bound(4, 2, 2) == 4


def test_ms_bound_on_all_five_vertex_graphs():
    """Walk count >= (2e)^k / n^(k-1) on every 5-vertex graph; tight iff regular."""
    n = 5
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        adj = [[0] * n for _ in range(n)]
        e = 0
        for bit, (i, j) in enumerate(pairs):
            if mask >> bit & 1:
                adj[i][j] = adj[j][i] = 1
                e += 1
        degrees = [sum(row) for row in adj]
        regular = len(set(degrees)) == 1
        for k in (2, 3, 4):
            walks = walk_count_by_matrix(adj, k)
            bound = ms_lower_bound(n, e, k)
            assert Fraction(walks) >= bound
            assert (Fraction(walks) == bound) == regular


def test_ms_bound_on_two_point_graph():
    g = build_similarity_graph(TWO_POINT, make_ratio(1, SEVEN))
    walks = g.count_walks(2)
    assert Fraction(walks) >= ms_lower_bound(g.vertex_count, g.edge_count(), 2)
    assert walks == 4 and ms_lower_bound(4, 2, 2) == 4


@pytest.mark.parametrize("p", [7, 11])
def test_walk_floor_from_edge_count(p):
    # |S_k| is at least |S_1|^k / |E|^(2k-2) when walks and pairs coincide
    prime = make_prime(p)
    for seed in range(5):
        E = random_point_set(prime, 2, 6 + seed % 3, seed)
        for r in (1, 2, p - 1):
            ratio = make_ratio(r, prime)
            s1 = count_scaled_walk_pairs(E, ratio, 1, "walk_dp").value
            for k in (2, 3):
                sk = count_scaled_walk_pairs(E, ratio, k, "walk_dp").value
                assert Fraction(sk) >= Fraction(s1**k, len(E) ** (2 * k - 2))


def test_double_counts_two_point():
    checks = check_incidence_double_counts(TWO_POINT, make_ratio(1, SEVEN))
    assert checks.pair_side_square_sum == 16 == checks.four_times_s2
    assert checks.holds


def test_double_counts_single_point():
    checks = check_incidence_double_counts(PointSet(SEVEN, 2, [(0, 0)]), make_ratio(1, SEVEN))
    assert checks.pair_side_square_sum == 0 == checks.four_times_s2
    assert checks.corner_square_sum == 0 == checks.c_count
    assert checks.holds


@pytest.mark.parametrize("p", [3, 7])
def test_double_counts_random(p):
    prime = make_prime(p)
    for seed in range(5):
        E = random_point_set(prime, 2, 5, seed)
        for r in (1, p - 1):
            assert check_incidence_double_counts(E, make_ratio(r, prime)).holds


def test_double_counts_with_null_segments():
    # the two identities are residue-free; check one p = 1 (mod 4) instance
    thirteen = make_prime(13)
    E = PointSet(thirteen, 2, [(0, 0), (5, 1), (2, 3), (1, 1)])
    assert check_incidence_double_counts(E, make_ratio(2, thirteen)).holds


def test_edge_list_export(tmp_path):
    g = build_similarity_graph(TWO_POINT, make_ratio(1, SEVEN))
    path = tmp_path / "edges.txt"
    g.export_edges(path)
    lines = sorted(path.read_text().splitlines())
    assert lines == ["0,0|0,0 1,0|1,0", "0,0|1,0 1,0|0,0"]


@pytest.mark.parametrize("p", [3, 7])
def test_collapse_fibers_are_exactly_four(p):
    prime = make_prime(p)
    for seed in range(3):
        E = random_point_set(prime, 2, 5, seed)
        for r in (1, 2):
            ratio = make_ratio(r, prime)
            fibers = pair_collapse_fibers(E, ratio)
            targets = {xs + ys for xs, ys in iter_scaled_walk_pairs(E, r, 2)}
            assert set(fibers) == targets
            assert all(v == 4 for v in fibers.values())
