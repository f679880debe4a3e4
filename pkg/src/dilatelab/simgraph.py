"""The similarity graph on ordered point pairs, walk counts, and edge bounds.

For a point set E and ratio r the graph has vertex set E x E, and two
distinct vertices (x, x') and (y, y') are adjacent when the norm of y' - x'
is r times the norm of y - x.  Walks in this graph encode scaled walk pairs;
the module also carries the exact generic walk-count floor (2e)^k / n^(k-1)
and the two incidence double-count identities used to chain pair counts of
consecutive lengths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .configcount import Ratio, _nu_identity_scaled_walk_pairs
from .errors import TooLargeError
from .families import iter_scaled_walk_pairs
from .geometry import PointSet

# Vertex sets (|E|^2) beyond this are refused.
VERTEX_GUARD = 10**5


class SimilarityGraph:
    """Immutable wrapper around the pair graph; adjacency is evaluated on the fly.

    Vertices are index pairs (i, j) into E.  The dense adjacency matrix is
    never materialized; edge counts come from the norm-pair profile and walk
    counts from a per-step sweep grouped by squared distance.
    """

    def __init__(self, E: PointSet, ratio: Ratio):
        if len(E) ** 2 > VERTEX_GUARD:
            raise TooLargeError(f"{len(E)}^2 vertices exceed the graph guard")
        self.E = E
        self.ratio = ratio
        self.vertex_count = len(E) ** 2
        if E.prime.p_mod_4 == 3 and E.d == 2:
            # distinct points force nonzero norms here, so the edge count must
            # match half the 1-step scaled pair count
            s1 = _nu_identity_scaled_walk_pairs(E, ratio.r, 1)
            if 2 * self.edge_count() != s1:
                raise AssertionError(
                    "internal error: edge count disagrees with the pair count"
                )

    def adjacent(self, a: tuple[int, int], b: tuple[int, int]) -> bool:
        """The edge rule, evaluated on vertex index pairs."""
        if a == b:
            return False
        D = self.E.dist_table
        p = self.E.prime.p
        return D[a[1]][b[1]] == self.ratio.r * D[a[0]][b[0]] % p

    def degree_sum(self) -> int:
        counts = self.E.norm_pair_counts
        p = self.E.prime.p
        r = self.ratio.r
        ordered = sum(counts.get(r * t % p, 0) * c for t, c in counts.items())
        return ordered - self.vertex_count  # self-pairs always satisfy the rule

    def edge_count(self) -> int:
        return self.degree_sum() // 2

    def count_walks(self, k: int) -> int:
        """Sequences of k+1 vertices with consecutive vertices adjacent."""
        if k < 1:
            raise ValueError("k must be at least 1")
        E = self.E
        n = len(E)
        p = E.prime.p
        r = self.ratio.r
        D = E.dist_table
        idx = range(n)
        vec = [[1] * n for _ in idx]
        for _ in range(k):
            # colsum[x][yp] maps squared distance s to sum(vec[x][y], dist(y, yp) = s)
            colsum = [[{} for _ in idx] for _ in idx]
            for x in idx:
                vx = vec[x]
                cs = colsum[x]
                for y in idx:
                    c = vx[y]
                    if not c:
                        continue
                    row = D[y]
                    for yp in idx:
                        bucket = cs[yp]
                        s = row[yp]
                        bucket[s] = bucket.get(s, 0) + c
            nxt = [[0] * n for _ in idx]
            for xp in idx:
                row = D[xp]
                out = nxt[xp]
                for x in idx:
                    s = r * row[x] % p
                    cs = colsum[x]
                    for yp in idx:
                        v = cs[yp].get(s)
                        if v:
                            out[yp] += v
                # remove the stationary step (the rule excludes equal vertices)
                for yp in idx:
                    out[yp] -= vec[xp][yp]
            vec = nxt
        return sum(map(sum, vec))

    def edges_direct(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """All edges by scanning vertex pairs; for small cross-checks only."""
        n = len(self.E)
        vertices = [(i, j) for i in range(n) for j in range(n)]
        out = []
        for a_pos, a in enumerate(vertices):
            for b in vertices[a_pos + 1 :]:
                if self.adjacent(a, b):
                    out.append((a, b))
        return out

    def export_edges(self, path) -> None:
        """Write the edge list as `u v` lines, vertices as `x1,..|x1',..`."""
        pts = self.E.points

        def label(vertex):
            first = ",".join(str(c) for c in pts[vertex[0]])
            second = ",".join(str(c) for c in pts[vertex[1]])
            return f"{first}|{second}"

        with open(path, "w", encoding="utf-8") as fh:
            for a, b in self.edges_direct():
                fh.write(f"{label(a)} {label(b)}\n")


def build_similarity_graph(E: PointSet, ratio: Ratio) -> SimilarityGraph:
    return SimilarityGraph(E, ratio)


def ms_lower_bound(n: int, e: int, k: int) -> Fraction:
    """The generic walk-count floor (2e)^k / n^(k-1) for n-vertex simple graphs."""
    if n < 1:
        raise ValueError("the graph needs at least one vertex")
    return Fraction((2 * e) ** k, n ** (k - 1))


@dataclass(frozen=True)
class IncidenceChecks:
    """Both incidence double counts, each with its convexity floor.

    pair_side_square_sum counts incidences of 1-step pairs on their two
    anchor pairs; it must equal four times the 2-step pair count.
    corner_square_sum counts 2-step pairs sharing their outer corners; it
    must equal the 4-cycle pair count.
    """

    pair_side_square_sum: int
    four_times_s2: int
    pair_floor: Fraction
    corner_square_sum: int
    c_count: int
    corner_floor: Fraction

    @property
    def holds(self) -> bool:
        return (
            self.pair_side_square_sum == self.four_times_s2
            and self.corner_square_sum == self.c_count
            and Fraction(self.pair_side_square_sum) >= self.pair_floor
            and Fraction(self.corner_square_sum) >= self.corner_floor
        )


def check_incidence_double_counts(E: PointSet, ratio: Ratio) -> IncidenceChecks:
    """Evaluate both double-count identities on concrete tuples.

    The left sides attach each enumerated 1-step (resp. 2-step) scaled pair
    to its anchor vertices and square the resulting degrees; the right sides
    are independent pair counts.
    """
    from .configcount import count_scaled_cycle_pairs

    r = ratio.r
    n = len(E)

    # degrees of anchor vertices (x, y) under 1-step pairs
    degree: dict[tuple[int, int], int] = {}
    s1_size = 0
    for (x1, x2), (y1, y2) in iter_scaled_walk_pairs(E, r, 1):
        s1_size += 1
        degree[(x1, y1)] = degree.get((x1, y1), 0) + 1
        degree[(x2, y2)] = degree.get((x2, y2), 0) + 1
    pair_side_square_sum = sum(v * v for v in degree.values())

    s2_size = sum(1 for _ in iter_scaled_walk_pairs(E, r, 2))
    pair_floor = Fraction((2 * s1_size) ** 2, n**2)

    # degrees of outer-corner 4-tuples under 2-step pairs
    corner: dict[tuple, int] = {}
    for (x1, x2, x3), (y1, y2, y3) in iter_scaled_walk_pairs(E, r, 2):
        key = (x1, x3, y1, y3)
        corner[key] = corner.get(key, 0) + 1
    corner_square_sum = sum(v * v for v in corner.values())
    corner_floor = Fraction(s2_size**2, n**4)

    c_count = count_scaled_cycle_pairs(E, ratio, "brute").value

    return IncidenceChecks(
        pair_side_square_sum=pair_side_square_sum,
        four_times_s2=4 * s2_size,
        pair_floor=pair_floor,
        corner_square_sum=corner_square_sum,
        c_count=c_count,
        corner_floor=corner_floor,
    )


def pair_collapse_fibers(E: PointSet, ratio: Ratio) -> dict[tuple, int]:
    """Fibers of the canonical collapse of incidence triples onto 2-step pairs.

    An incidence triple is (u, u', v) with u and u' 1-step pairs both touching
    the anchor v; gluing them along v yields a 2-step pair.  Every 2-step pair
    must arise from exactly four triples.
    """
    r = ratio.r
    ones = list(iter_scaled_walk_pairs(E, r, 1))
    touching: dict[tuple[int, int], list[tuple]] = {}
    for (x1, x2), (y1, y2) in ones:
        tup = (x1, x2, y1, y2)
        touching.setdefault((x1, y1), []).append(tup)
        touching.setdefault((x2, y2), []).append(tup)

    fibers: dict[tuple, int] = {}
    for v, incident in touching.items():
        vx, vy = v
        for a, b, a2, b2 in incident:
            # the end of the first pair not glued to the anchor
            nx, ny = (b, b2) if (a, a2) == v else (a, a2)
            for c, d, c2, d2 in incident:
                mx, my = (d, d2) if (c, c2) == v else (c, c2)
                image = (nx, vx, mx, ny, vy, my)
                fibers[image] = fibers.get(image, 0) + 1
    return fibers
