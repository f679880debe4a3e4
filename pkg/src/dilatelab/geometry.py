"""Point sets in (Z/pZ)^d, the quadratic norm, spheres, and distance sets.

A point is a plain tuple of canonical coordinates.  The "norm" is the sum of
squared coordinates mod p; it is not a metric, but it is invariant under the
orthogonal matrices of :mod:`dilatelab.orthogonal` and is the distance notion
every counting routine in this package is built on.
"""

from __future__ import annotations

import itertools
import random
from functools import cached_property

from .errors import (
    DimensionMismatchError,
    NoNonzeroDistanceError,
    OddDimensionError,
    PointFileError,
    SizeExceedsSpaceError,
    TooLargeError,
)
from .field import Prime, inverse, legendre, make_prime

Point = tuple[int, ...]

# Exhaustive enumerations of (Z/pZ)^d are refused beyond this many points.
ENUM_GUARD = 10**7


def norm_of(x: Point, p: int) -> int:
    """Sum of squared coordinates mod p."""
    return sum(c * c for c in x) % p


def dist(x: Point, y: Point, p: int) -> int:
    """Norm of x - y; symmetric because (-1)^2 = 1."""
    if len(x) != len(y):
        raise DimensionMismatchError(f"points of dimension {len(x)} and {len(y)}")
    return sum((a - b) * (a - b) for a, b in zip(x, y)) % p


class PointSet:
    """A duplicate-free collection of points of (Z/pZ)^d in a fixed order.

    The order is whatever the constructor received; it fixes iteration and
    serialization, so identical inputs give byte-identical outputs.  Distance
    tables and distance buckets are cached lazily since every counting routine
    needs them.
    """

    def __init__(self, prime: Prime, d: int, points):
        if d < 1:
            raise DimensionMismatchError("dimension must be at least 1")
        pts = []
        seen = set()
        p = prime.p
        for pt in points:
            pt = tuple(pt)
            if len(pt) != d:
                raise DimensionMismatchError(f"point {pt} does not have dimension {d}")
            if not all(0 <= c < p for c in pt):
                raise PointFileError(f"point {pt} has non-canonical coordinates for p={p}")
            if pt in seen:
                raise PointFileError(f"duplicate point {pt}")
            seen.add(pt)
            pts.append(pt)
        if not pts:
            raise PointFileError("a point set must contain at least one point")
        self.prime = prime
        self.d = d
        self.points: tuple[Point, ...] = tuple(pts)
        self._point_index = {pt: i for i, pt in enumerate(self.points)}
        self._cache: dict = {}  # memo space for the counting modules

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, pt) -> bool:
        return tuple(pt) in self._point_index

    def __repr__(self) -> str:
        return f"PointSet(p={self.prime.p}, d={self.d}, n={len(self)})"

    def index_of(self, pt: Point) -> int:
        return self._point_index[tuple(pt)]

    @cached_property
    def dist_table(self) -> tuple[tuple[int, ...], ...]:
        """dist_table[i][j] is the norm of points[i] - points[j]."""
        p = self.prime.p
        pts = self.points
        return tuple(tuple(dist(a, b, p) for b in pts) for a in pts)

    @cached_property
    def norm_pair_counts(self) -> dict[int, int]:
        """How many ordered pairs (x, y), including x = y, have each norm."""
        counts: dict[int, int] = {}
        for row in self.dist_table:
            for t in row:
                counts[t] = counts.get(t, 0) + 1
        return counts

    @cached_property
    def neighbor_buckets(self) -> tuple[dict[int, tuple[int, ...]], ...]:
        """Per point i, a map t -> indices j != i with dist(i, j) = t."""
        n = len(self)
        out = []
        for i in range(n):
            row = self.dist_table[i]
            bucket: dict[int, list[int]] = {}
            for j in range(n):
                if j != i:
                    bucket.setdefault(row[j], []).append(j)
            out.append({t: tuple(js) for t, js in bucket.items()})
        return tuple(out)

    @cached_property
    def pair_buckets(self) -> dict[int, tuple[tuple[int, int], ...]]:
        """Map t -> ordered pairs (i, j) of distinct indices with dist t."""
        buckets: dict[int, list[tuple[int, int]]] = {}
        n = len(self)
        for i in range(n):
            row = self.dist_table[i]
            for j in range(n):
                if j != i:
                    buckets.setdefault(row[j], []).append((i, j))
        return {t: tuple(ps) for t, ps in buckets.items()}


def full_space(prime: Prime, d: int) -> PointSet:
    """All of (Z/pZ)^d in lexicographic order."""
    if prime.p**d > ENUM_GUARD:
        raise TooLargeError(f"p^d = {prime.p ** d} exceeds the enumeration guard")
    return PointSet(prime, d, itertools.product(range(prime.p), repeat=d))


def random_point_set(prime: Prime, d: int, size: int, seed) -> PointSet:
    """Seeded uniform sample of `size` distinct points of (Z/pZ)^d.

    Points are decoded from a sample of base-p codes and sorted, so the same
    (p, d, size, seed) always yields the same set, independent of platform.
    """
    space = prime.p**d
    if size > space:
        raise SizeExceedsSpaceError(f"cannot pick {size} distinct points from {space}")
    if size < 1:
        raise SizeExceedsSpaceError("size must be at least 1")
    rng = random.Random(f"pointset:{prime.p}:{d}:{size}:{seed}")
    codes = sorted(rng.sample(range(space), size))
    pts = []
    for code in codes:
        coords = []
        for _ in range(d):
            code, c = divmod(code, prime.p)
            coords.append(c)
        pts.append(tuple(coords))
    return PointSet(prime, d, pts)


def sphere_points(t: int, d: int, prime: Prime) -> tuple[Point, ...]:
    """All points of (Z/pZ)^d with norm t, by exhaustive enumeration."""
    p = prime.p
    if p**d > ENUM_GUARD:
        raise TooLargeError(f"p^d = {p ** d} exceeds the enumeration guard")
    t %= p
    return tuple(x for x in itertools.product(range(p), repeat=d) if norm_of(x, p) == t)


def sphere_size_formula(t: int, d: int, prime: Prime) -> int:
    """Closed-form sphere size, available in even dimension only.

    |S_t| = p^(d-1) + lam(t) * p^((d-2)/2) * chi((-1)^(d/2)) with lam(0) = p-1
    and lam(t) = -1 otherwise, chi the quadratic character.
    """
    if d % 2 != 0:
        raise OddDimensionError("the closed form requires even dimension")
    p = prime.p
    lam = p - 1 if t % p == 0 else -1
    chi = legendre(pow(-1, d // 2, p), prime)
    return p ** (d - 1) + lam * p ** ((d - 2) // 2) * chi


def distance_set(E: PointSet) -> frozenset[int]:
    """All norms of differences of ordered pairs of E; always contains 0."""
    return frozenset(E.norm_pair_counts)


def quotient_set(E: PointSet) -> frozenset[int]:
    """All quotients a/b with a any distance of E and b a nonzero distance."""
    deltas = distance_set(E)
    nonzero = [b for b in deltas if b != 0]
    if not nonzero:
        raise NoNonzeroDistanceError("the distance set is {0}")
    p = E.prime.p
    return frozenset(a * inverse(b, E.prime) % p for a in deltas for b in nonzero)


def save_point_set(E: PointSet, path, comment: str | None = None) -> None:
    """Write the shared text format: a `p=.. d=..` header, one point per line."""
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"p={E.prime.p} d={E.d}")
    lines.extend(",".join(str(c) for c in pt) for pt in E.points)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_point_set(path) -> PointSet:
    """Parse the shared text format; rejects duplicates and bad coordinates."""
    with open(path, encoding="utf-8") as fh:
        raw = [line.strip() for line in fh]
    lines = [ln for ln in raw if ln and not ln.startswith("#")]
    if not lines:
        raise PointFileError("empty point-set file")
    header = lines[0].split()
    try:
        fields = dict(part.split("=", 1) for part in header)
        p = int(fields["p"])
        d = int(fields["d"])
    except (ValueError, KeyError) as exc:
        raise PointFileError(f"bad header line {lines[0]!r}") from exc
    prime = make_prime(p)
    pts = []
    for ln in lines[1:]:
        try:
            pt = tuple(int(tok) for tok in ln.split(","))
        except ValueError as exc:
            raise PointFileError(f"bad point line {ln!r}") from exc
        pts.append(pt)
    return PointSet(prime, d, pts)
