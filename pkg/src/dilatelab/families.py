"""Nondegenerate configuration families and their degenerate decompositions.

A "pair of k-paths with dilation ratio r" is a pair of (k+1)-tuples of
points, each with pairwise-distinct entries, whose consecutive squared step
lengths are in ratio r; triangle and simplex pairs constrain every pairwise
squared distance instead of only consecutive ones.  The scaled walk/cycle
pairs of :mod:`dilatelab.configcount` also contain degenerate pairs (repeated
vertices); this module enumerates those remainder families and checks the
exact bookkeeping identities between them.

Counting here is enumeration-first: families are counted by classifying the
concrete tuples of the ambient scaled-pair set, so every identity and bound
can be tested against an independent closed form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterator

from .configcount import (
    BRUTE_GUARD,
    Ratio,
    displacement_histogram,
    step_profile_counts,
    _walk_dp_scaled_pairs,
)
from .errors import (
    DimensionMismatchError,
    NotASquareRatioError,
    TooLargeError,
    WrongResidueClassError,
)
from .geometry import PointSet, dist
from .orthogonal import GroupTable, enumerate_orthogonal, scaled_apply, so2_elements

if TYPE_CHECKING:  # pragma: no cover
    from .orthogonal import OrthMatrix

FAMILY_PATH_PAIRS = "C2path"
FAMILY_FOUR_CYCLE = "F4cycle"
FAMILY_TRIANGLE = "T_triangle"
FAMILY_SIMPLEX = "P_simplex"

FAMILIES = (FAMILY_PATH_PAIRS, FAMILY_FOUR_CYCLE, FAMILY_TRIANGLE, FAMILY_SIMPLEX)


@dataclass(frozen=True)
class FamilyCount:
    """A named family count with the parameters that produced it."""

    family: str
    value: int
    method: str
    p: int
    d: int
    set_size: int
    r: int | None = None
    k: int | None = None

    CSV_HEADER = "family,p,d,E_size,r,value,method"

    def csv_row(self) -> str:
        r = "" if self.r is None else self.r
        return f"{self.family},{self.p},{self.d},{self.set_size},{r},{self.value},{self.method}"

    def json_dict(self) -> dict:
        return {
            "family": self.family,
            "p": self.p,
            "d": self.d,
            "E_size": self.set_size,
            "r": self.r,
            "k": self.k,
            "value": self.value,
            "method": self.method,
        }


def _family(E: PointSet, name: str, value: int, method: str, r=None, k=None) -> FamilyCount:
    return FamilyCount(
        family=name, value=value, method=method,
        p=E.prime.p, d=E.d, set_size=len(E), r=r, k=k,
    )


def _y_candidates(E: PointSet, prev: int, s: int):
    """Indices at squared distance s from prev, including prev itself for s = 0."""
    cands = E.neighbor_buckets[prev].get(s, ())
    if s == 0:
        return cands + (prev,)
    return cands


# ----------------------------------------------------------------------------
# enumeration of the ambient scaled-pair sets


def iter_scaled_walk_pairs(E: PointSet, r: int, k: int) -> Iterator[tuple[tuple, tuple]]:
    """All index-tuple pairs (xs, ys) of the scaled k-step walk-pair set."""
    n = len(E)
    if n ** (2 * k + 2) > BRUTE_GUARD:
        raise TooLargeError(f"enumeration over {n}^{2 * k + 2} tuples refused")
    p = E.prime.p
    D = E.dist_table
    idx = range(n)

    def extend_y(xs, prof, ys):
        depth = len(ys)
        if depth == k + 1:
            yield xs, tuple(ys)
            return
        for j in _y_candidates(E, ys[-1], prof[depth - 1]):
            ys.append(j)
            yield from extend_y(xs, prof, ys)
            ys.pop()

    def extend_x(xs):
        depth = len(xs)
        if depth == k + 1:
            prof = tuple(r * D[xs[i]][xs[i + 1]] % p for i in range(k))
            tup = tuple(xs)
            for y0 in idx:
                yield from extend_y(tup, prof, [y0])
            return
        for j in idx:
            if depth == 0 or j != xs[-1]:
                xs.append(j)
                yield from extend_x(xs)
                xs.pop()

    yield from extend_x([])


def iter_scaled_cycle_pairs(E: PointSet, r: int) -> Iterator[tuple[tuple, tuple]]:
    """All index-tuple pairs (xs, ys) of the scaled closed 4-walk pair set."""
    n = len(E)
    if n**8 > BRUTE_GUARD:
        raise TooLargeError(f"enumeration over {n}^8 tuples refused")
    p = E.prime.p
    D = E.dist_table
    idx = range(n)
    for x1 in idx:
        for x2 in idx:
            if x2 == x1:
                continue
            t1 = r * D[x1][x2] % p
            for x3 in idx:
                if x3 == x2:
                    continue
                t2 = r * D[x2][x3] % p
                for x4 in idx:
                    if x4 == x3 or x4 == x1:
                        continue
                    t3 = r * D[x3][x4] % p
                    t4 = r * D[x4][x1] % p
                    xs = (x1, x2, x3, x4)
                    for y1 in idx:
                        for y2 in _y_candidates(E, y1, t1):
                            for y3 in _y_candidates(E, y2, t2):
                                for y4 in _y_candidates(E, y3, t3):
                                    if D[y4][y1] == t4:
                                        yield xs, (y1, y2, y3, y4)


# ----------------------------------------------------------------------------
# pairs of k-paths (all vertices distinct on each side)


def count_path_pairs(E: PointSet, ratio: Ratio, k: int) -> FamilyCount:
    """Exact number of pairs of k-paths in E with dilation ratio r."""
    if k < 1:
        raise ValueError("k must be at least 1")
    n = len(E)
    if n ** (2 * k + 2) > BRUTE_GUARD:
        raise TooLargeError(f"enumeration over {n}^{2 * k + 2} tuples refused")
    p = E.prime.p
    D = E.dist_table
    idx = range(n)
    r_val = ratio.r

    def count_y(prof, ys):
        depth = len(ys)
        if depth == k + 1:
            return 1
        total = 0
        for j in _y_candidates(E, ys[-1], prof[depth - 1]):
            if j not in ys:
                ys.append(j)
                total += count_y(prof, ys)
                ys.pop()
        return total

    total = 0

    def extend_x(xs):
        nonlocal total
        depth = len(xs)
        if depth == k + 1:
            prof = tuple(r_val * D[xs[i]][xs[i + 1]] % p for i in range(k))
            total += sum(count_y(prof, [y0]) for y0 in idx)
            return
        for j in idx:
            if j not in xs:
                xs.append(j)
                extend_x(xs)
                xs.pop()

    extend_x([])
    return _family(E, FAMILY_PATH_PAIRS if k == 2 else f"path_pairs_k{k}", total,
                   method="brute", r=ratio.r, k=k)


def validate_path_pair(E: PointSet, r: int, xs, ys) -> bool:
    """Check a claimed witness directly against the definition."""
    p = E.prime.p
    k = len(xs) - 1
    if len(ys) != k + 1:
        return False
    pts = list(xs) + list(ys)
    if any(pt not in E for pt in pts):
        return False
    if len(set(xs)) != k + 1 or len(set(ys)) != k + 1:
        return False
    return all(
        dist(ys[i], ys[i + 1], p) == r * dist(xs[i], xs[i + 1], p) % p
        for i in range(k)
    )


def find_path_pair_witness(E: PointSet, ratio: Ratio, k: int = 2):
    """First pair of k-paths with dilation ratio r, or None if none exists.

    The x side ranges over every tuple of distinct points and the y side over
    every bucket-matched completion, so a None answer means the family is
    empty.
    """
    n = len(E)
    p = E.prime.p
    D = E.dist_table
    idx = range(n)
    pts = E.points

    def find_y(prof, ys):
        depth = len(ys)
        if depth == k + 1:
            return tuple(ys)
        for j in _y_candidates(E, ys[-1], prof[depth - 1]):
            if j not in ys:
                ys.append(j)
                found = find_y(prof, ys)
                if found:
                    return found
                ys.pop()
        return None

    def find_x(xs):
        depth = len(xs)
        if depth == k + 1:
            prof = tuple(ratio.r * D[xs[i]][xs[i + 1]] % p for i in range(k))
            for y0 in idx:
                found = find_y(prof, [y0])
                if found:
                    return tuple(xs), found
            return None
        for j in idx:
            if j not in xs:
                xs.append(j)
                found = find_x(xs)
                if found:
                    return found
                xs.pop()
        return None

    found = find_x([])
    if found is None:
        return None
    xs = tuple(pts[i] for i in found[0])
    ys = tuple(pts[i] for i in found[1])
    if not validate_path_pair(E, ratio.r, xs, ys):
        raise AssertionError("internal error: witness failed revalidation")
    return xs, ys


# ----------------------------------------------------------------------------
# degenerate decomposition of the 2-step walk-pair set


@dataclass(frozen=True)
class TwoPathParts:
    """Classification of the scaled 2-step walk pairs by vertex coincidences."""

    x_coincide: int      # x1 = x3
    y_coincide: int      # y1 = y3
    both_coincide: int   # x1 = x3 and y1 = y3
    open_pairs: int      # x's pairwise distinct and y1 != y3
    total: int


def classify_two_path_pairs(E: PointSet, ratio: Ratio) -> TwoPathParts:
    """One pass over the concrete scaled 2-walk pairs, sorted into the parts."""
    a = b = ab = c = total = 0
    for xs, ys in iter_scaled_walk_pairs(E, ratio.r, 2):
        total += 1
        x_deg = xs[0] == xs[2]
        y_deg = ys[0] == ys[2]
        if x_deg:
            a += 1
        if y_deg:
            b += 1
        if x_deg and y_deg:
            ab += 1
        if not x_deg and not y_deg:
            c += 1
    return TwoPathParts(x_coincide=a, y_coincide=b, both_coincide=ab,
                        open_pairs=c, total=total)


def two_path_parts_closed_form(E: PointSet, ratio: Ratio) -> tuple[int, int, int]:
    """The step-profile forms of the three degenerate parts.

    Valid where distinct points force a nonzero squared distance, i.e. d = 2
    with p = 3 (mod 4).
    """
    if E.d != 2 or E.prime.p_mod_4 != 3:
        raise WrongResidueClassError("the closed forms need d = 2 and p = 3 (mod 4)")
    p = E.prime.p
    r = ratio.r
    nu1 = step_profile_counts(E, 1, nonzero_only=True)
    nu2 = step_profile_counts(E, 2, nonzero_only=True)
    a = sum(
        cnt * nu2.get((r * t % p, r * t % p), 0) for (t,), cnt in nu1.items()
    )
    b = sum(
        nu1.get((r * t % p,), 0) * nu2.get((t, t), 0) for t in range(1, p)
    )
    ab = sum(cnt * nu1.get((r * t % p,), 0) for (t,), cnt in nu1.items())
    return a, b, ab


@dataclass(frozen=True)
class TwoPathDecomposition:
    """Both sides of the inclusion-exclusion identity for open 2-path pairs."""

    open_pairs: int
    s2: int
    s1: int
    a_closed: int
    b_closed: int

    @property
    def holds(self) -> bool:
        return self.open_pairs == self.s2 + self.s1 - self.a_closed - self.b_closed


def check_two_path_decomposition(E: PointSet, ratio: Ratio) -> TwoPathDecomposition:
    """Evaluate the identity with every term computed by an independent route."""
    parts = classify_two_path_pairs(E, ratio)
    a_closed, b_closed, _ = two_path_parts_closed_form(E, ratio)
    s2 = _walk_dp_scaled_pairs(E, ratio.r, 2)
    s1 = _walk_dp_scaled_pairs(E, ratio.r, 1)
    return TwoPathDecomposition(
        open_pairs=parts.open_pairs, s2=s2, s1=s1,
        a_closed=a_closed, b_closed=b_closed,
    )


# ----------------------------------------------------------------------------
# four-cycle families


@dataclass(frozen=True)
class FourCycleFamilies:
    """Classification of the scaled closed-4-walk pairs by vertex coincidences."""

    fully_distinct: int   # all eight vertices distinct on their sides
    x13: int              # x1 = x3
    x24: int              # x2 = x4
    y13: int              # y1 = y3
    y24: int              # y2 = y4
    degenerate_union: int
    total: int
    decomposition_exact: bool  # every tuple is fully distinct or in the union


def four_cycle_families(E: PointSet, ratio: Ratio) -> FourCycleFamilies:
    f = a13 = a24 = b13 = b24 = union = total = 0
    exact = True
    for xs, ys in iter_scaled_cycle_pairs(E, ratio.r):
        total += 1
        c_a13 = xs[0] == xs[2]
        c_a24 = xs[1] == xs[3]
        c_b13 = ys[0] == ys[2]
        c_b24 = ys[1] == ys[3]
        degenerate = c_a13 or c_a24 or c_b13 or c_b24
        distinct = len(set(xs)) == 4 and len(set(ys)) == 4
        a13 += c_a13
        a24 += c_a24
        b13 += c_b13
        b24 += c_b24
        union += degenerate
        f += distinct
        if not distinct and not degenerate:
            # an adjacent y-coincidence slipped past the four named families;
            # possible only when nonzero null segments exist
            exact = False
    return FourCycleFamilies(
        fully_distinct=f, x13=a13, x24=a24, y13=b13, y24=b24,
        degenerate_union=union, total=total, decomposition_exact=exact,
    )


def validate_cycle_pair(E: PointSet, r: int, xs, ys) -> bool:
    p = E.prime.p
    if len(xs) != 4 or len(ys) != 4:
        return False
    if any(pt not in E for pt in list(xs) + list(ys)):
        return False
    if len(set(xs)) != 4 or len(set(ys)) != 4:
        return False
    return all(
        dist(ys[i], ys[(i + 1) % 4], p) == r * dist(xs[i], xs[(i + 1) % 4], p) % p
        for i in range(4)
    )


def find_cycle_pair_witness(E: PointSet, ratio: Ratio):
    """First pair of 4-cycles (all vertices distinct) with ratio r, or None.

    The x side is canonicalized under simultaneous rotation/reflection (least
    index first, orientation fixed), which preserves completeness.
    """
    n = len(E)
    p = E.prime.p
    D = E.dist_table
    pts = E.points
    r = ratio.r
    for x1 in range(n):
        for x2 in range(x1 + 1, n):
            t1 = r * D[x1][x2] % p
            for x3 in range(x1 + 1, n):
                if x3 == x2:
                    continue
                t2 = r * D[x2][x3] % p
                for x4 in range(x2 + 1, n):
                    if x4 == x3:
                        continue
                    t3 = r * D[x3][x4] % p
                    t4 = r * D[x4][x1] % p
                    for y1 in range(n):
                        for y2 in _y_candidates(E, y1, t1):
                            if y2 == y1:
                                continue
                            for y3 in _y_candidates(E, y2, t2):
                                if y3 == y1 or y3 == y2:
                                    continue
                                for y4 in _y_candidates(E, y3, t3):
                                    if y4 in (y1, y2, y3) or D[y4][y1] != t4:
                                        continue
                                    xs = (pts[x1], pts[x2], pts[x3], pts[x4])
                                    ys = (pts[y1], pts[y2], pts[y3], pts[y4])
                                    if not validate_cycle_pair(E, r, xs, ys):
                                        raise AssertionError(
                                            "internal error: witness failed revalidation"
                                        )
                                    return xs, ys
    return None


@dataclass(frozen=True)
class FiberCheck:
    """Surjectivity and fiber sizes of the collapse from x1=x3 cycle pairs."""

    surjective: bool
    max_fiber: int
    domain_size: int
    target_size: int
    image_inside_target: bool


def four_cycle_fiber_check(E: PointSet, ratio: Ratio) -> FiberCheck:
    """Map each x1 = x3 cycle pair onto a scaled 2-walk pair and inspect fibers.

    The collapse (x1,x2,x4,y1,y2,y3,y4) -> (x4,x1,x2,y4,y1,y2) must cover the
    whole 2-walk pair set with fibers of size at most p + 1.
    """
    n = len(E)
    if n**8 > BRUTE_GUARD:
        raise TooLargeError("fiber check refused beyond the enumeration guard")
    p = E.prime.p
    D = E.dist_table
    r = ratio.r
    idx = range(n)
    fibers: dict[tuple, int] = {}
    for x1 in idx:
        for x2 in idx:
            if x2 == x1:
                continue
            ta = r * D[x1][x2] % p
            for x4 in idx:
                if x4 == x1:
                    continue
                tb = r * D[x1][x4] % p
                for y1 in idx:
                    for y2 in _y_candidates(E, y1, ta):
                        for y3 in _y_candidates(E, y2, ta):
                            for y4 in _y_candidates(E, y3, tb):
                                if D[y1][y4] == tb:
                                    key = (x4, x1, x2, y4, y1, y2)
                                    fibers[key] = fibers.get(key, 0) + 1
    target = set()
    for xs, ys in iter_scaled_walk_pairs(E, r, 2):
        target.add(xs + ys)
    image = set(fibers)
    return FiberCheck(
        surjective=image >= target,
        max_fiber=max(fibers.values(), default=0),
        domain_size=sum(fibers.values()),
        target_size=len(target),
        image_inside_target=image <= target,
    )


# ----------------------------------------------------------------------------
# shared-displacement tuple counts (per rotation)


def _falling(x: int, m: int) -> int:
    # x (x-1) .. (x-m+1); zero whenever 0 <= x < m
    out = 1
    for i in range(m):
        out *= x - i
    return out


def shared_displacement_counts(E: PointSet, ratio: Ratio, theta: "OrthMatrix",
                               arity: int | None = None) -> tuple[int, int]:
    """(all, distinct-source) counts of arity-tuples of pairs sharing a displacement.

    A tuple here is ((u_1, v_1), .., (u_m, v_m)) with every u_i - sqrt(r) *
    theta * v_i equal; "distinct-source" additionally requires the v_i to be
    pairwise distinct.  Within one displacement class the v's determine the
    pairs, so the two counts are power sums and falling-factorial sums of the
    displacement histogram.
    """
    m = E.d + 1 if arity is None else arity
    hist = displacement_histogram(E, ratio, theta)
    total = sum(c**m for c in hist.values())
    distinct = sum(_falling(c, m) for c in hist.values())
    return total, distinct


def shared_displacement_counts_direct(E: PointSet, ratio: Ratio, theta: "OrthMatrix",
                                      arity: int | None = None) -> tuple[int, int]:
    """The same two counts by explicit tuple extension with membership checks."""
    if not ratio.is_square or ratio.sqrt_r is None:
        raise NotASquareRatioError(f"ratio {ratio.r} is not a nonzero square")
    m = E.d + 1 if arity is None else arity
    p = E.prime.p
    images = {v: scaled_apply(theta, ratio.sqrt_r, v, p) for v in E.points}

    def extensions(base, chosen, need_distinct):
        if len(chosen) == m:
            return 1
        total = 0
        for v in E.points:
            if need_distinct and v in chosen:
                continue
            u = tuple((a + b) % p for a, b in zip(base, images[v]))
            if u in E:
                chosen.append(v)
                total += extensions(base, chosen, need_distinct)
                chosen.pop()
        return total

    total = distinct = 0
    for u1 in E.points:
        for v1 in E.points:
            base = tuple((a - b) % p for a, b in zip(u1, images[v1]))
            total += extensions(base, [v1], False)
            distinct += extensions(base, [v1], True)
    return total, distinct


def displacement_slice_direct(E: PointSet, ratio: Ratio, theta: "OrthMatrix",
                              k: int, l: int, arity: int | None = None) -> int:
    """Tuples as above (no distinctness) with sources k and l forced equal."""
    if not ratio.is_square or ratio.sqrt_r is None:
        raise NotASquareRatioError(f"ratio {ratio.r} is not a nonzero square")
    m = E.d + 1 if arity is None else arity
    if not (0 <= k < l < m):
        raise ValueError("need 0 <= k < l < arity")
    p = E.prime.p
    images = {v: scaled_apply(theta, ratio.sqrt_r, v, p) for v in E.points}

    total = 0
    for u1 in E.points:
        for v1 in E.points:
            base = tuple((a - b) % p for a, b in zip(u1, images[v1]))

            def extensions(chosen):
                pos = len(chosen)
                if pos == m:
                    return 1
                if pos == l:
                    v = chosen[k]
                    u = tuple((a + b) % p for a, b in zip(base, images[v]))
                    return extensions(chosen + [v]) if u in E else 0
                total_here = 0
                for v in E.points:
                    u = tuple((a + b) % p for a, b in zip(base, images[v]))
                    if u in E:
                        total_here += extensions(chosen + [v])
                return total_here

            total += extensions([v1])
    return total


def all_equal_slice_direct(E: PointSet, ratio: Ratio, theta: "OrthMatrix",
                           arity: int | None = None) -> int:
    """Tuples as above with every source equal, checked by scanning targets.

    The difference conditions force every target to repeat the first one, so
    the count comes out as |E|^2; this routine verifies that by enumeration
    instead of assuming it.
    """
    if not ratio.is_square or ratio.sqrt_r is None:
        raise NotASquareRatioError(f"ratio {ratio.r} is not a nonzero square")
    m = E.d + 1 if arity is None else arity
    p = E.prime.p
    s = ratio.sqrt_r
    total = 0
    for u1 in E.points:
        for v1 in E.points:
            # sources all equal v1, so each later target must sit at
            # u1 + sqrt(r) * theta * (v1 - v1); count the members of E there
            shift = scaled_apply(theta, s, tuple(0 for _ in v1), p)
            want = tuple((a + b) % p for a, b in zip(u1, shift))
            per_slot = sum(1 for u in E.points if u == want)
            total += per_slot ** (m - 1)
    return total


# ----------------------------------------------------------------------------
# triangle and simplex pairs


def _count_clique_pairs(E: PointSet, r: int, m: int) -> int:
    """Pairs of m-tuples, distinct entries each, all pairwise norms in ratio r."""
    n = len(E)
    if n ** (2 * m) > BRUTE_GUARD:
        raise TooLargeError(f"enumeration over {n}^{2 * m} tuples refused")
    p = E.prime.p
    D = E.dist_table
    idx = range(n)

    def count_u(vstack, ustack):
        depth = len(ustack)
        if depth == m:
            return 1
        vd = vstack[depth]
        total = 0
        for j in idx:
            if j in ustack:
                continue
            ok = True
            for a in range(depth):
                if D[ustack[a]][j] != r * D[vstack[a]][vd] % p:
                    ok = False
                    break
            if ok:
                ustack.append(j)
                total += count_u(vstack, ustack)
                ustack.pop()
        return total

    total = 0

    def extend_v(vstack):
        nonlocal total
        if len(vstack) == m:
            total += count_u(vstack, [])
            return
        for j in idx:
            if j not in vstack:
                vstack.append(j)
                extend_v(vstack)
                vstack.pop()

    extend_v([])
    return total


def count_triangle_pairs(E: PointSet, ratio: Ratio) -> FamilyCount:
    """Exact number of triangle pairs (3 points a side, all norms scaled by r)."""
    if E.d != 2:
        raise DimensionMismatchError("triangle pairs are a planar family")
    value = _count_clique_pairs(E, ratio.r, 3)
    return _family(E, FAMILY_TRIANGLE, value, method="brute", r=ratio.r)


def count_simplex_pairs(E: PointSet, ratio: Ratio) -> FamilyCount:
    """Exact number of simplex pairs: d+1 points a side, all norms scaled by r."""
    if E.d < 2:
        raise DimensionMismatchError("simplex pairs need dimension at least 2")
    value = _count_clique_pairs(E, ratio.r, E.d + 1)
    return _family(E, FAMILY_SIMPLEX, value, method="brute", r=ratio.r)


def validate_clique_pair(E: PointSet, r: int, us, vs) -> bool:
    p = E.prime.p
    m = len(vs)
    if len(us) != m:
        return False
    if any(pt not in E for pt in list(us) + list(vs)):
        return False
    if len(set(us)) != m or len(set(vs)) != m:
        return False
    return all(
        dist(us[a], us[b], p) == r * dist(vs[a], vs[b], p) % p
        for a in range(m)
        for b in range(a + 1, m)
    )


def find_clique_pair_witness(E: PointSet, ratio: Ratio, m: int | None = None):
    """First (u-tuple, v-tuple) pair with all pairwise norms in ratio r, or None.

    The v side ranges over index combinations only; any witness can be
    simultaneously reordered so its v side is increasing, so the search is
    still complete.
    """
    m = E.d + 1 if m is None else m
    n = len(E)
    p = E.prime.p
    D = E.dist_table
    pts = E.points
    r = ratio.r
    idx = range(n)

    def find_u(vstack, ustack):
        depth = len(ustack)
        if depth == m:
            return tuple(ustack)
        vd = vstack[depth]
        for j in idx:
            if j in ustack:
                continue
            ok = True
            for a in range(depth):
                if D[ustack[a]][j] != r * D[vstack[a]][vd] % p:
                    ok = False
                    break
            if ok:
                ustack.append(j)
                found = find_u(vstack, ustack)
                if found:
                    return found
                ustack.pop()
        return None

    for combo in itertools.combinations(range(n), m):
        found = find_u(list(combo), [])
        if found:
            us = tuple(pts[i] for i in found)
            vs = tuple(pts[i] for i in combo)
            if not validate_clique_pair(E, r, us, vs):
                raise AssertionError("internal error: witness failed revalidation")
            return us, vs
    return None


def _group_for(E: PointSet, group: str) -> GroupTable:
    if group == "SO2":
        if E.d != 2:
            raise DimensionMismatchError("SO2 sums need dimension 2")
        return so2_elements(E.prime)
    if group == "full":
        return enumerate_orthogonal(E.d, E.prime)
    raise ValueError(f"unknown group {group!r}")


def triangle_bound_group_sum(E: PointSet, ratio: Ratio, group: str = "full") -> Fraction:
    """Certified lower bound for the triangle-pair count from rotation sums.

    Averages, over the chosen matrix group, the cube-minus-square moment of
    the displacement histogram.  The result can be negative for tiny sets, in
    which case it certifies nothing.
    """
    if E.d != 2:
        raise DimensionMismatchError("the triangle bound is planar")
    table = _group_for(E, group)
    cubes = squares = 0
    for theta in table:
        hist = displacement_histogram(E, ratio, theta)
        cubes += sum(c**3 for c in hist.values())
        squares += sum(c**2 for c in hist.values())
    return Fraction(cubes - 3 * squares, len(table))


def simplex_bound_group_sum(E: PointSet, ratio: Ratio, group: str = "full") -> Fraction:
    """Certified lower bound for the simplex-pair count from rotation sums.

    Averages the distinct-source shared-displacement count over the group;
    every such tuple is a simplex pair, so the average is a true lower bound.
    """
    table = _group_for(E, group)
    total = 0
    for theta in table:
        _, distinct = shared_displacement_counts(E, ratio, theta)
        total += distinct
    return Fraction(total, len(table))
