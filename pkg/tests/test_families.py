"""Configuration families: classification passes against raw tuple oracles."""

import itertools
from fractions import Fraction

import pytest

from dilatelab.configcount import displacement_histogram, make_ratio
from dilatelab.errors import TooLargeError
from dilatelab.families import (
    all_equal_slice_direct,
    check_two_path_decomposition,
    classify_two_path_pairs,
    count_path_pairs,
    count_simplex_pairs,
    count_triangle_pairs,
    displacement_slice_direct,
    find_clique_pair_witness,
    find_cycle_pair_witness,
    find_path_pair_witness,
    four_cycle_families,
    four_cycle_fiber_check,
    shared_displacement_counts,
    shared_displacement_counts_direct,
    simplex_bound_group_sum,
    triangle_bound_group_sum,
    two_path_parts_closed_form,
    validate_clique_pair,
    validate_cycle_pair,
    validate_path_pair,
)
from dilatelab.field import make_prime
from dilatelab.geometry import PointSet, dist, full_space, random_point_set
from dilatelab.orthogonal import enumerate_orthogonal

SEVEN = make_prime(7)
THREE = make_prime(3)
TWO_POINT = PointSet(SEVEN, 2, [(0, 0), (1, 0)])
ISOCELES = PointSet(SEVEN, 2, [(0, 0), (1, 0), (0, 1)])  # squared sides 1, 1, 2


def raw_two_path_parts(E, r):
    p = E.prime.p
    a = b = ab = c = tot = 0
    for x1, x2, x3 in itertools.product(E.points, repeat=3):
        if x1 == x2 or x2 == x3:
            continue
        t1, t2 = r * dist(x1, x2, p) % p, r * dist(x2, x3, p) % p
        for y1, y2, y3 in itertools.product(E.points, repeat=3):
            if dist(y1, y2, p) == t1 and dist(y2, y3, p) == t2:
                tot += 1
                xd, yd = x1 == x3, y1 == y3
                a += xd
                b += yd
                ab += xd and yd
                c += not xd and not yd
    return a, b, ab, c, tot


def raw_path_pairs(E, r, k):
    p = E.prime.p
    total = 0
    for xs in itertools.product(E.points, repeat=k + 1):
        if len(set(xs)) != k + 1:
            continue
        prof = [r * dist(xs[i], xs[i + 1], p) % p for i in range(k)]
        for ys in itertools.product(E.points, repeat=k + 1):
            if len(set(ys)) != k + 1:
                continue
            if all(dist(ys[i], ys[i + 1], p) == prof[i] for i in range(k)):
                total += 1
    return total


def raw_clique_pairs(E, r, m):
    p = E.prime.p
    total = 0
    for vs in itertools.product(E.points, repeat=m):
        if len(set(vs)) != m:
            continue
        for us in itertools.product(E.points, repeat=m):
            if len(set(us)) != m:
                continue
            if all(
                dist(us[i], us[j], p) == r * dist(vs[i], vs[j], p) % p
                for i in range(m)
                for j in range(i + 1, m)
            ):
                total += 1
    return total


# ---------------------------------------------------------------------------
# two-path decomposition


def test_two_point_classification():
    parts = classify_two_path_pairs(TWO_POINT, make_ratio(1, SEVEN))
    assert (parts.x_coincide, parts.y_coincide, parts.both_coincide) == (4, 4, 4)
    assert parts.open_pairs == 0
    assert parts.total == 4


@pytest.mark.parametrize("p,size", [(3, 4), (7, 4), (11, 4)])
def test_classification_matches_raw(p, size):
    prime = make_prime(p)
    for seed in range(2):
        E = random_point_set(prime, 2, size, seed)
        for r in (1, p - 1):
            parts = classify_two_path_pairs(E, make_ratio(r, prime))
            raw = raw_two_path_parts(E, r)
            assert (parts.x_coincide, parts.y_coincide, parts.both_coincide,
                    parts.open_pairs, parts.total) == raw


def test_classification_handles_null_segments():
    thirteen = make_prime(13)
    E = PointSet(thirteen, 2, [(0, 0), (5, 1), (2, 3), (1, 1)])
    parts = classify_two_path_pairs(E, make_ratio(2, thirteen))
    raw = raw_two_path_parts(E, 2)
    assert (parts.x_coincide, parts.y_coincide, parts.both_coincide,
            parts.open_pairs, parts.total) == raw


@pytest.mark.parametrize("p", [7, 11])
def test_closed_forms_match_classification(p):
    prime = make_prime(p)
    for seed in range(3):
        E = random_point_set(prime, 2, 6, seed)
        for r in (1, 2, p - 1):
            ratio = make_ratio(r, prime)
            parts = classify_two_path_pairs(E, ratio)
            a, b, ab = two_path_parts_closed_form(E, ratio)
            assert (a, b, ab) == (parts.x_coincide, parts.y_coincide, parts.both_coincide)


def test_two_point_decomposition_identity():
    deco = check_two_path_decomposition(TWO_POINT, make_ratio(1, SEVEN))
    assert (deco.open_pairs, deco.s2, deco.s1, deco.a_closed, deco.b_closed) == (0, 4, 4, 4, 4)
    assert deco.holds


def test_single_point_decomposition_identity():
    single = PointSet(SEVEN, 2, [(3, 3)])
    deco = check_two_path_decomposition(single, make_ratio(2, SEVEN))
    assert deco.holds and deco.s2 == deco.s1 == 0


@pytest.mark.parametrize("p", [7, 11])
def test_decomposition_identity_random(p):
    prime = make_prime(p)
    for seed in range(8):
        E = random_point_set(prime, 2, 4 + seed % 5, seed)
        for r in (1, 2, 3, p - 1):
            assert check_two_path_decomposition(E, make_ratio(r, prime)).holds


# ---------------------------------------------------------------------------
# path pairs


def test_path_pair_counts_small():
    one = make_ratio(1, SEVEN)
    assert count_path_pairs(TWO_POINT, one, 2).value == 0
    assert count_path_pairs(TWO_POINT, one, 1).value == 4
    single = PointSet(SEVEN, 2, [(0, 0)])
    assert count_path_pairs(single, one, 2).value == 0


@pytest.mark.parametrize("p,size,k", [(3, 4, 2), (7, 5, 2), (7, 4, 3)])
def test_path_pairs_match_raw(p, size, k):
    prime = make_prime(p)
    for seed in range(2):
        E = random_point_set(prime, 2, size, seed)
        for r in (1, p - 1):
            assert count_path_pairs(E, make_ratio(r, prime), k).value == raw_path_pairs(E, r, k)


def test_path_pairs_meet_open_pairs_when_nondegenerate():
    # for p = 3 (mod 4) the open classification equals the all-distinct count
    for seed in range(3):
        E = random_point_set(SEVEN, 2, 6, seed)
        for r in (1, 3):
            ratio = make_ratio(r, SEVEN)
            assert (
                count_path_pairs(E, ratio, 2).value
                == classify_two_path_pairs(E, ratio).open_pairs
            )


def test_path_pair_witness_full_plane():
    plane = full_space(SEVEN, 2)
    for r in range(1, 7):
        found = find_path_pair_witness(plane, make_ratio(r, SEVEN), 2)
        assert found is not None
        xs, ys = found
        assert validate_path_pair(plane, r, xs, ys)


def test_path_pair_witness_none_when_empty():
    ratio = make_ratio(3, SEVEN)
    assert find_path_pair_witness(TWO_POINT, ratio, 1) is None
    assert count_path_pairs(TWO_POINT, ratio, 1).value == 0


# ---------------------------------------------------------------------------
# four-cycle families


def test_four_cycle_families_two_point():
    fam = four_cycle_families(TWO_POINT, make_ratio(1, SEVEN))
    assert fam.fully_distinct == 0
    assert fam.total == 4
    assert fam.degenerate_union == 4
    assert fam.decomposition_exact


@pytest.mark.parametrize("p,size", [(3, 5), (7, 6)])
def test_four_cycle_families_match_raw(p, size):
    prime = make_prime(p)
    for seed in range(2):
        E = random_point_set(prime, 2, size, seed)
        r = 1 + seed
        fam = four_cycle_families(E, make_ratio(r, prime))
        # raw recount of the ambient set and the fully-distinct subfamily
        raw_total = raw_f = 0
        for xs in itertools.product(E.points, repeat=4):
            if any(xs[i] == xs[(i + 1) % 4] for i in range(4)):
                continue
            prof = [r * dist(xs[i], xs[(i + 1) % 4], E.prime.p) % E.prime.p for i in range(4)]
            for ys in itertools.product(E.points, repeat=4):
                if all(dist(ys[i], ys[(i + 1) % 4], E.prime.p) == prof[i] for i in range(4)):
                    raw_total += 1
                    if len(set(xs)) == 4 and len(set(ys)) == 4:
                        raw_f += 1
        assert fam.total == raw_total
        assert fam.fully_distinct == raw_f
        assert fam.decomposition_exact
        assert fam.total == fam.fully_distinct + fam.degenerate_union


@pytest.mark.parametrize("seed", range(4))
def test_sandwich_bounds_p7(seed):
    from dilatelab.configcount import count_scaled_walk_pairs

    E = random_point_set(SEVEN, 2, 8, seed)
    ratio = make_ratio(1 + seed % 6, SEVEN)
    fam = four_cycle_families(E, ratio)
    s2 = count_scaled_walk_pairs(E, ratio, 2, "walk_dp").value
    for value in (fam.x13, fam.x24, fam.y13, fam.y24):
        assert s2 <= value <= (7 + 1) * s2


def test_fiber_check_small():
    for seed in range(3):
        E = random_point_set(THREE, 2, 6, seed)
        for r in (1, 2):
            check = four_cycle_fiber_check(E, make_ratio(r, THREE))
            assert check.surjective
            assert check.image_inside_target
            assert check.max_fiber <= 3 + 1
            fam = four_cycle_families(E, make_ratio(r, THREE))
            assert check.domain_size == fam.x13


def test_cycle_pair_witness_full_plane():
    for p in (3, 7):
        prime = make_prime(p)
        plane = full_space(prime, 2)
        found = find_cycle_pair_witness(plane, make_ratio(1, prime))
        assert found is not None
        xs, ys = found
        assert validate_cycle_pair(plane, 1, xs, ys)


def test_cycle_pair_witness_none_for_two_points():
    assert find_cycle_pair_witness(TWO_POINT, make_ratio(1, SEVEN)) is None


# ---------------------------------------------------------------------------
# shared-displacement counts


def raw_shared_tuples(E, ratio, theta, m):
    """(all, distinct) tuple counts by scanning tuples of pairs directly."""
    p = E.prime.p
    from dilatelab.orthogonal import scaled_apply

    pairs = [
        (u, v, tuple((a - b) % p for a, b in zip(u, scaled_apply(theta, ratio.sqrt_r, v, p))))
        for u in E.points
        for v in E.points
    ]
    total = distinct = 0
    for chosen in itertools.product(pairs, repeat=m):
        if len({z for _, _, z in chosen}) != 1:
            continue
        total += 1
        if len({v for _, v, _ in chosen}) == m:
            distinct += 1
    return total, distinct


def test_shared_displacement_full_plane_closed_form():
    plane = full_space(THREE, 2)
    ratio = make_ratio(1, THREE)
    theta = enumerate_orthogonal(2, THREE).elements[0]
    total, distinct = shared_displacement_counts(plane, ratio, theta)
    assert total == 3**8
    assert distinct == 3**4 * (3**2 - 1) * (3**2 - 2)
    assert total - 3 * 3**6 + 2 * 3**4 == distinct


def test_shared_displacement_single_point():
    E = PointSet(SEVEN, 2, [(1, 1)])
    ratio = make_ratio(1, SEVEN)
    theta = enumerate_orthogonal(2, SEVEN).elements[0]
    total, distinct = shared_displacement_counts(E, ratio, theta)
    assert total == 1 and distinct == 0
    assert total - 3 * 1 + 2 * 1 == distinct


@pytest.mark.parametrize("seed", range(2))
def test_shared_displacement_direct_agrees(seed):
    E = random_point_set(SEVEN, 2, 5, seed)
    ratio = make_ratio(2, SEVEN)
    for theta in enumerate_orthogonal(2, SEVEN).elements[:6]:
        bucket = shared_displacement_counts(E, ratio, theta)
        direct = shared_displacement_counts_direct(E, ratio, theta)
        assert bucket == direct
        assert bucket == raw_shared_tuples(E, ratio, theta, 3)


@pytest.mark.parametrize("seed", range(2))
def test_inclusion_exclusion_identity_per_rotation(seed):
    # distinct = total - 3 * (pair slice) + 2 * (all-equal slice) in the plane
    E = random_point_set(SEVEN, 2, 6, seed)
    ratio = make_ratio(4, SEVEN)
    for theta in enumerate_orthogonal(2, SEVEN):
        hist = displacement_histogram(E, ratio, theta)
        sq = sum(c * c for c in hist.values())
        total, distinct = shared_displacement_counts(E, ratio, theta)
        _, direct_distinct = shared_displacement_counts_direct(E, ratio, theta)
        assert direct_distinct == total - 3 * sq + 2 * len(E) ** 2
        assert distinct == direct_distinct


@pytest.mark.parametrize("kl", [(0, 1), (0, 2), (1, 2)])
def test_pair_slices_equal_square_moment(kl):
    E = random_point_set(THREE, 2, 5, seed=4)
    ratio = make_ratio(1, THREE)
    for theta in enumerate_orthogonal(2, THREE):
        hist = displacement_histogram(E, ratio, theta)
        sq = sum(c * c for c in hist.values())
        assert displacement_slice_direct(E, ratio, theta, *kl) == sq


def test_all_equal_slice_is_square_of_size():
    E = random_point_set(SEVEN, 2, 7, seed=2)
    ratio = make_ratio(2, SEVEN)
    for theta in enumerate_orthogonal(2, SEVEN).elements[:4]:
        assert all_equal_slice_direct(E, ratio, theta) == len(E) ** 2


def test_norm_sum_over_group_matches_power_moment():
    # summing per-rotation totals equals the full third-moment of the histogram
    E = random_point_set(SEVEN, 2, 6, seed=1)
    ratio = make_ratio(1, SEVEN)
    table = enumerate_orthogonal(2, SEVEN)
    lhs = sum(shared_displacement_counts(E, ratio, th)[0] for th in table)
    rhs = sum(
        sum(c**3 for c in displacement_histogram(E, ratio, th).values())
        for th in table
    )
    assert lhs == rhs


def test_two_path_parts_as_actual_tuple_sets():
    """Cover and disjointness of the coincidence parts, by real set algebra."""
    for seed in range(2):
        E = random_point_set(SEVEN, 2, 6, seed)
        r = 2 + seed
        ambient = set()
        part_a = set()
        part_b = set()
        part_c = set()
        p = E.prime.p
        for x1, x2, x3 in itertools.product(E.points, repeat=3):
            if x1 == x2 or x2 == x3:
                continue
            t1, t2 = r * dist(x1, x2, p) % p, r * dist(x2, x3, p) % p
            for y1, y2, y3 in itertools.product(E.points, repeat=3):
                if dist(y1, y2, p) == t1 and dist(y2, y3, p) == t2:
                    tup = (x1, x2, x3, y1, y2, y3)
                    ambient.add(tup)
                    if x1 == x3:
                        part_a.add(tup)
                    if y1 == y3:
                        part_b.add(tup)
                    if x1 != x3 and y1 != y3:
                        part_c.add(tup)
        assert part_a | part_b | part_c == ambient
        assert part_a & part_c == set()
        assert part_b & part_c == set()
        parts = classify_two_path_pairs(E, make_ratio(r, SEVEN))
        assert (len(part_a), len(part_b), len(part_c)) == (
            parts.x_coincide, parts.y_coincide, parts.open_pairs)


def test_tuple_moment_group_floor_general_dimension():
    # group sum of (d+1)-power moments >= |group| * |E|^(2d+2) / p^(d^2)
    cases = [
        (random_point_set(SEVEN, 2, 7, 0), make_ratio(2, SEVEN)),
        (random_point_set(THREE, 3, 7, 1), make_ratio(1, THREE)),
    ]
    for E, ratio in cases:
        table = enumerate_orthogonal(E.d, E.prime)
        moment = sum(
            shared_displacement_counts(E, ratio, theta)[0] for theta in table
        )
        floor = Fraction(
            len(table) * len(E) ** (2 * E.d + 2), E.prime.p ** (E.d * E.d)
        )
        assert Fraction(moment) >= floor


def test_third_moment_holder_floor():
    # sum over the group of cubes is at least |E|^6 / p^3
    for seed in range(3):
        E = random_point_set(SEVEN, 2, 6 + seed, seed)
        ratio = make_ratio(2, SEVEN)
        table = enumerate_orthogonal(2, SEVEN)
        cubes = sum(
            sum(c**3 for c in displacement_histogram(E, ratio, th).values())
            for th in table
        )
        assert Fraction(cubes) >= Fraction(len(E) ** 6, 7**3)


# ---------------------------------------------------------------------------
# triangles and simplexes


def test_triangle_pairs_tiny():
    one = make_ratio(1, SEVEN)
    assert count_triangle_pairs(TWO_POINT, one).value == 0
    expected = raw_clique_pairs(ISOCELES, 1, 3)
    assert count_triangle_pairs(ISOCELES, one).value == expected
    assert expected == 12  # 6 orderings, each matched by its 2 profile automorphisms


@pytest.mark.parametrize("p,size", [(3, 5), (7, 5), (11, 5)])
def test_triangle_pairs_match_raw(p, size):
    prime = make_prime(p)
    for seed in range(2):
        E = random_point_set(prime, 2, size, seed)
        for r in (1, 2):
            assert count_triangle_pairs(E, make_ratio(r, prime)).value == raw_clique_pairs(E, r, 3)


def test_triangle_group_bound_is_lower_bound():
    for seed in range(3):
        E = random_point_set(SEVEN, 2, 7, seed)
        for r in (1, 2, 4):
            ratio = make_ratio(r, SEVEN)
            bound = triangle_bound_group_sum(E, ratio)
            exact = count_triangle_pairs(E, ratio).value
            assert Fraction(exact) >= bound
            so2_bound = triangle_bound_group_sum(E, ratio, group="SO2")
            assert Fraction(exact) >= so2_bound


def test_distinct_source_tuples_are_triangle_pairs():
    # every distinct-source shared-displacement tuple is a triangle pair
    E = random_point_set(SEVEN, 2, 6, seed=5)
    ratio = make_ratio(2, SEVEN)
    from dilatelab.orthogonal import scaled_apply

    for theta in enumerate_orthogonal(2, SEVEN).elements[:8]:
        p = 7
        pairs = [
            (u, v, tuple((a - b) % p for a, b in zip(u, scaled_apply(theta, ratio.sqrt_r, v, p))))
            for u in E.points
            for v in E.points
        ]
        by_z = {}
        for u, v, z in pairs:
            by_z.setdefault(z, []).append((u, v))
        for z, bucket in by_z.items():
            for chosen in itertools.permutations(bucket, 3):
                us = tuple(u for u, _ in chosen)
                vs = tuple(v for _, v in chosen)
                assert validate_clique_pair(E, ratio.r, us, vs)


def test_simplex_pairs_match_triangles_in_plane():
    E = random_point_set(SEVEN, 2, 5, seed=3)
    ratio = make_ratio(1, SEVEN)
    assert count_simplex_pairs(E, ratio).value == count_triangle_pairs(E, ratio).value


def test_simplex_pairs_3d_match_raw():
    prime = THREE
    for seed in range(2):
        E = random_point_set(prime, 3, 6, seed)
        ratio = make_ratio(1, prime)
        assert count_simplex_pairs(E, ratio).value == raw_clique_pairs(E, 1, 4)


def test_simplex_group_bound_3d():
    for seed in range(2):
        E = random_point_set(THREE, 3, 7, seed)
        ratio = make_ratio(1, THREE)
        bound = simplex_bound_group_sum(E, ratio)
        exact = count_simplex_pairs(E, ratio).value
        assert Fraction(exact) >= bound


def test_clique_witness_identity_dilation():
    cube = full_space(THREE, 3)
    found = find_clique_pair_witness(cube, make_ratio(1, THREE))
    assert found is not None
    us, vs = found
    assert validate_clique_pair(cube, 1, us, vs)


def test_clique_witness_none_when_too_small():
    assert find_clique_pair_witness(TWO_POINT, make_ratio(1, SEVEN), 3) is None


def test_monotone_in_points():
    base = random_point_set(SEVEN, 2, 6, seed=12)
    bigger = PointSet(SEVEN, 2, base.points + ((6, 6),) if (6, 6) not in base else base.points + ((5, 6),))
    one = make_ratio(1, SEVEN)
    assert count_path_pairs(bigger, one, 2).value >= count_path_pairs(base, one, 2).value
    assert count_triangle_pairs(bigger, one).value >= count_triangle_pairs(base, one).value
    f_small = four_cycle_families(base, one)
    f_big = four_cycle_families(bigger, one)
    assert f_big.fully_distinct >= f_small.fully_distinct
    assert f_big.total >= f_small.total


def test_guards_raise():
    big = random_point_set(make_prime(11), 2, 25, seed=0)
    with pytest.raises(TooLargeError):
        count_path_pairs(big, make_ratio(1, make_prime(11)), 3)
    with pytest.raises(TooLargeError):
        four_cycle_families(big, make_ratio(1, make_prime(11)))
