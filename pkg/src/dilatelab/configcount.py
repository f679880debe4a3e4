"""Raw counting engines for scaled point configurations.

The central objects are, for a point set E and a nonzero ratio r:

* step-walk counts: how many walks through E have a prescribed sequence of
  squared step lengths (and the closed 4-walk variant);
* scaled walk/cycle pairs: pairs of walks (or closed 4-walks) where the
  second walk's squared step lengths are the first's multiplied by r, the
  first walk having distinct consecutive points;
* ratio quadruples: 4-tuples (x, y, z, w) whose two segment norms are in
  ratio r with a nonzero denominator;
* displacement histograms: for a rotation theta, how many pairs (u, v) of E
  leave each displacement u - sqrt(r) * theta * v.

Every count is computed by at least two genuinely different methods at test
time.  All arithmetic is exact integer arithmetic; results are independent of
any iteration schedule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .errors import (
    MethodMismatchError,
    NotASquareRatioError,
    TooLargeError,
    WrongResidueClassError,
)
from .field import Prime, legendre, sqrt_mod
from .geometry import Point, PointSet
from .orthogonal import scaled_apply

if TYPE_CHECKING:  # pragma: no cover
    from .orthogonal import OrthMatrix

# Brute-force enumerations beyond this many tuples are refused.
BRUTE_GUARD = 10**9

METHOD_BRUTE = "brute"
METHOD_NU_IDENTITY = "nu_identity"
METHOD_MU_IDENTITY = "mu_identity"
METHOD_WALK_DP = "walk_dp"
METHOD_GROUP_SUM = "group_sum"


@dataclass(frozen=True)
class Ratio:
    """A nonzero dilation ratio with cached squareness and canonical root."""

    r: int
    is_square: bool
    sqrt_r: int | None


def make_ratio(r: int, prime: Prime) -> Ratio:
    r %= prime.p
    if r == 0:
        raise ValueError("a dilation ratio must be nonzero")
    if legendre(r, prime) == 1:
        return Ratio(r=r, is_square=True, sqrt_r=sqrt_mod(r, prime))
    return Ratio(r=r, is_square=False, sqrt_r=None)


@dataclass(frozen=True)
class CountReport:
    """A named integer count plus the method and parameters that produced it."""

    name: str
    value: int
    method: str
    p: int
    d: int
    set_size: int
    r: int | None = None
    k: int | None = None

    CSV_HEADER = "name,method,p,d,E_size,r,k,value"

    def csv_row(self) -> str:
        r = "" if self.r is None else self.r
        k = "" if self.k is None else self.k
        return f"{self.name},{self.method},{self.p},{self.d},{self.set_size},{r},{k},{self.value}"

    def json_dict(self) -> dict:
        return {
            "name": self.name,
            "method": self.method,
            "p": self.p,
            "d": self.d,
            "E_size": self.set_size,
            "r": self.r,
            "k": self.k,
            "value": self.value,
        }


def _report(E: PointSet, name: str, value: int, method: str, r=None, k=None) -> CountReport:
    return CountReport(
        name=name, value=value, method=method,
        p=E.prime.p, d=E.d, set_size=len(E), r=r, k=k,
    )


def _dilation_safe(E: PointSet) -> bool:
    # Distinct points force a nonzero squared distance exactly here.
    return E.d == 2 and E.prime.p_mod_4 == 3


def count_step_walks(E: PointSet, steps: Iterable[int]) -> int:
    """Walks (x_1, .., x_{k+1}) in E whose i-th squared step length is steps[i].

    Computed by a prefix sweep over the set, one vector per step, never by a
    (k+1)-fold loop.
    """
    p = E.prime.p
    steps = [t % p for t in steps]
    n = len(E)
    D = E.dist_table
    vec = [1] * n
    for t in steps:
        vec = [sum(vec[i] for i in range(n) if D[i][j] == t) for j in range(n)]
    return sum(vec)


def count_step_cycles(E: PointSet, steps: Iterable[int]) -> int:
    """Closed 4-walks (x_1, .., x_4) with the four prescribed squared steps."""
    p = E.prime.p
    t1, t2, t3, t4 = (t % p for t in steps)
    n = len(E)
    D = E.dist_table
    total = 0
    for a in range(n):
        row_a = D[a]
        for c in range(n):
            row_c = D[c]
            first = sum(1 for x in range(n) if row_a[x] == t1 and D[x][c] == t2)
            if first:
                second = sum(1 for x in range(n) if row_c[x] == t3 and D[x][a] == t4)
                total += first * second
    return total


def step_profile_counts(E: PointSet, k: int, nonzero_only: bool = True) -> dict:
    """Map from step profiles (t_1, .., t_k) to their step-walk count.

    With nonzero_only the profiles range over nonzero steps, which is what
    the identity-based pair counts sum over.  Cached per point set.
    """
    key = ("profiles", k, nonzero_only)
    if key in E._cache:
        return E._cache[key]
    n = len(E)
    D = E.dist_table
    level: dict[tuple, list[int]] = {(): [1] * n}
    for _ in range(k):
        nxt: dict[tuple, list[int]] = {}
        for prof, vec in level.items():
            for i in range(n):
                c = vec[i]
                if not c:
                    continue
                row = D[i]
                for j in range(n):
                    t = row[j]
                    if nonzero_only and t == 0:
                        continue
                    arr = nxt.get(prof + (t,))
                    if arr is None:
                        arr = [0] * n
                        nxt[prof + (t,)] = arr
                    arr[j] += c
        level = nxt
    result = {prof: sum(vec) for prof, vec in level.items()}
    E._cache[key] = result
    return result


def _brute_scaled_walk_pairs(E: PointSet, r: int, k: int) -> int:
    n = len(E)
    if n ** (2 * k + 2) > BRUTE_GUARD:
        raise TooLargeError(f"brute force over {n}^{2 * k + 2} tuples refused")
    p = E.prime.p
    D = E.dist_table
    idx = range(n)

    def count_matching_walks(scaled, i, depth):
        # walks through E whose remaining steps follow `scaled`
        if depth == k:
            return 1
        want = scaled[depth]
        row = D[i]
        depth += 1
        return sum(count_matching_walks(scaled, j, depth) for j in idx if row[j] == want)

    total = 0
    profile = [0] * k

    def extend(i, depth):
        nonlocal total
        if depth == k:
            scaled = [r * t % p for t in profile]
            total += sum(count_matching_walks(scaled, y, 0) for y in idx)
            return
        row = D[i]
        for j in idx:
            if j != i:
                profile[depth] = row[j]
                extend(j, depth + 1)

    for x in idx:
        extend(x, 0)
    return total


def _nu_identity_scaled_walk_pairs(E: PointSet, r: int, k: int) -> int:
    if not _dilation_safe(E):
        raise WrongResidueClassError(
            "the step-profile identity needs d = 2 and p = 3 (mod 4)"
        )
    p = E.prime.p
    profiles = step_profile_counts(E, k, nonzero_only=True)
    total = 0
    for prof, count in profiles.items():
        scaled = tuple(r * t % p for t in prof)
        other = profiles.get(scaled)
        if other:
            total += count * other
    return total


def _walk_dp_scaled_pairs(E: PointSet, r: int, k: int) -> int:
    n = len(E)
    p = E.prime.p
    D = E.dist_table
    idx = range(n)
    vec = [[1] * n for _ in idx]  # vec[x][y], both walks at step i
    for _ in range(k):
        # colsum[x][y'] maps a squared step s to sum(vec[x][y] over y at distance s from y')
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
                if x == xp:
                    continue
                s = r * row[x] % p
                cs = colsum[x]
                for yp in idx:
                    v = cs[yp].get(s)
                    if v:
                        out[yp] += v
        vec = nxt
    return sum(map(sum, vec))


def count_scaled_walk_pairs(E: PointSet, ratio: Ratio, k: int, method: str = METHOD_WALK_DP) -> CountReport:
    """Pairs of k-step walks whose squared step lengths are in ratio r.

    The first walk must have distinct consecutive points; the second walk is
    unconstrained apart from the k scaled-length equations.  Methods: "brute"
    (guarded tuple enumeration), "nu_identity" (step-profile identity, valid
    for d = 2 and p = 3 mod 4), "walk_dp" (paired-state sweep, always valid).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if method == METHOD_BRUTE:
        value = _brute_scaled_walk_pairs(E, ratio.r, k)
    elif method == METHOD_NU_IDENTITY:
        value = _nu_identity_scaled_walk_pairs(E, ratio.r, k)
    elif method == METHOD_WALK_DP:
        value = _walk_dp_scaled_pairs(E, ratio.r, k)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _report(E, f"S_{k}", value, method, r=ratio.r, k=k)


def _brute_scaled_cycle_pairs(E: PointSet, r: int) -> int:
    n = len(E)
    if n**8 > BRUTE_GUARD:
        raise TooLargeError(f"brute force over {n}^8 tuples refused")
    p = E.prime.p
    D = E.dist_table
    idx = range(n)
    total = 0
    for x1 in idx:
        row1 = D[x1]
        for x2 in idx:
            if x2 == x1:
                continue
            t1 = r * row1[x2] % p
            row2 = D[x2]
            for x3 in idx:
                if x3 == x2:
                    continue
                t2 = r * row2[x3] % p
                row3 = D[x3]
                for x4 in idx:
                    if x4 == x3 or x4 == x1:
                        continue
                    t3 = r * row3[x4] % p
                    t4 = r * D[x4][x1] % p
                    for y1 in idx:
                        ry1 = D[y1]
                        for y2 in idx:
                            if ry1[y2] != t1:
                                continue
                            ry2 = D[y2]
                            for y3 in idx:
                                if ry2[y3] != t2:
                                    continue
                                ry3 = D[y3]
                                for y4 in idx:
                                    if ry3[y4] == t3 and D[y4][y1] == t4:
                                        total += 1
    return total


def _mu_identity_scaled_cycle_pairs(E: PointSet, r: int) -> int:
    # Splitting each closed 4-walk at its two opposite corners turns the
    # profile sum into a join over per-corner-pair 2-step histograms.
    if not _dilation_safe(E):
        raise WrongResidueClassError(
            "the closed-walk profile identity needs d = 2 and p = 3 (mod 4)"
        )
    n = len(E)
    p = E.prime.p
    D = E.dist_table
    idx = range(n)
    hists = {}
    for a in idx:
        row_a = D[a]
        for c in idx:
            h: dict[tuple[int, int], int] = {}
            for x in idx:
                t1 = row_a[x]
                if not t1:
                    continue
                t2 = D[x][c]
                if not t2:
                    continue
                key = (t1, t2)
                h[key] = h.get(key, 0) + 1
            hists[(a, c)] = h

    def join(h_first, h_second):
        total = 0
        for (t1, t2), cnt in h_first.items():
            other = h_second.get((r * t1 % p, r * t2 % p))
            if other:
                total += cnt * other
        return total

    q = {}
    for a in idx:
        for c in idx:
            h_ac = hists[(a, c)]
            for b in idx:
                for e in idx:
                    q[(a, c, b, e)] = join(h_ac, hists[(b, e)])
    return sum(
        q[(a, c, b, e)] * q[(c, a, e, b)]
        for a in idx for c in idx for b in idx for e in idx
    )


def count_scaled_cycle_pairs(E: PointSet, ratio: Ratio, method: str = METHOD_MU_IDENTITY) -> CountReport:
    """Pairs of closed 4-walks with squared step lengths in ratio r.

    The first cycle must have distinct consecutive points (including the
    wrap-around step); the second is unconstrained apart from the four
    scaled-length equations.
    """
    if method == METHOD_BRUTE:
        value = _brute_scaled_cycle_pairs(E, ratio.r)
    elif method == METHOD_MU_IDENTITY:
        value = _mu_identity_scaled_cycle_pairs(E, ratio.r)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _report(E, "C", value, method, r=ratio.r)


def count_ratio_quadruples(E: PointSet, ratio: Ratio) -> CountReport:
    """Quadruples (x, y, z, w) with norm(x-y) = r * norm(z-w) and norm(z-w) != 0.

    Unlike the scaled walk pairs this constrains the *norm* of z - w, not the
    points themselves, so the two counts can differ when nonzero vectors of
    norm zero exist.
    """
    p = E.prime.p
    counts = E.norm_pair_counts
    value = sum(
        counts.get(ratio.r * t % p, 0) * c for t, c in counts.items() if t != 0
    )
    return _report(E, "V", value, method=METHOD_NU_IDENTITY, r=ratio.r)


def displacement_histogram(E: PointSet, ratio: Ratio, theta: "OrthMatrix") -> dict[Point, int]:
    """For each z, the number of pairs (u, v) of E with u - sqrt(r)*theta*v = z."""
    if not ratio.is_square or ratio.sqrt_r is None:
        raise NotASquareRatioError(f"ratio {ratio.r} is not a nonzero square")
    p = E.prime.p
    hist: dict[Point, int] = {}
    images = [scaled_apply(theta, ratio.sqrt_r, v, p) for v in E.points]
    for w in images:
        for u in E.points:
            z = tuple((a - b) % p for a, b in zip(u, w))
            hist[z] = hist.get(z, 0) + 1
    return hist


def displacement_count(E: PointSet, ratio: Ratio, theta: "OrthMatrix", z: Point) -> int:
    """The number of pairs (u, v) of E with u - sqrt(r)*theta*v = z."""
    if not ratio.is_square or ratio.sqrt_r is None:
        raise NotASquareRatioError(f"ratio {ratio.r} is not a nonzero square")
    p = E.prime.p
    z = tuple(c % p for c in z)
    count = 0
    for v in E.points:
        w = scaled_apply(theta, ratio.sqrt_r, v, p)
        u = tuple((a + b) % p for a, b in zip(z, w))
        if u in E:
            count += 1
    return count


def walk_pair_reports(E: PointSet, ratio: Ratio, k: int, methods=("all",)) -> list[CountReport]:
    """Run the requested (or every applicable) method and cross-check them."""
    if "all" in methods:
        methods = [METHOD_WALK_DP]
        if len(E) ** (2 * k + 2) <= BRUTE_GUARD:
            methods.append(METHOD_BRUTE)
        if _dilation_safe(E):
            methods.append(METHOD_NU_IDENTITY)
    reports = [count_scaled_walk_pairs(E, ratio, k, m) for m in methods]
    _check_agreement(reports, E)
    return reports


def cycle_pair_reports(E: PointSet, ratio: Ratio, methods=("all",)) -> list[CountReport]:
    """Run the requested (or every applicable) method and cross-check them."""
    if "all" in methods:
        methods = []
        if _dilation_safe(E):
            methods.append(METHOD_MU_IDENTITY)
        if len(E) ** 8 <= BRUTE_GUARD:
            methods.append(METHOD_BRUTE)
        if not methods:
            raise TooLargeError("no applicable method for this instance")
    reports = [count_scaled_cycle_pairs(E, ratio, m) for m in methods]
    _check_agreement(reports, E)
    return reports


def _check_agreement(reports: list[CountReport], E: PointSet) -> None:
    values = {rep.value for rep in reports}
    if len(values) > 1:
        detail = ", ".join(f"{rep.method}={rep.value}" for rep in reports)
        raise MethodMismatchError(
            f"methods disagree on {reports[0].name} (p={E.prime.p}, d={E.d}, "
            f"n={len(E)}, r={reports[0].r}): {detail}; points={list(E.points)}"
        )
