"""One-shot verdicts for the claim catalog, and empirical threshold scans.

Every claim is checked on a concrete instance with exact arithmetic: integer
counts on one side, rational closed forms on the other.  Irrational size
thresholds are decided by integer squaring, never by floating point.  A claim
whose size hypothesis fails on the instance yields a VACUOUS verdict (with
the conclusion still evaluated when feasible); a verdict that is
hypothesis-met but conclusion-false would contradict the catalog and is
treated by callers as the most severe failure.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .configcount import (
    Ratio,
    cycle_pair_reports,
    make_ratio,
    step_profile_counts,
    _nu_identity_scaled_walk_pairs,
    _walk_dp_scaled_pairs,
)
from .errors import MethodMismatchError, TooLargeError
from .families import (
    FAMILY_FOUR_CYCLE,
    FAMILY_PATH_PAIRS,
    FAMILY_SIMPLEX,
    FAMILY_TRIANGLE,
    find_clique_pair_witness,
    find_cycle_pair_witness,
    find_path_pair_witness,
    four_cycle_families,
)
from .field import Prime, make_prime, squares_set
from .geometry import PointSet, distance_set, quotient_set, random_point_set

CLAIM_NAMES = (
    "lemma2.2",
    "lemma2.3",
    "lemma2.4",
    "lemma2.6",
    "lemma4.2",
    "T1.5",
    "T1.6",
    "T1.7",
    "T1.8",
    "T1.10",
    "quotient",
)

THEOREM_NAMES = ("T1.5", "T1.6", "T1.7", "T1.8", "T1.10")


@dataclass(frozen=True)
class Verdict:
    """Outcome of one claim on one instance, with exact arithmetic kept."""

    claim: str
    hypothesis_met: bool
    conclusion_holds: bool | None
    lhs: Fraction | int | None
    rhs: Fraction | int | None
    params: dict = field(default_factory=dict)

    CSV_HEADER = "claim,p,d,E_size,r,k,hypothesis_met,conclusion_holds,status,lhs,rhs"

    @property
    def status(self) -> str:
        if not self.hypothesis_met:
            return "VACUOUS"
        if self.conclusion_holds is None:
            return "UNKNOWN"
        return "HOLDS" if self.conclusion_holds else "FAILED"

    @property
    def contradicts_catalog(self) -> bool:
        return self.hypothesis_met and self.conclusion_holds is False

    def csv_row(self) -> str:
        get = self.params.get
        cells = [
            self.claim,
            get("p", ""),
            get("d", ""),
            get("E_size", ""),
            get("r", ""),
            get("k", ""),
            self.hypothesis_met,
            "" if self.conclusion_holds is None else self.conclusion_holds,
            self.status,
            "" if self.lhs is None else self.lhs,
            "" if self.rhs is None else self.rhs,
        ]
        return ",".join(str(c) for c in cells)

    def json_dict(self) -> dict:
        return {
            "claim": self.claim,
            "hypothesis_met": self.hypothesis_met,
            "conclusion_holds": self.conclusion_holds,
            "status": self.status,
            "lhs": None if self.lhs is None else str(self.lhs),
            "rhs": None if self.rhs is None else str(self.rhs),
            "params": {k: str(v) for k, v in self.params.items()},
        }


def _base_params(E: PointSet, ratio: Ratio | None = None, **extra) -> dict:
    params = {"p": E.prime.p, "d": E.d, "E_size": len(E)}
    if ratio is not None:
        params["r"] = ratio.r
    params.update(extra)
    return params


def _pair_count_checked(E: PointSet, r: int, k: int) -> int:
    """Scaled walk-pair count by the sweep, cross-checked by the identity."""
    value = _walk_dp_scaled_pairs(E, r, k)
    if E.d == 2 and E.prime.p_mod_4 == 3:
        alt = _nu_identity_scaled_walk_pairs(E, r, k)
        if alt != value:
            raise MethodMismatchError(
                f"pair-count methods disagree: walk_dp={value} identity={alt}"
            )
    return value


# ---------------------------------------------------------------------------
# exact threshold arithmetic (integer certificates, no floats)


def exceeds_sqrt3_plus_one(n: int, p: int) -> bool:
    """n > (sqrt(3) + 1) * p, decided by squaring."""
    return n > p and (n - p) ** 2 > 3 * p * p


def exceeds_4_sqrt3_p32(n: int, p: int) -> bool:
    """n > 4 * sqrt(3) * p^(3/2), decided by squaring."""
    return n * n > 48 * p**3


def meets_triangle_size(n: int, p: int) -> bool:
    return n >= 3 * p


def meets_simplex_size(n: int, p: int, d: int) -> bool:
    """n >= (d + 1) * p^(d/2), decided by squaring."""
    return n * n >= (d + 1) ** 2 * p**d


def exceeds_twice_p(n: int, p: int) -> bool:
    return n > 2 * p


def meets_quotient_size(n: int, p: int, d: int) -> bool:
    """n >= 9 * p^(d/2) for even d, n >= 6 * p^(d/2) for odd d."""
    c = 9 if d % 2 == 0 else 6
    return n * n >= c * c * p**d


def smallest_size_meeting(family: str, prime: Prime, d: int) -> int | None:
    """Least set size satisfying the family's theorem hypothesis, if any fits."""
    space = prime.p**d
    tests = {
        FAMILY_PATH_PAIRS: lambda n: exceeds_sqrt3_plus_one(n, prime.p),
        FAMILY_FOUR_CYCLE: lambda n: exceeds_4_sqrt3_p32(n, prime.p),
        FAMILY_TRIANGLE: lambda n: meets_triangle_size(n, prime.p),
        FAMILY_SIMPLEX: lambda n: meets_simplex_size(n, prime.p, d),
    }
    test = tests[family]
    for n in range(1, space + 1):
        if test(n):
            return n
    return None


# ---------------------------------------------------------------------------
# claim checkers


def check_lemma22(E: PointSet, ratio: Ratio) -> Verdict:
    """One-step pair count against its quartic floor (d = 2, p = 3 mod 4)."""
    p = E.prime.p
    n = len(E)
    hyp = E.d == 2 and E.prime.p_mod_4 == 3
    s1 = _pair_count_checked(E, ratio.r, 1) if hyp else _walk_dp_scaled_pairs(E, ratio.r, 1)
    rhs = (
        (Fraction(1, p) + Fraction(1, p**2) - Fraction(1, p**3)) * n**4
        - Fraction(2 * n**3, p)
        - (p + 1) * n**2
    )
    return Verdict(
        claim="lemma2.2",
        hypothesis_met=hyp,
        conclusion_holds=Fraction(s1) >= rhs,
        lhs=s1,
        rhs=rhs,
        params=_base_params(E, ratio, k=1),
    )


def check_lemma23(E: PointSet, ratio: Ratio) -> Verdict:
    """Two-step pair count times |E|^2 is at least the square of one-step."""
    n = len(E)
    s1 = _pair_count_checked(E, ratio.r, 1)
    s2 = _pair_count_checked(E, ratio.r, 2)
    lhs = s2 * n**2
    rhs = s1**2
    return Verdict(
        claim="lemma2.3",
        hypothesis_met=True,  # the graph-side argument covers every nonzero r
        conclusion_holds=lhs >= rhs,
        lhs=lhs,
        rhs=rhs,
        params=_base_params(E, ratio),
    )


def check_lemma24(E: PointSet, ratio: Ratio) -> Verdict:
    """Cycle-pair count times |E|^4 is at least the square of two-step pairs."""
    n = len(E)
    s2 = _pair_count_checked(E, ratio.r, 2)
    c = cycle_pair_reports(E, ratio)[0].value
    lhs = c * n**4
    rhs = s2**2
    return Verdict(
        claim="lemma2.4",
        hypothesis_met=True,
        conclusion_holds=lhs >= rhs,
        lhs=lhs,
        rhs=rhs,
        params=_base_params(E, ratio),
    )


def check_lemma26(E: PointSet) -> Verdict:
    """Two-step walk counts never exceed |E| times the one-step count."""
    p = E.prime.p
    n = len(E)
    nu1 = step_profile_counts(E, 1, nonzero_only=False)
    nu2 = step_profile_counts(E, 2, nonzero_only=False)
    worst = None
    for t1 in range(p):
        one = nu1.get((t1,), 0)
        for t2 in range(p):
            margin = n * one - nu2.get((t1, t2), 0)
            if worst is None or margin < worst:
                worst = margin
    return Verdict(
        claim="lemma2.6",
        hypothesis_met=True,
        conclusion_holds=worst >= 0,
        lhs=worst,
        rhs=0,
        params=_base_params(E),
    )


def check_lemma42(E: PointSet, ratio: Ratio) -> Verdict:
    """Each coincidence family sits between |S_2| and (p+1)|S_2|."""
    p = E.prime.p
    hyp = E.d == 2 and E.prime.p_mod_4 == 3
    fams = four_cycle_families(E, ratio)
    s2 = _pair_count_checked(E, ratio.r, 2)
    values = (fams.x13, fams.x24, fams.y13, fams.y24)
    concl = all(s2 <= v <= (p + 1) * s2 for v in values)
    return Verdict(
        claim="lemma4.2",
        hypothesis_met=hyp,
        conclusion_holds=concl,
        lhs=min(values),
        rhs=(p + 1) * s2,
        params=_base_params(E, ratio, s2=s2, families=values),
    )


def _positivity_verdict(claim: str, E: PointSet, ratio: Ratio, hyp: bool, witness) -> Verdict:
    found = witness is not None
    params = _base_params(E, ratio)
    if found:
        params["witness"] = witness
    return Verdict(
        claim=claim,
        hypothesis_met=hyp,
        conclusion_holds=found,
        lhs=1 if found else 0,
        rhs=0,
        params=params,
    )


def check_theorem(name: str, E: PointSet, ratio: Ratio, k: int = 3) -> Verdict:
    """Evaluate one of the headline existence/size claims on an instance.

    The hypothesis is evaluated exactly (residue class, squareness, and the
    size threshold via integer certificates); the conclusion is computed
    regardless, by exhaustive witness search for the existence claims and by
    exact rational comparison for the T1.10 floor.
    """
    p = E.prime.p
    n = len(E)
    plane = E.d == 2
    residue = E.prime.p_mod_4 == 3
    if name == "T1.5":
        hyp = plane and residue and exceeds_sqrt3_plus_one(n, p)
        witness = find_path_pair_witness(E, ratio, 2)
        return _positivity_verdict(name, E, ratio, hyp, witness)
    if name == "T1.6":
        hyp = plane and residue and exceeds_4_sqrt3_p32(n, p)
        witness = find_cycle_pair_witness(E, ratio)
        return _positivity_verdict(name, E, ratio, hyp, witness)
    if name == "T1.7":
        hyp = plane and ratio.is_square and meets_triangle_size(n, p)
        witness = find_clique_pair_witness(E, ratio, 3)
        return _positivity_verdict(name, E, ratio, hyp, witness)
    if name == "T1.8":
        hyp = E.d >= 2 and ratio.is_square and meets_simplex_size(n, p, E.d)
        witness = find_clique_pair_witness(E, ratio, E.d + 1)
        return _positivity_verdict(name, E, ratio, hyp, witness)
    if name == "T1.10":
        hyp = plane and residue and exceeds_twice_p(n, p)
        sk = _pair_count_checked(E, ratio.r, k)
        lhs = Fraction(sk)
        rhs = Fraction(n ** (2 * k + 2), (3 * p) ** k)
        return Verdict(
            claim=name,
            hypothesis_met=hyp,
            conclusion_holds=lhs > rhs,
            lhs=lhs,
            rhs=rhs,
            params=_base_params(E, ratio, k=k),
        )
    raise ValueError(f"unknown theorem {name!r}")


def check_quotient_containment(E: PointSet) -> Verdict:
    """Quotients of distances fill the field (even d) or its squares (odd d).

    The even-d claim needs |E| >= 9 p^(d/2), the odd-d one |E| >= 6 p^(d/2);
    both hypotheses are decided by squaring.  The containment itself is
    always computed.
    """
    p = E.prime.p
    n = len(E)
    hyp = meets_quotient_size(n, p, E.d)
    deltas = distance_set(E)
    if deltas == {0}:
        quotients: frozenset[int] = frozenset()
    else:
        quotients = quotient_set(E)
    if E.d % 2 == 0:
        concl = quotients == frozenset(range(p))
        target = "field"
    else:
        concl = frozenset(squares_set(E.prime)) <= quotients
        target = "squares"
    return Verdict(
        claim="quotient",
        hypothesis_met=hyp,
        conclusion_holds=concl,
        lhs=len(quotients),
        rhs=p if target == "field" else (p + 1) // 2,
        params=_base_params(E, target=target),
    )


def run_claim(name: str, E: PointSet, ratio: Ratio | None = None, k: int = 3) -> Verdict:
    """Dispatch a claim by its catalog name."""
    if name == "lemma2.6":
        return check_lemma26(E)
    if name == "quotient":
        return check_quotient_containment(E)
    if ratio is None:
        raise ValueError(f"claim {name!r} needs a ratio")
    if name == "lemma2.2":
        return check_lemma22(E, ratio)
    if name == "lemma2.3":
        return check_lemma23(E, ratio)
    if name == "lemma2.4":
        return check_lemma24(E, ratio)
    if name == "lemma4.2":
        return check_lemma42(E, ratio)
    if name in THEOREM_NAMES:
        return check_theorem(name, E, ratio, k=k)
    raise ValueError(f"unknown claim {name!r}")


# ---------------------------------------------------------------------------
# threshold scans


@dataclass(frozen=True)
class ScanResult:
    """Per-size positivity fractions for one family, plus both thresholds."""

    p: int
    d: int
    family: str
    r_policy: str
    sizes: tuple[int, ...]
    fractions: tuple[Fraction, ...]
    samples: int
    seed: int
    min_stable_size: int | None
    theoretical_threshold: int | None

    CSV_HEADER = "family,p,d,r_policy,size,samples,positive,fraction,seed"

    def csv_rows(self) -> list[str]:
        rows = []
        for size, frac in zip(self.sizes, self.fractions):
            positive = frac.numerator * self.samples // frac.denominator
            rows.append(
                f"{self.family},{self.p},{self.d},{self.r_policy},{size},"
                f"{self.samples},{positive},{frac},{self.seed}"
            )
        return rows

    def json_dict(self) -> dict:
        return {
            "family": self.family,
            "p": self.p,
            "d": self.d,
            "r_policy": self.r_policy,
            "samples": self.samples,
            "seed": self.seed,
            "sizes": list(self.sizes),
            "fractions": [str(f) for f in self.fractions],
            "min_stable_size": self.min_stable_size,
            "theoretical_threshold": self.theoretical_threshold,
        }


def ratios_for_policy(policy: str, prime: Prime) -> list[Ratio]:
    if policy == "all":
        values = range(1, prime.p)
    elif policy == "squares":
        values = sorted(s for s in squares_set(prime) if s != 0)
    elif policy.startswith("r="):
        values = [int(policy[2:])]
    else:
        raise ValueError(f"unknown ratio policy {policy!r}")
    return [make_ratio(v, prime) for v in values]


def family_has_witness(E: PointSet, ratio: Ratio, family: str) -> bool:
    if family == FAMILY_PATH_PAIRS:
        return find_path_pair_witness(E, ratio, 2) is not None
    if family == FAMILY_FOUR_CYCLE:
        return find_cycle_pair_witness(E, ratio) is not None
    if family == FAMILY_TRIANGLE:
        return find_clique_pair_witness(E, ratio, 3) is not None
    if family == FAMILY_SIMPLEX:
        return find_clique_pair_witness(E, ratio, E.d + 1) is not None
    raise ValueError(f"unknown family {family!r}")


def _scan_cell(args) -> tuple[int, int, bool]:
    p, d, family, policy, size, sample_index, seed = args
    prime = make_prime(p)
    cell_seed = f"scan:{seed}:{size}:{sample_index}"
    E = random_point_set(prime, d, size, cell_seed)
    positive = all(
        family_has_witness(E, ratio, family) for ratio in ratios_for_policy(policy, prime)
    )
    return size, sample_index, positive


def scan_threshold(
    prime: Prime,
    d: int,
    family: str,
    r_policy: str,
    sizes,
    samples: int,
    seed: int,
    threads: int = 1,
) -> ScanResult:
    """Fraction of seeded random sets whose family count is positive, per size.

    A sample counts as positive only if every ratio allowed by the policy has
    a witness.  Cell seeds are derived from (seed, size, sample index), so
    results do not depend on the worker count.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    sizes = tuple(sizes)
    if not sizes:
        raise ValueError("empty size range")
    space = prime.p**d
    if any(not 1 <= s <= space for s in sizes):
        raise TooLargeError(f"sizes must fit the {space}-point space")
    cells = [
        (prime.p, d, family, r_policy, size, i, seed)
        for size in sizes
        for i in range(samples)
    ]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_scan_cell, cells, chunksize=8))
    else:
        outcomes = [_scan_cell(cell) for cell in cells]
    positive: dict[int, int] = {size: 0 for size in sizes}
    for size, _, ok in outcomes:
        positive[size] += ok
    fractions = tuple(Fraction(positive[size], samples) for size in sizes)

    min_stable = None
    for size, frac in zip(reversed(sizes), reversed(fractions)):
        if frac == 1:
            min_stable = size
        else:
            break
    return ScanResult(
        p=prime.p,
        d=d,
        family=family,
        r_policy=r_policy,
        sizes=sizes,
        fractions=fractions,
        samples=samples,
        seed=seed,
        min_stable_size=min_stable,
        theoretical_threshold=smallest_size_meeting(family, prime, d),
    )


def random_instances(prime: Prime, d: int, count: int, size, seed, r_values=None):
    """Deterministic stream of (E, ratio) instances for batch verification."""
    rng = random.Random(f"instances:{prime.p}:{d}:{count}:{size}:{seed}")
    sizes = size if isinstance(size, (list, tuple, range)) else [size]
    out = []
    for i in range(count):
        n = sizes[i % len(sizes)]
        E = random_point_set(prime, d, n, f"{seed}:{i}")
        if r_values is None:
            r = rng.randrange(1, prime.p)
        else:
            r = r_values[i % len(r_values)]
        out.append((E, make_ratio(r, prime)))
    return out
