"""Exact arithmetic in the prime field Z/pZ.

Field elements are plain Python integers kept in canonical form, i.e. in
[0, p-1]; a :class:`Prime` bundles the modulus with its cached residue-class
facts.  Everything here is referentially transparent, so the functions can be
called freely from concurrent workers.
"""

from dataclasses import dataclass

from .errors import EvenPrimeError, NotASquareError, NotPrimeError


def _is_prime(n: int) -> bool:
    # Trial division; desk-scale moduli only.
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Prime:
    """An odd prime together with cached residue-class facts.

    ``legendre_minus_one`` is +1 exactly when p = 1 (mod 4), i.e. when -1 is
    a square mod p, and -1 when p = 3 (mod 4).
    """

    p: int
    p_mod_4: int
    legendre_minus_one: int

    def __int__(self) -> int:
        return self.p

    def __str__(self) -> str:
        return str(self.p)


def make_prime(n: int) -> Prime:
    """Validate that n is an odd prime and cache its residue facts."""
    if n == 2:
        raise EvenPrimeError("p = 2 is not supported; an odd prime is required")
    if not _is_prime(n):
        raise NotPrimeError(f"{n} is not prime")
    return Prime(p=n, p_mod_4=n % 4, legendre_minus_one=1 if n % 4 == 1 else -1)


def legendre(a: int, prime: Prime) -> int:
    """Quadratic character of a mod p: 0 for 0, +1 for squares, -1 otherwise."""
    p = prime.p
    a %= p
    if a == 0:
        return 0
    e = pow(a, (p - 1) // 2, p)
    return 1 if e == 1 else -1


def inverse(a: int, prime: Prime) -> int:
    """Multiplicative inverse of a nonzero element."""
    a %= prime.p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    return pow(a, -1, prime.p)


def _tonelli_shanks(a: int, p: int) -> int:
    """General square root mod an odd prime; assumes a is a nonzero square."""
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    # find a nonresidue deterministically
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2 = t
        i = 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t = t * c % p
        r = r * b % p
    return r


def sqrt_mod(a: int, prime: Prime) -> int:
    """Canonical square root of a mod p: the smaller of the two roots.

    Uses the a^((p+1)/4) fast path when p = 3 (mod 4) and Tonelli-Shanks
    otherwise.  Raises NotASquareError for quadratic nonresidues.
    """
    p = prime.p
    a %= p
    if a == 0:
        return 0
    if legendre(a, prime) != 1:
        raise NotASquareError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        r = _tonelli_shanks(a, p)
    return min(r, p - r)


def squares_set(prime: Prime) -> frozenset[int]:
    """The set {a^2 : a in Z/pZ}; has (p+1)/2 elements including 0."""
    p = prime.p
    return frozenset(a * a % p for a in range(p // 2 + 1))
