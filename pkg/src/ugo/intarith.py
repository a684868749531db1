"""Exact integer utilities: factorization, primality, multiplicative functions.

Everything here is deterministic.  Factorization combines trial division by
sieved small primes, a strong-pseudoprime test with a witness set that is
provably correct for the full supported input range, and Brent's cycle-finding
split (applied recursively, so cofactors with three or more large prime
factors are handled).  Inputs are capped at 2**62.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_INPUT = 1 << 62

# Euler-Mascheroni constant (math module has no named constant for it).
EULER_GAMMA = 0.5772156649015329

# Strong-pseudoprime witnesses: deterministic for n < 3.3e24, far above 2**62.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_BOUND = 1 << 16


class RangeError(ValueError):
    """Input outside the supported integer range."""


@dataclass(frozen=True)
class Factorization:
    """Prime factorization ``sign * prod(p**e)`` with ascending primes."""

    sign: int
    pairs: tuple[tuple[int, int], ...]

    def value(self) -> int:
        v = self.sign
        for p, e in self.pairs:
            v *= p**e
        return v

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def __iter__(self):
        return iter(self.pairs)


_prime_sieve_limit = 0
_prime_list: list[int] = []
_prime_set: set[int] = set()


def _extend_primes(limit: int) -> None:
    global _prime_sieve_limit, _prime_list, _prime_set
    if limit <= _prime_sieve_limit:
        return
    limit = max(limit, 1 << 10, 2 * _prime_sieve_limit)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    _prime_list = [int(p) for p in np.nonzero(mask)[0]]
    _prime_set = set(_prime_list)
    _prime_sieve_limit = limit


def primes_up_to(limit: int) -> list[int]:
    """Sorted primes <= limit (sieved once, grown on demand)."""
    _extend_primes(limit)
    if _prime_sieve_limit == limit:
        return list(_prime_list)
    import bisect

    return _prime_list[: bisect.bisect_right(_prime_list, limit)]


_spf_array: np.ndarray | None = None


def spf_table(limit: int) -> np.ndarray:
    """Smallest-prime-factor table covering 0..limit (spf[1] = 1).

    Grown on demand; indexing with an integer n in range gives its smallest
    prime factor, which lets callers factor many small integers quickly.
    """
    global _spf_array
    if _spf_array is None or len(_spf_array) <= limit:
        size = max(limit + 1, 1 << 16)
        spf = np.zeros(size, dtype=np.int32)
        for p in range(2, math.isqrt(size - 1) + 1):
            if spf[p] == 0:
                sl = spf[p * p :: p]
                sl[sl == 0] = p
        rest = np.nonzero(spf == 0)[0]
        spf[rest] = rest
        spf[0] = 0
        spf[1] = 1
        _spf_array = spf
    return _spf_array


def is_prime(m: int) -> bool:
    """Deterministic primality test for 1 <= m <= 2**62."""
    if not 1 <= m <= MAX_INPUT:
        raise RangeError(f"is_prime: input {m} outside [1, 2**62]")
    if m < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % p == 0:
            return m == p
    d = m - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    for a in _MR_WITNESSES:
        x = pow(a, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(r - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    # Brent's variant of Pollard rho; deterministic parameter schedule.
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
        c += 1


def _factor_into(m: int, out: dict[int, int]) -> None:
    if m == 1:
        return
    if is_prime(m):
        out[m] = out.get(m, 0) + 1
        return
    d = _brent_rho(m)
    _factor_into(d, out)
    _factor_into(m // d, out)


def factor(m: int) -> Factorization:
    """Factor a positive integer m <= 2**62."""
    if not 1 <= m <= MAX_INPUT:
        raise RangeError(f"factor: input {m} outside [1, 2**62]")
    out: dict[int, int] = {}
    if m > 1:
        _extend_primes(_TRIAL_BOUND)
        for p in _prime_list:
            if p * p > m:
                break
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                out[p] = e
        if m > 1:
            if m <= _TRIAL_BOUND * _TRIAL_BOUND or is_prime(m):
                out[m] = out.get(m, 0) + 1
            else:
                _factor_into(m, out)
    return Factorization(1, tuple(sorted(out.items())))


def omega(m: int) -> int:
    """Number of distinct primes dividing m."""
    return len(factor(m).pairs)


def euler_phi(f: int) -> int:
    """Euler totient of f >= 1."""
    result = 1
    for p, e in factor(f).pairs:
        result *= p ** (e - 1) * (p - 1)
    return result


def rosser_schoenfeld_ell(n: int) -> float:
    """The totient lower-bound scale e^gamma*loglog n + 5/(2 loglog n)."""
    if n < 3:
        raise ValueError("rosser_schoenfeld_ell requires n >= 3")
    ll = math.log(math.log(n))
    return math.exp(EULER_GAMMA) * ll + 5.0 / (2.0 * ll)


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a|n) with the standard conventions at 2 and -1."""
    if n == 0:
        raise ValueError("kronecker_symbol undefined for n = 0")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        t = 0
        while n % 2 == 0:
            n //= 2
            t += 1
        if t % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def squarefree_decomposition(m: int) -> tuple[int, int]:
    """Write m = s * k**2 with s squarefree; returns (s, k)."""
    s = k = 1
    for p, e in factor(m).pairs:
        if e % 2:
            s *= p
        k *= p ** (e // 2)
    return s, k


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (g, x, y) with a*x + b*y = g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        return -old_r, -old_x, -old_y
    return old_r, old_x, old_y


@lru_cache(maxsize=None)
def sqrt_mod_prime(a: int, p: int) -> int | None:
    """A square root of a modulo prime p, or None if a is a non-residue."""
    a %= p
    if p == 2 or a == 0:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    if p % 8 == 5:
        x = pow(a, (p + 3) // 8, p)
        if x * x % p != a:
            x = x * pow(2, (p - 1) // 4, p) % p
        return x
    # Tonelli-Shanks for p = 1 mod 8.
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r
