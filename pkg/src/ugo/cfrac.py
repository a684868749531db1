"""Periodic continued fractions of quadratic irrationals and fundamental units.

Expansions come in two flavors: regular (floor steps) and minus /
Hirzebruch-Jung (ceiling steps, x = a0 - 1/(a1 - 1/...)).  All state
arithmetic is exact; periods are detected by the first repetition of the
(P, Q) state and are therefore minimal.  Fundamental units are read off the
convergent matrix accumulated over one full period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .intarith import squarefree_decomposition

_LOG_CUTOFF_BITS = 48


def _is_valid_discriminant(delta: int) -> bool:
    if delta == 0 or delta % 4 not in (0, 1):
        return False
    if delta > 0 and math.isqrt(delta) ** 2 == delta:
        return False
    return True


def _check_positive_discriminant(delta: int) -> None:
    if delta <= 0 or not _is_valid_discriminant(delta):
        raise ValueError(f"{delta} is not a positive quadratic discriminant")


def _is_fundamental(delta: int) -> bool:
    if not _is_valid_discriminant(delta):
        return False
    s, k = squarefree_decomposition(abs(delta))
    s = s if delta > 0 else -s
    return k == 1 if s % 4 == 1 else (k == 2 and (s % 4) in (2, 3))


@dataclass(frozen=True)
class QuadIrrational:
    """The real number (p + sqrt(d))/q with d > 0 nonsquare and q | d - p**2.

    Construction re-normalizes by scaling when q does not divide d - p**2, so
    every instance is in the canonical form the expansion loop relies on.
    """

    p: int
    q: int
    d: int

    def __post_init__(self):
        if self.q == 0:
            raise ValueError("q must be nonzero")
        if self.d <= 0 or math.isqrt(self.d) ** 2 == self.d:
            raise ValueError("d must be positive and not a perfect square")
        if (self.d - self.p * self.p) % self.q != 0:
            s = abs(self.q)
            object.__setattr__(self, "p", self.p * s)
            object.__setattr__(self, "d", self.d * s * s)
            object.__setattr__(self, "q", self.q * s)

    def value(self) -> float:
        return (self.p + math.sqrt(self.d)) / self.q


@dataclass(frozen=True)
class CFExpansion:
    """Eventually periodic continued fraction with a minimal period."""

    kind: str  # "regular" or "minus"
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def terms(self, count: int) -> list[int]:
        out = list(self.preperiod)
        i = 0
        while len(out) < count:
            out.append(self.period[i % len(self.period)])
            i += 1
        return out[:count]

    def evaluate(self, count: int = 50) -> float:
        # Backward float evaluation; stable since tail terms are >= 1 (>= 2
        # for the minus flavor), so intermediate values stay in (1, inf).
        ts = self.terms(count)
        sign = 1.0 if self.kind == "regular" else -1.0
        x = float(ts[-1])
        for a in reversed(ts[:-1]):
            x = a + sign / x
        return x


@dataclass(frozen=True)
class QuadUnit:
    """A unit (t + u*sqrt(delta))/2 of the order of discriminant delta."""

    t: int
    u: int
    delta: int
    norm: int
    regulator: float

    def __post_init__(self):
        if (self.t * self.t - self.u * self.u * self.delta) != 4 * self.norm:
            raise ValueError("t**2 - u**2*delta must equal 4*norm")


def _log_int(x: int) -> float:
    if x.bit_length() <= _LOG_CUTOFF_BITS:
        return math.log(x)
    e = x.bit_length() - _LOG_CUTOFF_BITS
    return math.log(x >> e) + e * math.log(2)


def log_embedding(t: int, u: int, delta: int) -> float:
    """log((t + u*sqrt(delta))/2) for t, u > 0, accurate to ~1e-15 relative."""
    if t.bit_length() < _LOG_CUTOFF_BITS and u * u * delta < (1 << 100):
        return math.log((t + math.sqrt(u * u * delta)) / 2)
    return _log_int(t + math.isqrt(u * u * delta)) - math.log(2)


def _canonical_cf(pre: tuple[int, ...], per: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    # Minimal cyclic period, then pull the period boundary as far left as it goes.
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per == per[:d] * (n // d):
            per = per[:d]
            break
    pre = list(pre)
    per = list(per)
    while pre and pre[-1] == per[-1]:
        pre.pop()
        per = [per[-1]] + per[:-1]
    return tuple(pre), tuple(per)


def _expand(x: QuadIrrational, minus: bool) -> CFExpansion:
    p, q, d = x.p, x.q, x.d
    r = math.isqrt(d)
    seen: dict[tuple[int, int], int] = {}
    quotients: list[int] = []
    while True:
        state = (p, q)
        if state in seen:
            j = seen[state]
            pre, per = _canonical_cf(tuple(quotients[:j]), tuple(quotients[j:]))
            return CFExpansion("minus" if minus else "regular", pre, per)
        seen[state] = len(quotients)
        if q > 0:
            a = (p + r) // q
        else:
            a = -((p + r) // (-q)) - 1
        if minus:
            a += 1
        quotients.append(a)
        p1 = a * q - p
        q1 = (p1 * p1 - d) // q if minus else (d - p1 * p1) // q
        p, q = p1, q1


def cf_expand(x: QuadIrrational) -> CFExpansion:
    """Regular continued fraction of x, with minimal preperiod and period."""
    return _expand(x, minus=False)


def hj_cf_expand(x: QuadIrrational) -> CFExpansion:
    """Minus (Hirzebruch-Jung) continued fraction of x."""
    return _expand(x, minus=True)


@lru_cache(maxsize=4096)
def fundamental_unit(delta: int) -> QuadUnit:
    """The smallest unit > 1 of the real quadratic order of discriminant delta.

    Runs the regular continued fraction of (delta mod 2 + sqrt(delta))/2 with
    convergent accumulation; the first state repetition yields the unit as a
    fixed Moebius transformation, exactly.
    """
    _check_positive_discriminant(delta)
    b0 = delta % 2
    p, q, d = b0, 2, delta
    r = math.isqrt(d)
    # seen[state] = (index, p_{k-1}, p_{k-2}, q_{k-1}, q_{k-2})
    seen: dict[tuple[int, int], tuple[int, int, int, int]] = {}
    pk1, pk2 = 1, 0
    qk1, qk2 = 0, 1
    while True:
        state = (p, q)
        if state in seen:
            a1, a2, b1_, b2_ = seen[state]
            # A = M_now * M_then^{-1}; bottom row (g, h) gives the unit g*w + h.
            det = a1 * b2_ - a2 * b1_
            g = det * (qk1 * b2_ - qk2 * b1_)
            h = det * (-qk1 * a2 + qk2 * a1)
            t = abs(g * b0 + 2 * h)
            u = abs(g)
            nrm4 = t * t - u * u * delta
            if nrm4 == 4:
                norm = 1
            elif nrm4 == -4:
                norm = -1
            else:  # pragma: no cover - guarded by exactness of the recursion
                raise ArithmeticError(f"unit recovery failed for delta={delta}")
            return QuadUnit(t, u, delta, norm, log_embedding(t, u, delta))
        seen[state] = (pk1, pk2, qk1, qk2)
        a = (p + r) // q if q > 0 else -((p + r) // (-q)) - 1
        pk1, pk2 = a * pk1 + pk2, pk1
        qk1, qk2 = a * qk1 + qk2, qk1
        p1 = a * q - p
        p, q = p1, (d - p1 * p1) // q


def regulator(delta: int) -> float:
    """log of the fundamental unit of the order of discriminant delta."""
    return fundamental_unit(delta).regulator


def _unit_pow(t1: int, u1: int, delta0: int, j: int) -> tuple[int, int]:
    # Exact binary powering of (t + u*sqrt(delta0))/2 coordinates.
    rt, ru = 2, 0
    bt, bu = t1, u1
    while j:
        if j & 1:
            rt, ru = (rt * bt + ru * bu * delta0) // 2, (rt * bu + ru * bt) // 2
        j >>= 1
        if j:
            bt, bu = (bt * bt + bu * bu * delta0) // 2, bt * bu
    return rt, ru


def unit_index(delta0: int, delta: int) -> int:
    """Exact index j with eps_delta = eps_delta0 ** j, for delta = f**2*delta0.

    The search runs the Lucas-style recurrence for the sqrt coefficients
    modulo the conductor; the winning exponent is then certified by exact
    integer powering.
    """
    _check_positive_discriminant(delta0)
    _check_positive_discriminant(delta)
    if not _is_fundamental(delta0):
        raise ValueError(f"{delta0} is not a fundamental discriminant")
    if delta % delta0 != 0:
        raise ValueError(f"{delta} is not of the form f**2*{delta0}")
    f = math.isqrt(delta // delta0)
    if f * f * delta0 != delta:
        raise ValueError(f"{delta} is not of the form f**2*{delta0}")
    if f == 1:
        return 1
    eps = fundamental_unit(delta0)
    t1, u1, nu = eps.t % f, eps.u % f, eps.norm
    # u_{j+1} = t1*u_j - norm*u_{j-1}; find the first j with f | u_j.
    prev, cur = 0, eps.u % f
    j = 1
    limit = 8 * f * f + 16
    while cur != 0:
        prev, cur = cur, (t1 * cur - nu * prev) % f
        j += 1
        if j > limit:  # pragma: no cover - rank of apparition always <= limit
            raise ArithmeticError(f"unit index search overran for {delta0}, f={f}")
    tj, uj = _unit_pow(eps.t, eps.u, delta0, j)
    if uj % f != 0:  # pragma: no cover - certification of the modular search
        raise ArithmeticError(f"unit index certification failed for {delta0}, f={f}")
    return j


def _parametric_forms(family: str, n: int) -> tuple[tuple, tuple, tuple, tuple]:
    # (regular pre, regular per, minus pre, minus per) for the generating unit.
    if family == "plus":
        reg = ((n - 1,), (1, n - 2))
        mnu = ((), (n,))
    else:
        reg = ((), (n,))
        mnu = ((n + 1,), tuple([2] * (n - 1)) + (n + 2,))
    return reg + mnu


def verify_parametric_cf(param) -> bool:
    """Check both expansions of a generating unit against their closed forms.

    Both sides are put in canonical form (minimal period, earliest period
    start) before comparison, which absorbs the period collapse at small n.
    """
    if not param.is_real:
        raise ValueError("parametric expansions apply to real parameters only")
    n = param.n
    delta = n * n - 4 if param.family == "plus" else n * n + 4
    x = QuadIrrational(n, 2, delta)
    rp, rq, mp_, mq = _parametric_forms(param.family, n)
    want_reg = _canonical_cf(rp, rq)
    want_mnu = _canonical_cf(mp_, mq)
    got_reg = cf_expand(x)
    got_mnu = hj_cf_expand(x)
    return (got_reg.preperiod, got_reg.period) == want_reg and (
        got_mnu.preperiod,
        got_mnu.period,
    ) == want_mnu
