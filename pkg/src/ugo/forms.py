"""Binary quadratic forms: reduction, rho-cycles, composition, class groups.

For positive discriminants the narrow class group is materialized by
enumerating all primitive reduced forms (a divisor sweep over the middle
coefficient) and partitioning them into rho-cycles; the wide group is the
quotient by the class of the negative principal form.  For the two-power
structure of a group, elements of maximal order are split off greedily.

The enumeration factors (delta - b**2)/4 either through a shared
smallest-prime-factor table (small discriminants) or through a per-
discriminant quadratic-residue sieve (large ones); both paths are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from . import cfrac
from .intarith import factor, primes_up_to, spf_table, sqrt_mod_prime, xgcd

_SPF_CAP = 1 << 23

NARROW = "narrow"
WIDE = "wide"


class BQF(NamedTuple):
    """Integral binary quadratic form a*x**2 + b*x*y + c*y**2."""

    a: int
    b: int
    c: int

    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return math.gcd(self.a, self.b, self.c) == 1


@dataclass(frozen=True)
class ClassGroupStructure:
    """Elementary divisor chain d1 | d2 | ... | dk with product = order."""

    order: int
    divisors: tuple[int, ...]
    flavor: str

    def __post_init__(self):
        prod = 1
        for d in self.divisors:
            prod *= d
        if prod != self.order:
            raise ValueError("divisors must multiply to the group order")
        for x, y in zip(self.divisors, self.divisors[1:]):
            if y % x != 0:
                raise ValueError("divisors must form a divisibility chain")

    def is_two_torsion(self) -> bool:
        return all(d == 2 for d in self.divisors)

    def __str__(self) -> str:
        return "x".join(str(d) for d in self.divisors) if self.divisors else "1"


def _check_discriminant(delta: int) -> None:
    if delta == 0 or delta % 4 not in (0, 1) or (
        delta > 0 and math.isqrt(delta) ** 2 == delta
    ):
        raise ValueError(f"{delta} is not a quadratic discriminant")


def principal_form(delta: int) -> BQF:
    """The identity class representative (1, delta mod 2, ...)."""
    _check_discriminant(delta)
    b0 = delta % 2
    return BQF(1, b0, (b0 * b0 - delta) // 4)


def is_reduced(form: BQF, delta: int) -> bool:
    """Reduction test; exact integer comparisons only."""
    a, b, c = form
    if b * b - 4 * a * c != delta:
        raise ValueError("form does not have the stated discriminant")
    if delta > 0:
        w = math.isqrt(delta)
        if not 0 < b <= w:
            return False
        d1 = 2 * abs(a)
        return (d1 + b) ** 2 > delta and (d1 <= b or (d1 - b) ** 2 < delta)
    if a <= 0 or not -a < b <= a or a > c:
        return False
    return b >= 0 or (abs(b) != a and a != c)


def _rho_step(delta: int, w: int, b: int, c: int) -> tuple[int, int]:
    # New (b', c') for the successor form (c, b', c') of a reduced form.
    ca = c if c >= 0 else -c
    m2 = ca << 1
    nb = w - ((w + b) % m2)
    return nb, (nb * nb - delta) // (4 * c)


def rho(form: BQF, delta: int) -> BQF:
    """Cycle successor of a reduced indefinite form."""
    if delta <= 0:
        raise ValueError("rho is defined for positive discriminants")
    if not is_reduced(form, delta):
        raise ValueError(f"rho requires a reduced form, got {form}")
    w = math.isqrt(delta)
    nb, nc = _rho_step(delta, w, form.b, form.c)
    return BQF(form.c, nb, nc)


def _reduce_indefinite(delta: int, w: int, a: int, b: int, c: int) -> tuple[int, int, int]:
    for _ in range(100000):
        aa = a if a >= 0 else -a
        d1 = aa + aa
        if 0 < b <= w and (d1 + b) ** 2 > delta and (d1 <= b or (d1 - b) ** 2 < delta):
            return a, b, c
        ca = c if c >= 0 else -c
        m2 = ca << 1
        if ca > w:
            nb = (-b) % m2
            if nb > ca:
                nb -= m2
        else:
            nb = w - ((w + b) % m2)
        a, b, c = c, nb, (nb * nb - delta) // (4 * c)
    raise ArithmeticError(f"reduction did not terminate for discriminant {delta}")


def _reduce_definite(a: int, b: int, c: int) -> tuple[int, int, int]:
    while True:
        if not -a < b <= a:
            r = (a - b) // (2 * a)
            b, c = b + 2 * r * a, a * r * r + b * r + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return a, b, c


def reduce(form: BQF, delta: int) -> BQF:
    """A reduced form properly equivalent to the given primitive form."""
    a, b, c = form
    if b * b - 4 * a * c != delta:
        raise ValueError("form does not have the stated discriminant")
    if math.gcd(a, b, c) != 1:
        raise ValueError(f"{form} is imprimitive; only invertible classes form the group")
    if delta > 0:
        w = math.isqrt(delta)
        return BQF(*_reduce_indefinite(delta, w, a, b, c))
    if a <= 0:
        raise ValueError("negative definite form; class groups use a > 0")
    return BQF(*_reduce_definite(a, b, c))


def _solve_linear(a: int, b: int, m: int) -> tuple[int, int]:
    # x with a*x = b (mod m), m > 0; returns (x0, step) describing x0 + step*Z.
    g, inv, _ = xgcd(a, m)
    if b % g:
        raise ArithmeticError("linear congruence has no solution")
    step = m // g
    return (b // g * inv) % step, step


def _compose_raw(f1: tuple[int, int, int], f2: tuple[int, int, int]) -> tuple[int, int, int]:
    # Gauss/Dirichlet composition; requires positive leading coefficients.
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    g = (b1 + b2) >> 1
    h = (b2 - b1) >> 1
    w = math.gcd(a1, a2, g)
    s = a1 // w
    t = a2 // w
    u = g // w
    st = s * t
    k0, step = _solve_linear(t * u, h * u + s * c1, st)
    n0, _ = _solve_linear(t * step, h - t * k0, s)
    k = k0 + step * n0
    l = (t * k - h) // s
    m = (t * u * k - h * u - s * c1) // st
    return st, w * u - (k * t + l * s), k * l - w * m


class _ClassData:
    """All reduced-form cycle data for one discriminant."""

    __slots__ = (
        "delta",
        "w",
        "h_plus",
        "h",
        "index",
        "stride",
        "forms_a",
        "forms_b",
        "forms_c",
        "orbit",
        "pos_rep",
        "canon",
        "principal",
        "tau",
        "ratio_one",
        "_compose_memo",
        "_square_ids",
    )

    def __init__(self, delta: int):
        self.delta = delta
        self._compose_memo: dict[tuple[int, int], int] = {}
        self._square_ids: list[int] | None = None
        if delta > 0:
            self._build_real()
        else:
            self._build_imaginary()

    # -- enumeration -----------------------------------------------------

    def _positive_forms(self):
        delta = self.delta
        w = self.w
        b0 = 2 - (delta & 1)
        if b0 > w:
            return [], [], []
        support = [p for p, e in factor(delta).pairs if e >= 2]
        nmax = (delta - b0 * b0) >> 2
        if nmax <= _SPF_CAP:
            fac_lists = self._factor_by_spf(b0, nmax)
        else:
            fac_lists = self._factor_by_qr_sieve(b0, nmax)
        A: list[int] = []
        B: list[int] = []
        C: list[int] = []
        add_a = A.append
        add_b = B.append
        add_c = C.append
        for b, n, fac in fac_lists:
            divs = [1]
            for p, e in fac:
                pk = 1
                more = []
                for _ in range(e):
                    pk *= p
                    more.extend(d * pk for d in divs)
                divs.extend(more)
            for d in divs:
                e2 = n // d
                if d <= e2 and e2 - d < b:
                    if support:
                        ok = True
                        for q in support:
                            if b % q == 0 and d % q == 0 and e2 % q == 0:
                                ok = False
                                break
                        if not ok:
                            continue
                    add_a(d)
                    add_b(b)
                    add_c(-e2)
                    if d != e2:
                        add_a(e2)
                        add_b(b)
                        add_c(-d)
        return A, B, C

    def _factor_by_spf(self, b0: int, nmax: int):
        delta = self.delta
        spf = spf_table(nmax)
        out = []
        for b in range(b0, self.w + 1, 2):
            n = (delta - b * b) >> 2
            if n <= 0:
                continue
            fac = []
            m = n
            while m > 1:
                p = int(spf[m])
                e = 1
                m //= p
                while m % p == 0:
                    m //= p
                    e += 1
                fac.append((p, e))
            out.append((b, n, fac))
        return out

    def _factor_by_qr_sieve(self, b0: int, nmax: int):
        delta = self.delta
        bs = list(range(b0, self.w + 1, 2))
        ns = [(delta - b * b) >> 2 for b in bs]
        m_count = len(bs)
        facs: list[list[tuple[int, int]]] = [[] for _ in range(m_count)]
        for i in range(m_count):
            n = ns[i]
            if n <= 0:
                continue
            e = 0
            while not n & 1:
                n >>= 1
                e += 1
            if e:
                facs[i].append((2, e))
                ns[i] = n
        for p in primes_up_to(math.isqrt(nmax))[1:]:
            dm = delta % p
            if dm == 0:
                roots: tuple[int, ...] = (0,)
            else:
                r = sqrt_mod_prime(dm, p)
                if r is None:
                    continue
                roots = (r, p - r)
            inv2 = (p + 1) >> 1
            for r in roots:
                i0 = ((r - b0) * inv2) % p
                for i in range(i0, m_count, p):
                    n = ns[i]
                    if n > 1 and n % p == 0:
                        e = 1
                        n //= p
                        while n % p == 0:
                            n //= p
                            e += 1
                        ns[i] = n
                        facs[i].append((p, e))
        out = []
        for i in range(m_count):
            n = (delta - bs[i] * bs[i]) >> 2
            if n <= 0:
                continue
            if ns[i] > 1:
                facs[i].append((ns[i], 1))
            facs[i].sort()
            out.append((bs[i], n, facs[i]))
        return out

    # -- cycle partition -------------------------------------------------

    def _build_real(self):
        delta = self.delta
        w = self.w = math.isqrt(delta)
        A, B, C = self._positive_forms()
        nf = len(A)
        stride = self.stride = w + 3
        index = self.index = {}
        for i in range(nf):
            index[A[i] * stride + B[i]] = i
        orbit = self.orbit = [-1] * nf
        pos_rep: list[tuple[int, int, int]] = []
        canon: list[tuple[int, int, int]] = []
        n_orbits = 0
        for i in range(nf):
            if orbit[i] >= 0:
                continue
            oid = n_orbits
            n_orbits += 1
            pos_rep.append((A[i], B[i], C[i]))
            ma = mb = mc = None
            j = i
            while True:
                orbit[j] = oid
                b1 = B[j]
                c1 = C[j]
                ca = -c1
                nb = w - ((w + b1) % (ca + ca))
                nc = (nb * nb - delta) // (4 * c1)
                if ma is None or c1 < ma or (c1 == ma and (nb, nc) < (mb, mc)):
                    ma, mb, mc = c1, nb, nc
                nb2 = w - ((w + nb) % (nc + nc))
                j = index[nc * stride + nb2]
                if j == i:
                    break
            canon.append((ma, mb, mc))
        self.forms_a, self.forms_b, self.forms_c = A, B, C
        self.pos_rep = pos_rep
        self.canon = canon
        self.h_plus = n_orbits
        b1 = w if ((w ^ delta) & 1) == 0 else w - 1
        self.principal = orbit[index[stride + b1]]
        c_tau = (delta - b1 * b1) >> 2
        nb = w - ((w + b1) % (c_tau + c_tau))
        self.tau = orbit[index[c_tau * stride + nb]]
        self.ratio_one = self.tau == self.principal
        if self.ratio_one:
            self.h = self.h_plus
        else:
            if self.h_plus % 2:
                raise ArithmeticError(
                    f"odd narrow class number with nontrivial negative class at {delta}"
                )
            self.h = self.h_plus // 2

    def _build_imaginary(self):
        delta = self.delta
        self.w = 0
        A: list[int] = []
        B: list[int] = []
        C: list[int] = []
        amax = math.isqrt(-delta // 3)
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (b - delta) % 2:
                    continue
                num = b * b - delta
                if num % (4 * a):
                    continue
                c = num // (4 * a)
                if c < a:
                    continue
                if b < 0 and (a == c or -b == a):
                    continue
                if math.gcd(a, b, c) != 1:
                    continue
                A.append(a)
                B.append(b)
                C.append(c)
        nf = len(A)
        self.stride = 4 * (amax + 2)
        self.index = {}
        forms = sorted((A[i], B[i], C[i]) for i in range(nf))
        self.forms_a = [f[0] for f in forms]
        self.forms_b = [f[1] for f in forms]
        self.forms_c = [f[2] for f in forms]
        for i, f in enumerate(forms):
            self.index[self._neg_key(f[0], f[1])] = i
        self.orbit = list(range(nf))
        self.pos_rep = forms
        self.canon = forms
        self.h_plus = self.h = nf
        p = principal_form(delta)
        self.principal = self.index[self._neg_key(p.a, p.b)]
        self.tau = self.principal
        self.ratio_one = True

    def _neg_key(self, a: int, b: int) -> int:
        return a * self.stride + (b + 2 * self.stride)

    # -- class arithmetic ------------------------------------------------

    def orbit_of(self, form: BQF) -> int:
        a, b, c = form
        if b * b - 4 * a * c != self.delta:
            raise ValueError("form does not have this discriminant")
        if math.gcd(a, b, c) != 1:
            raise ValueError(f"{form} is imprimitive")
        if self.delta > 0:
            a, b, c = _reduce_indefinite(self.delta, self.w, a, b, c)
            if a < 0:
                nb, nc = _rho_step(self.delta, self.w, b, c)
                a, b, c = c, nb, nc
            return self.orbit[self.index[a * self.stride + b]]
        a, b, c = _reduce_definite(a, b, c)
        return self.orbit[self.index[self._neg_key(a, b)]]

    def compose_ids(self, i: int, j: int) -> int:
        if j < i:
            i, j = j, i
        memo = self._compose_memo
        key = (i, j)
        got = memo.get(key)
        if got is None:
            raw = _compose_raw(self.pos_rep[i], self.pos_rep[j])
            got = self.orbit_of(BQF(*raw))
            memo[key] = got
        return got

    def square_ids(self) -> list[int]:
        if self._square_ids is None:
            self._square_ids = [self.compose_ids(i, i) for i in range(self.h_plus)]
        return self._square_ids

    def two_torsion_narrow_count(self) -> int:
        return sum(1 for s in self.square_ids() if s == self.principal)

    def is_two_torsion_narrow(self) -> bool:
        return all(s == self.principal for s in self.square_ids())

    def is_two_torsion_wide(self) -> bool:
        ok = {self.principal, self.tau}
        return all(s in ok for s in self.square_ids())

    def _invariant_factors(self, project) -> tuple[int, ...]:
        # Greedy split-off of an element of maximal order in the quotient by
        # the subgroup generated so far; `project` folds narrow ids to wide.
        ident = project(self.principal)
        elements = sorted({project(i) for i in range(self.h_plus)})
        total = len(elements)
        if total == 1:
            return ()
        subgroup = {ident}
        picks: list[int] = []
        while len(subgroup) < total:
            best_g = None
            best_ord = 0
            best_powers: list[int] = []
            for g in elements:
                if g in subgroup:
                    continue
                powers = [g]
                x = g
                while x not in subgroup:
                    x = project(self.compose_ids(x, g))
                    powers.append(x)
                if len(powers) > best_ord:
                    best_ord = len(powers)
                    best_g = g
                    best_powers = powers[:-1]
            assert best_g is not None
            picks.append(best_ord)
            new = set(subgroup)
            for s in subgroup:
                for x in best_powers:
                    new.add(project(self.compose_ids(s, x)))
            subgroup = new
        prod = 1
        for p in picks:
            prod *= p
        if prod != total:
            raise ArithmeticError(f"group structure mismatch at {self.delta}")
        return tuple(reversed(picks))

    def narrow_divisors(self) -> tuple[int, ...]:
        return self._invariant_factors(lambda i: i)

    def wide_divisors(self) -> tuple[int, ...]:
        if self.ratio_one:
            return self.narrow_divisors()
        tau = self.tau
        fold = {}
        for i in range(self.h_plus):
            fold[i] = min(i, self.compose_ids(i, tau))
        return self._invariant_factors(lambda i: fold[i])

    def cycle_of(self, oid: int) -> list[BQF]:
        if self.delta < 0:
            return [BQF(*self.pos_rep[oid])]
        start = BQF(*self.canon[oid])
        out = [start]
        f = rho(start, self.delta)
        while f != start:
            out.append(f)
            f = rho(f, self.delta)
        return out


@lru_cache(maxsize=64)
def _class_data(delta: int) -> _ClassData:
    _check_discriminant(delta)
    return _ClassData(delta)


def enumerate_reduced(delta: int) -> list[BQF]:
    """All primitive reduced forms of the discriminant, sorted."""
    cd = _class_data(delta)
    forms = [
        BQF(cd.forms_a[i], cd.forms_b[i], cd.forms_c[i]) for i in range(len(cd.forms_a))
    ]
    if delta > 0:
        forms += [BQF(-f.a, f.b, -f.c) for f in forms]
    return sorted(forms)


def narrow_classes(delta: int) -> list[list[BQF]]:
    """Partition of the reduced forms into rho-cycles (singletons if delta<0).

    Each part starts at its canonical (lexicographically least) member and
    follows rho order; parts are sorted by canonical representative.
    """
    cd = _class_data(delta)
    parts = [cd.cycle_of(oid) for oid in range(cd.h_plus)]
    parts.sort(key=lambda part: part[0])
    return parts


def narrow_class_number(delta: int) -> int:
    return _class_data(delta).h_plus


def class_number(delta: int) -> int:
    return _class_data(delta).h


def compose(f: BQF, g: BQF, delta: int) -> BQF:
    """Gauss composition on classes; returns the canonical representative."""
    cd = _class_data(delta)
    i = cd.orbit_of(BQF(*f))
    j = cd.orbit_of(BQF(*g))
    return BQF(*cd.canon[cd.compose_ids(i, j)])


def narrow_class_group(delta: int) -> ClassGroupStructure:
    cd = _class_data(delta)
    return ClassGroupStructure(cd.h_plus, cd.narrow_divisors(), NARROW)


def wide_class_group(delta: int) -> ClassGroupStructure:
    """Structure of the wide class group, cross-checked against the unit norm.

    For delta > 0 the narrow-to-wide index must be 1 exactly when the
    fundamental unit has norm -1; disagreement between the form-cycle route
    and the continued-fraction route raises, since it would mean a bug.
    """
    cd = _class_data(delta)
    if delta > 0:
        expected_ratio = 1 if cfrac.fundamental_unit(delta).norm == -1 else 2
        if cd.h_plus != expected_ratio * cd.h:
            raise ArithmeticError(
                f"narrow/wide ratio disagrees with unit norm at delta={delta}"
            )
    return ClassGroupStructure(cd.h, cd.wide_divisors(), WIDE)
