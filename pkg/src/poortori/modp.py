"""Polynomials over prime fields and Frobenius cycle types.

Only distinct-degree factorization is implemented: cycle types need the
degrees of the irreducible factors, never the factors themselves, so the
randomized equal-degree splitting step is skipped and everything here is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ErrDegreeDrop,
    ErrDenominatorNotInvertible,
    ErrNotPrime,
    ErrNotSquarefree,
    ErrRamifiedPrime,
)
from .exact import RationalPoly, discriminant, is_prime


def _trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _sub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _divmod(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 0)
    while len(a) > db:
        t = a[-1] * inv % p
        shift = len(a) - 1 - db
        q[shift] = t
        if t:
            for i, y in enumerate(b):
                a[shift + i] = (a[shift + i] - t * y) % p
        a.pop()
    return _trim(q), _trim(a)


def _mod(a, b, p):
    return _divmod(a, b, p)[1]


def _gcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _powmod(base, e, m, p):
    """base^e mod m by repeated squaring."""
    result = [1]
    base = _mod(base, m, p)
    while e:
        if e & 1:
            result = _mod(_mul(result, base, p), m, p)
        e >>= 1
        if e:
            base = _mod(_mul(base, base, p), m, p)
    return result


def _derivative(a, p):
    return _trim([i * a[i] % p for i in range(1, len(a))])


@dataclass(frozen=True)
class ModPoly:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = _trim([int(x) % self.p for x in self.coeffs])
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_squarefree(self) -> bool:
        c = list(self.coeffs)
        d = _derivative(c, self.p)
        if not d:
            return len(c) <= 1
        return len(_gcd(c, d, self.p)) == 1

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return (" + ".join(terms) or "0") + f" over F_{self.p}"


@dataclass(frozen=True)
class CycleType:
    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted(int(x) for x in self.parts)))

    @property
    def n(self) -> int:
        return sum(self.parts)

    def to_json(self) -> list[int]:
        return list(self.parts)

    def __str__(self):
        return "[" + ",".join(map(str, self.parts)) + "]"


def reduce_mod(f: RationalPoly, p: int) -> ModPoly:
    if not is_prime(p):
        raise ErrNotPrime(f"{p} is not prime")
    if f.den % p == 0:
        raise ErrDenominatorNotInvertible(f"{p} divides the denominator {f.den}")
    if f.coeffs[-1] % p == 0:
        raise ErrDegreeDrop(f"{p} divides the leading coefficient")
    inv = pow(f.den, -1, p)
    return ModPoly(p, tuple(c * inv % p for c in f.coeffs))


def distinct_degree_split(fb: ModPoly) -> dict[int, int]:
    """Map d -> number of irreducible factors of degree d."""
    p = fb.p
    if not fb.is_squarefree():
        raise ErrNotSquarefree(f"{fb} is not squarefree")
    f = list(fb.coeffs)
    inv = pow(f[-1], -1, p)
    f = [c * inv % p for c in f]
    out: dict[int, int] = {}
    x = [0, 1]
    h = x
    d = 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = _powmod(h, p, f, p)
        g = _gcd(f, _sub(h, x, p), p)
        k = len(g) - 1
        if k > 0:
            out[d] = k // d
            f = _divmod(f, g, p)[0]
            h = _mod(h, f, p)
    if len(f) - 1 > 0:
        deg = len(f) - 1
        out[deg] = out.get(deg, 0) + 1
    return dict(sorted(out.items()))


def frobenius_cycle_type(f: RationalPoly, p: int, disc: Fraction | None = None) -> CycleType:
    """Cycle type of Frobenius at an unramified prime (Dedekind's theorem).

    ``disc`` may be passed in to avoid recomputing the discriminant when
    sampling many primes.
    """
    fb = reduce_mod(f, p)
    if disc is None:
        disc = discriminant(f)
    if Fraction(disc).numerator % p == 0:
        raise ErrRamifiedPrime(f"{p} divides the discriminant")
    split = distinct_degree_split(fb)
    parts = [d for d, k in split.items() for _ in range(k)]
    ct = CycleType(tuple(parts))
    assert ct.n == f.degree
    return ct
