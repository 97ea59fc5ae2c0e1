"""Exact integer/rational arithmetic and univariate polynomials over Q.

Polynomials are dense coefficient lists in ascending degree order.  A
:class:`RationalPoly` stores an integer numerator vector together with a
single positive denominator, always in lowest terms, so equal polynomials
compare equal.

Everything here is exact; floating point never enters.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .errors import (
    ErrDegenerate,
    ErrDegreeTooSmall,
    ErrNotPrime,
    InputError,
)

# ---------------------------------------------------------------------------
# integers


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, v in enumerate(sieve) if v]


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of |n| by trial division (small inputs only)."""
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def radical(n: int) -> int:
    return math.prod(prime_factors(n))


def valuation(q, p: int) -> int:
    """p-adic valuation of a nonzero rational; negative for denominators."""
    q = Fraction(q)
    if q == 0:
        raise ErrDegenerate("valuation of zero is undefined")
    if not is_prime(p):
        raise ErrNotPrime(f"{p} is not prime")
    v = 0
    num, den = abs(q.numerator), q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def is_rational_square(q) -> bool:
    """Exact square test via integer square roots of numerator and denominator."""
    q = Fraction(q)
    if q < 0:
        return False
    a, b = q.numerator, q.denominator
    return math.isqrt(a) ** 2 == a and math.isqrt(b) ** 2 == b


# ---------------------------------------------------------------------------
# coefficient-list helpers over Q (Fraction lists, ascending)


def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _deg(c) -> int:
    return len(c) - 1


def _divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lb = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        t = Fraction(a[-1]) / lb
        q[shift] = t
        for i, bi in enumerate(b):
            a[i + shift] -= t * bi
        a.pop()
        _trim(a)
    return _trim(q), a


def _derivative(c: list) -> list:
    return _trim([i * c[i] for i in range(1, len(c))])


def _gcd(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _divmod(a, b)[1]
    if not a:
        return a
    lc = a[-1]
    return [Fraction(x) / lc for x in a]


def _primitive_int(c: list) -> list[int]:
    """Scale a nonzero rational vector by a positive rational to a primitive integer vector."""
    c = [Fraction(x) for x in c]
    den = reduce(math.lcm, (x.denominator for x in c), 1)
    ints = [int(x * den) for x in c]
    g = reduce(math.gcd, ints, 0)
    return [x // g for x in ints] if g else ints


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalPoly:
    """f(x) = sum(coeffs[i] x^i) / den, in lowest terms."""

    coeffs: tuple[int, ...]
    den: int = 1

    def __post_init__(self):
        coeffs = [int(c) for c in self.coeffs]
        den = int(self.den)
        if den == 0:
            raise InputError("denominator must be nonzero")
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            den = 1
        else:
            if den < 0:
                coeffs, den = [-c for c in coeffs], -den
            g = reduce(math.gcd, coeffs, den)
            coeffs, den = [c // g for c in coeffs], den // g
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "den", den)

    # construction ---------------------------------------------------------

    @classmethod
    def from_fractions(cls, coeffs) -> RationalPoly:
        fr = [Fraction(c) for c in coeffs]
        den = reduce(math.lcm, (c.denominator for c in fr), 1)
        return cls(tuple(int(c * den) for c in fr), den)

    @classmethod
    def x_power(cls, n: int) -> RationalPoly:
        return cls((0,) * n + (1,))

    # accessors ------------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def fractions(self) -> list[Fraction]:
        return [Fraction(c, self.den) for c in self.coeffs]

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return Fraction(self.coeffs[i], self.den)
        return Fraction(0)

    @property
    def lc(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return Fraction(self.coeffs[-1], self.den)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.den

    def monic(self) -> RationalPoly:
        lc = self.lc
        return RationalPoly.from_fractions([c / lc for c in self.fractions()])

    def primitive(self) -> RationalPoly:
        """Primitive integer polynomial that is a positive rational multiple of f."""
        return RationalPoly(tuple(_primitive_int(self.fractions())))

    def height(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def derivative(self) -> RationalPoly:
        return RationalPoly.from_fractions(_derivative(self.fractions()))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if isinstance(x, (int, Fraction)):
            return Fraction(acc) / self.den
        return acc / self.den

    def __mul__(self, other: RationalPoly) -> RationalPoly:
        if not self.coeffs or not other.coeffs:
            return RationalPoly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(tuple(out), self.den * other.den)

    def scale(self, q) -> RationalPoly:
        return RationalPoly.from_fractions([Fraction(q) * c for c in self.fractions()])

    # text / json -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            terms.append((sign, body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s

    def to_json(self) -> dict:
        return {"den": str(self.den), "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> RationalPoly:
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return cls(tuple(int(c) for c in obj["coeffs"]), int(obj["den"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed polynomial JSON: {exc}") from exc

    @classmethod
    def parse(cls, text: str) -> RationalPoly:
        """Parse either the JSON form or a monomial sum such as ``x^4 - 5*x + 112/27``."""
        text = text.strip()
        if text.startswith("{"):
            return cls.from_json(text)
        s = text.replace(" ", "").replace("**", "^")
        if not s:
            raise InputError("empty polynomial")
        if s[0] not in "+-":
            s = "+" + s
        terms = re.findall(r"[+-][^+-]+", s)
        if "".join(terms) != s:
            raise InputError(f"cannot parse polynomial {text!r}")
        coeffs: dict[int, Fraction] = {}
        pat = re.compile(r"^([+-])(\d+(?:/\d+)?)?(\*?x(?:\^(\d+))?)?$")
        for t in terms:
            m = pat.match(t)
            if not m or (m.group(2) is None and m.group(3) is None):
                raise InputError(f"cannot parse term {t!r}")
            c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(2) is None and m.group(3).startswith("*"):
                raise InputError(f"cannot parse term {t!r}")
            if m.group(1) == "-":
                c = -c
            if m.group(3) is None:
                k = 0
            else:
                k = int(m.group(4)) if m.group(4) else 1
            coeffs[k] = coeffs.get(k, Fraction(0)) + c
        n = max(coeffs)
        return cls.from_fractions([coeffs.get(i, 0) for i in range(n + 1)])


# ---------------------------------------------------------------------------
# resultants and discriminants


def resultant(f: RationalPoly, g: RationalPoly) -> Fraction:
    """Res(f, g) = lc(f)^deg(g) * prod g(a) over the roots a of f.

    Computed with the Euclidean recursion
    Res(f, g) = (-1)^(mn) lc(g)^(m - deg r) Res(g, r),  r = f mod g.
    """
    if f.is_zero() and g.is_zero():
        raise ErrDegenerate("resultant of two zero polynomials")
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    a, b = f.fractions(), g.fractions()
    acc = Fraction(1)
    while True:
        m, n = _deg(a), _deg(b)
        if n == 0:
            return acc * b[0] ** m
        if m == 0:
            return acc * a[0] ** n
        r = _divmod(a, b)[1]
        if not r:
            return Fraction(0)
        if (m * n) % 2:
            acc = -acc
        acc *= b[-1] ** (m - _deg(r))
        a, b = b, r


def discriminant(f: RationalPoly) -> Fraction:
    n = f.degree
    if n < 2:
        raise ErrDegreeTooSmall(f"discriminant needs degree >= 2, got {n}")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / f.lc


def trinomial_discriminant(n: int, a, b) -> Fraction:
    """Closed form for disc(x^n + a x + b)."""
    a, b = Fraction(a), Fraction(b)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    inner = Fraction(n) ** n * b ** (n - 1) + (-1) ** (n - 1) * Fraction(n - 1) ** (n - 1) * a**n
    return sign * inner


# ---------------------------------------------------------------------------
# real roots


def poly_gcd(f: RationalPoly, g: RationalPoly) -> RationalPoly:
    return RationalPoly.from_fractions(_gcd(f.fractions(), g.fractions()))


def squarefree_part(f: RationalPoly) -> RationalPoly:
    if f.is_zero():
        raise ErrDegenerate("zero polynomial")
    a = f.fractions()
    g = _gcd(a, _derivative(a))
    q, r = _divmod(a, g) if g else (a, [])
    assert not r
    return RationalPoly.from_fractions(q)


def is_squarefree(f: RationalPoly) -> bool:
    return len(_gcd(f.fractions(), _derivative(f.fractions()))) == 1


def sturm_chain(f: RationalPoly) -> list[list[int]]:
    """Sturm chain of the squarefree part of f, each member a primitive integer vector.

    Remainders are computed over Q and rescaled by a positive rational, which
    keeps the sign pattern of the classical chain.
    """
    p0 = _primitive_int(squarefree_part(f).fractions())
    chain = [p0]
    if len(p0) > 1:
        chain.append(_primitive_int(_derivative(p0)))
    while len(chain[-1]) > 1:
        r = _divmod(chain[-2], chain[-1])[1]
        if not r:
            break
        chain.append(_primitive_int([-x for x in r]))
    return chain


def _variations(signs) -> int:
    s = [x for x in signs if x != 0]
    return sum(1 for u, v in zip(s, s[1:]) if (u > 0) != (v > 0))


def sturm_count(f: RationalPoly) -> int:
    """Number of distinct real roots of f."""
    if f.is_zero():
        raise ErrDegenerate("zero polynomial has infinitely many roots")
    chain = sturm_chain(f)
    at_pos = [c[-1] for c in chain]
    at_neg = [c[-1] * (-1) ** _deg(c) for c in chain]
    return _variations(at_neg) - _variations(at_pos)


def sturm_count_interval(f: RationalPoly, lo, hi) -> int:
    """Distinct real roots in the half-open interval (lo, hi]."""
    chain = sturm_chain(f)

    def var(x):
        x = Fraction(x)
        vals = []
        for c in chain:
            acc = Fraction(0)
            for co in reversed(c):
                acc = acc * x + co
            vals.append(acc)
        return _variations(vals)

    return var(lo) - var(hi)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise InputError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def sign(self) -> int:
        """+1 or -1 when the interval excludes zero, otherwise 0."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return 0

    def __add__(self, other):
        if isinstance(other, DyadicInterval):
            return DyadicInterval(self.lo + other.lo, self.hi + other.hi)
        q = Fraction(other)
        return DyadicInterval(self.lo + q, self.hi + q)

    def __mul__(self, other):
        if isinstance(other, DyadicInterval):
            ends = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
            return DyadicInterval(min(ends), max(ends))
        q = Fraction(other)
        return DyadicInterval(min(self.lo * q, self.hi * q), max(self.lo * q, self.hi * q))

    def to_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi)}


def nth_root_interval(q, k: int, bits: int) -> DyadicInterval:
    """Bracket the positive real k-th root of q > 0 by bisection to width <= 2^-bits."""
    q = Fraction(q)
    if q <= 0:
        raise InputError("nth_root_interval needs q > 0")
    lo, hi = Fraction(0), max(Fraction(1), q)
    eps = Fraction(1, 1 << bits)
    # floats are dyadic, so seeding from one keeps every endpoint dyadic
    guess = Fraction(float(q) ** (1.0 / k))
    step = Fraction(1, 1 << 20)
    if guess > 0:
        a, b = max(guess - step, Fraction(0)), guess + step
        if a**k <= q <= b**k:
            lo, hi = a, b
    while hi - lo > eps:
        mid = (lo + hi) / 2
        if mid**k <= q:
            lo = mid
        else:
            hi = mid
    return DyadicInterval(lo, hi)
