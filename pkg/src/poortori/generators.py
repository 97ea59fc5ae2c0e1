"""The three polynomial families and the non-isogenous family builder.

Families:

* truncated exponentials  exp_n(x) = sum_{j<=n} x^j / j!
* Selmer trinomials       x^n + x + 1
* Mori-style trinomials   x^(2g) - b x - p c / l^l  for a g-admissible (l, p, b, c)

Admissibility here is stricter than the bare list of side conditions: the
radical of 2g-1 must divide p-1 so that x^(2g-1) - b really is irreducible
mod p, and the polynomial must have no real roots (checked by Sturm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    ErrBadCount,
    ErrBadDegree,
    ErrExcludedPrime,
    ErrFormulaMismatch,
    ErrInternalConsistency,
    ErrInvalidQuadruple,
    ErrNotPrime,
    ErrPrecision,
    ErrSearchBudget,
    ErrUnsupportedShape,
)
from .exact import (
    DyadicInterval,
    RationalPoly,
    discriminant,
    is_prime,
    nth_root_interval,
    prime_factors,
    primes_up_to,
    sturm_count,
    valuation,
)
from .modp import frobenius_cycle_type
from .newton import eisenstein_dumas

DEFAULT_PRIME_BUDGET = 10**4
DEFAULT_C_BUDGET = 10**6


# ---------------------------------------------------------------------------
# truncated exponentials and Selmer trinomials


def truncated_exponent(n: int) -> RationalPoly:
    if n < 2 or n % 2:
        raise ErrBadDegree(f"truncated exponent needs even n >= 2, got {n}")
    nf = math.factorial(n)
    return RationalPoly(tuple(nf // math.factorial(j) for j in range(n + 1)), nf)


@dataclass(frozen=True)
class SelmerPoly:
    poly: RationalPoly
    reducible_risk: bool

    @property
    def flags(self) -> tuple[str, ...]:
        return ("REDUCIBLE_RISK",) if self.reducible_risk else ()


def selmer(n: int) -> SelmerPoly:
    """x^n + x + 1.  Flagged when g = n/2 is 1 mod 3, where x^2 + x + 1 can divide it."""
    if n % 2 or n < 4:
        raise ErrBadDegree(f"Selmer family needs even n >= 4, got {n}")
    g = n // 2
    return SelmerPoly(RationalPoly((1, 1) + (0,) * (n - 2) + (1,)), g % 3 == 1)


# ---------------------------------------------------------------------------
# primitive roots


def multiplicative_order(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    order = p - 1
    for q in prime_factors(p - 1):
        while order % q == 0 and pow(a, order // q, p) == 1:
            order //= q
    return order


def is_primitive_root(a: int, p: int) -> bool:
    return a % p != 0 and multiplicative_order(a, p) == p - 1


def primitive_root(p: int) -> int:
    if not is_prime(p):
        raise ErrNotPrime(f"{p} is not prime")
    for a in range(1, p):
        if is_primitive_root(a, p):
            return a
    raise AssertionError("unreachable: every prime has a primitive root")


# ---------------------------------------------------------------------------
# Mori-style trinomials


FLAG_NAMES = (
    "lDividesTwoGMinusOne",
    "pCoprime",
    "bPrimitiveRoot",
    "lNotDividesB",
    "lNotDividesC",
    "radicalDividesPMinusOne",
    "noRealRoots",
)


@dataclass(frozen=True)
class AdmissibleQuadruple:
    g: int
    l: int
    p: int
    b: int
    c: int
    flags: dict = field(hash=False, compare=False, default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(self.flags.get(k, False) for k in FLAG_NAMES)

    def failed(self) -> list[str]:
        return [k for k in FLAG_NAMES if not self.flags.get(k, False)]

    def to_json(self) -> dict:
        return {
            "g": str(self.g),
            "l": str(self.l),
            "p": str(self.p),
            "b": str(self.b),
            "c": str(self.c),
            "flags": {k: bool(self.flags.get(k, False)) for k in FLAG_NAMES},
            "valid": self.valid,
        }

    @classmethod
    def from_json(cls, obj) -> AdmissibleQuadruple:
        return cls(
            int(obj["g"]), int(obj["l"]), int(obj["p"]), int(obj["b"]), int(obj["c"]),
            dict(obj["flags"]),
        )


def _mori(g, l, p, b, c) -> RationalPoly:
    n = 2 * g
    ll = l**l
    coeffs = [-p * c, -b * ll] + [0] * (n - 2) + [ll]
    return RationalPoly(tuple(coeffs), ll)


def mori_poly(q: AdmissibleQuadruple, force: bool = False) -> RationalPoly:
    """x^(2g) - b x - p c / l^l."""
    if not q.valid and not force:
        raise ErrInvalidQuadruple(f"quadruple {q.l, q.p, q.b, q.c} fails {q.failed()}")
    return _mori(q.g, q.l, q.p, q.b, q.c)


def is_admissible(g: int, l: int, p: int, b: int, c: int) -> AdmissibleQuadruple:
    if g < 2:
        raise ErrBadCount(f"g >= 2 required, got {g}")
    for name, v in (("l", l), ("p", p)):
        if not is_prime(v):
            raise ErrNotPrime(f"{name}={v} is not prime")
    m = 2 * g - 1
    f = _mori(g, l, p, b, c)
    flags = {
        "lDividesTwoGMinusOne": m % l == 0,
        "pCoprime": m % p != 0,
        "bPrimitiveRoot": is_primitive_root(b, p),
        "lNotDividesB": b % l != 0,
        "lNotDividesC": c % l != 0,
        "radicalDividesPMinusOne": all((p - 1) % q == 0 for q in prime_factors(m)),
    }
    if b > 0:
        flags["noRealRoots"] = real_root_exclusion(g, l, p, b, c).no_real_roots
    else:
        flags["noRealRoots"] = sturm_count(f) == 0
    return AdmissibleQuadruple(g, l, p, b, c, flags)


# ---------------------------------------------------------------------------
# real roots of x^(2g) - b x - pc/l^l


NO_REAL_ROOTS = "NO_REAL_ROOTS"
HAS_REAL_ROOTS = "HAS_REAL_ROOTS"


@dataclass(frozen=True)
class RealRootExclusion:
    closed_form_min: DyadicInterval
    sturm_count: int
    verdict: str

    @property
    def no_real_roots(self) -> bool:
        return self.verdict == NO_REAL_ROOTS

    def to_json(self) -> dict:
        return {
            "closedFormMin": self.closed_form_min.to_json(),
            "sturmCount": str(self.sturm_count),
            "verdict": self.verdict,
        }

    @classmethod
    def from_json(cls, obj) -> RealRootExclusion:
        iv = obj["closedFormMin"]
        return cls(
            DyadicInterval(Fraction(iv["lo"]), Fraction(iv["hi"])),
            int(obj["sturmCount"]),
            obj["verdict"],
        )


def _critical_point(g: int, b: int, bits: int) -> DyadicInterval:
    """Bracket beta = (b / 2g)^(1/(2g-1)), the unique real zero of the derivative."""
    return nth_root_interval(Fraction(b, 2 * g), 2 * g - 1, bits)


def minimum_interval(g, l, p, b, c, bits: int = 64) -> DyadicInterval:
    """Enclosure of min_R f = f(beta) = beta (b/2g - b) - pc/l^l.

    Uses beta^(2g-1) = b/2g; the expression is decreasing in beta for b > 0.
    """
    beta = _critical_point(g, b, bits)
    slope = Fraction(b, 2 * g) - b
    const = Fraction(p * c, l**l)
    return DyadicInterval(beta.hi * slope - const, beta.lo * slope - const)


def c_bound_interval(g, l, p, b, bits: int = 64) -> DyadicInterval:
    """Enclosure of the threshold C with: no real roots <=> c < C."""
    beta = _critical_point(g, b, bits)
    scale = Fraction(l**l, p) * (Fraction(b, 2 * g) - b)
    return DyadicInterval(beta.hi * scale, beta.lo * scale)


def real_root_exclusion(g, l, p, b, c, max_bits: int = 4096) -> RealRootExclusion:
    if b <= 0:
        raise ErrUnsupportedShape("minimum analysis assumes b > 0")
    count = sturm_count(_mori(g, l, p, b, c))
    bits = 64
    while True:
        iv = minimum_interval(g, l, p, b, c, bits)
        if iv.sign() != 0:
            break
        if bits >= max_bits:
            raise ErrPrecision(f"sign of the minimum undecided at {bits} bits")
        bits *= 2
    if (iv.sign() > 0) != (count == 0):
        raise ErrInternalConsistency(f"interval minimum {iv} disagrees with Sturm count {count}")
    return RealRootExclusion(iv, count, NO_REAL_ROOTS if count == 0 else HAS_REAL_ROOTS)


# ---------------------------------------------------------------------------
# discriminants and ramification


def trinomial_disc_signflip(g, l, p, b, c) -> Fraction:
    """Closed form with the constant-term contribution sign-flipped.

    Kept only for diagnostics; it disagrees with the resultant.
    """
    q = Fraction(p * c, l**l)
    return (-1) ** (g * (2 * g - 1)) * Fraction(2 * g) ** (2 * g) * q ** (2 * g - 1) + (
        -1
    ) ** ((2 * g - 1) * (g - 1)) * Fraction(2 * g - 1) ** (2 * g - 1) * Fraction(b) ** (2 * g)


def trinomial_disc_closed(g, l, p, b, c) -> Fraction:
    """disc(x^(2g) - b x - pc/l^l) from the trinomial closed form.

    Cross-checked against the resultant; any disagreement is a bug.
    """
    q = Fraction(p * c, l**l)
    n = 2 * g
    closed = (-1) ** (g * (2 * g - 1)) * (
        Fraction(n) ** n * (-q) ** (n - 1) - Fraction(n - 1) ** (n - 1) * Fraction(b) ** n
    )
    via_res = discriminant(_mori(g, l, p, b, c))
    if abs(closed) != abs(via_res):
        raise ErrFormulaMismatch(f"closed form {closed} vs resultant {via_res}")
    return via_res


RAMIFIED = "RAMIFIED"
UNRAMIFIED = "UNRAMIFIED"
UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class RamificationWitness:
    ell: int
    disc_valuation: int
    conclusion: str

    def to_json(self) -> dict:
        return {"ell": str(self.ell), "discValuation": str(self.disc_valuation), "conclusion": self.conclusion}

    @classmethod
    def from_json(cls, obj) -> RamificationWitness:
        return cls(int(obj["ell"]), int(obj["discValuation"]), obj["conclusion"])


def ramification_witness(f: RationalPoly, ell: int, l: int, disc: Fraction | None = None) -> RamificationWitness:
    """Decide ramification at ell from the parity of v_ell(disc f).

    disc(f) = r^2 disc(field) with r a unit away from l, so odd valuation
    forces ell to divide the field discriminant and zero valuation rules it out.
    """
    if not is_prime(ell):
        raise ErrNotPrime(f"{ell} is not prime")
    if ell == l:
        raise ErrExcludedPrime(f"ell = l = {l}: r may carry powers of l")
    if disc is None:
        disc = discriminant(f)
    v = valuation(disc, ell)
    if v == 0:
        conclusion = UNRAMIFIED
    elif v % 2:
        conclusion = RAMIFIED
    else:
        conclusion = UNDECIDED
    return RamificationWitness(ell, v, conclusion)


# ---------------------------------------------------------------------------
# parameter search and the family builder


@dataclass(frozen=True)
class MemberCertificate:
    eisenstein_l: bool
    cycle_type_at_p: tuple[int, ...]
    sturm: int

    @property
    def ok(self) -> bool:
        return self.eisenstein_l and self.sturm == 0


def certify_member(q: AdmissibleQuadruple, f: RationalPoly | None = None) -> MemberCertificate:
    f = f or mori_poly(q, force=True)
    ed = eisenstein_dumas(f, q.l)
    ct = frobenius_cycle_type(f, q.p)
    return MemberCertificate(ed.irreducible, ct.parts, sturm_count(f))


def _choose_l_p(g: int, prime_budget: int) -> tuple[int, int]:
    m = 2 * g - 1
    rad_primes = prime_factors(m)
    l = rad_primes[0]
    for p in primes_up_to(prime_budget):
        if m % p and all((p - 1) % q == 0 for q in rad_primes):
            return l, p
    raise ErrSearchBudget(f"no prime p <= {prime_budget} with rad({m}) | p-1")


def _search_c(g, l, p, b, candidates) -> AdmissibleQuadruple:
    for c in candidates:
        q = is_admissible(g, l, p, b, c)
        if q.valid:
            return q
    raise ErrSearchBudget(f"no admissible c for (g,l,p,b) = {(g, l, p, b)} within budget")


def search_quadruple(
    g: int,
    l: int | None = None,
    p: int | None = None,
    b: int | None = None,
    prime_budget: int = DEFAULT_PRIME_BUDGET,
    c_budget: int = DEFAULT_C_BUDGET,
) -> AdmissibleQuadruple:
    """First VALID quadruple in the fixed scan order; c runs downward from the bound."""
    if g < 2:
        raise ErrBadCount(f"g >= 2 required, got {g}")
    if l is None or p is None:
        l0, p0 = _choose_l_p(g, prime_budget)
        l = l0 if l is None else l
        p = p0 if p is None else p
    if b is None:
        b = next((a for a in range(1, p) if is_primitive_root(a, p) and a % l), None)
        if b is None:
            raise ErrSearchBudget(f"no primitive root mod {p} coprime to {l}")
    if b <= 0:
        raise ErrUnsupportedShape("search needs b > 0")
    start = math.floor(c_bound_interval(g, l, p, b).hi)

    def cands():
        c = start
        while abs(c) <= c_budget:
            if c % l:
                yield c
            c -= 1

    return _search_c(g, l, p, b, cands())


@dataclass(frozen=True)
class FamilyMember:
    quadruple: AdmissibleQuadruple
    poly: RationalPoly
    disc: Fraction
    witness: RamificationWitness | None
    certificate: MemberCertificate

    def to_json(self) -> dict:
        return {
            "quadruple": self.quadruple.to_json(),
            "polynomial": self.poly.to_json(),
            "polynomialText": str(self.poly),
            "discriminant": str(self.disc),
            "witness": self.witness.to_json() if self.witness else None,
            "certificate": {
                "eisensteinDumasAtL": self.certificate.eisenstein_l,
                "cycleTypeAtP": [str(x) for x in self.certificate.cycle_type_at_p],
                "sturmCount": str(self.certificate.sturm),
            },
        }


@dataclass(frozen=True)
class FamilyReport:
    g: int
    members: tuple[FamilyMember, ...]
    distinguishers: tuple[tuple[int | None, ...], ...]

    def to_json(self) -> dict:
        return {
            "g": str(self.g),
            "members": [m.to_json() for m in self.members],
            "pairwiseDistinguishers": [
                [None if x is None else str(x) for x in row] for row in self.distinguishers
            ],
        }


def _distinguisher(a: Fraction, b: Fraction, primes) -> int | None:
    """A prime with odd valuation in one discriminant and zero in the other."""
    for ell in primes:
        va, vb = valuation(a, ell), valuation(b, ell)
        if (va % 2 and vb == 0) or (vb % 2 and va == 0):
            return ell
    return None


def build_family(
    g: int,
    count: int,
    prime_budget: int = DEFAULT_PRIME_BUDGET,
    c_budget: int = DEFAULT_C_BUDGET,
) -> FamilyReport:
    """Iteratively build `count` Mori-style fields, pairwise separated by ramification.

    Member k+1 uses a fresh prime ell (not dividing 2glp) that is unramified in
    every earlier member, with ell | b and c = ell mod ell^2, which forces
    v_ell(disc) = 2g - 1.
    """
    if g < 2:
        raise ErrBadCount(f"g >= 2 required, got {g}")
    if count < 1:
        raise ErrBadCount(f"count >= 1 required, got {count}")
    first = search_quadruple(g, prime_budget=prime_budget, c_budget=c_budget)
    l, p = first.l, first.p
    members = [_member(first, None)]
    while len(members) < count:
        ell = next(
            (
                q
                for q in primes_up_to(prime_budget)
                if (2 * g * l * p) % q and all(valuation(m.disc, q) == 0 for m in members)
            ),
            None,
        )
        if ell is None:
            raise ErrSearchBudget(f"no fresh unramified prime <= {prime_budget}")
        b = _crt_b(l, p, ell, prime_budget * ell)
        quad = _search_c(g, l, p, b, _c_candidates(g, l, p, b, ell, c_budget))
        members.append(_member(quad, ell))
    ws = [m.witness.ell if m.witness else None for m in members]
    dist = []
    for i, mi in enumerate(members):
        row = []
        for j, mj in enumerate(members):
            if i == j:
                row.append(None)
                continue
            later = ws[max(i, j)]
            row.append(_distinguisher(mi.disc, mj.disc, [later] if later else primes_up_to(1000)))
        dist.append(tuple(row))
    return FamilyReport(g, tuple(members), tuple(dist))


def _crt_b(l: int, p: int, ell: int, limit: int) -> int:
    """Smallest positive b with ell | b, l not dividing b, b primitive root mod p."""
    for b in range(ell, limit + 1, ell):
        if b % l and is_primitive_root(b, p):
            return b
    raise ErrSearchBudget(f"no suitable b below {limit}")


def _c_candidates(g, l, p, b, ell, c_budget):
    """c = ell mod ell^2, l not dividing c, starting just below the real-root bound.

    Once a congruence-respecting start is fixed, later candidates step by
    l*p*ell^2, which preserves both c mod ell^2 and c mod l.
    """
    mod = ell * ell
    top = math.floor(c_bound_interval(g, l, p, b).hi)
    c = top - ((top - ell) % mod)
    while c % l == 0:
        c -= mod
    step = l * p * mod
    while abs(c) <= c_budget:
        yield c
        c -= step


def _member(q: AdmissibleQuadruple, ell: int | None) -> FamilyMember:
    f = mori_poly(q)
    disc = trinomial_disc_closed(q.g, q.l, q.p, q.b, q.c)
    cert = certify_member(q, f)
    if not cert.ok or cert.cycle_type_at_p != (1, 2 * q.g - 1):
        raise ErrInternalConsistency(f"valid quadruple {q} failed its certificate chain: {cert}")
    w = None
    if ell is not None:
        w = ramification_witness(f, ell, q.l, disc)
        if w.disc_valuation != 2 * q.g - 1:
            raise ErrInternalConsistency(f"v_{ell}(disc) = {w.disc_valuation}, expected {2 * q.g - 1}")
    return FamilyMember(q, f, disc, w, cert)
