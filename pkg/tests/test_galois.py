import itertools
import random
from fractions import Fraction

import pytest
import sympy as sp
from sympy.combinatorics import Permutation, PermutationGroup
from sympy.polys.numberfields.galoisgroups import galois_group

from poortori.errors import ErrNoTransitivity, ErrOracleScope
from poortori.exact import RationalPoly, discriminant
from poortori.galois import (
    A_N,
    CITED,
    EISENSTEIN_DUMAS,
    MODP_PRIME,
    NOT_FOUND,
    PROVED,
    S_N,
    UNDETERMINED,
    GaloisCertificate,
    GaloisEvidence,
    Witness,
    certify,
    cited_certificate,
    collect_evidence,
    has_rational_factor,
    irreducibility_witness,
    quartic_galois_oracle,
)
from poortori.modp import CycleType

X = sp.Symbol("x")
SELM4 = RationalPoly((1, 1, 0, 0, 1))
MORI = RationalPoly.from_fractions([Fraction(112, 27), -5, 0, 0, 1])


def _check_implications(c: GaloisCertificate):
    if c.two_transitive:
        assert c.primitive
    if c.contains_alternating:
        assert c.primitive
    assert c.no_proper_subfield == c.primitive
    if c.group != UNDETERMINED:
        assert c.contains_alternating


class TestWitness:
    def test_examples(self):
        assert irreducibility_witness(SELM4) == Witness(MODP_PRIME, 2)
        assert irreducibility_witness(MORI) == Witness(EISENSTEIN_DUMAS, 3)
        assert irreducibility_witness(RationalPoly((-1, 0, 1))) is NOT_FOUND

    def test_json(self):
        for w in (Witness(MODP_PRIME, 2), Witness(CITED, "schur-exp")):
            assert Witness.from_json(w.to_json()) == w


class TestEvidence:
    def test_examples(self):
        ev = collect_evidence(SELM4, 3)
        assert [(p, ct.parts) for p, ct in ev.samples] == [(2, (4,)), (3, (1, 3))]
        ev = collect_evidence(RationalPoly((1, 0, 1)), 10)
        assert [(p, ct.parts) for p, ct in ev.samples] == [(3, (2,)), (5, (1, 1)), (7, (2,))]
        assert collect_evidence(SELM4, 1).samples == ()

    def test_reducible(self):
        with pytest.raises(ErrNoTransitivity):
            collect_evidence(RationalPoly((-1, 0, 1)), 50)

    def test_guard_and_sums(self):
        ev = collect_evidence(MORI, 300)
        d = discriminant(MORI)
        for p, ct in ev.samples:
            assert d.numerator % p and MORI.den % p
            assert ct.n == 4


class TestCertify:
    def test_selm4(self):
        c = certify(collect_evidence(SELM4, 3), 229)
        assert c.transitive and c.two_transitive and c.primitive and c.no_proper_subfield
        assert not c.contains_alternating and c.group == UNDETERMINED
        assert "p=3" in c.provenance["twoTransitive"]
        assert c.cert_level == PROVED
        _check_implications(c)

    def test_no_one_three_sample(self):
        ev = GaloisEvidence(SELM4, ((5, CycleType((2, 2))),), Witness(MODP_PRIME, 2))
        c = certify(ev, 229)
        assert not c.two_transitive and not c.primitive and not c.contains_alternating
        assert c.group == UNDETERMINED

    def test_jordan_degree_ten(self):
        f = RationalPoly((1, 1) + (0,) * 8 + (1,))
        ev = GaloisEvidence(f, ((11, CycleType((1, 9))), (13, CycleType((1, 1, 1, 7)))), Witness(MODP_PRIME, 73))
        c = certify(ev, discriminant(f))
        assert c.contains_alternating and c.group == S_N and c.group_name == "S10"
        assert "7-cycle" in c.provenance["containsAlternating"]

    def test_square_disc_gives_alternating(self):
        f = RationalPoly((1, 1) + (0,) * 8 + (1,))
        ev = GaloisEvidence(f, ((11, CycleType((1, 9))), (13, CycleType((1, 1, 1, 7)))), Witness(MODP_PRIME, 73))
        assert certify(ev, Fraction(49, 4)).group == A_N

    def test_degree_two(self):
        f = RationalPoly((1, 0, 1))
        c = certify(collect_evidence(f, 10), -4)
        assert c.two_transitive and c.primitive

    def test_json_round_trip(self):
        c = certify(collect_evidence(MORI, 100), discriminant(MORI))
        assert GaloisCertificate.from_json(c.to_json()) == c
        c = cited_certificate(4, Fraction(1, 576), "schur-exp")
        assert c.cert_level == CITED and c.group == A_N
        assert GaloisCertificate.from_json(c.to_json()) == c


class TestQuarticOracle:
    @pytest.mark.parametrize(
        "coeffs,group",
        [
            ((1, 1, 0, 0, 1), "S4"),
            ((1, 0, 0, 0, 1), "V4"),
            ((1, 1, 1, 1, 1), "C4"),
            ((-2, 0, 0, 0, 1), "D4"),
            ((12, 8, 0, 0, 1), "A4"),
        ],
    )
    def test_examples(self, coeffs, group):
        assert quartic_galois_oracle(RationalPoly(coeffs)) == group

    def test_mori(self):
        assert quartic_galois_oracle(MORI) == "S4"

    def test_scope(self):
        with pytest.raises(ErrOracleScope):
            quartic_galois_oracle(RationalPoly((1, 1, 1)))
        with pytest.raises(ErrOracleScope):
            quartic_galois_oracle(RationalPoly((1, 1, 1, 1)) * RationalPoly((1, 1)))

    def test_agrees_with_sympy_on_corpus(self):
        """Oracle vs sympy on 50 irreducible quartics, and certify() consistent with both."""
        rng = random.Random(20240611)
        names = {"S4": "S4", "A4": "A4", "D4": "D4", "C4": "C4", "V": "V4"}
        seen = 0
        while seen < 50:
            coeffs = tuple(rng.randint(-12, 12) for _ in range(4)) + (1,)
            f = RationalPoly(coeffs)
            if coeffs[0] == 0 or discriminant(f) == 0:
                continue
            expr = sp.Poly(list(reversed(coeffs)), X)
            if not expr.is_irreducible:
                assert has_rational_factor(f)
                continue
            assert not has_rational_factor(f)
            seen += 1
            g = quartic_galois_oracle(f)
            assert g == names[galois_group(expr, by_name=True)[0].name]
            cert = certify(collect_evidence(f, 200), discriminant(f))
            _check_implications(cert)
            if cert.two_transitive:
                assert g in ("A4", "S4")
            if g in ("D4", "C4", "V4"):
                assert not cert.two_transitive


def _transitive(group, n):
    return len(group.orbit(0)) == n


def _pair_orbit(gens, pair):
    seen, todo = {pair}, [pair]
    while todo:
        a, b = todo.pop()
        for g in gens:
            img = (g(a), g(b))
            if img not in seen:
                seen.add(img)
                todo.append(img)
    return seen


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_n_minus_one_cycle_implies_two_transitive(n):
    """Every transitive subgroup of S_n holding an (n-1)-cycle is 2-transitive.

    Any such group contains <c, h> for the (n-1)-cycle c and some h moving
    the fixed point of c; that subgroup is already transitive, and a group
    containing a 2-transitive subgroup is 2-transitive.  So it suffices to
    enumerate <c, h> over all h in S_n.
    """
    cyc = Permutation(list(range(1, n - 1)) + [0, n - 1])  # (0 1 ... n-2), fixes n-1
    checked = set()
    for perm in itertools.permutations(range(n)):
        G = PermutationGroup([cyc, Permutation(list(perm))])
        key = G.order(), tuple(sorted(G.orbit(0)))
        if not _transitive(G, n):
            continue
        checked.add(key)
        assert len(_pair_orbit(G.generators, (0, 1))) == n * (n - 1)
    assert checked
