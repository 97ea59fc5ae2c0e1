import math
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from poortori.errors import (
    ErrBadCount,
    ErrBadDegree,
    ErrExcludedPrime,
    ErrInvalidQuadruple,
    ErrNotPrime,
    ErrUnsupportedShape,
)
from poortori.exact import RationalPoly, discriminant, sturm_count, valuation
from poortori.generators import (
    FLAG_NAMES,
    HAS_REAL_ROOTS,
    NO_REAL_ROOTS,
    RAMIFIED,
    UNDECIDED,
    UNRAMIFIED,
    AdmissibleQuadruple,
    RealRootExclusion,
    RamificationWitness,
    build_family,
    c_bound_interval,
    certify_member,
    is_admissible,
    is_primitive_root,
    mori_poly,
    primitive_root,
    ramification_witness,
    real_root_exclusion,
    search_quadruple,
    selmer,
    trinomial_disc_closed,
    trinomial_disc_signflip,
    truncated_exponent,
)

X = sp.Symbol("x")


def _scipy_min(g, l, p, b, c):
    r = minimize_scalar(lambda t: t ** (2 * g) - b * t - p * c / l**l, bounds=(-10, 10), method="bounded",
                        options={"xatol": 1e-12})
    return r.fun


class TestExpSelmer:
    def test_truncated_exponent(self):
        e2 = truncated_exponent(2)
        assert e2.coeffs == (2, 2, 1) and e2.den == 2
        e4 = truncated_exponent(4)
        assert e4.coeffs == (24, 24, 12, 4, 1) and e4.den == 24
        with pytest.raises(ErrBadDegree):
            truncated_exponent(3)

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
    def test_truncated_exponent_matches_series(self, n):
        series = sum(X**j / sp.factorial(j) for j in range(n + 1))
        ours = sum(sp.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(truncated_exponent(n).fractions()))
        assert sp.expand(series - ours) == 0

    def test_selmer(self):
        assert selmer(4).poly == RationalPoly((1, 1, 0, 0, 1)) and not selmer(4).reducible_risk
        assert selmer(10).poly.degree == 10 and not selmer(10).reducible_risk
        s8 = selmer(8)
        assert s8.reducible_risk and "REDUCIBLE_RISK" in s8.flags
        # x^2 + x + 1 really divides x^8 + x + 1
        assert sp.rem(X**8 + X + 1, X**2 + X + 1, X) == 0
        with pytest.raises(ErrBadDegree):
            selmer(5)

    @pytest.mark.parametrize("n", range(4, 31, 2))
    def test_risk_flag_iff_reducible(self, n):
        assert selmer(n).reducible_risk == (not sp.Poly(X**n + X + 1, X).is_irreducible)


class TestPrimitiveRoots:
    def test_examples(self):
        assert primitive_root(7) == 3
        assert primitive_root(2) == 1
        assert primitive_root(5) == 2
        assert primitive_root(11) == 2
        with pytest.raises(ErrNotPrime):
            primitive_root(9)

    @pytest.mark.parametrize("p", list(sp.primerange(3, 200)))
    def test_matches_sympy(self, p):
        assert primitive_root(p) == sp.primitive_root(p)
        assert all(is_primitive_root(a, p) == (sp.n_order(a, p) == p - 1) for a in range(1, p))


class TestAdmissible:
    def test_valid(self):
        q = is_admissible(2, 3, 7, 5, -16)
        assert q.valid and q.failed() == []

    def test_counterexample(self):
        q = is_admissible(2, 3, 5, 2, -4)
        assert not q.valid
        assert set(q.failed()) == {"radicalDividesPMinusOne", "noRealRoots"}

    def test_l_not_dividing(self):
        q = is_admissible(2, 2, 7, 5, -16)
        assert not q.valid and "lDividesTwoGMinusOne" in q.failed()

    def test_errors(self):
        with pytest.raises(ErrNotPrime):
            is_admissible(2, 4, 7, 5, -16)
        with pytest.raises(ErrBadCount):
            is_admissible(1, 1, 7, 5, -16)

    def test_json(self):
        q = is_admissible(2, 3, 7, 5, -16)
        assert AdmissibleQuadruple.from_json(q.to_json()) == q
        assert set(q.to_json()["flags"]) == set(FLAG_NAMES)


class TestMoriPoly:
    def test_examples(self):
        assert str(mori_poly(is_admissible(2, 3, 7, 5, -16))) == "x^4 - 5*x + 112/27"
        assert str(mori_poly(is_admissible(2, 3, 7, 5, -20))) == "x^4 - 5*x + 140/27"
        bad = is_admissible(2, 3, 5, 2, -4)
        assert str(mori_poly(bad, force=True)) == "x^4 - 2*x + 20/27"
        with pytest.raises(ErrInvalidQuadruple):
            mori_poly(bad)


class TestRealRoots:
    # minima from an independent numeric optimiser
    MINIMA = {(2, 3, 7, 5, -16): 0.1085831043, (2, 3, 5, 2, -4): -0.4498100482, (2, 3, 7, 5, -20): 1.1456201414}

    @pytest.mark.parametrize("q", list(MINIMA))
    def test_min_enclosure(self, q):
        rr = real_root_exclusion(*q)
        m = self.MINIMA[q]
        assert abs(_scipy_min(*q) - m) < 1e-8
        iv = rr.closed_form_min
        assert iv.lo - Fraction(1, 10**8) <= Fraction(m) <= iv.hi + Fraction(1, 10**8)
        assert iv.width < Fraction(1, 10**12)

    def test_verdicts(self):
        assert real_root_exclusion(2, 3, 7, 5, -16).verdict == NO_REAL_ROOTS
        bad = real_root_exclusion(2, 3, 5, 2, -4)
        assert bad.verdict == HAS_REAL_ROOTS and bad.sturm_count == 2
        assert real_root_exclusion(2, 3, 7, 5, -20).verdict == NO_REAL_ROOTS
        assert RealRootExclusion.from_json(bad.to_json()) == bad

    def test_b_nonpositive(self):
        with pytest.raises(ErrUnsupportedShape):
            real_root_exclusion(2, 3, 7, 0, -16)

    def test_naive_inequality_admits_counterexample(self):
        # a bound with the factor (b/2g - 1) instead of (b/2g - b) admits (3,5,2,-4), which has real roots
        g, l, p, b, c = 2, 3, 5, 2, -4
        naive_bound = l**l * (b / (2 * g)) ** (1 / (2 * g - 1)) * (b / (2 * g) - 1) / p
        assert c < naive_bound
        assert sturm_count(mori_poly(is_admissible(g, l, p, b, c), force=True)) == 2
        assert _scipy_min(g, l, p, b, c) < 0

    @settings(max_examples=40, deadline=None)
    @given(
        st.sampled_from([(2, 3, 7), (2, 3, 13), (3, 5, 11)]),
        st.integers(1, 40),
        st.integers(-3000, 3000),
    )
    def test_interval_and_sturm_agree(self, glp, b, c):
        g, l, p = glp
        rr = real_root_exclusion(g, l, p, b, c)  # raises on disagreement
        assert (rr.closed_form_min.sign() > 0) == (rr.sturm_count == 0)

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from([(2, 3, 7), (3, 5, 11), (4, 7, 43)]), st.integers(1, 60))
    def test_bound_is_threshold(self, glp, b):
        g, l, p = glp
        iv = c_bound_interval(g, l, p, b)
        below = math.floor(iv.lo) - (1 if iv.lo == math.floor(iv.lo) else 0)
        above = math.ceil(iv.hi)
        assert real_root_exclusion(g, l, p, b, below).verdict == NO_REAL_ROOTS
        assert real_root_exclusion(g, l, p, b, above).verdict == HAS_REAL_ROOTS


class TestDiscriminants:
    def test_closed_examples(self):
        assert trinomial_disc_closed(2, 3, 7, 5, -16) == Fraction(27510943, 19683)
        assert trinomial_disc_closed(2, 3, 7, 5, -20) == Fraction(370313375, 19683)

    def test_binomial_case(self):
        f = RationalPoly.from_fractions([Fraction(7 * 16, 27), 0, 0, 0, 1])
        assert trinomial_disc_closed(2, 3, 7, 0, -16) == discriminant(f)

    def test_signflip_form_differs(self):
        flipped = trinomial_disc_signflip(2, 3, 7, 5, -16)
        assert abs(flipped) != abs(discriminant(mori_poly(is_admissible(2, 3, 7, 5, -16))))
        assert flipped == Fraction(-691812193, 19683)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 5), st.sampled_from([2, 3, 5, 7]), st.sampled_from([3, 5, 7, 11]),
           st.integers(-30, 30), st.integers(-500, 500))
    def test_closed_matches_sympy(self, g, l, p, b, c):
        f = sp.Poly(X ** (2 * g) - b * X - sp.Rational(p * c, l**l), X)
        assert trinomial_disc_closed(g, l, p, b, c) == f.discriminant()


class TestRamification:
    def test_examples(self):
        f20 = mori_poly(is_admissible(2, 3, 7, 5, -20))
        w = ramification_witness(f20, 5, 3)
        assert (w.disc_valuation, w.conclusion) == (3, RAMIFIED)
        f16 = mori_poly(is_admissible(2, 3, 7, 5, -16))
        w = ramification_witness(f16, 2, 3)
        assert (w.disc_valuation, w.conclusion) == (0, UNRAMIFIED)
        assert ramification_witness(f16, 5, 3).conclusion == UNRAMIFIED
        with pytest.raises(ErrExcludedPrime):
            ramification_witness(f16, 3, 3)
        assert RamificationWitness.from_json(w.to_json()) == w

    def test_undecided(self):
        bad = mori_poly(is_admissible(2, 3, 5, 2, -4), force=True)
        assert ramification_witness(bad, 2, 3).conclusion == UNDECIDED

    @settings(max_examples=40, deadline=None)
    @given(st.integers(-10**6, 10**6).filter(lambda c: c != 0), st.sampled_from([2, 5, 7, 11, 13]))
    def test_conclusion_matches_parity(self, c, ell):
        f = RationalPoly.from_fractions([Fraction(-7 * c, 27), -5, 0, 0, 1])
        d = discriminant(f)
        if d == 0:
            return
        w = ramification_witness(f, ell, 3, d)
        v = valuation(d, ell)
        assert w.disc_valuation == v
        assert w.conclusion == (UNRAMIFIED if v == 0 else RAMIFIED if v % 2 else UNDECIDED)


class TestSearchAndFamily:
    def test_search_g2(self):
        q = search_quadruple(2)
        assert (q.l, q.p, q.b, q.c) == (3, 7, 5, -16) and q.valid

    def test_search_g3(self):
        q = search_quadruple(3)
        assert (q.l, q.p, q.b) == (5, 11, 2) and q.valid
        # c is the largest integer below the certified bound with 5 not dividing c
        assert q.c == -381 and math.floor(c_bound_interval(3, 5, 11, 2).lo) == -381

    def test_search_errors(self):
        with pytest.raises(ErrBadCount):
            search_quadruple(1)

    @pytest.mark.parametrize("g", [2, 3, 4])
    def test_certificate_chain(self, g):
        q = search_quadruple(g)
        f = mori_poly(q)
        cert = certify_member(q, f)
        assert cert.ok and cert.cycle_type_at_p == (1, 2 * g - 1) and cert.sturm == 0

    def test_family_count_two(self):
        fam = build_family(2, 2)
        m1, m2 = fam.members
        assert (m1.quadruple.c, m1.quadruple.b) == (-16, 5)
        assert m2.witness.ell == 5 and m2.quadruple.b % 5 == 0 and m2.quadruple.c % 25 == 5
        assert m2.witness.disc_valuation == 3 and valuation(m1.disc, 5) == 0

    def test_family_errors(self):
        with pytest.raises(ErrBadCount):
            build_family(2, 0)

    @pytest.mark.parametrize("g,count", [(2, 4), (3, 3)])
    def test_family_invariants(self, g, count):
        fam = build_family(g, count)
        assert len(fam.members) == count
        for m in fam.members:
            assert m.quadruple.valid and m.certificate.ok
            assert m.disc == discriminant(m.poly)
            if m.witness is not None:
                assert m.witness.disc_valuation == 2 * g - 1
        for i, a in enumerate(fam.members):
            for j, b in enumerate(fam.members):
                if i == j:
                    continue
                ell = fam.distinguishers[i][j]
                assert ell is not None
                va, vb = valuation(a.disc, ell), valuation(b.disc, ell)
                assert (va % 2 and vb == 0) or (vb % 2 and va == 0)
