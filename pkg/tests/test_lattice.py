import itertools
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poortori.errors import ErrDependent, ErrPrecision, InputError
from poortori.exact import RationalPoly
from poortori.generators import is_admissible, mori_poly, selmer, truncated_exponent
from poortori.lattice import (
    EXACT,
    LLL_NUMERIC,
    commutation_residual,
    companion_powers_flat,
    compute_invariants,
    end_rank,
    end_rank_numeric,
    integer_companion,
    integer_kernel_numeric,
    lll_reduce,
    ns_rank,
    ns_rank_numeric,
    rational_rank,
    spans_same_space,
)
from poortori.torus import (
    EmbeddingSignature,
    all_signatures,
    companion_matrix,
    complex_structure,
    gaussian_period_matrix,
    period_matrix,
    rational_structure,
)

SELM4 = selmer(4).poly
MORI = mori_poly(is_admissible(2, 3, 7, 5, -16))


def _torus_J(f, sig="00", prec=212):
    return complex_structure(period_matrix(f, EmbeddingSignature.parse(sig), prec))


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _shortest_norm(basis, bound):
    """Exhaustive search over small coefficient vectors."""
    best = None
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(basis)):
        if not any(coeffs):
            continue
        v = [sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(len(basis[0]))]
        n = _dot(v, v)
        best = n if best is None else min(best, n)
    return best


def _check_lll(basis, red, U, delta=Fraction(99, 100)):
    n = len(basis)
    # same lattice: red = U basis with det U = +-1
    for i in range(n):
        assert red[i] == [sum(U[i][k] * basis[k][j] for k in range(n)) for j in range(len(basis[0]))]
    import sympy as sp

    assert abs(sp.Matrix(U).det()) == 1
    # Gram-Schmidt in exact arithmetic
    bstar, mu = [], [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = [Fraction(x) for x in red[i]]
        for j in range(i):
            mu[i][j] = _dot(red[i], bstar[j]) / _dot(bstar[j], bstar[j])
            v = [a - mu[i][j] * b for a, b in zip(v, bstar[j])]
        bstar.append(v)
    for i in range(n):
        for j in range(i):
            assert abs(mu[i][j]) <= Fraction(1, 2)
    for k in range(1, n):
        lhs = _dot(bstar[k], bstar[k])
        rhs = (delta - mu[k][k - 1] ** 2) * _dot(bstar[k - 1], bstar[k - 1])
        assert lhs >= rhs


class TestLLL:
    def test_examples(self):
        assert lll_reduce([[1, 0], [4, 1]]) == [[1, 0], [0, 1]]
        assert lll_reduce([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_shortest_vector(self):
        basis = [[201, 37], [1648, 297]]
        red, U = lll_reduce(basis, with_transform=True)
        _check_lll(basis, red, U)
        # Minkowski: lambda_1^2 <= (4/3)^(1/2) |det|; 50 multiples of the basis cover that ball
        assert _dot(red[0], red[0]) == _shortest_norm(basis, 50)

    def test_dependent(self):
        with pytest.raises(ErrDependent):
            lll_reduce([[1, 2], [2, 4]])
        with pytest.raises(ErrDependent):
            lll_reduce([[0, 0], [1, 1]])

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 5), st.data())
    def test_properties(self, n, data):
        rows = data.draw(st.lists(st.lists(st.integers(-10**6, 10**6), min_size=n, max_size=n), min_size=n, max_size=n))
        if rational_rank(rows) < n:
            return
        red, U = lll_reduce(rows, with_transform=True)
        _check_lll(rows, red, U)


class TestNumericKernel:
    def test_identity(self):
        A = [[mpmath.mpf(1), mpmath.mpf(0)], [mpmath.mpf(0), mpmath.mpf(1)]]
        r = integer_kernel_numeric(A, 2, 100, mpmath.mpf(10) ** -20, mpmath.mpf(0), 212)
        assert r.rank == 0 and r.method == LLL_NUMERIC

    def test_difference(self):
        A = [[mpmath.mpf(1), mpmath.mpf(-1)]]
        r = integer_kernel_numeric(A, 2, 100, mpmath.mpf(10) ** -20, mpmath.mpf(0), 212)
        assert r.rank == 1 and [abs(x) for x in r.basis[0]] == [1, 1]

    def test_relation_among_reals(self):
        # sqrt(9/2) = (3/2) sqrt2, so (3, -2, 0) is a relation; pi is independent
        with mpmath.workprec(300):
            A = [[mpmath.sqrt(2), mpmath.sqrt(mpmath.mpf(9) / 2), mpmath.pi]]
        r = integer_kernel_numeric(A, 3, 10**6, mpmath.mpf(10) ** -40, mpmath.ldexp(1, -290), 236)
        assert r.rank == 1
        v = r.basis[0]
        assert v[2] == 0 and 2 * v[0] == -3 * v[1]

    def test_precision_guard(self):
        A = [[mpmath.mpf(1), mpmath.mpf(-1)]]
        with pytest.raises(ErrPrecision):
            integer_kernel_numeric(A, 2, 10**8, mpmath.mpf(10) ** -40, mpmath.mpf(10) ** -45, 212)


class TestControls:
    def test_gaussian_exact(self):
        J = complex_structure(gaussian_period_matrix(2))
        ns, end = ns_rank(J, 10**6), end_rank(J, 10**6)
        assert (ns.rank, ns.method) == (4, EXACT)
        assert (end.rank, end.method) == (8, EXACT)
        for E in ns.matrices:
            assert all(E[i][j] == -E[j][i] for i in range(4) for j in range(4))

    def test_gaussian_numeric_reproduces(self):
        J = complex_structure(gaussian_period_matrix(2))
        tol = mpmath.mpf(10) ** -30
        ns, end = ns_rank_numeric(J, 10**6, tol), end_rank_numeric(J, 10**6, tol)
        assert (ns.rank, ns.method) == (4, LLL_NUMERIC)
        assert end.rank == 8
        assert spans_same_space(ns.basis, ns_rank(J, 10**6).basis)
        assert spans_same_space(end.basis, end_rank(J, 10**6).basis)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_rotation_blocks(self, k):
        """Direct sums of rational rotation blocks: exact and numeric paths agree."""
        rng = random.Random(k)
        n = 2 * k
        J = [[Fraction(0)] * n for _ in range(n)]
        for b in range(k):
            # conjugate of [[0,-1],[1,0]] by diag(1, t) is a rational J with J^2 = -I
            t = Fraction(rng.randint(1, 5), rng.randint(1, 5))
            J[2 * b][2 * b + 1] = -1 / t
            J[2 * b + 1][2 * b] = t
        Js = rational_structure(J)
        tol = mpmath.mpf(10) ** -30
        for exact, numeric in ((ns_rank, ns_rank_numeric), (end_rank, end_rank_numeric)):
            a, b = exact(Js, 10**6, tol), numeric(Js, 10**6, tol)
            assert a.rank == b.rank and spans_same_space(a.basis, b.basis)


class TestTorusInvariants:
    @pytest.mark.parametrize("sig", ["00", "01", "10", "11"])
    def test_selm4(self, sig):
        J = _torus_J(SELM4, sig)
        inv = compute_invariants(J, companion_matrix(SELM4))
        assert inv.ns.rank == 0
        assert inv.end.rank == 4 and inv.companion_in_span
        for v, res in zip(inv.end.basis, inv.end.residuals):
            assert max(abs(x) for x in v) <= 10**8 and res <= mpmath.mpf(10) ** -40

    def test_mori(self):
        J = _torus_J(MORI)
        inv = compute_invariants(J, companion_matrix(MORI))
        assert inv.ns.rank == 0 and inv.end.rank == 4 and inv.companion_in_span

    def test_exp4(self):
        f = truncated_exponent(4)
        J = _torus_J(f)
        assert end_rank(J).rank == 4

    def test_end_contains_identity(self):
        inv = compute_invariants(_torus_J(SELM4))
        assert inv.end.rank >= 1
        ident = [int(i == j) for i in range(4) for j in range(4)]
        assert rational_rank(inv.end.basis + [ident]) == inv.end.rank

    def test_residual_precondition(self):
        J = _torus_J(SELM4, prec=64)
        with pytest.raises(ErrPrecision):
            ns_rank(J, 10**8, mpmath.mpf(10) ** -40)


class TestCommutation:
    def test_exact_zero(self):
        J = rational_structure([[0, -1], [1, 0]])
        assert commutation_residual(companion_matrix(RationalPoly((1, 0, 1))), J) == 0

    def test_selm4(self):
        J = _torus_J(SELM4)
        assert commutation_residual(companion_matrix(SELM4), J) < mpmath.mpf(10) ** -50

    def test_random_matrix(self):
        J = _torus_J(SELM4)
        rng = random.Random(7)
        M = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(4)]
        assert commutation_residual(M, J) > 1e-2

    def test_dimension(self):
        with pytest.raises(InputError):
            commutation_residual([[1]], _torus_J(SELM4))

    def test_integer_companion(self):
        C = companion_matrix(MORI)
        Ci = integer_companion(C)
        assert all(isinstance(x, int) for row in Ci for x in row)
        assert spans_same_space(companion_powers_flat(C)[:2], [[int(i == j) for i in range(4) for j in range(4)],
                                                               [x for row in Ci for x in row]])
