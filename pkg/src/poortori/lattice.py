"""LLL reduction and integer kernels: Neron-Severi rank and End(T) (x) Q.

NS(T) is the group of integer alternating forms E on the lattice with
J^T E J = E; End(T) is the ring of integer matrices M with M J = J M.  Both
are integer kernels of linear maps built from J.  For rational J the kernel
is computed exactly.  Otherwise integer vectors of height <= H whose image
is below ``tol`` are harvested from an LLL-reduced embedding; a rank of 0
then only means nothing exists below (H, tol).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import ErrDependent, ErrPrecision, InputError
from .torus import ComplexStructure

EXACT = "EXACT"
LLL_NUMERIC = "LLL_NUMERIC"

DEFAULT_HEIGHT = 10**8
DEFAULT_TOL = mpmath.mpf(10) ** -40
DELTA = Fraction(99, 100)


# ---------------------------------------------------------------------------
# LLL


def lll_reduce(basis, delta: Fraction = DELTA, with_transform: bool = False):
    """Integral LLL (all-integer Gram-Schmidt, Cohen's Algorithm 2.6.7).

    Rows of ``basis`` must be linearly independent.  Returns the reduced
    rows, and optionally the unimodular U with reduced = U * basis.
    """
    b = [[int(x) for x in row] for row in basis]
    n = len(b)
    if n == 0:
        return ([], []) if with_transform else []
    H = [[int(i == j) for j in range(n)] for i in range(n)]
    dp, dq = delta.numerator, delta.denominator

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    # d[i] is the Gram determinant of the first i vectors (d[0] = 1);
    # lam[k][j] = d[j+1] * mu[k][j]
    d = [1] + [0] * n
    lam = [[0] * n for _ in range(n)]
    d[1] = dot(b[0], b[0])
    if d[1] == 0:
        raise ErrDependent("zero vector in basis")

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            H[k] = [x - q * y for x, y in zip(H[k], H[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        b[k], b[k - 1] = b[k - 1], b[k]
        H[k], H[k - 1] = H[k - 1], H[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k + 1]
        d[k] = B

    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k + 1] = u
                    if u == 0:
                        raise ErrDependent("rows are linearly dependent")
        red(k, k - 1)
        if dq * d[k + 1] * d[k - 1] < dp * d[k] * d[k] - dq * lam[k][k - 1] ** 2:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return (b, H) if with_transform else b


# ---------------------------------------------------------------------------
# rational linear algebra


def rational_rank(vectors) -> int:
    return len(_rref([[Fraction(x) for x in v] for v in vectors])[1])


def _rref(rows):
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                t = rows[i][c]
                rows[i] = [a - t * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rational_nullspace(A, m: int) -> list[list[Fraction]]:
    """Basis of {v in Q^m : A v = 0} for a list of rational rows A."""
    rows = [[Fraction(x) for x in row] for row in A if any(x != 0 for x in row)]
    if not rows:
        return [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    red, pivots = _rref(rows)
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * m
        v[fcol] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fcol]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# integer kernels


@dataclass
class IntegerKernelResult:
    rank: int
    basis: list  # integer tuples
    residuals: list  # mpf or Fraction per basis vector
    height_bound: int
    tol: mpmath.mpf
    method: str
    precision_bits: int = 0
    matrices: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "rank": str(self.rank),
            "basis": [[str(x) for x in v] for v in self.basis],
            "matrices": [[[str(x) for x in row] for row in M] for M in self.matrices],
            "residuals": [_fmt(r) for r in self.residuals],
            "heightBound": str(self.height_bound),
            "tol": mpmath.nstr(mpmath.mpf(self.tol), 6),
            "method": self.method,
            "precisionBits": str(self.precision_bits),
        }


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return "0" if x == 0 else mpmath.nstr(x, 6)


def exact_integer_kernel(A, m: int) -> tuple[int, list[tuple[int, ...]]]:
    """Rank of ker A over Q and a Z-basis of ker A intersected with Z^m."""
    null = rational_nullspace(A, m)
    r = len(null)
    if r == 0:
        return 0, []
    ints = []
    for row in A:
        row = [Fraction(x) for x in row]
        den = math.lcm(*(x.denominator for x in row)) if row else 1
        ints.append([int(x * den) for x in row])
    C = 1 << 64
    while True:
        emb = [[int(i == j) for j in range(m)] + [C * row[i] for row in ints] for i in range(m)]
        red = lll_reduce(emb)
        ker = [tuple(v[:m]) for v in red if not any(v[m:])]
        if len(ker) == r and rational_rank(ker) == r:
            return r, ker
        C <<= 32


def integer_kernel_numeric(A, m: int, H: int, tol, entry_err, precision_bits: int) -> IntegerKernelResult:
    """Near-kernel integer vectors of the real map v -> A v.

    A is a list of rows (mpf), each of length m.  Rows of the embedding are
    (e_i, round(K * A e_i)) with K ~ H / tol.
    """
    tol = mpmath.mpf(tol)
    if not tol > m * mpmath.mpf(entry_err) * H:
        raise ErrPrecision(f"tol {mpmath.nstr(tol, 3)} below the propagated error {mpmath.nstr(m * entry_err * H, 3)}")
    work = precision_bits + 64
    with mpmath.workprec(work):
        K = 1 << int(mpmath.ceil(mpmath.log(H / tol, 2)))
        emb = []
        for i in range(m):
            emb.append([int(i == j) for j in range(m)] + [int(mpmath.nint(K * row[i])) for row in A])
        red = lll_reduce(emb)
        basis, residuals = [], []
        for v in red:
            x = v[:m]
            if max(abs(t) for t in x) > H:
                continue
            res = max(abs(mpmath.fsum(row[i] * x[i] for i in range(m) if x[i])) for row in A)
            if res > tol:
                continue
            if rational_rank(basis + [x]) > len(basis):
                basis.append(tuple(x))
                residuals.append(res)
    return IntegerKernelResult(len(basis), basis, residuals, H, tol, LLL_NUMERIC, precision_bits)


# ---------------------------------------------------------------------------
# NS and End


def alternating_basis(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _alt_matrix(n, coords, vec):
    M = [[0] * n for _ in range(n)]
    for (i, j), x in zip(coords, vec):
        M[i][j] = x
        M[j][i] = -x
    return M


def _full_matrix(n, vec):
    return [list(vec[i * n : (i + 1) * n]) for i in range(n)]


def _ns_images(Jrows, n, zero, one):
    """Columns of E -> J^T E J - E over the alternating basis, upper-triangle entries."""
    coords = alternating_basis(n)
    cols = []
    for a, b in coords:
        # (J^T E J)_{rs} = J_{ar} J_{bs} - J_{br} J_{as}
        col = []
        for r, s in coords:
            v = Jrows[a][r] * Jrows[b][s] - Jrows[b][r] * Jrows[a][s]
            if (r, s) == (a, b):
                v -= one
            col.append(v)
        cols.append(col)
    return coords, [list(row) for row in zip(*cols)]


def _end_images(Jrows, n, zero):
    """Columns of M -> M J - J M over the elementary basis E_ab (row-major)."""
    cols = []
    for a in range(n):
        for b in range(n):
            # (E_ab J)_{rs} = [r = a] J_{bs};  (J E_ab)_{rs} = J_{ra} [s = b]
            col = []
            for r in range(n):
                for s in range(n):
                    v = zero
                    if r == a:
                        v = v + Jrows[b][s]
                    if s == b:
                        v = v - Jrows[r][a]
                    col.append(v)
            cols.append(col)
    return [list(row) for row in zip(*cols)]


def _check_residual(J: ComplexStructure, tol):
    if not J.residual <= mpmath.mpf(tol) / 10:
        raise ErrPrecision(f"J residual {mpmath.nstr(J.residual, 3)} above tol/10")


def _entry_err(J: ComplexStructure) -> mpmath.mpf:
    n = J.size
    jmax = max(abs(J.J[i, j]) for i in range(n) for j in range(n))
    return 2 * (jmax + 1) * J.error + J.error**2


def ns_rank(J: ComplexStructure, H: int = DEFAULT_HEIGHT, tol=DEFAULT_TOL) -> IntegerKernelResult:
    n = J.size
    _check_residual(J, tol)
    if J.exact is not None:
        coords, A = _ns_images(J.exact, n, Fraction(0), Fraction(1))
        r, basis = exact_integer_kernel(A, len(coords))
        res = IntegerKernelResult(r, basis, [Fraction(0)] * r, H, mpmath.mpf(tol), EXACT, J.precision_bits)
    else:
        Jrows = [[J.J[i, j] for j in range(n)] for i in range(n)]
        with mpmath.workprec(J.precision_bits + 64):
            coords, A = _ns_images(Jrows, n, mpmath.mpf(0), mpmath.mpf(1))
        res = integer_kernel_numeric(A, len(coords), H, tol, _entry_err(J), J.precision_bits)
    res.matrices = [_alt_matrix(n, coords, v) for v in res.basis]
    return res


def ns_rank_numeric(J: ComplexStructure, H: int, tol) -> IntegerKernelResult:
    """Numeric path forced even when J is exactly rational."""
    return ns_rank(_drop_exact(J), H, tol)


def end_rank(J: ComplexStructure, H: int = DEFAULT_HEIGHT, tol=DEFAULT_TOL) -> IntegerKernelResult:
    n = J.size
    _check_residual(J, tol)
    if J.exact is not None:
        A = _end_images(J.exact, n, Fraction(0))
        r, basis = exact_integer_kernel(A, n * n)
        res = IntegerKernelResult(r, basis, [Fraction(0)] * r, H, mpmath.mpf(tol), EXACT, J.precision_bits)
    else:
        Jrows = [[J.J[i, j] for j in range(n)] for i in range(n)]
        with mpmath.workprec(J.precision_bits + 64):
            A = _end_images(Jrows, n, mpmath.mpf(0))
        res = integer_kernel_numeric(A, n * n, H, tol, _entry_err(J), J.precision_bits)
    res.matrices = [_full_matrix(n, v) for v in res.basis]
    return res


def end_rank_numeric(J: ComplexStructure, H: int, tol) -> IntegerKernelResult:
    return end_rank(_drop_exact(J), H, tol)


def _drop_exact(J: ComplexStructure) -> ComplexStructure:
    return ComplexStructure(J.J, J.residual, J.precision_bits, J.error, None)


def commutation_residual(M, J: ComplexStructure):
    """max |M J - J M|; exact zero is returned as Fraction(0) on the rational path."""
    n = J.size
    if len(M) != n or any(len(row) != n for row in M):
        raise InputError("dimension mismatch")
    if J.exact is not None and all(isinstance(x, (int, Fraction)) for row in M for x in row):
        Jx = J.exact
        return max(
            abs(sum(Fraction(M[i][k]) * Jx[k][j] - Jx[i][k] * Fraction(M[k][j]) for k in range(n)))
            for i in range(n)
            for j in range(n)
        )
    with mpmath.workprec(J.precision_bits + 64):
        Mm = mpmath.matrix([[_to_mpf(x) for x in row] for row in M])
        D = Mm * J.J - J.J * Mm
        return max(abs(D[i, j]) for i in range(n) for j in range(n))


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def spans_same_space(vectors_a, vectors_b) -> bool:
    """Exact comparison of rational spans."""
    ra, rb = rational_rank(vectors_a), rational_rank(vectors_b)
    return ra == rb == rational_rank(list(vectors_a) + list(vectors_b))


def companion_powers_flat(C) -> list[list[Fraction]]:
    """I, C, ..., C^(n-1) flattened row-major."""
    n = len(C)
    out = []
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(n):
        out.append([x for row in P for x in row])
        P = [[sum((P[i][k] * C[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
    return out


def integer_companion(C) -> list[list[int]]:
    """Companion matrix scaled by the lcm of its denominators."""
    den = math.lcm(*(Fraction(x).denominator for row in C for x in row))
    return [[int(Fraction(x) * den) for x in row] for row in C]


@dataclass
class InvariantReport:
    ns: IntegerKernelResult
    end: IntegerKernelResult
    companion_residual: object
    companion_in_span: bool | None = None

    def to_json(self) -> dict:
        return {
            "nsRank": self.ns.to_json(),
            "endRank": self.end.to_json(),
            "companionResidual": _fmt(self.companion_residual),
            "companionPowersInEndSpan": self.companion_in_span,
        }


def compute_invariants(J: ComplexStructure, C=None, H: int = DEFAULT_HEIGHT, tol=DEFAULT_TOL) -> InvariantReport:
    """NS and End ranks of the torus with complex structure J; C is the
    companion matrix of the defining polynomial when there is one."""
    ns = ns_rank(J, H, tol)
    end = end_rank(J, H, tol)
    res, in_span = None, None
    if C is not None:
        Ci = integer_companion(C)
        res = commutation_residual(Ci, J)
        in_span = spans_same_space(end.basis, companion_powers_flat(C)) if end.rank == len(C) else False
    return InvariantReport(ns, end, res, in_span)
