"""Period matrices and complex structures of tori E_R / Lambda.

E = Q[x]/f with f of degree 2g and no real roots.  Lambda is the power-basis
lattice Z<1, a, ..., a^(2g-1)> (or its image under an integer change of
basis).  A signature picks, for each conjugate pair of roots, which member
is used as the j-th coordinate of Psi: E_R -> C^g.

The real structure matrix J is multiplication by i on C^g written in the
lattice basis, so J acts on integer coordinate vectors and satisfies
J^2 = -I.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import (
    ErrConjugacy,
    ErrDegenerateLattice,
    ErrNotMonic,
    ErrPrecision,
    ErrRealRoot,
    InputError,
)
from .exact import RationalPoly, is_squarefree

DEFAULT_PRECISION = 212
GUARD_BITS = 64
MAX_RETRIES = 4


def _work(prec: int) -> int:
    return prec + GUARD_BITS


# ---------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class Root:
    z: mpmath.mpc
    radius: mpmath.mpf
    work_bits: int = DEFAULT_PRECISION + GUARD_BITS

    def touches_real_axis(self) -> bool:
        return abs(self.z.imag) <= self.radius


def _horner(coeffs, z):
    """Value and derivative of sum coeffs[i] z^i."""
    v = mpmath.mpc(0)
    d = mpmath.mpc(0)
    for c in reversed(coeffs):
        d = d * z + v
        v = v * z + c
    return v, d


def complex_roots(f: RationalPoly, precision_bits: int = DEFAULT_PRECISION, require_no_real: bool = False) -> list[Root]:
    """All roots of a squarefree f with error radii.

    Seeds come from mpmath's Durand-Kerner iteration, then each root is
    polished by Newton steps.  The radius n|f(z)/f'(z)| encloses a true root
    (a classical inclusion bound); disks must be pairwise disjoint.
    """
    if f.degree < 1:
        raise InputError("constant polynomial has no roots")
    if not is_squarefree(f):
        raise InputError("complex_roots needs a squarefree polynomial")
    ints = list(f.primitive().coeffs)
    n = len(ints) - 1
    height = max(abs(c) for c in ints)
    work = _work(precision_bits)
    with mpmath.workprec(work):
        try:
            seeds = mpmath.polyroots(list(reversed(ints)), maxsteps=200 + 20 * n, extraprec=2 * work)
        except mpmath.libmp.NoConvergence as exc:
            raise ErrPrecision("root iteration did not converge") from exc
        roots = []
        for z in seeds:
            z = mpmath.mpc(z)
            for _ in range(8):
                v, d = _horner(ints, z)
                if d == 0:
                    break
                step = v / d
                z -= step
                if abs(step) < mpmath.ldexp(abs(z) + 1, -work):
                    break
            v, d = _horner(ints, z)
            if d == 0:
                raise ErrPrecision("vanishing derivative at a root estimate")
            # rounding in Horner's scheme is bounded by a small multiple of sum |c_i||z|^i
            slack = mpmath.ldexp(n * sum(abs(c) * abs(z) ** i for i, c in enumerate(ints)), -work + 4)
            radius = n * (abs(v) + slack) / abs(d)
            if abs(v) >= mpmath.ldexp(height, -precision_bits):
                raise ErrPrecision(f"residual {mpmath.nstr(abs(v), 5)} above 2^-{precision_bits} * height")
            roots.append(Root(z, radius, work))
        for a, b in itertools.combinations(roots, 2):
            if abs(a.z - b.z) <= a.radius + b.radius:
                raise ErrPrecision("root disks overlap")
    if require_no_real and any(r.touches_real_axis() for r in roots):
        raise ErrRealRoot(f"{f} has a root on or near the real axis")
    return roots


def pair_conjugates(roots: list[Root]) -> list[tuple[Root, Root]]:
    """Match each upper-half-plane root with its conjugate; order by (Re, |Im|)."""
    if any(r.touches_real_axis() for r in roots):
        raise ErrRealRoot("a root disk touches the real axis")
    upper = [r for r in roots if r.z.imag > 0]
    lower = [r for r in roots if r.z.imag < 0]
    if len(upper) != len(lower):
        raise ErrConjugacy("unequal numbers of upper and lower roots")
    pairs = []
    used = set()
    work = max((r.work_bits for r in roots), default=DEFAULT_PRECISION)
    for u in upper:
        with mpmath.workprec(work):
            hits = [
                i
                for i, w in enumerate(lower)
                if i not in used and abs(mpmath.conj(u.z) - w.z) <= u.radius + w.radius
            ]
        if len(hits) != 1:
            raise ErrConjugacy(f"root {mpmath.nstr(u.z, 10)} has {len(hits)} conjugate matches")
        used.add(hits[0])
        pairs.append((u, lower[hits[0]]))
    pairs.sort(key=lambda pr: (pr[0].z.real, abs(pr[0].z.imag)))
    return pairs


# ---------------------------------------------------------------------------
# signatures and period matrices


@dataclass(frozen=True)
class EmbeddingSignature:
    """bits[j] False selects the upper root of pair j, True its conjugate."""

    bits: tuple[bool, ...]

    @classmethod
    def parse(cls, text: str) -> EmbeddingSignature:
        if not text or set(text) - {"0", "1"}:
            raise InputError(f"signature must be a bitstring, got {text!r}")
        return cls(tuple(ch == "1" for ch in text))

    @classmethod
    def zeros(cls, g: int) -> EmbeddingSignature:
        return cls((False,) * g)

    def __str__(self):
        return "".join("1" if b else "0" for b in self.bits)


def all_signatures(g: int) -> list[EmbeddingSignature]:
    return [EmbeddingSignature(bits) for bits in itertools.product((False, True), repeat=g)]


@dataclass
class PeriodMatrix:
    g: int
    precision_bits: int
    entries: list  # g rows of 2g mpc
    errors: list  # g rows of 2g mpf
    signature: EmbeddingSignature
    condition: mpmath.mpf
    basis_convention: str = "POWER_BASIS"

    def stacked(self):
        """Real 2g x 2g matrix: real parts over imaginary parts."""
        rows = [[z.real for z in row] for row in self.entries]
        rows += [[z.imag for z in row] for row in self.entries]
        return mpmath.matrix(rows)

    def exact_gaussian(self):
        """Entries as Gaussian integers when they are exactly such, else None."""
        out = []
        for row, errs in zip(self.entries, self.errors):
            r = []
            for z, e in zip(row, errs):
                if e != 0 or z.real != int(z.real) or z.imag != int(z.imag):
                    return None
                r.append((int(z.real), int(z.imag)))
            out.append(r)
        return out

    def to_json(self) -> dict:
        digits = _digits(self.precision_bits)
        return {
            "g": str(self.g),
            "precisionBits": str(self.precision_bits),
            "signature": str(self.signature),
            "basisConvention": self.basis_convention,
            "condition": mpmath.nstr(self.condition, 6),
            "entries": [
                [
                    {"re": _dec(z.real, digits), "im": _dec(z.imag, digits), "err": mpmath.nstr(e, 3)}
                    for z, e in zip(row, errs)
                ]
                for row, errs in zip(self.entries, self.errors)
            ],
        }


def _digits(bits: int) -> int:
    return int(bits * 0.30103)


def _dec(x, digits: int) -> str:
    if x == 0:
        return "0"
    return mpmath.nstr(x, digits, min_fixed=-5, max_fixed=5, strip_zeros=False)


def period_matrix(
    f: RationalPoly,
    signature: EmbeddingSignature,
    precision_bits: int = DEFAULT_PRECISION,
    basis=None,
) -> PeriodMatrix:
    """Entry (j, k) is tau_j(a)^k; ``basis`` optionally maps the power basis to
    another lattice basis (integer matrix whose columns are coordinates)."""
    n = f.degree
    if n % 2:
        raise InputError("degree must be even")
    g = n // 2
    if len(signature.bits) != g:
        raise InputError(f"signature length {len(signature.bits)} != g = {g}")
    pairs = pair_conjugates(complex_roots(f, precision_bits, require_no_real=True))
    work = _work(precision_bits)
    with mpmath.workprec(work):
        entries, errors = [], []
        for (up, lo), bit in zip(pairs, signature.bits):
            root = lo if bit else up
            z, r = root.z, root.radius
            row, err = [], []
            acc = mpmath.mpc(1)
            for k in range(n):
                row.append(acc)
                bound = (abs(z) + r) ** (k - 1) * k * r if k else mpmath.mpf(0)
                err.append(bound + (mpmath.ldexp(abs(acc), -work + 4) if k > 1 else 0))
                acc = acc * z
            entries.append(row)
            errors.append(err)
        if basis is not None:
            entries, errors = _change_basis(entries, errors, basis)
        pm = PeriodMatrix(g, precision_bits, entries, errors, signature, mpmath.mpf(0))
        P = pm.stacked()
        try:
            Pinv = mpmath.inverse(P)
        except ZeroDivisionError as exc:
            raise ErrDegenerateLattice("stacked period matrix is singular") from exc
        pm.condition = mpmath.mnorm(P, "inf") * mpmath.mnorm(Pinv, "inf")
    if pm.condition * mpmath.ldexp(1, -precision_bits // 2) >= 1:
        raise ErrDegenerateLattice(f"condition {mpmath.nstr(pm.condition, 5)} too large for precision")
    worst = max(max(row) for row in errors)
    if worst >= mpmath.ldexp(1, -precision_bits // 2):
        raise ErrPrecision("period matrix error radius exceeds 2^(-prec/2)")
    return pm


def _change_basis(entries, errors, basis):
    n = len(entries[0])
    B = [[int(x) for x in row] for row in basis]
    if len(B) != n or any(len(row) != n for row in B):
        raise InputError(f"change of basis must be {n}x{n}")
    if _det_fraction([[Fraction(x) for x in row] for row in B]) == 0:
        raise ErrDegenerateLattice("change of basis is singular")
    new_e, new_err = [], []
    for row, err in zip(entries, errors):
        new_e.append([mpmath.fsum(row[i] * B[i][k] for i in range(n)) for k in range(n)])
        new_err.append([mpmath.fsum(err[i] * abs(B[i][k]) for i in range(n)) for k in range(n)])
    return new_e, new_err


def period_matrix_with_retry(f, signature, precision_bits=DEFAULT_PRECISION, basis=None):
    """period_matrix, doubling the precision on ErrPrecision up to MAX_RETRIES times."""
    prec = precision_bits
    for attempt in range(MAX_RETRIES + 1):
        try:
            return period_matrix(f, signature, prec, basis)
        except ErrPrecision:
            if attempt == MAX_RETRIES:
                raise
            prec *= 2


def gaussian_period_matrix(g: int) -> PeriodMatrix:
    """Block period matrix of the product of g copies of C/Z[i]."""
    entries, errors = [], []
    for j in range(g):
        row = [mpmath.mpc(0)] * (2 * g)
        row[2 * j] = mpmath.mpc(1)
        row[2 * j + 1] = mpmath.mpc(0, 1)
        entries.append(row)
        errors.append([mpmath.mpf(0)] * (2 * g))
    return PeriodMatrix(g, DEFAULT_PRECISION, entries, errors, EmbeddingSignature.zeros(g), mpmath.mpf(1))


# ---------------------------------------------------------------------------
# complex structure


@dataclass
class ComplexStructure:
    J: mpmath.matrix
    residual: mpmath.mpf
    precision_bits: int
    error: mpmath.mpf
    exact: list | None = None  # Fraction matrix when J is exactly rational

    @property
    def size(self) -> int:
        return self.J.rows

    def entry(self, i, j):
        return self.J[i, j]

    def to_json(self) -> dict:
        digits = _digits(self.precision_bits)
        return {
            "precisionBits": str(self.precision_bits),
            "residual": mpmath.nstr(self.residual, 6),
            "J": [[_dec(self.J[i, j], digits) for j in range(self.size)] for i in range(self.size)],
            "exact": None if self.exact is None else [[str(x) for x in row] for row in self.exact],
        }


def _j_std(g: int):
    n = 2 * g
    M = mpmath.zeros(n, n)
    for j in range(g):
        M[j, g + j] = -1
        M[g + j, j] = 1
    return M


def _max_abs(M) -> mpmath.mpf:
    return max(abs(M[i, j]) for i in range(M.rows) for j in range(M.cols))


def complex_structure(pm: PeriodMatrix) -> ComplexStructure:
    """J = P^-1 J_std P with P the stacked real period matrix."""
    g = pm.g
    n = 2 * g
    exact = None
    gauss = pm.exact_gaussian()
    if gauss is not None:
        exact = _exact_structure(gauss)
    work = _work(pm.precision_bits)
    with mpmath.workprec(work):
        P = pm.stacked()
        try:
            Pinv = mpmath.inverse(P)
        except ZeroDivisionError as exc:
            raise ErrDegenerateLattice("stacked period matrix is singular") from exc
        if exact is not None:
            J = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in exact])
        else:
            J = Pinv * _j_std(g) * P
        res = _max_abs(J * J + mpmath.eye(n))
        cond = mpmath.mnorm(P, "inf") * mpmath.mnorm(Pinv, "inf")
        worst_entry_err = max(max(row) for row in pm.errors)
        err = res + cond * (worst_entry_err + mpmath.ldexp(1, -work)) * _max_abs(J) * n
    if exact is not None:
        err = mpmath.mpf(0)
    return ComplexStructure(J, res, pm.precision_bits, err, exact)


def _exact_structure(gauss) -> list:
    g = len(gauss)
    n = 2 * g
    P = [[Fraction(z[0]) for z in row] for row in gauss] + [[Fraction(z[1]) for z in row] for row in gauss]
    Pinv = _inverse_fraction(P)
    Jstd = [[Fraction(0)] * n for _ in range(n)]
    for j in range(g):
        Jstd[j][g + j] = Fraction(-1)
        Jstd[g + j][j] = Fraction(1)
    return _matmul(_matmul(Pinv, Jstd), P)


def rational_structure(J) -> ComplexStructure:
    """Wrap an exactly rational J (e.g. block rotations) as a ComplexStructure."""
    exact = [[Fraction(x) for x in row] for row in J]
    n = len(exact)
    with mpmath.workprec(_work(DEFAULT_PRECISION)):
        Jm = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in exact])
    sq = _matmul(exact, exact)
    res = max(abs(sq[i][j] + (1 if i == j else 0)) for i in range(n) for j in range(n))
    return ComplexStructure(Jm, mpmath.mpf(res.numerator) / res.denominator, DEFAULT_PRECISION, mpmath.mpf(0), exact)


# ---------------------------------------------------------------------------
# exact helpers


def _matmul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(len(B[0]))] for i in range(len(A))]


def _inverse_fraction(A):
    n = len(A)
    M = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ErrDegenerateLattice("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                t = M[r][col]
                M[r] = [a - t * b for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]


def _det_fraction(A) -> Fraction:
    A = [list(row) for row in A]
    n = len(A)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        det *= A[col][col]
        for r in range(col + 1, n):
            t = A[r][col] / A[col][col]
            if t:
                A[r] = [a - t * b for a, b in zip(A[r], A[col])]
    return det


def companion_matrix(f: RationalPoly) -> list[list[Fraction]]:
    """Matrix of multiplication by x on Q[x]/f in the power basis."""
    if not f.is_monic():
        raise ErrNotMonic(f"{f} is not monic; pass f.monic()")
    n = f.degree
    a = f.fractions()
    C = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n):
        C[i][i - 1] = Fraction(1)
    for i in range(n):
        C[i][n - 1] = -a[i]
    return C
