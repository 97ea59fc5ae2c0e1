"""l-adic Newton polygons and the Eisenstein-Dumas irreducibility test."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ErrDegenerate, ErrNotPrime, ErrZeroConstantTerm
from .exact import RationalPoly, is_prime, valuation

IRREDUCIBLE = "IRREDUCIBLE_OVER_Q_l"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class PolygonCert:
    l: int
    vertices: tuple[tuple[int, int], ...]
    verdict: str
    reason: str
    implies: tuple[str, ...] = field(default=())

    @property
    def irreducible(self) -> bool:
        return self.verdict == IRREDUCIBLE

    def to_json(self) -> dict:
        return {
            "l": str(self.l),
            "vertices": [[str(i), str(v)] for i, v in self.vertices],
            "verdict": self.verdict,
            "reason": self.reason,
            "implies": list(self.implies),
        }

    @classmethod
    def from_json(cls, obj) -> PolygonCert:
        return cls(
            int(obj["l"]),
            tuple((int(i), int(v)) for i, v in obj["vertices"]),
            obj["verdict"],
            obj["reason"],
            tuple(obj.get("implies", ())),
        )


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(f: RationalPoly, l: int) -> list[tuple[int, int]]:
    """Vertices of the lower convex hull of {(i, v_l(a_i))}."""
    if f.is_zero():
        raise ErrDegenerate("zero polynomial")
    if not is_prime(l):
        raise ErrNotPrime(f"{l} is not prime")
    if f.coeffs[0] == 0:
        raise ErrZeroConstantTerm("x divides f; strip the factor first")
    pts = [(i, valuation(c, l)) for i, c in enumerate(f.fractions()) if c != 0]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        # pop while the last turn is not strictly counter-clockwise; drops collinear points
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return hull


def eisenstein_dumas(f: RationalPoly, l: int) -> PolygonCert:
    verts = newton_polygon(f, l)
    n = f.degree
    if len(verts) == 2:
        (i0, v0), (i1, v1) = verts
        span = abs(v1 - v0)
        if math.gcd(i1 - i0, span) == 1:
            return PolygonCert(
                l,
                tuple(verts),
                IRREDUCIBLE,
                f"single segment ({i0},{v0})-({i1},{v1}) with gcd({i1 - i0},{span}) = 1: "
                "no interior lattice points",
                ("irreducible over Q_%d" % l, "irreducible over Q"),
            )
        reason = f"single segment with gcd({i1 - i0},{span}) = {math.gcd(i1 - i0, span)}"
        if span == 0:
            reason = "polygon is flat"
    else:
        reason = f"polygon has {len(verts) - 1} segments"
    assert verts[-1][0] == n
    return PolygonCert(l, tuple(verts), INCONCLUSIVE, reason)
