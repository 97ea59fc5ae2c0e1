"""End-to-end pipelines and the TorusReport JSON format.

Canonical JSON: sorted keys, integers and rationals as decimal strings, no
floats anywhere.  Timings live in a separate section that is not part of the
canonical payload, so equal inputs give byte-identical canonical output.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import galois, generators, lattice, torus
from .errors import ErrInternalConsistency, ErrNoTransitivity, ErrSchema
from .exact import RationalPoly, discriminant, prime_factors, primes_up_to, sturm_count
from .newton import eisenstein_dumas

SCHEMA_VERSION = "1"

EXP, SELMER, MORI, CUSTOM = "EXP", "SELMER", "MORI", "CUSTOM"
FAMILY_KINDS = (EXP, SELMER, MORI, CUSTOM)

PROVED = galois.PROVED
DEFAULT_GALOIS_BUDGET = 500
RAMIFICATION_PRIMES = 100

_CITED_FOR = {EXP: "schur-exp", SELMER: "selmer-nart-vila-osada"}


@dataclass
class TorusReport:
    family_kind: str
    parameters: dict
    polynomial: RationalPoly
    discriminant: Fraction
    certificates: dict = field(default_factory=dict)
    torus: dict | None = None
    invariants: dict | None = None
    schema_version: str = SCHEMA_VERSION
    timings: dict = field(default_factory=dict, compare=False)
    status: str = "OK"

    def canonical(self) -> dict:
        return {
            "schemaVersion": self.schema_version,
            "familyKind": self.family_kind,
            "parameters": self.parameters,
            "polynomial": self.polynomial.to_json(),
            "polynomialText": str(self.polynomial),
            "discriminant": str(self.discriminant),
            "certificates": self.certificates,
            "torus": self.torus,
            "invariants": self.invariants,
            "status": self.status,
        }

    def to_json(self) -> dict:
        out = self.canonical()
        out["timings"] = self.timings
        return out


def _check_float_free(obj, path="$"):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if not isinstance(k, str):
                raise ErrInternalConsistency(f"non-string key at {path}")
            _check_float_free(v, f"{path}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _check_float_free(v, f"{path}[{i}]")
    elif obj is not None and not isinstance(obj, (str, bool)):
        raise ErrInternalConsistency(f"non-string value {obj!r} at {path}")


def canonical_bytes(report: TorusReport) -> bytes:
    payload = report.canonical()
    _check_float_free(payload)
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode()


def serialize(report: TorusReport, with_timings: bool = True, indent: int | None = 2) -> bytes:
    payload = report.to_json() if with_timings else report.canonical()
    _check_float_free(report.canonical())
    return json.dumps(payload, sort_keys=True, indent=indent, ensure_ascii=True).encode()


def parse(data: bytes | str) -> TorusReport:
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ErrSchema(f"not JSON: {exc}") from exc
    if not isinstance(obj, dict) or "schemaVersion" not in obj:
        raise ErrSchema("missing schemaVersion")
    v = obj["schemaVersion"]
    if v != SCHEMA_VERSION:
        raise ErrSchema(f"schema version {v!r} not supported; this reader expects version {SCHEMA_VERSION!r}")
    try:
        kind = obj["familyKind"]
        if kind not in FAMILY_KINDS:
            raise ErrSchema(f"unknown familyKind {kind!r}")
        return TorusReport(
            family_kind=kind,
            parameters=obj["parameters"],
            polynomial=RationalPoly.from_json(obj["polynomial"]),
            discriminant=Fraction(obj["discriminant"]),
            certificates=obj["certificates"],
            torus=obj["torus"],
            invariants=obj["invariants"],
            schema_version=v,
            timings=obj.get("timings", {}),
            status=obj.get("status", "OK"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ErrSchema(f"malformed report: {exc}") from exc


# ---------------------------------------------------------------------------
# pipelines


class _Clock:
    def __init__(self):
        self.timings = {}

    def __call__(self, name):
        clock = self

        class _T:
            def __enter__(self):
                self.t = time.perf_counter()

            def __exit__(self, *exc):
                clock.timings[name] = f"{time.perf_counter() - self.t:.4f}"

        return _T()


def _real_roots_cert(f: RationalPoly, quad=None) -> dict:
    if quad is not None and quad.b > 0:
        rr = generators.real_root_exclusion(quad.g, quad.l, quad.p, quad.b, quad.c)
        out = rr.to_json()
    else:
        n = sturm_count(f)
        out = {"sturmCount": str(n), "verdict": generators.NO_REAL_ROOTS if n == 0 else generators.HAS_REAL_ROOTS}
    out["certLevel"] = PROVED
    return out


def _galois_certs(f: RationalPoly, disc: Fraction, kind: str, prime_budget: int) -> dict:
    out = {}
    witness = galois.irreducibility_witness(f, max(prime_budget, 1000))
    out["irreducibility"] = {
        "witness": witness.to_json() if witness else None,
        "certLevel": PROVED if witness else galois.UNDETERMINED,
    }
    cited = _CITED_FOR.get(kind)
    if kind == SELMER and f.degree % 3 == 2:
        cited = None  # x^2 + x + 1 divides x^n + x + 1 here
    try:
        ev = galois.collect_evidence(f, prime_budget, witness=witness)
    except ErrNoTransitivity:
        if cited is None:
            raise
        out["irreducibility"] = {"witness": galois.Witness(galois.CITED, cited).to_json(), "certLevel": galois.CITED}
        out["galois"] = galois.cited_certificate(f.degree, disc, cited).to_json()
        return out
    cert = galois.certify(ev, disc)
    out["galois"] = cert.to_json()
    out["galoisEvidence"] = dict(ev.to_json(), certLevel=PROVED)
    if cert.group == galois.UNDETERMINED and cited is not None:
        out["galoisCited"] = galois.cited_certificate(f.degree, disc, cited).to_json()
    return out


def _polygon_certs(f: RationalPoly, quad=None) -> list:
    ls = sorted(set(prime_factors(f.den)))
    if quad is not None and quad.l not in ls:
        ls.append(quad.l)
    out = []
    if f.coeffs[0] == 0:
        return out
    for l in ls:
        c = eisenstein_dumas(f, l).to_json()
        c["certLevel"] = PROVED
        out.append(c)
    return out


def _ramification(f: RationalPoly, disc: Fraction, quad=None) -> list:
    if quad is None or disc == 0:
        return []
    out = []
    for ell in primes_up_to(RAMIFICATION_PRIMES):
        if ell == quad.l:
            continue
        w = generators.ramification_witness(f, ell, quad.l, disc)
        if w.disc_valuation:
            d = w.to_json()
            d["certLevel"] = PROVED
            out.append(d)
    return out


def certificates_for(f: RationalPoly, kind: str, disc: Fraction, quad=None, prime_budget: int = DEFAULT_GALOIS_BUDGET) -> dict:
    certs = {"realRoots": _real_roots_cert(f, quad), "polygon": _polygon_certs(f, quad)}
    certs.update(_galois_certs(f, disc, kind, prime_budget))
    certs["ramification"] = _ramification(f, disc, quad)
    if quad is not None:
        certs["admissibility"] = dict(quad.to_json(), certLevel=PROVED)
    return certs


def certificate_failure(certs: dict) -> str | None:
    """Name of the first failed certificate, or None."""
    if certs.get("realRoots", {}).get("verdict") == generators.HAS_REAL_ROOTS:
        return "realRoots"
    adm = certs.get("admissibility")
    if adm is not None and not adm["valid"]:
        return "admissibility"
    if certs.get("irreducibility", {}).get("witness") is None:
        return "irreducibility"
    return None


def torus_section(f: RationalPoly, signature: str | None, precision: int, basis=None):
    g = f.degree // 2
    sig = torus.EmbeddingSignature.parse(signature) if signature else torus.EmbeddingSignature.zeros(g)
    pm = torus.period_matrix_with_retry(f, sig, precision, basis)
    J = torus.complex_structure(pm)
    sec = {
        "signature": str(sig),
        "precisionBits": str(pm.precision_bits),
        "periodMatrix": pm.to_json(),
        "J": J.to_json(),
        "JResidual": mpmath.nstr(J.residual, 6),
    }
    return sec, J


def invariants_section(f: RationalPoly, J, H: int, tol, basis=None) -> dict:
    C = torus.companion_matrix(f.monic())
    if basis is not None:
        B = [[Fraction(x) for x in row] for row in basis]
        C = torus._matmul(torus._matmul(torus._inverse_fraction(B), C), B)
    return lattice.compute_invariants(J, C, H, tol).to_json()


def run_pipeline(
    f: RationalPoly,
    kind: str,
    parameters: dict,
    quad=None,
    certify: bool = True,
    build_torus: bool = False,
    invariants: bool = False,
    signature: str | None = None,
    basis=None,
    precision: int = torus.DEFAULT_PRECISION,
    H: int = lattice.DEFAULT_HEIGHT,
    tol=lattice.DEFAULT_TOL,
    prime_budget: int = DEFAULT_GALOIS_BUDGET,
) -> TorusReport:
    clock = _Clock()
    with clock("discriminant"):
        disc = discriminant(f)
    rep = TorusReport(kind, parameters, f, disc)
    if certify or build_torus or invariants:
        with clock("certificates"):
            rep.certificates = certificates_for(f, kind, disc, quad, prime_budget)
        failed = certificate_failure(rep.certificates)
        if failed:
            rep.status = f"CERTIFICATE_FAILED:{failed}"
            rep.timings = clock.timings
            return rep
    if build_torus or invariants:
        with clock("torus"):
            rep.torus, J = torus_section(f, signature, precision, basis)
            if basis is not None:
                rep.torus["basis"] = [[str(int(x)) for x in row] for row in basis]
        if invariants:
            with clock("invariants"):
                rep.invariants = invariants_section(f, J, H, tol, basis)
                rep.invariants["heightBound"] = str(H)
                rep.invariants["tol"] = mpmath.nstr(mpmath.mpf(tol), 6)
                rep.invariants["precisionBits"] = rep.torus["precisionBits"]
    rep.timings = clock.timings
    return rep


def exp_report(g: int, **kw) -> TorusReport:
    return run_pipeline(generators.truncated_exponent(2 * g), EXP, {"g": str(g), "n": str(2 * g)}, **kw)


def selmer_report(g: int, **kw) -> TorusReport:
    return run_pipeline(generators.selmer(2 * g).poly, SELMER, {"g": str(g), "n": str(2 * g)}, **kw)


def mori_report(g: int, l: int, p: int, b: int, c: int, **kw) -> TorusReport:
    quad = generators.is_admissible(g, l, p, b, c)
    f = generators.mori_poly(quad, force=True)
    params = {"g": str(g), "l": str(l), "p": str(p), "b": str(b), "c": str(c)}
    return run_pipeline(f, MORI, params, quad=quad, **kw)


def custom_report(f: RationalPoly, **kw) -> TorusReport:
    return run_pipeline(f, CUSTOM, {"degree": str(f.degree)}, **kw)


def family_json(fam: generators.FamilyReport) -> dict:
    out = fam.to_json()
    out["schemaVersion"] = SCHEMA_VERSION
    return out


def render_text(rep: TorusReport) -> str:
    lines = [
        f"family      {rep.family_kind} {' '.join(f'{k}={v}' for k, v in sorted(rep.parameters.items()))}",
        f"polynomial  {rep.polynomial}",
        f"disc        {rep.discriminant}",
        f"status      {rep.status}",
    ]
    c = rep.certificates
    if c:
        lines.append(f"real roots  {c['realRoots']['verdict']} (sturm {c['realRoots']['sturmCount']})")
        w = c.get("irreducibility", {}).get("witness")
        lines.append(f"irreducible {w['kind'] + ' ' + w['value'] if w else 'no witness'}")
        if "galois" in c:
            gc = c["galois"]
            lines.append(
                f"galois      2-trans={gc['twoTransitive']} primitive={gc['primitive']} "
                f"alt={gc['containsAlternating']} group={gc['groupDetermination']} [{gc['certLevel']}]"
            )
        if "galoisCited" in c:
            lines.append(f"cited       group={c['galoisCited']['groupDetermination']} [CITED]")
        for r in c.get("ramification", []):
            lines.append(f"ramif       ell={r['ell']} v={r['discValuation']} {r['conclusion']}")
    if rep.torus:
        lines.append(f"torus       signature={rep.torus['signature']} bits={rep.torus['precisionBits']} |J^2+I|={rep.torus['JResidual']}")
    if rep.invariants:
        inv = rep.invariants
        lines.append(
            f"invariants  ns={inv['nsRank']['rank']} end={inv['endRank']['rank']} "
            f"companion residual={inv['companionResidual']} (H={inv['heightBound']}, tol={inv['tol']})"
        )
    return "\n".join(lines) + "\n"
