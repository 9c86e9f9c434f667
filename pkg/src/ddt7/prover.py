"""Exact symbolic verification of the algebraic identity catalog.

Each catalog entry expands both sides of one identity over a polynomial ring
in the relevant form coefficients (using the generic exterior-algebra
operations) and decides equality with zero exactly.  No Groebner machinery:
every identity here is an unconditional polynomial identity, so plain
expansion and cancellation suffices.

The catalog ids are stable keys used by the CLI and the acceptance suite:

========  ====================================================================
A1        endomorphism transport of the dual residual: the pullback of
          *R(F) by I - (F#)^2 equals eta(F)
A2a       the 1-form *(F^3) annihilates *F under wedge
A2b       contraction formula *(phi ^ *F^2) = -6 i(u)F on a decomposed F
A4        pairing of the corrected residual with F ^ phi reproduces half the
          calibration weight times phi ^ *F^2
A5        cube of a vector-type 2-form: (i(u)phi)^3 = 6|u|^2 *u_flat
A3F       theta-cleared elimination identity reducing the coupled evolution
          system to the single combined equation
DET       determinant factorization det(I - (F#)^2) = det(I + F#)^2
EIG7      *(phi ^ .) doubles vector-type 2-forms
EIG14     *(phi ^ .) negates annihilator-type 2-forms
W3        F ^ *phi = 3 *u_flat for a decomposed F
SF        Hodge star of a 2-form by type: *F7 = (1/2) F7 ^ phi,
          *F14 = -F14 ^ phi
CYL       product-space star expansion of the curvature cube on R x R^7
========  ====================================================================

Mutation testing: ``mutate(id, site, value)`` registers a variant with one
named rational constant replaced.  Verifying the variant must fail with a
witness monomial; this guards against a prover that silently accepts
everything.  A2a has no mutable sites (both of its sides expand to the zero
polynomial, so no constant in its tree can break it) and rejects mutation.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError
from .scalars import FLOAT, RATIONAL, MultiPoly, PolyRing, frac, intval, rational
from . import g2
from .exalg import (Endo, KForm, Vector, blades, contract, det_endo, hodge,
                    inner, pullback, sharp2, wedge)

__all__ = ["IdentityReport", "verify", "verify_all", "mutate",
           "catalog_ids", "canonical_mutations", "identity_sites",
           "evaluate_at_point", "evaluate_float", "float_suite"]

_F_NAMES = tuple(f"F_{i}{j}" for i, j in blades(7, 2))
_U_NAMES = tuple(f"u_{i}" for i in range(1, 8))
_A_NAMES = tuple(f"a_{i}" for i in range(1, 8))
_C_NAMES = tuple(f"c_{m:02d}" for m in range(1, 15))


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one identity verification."""

    identity: str
    reduced_to_zero: bool
    witness: dict | None
    monomial_count_before_cancellation: int
    elapsed_s: float
    components: int = 1

    def to_dict(self, deterministic: bool = False) -> dict:
        out = {
            "identity": self.identity,
            "reduced_to_zero": self.reduced_to_zero,
            "witness": self.witness,
            "monomial_count_before_cancellation": self.monomial_count_before_cancellation,
            "components": self.components,
        }
        if not deterministic:
            out["elapsed_s"] = self.elapsed_s
        return out


@dataclass(frozen=True)
class _IdentitySpec:
    id: str
    variables: tuple
    consts: dict          # site name -> default Fraction
    build: object         # callable(ring, val, consts) -> [(label, lhs, rhs)]
    mutated_from: str | None = None


def _form(ring, val, names, n=7, k=2) -> KForm:
    return KForm(n, k, tuple(val(nm) for nm in names), ring)


def _vector(ring, val, names) -> Vector:
    return Vector(7, tuple(val(nm) for nm in names), ring)


def _rat_form_in(ring, form: KForm) -> KForm:
    """Re-coefficient an exact-rational form into the given ring."""
    return KForm(form.n, form.k, tuple(ring.coerce(c) for c in form.coeffs), ring)


def _decomposed_F(ring, val):
    """F = i(u)phi + sum c_m B_m with indeterminate u and c."""
    u = _vector(ring, val, _U_NAMES)
    F7 = contract(u, g2.phi_for(ring))
    F = F7
    for cm, B in zip(_C_NAMES, g2.standard().basis14):
        F = F + _rat_form_in(ring, B) * val(cm)
    return u, F7, F


def _c(ring, consts, site):
    q = consts[site]
    return frac(ring, q.numerator, q.denominator)


# --- builders --------------------------------------------------------------


def _build_a1(ring, val, consts):
    F = _form(ring, val, _F_NAMES)
    xi = wedge(F, wedge(F, F)) * _c(ring, consts, "cube-scale") \
        - wedge(F, g2.star_phi_for(ring))
    Fs = sharp2(F)
    lhs = pullback(Endo.identity(7, ring) - (Fs @ Fs), hodge(xi))
    corr = wedge(hodge(wedge(g2.phi_for(ring), hodge(wedge(F, F)))), hodge(F))
    rhs = hodge(xi + corr * _c(ring, consts, "corr-scale"))
    return [("transport", lhs, rhs)]


def _build_a2a(ring, val, consts):
    F = _form(ring, val, _F_NAMES)
    lhs = wedge(hodge(wedge(F, wedge(F, F))), hodge(F))
    return [("annihilation", lhs, KForm.zero(7, 6, ring))]


def _build_a2b(ring, val, consts):
    u, F7, F = _decomposed_F(ring, val)
    lhs = hodge(wedge(g2.phi_for(ring), hodge(wedge(F, F))))
    rhs = contract(u, F) * _c(ring, consts, "rhs-scale")
    return [("contraction", lhs, rhs)]


def _theta_poly(ring, F, inner_scale):
    return intval(ring, 1) - hodge(wedge(g2.phi_for(ring), wedge(F, F))).coeffs[0] * inner_scale


def _build_a4(ring, val, consts):
    F = _form(ring, val, _F_NAMES)
    R = wedge(F, wedge(F, F)) * frac(ring, 1, 6) - wedge(F, g2.star_phi_for(ring))
    corr = wedge(hodge(wedge(g2.phi_for(ring), hodge(wedge(F, F)))), hodge(F))
    G = R + corr * _c(ring, consts, "corr-scale")
    lhs = wedge(hodge(G), wedge(F, g2.phi_for(ring)))
    theta = _theta_poly(ring, F, _c(ring, consts, "theta-inner"))
    rhs = wedge(g2.phi_for(ring), hodge(wedge(F, F))) * (theta * _c(ring, consts, "rhs-scale"))
    return [("pairing", lhs, rhs)]


def _build_a5(ring, val, consts):
    u = _vector(ring, val, _U_NAMES)
    F7 = contract(u, g2.phi_for(ring))
    lhs = wedge(F7, wedge(F7, F7))
    u2 = sum((x * x for x in u.comps), start=ring.zero)
    rhs = hodge(KForm(7, 1, u.comps, ring)) * (u2 * _c(ring, consts, "rhs-scale"))
    return [("cube", lhs, rhs)]


def _build_a3f(ring, val, consts):
    F = _form(ring, val, _F_NAMES)
    R = wedge(F, wedge(F, F)) * frac(ring, 1, 6) - wedge(F, g2.star_phi_for(ring))
    corr = wedge(hodge(wedge(g2.phi_for(ring), hodge(wedge(F, F)))), hodge(F))
    G = R + corr * _c(ring, consts, "corr-scale")
    theta = _theta_poly(ring, F, frac(ring, 1, 2))
    back = wedge(hodge(wedge(hodge(G), wedge(F, g2.phi_for(ring)))), hodge(F))
    lhs = R * theta + back
    rhs = G * theta
    return [("elimination", lhs, rhs)]


def _det_poly(A: Endo):
    """Determinant via row-by-row DP over used-column masks (exact, any ring).

    Placing row i into free column j flips the permutation parity once per
    already-used column above j, hence the descending scan.
    """
    ring = A.ring
    n = A.n
    states = {0: intval(ring, 1)}
    for i in range(n):
        nxt: dict = {}
        row = A.mat[i]
        for mask, acc in states.items():
            sign_toggle = 0
            for j in range(n - 1, -1, -1):
                bit = 1 << j
                if mask & bit:
                    sign_toggle ^= 1
                    continue
                entry = row[j]
                if ring.is_zero(entry):
                    continue
                term = acc * entry
                if sign_toggle:
                    term = -term
                key = mask | bit
                if key in nxt:
                    nxt[key] = nxt[key] + term
                else:
                    nxt[key] = term
        states = nxt
    return states[(1 << n) - 1]


# DET expands to ~4*10^5 monomials per side, far too many for the generic
# sparse-dict polynomials to stay inside the runtime budget.  Both sides
# have integer coefficients and per-variable degree at most 4, so monomials
# pack losslessly into uint64 (21 variables * 3 bits, variable 0 in the top
# field so unsigned key order equals lexicographic exponent order) and the
# same column-mask DP runs on numpy arrays instead.

_DET_SHIFTS = tuple(3 * (20 - v) for v in range(21))


def _det_np_combine(keys, coeffs):
    uk, inv = np.unique(keys, return_inverse=True)
    tot = np.bincount(inv, weights=coeffs.astype(np.float64), minlength=len(uk))
    if np.max(np.abs(tot), initial=0.0) >= 2.0 ** 52:
        raise AssertionError("determinant coefficient overflow")
    out = tot.astype(np.int64)
    nz = out != 0
    return uk[nz], out[nz]


def _det_np_dp(entries):
    """entries[i][j]: packed {uint64 key: int coeff} dict, or None if zero."""
    n = len(entries)
    one = (np.zeros(1, dtype=np.uint64), np.ones(1, dtype=np.int64))
    states = {0: one}
    for i in range(n):
        buckets: dict = {}
        for mask, (ak, ac) in states.items():
            sign_toggle = 0
            for j in range(n - 1, -1, -1):
                bit = 1 << j
                if mask & bit:
                    sign_toggle ^= 1
                    continue
                e = entries[i][j]
                if not e:
                    continue
                ek = np.fromiter(e.keys(), dtype=np.uint64, count=len(e))
                ec = np.fromiter(e.values(), dtype=np.int64, count=len(e))
                tk = (ak[:, None] + ek[None, :]).ravel()
                tc = (ac[:, None] * ec[None, :]).ravel()
                if sign_toggle:
                    tc = -tc
                buckets.setdefault(mask | bit, []).append((tk, tc))
        states = {}
        for mask, parts in buckets.items():
            keys = np.concatenate([p[0] for p in parts])
            coeffs = np.concatenate([p[1] for p in parts])
            states[mask] = _det_np_combine(keys, coeffs)
    return states[(1 << n) - 1]


def _det_np_square(poly):
    k, c = poly
    tk = (k[:, None] + k[None, :]).ravel()
    tc = (c[:, None] * c[None, :]).ravel()
    return _det_np_combine(tk, tc)


def _det_unpack(poly, ring) -> MultiPoly:
    keys, coeffs = poly
    cols = [((keys >> np.uint64(s)) & np.uint64(7)).astype(np.int64).tolist()
            for s in _DET_SHIFTS]
    terms = {}
    for idx, c in enumerate(coeffs.tolist()):
        terms[tuple(col[idx] for col in cols)] = rational(c)
    return MultiPoly(ring, terms)


def _build_det(ring, val, consts):
    if not isinstance(ring, PolyRing):
        F = _form(ring, val, _F_NAMES)
        Fs = sharp2(F)
        eye = Endo.identity(7, ring)
        lhs = _det_poly(eye - (Fs @ Fs))
        d = _det_poly(eye + Fs)
        rhs = d * d * _c(ring, consts, "rhs-scale")
        return [("factorization", lhs, rhs)]
    # packed fast path; sharp2 convention inlined: blade (i,j) coefficient c
    # lands at [j-1][i-1] with +c and [i-1][j-1] with -c
    sharp = [[None] * 7 for _ in range(7)]
    for v, (i, j) in enumerate(blades(7, 2)):
        key = np.uint64(1 << _DET_SHIFTS[v])
        sharp[j - 1][i - 1] = {key: 1}
        sharp[i - 1][j - 1] = {key: -1}
    lin = [[dict(sharp[i][j]) if sharp[i][j] else {} for j in range(7)] for i in range(7)]
    quad = [[{} for _ in range(7)] for _ in range(7)]
    for i in range(7):
        lin[i][i][np.uint64(0)] = 1
        for j in range(7):
            acc = quad[i][j]
            if i == j:
                acc[np.uint64(0)] = 1
            for m in range(7):
                a = sharp[i][m]
                b = sharp[m][j]
                if a is None or b is None:
                    continue
                (ka, ca), = a.items()
                (kb, cb), = b.items()
                k = ka + kb
                nv = acc.get(k, 0) - ca * cb
                if nv:
                    acc[k] = nv
                else:
                    acc.pop(k, None)
    lhs = _det_unpack(_det_np_dp(quad), ring)
    d2 = _det_np_square(_det_np_dp(lin))
    rhs = _det_unpack(d2, ring) * _c(ring, consts, "rhs-scale")
    return [("factorization", lhs, rhs)]


def _build_eig7(ring, val, consts):
    u = _vector(ring, val, _U_NAMES)
    F7 = contract(u, g2.phi_for(ring))
    lhs = hodge(wedge(g2.phi_for(ring), F7))
    return [("vector-type", lhs, F7 * _c(ring, consts, "eig-scale"))]


def _build_eig14(ring, val, consts):
    B = KForm.zero(7, 2, ring)
    for cm, Bm in zip(_C_NAMES, g2.standard().basis14):
        B = B + _rat_form_in(ring, Bm) * val(cm)
    lhs = hodge(wedge(g2.phi_for(ring), B))
    return [("annihilator-type", lhs, B * _c(ring, consts, "eig-scale"))]


def _build_w3(ring, val, consts):
    u, F7, F = _decomposed_F(ring, val)
    lhs = wedge(F, g2.star_phi_for(ring))
    rhs = hodge(KForm(7, 1, u.comps, ring)) * _c(ring, consts, "rhs-scale")
    return [("coassociative", lhs, rhs)]


def _build_sf(ring, val, consts):
    u, F7, F = _decomposed_F(ring, val)
    F14 = F - F7
    phi = g2.phi_for(ring)
    return [
        ("star-f7", hodge(F7), wedge(F7, phi) * _c(ring, consts, "f7-scale")),
        ("star-f14", hodge(F14), wedge(F14, phi) * _c(ring, consts, "f14-scale")),
    ]


def _build_cyl(ring, val, consts):
    adot = KForm(7, 1, tuple(val(nm) for nm in _A_NAMES), ring)
    E = _form(ring, val, _F_NAMES)
    E2 = wedge(E, E)
    E8 = g2.embed_cylinder(E)
    a8 = g2.embed_cylinder(adot)
    six8 = wedge(E8, wedge(E8, E8)) + g2.dt_wedge(wedge(a8, wedge(E8, E8))) * intval(ring, 3)
    lhs = hodge(six8) * frac(ring, 1, 6)
    rhs = g2.embed_cylinder(hodge(wedge(adot, E2))) * _c(ring, consts, "cross-scale") \
        + g2.dt_wedge(g2.embed_cylinder(hodge(wedge(E, E2)))) * _c(ring, consts, "time-scale")
    return [("cylinder-star", lhs, rhs)]


_CATALOG: dict = {}


def _register(id_, variables, consts, build):
    _CATALOG[id_] = _IdentitySpec(id=id_, variables=tuple(variables),
                                  consts=dict(consts), build=build)


_register("A1", _F_NAMES, {"cube-scale": Fraction(1, 6), "corr-scale": Fraction(1, 2)},
          _build_a1)
_register("A2a", _F_NAMES, {}, _build_a2a)
_register("A2b", _U_NAMES + _C_NAMES, {"rhs-scale": Fraction(-6)}, _build_a2b)
_register("A4", _F_NAMES, {"corr-scale": Fraction(1, 2), "rhs-scale": Fraction(1, 2),
                           "theta-inner": Fraction(1, 2)}, _build_a4)
_register("A5", _U_NAMES, {"rhs-scale": Fraction(6)}, _build_a5)
_register("A3F", _F_NAMES, {"corr-scale": Fraction(1, 2)}, _build_a3f)
_register("DET", _F_NAMES, {"rhs-scale": Fraction(1)}, _build_det)
_register("EIG7", _U_NAMES, {"eig-scale": Fraction(2)}, _build_eig7)
_register("EIG14", _C_NAMES, {"eig-scale": Fraction(-1)}, _build_eig14)
_register("W3", _U_NAMES + _C_NAMES, {"rhs-scale": Fraction(3)}, _build_w3)
_register("SF", _U_NAMES + _C_NAMES, {"f7-scale": Fraction(1, 2), "f14-scale": Fraction(-1)},
          _build_sf)
_register("CYL", _A_NAMES + _F_NAMES, {"cross-scale": Fraction(1, 2),
                                       "time-scale": Fraction(1, 6)}, _build_cyl)

CATALOG_ORDER = ("A1", "A2a", "A2b", "A4", "A5", "A3F", "DET", "EIG7", "EIG14",
                 "W3", "SF", "CYL")

# the canonical single-site mutations exercised by the acceptance suite;
# twelve in total, drawn from the eleven identities with mutable sites
# (A4 contributes two, A2a none)
CANONICAL_MUTATIONS = (
    ("A1", "corr-scale", Fraction(1)),
    ("A2b", "rhs-scale", Fraction(-5)),
    ("A4", "rhs-scale", Fraction(1)),
    ("A4", "corr-scale", Fraction(1)),
    ("A5", "rhs-scale", Fraction(5)),
    ("A3F", "corr-scale", Fraction(1)),
    ("DET", "rhs-scale", Fraction(2)),
    ("EIG7", "eig-scale", Fraction(3)),
    ("EIG14", "eig-scale", Fraction(1)),
    ("W3", "rhs-scale", Fraction(2)),
    ("SF", "f7-scale", Fraction(1)),
    ("CYL", "cross-scale", Fraction(1)),
)

_derived: dict = {}


def catalog_ids() -> tuple:
    return CATALOG_ORDER


def identity_sites(identity_id: str) -> tuple:
    return tuple(sorted(_lookup(identity_id).consts))


def canonical_mutations() -> tuple:
    return CANONICAL_MUTATIONS


def _lookup(identity_id: str) -> _IdentitySpec:
    spec = _CATALOG.get(identity_id) or _derived.get(identity_id)
    if spec is None:
        raise InputError(f"unknown identity {identity_id!r}; catalog: {', '.join(CATALOG_ORDER)}")
    return spec


def mutate(identity_id: str, site: str, new_coefficient) -> str:
    """Register a single-site mutated variant; returns its id.

    The variant is expected to FAIL verification (that failure is the test).
    """
    base = _CATALOG.get(identity_id)
    if base is None:
        raise InputError(f"unknown identity {identity_id!r}")
    if base.mutated_from is not None:
        raise InputError("cannot mutate a mutated identity")
    if not base.consts:
        raise InputError(f"identity {identity_id} has no mutable sites")
    if site not in base.consts:
        raise InputError(f"identity {identity_id} has no site {site!r}; "
                         f"sites: {', '.join(sorted(base.consts))}")
    if isinstance(new_coefficient, float):
        new_coefficient = Fraction(new_coefficient).limit_denominator(10 ** 9)
    value = Fraction(new_coefficient)
    if value == base.consts[site]:
        raise InputError(f"mutation must change the constant at {site} "
                         f"(it is already {base.consts[site]})")
    consts = dict(base.consts)
    consts[site] = value
    mid = f"{identity_id}[{site}={value}]"
    _derived[mid] = _IdentitySpec(id=mid, variables=base.variables, consts=consts,
                                  build=base.build, mutated_from=identity_id)
    return mid


def _count_monomials(x) -> int:
    if isinstance(x, KForm):
        return sum(c.nterms() if isinstance(c, MultiPoly) else (0 if c == 0 else 1)
                   for c in x.coeffs)
    if isinstance(x, MultiPoly):
        return x.nterms()
    return 0 if x == 0 else 1


def _first_witness(label: str, diff) -> dict | None:
    """Deterministic witness: first nonzero coefficient in blade order,
    lexicographically first monomial within it."""
    if isinstance(diff, KForm):
        for blade, c in zip(blades(diff.n, diff.k), diff.coeffs):
            if isinstance(c, MultiPoly):
                if not c.is_zero():
                    e, coef = c.leading()
                    return {"component": label,
                            "blade": "e^" + "".join(str(i) for i in blade),
                            "monomial": c.monomial_str(e), "coefficient": str(coef)}
            elif c != 0:
                return {"component": label,
                        "blade": "e^" + "".join(str(i) for i in blade),
                        "monomial": "1", "coefficient": str(c)}
        return None
    c = diff
    if isinstance(c, MultiPoly):
        if c.is_zero():
            return None
        e, coef = c.leading()
        return {"component": label, "blade": "scalar",
                "monomial": c.monomial_str(e), "coefficient": str(coef)}
    if c == 0:
        return None
    return {"component": label, "blade": "scalar", "monomial": "1", "coefficient": str(c)}


def verify(identity_id: str) -> IdentityReport:
    """Expand the identity over its polynomial ring and decide zero."""
    spec = _lookup(identity_id)
    ring = PolyRing(spec.variables)
    t0 = time.perf_counter()
    components = spec.build(ring, ring.var, spec.consts)
    count = 0
    witness = None
    for label, lhs, rhs in components:
        count += _count_monomials(lhs) + _count_monomials(rhs)
        if witness is None:
            witness = _first_witness(label, lhs - rhs)
    return IdentityReport(identity=identity_id, reduced_to_zero=witness is None,
                          witness=witness,
                          monomial_count_before_cancellation=count,
                          elapsed_s=time.perf_counter() - t0,
                          components=len(components))


def verify_all() -> list:
    """Run the full catalog in its canonical order."""
    return [verify(i) for i in CATALOG_ORDER]


def evaluate_at_point(identity_id: str, rng) -> bool:
    """Evaluate the identity at one random rational point (consistency probe);
    True iff every component difference evaluates to zero there."""
    spec = _lookup(identity_id)
    point = {name: rational(int(rng.integers(-99, 100)), int(rng.integers(1, 40)))
             for name in spec.variables}
    components = spec.build(RATIONAL, lambda nm: point[nm], spec.consts)
    for _, lhs, rhs in components:
        diff = lhs - rhs
        if isinstance(diff, KForm):
            if not diff.is_zero():
                return False
        elif diff != 0:
            return False
    return True


def evaluate_float(identity_id: str, rng, tol: float = 1e-10) -> dict:
    """Evaluate the identity at one random float point, coefficients uniform
    in [-1, 1].  The residual is relative to the larger participating side,
    floored at 1 so identities whose sides are themselves zero stay
    meaningful."""
    spec = _lookup(identity_id)
    point = {name: float(rng.uniform(-1.0, 1.0)) for name in spec.variables}
    components = spec.build(FLOAT, lambda nm: point[nm], spec.consts)
    worst = 0.0
    for _, lhs, rhs in components:
        if isinstance(lhs, KForm):
            num = max(abs(float(a) - float(b))
                      for a, b in zip(lhs.coeffs, rhs.coeffs))
            den = max(max(abs(float(c)) for c in lhs.coeffs),
                      max(abs(float(c)) for c in rhs.coeffs), 1.0)
        else:
            num = abs(float(lhs) - float(rhs))
            den = max(abs(float(lhs)), abs(float(rhs)), 1.0)
        worst = max(worst, num / den)
    return {"identity": identity_id, "max_rel_residual": worst,
            "pass": bool(worst <= tol)}


def _absmax(form: KForm) -> float:
    return max(abs(float(c)) for c in form.coeffs)


def _rel_gap(a: KForm, b: KForm) -> float:
    num = max(abs(float(x) - float(y)) for x, y in zip(a.coeffs, b.coeffs))
    return num / max(_absmax(a), _absmax(b), 1.0)


def float_suite(samples: int, seed: int = 0, tol: float = 1e-10) -> dict:
    """Random float sweep: every catalog identity, the 2-form decomposition
    identities (reconstruction, annihilator, orthogonality, the two
    eigenvalues, the theta and calibration splits), and positivity of
    det(I + F#).  Deterministic for fixed (samples, seed)."""
    from . import ddt

    if samples < 1:
        raise InputError("float suite needs at least 1 sample")
    rng = np.random.default_rng(seed)
    ids = catalog_ids()
    worst = {i: 0.0 for i in ids}
    deco_names = ("recompose", "f14_annihilates", "f7_f14_orthogonal",
                  "eig7", "eig14", "theta_split", "calibration_split")
    deco = {name: 0.0 for name in deco_names}
    phi = g2.phi_for(FLOAT)
    star_phi = g2.star_phi_for(FLOAT)
    ident = Endo.identity(7, FLOAT)
    det_min = None
    for _ in range(samples):
        for i in ids:
            r = evaluate_float(i, rng, tol)
            worst[i] = max(worst[i], r["max_rel_residual"])
        F = KForm.from_coeffs(7, 2, [float(x) for x in rng.uniform(-1.0, 1.0, 21)],
                              FLOAT)
        scale = max(_absmax(F), 1.0)
        dec = g2.decompose2(F)
        u2 = sum(float(c) * float(c) for c in dec.u.comps)
        f7sq = float(inner(dec.f7, dec.f7))
        f14sq = float(inner(dec.f14, dec.f14))
        deco["recompose"] = max(deco["recompose"], _rel_gap(dec.f7 + dec.f14, F))
        deco["f14_annihilates"] = max(deco["f14_annihilates"],
                                      _absmax(wedge(dec.f14, star_phi)) / scale)
        deco["f7_f14_orthogonal"] = max(deco["f7_f14_orthogonal"],
                                        abs(float(inner(dec.f7, dec.f14))) / scale)
        deco["eig7"] = max(deco["eig7"],
                           _rel_gap(g2.star_wedge_phi(dec.f7), 2.0 * dec.f7))
        deco["eig14"] = max(deco["eig14"],
                            _rel_gap(g2.star_wedge_phi(dec.f14), -1.0 * dec.f14))
        th = float(ddt.theta_weight(F))
        th_split = 1.0 - 3.0 * u2 + 0.5 * f14sq
        deco["theta_split"] = max(deco["theta_split"],
                                  abs(th - th_split) / max(abs(th), abs(th_split), 1.0))
        calib = float(hodge(wedge(phi, wedge(F, F))).coeffs[0])
        calib_split = 2.0 * f7sq - f14sq
        deco["calibration_split"] = max(
            deco["calibration_split"],
            abs(calib - calib_split) / max(abs(calib), abs(calib_split), 1.0))
        det = float(det_endo(ident + sharp2(F)))
        det_min = det if det_min is None else min(det_min, det)
    n_fail = sum(1 for v in worst.values() if v > tol) \
        + sum(1 for v in deco.values() if v > tol) \
        + (0 if det_min > 0.0 else 1)
    return {
        "samples": int(samples),
        "seed": int(seed),
        "tol": float(tol),
        "identity_max_rel": worst,
        "decomposition_max_rel": deco,
        "det_metric_min": det_min,
        "det_metric_positive": bool(det_min > 0.0),
        "failures": int(n_fail),
        "pass": bool(n_fail == 0),
    }
