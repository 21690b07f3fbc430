"""Factories for holomorphic curves, Dirac-harmonic spinor spaces and integer identities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets, spectral
from .errors import DegenerateMapError, RepresentationError, UnsupportedDecompositionError
from .fields import MapField, TwistedSpinorField, pointwise_inner, pullback_degrees
from .geometry import KahlerTarget, Surface
from .quadrature import global_rule
from .spinc import LineTwist

SQRT2 = np.sqrt(2.0)


# ---------------------------------------------------------------------------
# maps
# ---------------------------------------------------------------------------


def _poly_jet(coeffs, Z):
    """sum_k c_k Z^k by Horner (coefficients in increasing degree)."""
    acc = Z * 0.0 + complex(coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * Z + complex(c)
    return acc


def _trim(c):
    c = [complex(x) for x in c]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def rational_map(numerator, denominator=(1.0,), surface: Surface | None = None, name=None) -> MapField:
    """f(z) = P(z)/Q(z) from CP^1 to CP^1 (coefficients in increasing degree)."""
    P, Q = _trim(numerator), _trim(denominator)
    if all(c == 0 for c in Q):
        raise DegenerateMapError("denominator vanishes identically")
    rp = np.roots(P[::-1]) if len(P) > 1 else np.zeros(0)
    rq = np.roots(Q[::-1]) if len(Q) > 1 else np.zeros(0)
    for a in rp:
        if rq.size and np.min(np.abs(rq - a)) < 1e-9 * max(1.0, abs(a)):
            raise DegenerateMapError(f"numerator and denominator share the root {a:.6g}")
    D = max(len(P), len(Q)) - 1
    surface = surface or Surface.round_sphere()
    target = KahlerTarget.fubini_study(1)
    Pp = P + [0j] * (D + 1 - len(P))
    Qp = Q + [0j] * (D + 1 - len(Q))

    def expr(X, Y, Z):
        return jets.stack([_poly_jet(P, Z) / _poly_jet(Q, Z)])

    def south(X, Y, U):
        # f(1/u) = u^D P(1/u) / (u^D Q(1/u)) with reversed coefficient lists
        return jets.stack([_poly_jet(Pp[::-1], U) / _poly_jet(Qp[::-1], U)])

    def chart_of(z):
        pv = np.polyval(P[::-1], z)
        qv = np.polyval(Q[::-1], z)
        return (np.abs(pv) > np.abs(qv)).astype(int) * (len(Q) > 1)

    single = len(Q) == 1
    return MapField(surface, target, expr, (D,), name=name or f"rational deg {D}",
                    chart_of=None if single else chart_of, south_expr=south,
                    degrees=(2 * D,), meta={"numerator": P, "denominator": Q, "degree": D})


def power_map(d: int, surface: Surface | None = None) -> MapField:
    """z -> z^d (d = 0 gives the constant map 1)."""
    if d == 0:
        return rational_map([1.0], [1.0], surface, name="constant")
    return rational_map([0.0] * d + [1.0], [1.0], surface, name=f"z^{d}")


def projective_line(surface: Surface | None = None) -> MapField:
    """The line [1 : z : 0] in CP^2; f*T CP^2 = O(2) + O(1) along the coordinate frames."""
    surface = surface or Surface.round_sphere()
    target = KahlerTarget.fubini_study(2)

    def expr(X, Y, Z):
        return jets.stack([Z, Z * 0.0])

    def south(X, Y, U):
        raise DegenerateMapError("the line leaves the affine chart at infinity")

    return MapField(surface, target, expr, (1,), name="line in CP2", degrees=(2, 1))


def torus_linear(surface: Surface | None = None, n=1, matrix=None, offset=None) -> MapField:
    """z -> M z + c into the flat torus C^n / (Z + iZ)^n (identity by default for n = 1)."""
    surface = surface or Surface.flat_torus()
    target = KahlerTarget.flat_torus(n)
    M = np.eye(n, 1, dtype=complex)[:, 0] if matrix is None else np.asarray(matrix, dtype=complex).reshape(n)
    c = np.zeros(n, dtype=complex) if offset is None else np.asarray(offset, dtype=complex)
    if n == 1 and np.allclose(M, [1.0]):
        A = (1,)
    elif np.allclose(M, 0):
        A = (0,) * n
    else:
        raise UnsupportedDecompositionError("only the identity and constant linear maps carry a declared class")

    def expr(X, Y, Z):
        return jets.stack([Z * M[k] + c[k] for k in range(n)])

    name = "torus identity" if any(A) else "torus constant"
    return MapField(surface, target, expr, A, name=name, degrees=(0,) * n)


def torus_constant(n=2, value=None, surface=None) -> MapField:
    return torus_linear(surface, n, np.zeros(n), value if value is not None else 0.25 + 0.25j + np.zeros(n))


def torus_fourier_map(coeffs: dict, surface: Surface | None = None) -> MapField:
    """z + sum c_{jk} exp(2 pi i (j x + k y)) into the flat torus (identity class)."""
    surface = surface or Surface.flat_torus()
    target = KahlerTarget.flat_torus(1)
    items = sorted((tuple(k), complex(v)) for k, v in coeffs.items())

    def expr(X, Y, Z):
        acc = Z
        for (j, k), c in items:
            if c != 0:
                acc = acc + c * jets.exp(2j * np.pi * (j * X + k * Y))
        return jets.stack([acc])

    return MapField(surface, target, expr, (1,), name="torus fourier", degrees=(0,), meta={"coeffs": dict(items)})


def scan_poles(f: MapField, n=24):
    """Reject maps whose reference-chart expression is singular on a sample grid."""
    z = global_rule(f.source, n).points
    if f.source.kind == "sphere":
        z = z[np.abs(z) < 2.0]
    mask = f.target_chart(z) == 0
    with np.errstate(all="ignore"):
        v = f(z[mask])
    if not np.all(np.isfinite(v)):
        raise DegenerateMapError(f"{f.name}: chart expression has poles inside the chart domain")
    return True


# ---------------------------------------------------------------------------
# Dirac-harmonic spinor spaces
# ---------------------------------------------------------------------------

PIECES = {"prime": ("pp", "ker"), "dprime": ("pm", "ker"), "prime*": ("mp", "coker"), "dprime*": ("mm", "coker")}
ALLOWED = [{"prime", "dprime"}, {"prime*", "dprime*"}, {"prime", "dprime*"}, {"dprime", "prime*"}]
SELECTORS = ("prime+dprime", "prime*+dprime*", "prime+dprime*", "dprime+prime*")


def parse_selector(selector: str):
    parts = tuple(p.strip() for p in selector.split("+"))
    if len(parts) != 2 or set(parts) not in ALLOWED:
        raise ValueError(f"selector {selector!r} is not one of the four spaces {SELECTORS}")
    return parts


@dataclass
class DiracHarmonicSpace:
    selector: str
    basis: list
    dims: tuple
    pieces: dict = field(default_factory=dict)


def _diag_check(f: MapField, z):
    M = f.target.hermitian_metric(f(z))
    n = f.n
    off = [np.max(np.abs(M[i, j])) for i in range(n) for j in range(n) if i != j]
    if off and max(off) > 1e-12 * np.max(np.abs(M)):
        raise UnsupportedDecompositionError(f"{f.name}: pullback frames are not orthogonal; no line splitting")


def _lift_component(f: MapField, L: LineTwist, piece: str, i: int, deg: int, sp, vecs, Z):
    """Frame coefficient of summand i from spectral (co)kernel coefficients (arrays or jets)."""
    kind = PIECES[piece][1]
    surf = f.source
    if surf.kind == "torus":
        lam = jets.abs2(Z) * 0.0 + 1.0
    else:
        lam = 2.0 * surf.radius / (1.0 + jets.abs2(Z))

    def metric_ii():
        W = f.expr(*_xyz(Z)) if isinstance(Z, jets.Jet) else f(Z)
        return f.target.hermitian_metric(W)[i, i]

    if kind == "ker":
        F = spectral.evaluate_kernel(sp, vecs, Z)
        return F if piece == "prime" else F / metric_ii().real
    G = spectral.evaluate_cokernel(sp, vecs, Z) * spectral.std_frame_norm2(surf.kind, deg, Z)
    HL = L.frame_norm2(lam)
    den = HL * metric_ii().real if piece == "prime*" else HL
    return G / den * SQRT2 / lam


def _lift(f: MapField, L: LineTwist, piece: str, i: int, deg: int, sp, vecs):
    """Chart-expression spinor from spectral (co)kernel coefficients of summand i."""
    block = PIECES[piece][0]
    n = f.n

    def fn(X, Y, Z):
        c = _lift_component(f, L, piece, i, deg, sp, vecs, Z)
        zero = c * 0.0
        return jets.stack([c if k == i else zero for k in range(n)])

    return fn, block


def spectral_values(psi: TwistedSpinorField, z):
    """Block values of a constructed field from its spectral representation (plain arrays)."""
    if not psi.spectral:
        raise RepresentationError(f"{psi.name}: no spectral representation")
    data = psi.spectral
    f, L, piece = psi.map, psi.twist, data["piece"]
    z = np.asarray(z, dtype=complex)
    out = np.zeros((f.n,) + z.shape, dtype=complex)
    for (i, deg, sp, vec), c in zip(data["terms"], data["coeffs"]):
        if c != 0:
            out[i] = out[i] + c * _lift_component(f, L, piece, i, deg, sp, [vec], z)
    return {data["block"]: out}


def _xyz(Z):
    return Z.real, Z.imag, Z


def _combine(f, L, block, fns, coeffs, srep=None):
    def fn(X, Y, Z):
        acc = None
        for g, c in zip(fns, coeffs):
            if c == 0:
                continue
            term = g(X, Y, Z) * c
            acc = term if acc is None else acc + term
        if acc is None:
            acc = fns[0](X, Y, Z) * 0.0
        return acc

    if srep is not None:
        srep = dict(srep, coeffs=[complex(c) for c in coeffs])
    return TwistedSpinorField(f, L, {block: fn}, spectral=srep)


def _orthonormalize(f, L, block, fns, nq=48, srep=None):
    """L^2(h)-orthonormal combinations of lifted fields (Cholesky of the Gram matrix)."""
    if not fns:
        return []
    rule = global_rule(f.source, nq)
    z = rule.points
    if f.source.kind == "sphere":
        f.require_single_chart(z)
    X, Y = jets.Jet.coordinates(z.real, z.imag)
    vals = [g(X, Y, X + 1j * Y).v for g in fns]
    k = len(fns)
    G = np.zeros((k, k), dtype=complex)
    for a in range(k):
        for b in range(a, k):
            G[a, b] = rule.integrate(pointwise_inner(f, L, z, {block: vals[a]}, {block: vals[b]}))
            G[b, a] = np.conj(G[a, b])
    C = np.linalg.cholesky(G)
    T = np.linalg.inv(C).conj().T  # columns give orthonormal combinations
    return [_combine(f, L, block, fns, T[:, j], srep) for j in range(k)]


def piece_fields(f: MapField, L: LineTwist, piece: str, N=32, orthonormal=True):
    """Basis fields of one of ker d-bar', ker d-bar'', ker d-bar'*, ker d-bar''* along f."""
    block, kind = PIECES[piece]
    degs = pullback_degrees(f)
    prime, dprime = spectral.summand_degrees(f.source, L.degree, degs)
    use = prime if piece in ("prime", "prime*") else dprime
    if f.n > 1:
        _diag_check(f, np.array([0.3 + 0.2j, 0.7 + 0.1j, 0.4 + 0.6j]))
    fns, terms = [], []
    for i, deg in enumerate(use):
        sp, kd = spectral.solve_line(f.source, deg, N)
        vecs = kd.kernel if kind == "ker" else kd.cokernel
        for v in vecs:
            fns.append(_lift(f, L, piece, i, deg, sp, [v])[0])
            terms.append((i, deg, sp, v))
    srep = {"piece": piece, "block": block, "N": N, "terms": terms}
    if not orthonormal:
        unit = np.eye(len(fns))
        return [TwistedSpinorField(f, L, {block: g}, spectral=dict(srep, coeffs=list(unit[j])))
                for j, g in enumerate(fns)]
    return _orthonormalize(f, L, block, fns, srep=srep)


def dirac_harmonic_space(f: MapField, twist: LineTwist, selector: str, N=32) -> DiracHarmonicSpace:
    parts = parse_selector(selector)
    pieces = {p: piece_fields(f, twist, p, N) for p in parts}
    basis = [psi for p in parts for psi in pieces[p]]
    dims = tuple(len(pieces[p]) for p in parts)
    return DiracHarmonicSpace(selector, basis, dims, pieces)


@dataclass
class ModuliTangent:
    dim_complex: int
    dim_real: int
    obs: int
    regular: bool
    predicted_real: int
    basis: list


def moduli_tangent(f: MapField, N=32) -> ModuliTangent:
    """Def_J(f) = H^0(f*T^{1,0}M) and Obs_J(f) = H^1 from the spectral engine."""
    L = LineTwist.trivial(f.source)
    rep = spectral.index_report(f.source, f.n, f.c1A, 0, pullback_degrees(f), N)
    basis = piece_fields(f, L, "prime", N)
    g = f.source.genus
    pred = 2 * f.n * (1 - g) + 2 * f.c1A
    return ModuliTangent(rep.ker_prime, 2 * rep.ker_prime, rep.coker_prime, rep.coker_prime == 0, pred, basis)


# ---------------------------------------------------------------------------
# integer identities
# ---------------------------------------------------------------------------


def adjunction_check(A2: int, c1A: int) -> bool:
    """Embedded spheres satisfy -2 = A.A - c1(A)."""
    return -2 == int(A2) - int(c1A)


def twisted_rank(A2: int, q: int) -> int:
    if q < 1:
        raise ValueError("q must be a positive integer")
    return 4 + int(A2) + 4 * int(q)
