"""Pointwise operators of the coupled map/spinor system.

All operators take chart points ``z`` (north chart on the sphere, the
fundamental chart on the torus) and return arrays over those points.
Tangent vectors of the target are returned by holomorphic components
(see :mod:`dhl.geometry`); twisted spinors are dicts of block coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RepresentationError
from .fields import BLOCKS, MapField, TwistedSpinorField, pointwise_inner, pointwise_norm2
from .geometry import curvature_at
from .quadrature import Rule, global_rule
from .spinc import clifford_matrix

SQRT2 = np.sqrt(2.0)
PLUS = ("pp", "pm")
MINUS = ("mp", "mm")
PARTNER = {"pp": "mp", "mp": "pp", "pm": "mm", "mm": "pm"}
# plus -> minus factor of e_alpha is (a + ib); minus -> plus is -(a - ib)
CLIFF_UP = (1.0, 1j)
CLIFF_DOWN = (-1.0, 1j)


@dataclass(frozen=True)
class ELResidual:
    tension_minus_curv: float
    dirac_norm: float
    point: complex


def _frame(theta):
    """Chart directions (before dividing by lambda) of the rotated frame e1', e2'."""
    c, s = np.cos(theta), np.sin(theta)
    return ((c, s), (-s, c))


def _lam(f: MapField, z):
    return np.asarray(f.source.conformal_factor(z, f._chart("north")))


def _rho_grad(f: MapField, z):
    d = f.source.log_lambda_dz(z)
    return 2.0 * d.real, -2.0 * d.imag


# ---------------------------------------------------------------------------
# map operators
# ---------------------------------------------------------------------------


def hessian(f: MapField, z):
    """(nabla df)(d_a, d_b) in chart directions, holomorphic components, shape (2, 2, n, *pts)."""
    z = np.asarray(z, dtype=complex)
    w = f.jet(z)
    G = f.target.christoffel(w.v)
    fd = [w.d[..., 0], w.d[..., 1]]
    h = w.h
    second = [[h[..., 0], h[..., 1]], [h[..., 1], h[..., 2]]]
    rx, ry = _rho_grad(f, z)
    rho = (rx, ry)
    H = np.empty((2, 2) + w.v.shape, dtype=complex)
    for a in range(2):
        for b in range(2):
            val = second[a][b] + np.einsum("kij...,i...,j...->k...", G, fd[a], fd[b])
            # source Levi-Civita of the conformal metric
            for c in range(2):
                gam = (a == c) * rho[b] + (b == c) * rho[a] - (a == b) * rho[c]
                val = val - gam * fd[c]
            H[a, b] = val
    return H


def tension(f: MapField, z, frame_angle=0.0):
    """tau(f) = sum_alpha (nabla df)(e_alpha, e_alpha), holomorphic components (n, *pts)."""
    z = np.asarray(z, dtype=complex)
    H = hessian(f, z)
    lam = _lam(f, z)
    tau = 0.0
    for a, b in _frame(frame_angle):
        tau = tau + (a * a * H[0, 0] + a * b * (H[0, 1] + H[1, 0]) + b * b * H[1, 1])
    return tau / lam**2


def tension_norm(f: MapField, z):
    z = np.asarray(z, dtype=complex)
    tau = tension(f, z)
    w = f(z)
    return np.sqrt(np.maximum(f.target.inner(w, tau, tau), 0.0))


# ---------------------------------------------------------------------------
# spinor operators
# ---------------------------------------------------------------------------


def _spinor_jets(psi: TwistedSpinorField, z):
    if not isinstance(psi, TwistedSpinorField):
        raise RepresentationError("expected a TwistedSpinorField")
    return psi.jets(z)


def covariant_derivatives(f: MapField, L, comps: dict, z, w=None):
    """Chart-direction covariant derivatives of block coefficient jets.

    Returns ``{block: (nabla_x, nabla_y)}`` in the same block frames.
    """
    z = np.asarray(z, dtype=complex)
    if w is None:
        w = f.jet(z)
    G = f.target.christoffel(w.v)
    dlog = f.source.log_lambda_dz(z)
    dL = L.connection_dz(z)
    out = {b: [] for b in comps}
    for a, Vz in ((0, 1.0), (1, 1j)):
        A = np.einsum("kij...,i...->kj...", G, w.d[..., a])
        omL = Vz * dL
        omS = Vz * dlog - np.conj(Vz) * np.conj(dlog)
        for b, c in comps.items():
            conn = A if b in ("pp", "mp") else np.conj(A)
            val = c.d[..., a] + omL * c.v + np.einsum("kj...,j...->k...", conn, c.v)
            if b in MINUS:
                val = val + omS * c.v
            out[b].append(val)
    return {b: tuple(v) for b, v in out.items()}


def _dirac_from_nabla(nab, lam, frame_angle=0.0):
    """Sum_alpha e_alpha . nabla_{e_alpha} psi from chart-direction derivatives."""
    rot = np.exp(-1j * frame_angle)
    out = {}
    for src in BLOCKS:
        if src not in nab:
            continue
        dst = PARTNER[src]
        acc = 0.0
        for alpha, (a, b) in enumerate(_frame(frame_angle)):
            d = (a * nab[src][0] + b * nab[src][1]) / lam
            if src in MINUS:
                d = d * rot  # coefficient against the rotated kappabar
            cm = clifford_matrix(*((1.0, 0.0) if alpha == 0 else (0.0, 1.0)))
            factor = cm[1, 0] if src in PLUS else cm[0, 1]
            val = factor * d
            if dst in MINUS:
                val = val / rot
            acc = acc + val
        out[dst] = out.get(dst, 0.0) + acc
    return out


def dirac_along_map(f: MapField, psi: TwistedSpinorField, z, frame_angle=0.0):
    """D^f psi at points as block coefficients (chirality flipped, type preserved)."""
    z = np.asarray(z, dtype=complex)
    comps = _spinor_jets(psi, z)
    w = f.jet(z)
    nab = covariant_derivatives(f, psi.twist, comps, z, w)
    out = _dirac_from_nabla(nab, _lam(f, z), frame_angle)
    for b in BLOCKS:
        out.setdefault(b, np.zeros_like(comps[b].v))
    return out


def dolbeault_prime(f: MapField, psi: TwistedSpinorField, z):
    """kappabar-coefficient of the (0,1)-part of nabla on the S^{c+} (x) T^{1,0} block."""
    return _dolbeault(f, psi, z, "pp")


def dolbeault_dprime(f: MapField, psi: TwistedSpinorField, z):
    """kappabar-coefficient of the J-antilinear part of nabla on the S^{c+} (x) T^{0,1} block."""
    return _dolbeault(f, psi, z, "pm")


def _dolbeault(f, psi, z, block):
    z = np.asarray(z, dtype=complex)
    if block not in psi.blocks:
        # an absent block is the zero section
        return np.zeros((f.n,) + z.shape, dtype=complex)
    comps = _spinor_jets(psi, z)
    nab = covariant_derivatives(f, psi.twist, {block: comps[block]}, z)
    nx, ny = nab[block]
    # kappabar(e1) = 1/sqrt2, so the coefficient is (nabla_e1 + i nabla_e2)/sqrt2
    return (nx + 1j * ny) / (SQRT2 * _lam(f, z))


# ---------------------------------------------------------------------------
# curvature term
# ---------------------------------------------------------------------------


def _curvature_action(f, comps, w, dfs, X):
    """R^f(X, psi) as block coefficients; dfs are df(e_alpha) for the frame in use."""
    out = {b: 0.0 for b in BLOCKS}
    for alpha, dfa in enumerate(dfs):
        Om = f.target.curvature_operator(w, X, dfa)
        up, down = CLIFF_UP[alpha], CLIFF_DOWN[alpha]
        out["mp"] = out["mp"] + up * np.einsum("kj...,j...->k...", Om, comps["pp"])
        out["pp"] = out["pp"] + down * np.einsum("kj...,j...->k...", Om, comps["mp"])
        out["mm"] = out["mm"] + up * np.einsum("kj...,j...->k...", np.conj(Om), comps["pm"])
        out["pm"] = out["pm"] + down * np.einsum("kj...,j...->k...", np.conj(Om), comps["mm"])
    return out


def _frame_data(f, z, w, frame_angle, comps):
    lam = _lam(f, z)
    dfs = [(a * w.d[..., 0] + b * w.d[..., 1]) / lam for a, b in _frame(frame_angle)]
    rot = np.exp(-1j * frame_angle)
    rc = {b: (c * rot if b in MINUS else c) for b, c in comps.items()}
    return dfs, rc


def curvature_covector(f: MapField, psi_values: dict, L, z, frame_angle=0.0, w=None):
    """c_m = (1/2) <psi, R^f(y_m, psi)> over the real coordinate frame y_m (complex, shape (2n, *pts))."""
    z = np.asarray(z, dtype=complex)
    if w is None:
        w = f.jet(z)
    comps = {b: np.asarray(psi_values[b]) for b in BLOCKS}
    dfs, rc = _frame_data(f, z, w, frame_angle, comps)
    B = f.target.real_basis()
    ones = np.ones(z.shape)
    cov = []
    for m in range(2 * f.n):
        X = B[m].reshape((f.n,) + (1,) * z.ndim) * ones
        act = _curvature_action(f, rc, w.v, dfs, X)
        cov.append(0.5 * pointwise_inner(f, L, z, rc, act, w.v))
    return np.array(cov)


def curvature_term(f: MapField, psi: TwistedSpinorField, z, frame_angle=0.0, return_imag=False):
    """The curvature source term as holomorphic components (n, *pts).

    Defined by g(R(f, psi), X) = (1/2) <psi, R^f(X, psi)>; the covector is
    assembled over the real coordinate frame and raised with the metric.
    """
    z = np.asarray(z, dtype=complex)
    vals = psi.values(z)
    w = f.jet(z)
    c = curvature_covector(f, vals, psi.twist, z, frame_angle, w)
    G = f.target.real_metric(w.v)
    Gm = np.moveaxis(G, (0, 1), (-2, -1))
    cr = np.moveaxis(c, 0, -1)
    up = np.linalg.solve(Gm, cr[..., None])[..., 0]
    up = np.moveaxis(up, -1, 0)
    vec = f.target.from_real(up.real)
    if return_imag:
        return vec, np.max(np.abs(up.imag)) if up.size else 0.0
    return vec


def curvature_term_oracle(f: MapField, psi: TwistedSpinorField, z0: complex):
    """Independent evaluation at one point by explicit index loops over real frames."""
    z = np.array([complex(z0)])
    w = f.jet(z)
    wv = w.v[:, 0]
    R = curvature_at(f.target, wv)
    G = f.target.real_metric(wv)
    vals = {b: v[:, 0] for b, v in psi.values(z).items()}
    lam = float(_lam(f, z)[0])
    HL = float(psi.twist.frame_norm2(np.array(lam)))
    n = f.n
    # psi = sum_k A_k (x) d/dw_k + B_k (x) d/dwbar_k with spinor pairs A_k, B_k
    comp = []
    for k in range(n):
        Ak = np.array([vals["pp"][k], vals["mp"][k]])
        Bk = np.array([vals["pm"][k], vals["mm"][k]])
        comp.append(0.5 * (Ak + Bk))
        comp.append(0.5 * (-1j * Ak + 1j * Bk))
    dfr = [f.target.to_real(w.d[:, 0, a] / lam) for a in range(2)]
    cl = [clifford_matrix(1.0, 0.0), clifford_matrix(0.0, 1.0)]
    c = np.zeros(2 * n, dtype=complex)
    for m in range(2 * n):
        total = 0.0
        for i in range(2 * n):
            for j in range(2 * n):
                for l in range(2 * n):
                    for alpha in range(2):
                        pair = HL * np.vdot(comp[i], cl[alpha] @ comp[j])
                        total += R[i, j, m, l] * dfr[alpha][l] * pair
        c[m] = 0.5 * total
    up = np.linalg.solve(G, c)
    return f.target.from_real(up.real), np.max(np.abs(up.imag))


# ---------------------------------------------------------------------------
# functionals and residuals
# ---------------------------------------------------------------------------


def energy_density(f: MapField, z):
    """(1/2)|df|^2 against dx dy (the lambda^2 factors cancel)."""
    z = np.asarray(z, dtype=complex)
    w = f.jet(z)
    fx, fy = w.d[..., 0], w.d[..., 1]
    return 0.5 * (f.target.inner(w.v, fx, fx) + f.target.inner(w.v, fy, fy))


def bosonic_action(f: MapField, rule: Rule | None = None):
    if rule is None:
        rule = global_rule(f.source, 64)
    return float(rule.integrate(energy_density(f, rule.points), "dxdy"))


def fermionic_density(f: MapField, psi: TwistedSpinorField, z):
    z = np.asarray(z, dtype=complex)
    Dpsi = dirac_along_map(f, psi, z)
    return pointwise_inner(f, psi.twist, z, psi.values(z), Dpsi)


def action(f: MapField, psi: TwistedSpinorField | None = None, rule: Rule | None = None):
    """(L[f], (1/2) int <psi, D^f psi>) with the fermionic part complex.

    The imaginary part of the fermionic integral is kept so that callers can
    assert it vanishes.
    """
    if rule is None:
        rule = global_rule(f.source, 64)
    bos = bosonic_action(f, rule)
    if psi is None:
        return bos, 0j
    ferm = 0.5 * rule.integrate(fermionic_density(f, psi, rule.points))
    return bos, complex(ferm)


def hermitian_l2(f: MapField, L, a: dict, b: dict, rule: Rule):
    return complex(rule.integrate(pointwise_inner(f, L, rule.points, a, b)))


def el_residual(f: MapField, psi: TwistedSpinorField | None, points):
    """Pointwise Euler-Lagrange residual norms (|tau - R|_g, |D^f psi|)."""
    z = np.asarray(points, dtype=complex).ravel()
    w = f(z)
    tau = tension(f, z)
    if psi is None or not psi.blocks:
        diff = tau
        dn = np.zeros(z.shape)
    else:
        diff = tau - curvature_term(f, psi, z)
        Dpsi = dirac_along_map(f, psi, z)
        dn = np.sqrt(np.maximum(pointwise_norm2(f, psi.twist, z, Dpsi, w), 0.0))
    tn = np.sqrt(np.maximum(f.target.inner(w, diff, diff), 0.0))
    return [ELResidual(float(a), float(b), complex(p)) for a, b, p in zip(tn, dn, z)]


def max_residual(res):
    return (max((r.tension_minus_curv for r in res), default=0.0), max((r.dirac_norm for r in res), default=0.0))
