"""Finite-difference harness for the first variation of the spinor action.

A compactly supported displacement ``X`` deforms the map chart-wise,
``f_t = f + t X``, while the spinor keeps its coefficients against the
coordinate frames (time-independent components).  The harness compares the
central-difference derivative of ``int <psi_t, D^{f_t} psi_t>`` with

    2 Re int <nabla_X psi, D^f psi> + 2 int g(R(f, psi), X).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .fields import MapField, TwistedSpinorField
from .operators import curvature_term, dirac_along_map
from .fields import pointwise_inner
from .quadrature import disk_rule


@dataclass(frozen=True)
class VariationResult:
    fd_derivative: complex
    predicted: complex
    curvature_part: float
    error: float


def bump(Z, center, radius):
    """Smooth bump exp(-1/u), u = 1 - |z - c|^2 / r^2, for points strictly inside the disk."""
    dz = Z - center
    u = 1.0 - jets.abs2(dz) / radius**2
    return jets.exp(-1.0 / u)


def displaced(f: MapField, direction, center, radius, t):
    direction = np.asarray(direction, dtype=complex)

    def expr(X, Y, Z):
        b = bump(Z, center, radius)
        base = f.expr(X, Y, Z)
        disp = jets.stack([b * (t * d) for d in direction])
        return base + disp

    return MapField(f.source, f.target, expr, f.A, name=f"{f.name}+t", degrees=f.degrees)


def nabla_X(f: MapField, psi_vals: dict, X, z):
    """phi (x) nabla_X Z for the coordinate vector fields Z."""
    G = f.target.christoffel(f(z))
    A = np.einsum("kij...,i...->kj...", G, X)
    out = {}
    for b, c in psi_vals.items():
        conn = A if b in ("pp", "mp") else np.conj(A)
        out[b] = np.einsum("kj...,j...->k...", conn, c)
    return out


def variation_check(f: MapField, psi: TwistedSpinorField, direction, center=0.3 + 0.1j, radius=0.5, h=1e-4, nr=64):
    rule = disk_rule(f.source, center, radius, nr)
    z = rule.points

    def integral(t):
        ft = displaced(f, direction, center, radius, t)
        pt = TwistedSpinorField(ft, psi.twist, psi.blocks, psi.name)
        return rule.integrate(pointwise_inner(ft, psi.twist, z, pt.values(z), dirac_along_map(ft, pt, z)))

    fd = (integral(h) - integral(-h)) / (2 * h)
    vals = psi.values(z)
    X = np.asarray(direction, dtype=complex)[:, None] * bump(z, center, radius)[None]
    Dpsi = dirac_along_map(f, psi, z)
    first = 2.0 * np.real(rule.integrate(pointwise_inner(f, psi.twist, z, nabla_X(f, vals, X, z), Dpsi)))
    Rv = curvature_term(f, psi, z)
    curv = 2.0 * rule.integrate(f.target.inner(f(z), Rv, X))
    pred = first + curv
    return VariationResult(complex(fd), complex(pred), float(curv), float(abs(fd - pred)))
