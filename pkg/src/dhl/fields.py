"""Maps from the surface into a Kähler target and twisted spinor fields along them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import jets
from .errors import DegenerateMapError, RepresentationError, UnsupportedDecompositionError
from .geometry import KahlerTarget, Surface
from .jets import Jet
from .spinc import LineTwist

BLOCKS = ("pp", "pm", "mp", "mm")


def chart_jets(z):
    """Coordinate jets (X, Y) and the complex jet Z = X + iY at chart points."""
    z = np.asarray(z, dtype=complex)
    X, Y = Jet.coordinates(z.real, z.imag)
    return X, Y, X + 1j * Y


@dataclass(frozen=True, eq=False)
class MapField:
    """A smooth map given by jet-evaluable chart expressions.

    ``expr(X, Y, Z)`` returns the target coordinates as a jet of shape
    ``(n, *pts)`` in the target chart reported by ``chart_of`` (default 0).
    ``south_expr`` (sphere sources) gives the same map in the south chart,
    in target chart ``south_chart``.
    """

    source: Surface
    target: KahlerTarget
    expr: Callable
    A: tuple
    name: str = "map"
    chart_of: Optional[Callable] = None
    south_expr: Optional[Callable] = None
    south_chart: int = 0
    degrees: Optional[tuple] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        A = tuple(int(a) for a in np.atleast_1d(self.A))
        object.__setattr__(self, "A", A)
        self.target._check_class(A)

    @property
    def n(self):
        return self.target.n

    @property
    def c1A(self) -> int:
        return self.target.c1_pairing(self.A)

    @property
    def omega_A(self) -> float:
        return self.target.kahler_pairing(self.A)

    def jet(self, z, chart="north"):
        """Target coordinates as a jet of shape (n, *pts)."""
        z = np.asarray(z, dtype=complex)
        if chart == "south":
            if self.south_expr is None:
                raise RepresentationError(f"{self.name}: no south-chart expression")
            self.source.check_domain(z, "south")
            return self.south_expr(*chart_jets(z))
        self.source.check_domain(z, self._chart(chart))
        return self.expr(*chart_jets(z))

    def __call__(self, z, chart="north"):
        return self.jet(z, chart).v

    def target_chart(self, z):
        if self.chart_of is None:
            return np.zeros(np.shape(z), dtype=int)
        return np.asarray(self.chart_of(np.asarray(z, dtype=complex)))

    def require_single_chart(self, z):
        if np.any(self.target_chart(z) != 0):
            raise DegenerateMapError(
                f"{self.name}: map leaves the reference target chart at sampled points; "
                "spinor fields need a single-chart map expression"
            )

    def _chart(self, chart):
        return "fundamental" if self.source.kind == "torus" else chart


def differential(f: MapField, z, chart="north"):
    """df at chart points: holomorphic components of df(d/dx), df(d/dy) and |df|^2.

    Returns ``(dfx, dfy, norm2)`` with ``dfx`` of shape (n, *pts).
    """
    w = f.jet(z, chart)
    lam = np.asarray(f.source.conformal_factor(np.asarray(z), f._chart(chart)))
    dfx, dfy = w.d[..., 0], w.d[..., 1]
    norm2 = (f.target.inner(w.v, dfx, dfx) + f.target.inner(w.v, dfy, dfy)) / lam**2
    return dfx, dfy, norm2


def dbar_J(f: MapField, z, chart="north"):
    """Complex antilinear part (df + J df j)/2, evaluated on d/dx, with its operator norm.

    Since the antilinear part satisfies A(j v) = -J A(v), its value on d/dx
    determines it; the operator norm is |A(e1)|_g.
    """
    w = f.jet(z, chart)
    lam = np.asarray(f.source.conformal_factor(np.asarray(z), f._chart(chart)))
    # J df j (d/dx) = J df(d/dy) = i f_y
    ax = 0.5 * (w.d[..., 0] + 1j * w.d[..., 1])
    norm = np.sqrt(np.maximum(f.target.inner(w.v, ax, ax), 0.0)) / lam
    return ax, norm


def pullback_connection(f: MapField, z, direction, chart="north"):
    """Connection matrix of the pullback connection on f*T^{1,0}M along a chart vector.

    ``direction = (a, b)`` means ``a d/dx + b d/dy``; returns A[k, j] with
    ``nabla_V d/dw_j = sum_k A[k, j] d/dw_k``.
    """
    w = f.jet(z, chart)
    a, b = direction
    dfV = a * w.d[..., 0] + b * w.d[..., 1]
    G = f.target.christoffel(w.v)
    return np.einsum("kij...,i...->kj...", G, dfV)


def pullback_degrees(f: MapField):
    """Degrees of the holomorphic line summands of f*T^{1,0}M."""
    if f.degrees is None:
        raise UnsupportedDecompositionError(
            f"{f.name}: no line-bundle splitting is known for this target/map; "
            "assemble the full bundle with the spectral engine instead"
        )
    return tuple(int(d) for d in f.degrees)


# ---------------------------------------------------------------------------
# twisted spinor fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TwistedSpinorField:
    """A section of (S^c (x) L) (x) f*T^C M.

    ``blocks`` maps block names to callables ``(X, Y, Z) -> Jet (n, *pts)``
    giving coefficients against the frames

        pp: l (x) d/dw_k          mp: kappabar (x) l (x) d/dw_k
        pm: l (x) d/dwbar_k       mm: kappabar (x) l (x) d/dwbar_k

    in the north (or fundamental) chart, where l is the holomorphic frame of
    the twist.  ``spectral`` optionally carries coefficient data and an
    evaluator for the same field.
    """

    map: MapField
    twist: LineTwist
    blocks: dict
    name: str = "psi"
    spectral: Optional[dict] = None

    @property
    def present(self):
        return tuple(b for b in BLOCKS if b in self.blocks)

    def jets(self, z):
        z = np.asarray(z, dtype=complex)
        if not self.blocks:
            raise RepresentationError(f"{self.name}: no pointwise representation")
        self.map.require_single_chart(z)
        X, Y, Z = chart_jets(z)
        n = self.map.n
        out = {}
        for b in BLOCKS:
            if b in self.blocks:
                val = self.blocks[b](X, Y, Z)
                if not isinstance(val, Jet):
                    val = Jet(np.broadcast_to(np.asarray(val, dtype=complex), (n,) + z.shape).copy())
                out[b] = val
            else:
                out[b] = Jet(np.zeros((n,) + z.shape, dtype=complex))
        return out

    def values(self, z):
        return {k: v.v for k, v in self.jets(z).items()}

    def scaled(self, c, name=None):
        blocks = {k: (lambda X, Y, Z, _g=g: _g(X, Y, Z) * c) for k, g in self.blocks.items()}
        return TwistedSpinorField(self.map, self.twist, blocks, name or self.name)

    def restricted(self, keep, name=None):
        blocks = {k: g for k, g in self.blocks.items() if k in keep}
        return TwistedSpinorField(self.map, self.twist, blocks, name or f"{self.name}|{'+'.join(keep)}")

    def __add__(self, other):
        if other.map is not self.map or other.twist != self.twist:
            raise RepresentationError("spinor fields along different maps or twists cannot be added")
        blocks = dict(self.blocks)
        for k, g in other.blocks.items():
            if k in blocks:
                f0 = blocks[k]
                blocks[k] = lambda X, Y, Z, _a=f0, _b=g: _a(X, Y, Z) + _b(X, Y, Z)
            else:
                blocks[k] = g
        return TwistedSpinorField(self.map, self.twist, blocks, f"{self.name}+{other.name}")


def block_metrics(f: MapField, L: LineTwist, z, w=None):
    """Hermitian matrices of the four block frames at points, shape (n, n, *pts).

    kappabar is unitary, so S^{c-} blocks share the metric of the matching
    S^{c+} block.
    """
    z = np.asarray(z, dtype=complex)
    if w is None:
        w = f.jet(z).v
    lam = np.asarray(f.source.conformal_factor(z, f._chart("north")))
    HL = np.asarray(L.frame_norm2(lam))
    M = np.asarray(jets.value(f.target.hermitian_metric(w)))
    M10 = HL * M
    M01 = HL * np.conj(M)
    return {"pp": M10, "mp": M10, "pm": M01, "mm": M01}


def pointwise_norm2(f: MapField, L: LineTwist, z, comps: dict, w=None):
    """|psi|^2 at points from frame coefficients (values, not jets)."""
    Ms = block_metrics(f, L, z, w)
    total = 0.0
    for b, c in comps.items():
        c = jets.value(c)
        total = total + np.real(np.einsum("j...,jk...,k...->...", np.conj(c), Ms[b], c))
    return total


def pointwise_inner(f: MapField, L: LineTwist, z, a: dict, b: dict, w=None):
    """Hermitian pairing <a, b> (antilinear in a) at points."""
    Ms = block_metrics(f, L, z, w)
    total = 0.0
    for k in BLOCKS:
        if k in a and k in b:
            total = total + np.einsum("j...,jk...,k...->...", np.conj(jets.value(a[k])), Ms[k], jets.value(b[k]))
    return total


def to_unitary(f: MapField, L: LineTwist, z, comps: dict):
    """Convert frame coefficients to components against a unitary frame (Cholesky)."""
    Ms = block_metrics(f, L, z)
    out = {}
    for b, c in comps.items():
        M = np.moveaxis(Ms[b], (0, 1), (-2, -1))
        C = np.linalg.cholesky(M)  # M = C C^H
        cv = np.moveaxis(jets.value(c), 0, -1)
        out[b] = np.moveaxis(np.einsum("...kj,...k->...j", np.conj(C), cv), -1, 0)
    return out
