"""The canonical Spin^c spinor bundle of a Riemann surface and its line twists.

Fibres of S^c = Lambda^{0,0} + Lambda^{0,1} are stored as pairs
``(plus, minus)`` where ``minus`` is the coefficient of the unit coform
kappabar.  In an orthonormal frame a tangent vector ``v = a e1 + b e2``
acts by the 2x2 block matrix

    plus  -> minus:  (a + i b)
    minus -> plus :  -(a - i b)

which is Clifford multiplication ``alpha . phi = sqrt2 alpha^{0,1} phi`` on
functions and contraction ``-sqrt2 i_{bar(alpha^{1,0})}`` on (0,1)-forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompatibilityError, InvalidFrameError
from .geometry import Surface


@dataclass(frozen=True)
class SpinorFiber:
    plus: complex
    minus: complex

    def as_array(self):
        return np.array([self.plus, self.minus], dtype=complex)

    @classmethod
    def from_array(cls, a):
        return cls(complex(a[0]), complex(a[1]))

    def norm2(self) -> float:
        return abs(self.plus) ** 2 + abs(self.minus) ** 2


def clifford_matrix(a, b):
    """Matrix of Clifford multiplication by ``a e1 + b e2`` on (plus, minus)."""
    return np.array([[0.0, -(a - 1j * b)], [a + 1j * b, 0.0]], dtype=complex)


def clifford_mul(v, s: SpinorFiber) -> SpinorFiber:
    """Clifford multiplication by a tangent vector given by its frame components (a, b)."""
    a, b = (float(c) for c in v)
    if not np.isfinite(a) or not np.isfinite(b):
        raise InvalidFrameError("vector components must be finite")
    return SpinorFiber(-(a - 1j * b) * s.minus, (a + 1j * b) * s.plus)


def clifford_mul_frame(v, s: SpinorFiber, frame_e1, frame_e2) -> SpinorFiber:
    """Clifford multiplication by a chart vector ``v`` using an explicit orthonormal frame."""
    e1 = np.asarray(frame_e1, dtype=float)
    e2 = np.asarray(frame_e2, dtype=float)
    n1, n2 = np.linalg.norm(e1), np.linalg.norm(e2)
    if n1 == 0 or n2 == 0:
        raise InvalidFrameError("zero-length frame vector")
    # frame vectors are h-orthonormal with e2 = j e1, so components are by projection
    a = np.dot(v, e1) / n1**2
    b = np.dot(v, e2) / n2**2
    return clifford_mul((a, b), s)


def volume_action(s: SpinorFiber) -> SpinorFiber:
    """Action of dvol_h = e1* ^ e2*: -i on S^{c+}, +i on S^{c-}."""
    return SpinorFiber(-1j * s.plus, 1j * s.minus)


# ---------------------------------------------------------------------------
# line bundle twists
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineTwist:
    """A holomorphic Hermitian line bundle on the surface.

    ``kind`` is ``"trivial"``, ``"canonical_power"`` (K^m, with ``m``) or
    ``"spin_half"`` (the chosen square root of K).  On the torus the trivial
    square root is used.  The Hermitian metric is the one induced by the
    surface metric, |d/dz|^2 = lambda^2/2 on K^{-1}, so the holomorphic frame
    of a degree-ell twist over the sphere chart has norm^2 (lambda^2/2)^(ell/2).
    """

    surface: Surface
    kind: str = "trivial"
    m: int = 0

    def __post_init__(self):
        if self.kind not in ("trivial", "canonical_power", "spin_half"):
            raise ValueError(f"unknown twist kind {self.kind!r}")

    @classmethod
    def trivial(cls, surface):
        return cls(surface, "trivial", 0)

    @classmethod
    def canonical_power(cls, surface, m):
        return cls(surface, "canonical_power", int(m))

    @classmethod
    def spin_half(cls, surface):
        return cls(surface, "spin_half", 0)

    @property
    def canonical_exponent(self) -> float:
        """The power of K this twist represents."""
        return {"trivial": 0.0, "canonical_power": float(self.m), "spin_half": 0.5}[self.kind]

    @property
    def degree(self) -> int:
        return int(round(self.canonical_exponent * (2 * self.surface.genus - 2)))

    def frame_norm2(self, lam):
        """|l|^2 of the holomorphic frame in the given chart, from the conformal factor."""
        if self.surface.kind == "torus":
            return lam * 0.0 + 1.0
        # K^{-1} frame d/dz has norm^2 lambda^2 / 2; this twist is K^{-deg/2}
        return (0.5 * lam * lam) ** (self.degree / 2.0)

    def connection_dz(self, surface_z):
        """Coefficient of dz in the Chern connection form d log |l|^2 in the north chart."""
        if self.surface.kind == "torus":
            return np.zeros(np.shape(surface_z), dtype=complex)
        # d/dz log (lambda^2/2)^(deg/2) = deg * d/dz log lambda
        return self.degree * self.surface.log_lambda_dz(surface_z)

    def transition_winding(self, samples=256) -> int:
        """Winding number of the transition function around the chart overlap.

        The holomorphic frames are related by l_north = u^(-deg) l_south on the
        sphere; the winding is computed numerically on |z| = 1.
        """
        if self.surface.kind == "torus":
            return 0
        theta = np.linspace(0, 2 * np.pi, samples, endpoint=False)
        z = np.exp(1j * theta)
        u = 1.0 / z
        g = u ** float(-self.degree)
        phase = np.unwrap(np.angle(np.append(g, g[0])))
        return int(round((phase[-1] - phase[0]) / (2 * np.pi)))


@dataclass(frozen=True)
class TwistedBundle:
    """Degrees of the two chirality summands S^{c+} (x) L and S^{c-} (x) L."""

    surface: Surface
    twist_degree: int

    @property
    def degrees(self):
        return (self.twist_degree, self.twist_degree + self.surface.euler_characteristic)


def spinor_bundle(surface: Surface) -> TwistedBundle:
    return TwistedBundle(surface, 0)


def twist(bundle: TwistedBundle, L: LineTwist) -> TwistedBundle:
    if bundle.surface != L.surface:
        raise IncompatibilityError("line bundle lives on a different surface")
    return TwistedBundle(bundle.surface, bundle.twist_degree + L.degree)


@dataclass(frozen=True)
class TwistedSpinorFiber:
    """Fibre of S^c (x) f*T^C M in four blocks of length n.

    pp: S^{c+} (x) T^{1,0}, pm: S^{c+} (x) T^{0,1},
    mp: S^{c-} (x) T^{1,0}, mm: S^{c-} (x) T^{0,1}.
    Components are taken against unitary frames, so the norm is Euclidean.
    """

    pp: np.ndarray
    pm: np.ndarray
    mp: np.ndarray
    mm: np.ndarray

    def norm2(self) -> float:
        return float(sum(np.sum(np.abs(b) ** 2) for b in (self.pp, self.pm, self.mp, self.mm)))

    def block_norms2(self):
        return {k: float(np.sum(np.abs(getattr(self, k)) ** 2)) for k in ("pp", "pm", "mp", "mm")}
