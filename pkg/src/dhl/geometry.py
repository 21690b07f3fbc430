"""Source surfaces and Kähler targets, evaluated chart-wise.

Complex tangent vectors of a target are stored by their holomorphic
components: a real vector ``u`` corresponds to ``zeta = du(w)``, i.e.
``zeta_k = u_{x_k} + i u_{y_k}``.  The Hermitian matrix
``M_{jk} = <d/dw_j, d/dw_k>`` then gives ``g(u, v) = 2 Re(zeta_u^H M zeta_v)``.
Real coordinate frames are ordered ``(x_1, y_1, x_2, y_2, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import DomainError, UnsupportedClassError
from .jets import Jet

SQRT2 = np.sqrt(2.0)

# sphere charts accept finite points up to this modulus
SPHERE_CHART_RADIUS = 1.0e4


# ---------------------------------------------------------------------------
# Source surfaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Surface:
    """A closed Riemann surface with a conformal metric ``lambda^2 |dz|^2``.

    ``kind`` is ``"sphere"`` (round sphere, two charts related by ``u = 1/z``)
    or ``"torus"`` (flat torus C / (Z w1 + Z w2), one fundamental-domain chart).
    """

    kind: str
    radius: float = 1.0
    lattice: tuple = (1.0 + 0j, 1j)

    def __post_init__(self):
        if self.kind not in ("sphere", "torus"):
            raise ValueError(f"unknown surface kind {self.kind!r}")
        if self.kind == "sphere" and not self.radius > 0:
            raise ValueError("sphere radius must be positive")
        if self.kind == "torus":
            w1, w2 = (complex(c) for c in self.lattice)
            if abs((np.conj(w1) * w2).imag) < 1e-14:
                raise ValueError("torus lattice vectors are linearly dependent")

    @classmethod
    def round_sphere(cls, radius=1.0):
        return cls("sphere", radius=float(radius))

    @classmethod
    def flat_torus(cls, lattice=(1.0 + 0j, 1j)):
        return cls("torus", lattice=tuple(complex(c) for c in lattice))

    @property
    def genus(self) -> int:
        return 0 if self.kind == "sphere" else 1

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus

    @property
    def charts(self):
        return ("north", "south") if self.kind == "sphere" else ("fundamental",)

    @property
    def is_square_torus(self) -> bool:
        return self.kind == "torus" and np.allclose(self.lattice, (1.0, 1j), atol=1e-15)

    def check_domain(self, z, chart: str):
        zv = jets.value(z)
        if chart not in self.charts:
            raise DomainError(f"surface {self.kind} has no chart {chart!r}")
        if not np.all(np.isfinite(zv)):
            raise DomainError("non-finite chart point")
        if self.kind == "sphere":
            if np.any(np.abs(zv) > SPHERE_CHART_RADIUS):
                raise DomainError(f"point outside chart {chart!r} (|z| > {SPHERE_CHART_RADIUS:g})")
        else:
            s, t = self.lattice_coordinates(zv)
            if np.any((s < -0.5) | (s > 1.5) | (t < -0.5) | (t > 1.5)):
                raise DomainError("point outside the fundamental-domain chart")

    def lattice_coordinates(self, z):
        w1, w2 = (complex(c) for c in self.lattice)
        A = np.array([[w1.real, w2.real], [w1.imag, w2.imag]])
        zv = np.asarray(z)
        st = np.linalg.solve(A, np.stack([zv.real.ravel(), zv.imag.ravel()]))
        return st[0].reshape(zv.shape), st[1].reshape(zv.shape)

    def conformal_factor(self, z, chart: str = "north"):
        """lambda(z) with h = lambda^2 (dx^2 + dy^2); accepts arrays or jets."""
        self.check_domain(z, chart)
        if self.kind == "sphere":
            return 2.0 * self.radius / (1.0 + jets.abs2(z))
        if isinstance(z, Jet):
            return Jet(np.ones(z.shape))
        return np.ones(np.shape(z))

    def log_lambda_dz(self, z, chart: str = "north"):
        """Wirtinger derivative d/dz of log lambda at array points."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "sphere":
            return -np.conj(z) / (1.0 + np.abs(z) ** 2)
        return np.zeros(z.shape, dtype=complex)

    def transition(self, z, source: str, target: str):
        """Chart transition map (biholomorphic on overlaps)."""
        if source == target:
            return z
        if self.kind == "sphere" and {source, target} == {"north", "south"}:
            return 1.0 / z
        raise DomainError(f"no transition {source} -> {target}")

    def area(self) -> float:
        if self.kind == "sphere":
            return 4.0 * np.pi * self.radius**2
        w1, w2 = (complex(c) for c in self.lattice)
        return abs((np.conj(w1) * w2).imag)

    def gauss_curvature(self, z, chart="north"):
        if self.kind == "sphere":
            return np.full(np.shape(z), 1.0 / self.radius**2)
        return np.zeros(np.shape(z))


@dataclass(frozen=True)
class Frame:
    """Orthonormal frame e1, e2 = j e1 and the associated unit (1,0)/(0,1) data.

    Vectors are components in the chart basis (d/dx, d/dy); coforms are
    components in (dx, dy).
    """

    lam: float
    e1: np.ndarray
    e2: np.ndarray
    eps: np.ndarray
    epsbar: np.ndarray
    kappa: np.ndarray
    kappabar: np.ndarray

    def metric(self):
        return self.lam**2 * np.eye(2)


def frame_at(surface: Surface, z, chart: str = "north") -> Frame:
    """Orthonormal frame at a single chart point, with e1 along +x."""
    z = complex(z)
    lam = float(surface.conformal_factor(np.asarray(z), chart))
    e1 = np.array([1.0 / lam, 0.0])
    e2 = np.array([0.0, 1.0 / lam])
    e1s = np.array([lam, 0.0])
    e2s = np.array([0.0, lam])
    return Frame(
        lam=lam,
        e1=e1,
        e2=e2,
        eps=(e1 - 1j * e2) / SQRT2,
        epsbar=(e1 + 1j * e2) / SQRT2,
        kappa=(e1s + 1j * e2s) / SQRT2,
        kappabar=(e1s - 1j * e2s) / SQRT2,
    )


# ---------------------------------------------------------------------------
# Kähler targets
# ---------------------------------------------------------------------------


def _jsum0(a):
    """Sum over the leading axis for arrays or jets."""
    if isinstance(a, Jet):
        return Jet(a.v.sum(0), a.d.sum(0), a.h.sum(0))
    return np.asarray(a).sum(0)


@dataclass(frozen=True)
class KahlerTarget:
    """A Kähler manifold evaluated in holomorphic affine charts.

    ``kind`` is one of ``"fubini_study"`` (CP^n, line class area 4 pi),
    ``"flat_torus"`` (C^n / lattice, metric |dw|^2) or ``"sphere_product"``
    (a product of n unit round spheres).
    """

    kind: str
    n: int = 1
    lattice: tuple = (1.0 + 0j, 1j)

    def __post_init__(self):
        if self.kind not in ("fubini_study", "flat_torus", "sphere_product"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("complex dimension must be >= 1")

    @classmethod
    def fubini_study(cls, n=1):
        return cls("fubini_study", n=int(n))

    @classmethod
    def flat_torus(cls, n=1, lattice=(1.0 + 0j, 1j)):
        return cls("flat_torus", n=int(n), lattice=tuple(complex(c) for c in lattice))

    @classmethod
    def sphere_product(cls, n=2):
        return cls("sphere_product", n=int(n))

    @property
    def complex_dim(self):
        return self.n

    @property
    def real_dim(self):
        return 2 * self.n

    @property
    def is_flat(self):
        return self.kind == "flat_torus"

    # -- homology ---------------------------------------------------------
    @property
    def h2_rank(self):
        return 1 if self.kind == "fubini_study" else self.n

    def _check_class(self, A):
        A = np.atleast_1d(np.asarray(A))
        if A.shape != (self.h2_rank,) or not np.all(np.equal(np.mod(A, 1), 0)):
            raise UnsupportedClassError(
                f"class {A.tolist()} is not an integer vector in the rank-{self.h2_rank} H2 basis of {self.kind}"
            )
        return A.astype(int)

    def c1_pairing(self, A) -> int:
        A = self._check_class(A)
        if self.kind == "fubini_study":
            return int((self.n + 1) * A[0])
        if self.kind == "sphere_product":
            return int(2 * A.sum())
        return 0

    def kahler_pairing(self, A) -> float:
        A = self._check_class(A)
        if self.kind == "flat_torus":
            w1, w2 = (complex(c) for c in self.lattice)
            return float(abs((np.conj(w1) * w2).imag) * A.sum())
        return float(4.0 * np.pi * A.sum())

    # -- metric -----------------------------------------------------------
    def hermitian_metric(self, w):
        """M_{jk} = <d/dw_j, d/dw_k>, shape (n, n, *pts); w has shape (n, *pts)."""
        n = self.n
        pts = jets.value(w).shape[1:]
        eye = np.eye(n).reshape((n, n) + (1,) * len(pts))
        if self.kind == "flat_torus":
            return 0.5 * np.broadcast_to(eye, (n, n) + pts).astype(complex)
        if self.kind == "sphere_product":
            diag = 2.0 / (1.0 + jets.abs2(w)) ** 2
            return eye * diag[None] if not isinstance(diag, Jet) else diag[None] * eye
        s = 1.0 + _jsum0(jets.abs2(w))
        outer = w[:, None] * jets.conj(w)[None, :]
        return 2.0 * (s[None, None] * eye - outer) / (s * s)[None, None]

    def christoffel(self, w):
        """Gamma^k_{ij} at array points, shape (n, n, n, *pts) indexed [k, i, j]."""
        w = np.asarray(jets.value(w), dtype=complex)
        n = self.n
        pts = w.shape[1:]
        G = np.zeros((n, n, n) + pts, dtype=complex)
        if self.kind == "flat_torus":
            return G
        wb = np.conj(w)
        if self.kind == "sphere_product":
            for k in range(n):
                G[k, k, k] = -2.0 * wb[k] / (1.0 + np.abs(w[k]) ** 2)
            return G
        s = 1.0 + (np.abs(w) ** 2).sum(0)
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    val = 0.0
                    if i == k:
                        val = val + wb[j]
                    if j == k:
                        val = val + wb[i]
                    G[k, i, j] = -val / s
        return G

    def dbar_christoffel(self, w):
        """d Gamma^k_{ij} / d wbar_l, shape (n, n, n, n, *pts) indexed [k, i, j, l]."""
        w = np.asarray(jets.value(w), dtype=complex)
        n = self.n
        pts = w.shape[1:]
        D = np.zeros((n, n, n, n) + pts, dtype=complex)
        if self.kind == "flat_torus":
            return D
        wb = np.conj(w)
        if self.kind == "sphere_product":
            for k in range(n):
                D[k, k, k, k] = -2.0 / (1.0 + np.abs(w[k]) ** 2) ** 2
            return D
        s = 1.0 + (np.abs(w) ** 2).sum(0)
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    for l in range(n):
                        val = 0.0
                        if i == k and j == l:
                            val = val - 1.0 / s
                        if j == k and i == l:
                            val = val - 1.0 / s
                        lin = 0.0
                        if i == k:
                            lin = lin + wb[j]
                        if j == k:
                            lin = lin + wb[i]
                        D[k, i, j, l] = val + lin * w[l] / s**2
        return D

    def curvature_operator(self, w, X, Y):
        """Matrix of R(X, Y) acting on (1,0) components, shape (n, n, *pts).

        X and Y are holomorphic component vectors of real tangent vectors.
        """
        D = self.dbar_christoffel(w)
        X = np.asarray(X)
        Y = np.asarray(Y)
        # (Xbar_l Y_i - Ybar_l X_i) contracted with D[k, i, j, l]
        XY = np.einsum("l...,i...->il...", np.conj(X), Y) - np.einsum("l...,i...->il...", np.conj(Y), X)
        return np.einsum("kijl...,il...->kj...", D, XY)

    def real_metric(self, w):
        """Real 2n x 2n metric in the coordinate frame (x_1, y_1, ...)."""
        M = np.asarray(jets.value(self.hermitian_metric(w)))
        basis = self.real_basis()
        n2 = 2 * self.n
        pts = M.shape[2:]
        G = np.zeros((n2, n2) + pts)
        for a in range(n2):
            for b in range(n2):
                G[a, b] = 2.0 * np.real(np.einsum("j,jk...,k->...", np.conj(basis[a]), M, basis[b]))
        return G

    def real_basis(self):
        """Holomorphic components of the real coordinate vectors (x_1, y_1, ...)."""
        n = self.n
        B = np.zeros((2 * n, n), dtype=complex)
        for k in range(n):
            B[2 * k, k] = 1.0
            B[2 * k + 1, k] = 1j
        return B

    @staticmethod
    def to_real(zeta):
        """Holomorphic components -> real coordinate components (interleaved)."""
        zeta = np.asarray(zeta)
        out = np.empty((2 * zeta.shape[0],) + zeta.shape[1:], dtype=float)
        out[0::2] = zeta.real
        out[1::2] = zeta.imag
        return out

    @staticmethod
    def from_real(u):
        u = np.asarray(u)
        return u[0::2] + 1j * u[1::2]

    def inner(self, w, X, Y):
        """Riemannian inner product g(X, Y) of real vectors given by holomorphic components."""
        M = np.asarray(jets.value(self.hermitian_metric(w)))
        return 2.0 * np.real(np.einsum("j...,jk...,k...->...", np.conj(X), M, Y))

    def complex_structure(self, zeta):
        return 1j * np.asarray(zeta)

    def omega(self, w, X, Y):
        """Kähler form omega(X, Y) = g(JX, Y)."""
        return self.inner(w, self.complex_structure(X), Y)

    def real_christoffel(self, w):
        """Levi-Civita symbols Gamma^a_{bc} in the real coordinate frame, shape (2n, 2n, 2n, *pts)."""
        G = self.christoffel(w)
        B = self.real_basis()
        n2 = 2 * self.n
        pts = G.shape[3:]
        out = np.zeros((n2, n2, n2) + pts)
        for b in range(n2):
            for c in range(n2):
                zeta = np.einsum("kij...,i,j->k...", G, B[b], B[c])
                out[:, b, c] = self.to_real(zeta)
        return out

    def curvature_endomorphism(self, w):
        """R^i_{jml} with R(y_m, y_l) y_j = sum_i R^i_{jml} y_i, shape (2n,)*4 + pts."""
        B = self.real_basis()
        n2 = 2 * self.n
        w = np.asarray(jets.value(w), dtype=complex)
        pts = w.shape[1:]
        out = np.zeros((n2,) * 4 + pts)
        ones = np.ones(pts)
        for m in range(n2):
            for l in range(n2):
                Om = self.curvature_operator(w, B[m][:, None] * ones if pts else B[m], B[l][:, None] * ones if pts else B[l])
                for j in range(n2):
                    zeta = np.einsum("kj...,j->k...", Om, B[j])
                    out[:, j, m, l] = self.to_real(zeta)
        return out

    # -- charts -------------------------------------------------------------
    def chart_transition(self, w, source: int, target: int):
        """Affine chart change on CP^n; charts indexed by the nonvanishing homogeneous coordinate."""
        if self.kind != "fubini_study":
            if source != target:
                raise DomainError("flat and product targets use a single chart per factor here")
            return w
        w = np.asarray(w, dtype=complex)
        pts = w.shape[1:]
        X = np.empty((self.n + 1,) + pts, dtype=complex)
        X[np.arange(self.n + 1) != source] = w
        X[source] = 1.0
        if np.any(np.abs(X[target]) < 1e-300):
            raise DomainError("point not in target chart")
        return (X / X[target])[np.arange(self.n + 1) != target]

    def chart_jacobian(self, w, source: int, target: int, h=None):
        """Complex Jacobian d(w')/d(w) of the chart change (exact, via jets)."""
        w = np.asarray(w, dtype=complex)
        n = self.n
        J = np.zeros((n, n) + w.shape[1:], dtype=complex)
        for i in range(n):
            # holomorphic derivative along w_i via a jet in the x-direction of w_i
            X, Y = Jet.coordinates(np.zeros(w.shape[1:]), np.zeros(w.shape[1:]))
            comps = [Jet(w[k]) + (X if k == i else 0.0) for k in range(n)]
            out = self._transition_jet(comps, source, target)
            for k in range(n):
                J[k, i] = out[k].d[..., 0]
        return J

    def _transition_jet(self, comps, source, target):
        one = comps[0] * 0.0 + 1.0
        X = list(comps)
        X.insert(source, one)
        den = X[target]
        return [X[k] / den for k in range(self.n + 1) if k != target]


def riemannian_gauss_curvature(target: KahlerTarget, w):
    """Sectional curvature of the (x_1, y_1) plane."""
    B = target.real_basis()
    Xv, Yv = B[0], B[1]
    w = np.asarray(w, dtype=complex)
    pts = w.shape[1:]
    ones = np.ones(pts)
    X = Xv[:, None] * ones if pts else Xv
    Y = Yv[:, None] * ones if pts else Yv
    Om = target.curvature_operator(w, X, Y)
    RXYY = np.einsum("kj...,j...->k...", Om, Y)
    num = target.inner(w, RXYY, X)
    den = target.inner(w, X, X) * target.inner(w, Y, Y) - target.inner(w, X, Y) ** 2
    return num / den


def curvature_at(target: KahlerTarget, w):
    """Fully covariant curvature components R_{ijml} = g(R(y_m, y_l) y_j, y_i).

    ``w`` holds the holomorphic coordinates of a single point (shape (n,)).
    The endomorphism form is available from ``KahlerTarget.curvature_endomorphism``.
    """
    w = np.asarray(w, dtype=complex).reshape(target.n)
    Rup = target.curvature_endomorphism(w)
    G = target.real_metric(w)
    return np.einsum("ai,ijml->ajml", G, Rup)


def kahler_pairing(target: KahlerTarget, A) -> float:
    return target.kahler_pairing(A)
