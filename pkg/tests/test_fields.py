import numpy as np
import pytest

from dhl import constructions as C, jets
from dhl.errors import DegenerateMapError, RepresentationError, UnsupportedDecompositionError
from dhl.fields import (MapField, TwistedSpinorField, dbar_J, differential, pointwise_inner, pointwise_norm2,
                        pullback_connection, pullback_degrees)
from dhl.geometry import KahlerTarget, Surface
from dhl.spinc import LineTwist
from dhl.suites import corpus_maps, corpus_twists, random_poly_field, sample_points


def test_differential_examples():
    _, _, n2 = differential(C.power_map(0), np.array([0.2 + 0.1j]))
    assert np.allclose(n2, 0)
    _, _, n2 = differential(C.torus_linear(), np.array([0.3 + 0.4j]))
    assert np.allclose(n2, 2.0)
    # z^2 at z = 1 against central differences of the map values
    f = C.power_map(2)
    z0, h = 1.0 + 0j, 1e-5
    fx = (f(np.array([z0 + h])) - f(np.array([z0 - h]))) / (2 * h)
    fy = (f(np.array([z0 + 1j * h])) - f(np.array([z0 - 1j * h]))) / (2 * h)
    w = f(np.array([z0]))
    lam = f.source.conformal_factor(np.array([z0]))
    fd = (f.target.inner(w, fx, fx) + f.target.inner(w, fy, fy)) / lam**2
    _, _, n2 = differential(f, np.array([z0]))
    assert abs(n2[0] - fd[0]) < 1e-8


def test_dbar_J():
    z = np.array([0.3 + 0.2j, -0.6 + 0.4j, 1.3 - 0.9j])
    for f in (C.power_map(3), C.rational_map([1, -2, 0.5], [3, 1j]), C.projective_line()):
        _, nrm = dbar_J(f, z[np.abs(z) < 1.2])
        assert np.max(nrm) < 1e-13
    # chart-local conjugation
    conj = MapField(Surface.round_sphere(), KahlerTarget.fubini_study(1),
                    lambda X, Y, Z: jets.stack([jets.conj(Z)]), (-1,), name="conj")
    _, nrm = dbar_J(conj, z)
    _, _, n2 = differential(conj, z)
    assert np.allclose(nrm, np.sqrt(n2 / 2), atol=1e-13)
    # x + 0.1 sin(2 pi y): antilinear part 0.1 pi i cos(2 pi y), |.|_g = |.| for the flat metric
    g = C.torus_fourier_map({(0, 1): 0.1 / 2j, (0, -1): -0.1 / 2j})
    zt = np.array([0.1 + 0.2j, 0.5 + 0.7j])
    _, nrm = dbar_J(g, zt)
    assert np.allclose(nrm, 0.1 * np.pi * np.abs(np.cos(2 * np.pi * zt.imag)), atol=1e-13)


def test_pullback_connection_is_the_chern_connection():
    f = C.power_map(1)
    z0 = np.array([0.5 + 0j])
    h = 1e-5
    for V in ((1.0, 0.0), (0.0, 1.0), (0.6, -0.8)):
        A = pullback_connection(f, z0, V)[..., 0]
        dz = h * (V[0] + 1j * V[1])
        M = lambda zz: f.target.hermitian_metric(f(np.array([zz])))[..., 0]
        dM = (M(z0[0] + dz) - M(z0[0] - dz)) / (2 * h)
        Mv = M(z0[0])
        assert np.allclose(dM, A.conj().T @ Mv + Mv @ A, atol=1e-8)
    # the (0,1) part of the connection vanishes on holomorphic frames
    assert np.allclose(pullback_connection(f, z0, (0.5, 0.5j)), 0, atol=1e-14)
    assert np.allclose(pullback_connection(C.torus_linear(), np.array([0.3j]), (1, 0)), 0)
    assert np.allclose(pullback_connection(C.power_map(0), z0, (1, 0)), 0)


def test_pullback_degrees():
    assert pullback_degrees(C.power_map(3)) == (6,)
    assert pullback_degrees(C.projective_line()) == (2, 1)
    assert sum(pullback_degrees(C.projective_line())) == C.projective_line().c1A
    assert pullback_degrees(C.torus_linear()) == (0,)
    bare = MapField(Surface.round_sphere(), KahlerTarget.fubini_study(2), lambda X, Y, Z: jets.stack([Z, Z * Z]), (2,))
    with pytest.raises(UnsupportedDecompositionError):
        pullback_degrees(bare)


@pytest.mark.parametrize("d,e", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_class_of_composition_multiplies(d, e):
    comp = C.rational_map([0.0] * (d * e) + [1.0])
    assert comp.A == (d * e,)
    assert comp.c1A == 2 * d * e == C.power_map(d).c1A * C.power_map(e).A[0]


def test_chart_consistency_of_rational_maps():
    f = C.rational_map([1.0, -1.0], [2.0, 1.0])  # (1 - z) / (2 + z)
    z = np.array([0.7 + 0.4j, -0.5 + 1.1j, 1.5 - 0.3j])
    assert np.allclose(f(z), f(1.0 / z, "south"), atol=1e-12)
    g = C.power_map(3)
    assert np.allclose(g(z), g(1.0 / z, "south"), atol=1e-12)


def test_degenerate_maps():
    with pytest.raises(DegenerateMapError):
        C.rational_map([-1.0, 1.0], [-1.0, 0.0, 1.0])  # (z - 1) / (z^2 - 1)
    f = C.rational_map([1.0], [-0.5, 1.0])  # pole at 0.5 is handled by switching target charts
    assert C.scan_poles(f)
    with pytest.raises(DegenerateMapError):
        f.require_single_chart(np.array([0.5 + 0.01j]))


def test_representation_agreement():
    rng = np.random.default_rng(0)
    for f in corpus_maps((1, 2)):
        z = sample_points(f.source, 10, rng)
        for L in corpus_twists(f.source)[:2]:
            for sel in ("prime+dprime", "prime*+dprime*"):
                for psi in C.dirac_harmonic_space(f, L, sel, 24).basis:
                    a = psi.values(z)
                    for k, v in C.spectral_values(psi, z).items():
                        assert np.max(np.abs(a[k] - v)) <= 1e-8


def test_hermitian_pairing_conventions():
    rng = np.random.default_rng(2)
    f = C.projective_line()
    L = LineTwist.spin_half(f.source)
    a = random_poly_field(f, L, ("pp", "mm"), rng)
    b = random_poly_field(f, L, ("pp", "pm", "mm"), rng)
    z = np.array([0.2 + 0.3j, -0.4 + 0.1j])
    va, vb = a.values(z), b.values(z)
    ab = pointwise_inner(f, L, z, va, vb)
    ba = pointwise_inner(f, L, z, vb, va)
    assert np.allclose(ab, np.conj(ba))
    # antilinear in the first slot
    two_i = {k: 2j * v for k, v in va.items()}
    assert np.allclose(pointwise_inner(f, L, z, two_i, vb), -2j * ab)
    assert np.allclose(pointwise_inner(f, L, z, va, va).real, pointwise_norm2(f, L, z, va))
    assert np.all(pointwise_norm2(f, L, z, va) > 0)


def test_spinor_field_algebra():
    rng = np.random.default_rng(4)
    f = C.power_map(2)
    L = LineTwist.trivial(f.source)
    a = random_poly_field(f, L, ("pp",), rng)
    b = random_poly_field(f, L, ("pp", "mp"), rng)
    z = np.array([0.1 + 0.5j])
    s = (a + b).values(z)
    assert np.allclose(s["pp"], a.values(z)["pp"] + b.values(z)["pp"])
    assert np.allclose(b.scaled(3.0).values(z)["mp"], 3 * b.values(z)["mp"])
    assert np.allclose(b.restricted(("mp",)).values(z)["pp"], 0)
    other = random_poly_field(C.power_map(1), L, ("pp",), rng)
    with pytest.raises(RepresentationError):
        a + other
    with pytest.raises(RepresentationError):
        C.spectral_values(a, z)
    with pytest.raises(RepresentationError):
        TwistedSpinorField(f, L, {}).jets(z)
