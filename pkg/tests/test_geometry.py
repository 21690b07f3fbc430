import numpy as np
import pytest

from dhl.errors import DomainError, UnsupportedClassError
from dhl.geometry import KahlerTarget, Surface, curvature_at, riemannian_gauss_curvature
from dhl.quadrature import global_rule

TARGETS = [KahlerTarget.fubini_study(1), KahlerTarget.fubini_study(2), KahlerTarget.sphere_product(2),
           KahlerTarget.flat_torus(1)]


def _G(T, u):
    w = T.from_real(u)[:, None]
    return T.real_metric(w)[..., 0]


def _dG(T, u, h=1e-3):
    """Richardson-extrapolated central differences of the real metric, indexed [c, a, b]."""
    out = []
    for c in range(u.size):
        e = np.zeros(u.size)
        e[c] = 1.0

        def D(s):
            return (_G(T, u + s * e) - _G(T, u - s * e)) / (2 * s)

        out.append((4 * D(h / 2) - D(h)) / 3)
    return np.array(out)


def _levi_civita(T, u):
    G = _G(T, u)
    dG = _dG(T, u)
    Gi = np.linalg.inv(G)
    # Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)
    t = np.einsum("bdc->dbc", dG) + np.einsum("cdb->dbc", dG) - dG
    return 0.5 * np.einsum("ad,dbc->abc", Gi, t)


def _real_gamma(T, u):
    return T.real_christoffel(T.from_real(u)[:, None])[..., 0]


@pytest.mark.parametrize("T", TARGETS, ids=lambda t: f"{t.kind}{t.n}")
def test_christoffel_matches_levi_civita_oracle(T):
    rng = np.random.default_rng(1)
    for _ in range(3):
        u = rng.uniform(-0.8, 0.8, 2 * T.n)
        assert np.allclose(_real_gamma(T, u), _levi_civita(T, u), atol=1e-8)


@pytest.mark.parametrize("T", TARGETS, ids=lambda t: f"{t.kind}{t.n}")
def test_metric_and_complex_structure_are_parallel(T):
    u = np.linspace(-0.6, 0.5, 2 * T.n)
    G = _G(T, u)
    dG = _dG(T, u)
    Gam = _real_gamma(T, u)
    # (nabla_c g)_ab = d_c g_ab - Gamma^d_ca g_db - Gamma^d_cb g_ad
    nab_g = dG - np.einsum("dca,db->cab", Gam, G) - np.einsum("dcb,ad->cab", Gam, G)
    assert np.max(np.abs(nab_g)) < 1e-8
    J = np.zeros((2 * T.n, 2 * T.n))
    for k in range(T.n):
        J[2 * k + 1, 2 * k] = 1.0
        J[2 * k, 2 * k + 1] = -1.0
    for c in range(2 * T.n):
        assert np.allclose(Gam[:, c, :] @ J, J @ Gam[:, c, :], atol=1e-12)


@pytest.mark.parametrize("T", TARGETS[:3], ids=lambda t: f"{t.kind}{t.n}")
def test_curvature_matches_christoffel_derivatives(T):
    u = np.linspace(-0.4, 0.6, 2 * T.n)
    n2 = 2 * T.n
    h = 1e-4
    dGam = []
    for c in range(n2):
        e = np.zeros(n2)
        e[c] = h
        dGam.append((_real_gamma(T, u + e) - _real_gamma(T, u - e)) / (2 * h))
    dGam = np.array(dGam)  # [c, a, b, d] = d_c Gamma^a_bd
    Gam = _real_gamma(T, u)
    # R(d_c, d_d) d_b = (d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb) d_a
    R = (np.einsum("cadb->abcd", dGam) - np.einsum("dacb->abcd", dGam)
         + np.einsum("ace,edb->abcd", Gam, Gam) - np.einsum("ade,ecb->abcd", Gam, Gam))
    Rcode = T.curvature_endomorphism(T.from_real(u)[:, None])[..., 0]
    assert np.allclose(Rcode, R, atol=1e-7)


def test_fubini_study_holomorphic_sectional_curvature_is_constant():
    rng = np.random.default_rng(3)
    for n in (1, 2):
        T = KahlerTarget.fubini_study(n)
        w = rng.normal(size=(n, 5)) + 1j * rng.normal(size=(n, 5))
        assert np.allclose(riemannian_gauss_curvature(T, w), 1.0, atol=1e-12)


def test_covariant_curvature_symmetries():
    T = KahlerTarget.fubini_study(2)
    R = curvature_at(T, np.array([0.3 - 0.2j, 0.1 + 0.5j]))
    assert np.allclose(R, -np.swapaxes(R, 0, 1), atol=1e-13)
    assert np.allclose(R, -np.swapaxes(R, 2, 3), atol=1e-13)
    assert np.allclose(R, np.transpose(R, (2, 3, 0, 1)), atol=1e-13)
    bianchi = R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))
    assert np.max(np.abs(bianchi)) < 1e-13


def test_chart_transition_is_an_isometry():
    T = KahlerTarget.fubini_study(2)
    w = np.array([[0.4 + 0.1j], [-0.3 + 0.7j]])
    w2 = T.chart_transition(w, 0, 1)
    back = T.chart_transition(w2, 1, 0)
    assert np.allclose(back, w, atol=1e-14)
    Jc = T.chart_jacobian(w, 0, 1)[..., 0]
    h = 1e-6
    for i in range(2):
        e = np.zeros((2, 1), dtype=complex)
        e[i] = h
        fd = (T.chart_transition(w + e, 0, 1) - T.chart_transition(w - e, 0, 1))[:, 0] / (2 * h)
        assert np.allclose(Jc[:, i], fd, atol=1e-8)
    M1 = T.hermitian_metric(w)[..., 0]
    M2 = T.hermitian_metric(w2)[..., 0]
    assert np.allclose(Jc.conj().T @ M2 @ Jc, M1, atol=1e-13)


def test_chart_transition_rejects_points_off_the_chart():
    T = KahlerTarget.fubini_study(2)
    with pytest.raises(DomainError):
        T.chart_transition(np.array([[0.0], [1.0]]), 0, 1)


def test_class_pairings():
    assert KahlerTarget.fubini_study(1).c1_pairing((3,)) == 6
    assert KahlerTarget.fubini_study(2).c1_pairing((1,)) == 3
    assert KahlerTarget.fubini_study(2).kahler_pairing((1,)) == pytest.approx(4 * np.pi)
    assert KahlerTarget.flat_torus(1).c1_pairing((1,)) == 0
    assert KahlerTarget.flat_torus(1).kahler_pairing((1,)) == pytest.approx(1.0)
    with pytest.raises(UnsupportedClassError):
        KahlerTarget.fubini_study(1).c1_pairing((1, 1))


@pytest.mark.parametrize("radius", [1.0, 2.5])
def test_sphere_area_and_curvature(radius):
    S = Surface.round_sphere(radius)
    rule = global_rule(S, 48)
    assert rule.integrate(np.ones(rule.points.size)) == pytest.approx(S.area(), rel=1e-12)
    assert S.area() == pytest.approx(4 * np.pi * radius**2)
    # Gauss curvature -Delta log(lambda) / lambda^2 from jets
    from dhl import jets
    from dhl.fields import chart_jets

    z = np.array([0.3 + 0.4j, -1.2 + 0.5j])
    X, Y, Z = chart_jets(z)
    lam = S.conformal_factor(Z)
    K = -jets.log(lam).laplacian() / lam.v**2
    assert np.allclose(K, S.gauss_curvature(z), atol=1e-12)
    assert np.allclose(jets.log(lam).dz(), S.log_lambda_dz(z), atol=1e-14)


def test_torus_domain_and_area():
    S = Surface.flat_torus()
    assert S.is_square_torus
    assert S.area() == pytest.approx(1.0)
    rule = global_rule(S, 16)
    assert rule.integrate(np.ones(rule.points.size)) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DomainError):
        S.conformal_factor(np.array([2.0 + 0.2j]), "fundamental")
    assert not Surface.flat_torus((1.0, 0.3 + 1.1j)).is_square_torus
