import numpy as np
import pytest

from dhl import constructions as C, operators as op
from dhl.errors import UnsupportedDecompositionError
from dhl.geometry import Surface
from dhl.spinc import LineTwist
from dhl.suites import sample_points

S = Surface.round_sphere()


def test_selector_parsing():
    assert C.parse_selector("prime+dprime") == ("prime", "dprime")
    assert C.parse_selector("dprime* + prime") == ("dprime*", "prime")
    for bad in ("prime+prime*", "dprime+dprime*", "prime", "prime+dprime+prime*", "foo+dprime"):
        with pytest.raises(ValueError):
            C.parse_selector(bad)


@pytest.mark.parametrize("d", [0, 1, 2, 3])
def test_space_dimensions_for_self_maps(d):
    f = C.power_map(d)
    L = LineTwist.trivial(S)
    # O(2d) and O(-2d): h0 = 2d + 1, h1(O(-2d)) = 2d - 1 (d >= 1)
    assert C.dirac_harmonic_space(f, L, "prime+dprime", 24).dims == (2 * d + 1, 1 if d == 0 else 0)
    assert C.dirac_harmonic_space(f, L, "prime*+dprime*", 24).dims == (0, max(2 * d - 1, 0))
    assert C.dirac_harmonic_space(f, L, "dprime*+prime", 24).dims == (max(2 * d - 1, 0), 2 * d + 1)


def test_basis_is_orthonormal():
    f = C.projective_line()
    L = LineTwist.spin_half(S)
    space = C.dirac_harmonic_space(f, L, "prime+dprime*", 24)
    from dhl.quadrature import global_rule

    rule = global_rule(S, 48)
    vals = [psi.values(rule.points) for psi in space.basis]
    G = np.array([[op.hermitian_l2(f, L, a, b, rule) for b in vals] for a in vals])
    assert np.allclose(G, np.eye(len(vals)), atol=1e-10)


def test_every_basis_spinor_is_dirac_harmonic_on_the_torus():
    f = C.torus_constant(2)
    z = sample_points(f.source, 20, np.random.default_rng(0))
    for sel in C.SELECTORS:
        space = C.dirac_harmonic_space(f, LineTwist.trivial(f.source), sel, 8)
        assert space.dims == (2, 2)
        for psi in space.basis:
            assert max(op.max_residual(op.el_residual(f, psi, z))) < 1e-12


def test_moduli_examples():
    for d in (1, 2, 3):
        mt = C.moduli_tangent(C.power_map(d), 24)
        assert mt.dim_complex == 2 * d + 1 and mt.regular
        assert mt.dim_real == mt.predicted_real
    line = C.moduli_tangent(C.projective_line(), 24)
    assert line.dim_complex == 5
    tor = C.moduli_tangent(C.torus_linear(), 8)
    assert not tor.regular and tor.obs == 1
    const = C.moduli_tangent(C.torus_constant(2), 8)
    assert const.obs == 2 and const.dim_complex == 2


def test_integer_identities():
    for A2, c1 in ((1, 3), (4, 6), (-1, 1)):
        assert C.adjunction_check(A2, c1)
    assert not C.adjunction_check(1, 2)
    assert C.twisted_rank(1, 1) == 9
    assert C.twisted_rank(1, 2) == 13
    with pytest.raises(ValueError):
        C.twisted_rank(1, 0)


def test_non_diagonal_splitting_rejected():
    f = C.projective_line()
    from dhl.fields import MapField
    from dhl import jets

    tilted = MapField(f.source, f.target, lambda X, Y, Z: jets.stack([Z, Z]), (1,), degrees=(2, 1))
    with pytest.raises(UnsupportedDecompositionError):
        C.piece_fields(tilted, LineTwist.trivial(S), "prime", 16)
