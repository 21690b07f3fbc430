import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dhl.errors import IncompatibilityError, InvalidFrameError
from dhl.geometry import Surface
from dhl.spinc import (LineTwist, SpinorFiber, clifford_matrix, clifford_mul, clifford_mul_frame, spinor_bundle,
                       twist, volume_action)

real = st.floats(-3, 3, allow_nan=False)
fiber = st.builds(lambda a, b, c, d: SpinorFiber(complex(a, b), complex(c, d)), real, real, real, real)


@settings(max_examples=100, deadline=None)
@given(real, real, real, real, fiber)
def test_clifford_relation(a, b, c, d, s):
    v, w = (a, b), (c, d)
    lhs = clifford_mul(v, clifford_mul(w, s)).as_array() + clifford_mul(w, clifford_mul(v, s)).as_array()
    assert np.allclose(lhs, -2 * (a * c + b * d) * s.as_array(), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(real, real, fiber)
def test_chirality_is_exchanged(a, b, s):
    out = clifford_mul((a, b), SpinorFiber(s.plus, 0))
    assert out.plus == 0
    out = clifford_mul((a, b), SpinorFiber(0, s.minus))
    assert out.minus == 0


@settings(max_examples=50, deadline=None)
@given(fiber)
def test_volume_form_is_e1_e2(s):
    assert np.allclose(clifford_mul((1, 0), clifford_mul((0, 1), s)).as_array(), volume_action(s).as_array(),
                       atol=1e-14)
    assert np.allclose(volume_action(volume_action(s)).as_array(), -s.as_array())


def test_unit_vectors_square_to_minus_one():
    s = SpinorFiber(0.3 - 1j, 2.0 + 0.5j)
    for v in ((1, 0), (0, 1)):
        assert np.allclose(clifford_mul(v, clifford_mul(v, s)).as_array(), -s.as_array())
    assert np.allclose(volume_action(SpinorFiber(1, 0)).as_array(), [-1j, 0])
    assert np.allclose(volume_action(SpinorFiber(0, 1)).as_array(), [0, 1j])


def test_clifford_matrix_is_skew_hermitian_for_real_vectors():
    C = clifford_matrix(0.7, -1.3)
    assert np.allclose(C.conj().T, -C)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 2 * np.pi), st.floats(0.2, 3.0), real, real, fiber)
def test_frame_version_agrees_with_unit_frame(theta, scale, a, b, s):
    # a conformal frame rotated by theta; the product only depends on the vector
    e1 = scale * np.array([np.cos(theta), np.sin(theta)])
    e2 = scale * np.array([-np.sin(theta), np.cos(theta)])
    v = np.array([a, b]) * scale**2
    # components relative to the normalized frame
    ca, cb = np.dot(v, e1) / scale**2, np.dot(v, e2) / scale**2
    out = clifford_mul_frame(v, s, e1, e2).as_array()
    assert np.allclose(out, clifford_mul((ca, cb), s).as_array(), atol=1e-10)


def test_degenerate_frame_rejected():
    with pytest.raises(InvalidFrameError):
        clifford_mul_frame((1, 0), SpinorFiber(1, 0), np.zeros(2), np.array([0, 1.0]))


def test_twist_degrees_and_windings():
    S = Surface.round_sphere()
    assert LineTwist.trivial(S).degree == 0
    assert LineTwist.spin_half(S).degree == -1
    assert LineTwist.canonical_power(S, -1).degree == 2
    assert LineTwist.canonical_power(S, -2).degree == 4
    for L in (LineTwist.trivial(S), LineTwist.spin_half(S), LineTwist.canonical_power(S, -2),
              LineTwist.canonical_power(S, 1)):
        assert L.transition_winding() == L.degree
    assert twist(spinor_bundle(S), LineTwist.spin_half(S)).degrees == (-1, 1)
    T = Surface.flat_torus()
    assert LineTwist.spin_half(T).degree == 0
    assert twist(spinor_bundle(T), LineTwist.canonical_power(T, -2)).degrees == (0, 0)


def test_frame_norm_matches_metric_power():
    S = Surface.round_sphere()
    lam = np.array([0.5, 1.0, 2.0])
    assert np.allclose(LineTwist.canonical_power(S, -1).frame_norm2(lam), lam**2 / 2)
    assert np.allclose(LineTwist.spin_half(S).frame_norm2(lam), (lam**2 / 2) ** -0.5)
    z = np.array([0.3 + 0.1j])
    assert np.allclose(LineTwist.canonical_power(S, -1).connection_dz(z), 2 * S.log_lambda_dz(z))


def test_twist_on_other_surface_rejected():
    with pytest.raises(IncompatibilityError):
        twist(spinor_bundle(Surface.round_sphere()), LineTwist.trivial(Surface.flat_torus()))
