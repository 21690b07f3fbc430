import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dhl import jets
from dhl.jets import Jet

coords = st.floats(-1.5, 1.5, allow_nan=False)


def test_symbolic_derivatives_and_laplacian():
    # f = x^2 y + sin(x) y^3, derivatives written out by hand
    x = np.array([0.3, -0.7, 1.1])
    y = np.array([0.5, 0.2, -0.9])
    X, Y = Jet.coordinates(x, y)
    f = X * X * Y + jets.sin(X) * Y**3
    assert np.allclose(f.dx, 2 * x * y + np.cos(x) * y**3, atol=1e-14)
    assert np.allclose(f.dy, x**2 + 3 * np.sin(x) * y**2, atol=1e-14)
    assert np.allclose(f.h[..., 0], 2 * y - np.sin(x) * y**3, atol=1e-14)
    assert np.allclose(f.h[..., 1], 2 * x + 3 * np.cos(x) * y**2, atol=1e-14)
    assert np.allclose(f.laplacian(), 2 * y - np.sin(x) * y**3 + 6 * np.sin(x) * y, atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_wirtinger_derivatives_of_powers(k):
    z = np.array([0.4 + 0.3j, -1.2 + 0.1j])
    X, Y = Jet.coordinates(z.real, z.imag)
    Z = X + 1j * Y
    P = Z**k
    assert np.allclose(P.dz(), k * z ** (k - 1), atol=1e-13)
    assert np.allclose(P.dzbar(), 0, atol=1e-13)
    assert np.allclose(jets.conj(P).dzbar(), np.conj(k * z ** (k - 1)), atol=1e-13)


def _fd(fn, x, y, h=1e-5):
    gx = (fn(x + h, y) - fn(x - h, y)) / (2 * h)
    gy = (fn(x, y + h) - fn(x, y - h)) / (2 * h)
    return gx, gy


@settings(max_examples=40, deadline=None)
@given(coords, coords)
def test_composite_matches_finite_differences(x, y):
    def build(X, Y):
        s = 1.0 + X * X + Y * Y
        return jets.rpow(s, -1.5) * jets.exp(0.3 * X) + jets.log(s) / (2.0 + jets.cos(Y))

    def plain(a, b):
        s = 1.0 + a * a + b * b
        return s**-1.5 * np.exp(0.3 * a) + np.log(s) / (2.0 + np.cos(b))

    X, Y = Jet.coordinates(np.array(x), np.array(y))
    J = build(X, Y)
    gx, gy = _fd(plain, x, y)
    assert abs(J.dx - gx) < 1e-8
    assert abs(J.dy - gy) < 1e-8
    hx = (plain(x + 1e-4, y) - 2 * plain(x, y) + plain(x - 1e-4, y)) / 1e-8
    assert abs(J.h[..., 0] - hx) < 1e-5


def test_indexing_and_stack_keep_derivatives():
    X, Y = Jet.coordinates(np.array([0.1, 0.2]), np.array([0.3, 0.4]))
    S = jets.stack([X, Y * 2.0])
    assert S.shape == (2, 2)
    assert np.allclose(S[1].dy, 2.0)
    assert np.allclose(S[0].dx, 1.0)
    assert np.allclose(jets.value(S), [[0.1, 0.2], [0.6, 0.8]])
