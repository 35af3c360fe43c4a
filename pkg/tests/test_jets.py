"""Forward-mode derivative machinery, checked against closed forms and
central finite differences."""

import numpy as np
import pytest

from ypqlab.jets import Jet, cos, eval_with_partials, seed_jets, sin, sqrt


def f_scalar(x):
    return sin(x[0] * x[0]) + x[1] / (2.0 + cos(x[0])) + sqrt(1.0 + x[1] * x[1])


def df_dx0(x):
    return 2 * x[0] * np.cos(x[0] ** 2) + x[1] * np.sin(x[0]) / (2 + np.cos(x[0])) ** 2


def test_first_derivatives_match_closed_form():
    x = [0.7, -0.4]
    _, grad = eval_with_partials(lambda z: [f_scalar(z)], x, order=1)
    assert grad[0, 0] == pytest.approx(df_dx0(x), rel=1e-14)
    d1 = 1.0 / (2 + np.cos(x[0])) + x[1] / np.sqrt(1 + x[1] ** 2)
    assert grad[1, 0] == pytest.approx(d1, rel=1e-14)


def test_second_derivatives_match_finite_differences():
    x = np.array([0.3, 0.9])
    _, _, hess = eval_with_partials(lambda z: [f_scalar(z)], list(x), order=2)
    h = 1e-5
    for i in range(2):
        for j in range(2):
            xpp = x.copy(); xpp[i] += h; xpp[j] += h
            xpm = x.copy(); xpm[i] += h; xpm[j] -= h
            xmp = x.copy(); xmp[i] -= h; xmp[j] += h
            xmm = x.copy(); xmm[i] -= h; xmm[j] -= h
            fd = (f_scalar(list(xpp)) - f_scalar(list(xpm))
                  - f_scalar(list(xmp)) + f_scalar(list(xmm))) / (4 * h * h)
            assert hess[i, j, 0] == pytest.approx(fd, abs=5e-6)


def test_arithmetic_identities():
    (j,) = seed_jets([1.3], order=2, nseeds=1)
    q = (j * j - 1.0) / (j + 2.0)
    # value and derivatives of (x^2-1)/(x+2) at 1.3
    x = 1.3
    assert q.v == pytest.approx((x * x - 1) / (x + 2))
    d = (x * x + 4 * x + 1) / (x + 2) ** 2
    assert q.g[0] == pytest.approx(d, rel=1e-14)
    p = j ** 3
    assert p.g[0] == pytest.approx(3 * x * x, rel=1e-14)


def test_jet_times_array_broadcasts_elementwise():
    (j,) = seed_jets([2.0], order=1, nseeds=1)
    arr = np.array([1.0, -3.0])
    out = j * arr
    assert out.shape == (2,)
    assert all(isinstance(o, Jet) for o in out)
    assert out[1].v == pytest.approx(-6.0)
    assert out[1].g[0] == pytest.approx(-3.0)


def test_nested_jets_give_third_derivatives():
    # d^3/dx^3 sin(x) = -cos(x), via a jet whose entries are jets
    x0 = 0.6
    (outer,) = seed_jets([x0], order=2, nseeds=1)
    (inner,) = seed_jets([outer], order=1, nseeds=1)
    val = sin(inner)
    third = val.g[0].h[0, 0]
    if isinstance(third, Jet):
        third = third.v
    assert third == pytest.approx(-np.cos(x0), rel=1e-13)


def test_shared_seed_space_offsets():
    a, = seed_jets([1.0], order=1, nseeds=3, offset=0)
    b, = seed_jets([2.0], order=1, nseeds=3, offset=1)
    prod = a * b
    np.testing.assert_allclose(prod.g, [2.0, 1.0, 0.0])
