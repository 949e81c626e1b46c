import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynamospec.fourier import AlphaProfile, FourierSpectrum, as_perturbation, fourier_coefficients, q_factor

coef = st.floats(-5, 5, allow_nan=False)
spectra = st.builds(
    lambda a0, ab: FourierSpectrum(a0, tuple((k + 1, a, b) for k, (a, b) in enumerate(ab))),
    coef, st.lists(st.tuples(coef, coef), min_size=1, max_size=5),
)
nonzero_j = st.integers(-30, 30).filter(lambda j: j != 0)


def _close(x: FourierSpectrum, y: FourierSpectrum, K: int, tol: float) -> bool:
    ax, bx = x.dense(K)
    ay, by = y.dense(K)
    return abs(x.a0 - y.a0) < tol and np.allclose(ax, ay, atol=tol) and np.allclose(bx, by, atol=tol)


def test_coefficient_examples():
    s = fourier_coefficients(lambda r: np.cos(4 * math.pi * r), 4)
    assert _close(s, FourierSpectrum(0.0, ((2, 1.0, 0.0),)), 4, 1e-12)
    s = fourier_coefficients(lambda r: np.ones_like(r), 2)
    assert _close(s, FourierSpectrum(2.0), 2, 1e-12)
    s = fourier_coefficients(lambda r: np.sin(2 * math.pi * r) + 0.5, 1)
    assert _close(s, FourierSpectrum(1.0, ((1, 0.0, 1.0),)), 1, 1e-12)


def test_k_range():
    with pytest.raises(ValueError):
        fourier_coefficients(np.sin, 0)
    with pytest.raises(ValueError):
        fourier_coefficients(np.sin, 65)


def test_q_examples():
    spec = FourierSpectrum(0.0, ((2, 1.0, 0.0),))
    assert q_factor(spec, 4) == 1.0
    assert q_factor(spec, 3) == 0.0
    assert q_factor(FourierSpectrum(0.0, ((1, 0.0, 1.0),)), 1) == pytest.approx(8 / (3 * math.pi), rel=1e-15)
    assert q_factor(FourierSpectrum(0.0, ((1, 0.0, 1.0),)), -3) == pytest.approx(-8 / (5 * math.pi))


def test_q_rejects_zero():
    with pytest.raises(ValueError):
        q_factor(FourierSpectrum(), 0)


@given(spectra, spectra, coef, coef, nonzero_j)
def test_q_linearity(x, y, al, be, j):
    lhs = q_factor(x.scaled(al) + y.scaled(be), j)
    rhs = al * q_factor(x, j) + be * q_factor(y, j)
    assert lhs == pytest.approx(rhs, abs=1e-10)


@given(spectra, nonzero_j)
def test_q_symmetry(spec, j):
    assert q_factor(spec, j) == q_factor(spec, -j)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_odd_j_decay(k):
    spec = FourierSpectrum(0.0, ((k, 0.0, 1.0),))
    for j in range(8 * k + 1, 8 * k + 40, 2):
        approx = 8 / math.pi * k / j**2
        assert abs(abs(q_factor(spec, j)) - approx) <= 0.1 * approx


@settings(max_examples=25, deadline=None)
@given(spectra)
def test_round_trip(spec):
    back = fourier_coefficients(spec, 8)
    assert _close(back, spec, 8, 1e-9)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        FourierSpectrum(0.0, ((0, 1.0, 0.0),))
    with pytest.raises(ValueError):
        FourierSpectrum(0.0, ((1, 1.0, 0.0), (1, 0.0, 1.0)))


def test_spectrum_evaluation():
    spec = FourierSpectrum(1.0, ((1, 2.0, 0.0), (3, 0.0, -1.0)))
    r = np.linspace(0.01, 0.99, 9)
    ref = 0.5 + 2 * np.cos(2 * math.pi * r) - np.sin(6 * math.pi * r)
    assert np.allclose(spec(r), ref, atol=1e-14)
    dref = -4 * math.pi * np.sin(2 * math.pi * r) - 6 * math.pi * np.cos(6 * math.pi * r)
    assert np.allclose(spec.derivative(r), dref, atol=1e-12)
    assert spec.max_k == 3 and spec.a(2) == 0.0 and spec.b(3) == -1.0


def test_profile_evaluation():
    prof = AlphaProfile(2.0, 0.5, FourierSpectrum(0.0, ((2, 1.0, 0.0),)))
    r = np.array([0.1, 0.3])
    assert np.allclose(prof(r), 2.0 + 0.5 * np.cos(4 * math.pi * r))
    assert prof.max_mode == 4
    assert prof.delta_spectrum().a(2) == 0.5
    assert prof.with_alpha0(1.0).alpha0 == 1.0 and prof.with_scale(2.0).epsilon_scale == 2.0


def test_sampled_profile_spline():
    grid = np.linspace(0, 1, 201)
    prof = AlphaProfile(0.0, 1.0, samples=tuple(np.sin(2 * math.pi * grid)))
    spec = prof.spectrum(4)
    assert spec.b(1) == pytest.approx(1.0, abs=1e-5)
    assert abs(spec.a(1)) < 1e-5 and abs(spec.b(2)) < 1e-5


def test_sampled_profile_linear():
    prof = AlphaProfile(samples=(0.0, 1.0, 2.0, 3.0), interpolate=False)
    assert prof.phi(0.5) == pytest.approx(1.5)
    assert prof.dphi(0.5) == pytest.approx(3.0)


def test_sample_validation():
    with pytest.raises(ValueError):
        AlphaProfile(samples=(1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        AlphaProfile(samples=(1.0, 2.0, 3.0, math.nan))
    with pytest.raises(ValueError):
        AlphaProfile(fourier=FourierSpectrum(), samples=(1.0, 2.0, 3.0, 4.0))


def test_as_perturbation():
    f, m = as_perturbation(FourierSpectrum(0.0, ((3, 1.0, 0.0),)))
    assert m == 6
    f, m = as_perturbation(np.cos)
    assert m == 0
    with pytest.raises(TypeError):
        as_perturbation(3.0)
