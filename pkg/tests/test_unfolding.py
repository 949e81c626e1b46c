import math

import numpy as np
import pytest

from dynamospec.fourier import AlphaProfile, FourierSpectrum, q_factor
from dynamospec.mesh import dp_from_node_l0, enumerate_dps, make_dp
from dynamospec.specfun import bessel_zero
from dynamospec.unfolding import (Classification, Regime, classify_intersection, critical_offset_l0,
                                  critical_profile_residual_l0, element_matrix, ep_offset_estimate_l0,
                                  gradient_g, lambda1_l0, perturb_matrix_element, unfold_dp)

PI = math.pi
SIN1 = FourierSpectrum(0.0, ((1, 0.0, 1.0),))


def spec(a0=0.0, **h):
    """``spec(a0, a2=1.0, b1=0.5)`` style constructor."""
    ks = sorted({int(name[1:]) for name in h})
    return FourierSpectrum(a0, tuple((k, h.get(f"a{k}", 0.0), h.get(f"b{k}", 0.0)) for k in ks))


def test_gradient_examples():
    r = np.linspace(0.01, 1.0, 17)
    assert np.allclose(gradient_g(0, 1, 1, r), PI, atol=1e-12)
    for l in range(4):
        for n in (1, 2, -3):
            assert gradient_g(l, n, n, 1.0) == pytest.approx(bessel_zero(l, abs(n)).sqrt_rho, rel=1e-9)
    k1, k2 = bessel_zero(1, 1).sqrt_rho, bessel_zero(1, 2).sqrt_rho
    assert abs(gradient_g(1, 1, 2, 1.0)) == pytest.approx(math.sqrt(k1 * k2), rel=1e-9)


def test_gradient_l0_closed_form():
    r = np.linspace(0.05, 0.95, 11)
    for m in (1, 2, -3, 4):
        for n in (1, -2, 5):
            ref = PI * math.sqrt(abs(m * n)) * np.cos((abs(m) - abs(n)) * PI * r)
            if m * n < 0:
                ref = PI * math.sqrt(abs(m * n)) * np.cos((abs(m) + abs(n)) * PI * r)
            assert np.allclose(gradient_g(0, m, n, r), ref, atol=1e-10)


def test_gradient_domain():
    with pytest.raises(ValueError):
        gradient_g(0, 1, 1, 0.0)
    with pytest.raises(ValueError):
        gradient_g(0, 1, 1, 1.5)


def test_element_examples():
    cos4 = spec(a2=1.0)
    assert perturb_matrix_element(0, 1, 5, cos4).value == pytest.approx(PI * math.sqrt(5) / 2, abs=1e-12)
    assert perturb_matrix_element(0, 2, 2, spec(2.0)).value == pytest.approx(2 * PI, abs=1e-12)


@pytest.mark.parametrize("l,m,n", [(1, 1, 2), (0, 2, -3), (2, -1, 3), (3, 2, 2)])
@pytest.mark.parametrize("phi", [spec(2.0), spec(0.3, a1=1.0, b2=-0.7)])
def test_three_forms_agree(l, m, n, phi):
    prof = AlphaProfile(0.0, 1.0, phi)
    vals = [perturb_matrix_element(l, m, n, prof, form=f).value
            for f in ("gradient", "second_derivative", "operator")]
    assert max(vals) - min(vals) < 1e-8


def test_unknown_form():
    with pytest.raises(ValueError):
        perturb_matrix_element(0, 1, 2, SIN1, form="bogus")
    with pytest.raises(TypeError):
        perturb_matrix_element(0, 1, 2, lambda r: r, form="operator")


def test_element_symmetry():
    phi = spec(0.2, a1=0.5, b3=1.0)
    for l in (0, 2):
        P = element_matrix(l, [3, 1, -1, -2], phi)
        assert np.array_equal(P, P.T)
        assert perturb_matrix_element(l, 1, -2, phi).value == perturb_matrix_element(l, -2, 1, phi).value


def test_l0_elements_match_closed_form():
    phi = spec(0.4, a1=0.3, a2=-1.1, b1=0.8, b2=0.25)
    states = [5, 3, 2, 1, -1, -2, -4]
    P = element_matrix(0, states, phi)
    for i, m in enumerate(states):
        for j, n in enumerate(states):
            q = phi.a0 if m == n else q_factor(phi, m - n)
            assert P[i, j] == pytest.approx(0.5 * PI * math.sqrt(abs(m * n)) * q, abs=1e-9)


def test_unfold_sine_example():
    dp = dp_from_node_l0(1, -3)
    res = unfold_dp(dp, SIN1)
    target = PI / 4 * 2 * math.sqrt(2) * 8 / (5 * PI)
    assert res.regime is Regime.COMPLEX
    assert res.lambda1_plus.imag == pytest.approx(target, rel=1e-12)
    assert abs(res.lambda1_plus.real) < 1e-12
    assert res.lambda1_minus == res.lambda1_plus.conjugate()
    # frozen: the ray is the Krein-neutral direction (1, +-i)
    assert res.ray_ratio_plus == pytest.approx(1j, abs=1e-12)
    assert res.ray_ratio_minus == pytest.approx(-1j, abs=1e-12)
    assert res.eigenvalues[0] == pytest.approx(dp.lambda_node + target * 1j)


def test_same_type_always_real():
    rng = np.random.default_rng(7)
    for l in (0, 1):
        for dp in [d for d in enumerate_dps(l, 5) if d.same_type][:12]:
            phi = FourierSpectrum.from_arrays(rng.normal(), rng.normal(size=3), rng.normal(size=3))
            res = unfold_dp(dp, phi)
            assert res.regime is Regime.REAL
            assert res.lambda1_plus.imag == 0 and res.lambda1_minus.imag == 0
            assert classify_intersection(l, dp, phi) is Classification.REAL


def test_zero_perturbation_is_marginal():
    res = unfold_dp(dp_from_node_l0(1, -3), FourierSpectrum())
    assert res.regime is Regime.MARGINAL
    assert res.lambda1_plus == 0 and res.lambda1_minus == 0
    assert res.ray_ratio_plus is None
    assert classify_intersection(0, dp_from_node_l0(1, -3), FourierSpectrum()) is Classification.MARGINAL


def test_trace_is_real_and_conjugate_pairs():
    rng = np.random.default_rng(3)
    for dp in enumerate_dps(1, 4):
        phi = FourierSpectrum.from_arrays(rng.normal(), rng.normal(size=2), rng.normal(size=2))
        res = unfold_dp(dp, phi)
        assert abs((res.lambda1_plus + res.lambda1_minus).imag) < 1e-12
        if res.regime is Regime.COMPLEX:
            assert res.lambda1_minus == res.lambda1_plus.conjugate()
            assert res.lambda1_plus.imag != 0


def test_matches_l0_closed_form_shifts():
    phi = spec(0.3, a2=0.7, b1=1.0, b3=-0.4)
    for dp in enumerate_dps(0, 6):
        res = unfold_dp(dp, phi)
        ref = lambda1_l0(dp.n, dp.j, phi.a0, q_factor(phi, dp.j))
        got = sorted([res.lambda1_plus, res.lambda1_minus], key=lambda z: (z.real, z.imag))
        ref = sorted(ref, key=lambda z: (z.real, z.imag))
        assert np.allclose(got, ref, atol=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_j_minus_2n_special_case(n):
    dp = dp_from_node_l0(n, -2 * n)
    for a0, an in [(0.5, 1.0), (2.0, 0.7)]:
        phi = FourierSpectrum(a0, ((n, an, 0.0),))
        res = unfold_dp(dp, phi)
        expect = PI / 2 * n * np.sqrt(complex(a0 * a0 - an * an))
        assert sorted([abs(res.lambda1_plus), abs(res.lambda1_minus)]) == pytest.approx([abs(expect)] * 2)
        assert abs(res.lambda1_plus - expect) < 1e-9 or abs(res.lambda1_plus + expect) < 1e-9


def test_coalescence_at_critical_offset():
    dp = dp_from_node_l0(1, -3)
    a0c = critical_offset_l0(1, -3, q_factor(SIN1, -3))
    for sign in (1, -1):
        res = unfold_dp(dp, FourierSpectrum(sign * a0c, SIN1.harmonics))
        assert res.regime is Regime.MARGINAL
        assert res.lambda1_plus == res.lambda1_minus
        assert res.ray_ratio_plus == res.ray_ratio_minus
    inside = unfold_dp(dp, FourierSpectrum(0.9 * a0c, SIN1.harmonics))
    outside = unfold_dp(dp, FourierSpectrum(1.1 * a0c, SIN1.harmonics))
    assert inside.regime is Regime.COMPLEX and outside.regime is Regime.REAL


def test_large_constant_unfolds_real():
    assert classify_intersection(0, dp_from_node_l0(1, -3), FourierSpectrum(20.0)) is Classification.REAL
    assert classify_intersection(0, dp_from_node_l0(1, -3), SIN1) is Classification.COMPLEX


def test_classify_level_check():
    with pytest.raises(ValueError):
        classify_intersection(1, dp_from_node_l0(1, -3), SIN1)


@pytest.mark.parametrize("c", [0.1, 2.0, 13.0])
def test_scaling(c):
    phi = spec(0.2, a1=0.4, b1=1.0)
    for dp in (dp_from_node_l0(1, -3), make_dp(1, 1, 2), make_dp(2, 1, -2)):
        base = unfold_dp(dp, phi)
        scaled = unfold_dp(dp, phi.scaled(c))
        assert scaled.lambda1_plus == pytest.approx(c * base.lambda1_plus, rel=1e-10, abs=1e-12)
        assert scaled.lambda1_minus == pytest.approx(c * base.lambda1_minus, rel=1e-10, abs=1e-12)


def test_critical_offset_examples():
    q = -8 / (5 * PI)
    assert critical_offset_l0(1, -3, q) == pytest.approx(2 * math.sqrt(2) / 3 * 8 / (5 * PI), rel=1e-15)
    assert critical_offset_l0(1, -3, q) == pytest.approx(0.4801687019504566, rel=1e-15)
    # n (n + j) = -1, j^2 = 4: the factor is sqrt(4/4) = 1
    assert critical_offset_l0(1, -2, 0.37) == pytest.approx(0.37, rel=1e-15)
    assert critical_offset_l0(1, -3, 0.0) == 0.0
    with pytest.raises(ValueError):
        critical_offset_l0(1, 2, 1.0)


def test_lambda1_closed_form_critical():
    q = -8 / (5 * PI)
    a0c = critical_offset_l0(1, -3, q)
    lp, lm = lambda1_l0(1, -3, a0c, q)
    assert abs(lp - lm) < 1e-12


def test_ep_offset_examples():
    assert ep_offset_estimate_l0(0, 2, 1.0).offset == pytest.approx(0.5, rel=1e-15)
    assert ep_offset_estimate_l0(1, 3, 8 / (5 * PI)).offset == pytest.approx(
        0.5 * math.sqrt(8 / 9) * 8 / (5 * PI), rel=1e-15)
    # frozen; exactly half the critical offset of the (1, -3) node
    assert ep_offset_estimate_l0(1, 3, 8 / (5 * PI)).offset == pytest.approx(0.2400843509752283, rel=1e-14)


def test_ep_asymptotic():
    est = ep_offset_estimate_l0(1, 9, spec=SIN1)
    assert est.asymptotic == pytest.approx(4 / (81 * PI), rel=1e-15)
    assert abs(est.asymptotic - est.offset) <= 0.15 * est.offset
    assert ep_offset_estimate_l0(1, 9, spec=spec(a1=1.0, b1=1.0)).asymptotic is None


def test_ep_offset_validation():
    with pytest.raises(ValueError):
        ep_offset_estimate_l0(3, 3, 1.0)
    with pytest.raises(ValueError):
        ep_offset_estimate_l0(1, 4, 1.0)
    with pytest.raises(TypeError):
        ep_offset_estimate_l0(1, 3)


def test_residual_examples():
    assert critical_profile_residual_l0(4, 6, 0.0) == pytest.approx(-5 * PI**2, rel=1e-15)
    for M, j in [(0, 2), (1, 5), (-3, 7)]:
        assert critical_profile_residual_l0(M, j, 0.0) == pytest.approx(PI**2 / 4 * (M * M - j * j))
    for M, j in [(1, 3), (2, 6), (5, 9)]:
        q = PI * (j * j - M * M) * j / (M * math.sqrt(j * j - M * M))
        assert abs(critical_profile_residual_l0(M, j, q)) < 1e-10 * q * q
