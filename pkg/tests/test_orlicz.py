import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.optimize import brentq
from scipy.special import i0

from varlab.grid import SampledFunction, lp_norm, make_uniform_grid
from varlab.orlicz import (
    MOMENT_ORDERS,
    OrliczModulus,
    k_star,
    luxemburg_norm,
    modulus_value,
    s1_to_s2_violations,
    s3_to_s2_violations,
    split_gamma_k,
    split_slack,
    subgaussian_profile,
    tail_bound_sq,
)
from varlab.systems import trig_system

GRID = make_uniform_grid(128)
values = st.lists(st.floats(-50, 50, allow_nan=False), min_size=4, max_size=64)


def fn(vals):
    return SampledFunction(vals, make_uniform_grid(len(vals)))


def test_modulus_known_values():
    assert modulus_value(0.0, OrliczModulus.truncated(2.0)) == 0.0
    assert modulus_value(1.0, OrliczModulus.truncated(1.0)) == pytest.approx(math.e - 1)
    assert modulus_value(2.0, OrliczModulus.truncated(1.0)) == pytest.approx(4 * math.e - 1)
    assert modulus_value(0.5, OrliczModulus.gauss(2.0)) == pytest.approx(math.expm1(0.5))


@pytest.mark.parametrize("K", [1.0, 1.5, 2.0, 3.0])
def test_modulus_pointwise_bounds(K):
    t = np.linspace(-10, 10, 20001)
    g = modulus_value(t, OrliczModulus.truncated(K))
    assert np.all(g <= np.expm1(t * t) * (1 + 1e-12) + 1e-15)
    assert np.all(g <= math.exp(K * K) * t * t * (1 + 1e-12) + 1e-15)
    # continuous with matching slope at K
    h = 1e-7
    left = modulus_value(K - h, OrliczModulus.truncated(K))
    right = modulus_value(K + h, OrliczModulus.truncated(K))
    assert (right - left) / (2 * h) == pytest.approx(2 * K * math.exp(K * K), rel=1e-5)


@pytest.mark.parametrize("kind, param", [("gauss", 0.0), ("gauss", -1.0), ("truncated", 0.99), ("box", 1.0)])
def test_modulus_validation(kind, param):
    with pytest.raises(ValueError):
        OrliczModulus(kind, param)


@pytest.mark.parametrize("A", [0.3, 1.0, 7.5])
@pytest.mark.parametrize("mod", [OrliczModulus.gauss(1.0), OrliczModulus.truncated(1.0), OrliczModulus.truncated(2.5)])
def test_constant_function_closed_form(A, mod):
    f = SampledFunction(np.full(16, A), make_uniform_grid(16))
    assert luxemburg_norm(f, mod) == pytest.approx(A / math.sqrt(math.log(2)), rel=1e-9)


def test_zero_and_nonfinite():
    g = make_uniform_grid(4)
    assert luxemburg_norm(SampledFunction(np.zeros(4), g), OrliczModulus.gauss(1)) == 0.0
    with pytest.raises(ValueError):
        luxemburg_norm(SampledFunction([1.0, np.inf, 0.0, 0.0], g), OrliczModulus.gauss(1))


@pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
def test_gauss_norm_of_cosine_bessel_oracle(c):
    # sqrt2 cos(2 pi x): mean of e^{c f^2 / lam^2} = e^u I0(u), u = c / lam^2
    u = brentq(lambda u: math.exp(u) * i0(u) - 2.0, 1e-6, 5.0, xtol=1e-15)
    expected = math.sqrt(c / u)
    f = trig_system(2, GRID).combination([1.0, 0.0])
    assert luxemburg_norm(f, OrliczModulus.gauss(c)) == pytest.approx(expected, rel=2e-9)


def test_gauss_scaling_in_c():
    f = trig_system(8, GRID).combination(np.random.default_rng(0).standard_normal(8))
    assert luxemburg_norm(f, OrliczModulus.gauss(4.0)) == pytest.approx(
        2 * luxemburg_norm(f, OrliczModulus.gauss(1.0)), rel=1e-8)


@given(values, st.floats(-20, 20))
def test_homogeneity(vals, lam):
    f = fn(vals)
    assume(np.abs(f.values).max() > 1e-6)
    mod = OrliczModulus.truncated(1.5)
    assert luxemburg_norm(lam * f, mod) == pytest.approx(abs(lam) * luxemburg_norm(f, mod), rel=3e-9, abs=1e-300)


@pytest.mark.parametrize("scale", [5e-324, 1e-310, 1e300])
def test_extreme_scales(scale):
    f = fn([0.0, 0.0, 0.0, 1.0])
    for mod in (OrliczModulus.gauss(1.0), OrliczModulus.truncated(1.5)):
        assert luxemburg_norm(scale * f, mod) == pytest.approx(scale * luxemburg_norm(f, mod), rel=1e-9, abs=1e-320)


@given(values, st.integers(0, 2**31))
def test_triangle_inequality(vals, seed):
    f = fn(vals)
    h = SampledFunction(np.random.default_rng(seed).standard_normal(len(vals)), f.grid)
    for mod in (OrliczModulus.gauss(1.0), OrliczModulus.truncated(2.0)):
        assert luxemburg_norm(f + h, mod) <= luxemburg_norm(f, mod) + luxemburg_norm(h, mod) + 1e-8


@given(values, st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_gamma_k_bounds(vals, K):
    f = fn(vals)
    gk = luxemburg_norm(f, OrliczModulus.truncated(K))
    assert gk <= luxemburg_norm(f, OrliczModulus.gauss(1.0)) + 1e-9
    assert gk <= math.exp(K * K / 2) * lp_norm(f, 2) * (1 + 1e-9)


def test_norm_is_feasible():
    f = trig_system(6, GRID).combination([1.0, -2.0, 0.5, 0.0, 1.0, 3.0])
    mod = OrliczModulus.truncated(1.2)
    lam = luxemburg_norm(f, mod)
    w = f.grid.weights
    assert w @ modulus_value(f.values / lam, mod) <= 1.0
    assert w @ modulus_value(f.values / (lam * (1 - 1e-8)), mod) > 1.0


def test_k_star():
    assert k_star(1024, 1024) == 1.0
    assert k_star(1024, 1) == pytest.approx(math.sqrt(0.4 * math.log(1024 * math.log(1025))), rel=1e-15)
    assert k_star(1024, 1) == pytest.approx(1.883, abs=5e-4)
    ks = [k_star(1024, m) for m in range(1, 1025)]
    assert all(a >= b for a, b in zip(ks, ks[1:]))
    with pytest.raises(ValueError):
        k_star(4, 5)


@given(values, st.sampled_from([1.0, 1.5, 2.0]))
def test_split_properties(vals, K):
    f = fn(vals)
    pair = split_gamma_k(f, K)
    np.testing.assert_array_equal(pair.g_part.values + pair.e_part.values, f.values)
    assert np.all(pair.g_part.values * pair.e_part.values == 0)
    g_ratio, e_ratio = split_slack(pair)
    assert g_ratio <= 1 + 1e-9
    assert e_ratio <= 1 + 1e-9


def test_split_bounded_function_has_no_tail():
    f = trig_system(2, GRID).combination([1.0, 0.0])
    pair = split_gamma_k(f, 1.0)
    assert np.abs(f.values).max() <= 1.0 * pair.gamma
    assert not pair.e_part.values.any()


def test_split_zero():
    pair = split_gamma_k(SampledFunction(np.zeros(8), make_uniform_grid(8)), 2.0)
    assert pair.gamma == 0.0 and split_slack(pair) == (0.0, 0.0)


def test_split_spike_has_tail():
    vals = np.zeros(1000)
    vals[0] = 100.0
    vals[1:] = np.random.default_rng(1).standard_normal(999) * 0.01
    pair = split_gamma_k(fn(vals), 1.0)
    assert pair.e_part.values[0] == 100.0
    assert split_slack(pair)[1] <= 1.0


def test_tail_bound_formula():
    K = 1.5
    eK = math.exp(K * K)
    assert tail_bound_sq(2.0, K) == pytest.approx(4 / eK * (1 + (eK * (K * K - 1) + 1) / (eK - 1)))


def test_profile_constant_function():
    A = 2.0
    prof = subgaussian_profile(SampledFunction(np.full(8, A), make_uniform_grid(8)), A)
    assert prof.c1 == pytest.approx(1 / math.sqrt(2))
    assert prof.moments.shape == (len(MOMENT_ORDERS),)
    assert prof.levels.shape == (64,) and prof.tail[0] == 1.0
    assert prof.gauss_ratio == pytest.approx(1 / math.sqrt(math.log(2)), rel=1e-9)
    with pytest.raises(ValueError):
        subgaussian_profile(SampledFunction(np.full(8, A), make_uniform_grid(8)), 0.0)


@given(values, st.floats(0.2, 5.0), st.floats(0.05, 2.0))
def test_subgaussian_implications(vals, A_scale, c):
    f = fn(vals)
    A = max(lp_norm(f, 2), 1e-3) * A_scale
    assert not s3_to_s2_violations(f, A, c)
    assert s1_to_s2_violations(f, A)[0] == 0


def test_s3_outside_class_returns_none():
    f = SampledFunction([10.0, 0.0, 0.0, 0.0], make_uniform_grid(4))
    assert s3_to_s2_violations(f, 1.0, 1.0) is None
