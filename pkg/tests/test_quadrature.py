import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yamabe_lab.bubbles import BubbleParams, bubble, bubble_mass
from yamabe_lab.calculus import (
    homogeneous_sphere_integral,
    identity_rhs,
    radial_integral,
    sphere_area,
)
from yamabe_lab.errors import BadDensity, ToleranceNotMet
from yamabe_lab.quadrature import (
    Moments,
    QuadratureEstimate,
    RadialDensity,
    RadialMixture,
    RegionSpec,
    agree,
    ball_mc,
    product_integrate,
    radial_quad,
    sphere_mc,
)
from yamabe_lab.weyl import H_jet


def test_constant_on_sphere_is_exact():
    est = sphere_mc(lambda x: np.ones(len(x)), 3, 1.0, samples=1000, seed=1)
    assert est.value == pytest.approx(4 * math.pi, rel=1e-14)
    assert est.std_err == pytest.approx(0.0, abs=1e-12)


def test_second_moment_on_sphere():
    est = sphere_mc(lambda x: x[:, 0] ** 2, 5, 1.0, samples=100_000, seed=2)
    assert est.agrees_with(sphere_area(5) / 5)


def test_sphere_radius_scaling():
    est = sphere_mc(lambda x: np.sum(x * x, axis=1), 4, 2.0, samples=1000, seed=3)
    assert est.value == pytest.approx(sphere_area(4) * 2.0**3 * 4.0, rel=1e-13)


def test_sphere_mc_rejects_one_sample():
    with pytest.raises(ValueError):
        sphere_mc(lambda x: x[:, 0], 3, samples=1)


def test_same_seed_is_bit_identical():
    f = lambda x: np.exp(x[:, 0]) * x[:, 1] ** 2
    a = sphere_mc(f, 6, samples=20_000, seed=9)
    b = sphere_mc(f, 6, samples=20_000, seed=9)
    assert a == b
    c = sphere_mc(f, 6, samples=20_000, seed=10)
    assert c.value != a.value


@pytest.mark.parametrize("workers", [2, 3, 5])
def test_parallel_reduction_is_bit_identical(workers):
    f = lambda x: np.cos(x[:, 0]) + x[:, 1] ** 4
    region = RegionSpec.annulus(5, 0.5, 2.0)
    one = ball_mc(f, 5, region, samples=40_000, seed=4, workers=1, block=4096)
    many = ball_mc(f, 5, region, samples=40_000, seed=4, workers=workers, block=4096)
    assert one.value == many.value and one.std_err == many.std_err


def test_merged_moments_match_single_pass():
    vals = np.random.default_rng(0).normal(3.0, 2.0, 10_001)
    chunks = np.array_split(vals, 7)
    merged = Moments()
    for c in chunks:
        merged = merged.merge(Moments.of(c))
    whole = Moments.of(vals)
    assert merged.count == whole.count
    assert merged.mean == pytest.approx(whole.mean, rel=1e-14)
    assert merged.m2 == pytest.approx(whole.m2, rel=1e-12)
    assert merged.std_err() == pytest.approx(vals.std(ddof=1) / math.sqrt(vals.size), rel=1e-12)


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=40), st.integers(1, 39))
def test_moment_merge_is_associative(values, cut):
    vals = np.array(values)
    cut = min(cut, len(vals) - 1)
    m = Moments.of(vals[:cut]).merge(Moments.of(vals[cut:]))
    ref = Moments.of(vals)
    assert m.mean == pytest.approx(ref.mean, rel=1e-9, abs=1e-9)
    assert m.m2 == pytest.approx(ref.m2, rel=1e-7, abs=1e-6)


def test_ball_volume():
    est = ball_mc(lambda x: np.ones(len(x)), 4, RegionSpec.ball(4, 1.0), samples=10_000, seed=1)
    assert est.agrees_with(math.pi**2 / 2)


def test_ball_volume_with_importance():
    est = ball_mc(lambda x: np.ones(len(x)), 4, RegionSpec.ball(4, 1.0), samples=100_000, seed=1,
                  importance=RadialDensity(0.3, 2.0))
    assert est.agrees_with(math.pi**2 / 2)


def test_bubble_mass_over_full_space():
    b = BubbleParams.centered(6, 1.0)
    est = ball_mc(lambda x: bubble(b, x, order=0) ** 3, 6, RegionSpec.full_space(6, 1.0),
                  samples=100_000, seed=3, importance=RadialDensity(1.0, 2.0))
    assert est.agrees_with(bubble_mass(6))


def test_mixture_importance_is_unbiased():
    mix = RadialMixture((RadialDensity(0.1, 4.0), RadialDensity(1.0, 0.5)), (0.5, 0.5))
    est = ball_mc(lambda x: np.sum(x * x, axis=1), 3, RegionSpec.ball(3, 1.0), samples=100_000,
                  seed=8, importance=mix)
    assert est.agrees_with(4 * math.pi / 5)


def test_empty_annulus_is_zero():
    est = ball_mc(lambda x: np.ones(len(x)), 4, RegionSpec.annulus(4, 1.0, 1.0), samples=100, seed=1)
    assert est.value == 0.0 and est.std_err == 0.0


def test_unbounded_region_needs_density():
    with pytest.raises(BadDensity):
        ball_mc(lambda x: np.ones(len(x)), 3, RegionSpec.full_space(3), samples=100, seed=1)
    with pytest.raises(BadDensity):
        ball_mc(lambda x: np.ones(len(x)), 3, RegionSpec.full_space(3), samples=100, seed=1,
                importance=RadialDensity(1.0, 1.0))


def test_region_validation():
    with pytest.raises(ValueError):
        RegionSpec.ball(3, -1.0)
    with pytest.raises(ValueError):
        RegionSpec("annulus", 3, (2.0, 1.0))
    with pytest.raises(ValueError):
        RegionSpec("cube", 3, (1.0,))


@pytest.mark.parametrize("scale, gamma", [(0.5, 2.0), (1.0, 1.0), (0.1, 5.0)])
def test_density_normalization(scale, gamma):
    from scipy.integrate import quad

    d = RadialDensity(scale, gamma)
    assert quad(lambda r: float(d.density(r, 0.2, 3.0)), 0.2, 3.0)[0] == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("f, expected, tol", [
    (lambda r: 1 / (1 + r * r), math.pi / 2, 1e-12),
    (lambda r: r / (1 + r * r) ** 3, 0.25, 1e-12),
])
def test_radial_quad_examples(f, expected, tol):
    assert radial_quad(f) == pytest.approx(expected, rel=tol)


def test_radial_quad_matches_beta():
    n = 12
    assert radial_quad(lambda r: (1 + r * r) ** (-n) * r ** (n + 5)) == pytest.approx(
        radial_integral(n, n + 5), rel=1e-10)


def test_radial_quad_divergent_raises():
    with pytest.raises(ToleranceNotMet):
        radial_quad(lambda r: 1 / (1 + r))


def test_product_integrate_odd_is_zero():
    est = product_integrate(lambda r: np.exp(-r * r) * r**3, lambda t: t[:, 0] ** 3, 4,
                            samples=50_000, seed=2)
    assert est.agrees_with(0.0)


def test_product_integrate_gaussian():
    # int exp(-|x|^2) x_1^2 over R^3 = pi^(3/2) / 2
    est = product_integrate(lambda r: np.exp(-r * r) * r**4, lambda t: t[:, 0] ** 2, 3,
                            samples=100_000, seed=6)
    assert est.agrees_with(math.pi**1.5 / 2)


def test_total_gradient_identity_with_profile(W12):
    n = 12

    def spherical(t):
        H, dH = H_jet(W12, t, order=1)
        return np.stack([np.einsum("mikl,mikl->m", dH, dH),
                         np.einsum("mik,ml,mikl->m", H, t, dH),
                         np.einsum("mik,mik->m", H, H)], axis=1)

    base = lambda r: (1 + r * r) ** (2 - n) * r ** (n - 1)
    radials = [lambda r: base(r) * (1 - r * r) ** 2 * r**2,
               lambda r: -4 * base(r) * (1 - r * r) * r**4,
               lambda r: 4 * base(r) * r**6]
    est = product_integrate(radials, spherical, n, samples=100_000, seed=7)
    ref = radial_quad(lambda r: (1 + r * r) ** (2 - n) * identity_rhs("grad_Hbar_total", W12, float(r)))
    assert est.agrees_with(ref)
    assert est.std_err < 0.01 * abs(est.value)


def _random_polynomial(rng, n):
    terms = {}
    for _ in range(rng.integers(1, 6)):
        deg = int(rng.integers(0, 7))
        exps = [0] * n
        for i in rng.integers(0, n, deg):
            exps[i] += 1
        terms[tuple(exps)] = terms.get(tuple(exps), 0.0) + float(rng.uniform(-2, 2))
    return terms


def _evaluate(poly, x):
    out = np.zeros(len(x))
    for exps, c in poly.items():
        out += c * np.prod(x ** np.array(exps), axis=1)
    return out


def test_calibration_on_random_polynomials():
    rng = np.random.default_rng(2024)
    hits = 0
    for k in range(50):
        n = int(rng.integers(2, 7))
        poly = _random_polynomial(rng, n)
        est = sphere_mc(lambda x: _evaluate(poly, x), n, 1.0, samples=4000, seed=k)
        hits += est.agrees_with(homogeneous_sphere_integral(poly, n))
    assert hits >= 48


def test_estimate_serialization():
    est = QuadratureEstimate(np.eye(2), np.ones((2, 2)), 10, 3)
    d = est.to_dict()
    assert d["value"] == [[1.0, 0.0], [0.0, 1.0]] and d["samples"] == 10 and d["seed"] == 3


def test_agree_uses_combined_error():
    a = QuadratureEstimate(1.0, 0.3, 10, 1)
    b = QuadratureEstimate(2.0, 0.0, 10, 2)
    assert agree(a, b)
    assert not agree(a, QuadratureEstimate(2.3, 0.0, 10, 2))
