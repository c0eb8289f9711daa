import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from planar_suita.geometry import Circle, Cycle, DomainSpec, boundary_nodes, build_domain, random_interior_points
from planar_suita.green import green_boundary_flux, green_function
from planar_suita.harmonic import (
    BoundaryData, DirichletAccuracyWarning, HarmonicFunction, analytic_completion_increment,
    analytic_derivative, conjugate_period, dirichlet_solve, evaluate, gradient, harmonic_measures,
)
from planar_suita.search import build_counterexample_domain


def test_annulus_measure_closed_form(annulus2):
    u = dirichlet_solve(annulus2, BoundaryData.indicator(annulus2, 0), 16)
    assert abs(u(1.5) - np.log(2 / 1.5) / np.log(2)) < 1e-8
    assert abs(u(1.5) - 0.4150375) < 1e-7


def test_constant_data_gives_constant(three):
    u = dirichlet_solve(three, BoundaryData.constant(three, 1.0), 24)
    assert abs(u.const - 1) < 1e-10
    assert np.max(np.abs(u.outer)) < 1e-10
    assert np.max(np.abs(u.log)) < 1e-10
    assert np.max(np.abs(u.holes)) < 1e-10


def test_measure_matches_green_flux(three, rng):
    ms = harmonic_measures(three, 48)
    for z0 in random_interior_points(three, 3, rng, clearance=0.05):
        g = green_function(three, z0)
        for k, uk in enumerate(ms):
            assert abs(uk(z0) - green_boundary_flux(g, k)) < 1e-6


def test_annulus4_half_at_sqrt_R(annulus4):
    (u,) = harmonic_measures(annulus4, 16)
    assert abs(u(2.0) - 0.5) < 1e-8
    assert abs(u(2.0j) - 0.5) < 1e-8


def test_disk_has_no_measures(disk):
    assert harmonic_measures(disk, 16) == []


def test_counterexample_comparison_bound(rng):
    ce = build_counterexample_domain(1, 3, 2, 0.5, eps=1e-4)
    u0 = harmonic_measures(ce.domain, 48)[0]
    pts = random_interior_points(ce.domain, 50, rng)
    bound = np.log(np.abs(ce.phi(0)(pts))) / np.log(ce.eps)
    assert np.all(u0(pts) <= bound + 10 * u0.residual + 1e-12)


def test_log_representation(annulus2):
    u = HarmonicFunction.log_term(annulus2, 0)
    assert abs(evaluate(u, 2 - 1e-9) - np.log(2)) < 1e-8
    gx, gy = gradient(u, 1.9)
    assert abs(gx - 1 / 1.9) < 1e-14 and abs(gy) < 1e-14
    assert abs(analytic_derivative(u, 1.9) - 1 / 1.9) < 1e-14
    assert conjugate_period(u, 0) == 1.0


def test_annulus_measure_gradient(annulus2):
    (u,) = harmonic_measures(annulus2, 16)
    gx, gy = u.gradient(1.5)
    assert abs(gx + 1 / (1.5 * np.log(2))) < 1e-7
    assert abs(gy) < 1e-7
    assert abs(analytic_derivative(u, 1.5) + 1 / (1.5 * np.log(2))) < 1e-7


def test_gradient_finite_differences(three_offset, rng):
    ms = harmonic_measures(three_offset, 48)
    h = 1e-5
    for z in random_interior_points(three_offset, 20, rng, clearance=1e-3):
        for u in ms:
            gx, gy = u.gradient(z)
            fx = (u(z + h) - u(z - h)) / (2 * h)
            fy = (u(z + 1j * h) - u(z - 1j * h)) / (2 * h)
            assert abs(gx - fx) < 1e-6 and abs(gy - fy) < 1e-6
            assert abs(u.derivative(z) - (gx - 1j * gy)) < 1e-10


def test_conjugate_period_values(annulus2, three):
    (u,) = harmonic_measures(annulus2, 16)
    assert abs(conjugate_period(u, 0) + 1 / np.log(2)) < 1e-8
    assert conjugate_period(HarmonicFunction.constant(three, 2.0), 1) == 0.0
    with pytest.raises(IndexError):
        conjugate_period(u, 1)


def test_period_line_integral_agrees(three_offset):
    for u in harmonic_measures(three_offset, 48):
        for k, cyc in enumerate(three_offset.cycles):
            assert abs(u.period_integral(cyc) - u.conjugate_period(k)) < 1e-8


def test_period_independent_of_cycle(three):
    u = harmonic_measures(three, 48)[0]
    c = three.cycles[0]
    alt = Cycle(c.center + 0.02j, c.radius * 1.2)
    assert abs(u.period_integral(alt) - u.period_integral(c)) < 1e-8


def test_increment_semicircle(annulus2):
    u = HarmonicFunction.log_term(annulus2, 0)
    t = np.linspace(0, np.pi, 200)
    path = 1.5 * np.exp(1j * t)
    # log z along the upper half circle of radius 1.5 from 1.5 to -1.5
    assert abs(analytic_completion_increment(u, path) - 1j * np.pi) < 1e-12


def test_increment_closed_cycle(three):
    for u in harmonic_measures(three, 48):
        for k, cyc in enumerate(three.cycles):
            z, _ = cyc.nodes(128)
            loop = np.concatenate([z, z[:1]])
            inc = u.increment(loop)
            assert abs(inc.real) < 1e-10
            assert abs(inc - 2j * np.pi * u.conjugate_period(k)) < 1e-8


def test_increment_constant_and_additive(three):
    assert HarmonicFunction.constant(three, 3.0).increment([0.2j, 0.3 + 0.4j]) == 0
    u = harmonic_measures(three, 48)[1]
    p = np.array([0.2j, 0.1 + 0.5j, -0.2 + 0.6j, -0.3 - 0.3j])
    whole = u.increment(p)
    parts = u.increment(p[:3]) + u.increment(p[2:])
    assert abs(whole - parts) < 1e-12


def test_increment_leaving_domain_rejected(annulus2):
    u = HarmonicFunction.log_term(annulus2, 0)
    with pytest.raises(ValueError):
        u.increment([1.5, -1.5])


def test_evaluate_outside_rejected(annulus2):
    (u,) = harmonic_measures(annulus2, 16)
    with pytest.raises(ValueError):
        u(0.5)


def test_nonfinite_data_rejected(annulus2):
    with pytest.raises(ValueError):
        dirichlet_solve(annulus2, BoundaryData((np.nan, 0.0)), 16)


def test_flagged_residual(three):
    # rough data cannot be fitted at low degree; the result is flagged, not silent
    data = BoundaryData((lambda z: np.sign(z.imag), 0.0, 0.0))
    with pytest.warns(DirichletAccuracyWarning):
        u = dirichlet_solve(three, data, 8, tol=1e-8)
    assert u.flagged and u.residual > 1e-8


def test_low_degree_rejected(annulus2):
    with pytest.raises(ValueError):
        dirichlet_solve(annulus2, BoundaryData.indicator(annulus2, 0), 3)


def test_sampled_boundary_data(annulus2):
    t = 2 * np.pi * np.arange(50) / 50
    inner = 1 + 0.1 * np.cos(2 * t)
    u = dirichlet_solve(annulus2, BoundaryData((inner, 0.0)), 24)
    q = boundary_nodes(annulus2, 64)
    z, _, _ = q.select(0)
    th = np.angle(z)
    inside = z * (1 + 1e-9)
    assert np.max(np.abs(u(inside) - (1 + 0.1 * np.cos(2 * th)))) < 1e-6


def test_refinement_stability(three_offset, rng):
    pts = random_interior_points(three_offset, 10, rng, clearance=0.05)
    for k in range(2):
        a = dirichlet_solve(three_offset, BoundaryData.indicator(three_offset, k), 48)
        b = dirichlet_solve(three_offset, BoundaryData.indicator(three_offset, k), 96)
        assert np.max(np.abs(a(pts) - b(pts))) < 1e-8


@pytest.mark.parametrize("name", ["annulus2", "three", "three_offset"])
def test_maximum_principle_and_measure_sum(name, request, rng):
    d = request.getfixturevalue(name)
    ms = harmonic_measures(d, 48)
    pts = random_interior_points(d, 100, rng)
    total = sum(u(pts) for u in ms)
    for u in ms:
        tol = 10 * u.residual + 1e-12
        vals = u(pts)
        assert np.all(vals > -tol) and np.all(vals < 1 + tol)
    assert np.all(total > 0) and np.all(total < 1)


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_maximum_principle_random_data(values):
    d = _three()
    u = dirichlet_solve(d, BoundaryData(tuple(values)), 32)
    pts = random_interior_points(d, 100, np.random.default_rng(0))
    tol = 10 * u.residual + 1e-12
    vals = u(pts)
    assert np.all(vals >= min(values) - tol) and np.all(vals <= max(values) + tol)


def _three():
    return build_domain(DomainSpec.circular(Circle(0j, 1.0), [Circle(0.5 + 0j, 0.1), Circle(-0.5 + 0j, 0.1)]))


def test_arithmetic(three):
    a, b = harmonic_measures(three, 48)
    z = 0.1 + 0.3j
    assert abs((2 * a - b)(z) - (2 * a(z) - b(z))) < 1e-13
    assert abs((a + 1.0)(z) - a(z) - 1) < 1e-14
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert (a - a).is_zero(1e-15)
