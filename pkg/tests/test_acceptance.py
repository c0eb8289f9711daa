"""Acceptance criteria, one test per criterion, each at its stated tolerance."""
import math
import time

import numpy as np
import pytest

from planar_suita.geometry import Circle, Cycle, DomainSpec, build_domain, random_interior_points
from planar_suita.green import (
    annulus_capacity_series, annulus_green_series, annulus_measure, disk_capacity, disk_green,
    green_boundary_flux, green_cycle_period, green_cycle_period_numeric, green_function, log_capacity,
)
from planar_suita.harmonic import harmonic_measures
from planar_suita.search import (
    FOUND, build_counterexample_domain, certify_no_equality, find_equality_config, product_combine,
)
from planar_suita.suita import (
    EQUALITY_CAPABLE, IMPOSSIBLE_BY_COUNT, JetConfig, WeightSpec, criterion_verdict, equality_defect,
    extremal_form, integrality_deltas, integrality_deltas_numeric, l2_mesh, minimal_l2,
)


def _circular(outer, holes):
    return build_domain(DomainSpec.circular(outer, holes))


def test_acc01_annulus_harmonic_measure():
    t0 = time.perf_counter()
    d = build_domain(DomainSpec.annulus(2.0))
    u1 = harmonic_measures(d)[0]
    pts = random_interior_points(d, 100, np.random.default_rng(1))
    err = np.max(np.abs(u1(pts) - annulus_measure(pts, 2.0)))
    elapsed = time.perf_counter() - t0
    assert err < 1e-8
    assert elapsed < 5.0


def test_acc02_green_capacity_closed_forms():
    rng = np.random.default_rng(2)
    disk = build_domain(DomainSpec.disk())
    poles = 0.8 * np.sqrt(rng.uniform(0, 1, 20)) * np.exp(2j * np.pi * rng.uniform(0, 1, 20))
    for z0 in poles:
        g = green_function(disk, z0, degree=96)
        z = random_interior_points(disk, 30, rng, clearance=1e-3)
        z = z[np.abs(z - z0) > 1e-3]
        assert np.max(np.abs(g(z) - disk_green(z, z0))) < 1e-8
        assert abs(log_capacity(g) - disk_capacity(z0)) < 1e-8
    ann = build_domain(DomainSpec.annulus(2.0))
    for z0 in [1.2, 1.5j, -1.7 + 0.2j]:
        g = green_function(ann, z0, degree=96)
        z = random_interior_points(ann, 30, rng, clearance=1e-3)
        z = z[np.abs(z - z0) > 1e-2]
        ref, _ = annulus_green_series(z, z0, 2.0, terms=200)
        # G vanishes on the boundary, so the error is measured relative to the sup norm
        assert np.max(np.abs(g(z) - ref)) / np.max(np.abs(ref)) < 1e-6
        cap, _ = annulus_capacity_series(z0, 2.0, terms=200)
        assert abs(log_capacity(g) / cap - 1) < 1e-6


def test_acc03_green_third_formula():
    d = _circular(Circle(0.1 + 0j, 1.2), [Circle(0.55 + 0.2j, 0.15), Circle(-0.4 - 0.3j, 0.2)])
    ms = harmonic_measures(d)
    for z0 in random_interior_points(d, 5, np.random.default_rng(3), clearance=0.05):
        g = green_function(d, z0)
        for k, uk in enumerate(ms):
            assert abs(uk(z0) - green_boundary_flux(g, k)) < 1e-6


def test_acc04_period_quantization():
    d = _circular(Circle(0j, 1.0), [Circle(0.5 + 0j, 0.1), Circle(-0.5 + 0j, 0.1)])
    for z0 in [0.2j, -0.1 - 0.4j, 0.7 + 0.1j]:
        g = green_function(d, z0)
        small = Cycle(z0, 0.5 * float(d.clearance(z0)))
        assert abs(green_cycle_period_numeric(g, small) - 1) < 1e-8
        for k, cyc in enumerate(d.cycles):
            assert abs(green_cycle_period(g, k) - green_cycle_period_numeric(g, cyc)) < 1e-8


@pytest.mark.parametrize("z0", [0.0, 0.3])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_acc05_disk_equality(z0, k):
    t0 = time.perf_counter()
    d = build_domain(DomainSpec.disk())
    w = WeightSpec()
    j = JetConfig([z0], [k], p=[k + 1])
    amps = extremal_form(d, w, j).amplitudes
    rep = equality_defect(d, w, j.with_amplitudes(amps))
    elapsed = time.perf_counter() - t0
    assert abs(rep.I * rep.S * rep.B - 1) < 1e-4
    assert elapsed < 60.0


def test_acc06_annulus_dichotomy():
    d = build_domain(DomainSpec.annulus(4.0))
    w = WeightSpec()
    # equality point |z1| = 2
    j = JetConfig([2.0], [1], p=[2])
    (delta, _), = integrality_deltas(d, w, j)
    assert abs(delta - 1) < 1e-8
    rep = equality_defect(d, w, j, basis_degree=40)
    assert rep.verdict == EQUALITY_CAPABLE and abs(rep.defect) < 1e-3
    # strict inequality point |z1| = 1.7
    j = JetConfig([1.7], [1], [1.0], p=[2])
    (delta, _), = integrality_deltas(d, w, j)
    assert abs(delta - 2 * math.log(4 / 1.7) / math.log(4)) < 1e-6 and round(delta, 5) == 1.23447
    r1 = equality_defect(d, w, j, basis_degree=20)
    r2 = equality_defect(d, w, j, basis_degree=40)
    assert abs(r2.defect - r1.defect) <= 0.01 * abs(r2.defect)
    assert r2.defect > 0.005


def test_acc07_necessary_condition_sweep():
    domains = {
        1: build_domain(DomainSpec.disk()),
        2: build_domain(DomainSpec.annulus(3.0)),
        3: _circular(Circle(0j, 1.0), [Circle(0.5 + 0j, 0.1), Circle(-0.5 + 0j, 0.1)]),
        4: _circular(Circle(0j, 1.0), [Circle(0.5 + 0j, 0.1), Circle(-0.5 + 0j, 0.1), Circle(0.5j, 0.1)]),
    }
    combos = [
        (1, [0]), (1, [0, 0]),
        (2, [0]), (2, [1]), (2, [0, 0]), (2, [2]),
        (3, [0]), (3, [1]), (3, [2]), (3, [0, 0]), (3, [0, 1]), (3, [0, 0, 0]),
        (4, [0]), (4, [1]), (4, [2]), (4, [3]), (4, [0, 1]), (4, [1, 1]), (4, [0, 0, 0]), (4, [0, 0, 1]),
    ]
    assert len(combos) == 20
    pts = {1: [0.1, -0.4j, 0.5], 2: [1.5, -2.2j, -1.3 + 1.1j], 3: [0.6j, -0.2 - 0.5j, 0.1],
           4: [-0.2 - 0.5j, 0.1, -0.3 + 0.7j]}
    for n, ks in combos:
        d = domains[n]
        z = pts[n][: len(ks)]
        j = JetConfig(z, ks)
        v0 = criterion_verdict(d, WeightSpec(), j)
        assert (v0 == IMPOSSIBLE_BY_COUNT) == (n > sum(k + 1 for k in ks))
        if n > 1:
            wu = WeightSpec.from_measures(d, [0.3] * (n - 1))
            assert criterion_verdict(d, wu, j) != IMPOSSIBLE_BY_COUNT


def test_acc08_equality_search():
    t0 = time.perf_counter()
    ann = build_domain(DomainSpec.annulus(4.0))
    res = find_equality_config(ann, m=1, q_max=2, rng=np.random.default_rng(8))
    elapsed = time.perf_counter() - t0
    assert res.status == FOUND and res.orders == [1]
    assert abs(abs(res.points[0]) - 2.0) < 1e-8 and res.residual < 1e-8
    assert elapsed < 10.0

    t0 = time.perf_counter()
    d = _circular(Circle(0j, 1.0), [Circle(0.5 + 0j, 0.1), Circle(-0.5 + 0j, 0.1)])
    res = find_equality_config(d, m=1, q_max=12, rng=np.random.default_rng(0))
    elapsed = time.perf_counter() - t0
    assert res.status == FOUND
    j = JetConfig(res.points, res.orders)
    closed = max(x for _, x in integrality_deltas(d, WeightSpec(), j))
    assert closed < 1e-8
    assert max(abs(a - round(a)) for a in integrality_deltas_numeric(d, WeightSpec(), j)) < 1e-8
    assert elapsed < 120.0


@pytest.mark.parametrize("m,M,n", [(1, 2, 3), (2, 3, 5)])
def test_acc09_counterexample_family(m, M, n):
    ce = build_counterexample_domain(m, n, M, a=0.5)
    cert = certify_no_equality(ce, samples=200, rng=np.random.default_rng(9))
    assert cert.status == "PASSED" and cert.comparison_violations == 0
    assert sum(r["ok"] for r in cert.records) == 200
    rng = np.random.default_rng(10)
    z = 0.99 * np.sqrt(rng.uniform(0, 1, 200)) * np.exp(2j * np.pi * rng.uniform(0, 1, 200))
    collars = [ce.collar(j) for j in range(m + 1)]
    for j in range(m + 1):
        phi = ce.phi(j)
        assert np.max(np.abs(phi(phi(z)) - z)) < 1e-12
        for i in range(j):
            gap = abs(collars[i].center - collars[j].center) - collars[i].radius - collars[j].radius
            assert gap > 1e-6
        assert abs(collars[j].center) + collars[j].radius < 1 - 1e-6
    for h in ce.extra_holes:
        for c in collars:
            assert abs(h.center - c.center) - h.radius - c.radius > 1e-6


def test_acc10_invariant_suite():
    d = _circular(Circle(0.1 + 0j, 1.2), [Circle(0.55 + 0.2j, 0.15), Circle(-0.4 - 0.3j, 0.2)])
    w = WeightSpec()
    # amplitude scaling
    j = JetConfig([0.3 - 0.5j, -0.2 + 0.6j], [0, 1], [1.0, 0.4j])
    base = equality_defect(d, w, j, basis_degree=16)
    for s in (3.0, 0.2 - 0.7j, 1e3):
        rep = equality_defect(d, w, j.with_amplitudes([s * a for a in j.amplitudes]), basis_degree=16)
        assert abs(rep.defect - base.defect) <= 1e-12 * abs(base.defect)
        assert np.max(np.abs(np.array(rep.deltas) - base.deltas)) <= 1e-12 * np.max(np.abs(base.deltas))
    # C monotone over four doublings on a common quadrature
    mesh = l2_mesh(d, w, j, 64)
    Cs = [minimal_l2(d, w, j, basis_degree=N, mesh=mesh).C for N in (4, 8, 16, 32, 64)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(Cs, Cs[1:]))
    # maximum principle, sum of measures, gradients
    rng = np.random.default_rng(11)
    domains = [build_domain(DomainSpec.annulus(2.0)), build_domain(DomainSpec.annulus(4.0)), d,
               build_counterexample_domain(2, 5, 3).domain]
    for dom in domains:
        ms = harmonic_measures(dom)
        pts = random_interior_points(dom, 50, rng, clearance=1e-3)
        vals = np.array([u(pts) for u in ms])
        assert np.all(vals > 0) and np.all(vals < 1)
        total = vals.sum(axis=0)
        assert np.all(total > 0) and np.all(total < 1)
        h = 1e-6
        for u in ms:
            for z in pts[:5]:
                gx, gy = u.gradient(z)
                fx = (u(z + h) - u(z - h)) / (2 * h)
                fy = (u(z + 1j * h) - u(z - 1j * h)) / (2 * h)
                assert abs(gx - fx) < 1e-6 and abs(gy - fy) < 1e-6


def test_acc11_product_combinator():
    d = build_domain(DomainSpec.annulus(4.0))
    good = integrality_deltas(d, WeightSpec(), JetConfig([2.0], [1], p=[4]))
    bad = integrality_deltas(d, WeightSpec(), JetConfig([1.7], [1], p=[4]))
    # gamma = 1 and p = 4 in each factor: (1 + 1)/4 + (1 + 1)/4 = 1
    for f1, f2, expect in [(good, good, True), (good, bad, False), (bad, good, False), (bad, bad, False)]:
        assert product_combine([f1, f2], [[4.0], [4.0]], [[1], [1]]) is expect
    with pytest.raises(ValueError):
        product_combine([good, good], [[2.0], [2.0]], [[1], [1]])
