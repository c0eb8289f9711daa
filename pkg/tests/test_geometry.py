import numpy as np
import pytest
from hypothesis import given, strategies as st

from planar_suita.geometry import (
    Circle, Cycle, DomainSpec, FourierCurve, boundary_nodes, build_domain, contains, interior_mesh,
    random_interior_points,
)


def test_annulus_has_one_cycle(annulus2):
    assert annulus2.n == 2
    assert len(annulus2.cycles) == 1


def test_two_holes_give_three_components(three):
    assert three.n == 3
    assert len(three.components) == 3


def test_overlapping_holes_rejected():
    with pytest.raises(ValueError, match="overlap"):
        build_domain(DomainSpec.circular(Circle(0j, 1.0), [Circle(0.5 + 0j, 0.3), Circle(0.6 + 0j, 0.3)]))


def test_hole_outside_outer_rejected():
    with pytest.raises(ValueError):
        build_domain(DomainSpec.circular(Circle(0j, 1.0), [Circle(0.9 + 0j, 0.3)]))


def test_annulus_needs_R_above_one():
    with pytest.raises(ValueError):
        build_domain(DomainSpec.annulus(1.0))


def test_contains_annulus(annulus2):
    assert contains(annulus2, 1.5)
    assert not contains(annulus2, 0.5)
    assert not contains(annulus2, 1.0)
    assert not contains(annulus2, 2.0)


def test_anchors_lie_in_holes(three):
    for a, h in zip(three.anchors, three.holes):
        assert h.inside(a)
        assert not contains(three, a)


def test_boundary_weights_disk(disk):
    q = boundary_nodes(disk, 64)
    assert len(q.nodes) == 64
    assert abs(q.weights.sum() - 2 * np.pi) < 1e-12


def test_boundary_weights_annulus(annulus2):
    q = boundary_nodes(annulus2, 64)
    assert len(q.nodes) == 128
    assert abs(q.weights.sum() / (2 * np.pi * 3) - 1) < 1e-10


def test_normals_point_out_of_domain(three):
    q = boundary_nodes(three, 64)
    # a small step along the normal leaves the domain, a step against it enters
    assert not np.any(contains(three, q.nodes + 1e-6 * q.normals))
    assert np.all(contains(three, q.nodes - 1e-6 * q.normals))
    for k, a in enumerate(three.anchors):
        z, _, nrm = q.select(k)
        assert np.all(np.real(np.conj(nrm) * (a - z)) > 0)


def test_boundary_nodes_not_inside(three):
    q = boundary_nodes(three, 64)
    assert not np.any(contains(three, q.nodes))


def test_winding_numbers(three, three_offset):
    for d in (three, three_offset):
        for k, cyc in enumerate(d.cycles):
            for l, a in enumerate(d.anchors):
                assert abs(cyc.winding(a) - (1.0 if k == l else 0.0)) < 1e-10
            z, _ = cyc.nodes(256)
            assert np.all(contains(d, z))


@given(st.integers(0, 32), st.floats(-1, 1), st.floats(-1, 1))
def test_boundary_quadrature_exact_for_trig(n, a, b):
    d = build_domain(DomainSpec.circular(Circle(0.2 + 0.1j, 1.3), [Circle(-0.3 + 0j, 0.25)]))
    q = boundary_nodes(d, 64)
    for k, curve in enumerate(d.components):
        z, w, _ = q.select(k)
        theta = np.angle(z - curve.center)
        f = 1 + a * np.cos(n * theta) + b * np.sin(n * theta)
        exact = curve.length * (1 + (a if n == 0 else 0))
        assert abs(np.sum(f * w) - exact) < 1e-12 * max(1, exact)


def test_area_disk(disk):
    q = interior_mesh(disk, 5000)
    assert abs(q.integrate(np.ones(q.nodes.shape)) / np.pi - 1) < 1e-6


def test_area_annulus(annulus2):
    q = interior_mesh(annulus2, 5000)
    assert abs(q.integrate(np.ones(q.nodes.shape)) / (3 * np.pi) - 1) < 1e-6


def test_area_circular_inclusion_exclusion(three_offset):
    q = interior_mesh(three_offset, 5000, [0.1 + 0.5j])
    exact = np.pi * (1.2**2 - 0.15**2 - 0.2**2)
    assert abs(q.integrate(np.ones(q.nodes.shape)) / exact - 1) < 1e-6


def test_log_singularity_integral(disk):
    q = interior_mesh(disk, 5000, [0j])
    assert abs(q.integrate(-np.log(np.abs(q.nodes))) / (np.pi / 2) - 1) < 1e-5


def test_smooth_integrand(three):
    # int |z|^2 over the unit disk minus two disks of radius 0.1 at +-0.5
    q = interior_mesh(three, 5000)
    exact = np.pi / 2 - 2 * (np.pi * 0.1**4 / 2 + np.pi * 0.01 * 0.25)
    assert abs(q.integrate(np.abs(q.nodes) ** 2) / exact - 1) < 1e-6


def test_mesh_nodes_inside(three):
    q = interior_mesh(three, 3000, [0.2j])
    assert np.all(contains(three, q.nodes))
    assert np.all(q.weights > 0)


def test_singular_center_outside_rejected(annulus2):
    with pytest.raises(ValueError):
        interior_mesh(annulus2, 1000, [0.5])


def test_cycle_radius_independence(three):
    # a perturbed cycle around the same hole has the same winding numbers
    c = three.cycles[0]
    alt = Cycle(c.center + 0.01, c.radius * 0.9)
    assert abs(alt.winding(three.anchors[0]) - 1) < 1e-10
    assert abs(alt.winding(three.anchors[1])) < 1e-10


def test_fourier_curve_domain():
    outer = FourierCurve(0j, ((1, 1.0 + 0j), (3, 0.05 + 0j)))
    spec = DomainSpec("parametric", outer=outer, holes=(FourierCurve(0.1 + 0j, ((1, 0.2 + 0j),)),))
    d = build_domain(spec)
    assert d.n == 2
    assert contains(d, 0.6)
    assert not contains(d, 0.1)
    assert abs(d.cycles[0].winding(d.anchors[0]) - 1) < 1e-10


def test_spec_roundtrip(three):
    spec = three.spec
    assert DomainSpec.from_dict(spec.to_dict()) == spec


def test_random_points_inside(three, rng):
    pts = random_interior_points(three, 50, rng, clearance=0.01, separation=0.01)
    assert np.all(contains(three, pts))
    assert np.min(three.clearance(pts)) > 0.01
