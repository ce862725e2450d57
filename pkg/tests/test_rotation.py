import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locpress.potentials import FishPotential, JointPotential, constant, indicator
from locpress.rotation import (
    convex_hull,
    fish_star_points,
    fish_vertices,
    hull_membership,
    rotation_cloud,
    slice_interval,
    star_point_bound,
    vertex_orbit_generator,
)
from locpress.shift import PeriodicOrbit, TransitionSystem

FULL2 = TransitionSystem.preset("full2")
FULL4 = TransitionSystem.preset("full4")
FISH = FishPotential.figure1()
GEOM = FISH.geometry


def fish_cloud(enumerate_period=8, max_j=14):
    extras = [vertex_orbit_generator(GEOM, i, j) for i in (1, 2)
              for j in range(GEOM.alpha + 1, max_j + 1)]
    extras.append((0, 0, 0, 2, 2, 2))
    return rotation_cloud(FULL4, FISH, enumerate_period, extra_generators=extras)


class TestCloud:
    def test_full2_small(self):
        cloud = rotation_cloud(FULL2, indicator(FULL2, (1,)), 2)
        assert sorted(cloud.points.ravel().tolist()) == [0.0, 0.5, 1.0]

    def test_fish_contains_tail_and_base(self):
        cloud = rotation_cloud(FULL4, FISH, 2, extra_generators=[(0, 2)])
        pts = {tuple(np.round(p, 12)) for p in cloud.points}
        assert (0.0, 0.0) in pts  # the pure fixed orbit
        assert tuple(np.round(GEOM.w0_vec, 12)) in pts  # the two-cycle 02

    def test_monotone_inner_approximation(self):
        clouds = [rotation_cloud(FULL4, FISH, p) for p in (4, 6, 8)]
        hulls = [convex_hull(c.points) for c in clouds]
        for small, big in zip(hulls, hulls[1:]):
            for v in small.vertices:
                assert hull_membership(v, big, tol=1e-12) != "exterior"

    def test_symmetry_under_class_swap(self):
        cloud = rotation_cloud(FULL4, FISH, 7)
        pts = {tuple(np.round(p, 10)) for p in cloud.points}
        flipped = {(x, -y) for x, y in pts}
        assert pts == flipped


class TestConvexHull:
    def test_triangle_fixed(self):
        hull = convex_hull([(0, 0), (1, 0), (0, 1)])
        assert {tuple(v) for v in hull.vertices} == {(0, 0), (1, 0), (0, 1)}

    def test_collinear_1d(self):
        hull = convex_hull([[0.0], [0.5], [1.0]])
        assert hull.vertices.ravel().tolist() == [0.0, 1.0]

    def test_collinear_2d(self):
        hull = convex_hull([(0, 0), (0.5, 0.5), (1, 1)])
        assert hull.vertices.shape[0] == 2

    def test_vertices_are_extreme(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(200, 2))
        hull = convex_hull(pts)
        V = hull.vertices
        for i in range(V.shape[0]):
            others = np.delete(V, i, axis=0)
            sub = convex_hull(others)
            assert hull_membership(V[i], sub, tol=1e-12) == "exterior"

    def test_ccw_orientation(self):
        rng = np.random.default_rng(1)
        pts = rng.normal(size=(50, 2))
        V = convex_hull(pts).vertices
        area2 = 0.0
        for i in range(len(V)):
            x1, y1 = V[i]
            x2, y2 = V[(i + 1) % len(V)]
            area2 += x1 * y2 - x2 * y1
        assert area2 > 0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            convex_hull(np.zeros((0, 2)))

    def test_3d_hull(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0.2, 0.2, 0.2]])
        hull = convex_hull(pts)
        assert hull.dim == 3
        assert hull.vertices.shape[0] == 4


class TestMembership:
    TRI = convex_hull([(0, 0), (1, 0), (0, 1)])

    def test_centroid_interior(self):
        assert hull_membership((1 / 3, 1 / 3), self.TRI) == "interior"

    def test_vertex_boundary(self):
        assert hull_membership((0, 0), self.TRI) == "boundary"

    def test_far_exterior(self):
        assert hull_membership((2, 2), self.TRI) == "exterior"

    def test_tolerance_band(self):
        assert hull_membership((0.5, -1e-12), self.TRI, tol=1e-9) == "boundary"
        assert hull_membership((0.5, -1e-6), self.TRI, tol=1e-9) == "exterior"

    @settings(max_examples=100, deadline=None)
    @given(
        lam=st.tuples(*[st.floats(0.01, 1.0) for _ in range(3)]),
    )
    def test_convex_combinations_not_exterior(self, lam):
        lam = np.array(lam)
        lam = lam / lam.sum()
        p = lam @ np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        assert hull_membership(p, self.TRI, tol=1e-9) != "exterior"


class TestFishVertices:
    FAN = fish_vertices(GEOM, 14)

    def test_vertex_values(self):
        assert np.allclose(self.FAN.vertex(1, 4), [0.6354166666666666, -0.5])
        assert np.allclose(
            self.FAN.vertex(1, 3), [0.6759259259259259, -0.2222222222222222]
        )

    def test_limit_toward_accumulation(self):
        fan = fish_vertices(GEOM, 500)
        norms = [np.linalg.norm(fan.vertex(1, j)) for j in (50, 150, 500)]
        assert norms[0] > norms[1] > norms[2]
        assert norms[2] < 0.01

    def test_monotone_beyond_alpha(self):
        xs = self.FAN.lower[1:, 0]
        ys = np.abs(self.FAN.lower[1:, 1])
        assert np.all(np.diff(xs) < 0)
        assert np.all(np.diff(ys) < 0)

    def test_symmetric_classes(self):
        assert np.allclose(self.FAN.lower[:, 0], self.FAN.upper[:, 0])
        assert np.allclose(self.FAN.lower[:, 1], -self.FAN.upper[:, 1])

    def test_warnings_recorded_for_reference_geometry(self):
        assert len(self.FAN.hypothesis_warnings) > 0

    def test_vertex_orbits_realize_fan(self):
        # each fan vertex beyond the threshold is the rotation vector of
        # the orbit with one symbol outside the class
        for i in (1, 2):
            for j in range(GEOM.alpha + 1, 15):
                orbit = PeriodicOrbit(vertex_orbit_generator(GEOM, i, j))
                assert orbit.period == j
                rv = FISH.birkhoff_average(orbit)
                assert np.allclose(rv, self.FAN.vertex(i, j), atol=1e-13)

    def test_threshold_vertex_not_realized(self):
        # the j = alpha pair is a declared vertex of the fan but no
        # periodic orbit attains it: the natural candidate collapses to
        # the base point
        orbit = PeriodicOrbit((0, 0, 2))
        rv = FISH.birkhoff_average(orbit)
        assert np.allclose(rv, GEOM.w0_vec)
        assert not np.allclose(rv, self.FAN.vertex(1, 3))


class TestContainment:
    def test_cloud_inside_capped_fan(self):
        cloud = fish_cloud()
        poly = fish_vertices(GEOM, 400).polygon_with_cap()
        for p in cloud.points:
            assert hull_membership(p, poly, tol=1e-9) != "exterior"

    def test_cloud_inside_body_except_tail(self):
        cloud = fish_cloud()
        for p in cloud.points:
            if np.allclose(p, [0.0, 0.0], atol=1e-14):
                continue
            assert GEOM.curve.contains(p, strict=True)

    def test_hull_area_matches_known_deficit(self):
        # the cloud hull fills the capped fan polygon except for the two
        # triangles under the unrealized threshold vertices
        cloud = fish_cloud()
        hull = convex_hull(cloud.points)
        poly = fish_vertices(GEOM, 14).polygon_with_cap()
        deficit = 1 - hull.area / poly.area
        assert deficit == pytest.approx(0.0211, abs=5e-4)


class TestStarPoints:
    def test_first_star_point(self):
        stars = fish_star_points(GEOM, 10)
        assert np.allclose(stars[1][0], [0.6759259259259259, -2 / 3])

    def test_inside_body(self):
        stars = fish_star_points(GEOM, 40)
        for s in (1, 2):
            for p in stars[s]:
                assert GEOM.curve.contains(p, strict=True)

    def test_actual_sum_bound(self):
        # distance bound with the geometry's true arc norms
        stars = fish_star_points(GEOM, 40)
        for s in (1, 2):
            for row, p in enumerate(stars[s]):
                j = row + GEOM.alpha
                assert np.linalg.norm(p) <= star_point_bound(GEOM, j) + 1e-12

    def test_idealized_bound_on_compliant_geometry(self):
        # a geometry whose arc points all sit within 2^-k of the
        # accumulation point satisfies the simpler bound with the sum
        # replaced by 1
        from locpress.potentials import BoundaryCurve, FishGeometry

        geom = FishGeometry(
            alpha=3, curve=BoundaryCurve(4.0, 0.04), x1=0.4, tail_base=8.0
        )
        assert all(geom.v_norm(k) < 2.0**-k for k in range(1, 40))
        w0n = float(np.linalg.norm(geom.w0_vec))
        stars = fish_star_points(geom, 30)
        for s in (1, 2):
            for row, p in enumerate(stars[s]):
                j = row + geom.alpha
                assert np.linalg.norm(p) <= ((geom.alpha - 1) * w0n + 1) / j


class TestSliceInterval:
    def test_degenerate_diagonal(self):
        jp = JointPotential(indicator(FULL2, (1,)), indicator(FULL2, (1,)))
        cloud = rotation_cloud(FULL2, jp, 8)
        a, b = slice_interval(cloud, [0.3])
        assert a == pytest.approx(0.3, abs=1e-9)
        assert b == pytest.approx(0.3, abs=1e-9)

    def test_pair_frequency_fiber(self):
        jp = JointPotential(indicator(FULL2, (1, 1)), indicator(FULL2, (1,)))
        cloud = rotation_cloud(FULL2, jp, 14)
        a, b = slice_interval(cloud, [0.5])
        assert a == pytest.approx(0.0, abs=1e-9)
        assert b == pytest.approx(0.5, abs=1e-9)

    def test_constant_weight(self):
        jp = JointPotential(constant(FULL2, 2.5), indicator(FULL2, (1,)))
        cloud = rotation_cloud(FULL2, jp, 8)
        a, b = slice_interval(cloud, [0.4])
        assert a == pytest.approx(2.5) and b == pytest.approx(2.5)

    def test_exterior_rejected(self):
        jp = JointPotential(indicator(FULL2, (1, 1)), indicator(FULL2, (1,)))
        cloud = rotation_cloud(FULL2, jp, 8)
        with pytest.raises(ValueError):
            slice_interval(cloud, [1.7])
