import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vesselforge import geometry
from oracles import de_casteljau


def curve(*pts):
    return geometry.BezierCurve(np.array(pts, dtype=np.float64))


class TestEvaluate:
    def test_linear_midpoint(self):
        c = curve((0, 0), (10, 0))
        assert np.allclose(geometry.evaluate(c, 0.5), (5, 0))

    def test_endpoints(self):
        c = curve((3, 7), (-2, 4), (9, 1), (5, 5))
        assert np.allclose(geometry.evaluate(c, 0.0), (3, 7), atol=1e-9)
        assert np.allclose(geometry.evaluate(c, 1.0), (5, 5), atol=1e-9)

    def test_quadratic_midpoint(self):
        # frozen from the de Casteljau subdivision oracle
        c = curve((0, 0), (2, 4), (4, 0))
        assert np.allclose(geometry.evaluate(c, 0.5), (2, 2), atol=1e-12)
        assert np.allclose(de_casteljau(c.control_points, 0.5), (2, 2))

    @pytest.mark.parametrize("t", [-0.1, 1.1, 2.0])
    def test_t_out_of_domain(self, t):
        with pytest.raises(ValueError):
            geometry.evaluate(curve((0, 0), (1, 1)), t)

    def test_invalid_curves(self):
        with pytest.raises(ValueError):
            curve((0, 0))
        with pytest.raises(ValueError):
            curve((0, 0), (np.nan, 1))


@st.composite
def random_curves(draw, max_order_plus_one=20):
    k = draw(st.integers(2, max_order_plus_one))
    coords = draw(
        st.lists(
            st.tuples(
                st.floats(-200, 200, allow_nan=False),
                st.floats(-200, 200, allow_nan=False),
            ),
            min_size=k,
            max_size=k,
        )
    )
    return curve(*coords)


class TestProperties:
    @given(random_curves(), st.floats(0, 1))
    @settings(max_examples=200)
    def test_de_casteljau_agreement(self, c, t):
        assert np.allclose(geometry.evaluate(c, t), de_casteljau(c.control_points, t), atol=1e-9)

    @given(random_curves())
    def test_endpoint_identity(self, c):
        assert np.allclose(geometry.evaluate(c, 0.0), c.control_points[0], atol=1e-9)
        assert np.allclose(geometry.evaluate(c, 1.0), c.control_points[-1], atol=1e-9)

    @given(random_curves(), st.floats(0, 1))
    def test_convex_hull(self, c, t):
        # support-function characterization: p is in the hull iff for every
        # direction u, p.u <= max_i (p_i.u); checked over many directions
        p = geometry.evaluate(c, t)
        dir_rng = np.random.default_rng(0)
        angles = dir_rng.uniform(0, 2 * math.pi, size=64)
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        support = (c.control_points @ dirs.T).max(axis=0)
        assert np.all(p @ dirs.T <= support + 1e-6)

    @given(random_curves(), st.floats(0, 1), st.floats(-3.14, 3.14),
           st.floats(-50, 50), st.floats(-50, 50))
    @settings(max_examples=100)
    def test_affine_invariance(self, c, t, angle, tx, ty):
        rot = np.array([[math.cos(angle), -math.sin(angle)],
                        [math.sin(angle), math.cos(angle)]])
        shift = np.array([tx, ty])
        moved = geometry.BezierCurve(c.control_points @ rot.T + shift)
        expected = geometry.evaluate(c, t) @ rot.T + shift
        assert np.allclose(geometry.evaluate(moved, t), expected, atol=1e-6)


class TestSampleCurve:
    def params(self, k, delta, w=256, h=256):
        return geometry.CurveParams(order_plus_one=k, displacement_scale=delta,
                                    image_width=w, image_height=h)

    def test_zero_delta_collinear(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            c = geometry.sample_curve(self.params(8, 0.0), rng)
            p0, pn = c.control_points[0], c.control_points[-1]
            chord = pn - p0
            normal = np.array([-chord[1], chord[0]]) / np.linalg.norm(chord)
            offsets = (c.control_points - p0) @ normal
            assert np.all(np.abs(offsets) < 1e-9)

    def test_two_points_no_intermediates(self):
        c = geometry.sample_curve(self.params(2, 100.0), np.random.default_rng(2))
        assert c.control_points.shape == (2, 2)

    def test_chord_fractions(self):
        # n+1 = 4: intermediate base points at chord fractions 1/3 and 2/3,
        # recomputed analytically from the chord after removing displacement
        rng = np.random.default_rng(3)
        c = geometry.sample_curve(self.params(4, 40.0), rng)
        p0, pn = c.control_points[0], c.control_points[-1]
        chord = pn - p0
        unit = chord / np.linalg.norm(chord)
        for i, frac in ((1, 1 / 3), (2, 2 / 3)):
            along = (c.control_points[i] - p0) @ unit
            assert along == pytest.approx(frac * np.linalg.norm(chord), abs=1e-9)

    def test_endpoints_in_domain(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            c = geometry.sample_curve(self.params(5, 150.0, w=64, h=32), rng)
            for p in (c.control_points[0], c.control_points[-1]):
                assert 0 <= p[0] < 64 and 0 <= p[1] < 32

    def test_delta_zero_straightness(self):
        rng = np.random.default_rng(5)
        c = geometry.sample_curve(self.params(10, 0.0), rng)
        pts = geometry.evaluate_many(c, np.linspace(0, 1, 100))
        p0, pn = c.control_points[0], c.control_points[-1]
        chord = pn - p0
        normal = np.array([-chord[1], chord[0]]) / np.linalg.norm(chord)
        assert np.max(np.abs((pts - p0) @ normal)) < 1e-6


class TestDiscretize:
    def test_lower_clamp(self):
        c = curve((0, 0), (0.3, 0))
        assert geometry.discretize(c).shape[0] == 2

    def test_sample_count_for_line(self):
        c = curve((0, 0), (10, 0))
        pts = geometry.discretize(c)
        assert pts.shape[0] == 20
        assert np.allclose(pts[:, 1], 0)

    def test_samples_match_evaluate(self):
        c = curve((0, 0), (2, 4), (4, 0))
        pts = geometry.discretize(c)
        m = pts.shape[0]
        expected = geometry.evaluate_many(c, np.linspace(0, 1, m))
        assert np.array_equal(pts, expected)
