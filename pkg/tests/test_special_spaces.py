import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import BSpline

from mdtbspline import (
    BSplineLocalSpec,
    BSplinePatch,
    DegreeTooSmall,
    GenPolyParams,
    GenPolyPatch,
    InvalidSmoothness,
    OddDegree,
    ParameterOverflow,
    PointOutOfInterval,
    PolyPatch,
    PTypePatch,
    TchebPatch,
    bspline_local_eval,
    genpoly_bernstein_eval,
    poly_bernstein_eval,
    ptype_bernstein_eval,
)
from mdtbspline.special_spaces import switch_quantity

pytestmark = pytest.mark.filterwarnings("ignore")


class TestPoly:
    def test_degree_zero(self):
        np.testing.assert_array_equal(poly_bernstein_eval(0, (0, 1), [0, 0.3, 1])[0], [[1, 1, 1]])

    def test_cubic_midpoint(self):
        np.testing.assert_allclose(
            poly_bernstein_eval(3, (0, 1), [0.5])[0][:, 0], [0.125, 0.375, 0.375, 0.125]
        )

    def test_quadratic_derivative_at_zero(self):
        np.testing.assert_allclose(poly_bernstein_eval(2, (0, 1), [0.0], 1)[1][:, 0], [-2, 2, 0])

    def test_derivatives_vanish_beyond_degree(self):
        assert np.all(poly_bernstein_eval(2, (0, 1), [0.2, 0.7], 4)[3:] == 0)

    def test_out_of_interval(self):
        with pytest.raises(PointOutOfInterval):
            poly_bernstein_eval(2, (0, 1), [-0.1])

    def test_patch_interface(self):
        patch = PolyPatch(3, (1, 3))
        assert patch.dimension == 4 and patch.kind == "poly"
        np.testing.assert_allclose(patch.diffend_all("right", 0)[:, 0], [0, 0, 0, 1])


class TestBSpline:
    def test_single_interval_is_bernstein(self):
        spec = BSplineLocalSpec(2, (0, 1), (-1, -1))
        x = np.linspace(0, 1, 11)
        np.testing.assert_allclose(bspline_local_eval(spec, x, 2), poly_bernstein_eval(2, (0, 1), x, 2))

    def test_interior_knot(self):
        spec = BSplineLocalSpec(2, (0, 1, 2), (1,))
        np.testing.assert_allclose(bspline_local_eval(spec, [1.0])[0][:, 0], [0, 0.5, 0.5, 0])

    def test_knot_vector(self):
        spec = BSplineLocalSpec(2, (0, 1, 2), (-1, 1, -1))
        np.testing.assert_array_equal(spec.knots, [0, 0, 0, 1, 2, 2, 2])
        assert spec.dimension == 4

    def test_invalid_smoothness(self):
        with pytest.raises(InvalidSmoothness):
            BSplineLocalSpec(2, (0, 1, 2), (3,))

    def test_right_end_is_left_limit(self):
        spec = BSplineLocalSpec(3, (0, 1, 2, 3), (2, 1))
        np.testing.assert_allclose(bspline_local_eval(spec, [3.0])[0][:, 0], np.eye(spec.dimension)[-1])

    @settings(max_examples=25, deadline=None)
    @given(st.data())
    def test_matches_scipy(self, data):
        p = data.draw(st.integers(1, 5))
        m = data.draw(st.integers(1, 5))
        widths = data.draw(st.lists(st.floats(0.2, 2.0), min_size=m, max_size=m))
        breaks = tuple(np.concatenate([[0.0], np.cumsum(widths)]))
        r = tuple(data.draw(st.integers(-1, p - 1)) for _ in range(m - 1))
        spec = BSplineLocalSpec(p, breaks, r)
        x = np.linspace(breaks[0], breaks[-1], 57)
        ours = bspline_local_eval(spec, x, 1)
        ref = BSpline.design_matrix(x, spec.knots, p).toarray().T
        np.testing.assert_allclose(ours[0], ref, atol=1e-12)
        assert np.abs(ours[0].sum(axis=0) - 1).max() < 1e-12

    def test_derivative_matches_scipy(self):
        spec = BSplineLocalSpec(3, (0, 1, 2.5, 3), (2, 1))
        x = np.linspace(0, 2.99, 40)
        ours = bspline_local_eval(spec, x, 2)
        for k in range(spec.dimension):
            c = np.eye(spec.dimension)[k]
            b = BSpline(spec.knots, c, 3)
            np.testing.assert_allclose(ours[1, k], b(x, 1), atol=1e-11)
            np.testing.assert_allclose(ours[2, k], b(x, 2), atol=1e-10)

    def test_patch_diffend(self):
        patch = BSplinePatch(BSplineLocalSpec(2, (0, 1, 2), (1,)))
        assert patch.dimension == 4
        np.testing.assert_allclose(patch.diffend_all("left", 1), [[1, -2], [0, 2], [0, 0], [0, 0]])


class TestPType:
    def test_left_end(self):
        np.testing.assert_allclose(
            ptype_bernstein_eval("ptrig", 1.0, 2, (0, np.pi / 2), [0.0])[0][:, 0], [1, 0, 0], atol=1e-15
        )

    def test_pou(self):
        B = ptype_bernstein_eval("ptrig", 1.0, 2, (0, np.pi / 2), np.linspace(0, np.pi / 2, 11))[0]
        assert np.abs(B.sum(axis=0) - 1).max() < 1e-12

    def test_pexp_vs_generic(self):
        patch = PTypePatch("pexp", 1.0, 4, (0, 1))
        generic = TchebPatch(patch.as_root_spec())
        x = np.linspace(0, 1, 101)
        assert np.abs(patch.eval_all(x) - generic.eval_all(x)).max() < 1e-8

    def test_odd_degree(self):
        with pytest.raises(OddDegree):
            PTypePatch("ptrig", 1.0, 3, (0, 1))

    @pytest.mark.parametrize("kind", ["pexp", "ptrig"])
    @pytest.mark.parametrize("p", [2, 4, 6, 8, 10])
    def test_pou_and_derivatives(self, kind, p):
        patch = PTypePatch(kind, 1.3, p, (0.5, 1.5))
        x = np.linspace(0.5, 1.5, 501)
        B = patch.eval_all(x, 1)
        assert np.abs(B[0].sum(axis=0) - 1).max() < 1e-9
        assert np.abs(B[1].sum(axis=0)).max() < 1e-7
        h = 1e-5
        xi = np.linspace(0.6, 1.4, 7)
        fd = (patch.eval_all(xi + h)[0] - patch.eval_all(xi - h)[0]) / (2 * h)
        np.testing.assert_allclose(patch.eval_all(xi, 1)[1], fd, atol=1e-5)


class TestGenPoly:
    def test_published_instability_case(self):
        patch = GenPolyPatch("gtrig", GenPolyParams(10, 1 / 3), (0, 1))
        B = patch.eval_all(np.linspace(0, 1, 501))[0]
        assert np.abs(B.sum(axis=0) - 1).max() <= 5e-10

    def test_polynomial_limit(self):
        x = np.linspace(0, 1, 51)
        for p in (2, 4, 7):
            B = genpoly_bernstein_eval("gexp", GenPolyParams(p, 1e-9), (0, 1), x)
            np.testing.assert_allclose(B, poly_bernstein_eval(p, (0, 1), x), atol=1e-8)

    def test_gt2_equals_pt2(self):
        x = np.linspace(0, 1, 31)
        np.testing.assert_allclose(
            genpoly_bernstein_eval("gtrig", GenPolyParams(2, 1.0), (0, 1), x, 2),
            ptype_bernstein_eval("ptrig", 1.0, 2, (0, 1), x, 2),
            atol=1e-12,
        )

    def test_params_validation(self):
        with pytest.raises(DegreeTooSmall):
            GenPolyParams(1, 1.0)
        with pytest.raises(ValueError):
            GenPolyParams(4, 1.0, switch_threshold=0)

    def test_overflow(self):
        with pytest.raises(ParameterOverflow):
            GenPolyPatch("gexp", GenPolyParams(4, 1000.0), (0, 1))

    @pytest.mark.parametrize("kind", ["gexp", "gtrig"])
    @pytest.mark.parametrize("p", [2, 3, 5, 8, 12])
    def test_continuous_across_switch(self, kind, p):
        threshold = 0.1
        # shape at which the switch quantity reaches the threshold on [0, 1]
        s = math.exp((math.log(threshold) + math.lgamma(p)) / (p - 1))
        assert switch_quantity(p, s) == pytest.approx(threshold)
        x = np.linspace(0, 1, 101)
        lo = GenPolyPatch(kind, GenPolyParams(p, s * (1 - 1e-6)), (0, 1))
        hi = GenPolyPatch(kind, GenPolyParams(p, s * (1 + 1e-6)), (0, 1))
        assert not lo.scaled and hi.scaled
        assert np.abs(lo.eval_all(x) - hi.eval_all(x)).max() < 1e-6

    @pytest.mark.parametrize("kind", ["gexp", "gtrig"])
    def test_pou_grid(self, kind):
        x = np.linspace(0, 1, 501)
        worst = 0.0
        for p in range(2, 11):
            for shape in (0.01, 0.3, 1.0, 2.5, 5.0):
                B = GenPolyPatch(kind, GenPolyParams(p, shape), (0, 1)).eval_all(x)[0]
                worst = max(worst, np.abs(B.sum(axis=0) - 1).max())
        assert worst <= 1e-9

    def test_endpoint_triangularity(self):
        patch = GenPolyPatch("gtrig", GenPolyParams(6, 2.0), (1, 2))
        L = patch.diffend_all("left", 6)
        R = patch.diffend_all("right", 6)
        scale = np.abs(L).max()
        for j in range(7):
            assert np.abs(L[j, :j]).max(initial=0) < 1e-8 * scale
            assert np.abs(R[j, : 6 - j]).max(initial=0) < 1e-8 * scale

    @settings(max_examples=30, deadline=None)
    @given(
        kind=st.sampled_from(["gexp", "gtrig"]),
        p=st.integers(2, 6),
        shape=st.floats(0.05, 2.5),
    )
    def test_matches_generic(self, kind, p, shape):
        patch = GenPolyPatch(kind, GenPolyParams(p, shape), (0, 1))
        generic = TchebPatch(patch.as_root_spec())
        if generic.condition_flag:
            return
        x = np.linspace(0, 1, 41)
        a, b = patch.eval_all(x, p), generic.eval_all(x, p)
        scale = np.maximum(1, np.abs(a).max(axis=(1, 2)))[:, None, None]
        assert (np.abs(a - b) / scale).max() < 1e-7
