import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdtbspline import (
    DegreeTooSmall,
    DerivOrderTooHigh,
    DuplicateRoot,
    EmptyInterval,
    MissingZeroRoot,
    ParameterOverflow,
    PointOutOfInterval,
    RootSpec,
    TchebPatch,
    bernstein_diffend_all,
    bernstein_eval_all,
    conversion_matrix,
    fundamental_eval_all,
    null_space,
    poly_bernstein_eval,
    validate_root_spec,
    wronskian_at,
)
from mdtbspline.gallery import MIXED_ROOTS

pytestmark = pytest.mark.filterwarnings("ignore")


class TestValidate:
    def test_polynomial(self):
        spec = validate_root_spec([(0, 0, 3)], (0, 1))
        assert spec.degree == 2 and spec.dimension == 3

    def test_mixed_example_space(self):
        spec = validate_root_spec([(0, 0, 1), (1, 0, 1), (-1, 0, 1), (0, 2, 1)], (0, 1))
        # two real roots and one complex pair on top of the constants
        assert spec.degree == 4

    def test_null_space_fills_zero_root(self):
        spec = null_space(6, MIXED_ROOTS, (3, 4))
        assert spec.degree == 6
        assert spec.roots[0] == (0.0, 0.0, 3)

    def test_canonical_order_and_beta_sign(self):
        spec = validate_root_spec([(0, -2, 1), (1, 0, 1), (0, 0, 2), (-1, 0, 1)], (0, 1))
        assert [tuple(r) for r in spec.roots] == [(0, 0, 2), (-1, 0, 1), (0, 2, 1), (1, 0, 1)]

    @pytest.mark.parametrize(
        "roots, interval, exc",
        [
            ([(1, 0, 1), (-1, 0, 1)], (0, 1), MissingZeroRoot),
            ([(0, 0, 1), (1, 0, 1), (1, 0, 2)], (0, 1), DuplicateRoot),
            ([(0, 0, 2)], (1, 1), EmptyInterval),
            ([(0, 0, 1)], (0, 1), DegreeTooSmall),
        ],
    )
    def test_errors(self, roots, interval, exc):
        with pytest.raises(exc):
            validate_root_spec(roots, interval)

    def test_json_round_trip(self):
        spec = null_space(6, MIXED_ROOTS, (3, 4))
        assert RootSpec.from_json(spec.to_json()) == spec


class TestFundamental:
    def test_taylor_at_anchor(self):
        spec = validate_root_spec([(0, 0, 3)], (0, 1))
        np.testing.assert_array_equal(fundamental_eval_all(spec, [0.0])[0][:, 0], [1, 0, 0])

    def test_exponential_derivative(self):
        spec = validate_root_spec([(0, 0, 1), (2, 0, 1)], (0, 1))
        D = fundamental_eval_all(spec, [1.0], 1)[1][:, 0]
        assert D[1] == pytest.approx(2 * np.e**2, rel=1e-14)

    def test_trig_derivative_at_anchor(self):
        spec = validate_root_spec([(0, 0, 1), (0, 1, 1)], (0, 1))
        D = fundamental_eval_all(spec, [0.0], 1)[1][:, 0]
        np.testing.assert_allclose(D[1:], [0, 1], atol=1e-15)

    def test_out_of_interval(self):
        spec = validate_root_spec([(0, 0, 3)], (0, 1))
        with pytest.raises(PointOutOfInterval):
            fundamental_eval_all(spec, [1.5])

    def test_overflow_guard(self):
        with pytest.raises(ParameterOverflow):
            TchebPatch(validate_root_spec([(0, 0, 1), (800, 0, 1)], (0, 1)))


class TestWronskian:
    def test_left_identity(self):
        W = wronskian_at(validate_root_spec([(0, 0, 3)], (0, 1)), "left")
        np.testing.assert_array_equal(W.entries, np.eye(3))

    def test_right_linear(self):
        W = wronskian_at(validate_root_spec([(0, 0, 2)], (0, 2)), "right")
        np.testing.assert_allclose(W.entries, [[1, 0], [2, 1]])

    def test_right_exponential_column(self):
        W = wronskian_at(validate_root_spec([(0, 0, 1), (1, 0, 1)], (0, 1)), "right")
        np.testing.assert_allclose(W.entries[:, 0], [1, np.e])


def conv(roots, interval=(0, 1)):
    spec = validate_root_spec(roots, interval)
    return conversion_matrix(wronskian_at(spec, "left"), wronskian_at(spec, "right"))


class TestConversion:
    def test_linear(self):
        np.testing.assert_allclose(conv([(0, 0, 2)]).entries, [[1, -1], [0, 1]], atol=1e-15)

    def test_quadratic(self):
        C = conv([(0, 0, 3)]).entries
        np.testing.assert_allclose(C, [[1, -2, 2], [0, 2, -4], [0, 0, 2]], atol=1e-14)

    def test_not_flagged_when_well_conditioned(self):
        assert not conv([(0, 0, 3), (1, 0, 1)]).condition_flag

    def test_threshold_override_flags(self):
        spec = validate_root_spec([(0, 0, 4)], (0, 1))
        res = conversion_matrix(wronskian_at(spec, "left"), wronskian_at(spec, "right"), 0.5)
        assert res.condition_flag and res.warnings

    def test_env_threshold(self, monkeypatch):
        monkeypatch.setenv("TCHEB_WARN_RCOND", "0.5")
        assert conv([(0, 0, 4)]).condition_flag

    def test_translation_invariance(self):
        a = conv(MIXED_ROOTS + ((0, 0, 3),), (0, 1)).entries
        b = conv(MIXED_ROOTS + ((0, 0, 3),), (5, 6)).entries
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12 * np.abs(a).max())


mixed = TchebPatch(null_space(6, MIXED_ROOTS, (3, 4)))


class TestBernstein:
    def test_quadratic_midpoint(self):
        patch = TchebPatch(validate_root_spec([(0, 0, 3)], (0, 1)))
        np.testing.assert_allclose(bernstein_eval_all(patch, [0.5])[0][:, 0], [0.25, 0.5, 0.25])

    def test_mixed_left_end(self):
        np.testing.assert_allclose(mixed.eval_all([3.0])[0][:, 0], np.eye(7)[0], atol=1e-12)

    def test_pou_and_nonnegativity(self):
        B = mixed.eval_all(np.linspace(3, 4, 501))[0]
        assert np.abs(B.sum(axis=0) - 1).max() < 1e-8
        assert B.min() > -1e-8
        assert not mixed.condition_flag

    def test_endpoint_triangularity(self):
        p = mixed.degree
        L = bernstein_diffend_all(mixed, "left", p)
        R = bernstein_diffend_all(mixed, "right", p)
        scale = max(np.abs(L).max(), np.abs(R).max())
        for j in range(p + 1):
            assert np.abs(L[j, :j]).max(initial=0) < 1e-8 * scale
            assert np.abs(R[j, : p - j]).max(initial=0) < 1e-8 * scale
        np.testing.assert_allclose(L[:, 0], np.eye(p + 1)[0], atol=1e-12)
        np.testing.assert_allclose(R[:, 0], np.eye(p + 1)[p], atol=1e-12)

    def test_diffend_quadratic(self):
        patch = TchebPatch(validate_root_spec([(0, 0, 3)], (0, 1)))
        np.testing.assert_allclose(bernstein_diffend_all(patch, "left", 1)[:, 1], [-2, 2, 0], atol=1e-13)

    def test_diffend_matches_eval(self):
        p = mixed.degree
        np.testing.assert_allclose(
            mixed.diffend_all("right", p), mixed.eval_all([4.0], p)[:, :, 0].T, atol=1e-9
        )

    def test_diffend_order_too_high(self):
        with pytest.raises(DerivOrderTooHigh):
            mixed.diffend_all("left", 7)

    def test_bad_endpoint(self):
        with pytest.raises(ValueError):
            mixed.diffend_all("middle", 0)

    def test_derivative_consistency(self):
        h = 1e-5
        x = np.linspace(3.1, 3.9, 9)
        B1 = mixed.eval_all(x, 1)[1]
        fd = (mixed.eval_all(x + h)[0] - mixed.eval_all(x - h)[0]) / (2 * h)
        np.testing.assert_allclose(B1, fd, atol=1e-6)


@settings(max_examples=30, deadline=None)
@given(
    p=st.integers(1, 7),
    x0=st.floats(-5, 5),
    length=st.floats(0.2, 2.0),
)
def test_polynomial_roots_match_classical_bernstein(p, x0, length):
    iv = (x0, x0 + length)
    patch = TchebPatch(validate_root_spec([(0, 0, p + 1)], iv))
    x = np.linspace(*iv, 21)
    np.testing.assert_allclose(
        patch.eval_all(x, 2), poly_bernstein_eval(p, iv, x, 2), atol=1e-8 * max(1, length**-2)
    )


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(-3, 3).filter(lambda a: abs(a) > 0.05), beta=st.floats(0.1, 2.0))
def test_pou_random_roots(alpha, beta):
    patch = TchebPatch(null_space(5, [(alpha, 0, 1), (0, beta, 1)], (0, 1)))
    B = patch.eval_all(np.linspace(0, 1, 101))[0]
    if not patch.condition_flag:
        assert np.abs(B.sum(axis=0) - 1).max() < 1e-8
