"""Tests for the quadrature route to the HTV of smooth functions."""

import math

import numpy as np
import pytest

from htv import smooth
from htv.errors import InvariantViolation, NumericalError
from htv.mixed_fields import BoxDomain
from htv.smooth import QuadratureSpec

BOX2 = BoxDomain((-1.0, -1.0), (1.0, 1.0))


class TestHessianFd:
    def test_quadratic_exact_any_step(self):
        bowl = smooth.quadratic_bowl(2)
        for h in (0.5, 0.1, 0.01):
            assert smooth.hessian_fd(bowl, [0.3, -0.7], h) == pytest.approx(
                np.eye(2), abs=1e-10
            )

    def test_affine_zero(self):
        aff = smooth.affine_fn([2.0, -3.0], 1.0)
        assert smooth.hessian_fd(aff, [0.1, 0.2], 0.05) == pytest.approx(
            np.zeros((2, 2)), abs=1e-11
        )

    def test_cubic_diagonal(self):
        cubic = smooth.SmoothFn(
            1, lambda x: np.asarray(x)[..., 0] ** 3, vectorized=True
        )
        got = smooth.hessian_fd(cubic, [1.0], 0.01)
        assert abs(got[0, 0] - 6.0) <= 1e-3

    def test_symmetry(self):
        fn = smooth.rbf_mixture([[0.0, 0.3], [-0.4, 0.1]], [1.0, -2.0], 0.7)
        h = smooth.hessian_fd(fn, [0.2, 0.1], 0.02)
        assert np.array_equal(h, h.T)

    def test_matches_analytic_within_quadratic_rate(self):
        # frozen constant: measured worst/h^2 is about 0.26 for the unit bump
        rng = np.random.default_rng(1)
        bump = smooth.gaussian_bump(2, 1.0)
        for h in (0.1, 0.05, 0.025):
            for _ in range(20):
                x = rng.uniform(-2.0, 2.0, 2)
                fd = smooth.hessian_fd(bump, x, h)
                exact = smooth.eval_hessians(bump, x[None])[0]
                assert np.abs(fd - exact).max() <= 0.5 * h ** 2


class TestHtvQuadrature:
    def test_bowl_nuclear(self):
        value, err = smooth.htv_quadrature(
            smooth.quadratic_bowl(2), QuadratureSpec(BOX2, 32), 1.0
        )
        assert abs(value - 8.0) <= 1e-10
        assert err <= 1e-10

    def test_bowl_spectral(self):
        value, _ = smooth.htv_quadrature(
            smooth.quadratic_bowl(2), QuadratureSpec(BOX2, 32), math.inf
        )
        assert abs(value - 4.0) <= 1e-10

    def test_affine_zero_all_orders(self):
        aff = smooth.affine_fn([1.5, 2.5], -3.0)
        for p in (1.0, 2.0, math.inf):
            value, _ = smooth.htv_quadrature(aff, QuadratureSpec(BOX2, 16), p)
            assert abs(value) <= 1e-10

    def test_fd_path_matches_analytic_path(self):
        bump = smooth.gaussian_bump(2, 0.8)
        blind = smooth.SmoothFn(2, bump.evaluator, vectorized=True)
        spec = QuadratureSpec(BoxDomain((-4.0, -4.0), (4.0, 4.0)), 24)
        with_h, _ = smooth.htv_quadrature(bump, spec, 1.0)
        with_fd, _ = smooth.htv_quadrature(blind, spec, 1.0)
        # step is cell/8, so the stencil bias is around 0.26*(cell/8)^2
        assert with_fd == pytest.approx(with_h, rel=1e-3)

    def test_consistency_under_refinement(self):
        # one more halving never moves the value by more than 4x the estimate
        for fn, box in (
            (smooth.gaussian_bump(2, 1.0), BoxDomain((-5.0, -5.0), (5.0, 5.0))),
            (smooth.quadratic_bowl(2), BOX2),
        ):
            v_n, err = smooth.htv_quadrature(fn, QuadratureSpec(box, 64), 1.0)
            v_2n, _ = smooth.htv_quadrature(fn, QuadratureSpec(box, 128), 1.0)
            assert abs(v_2n - v_n) <= 4.0 * err + 1e-12

    def test_gauss_rule_beats_midpoint_on_bump(self):
        bump = smooth.gaussian_bump(2, 1.0)
        box = BoxDomain((-5.0, -5.0), (5.0, 5.0))
        ref, _ = smooth.htv_quadrature(bump, QuadratureSpec(box, 256, smooth.GAUSS2), 1.0)
        mid, _ = smooth.htv_quadrature(bump, QuadratureSpec(box, 48), 1.0)
        gauss, _ = smooth.htv_quadrature(bump, QuadratureSpec(box, 48, smooth.GAUSS2), 1.0)
        assert abs(gauss - ref) <= abs(mid - ref)

    def test_masked_disc(self):
        # integrand 2 over the unit disc: 2*pi, midpoint-masked
        value, err = smooth.htv_quadrature(
            smooth.quadratic_bowl(2),
            QuadratureSpec(BOX2, 256),
            1.0,
            mask=lambda x: x @ x <= 1.0,
        )
        assert value == pytest.approx(2.0 * math.pi, rel=2e-3)
        assert err > 0.0

    def test_non_finite_hessian_reported(self):
        bad = smooth.SmoothFn(
            2,
            evaluator=lambda x: np.zeros(np.asarray(x).shape[:-1]),
            hessian=lambda x: np.full((*np.asarray(x).shape[:-1], 2, 2), np.nan),
            vectorized=True,
        )
        with pytest.raises(NumericalError):
            smooth.htv_quadrature(bad, QuadratureSpec(BOX2, 4), 1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(InvariantViolation):
            smooth.htv_quadrature(smooth.quadratic_bowl(3), QuadratureSpec(BOX2, 8), 1.0)


class TestScalingLaw:
    def test_bump_width_invariance_2d(self):
        # in two dimensions the HTV of f(x/sigma) does not depend on sigma;
        # checked on 12-sigma boxes so truncation stays below 1 percent
        values = {}
        for sigma in (0.5, 1.0, 2.0):
            half = 6.0 * sigma
            box = BoxDomain((-half, -half), (half, half))
            fn = smooth.gaussian_bump(2, sigma)
            values[sigma], _ = smooth.htv_quadrature(fn, QuadratureSpec(box, 96), 1.0)
        ref = values[1.0]
        for sigma, value in values.items():
            assert value == pytest.approx(ref, rel=1e-2)


class TestSweep:
    def test_zero_weights_give_zero(self):
        rows = smooth.sweep_rbf_width(
            [[0.0, 0.0]], [0.0], [0.25, 0.5], QuadratureSpec(BOX2, 16), 1.0
        )
        assert [row[1] for row in rows] == [0.0, 0.0]

    def test_reports_requested_widths(self):
        rows = smooth.sweep_rbf_width(
            [[0.0, 0.0], [0.4, -0.2]],
            [1.0, -0.5],
            [0.2, 0.4, 0.8],
            QuadratureSpec(BOX2, 32),
            1.0,
        )
        assert [row[0] for row in rows] == [0.2, 0.4, 0.8]
        assert all(row[1] > 0.0 and row[2] >= 0.0 for row in rows)

    def test_invalid_width(self):
        with pytest.raises(InvariantViolation):
            smooth.rbf_mixture([[0.0, 0.0]], [1.0], 0.0)


class TestBuiltins:
    def test_rbf_analytic_hessian_matches_fd(self):
        rng = np.random.default_rng(2)
        fn = smooth.rbf_mixture(rng.uniform(-1, 1, (3, 2)), [1.0, -0.7, 0.4], 0.6)
        for _ in range(10):
            x = rng.uniform(-1.0, 1.0, 2)
            fd = smooth.hessian_fd(fn, x, 0.01)
            exact = smooth.eval_hessians(fn, x[None])[0]
            assert np.abs(fd - exact).max() <= 1e-3

    def test_builtin_registry(self):
        assert set(smooth.BUILTINS) == {"bowl", "gauss", "affine"}
        fn = smooth.BUILTINS["gauss"](d=2, sigma=0.5)
        assert fn.dim == 2 and fn.hessian is not None
