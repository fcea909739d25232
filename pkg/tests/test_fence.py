"""Tests for Dirac fence norms, volumes and additivity."""

import math

import numpy as np
import pytest

from htv import fence
from htv.errors import InvariantViolation

P_GRID = [1.0, 1.5, 2.0, 3.0, math.inf]


def interval_fence(weight, lo, hi, slope=0.0, offset=0.0, axes=None):
    """d = 2, d1 = 1 fence supported on the segment {(t, slope*t + offset)}."""
    return fence.DiracFence(
        weight=weight,
        base=np.array([[lo], [hi]]),
        map_matrix=[[slope]],
        map_offset=[offset],
        base_axes=axes,
    )


def point_fence(weight, location):
    """d1 = 0 fence: a matrix-weighted point mass at ``location``."""
    location = np.atleast_1d(np.asarray(location, dtype=float))
    d = len(location)
    return fence.DiracFence(
        weight=weight,
        base=np.zeros((1, 0)),
        map_matrix=np.zeros((d, 0)),
        map_offset=location,
    )


class TestLebPolytope:
    def test_unit_segment(self):
        assert fence.leb_polytope([[0.0], [1.0]]) == 1.0

    def test_unit_square(self):
        square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
        assert fence.leb_polytope(square) == pytest.approx(1.0)

    def test_triangle_half_base_height(self):
        assert fence.leb_polytope([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]) == pytest.approx(2.0)

    def test_point_convention(self):
        assert fence.leb_polytope(np.zeros((1, 0))) == 1.0

    def test_degenerate_reports_zero(self):
        collinear = [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]
        assert fence.leb_polytope(collinear) == 0.0
        assert fence.leb_polytope([[0.0, 0.0], [1.0, 0.0]]) == 0.0

    def test_interior_points_ignored(self):
        rng = np.random.default_rng(0)
        square = np.array([[0.0, 0.0], [3.0, 0.0], [3.0, 2.0], [0.0, 2.0]])
        inside = rng.uniform([0.2, 0.2], [2.8, 1.8], size=(20, 2))
        assert fence.leb_polytope(np.vstack([square, inside])) == pytest.approx(6.0)


class TestFenceNorm:
    def test_unit_dyad_unit_segment(self):
        w = np.outer([1.0, 0.0], [1.0, 0.0])
        f = interval_fence(w, 0.0, 1.0)
        for p in P_GRID:
            assert fence.fence_norm(f, p) == pytest.approx(1.0)

    def test_homogeneity(self):
        w = np.outer([1.0, 0.0], [1.0, 0.0])
        f3 = interval_fence(3.0 * w, 0.0, 1.0)
        assert fence.fence_norm(f3, 2.0) == pytest.approx(3.0)

    def test_pyramid_boundary_fence(self):
        # gradient jump of magnitude sqrt(2) across a facet of length sqrt(2)
        u = np.array([1.0, 1.0]) / math.sqrt(2.0)
        f = fence.DiracFence(
            weight=math.sqrt(2.0) * np.outer(u, u),
            base=[[0.0], [math.sqrt(2.0)]],
            map_matrix=[[1.0]],
            map_offset=[0.0],
        )
        for p in P_GRID:
            assert fence.fence_norm(f, p) == pytest.approx(2.0)

    def test_rank_one_p_collapse(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            w = np.outer(rng.standard_normal(3), rng.standard_normal(3))
            f = fence.DiracFence(
                weight=w,
                base=rng.standard_normal((4, 2)),
                map_matrix=rng.standard_normal((1, 2)),
                map_offset=rng.standard_normal(1),
            )
            norms = [fence.fence_norm(f, p) for p in P_GRID]
            assert max(norms) - min(norms) <= 1e-12 * max(norms)

    def test_degenerate_base_rejected(self):
        with pytest.raises(InvariantViolation):
            fence.DiracFence(
                weight=np.eye(2),
                base=[[0.0], [0.0]],
                map_matrix=[[0.0]],
                map_offset=[0.0],
            )

    def test_zero_weight_rejected(self):
        with pytest.raises(InvariantViolation):
            interval_fence(np.zeros((2, 2)), 0.0, 1.0)


class TestAdditivity:
    def test_single_fence(self):
        f = interval_fence(np.eye(2), 0.0, 2.0)
        assert fence.fences_total_norm([f], 1.0) == pytest.approx(fence.fence_norm(f, 1.0))

    def test_disjoint_bases_sum(self):
        a = interval_fence(np.eye(2), 0.0, 1.0)
        b = interval_fence(2.0 * np.eye(2), 2.0, 3.0)
        total = fence.fences_total_norm([a, b], 1.0)
        assert total == fence.fence_norm(a, 1.0) + fence.fence_norm(b, 1.0)

    def test_touching_endpoints_are_measure_zero(self):
        a = interval_fence(np.eye(2), 0.0, 1.0)
        b = interval_fence(np.eye(2), 1.0, 2.0)
        assert fence.fences_total_norm([a, b], 1.0) == pytest.approx(4.0)

    def test_crossing_lines_sum(self):
        # graphs y = x and y = -x cross at the origin only
        a = interval_fence(np.eye(2), -1.0, 1.0, slope=1.0)
        b = interval_fence(np.eye(2), -1.0, 1.0, slope=-1.0)
        assert fence.fences_total_norm([a, b], 2.0) == pytest.approx(
            fence.fence_norm(a, 2.0) + fence.fence_norm(b, 2.0)
        )

    def test_overlapping_fences_rejected(self):
        a = interval_fence(np.eye(2), 0.0, 1.0)
        b = interval_fence(np.diag([1.0, -1.0]), 0.5, 1.7)
        with pytest.raises(InvariantViolation):
            fence.fences_total_norm([a, b], 1.0)

    def test_coincident_point_masses_rejected(self):
        a = point_fence(np.eye(1).reshape(1, 1) * 0 + 1.0, [0.5])
        b = point_fence(np.array([[2.0]]), [0.5])
        with pytest.raises(InvariantViolation):
            fence.fences_total_norm([a, b], 1.0)

    def test_distinct_point_masses_sum(self):
        a = point_fence(np.array([[1.0]]), [0.5])
        b = point_fence(np.array([[2.0]]), [0.75])
        assert fence.fences_total_norm([a, b], 1.0) == pytest.approx(3.0)

    def test_planar_bases_in_3d(self):
        # d = 3, d1 = 2: same plane, overlapping squares -> rejected;
        # disjoint squares -> summed (exercises the halfspace test)
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        mk = lambda sq: fence.DiracFence(
            weight=np.diag([1.0, 1.0, 0.0]),
            base=sq,
            map_matrix=np.zeros((1, 2)),
            map_offset=[0.0],
        )
        with pytest.raises(InvariantViolation):
            fence.fences_total_norm([mk(square), mk(square + 0.5)], 1.0)
        total = fence.fences_total_norm([mk(square), mk(square + 5.0)], 1.0)
        assert total == pytest.approx(4.0)


class TestRandomFenceSuite:
    def test_property_suite(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            d = int(rng.integers(2, 4))
            d1 = int(rng.integers(0, d))
            if d1 == 0:
                base = np.zeros((1, 0))
            else:
                base = rng.standard_normal((d1 + 1 + int(rng.integers(0, 3)), d1))
                base *= 1.0 + rng.random()
            w = rng.standard_normal((d, d))
            try:
                f = fence.DiracFence(
                    weight=w,
                    base=base,
                    map_matrix=rng.standard_normal((d - d1, d1)),
                    map_offset=rng.standard_normal(d - d1),
                )
            except InvariantViolation:
                continue  # randomly degenerate base
            p = P_GRID[int(rng.integers(0, len(P_GRID)))]
            n1 = fence.fence_norm(f, p)
            assert n1 > 0.0
            scale = float(rng.uniform(0.1, 5.0)) * (-1) ** int(rng.integers(0, 2))
            f2 = fence.DiracFence(
                weight=scale * w,
                base=base,
                map_matrix=f.map_matrix,
                map_offset=f.map_offset,
            )
            assert fence.fence_norm(f2, p) == pytest.approx(abs(scale) * n1, rel=1e-12)
