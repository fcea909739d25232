"""Building CPWL meshes from external sources.

Two sources are supported: scattered data (Delaunay triangulation with
supplied vertex values) and ReLU multilayer perceptrons.  A ReLU network
computes a CPWL function, so in favorable cases its mesh can be written
down exactly: in one dimension breakpoints propagate exactly through any
depth, and in two dimensions a single hidden layer induces a hyperplane
arrangement whose cells are the linear pieces.  Deeper 2-d networks fall
back to sampling on a grid (augmented with cell centers, so kinks along
either diagonal direction are captured without bias) and triangulating;
the result is then explicitly flagged as approximate in ``mesh.meta``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .cpwl import SimplicialCpwl
from .errors import InvariantViolation
from .mixed_fields import BoxDomain

_GEOM_RTOL = 1e-12
_MERGE_RTOL = 1e-9


# -- scattered data --------------------------------------------------------


def delaunay_cpwl_2d(points, values, name="", meta=None):
    """Delaunay triangulation of a planar point set with vertex values.

    Cocircular point groups are triangulated deterministically for a
    fixed input ordering, so rebuilding from the same data gives the
    same mesh.
    """
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float).reshape(-1)
    if points.ndim != 2 or points.shape[1] != 2:
        raise InvariantViolation("points must form an (N, 2) array")
    if points.shape[0] < 3:
        raise InvariantViolation("need at least 3 points")
    if values.shape[0] != points.shape[0]:
        raise InvariantViolation("need one value per point")
    try:
        tri = Delaunay(points)
    except QhullError as exc:
        raise InvariantViolation(f"points are collinear or degenerate: {exc}") from exc
    if tri.coplanar.size:
        raise InvariantViolation(
            f"{tri.coplanar.shape[0]} duplicate or unusable points in input"
        )
    base_meta = {"construction": "delaunay"}
    base_meta.update(meta or {})
    return SimplicialCpwl(points, tri.simplices, values, name=name, meta=base_meta)


# -- ReLU networks ---------------------------------------------------------


@dataclass(frozen=True)
class MlpWeights:
    """Weights of a ReLU MLP with a scalar output.

    ``layers`` is an ordered list of (weight matrix, bias vector) pairs;
    every layer but the last is followed by a ReLU.
    """

    layers: tuple = field(repr=False)
    input_dim: int = 0

    def __post_init__(self):
        layers = []
        prev = int(self.input_dim)
        if prev < 1:
            raise InvariantViolation("input dimension must be at least 1")
        if not self.layers:
            raise InvariantViolation("network needs at least one layer")
        for k, (w, b) in enumerate(self.layers):
            w = np.asarray(w, dtype=float)
            b = np.asarray(b, dtype=float).reshape(-1)
            if w.ndim != 2 or w.shape[1] != prev or w.shape[0] != b.shape[0]:
                raise InvariantViolation(
                    f"layer {k} shape {w.shape} does not chain (previous width {prev})"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise InvariantViolation(f"layer {k} has non-finite entries")
            w = w.copy()
            b = b.copy()
            w.setflags(write=False)
            b.setflags(write=False)
            layers.append((w, b))
            prev = w.shape[0]
        if prev != 1:
            raise InvariantViolation("network output must be scalar")
        object.__setattr__(self, "layers", tuple(layers))
        object.__setattr__(self, "input_dim", int(self.input_dim))

    @property
    def depth(self):
        """Number of hidden layers."""
        return len(self.layers) - 1


def mlp_forward(weights, points):
    """Network values at points, shape (N,)."""
    h = np.atleast_2d(np.asarray(points, dtype=float))
    if h.shape[1] != weights.input_dim:
        raise InvariantViolation(f"points must have dimension {weights.input_dim}")
    for w, b in weights.layers[:-1]:
        h = np.maximum(h @ w.T + b, 0.0)
    w, b = weights.layers[-1]
    return (h @ w.T + b)[:, 0]


class _Spline1D:
    """A stack of linear splines sharing one breakpoint list.

    Slopes are carried explicitly so that affine combinations and ReLU
    clipping never divide by interval lengths; only breakpoint locations
    and anchor values involve general arithmetic.
    """

    def __init__(self, bp, slopes, anchors):
        self.bp = np.asarray(bp, dtype=float)          # (K,) shared, sorted
        self.slopes = np.atleast_2d(slopes)            # (m, K+1)
        self.anchors = np.asarray(anchors, dtype=float)  # (m,) value at bp[0] or at 0

    def breakpoint_values(self):
        """Values of all splines at the shared breakpoints: (m, K)."""
        m = self.slopes.shape[0]
        seg = np.diff(self.bp)
        runs = np.cumsum(self.slopes[:, 1:-1] * seg[None, :], axis=1)
        return np.concatenate([np.zeros((m, 1)), runs], axis=1) + self.anchors[:, None]

    def values_at(self, x):
        """Values of all splines at locations x: (m, len(x))."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if self.bp.size == 0:
            return self.anchors[:, None] + self.slopes[:, :1] * x[None, :]
        bpv = self.breakpoint_values()
        idx = np.searchsorted(self.bp, x, side="right")
        ref = np.where(idx == 0, 0, idx - 1)
        return bpv[:, ref] + self.slopes[:, idx] * (x - self.bp[ref])[None, :]


def _affine_combine(spline, w, b):
    """w @ splines + b on the shared breakpoints (slopes combine exactly)."""
    return _Spline1D(
        spline.bp, w @ spline.slopes, w @ spline.anchors + np.asarray(b, dtype=float)
    )


def _relu_layer(spline):
    """Clip every component at zero, refining the shared breakpoints."""
    m = spline.slopes.shape[0]
    bp = spline.bp
    roots = []
    bp_vals = spline.breakpoint_values() if bp.size else np.empty((m, 0))
    for i in range(m):
        vals = bp_vals[i]
        # interior intervals
        for k in range(len(bp) - 1):
            y0, y1 = vals[k], vals[k + 1]
            if y0 * y1 < 0.0:
                roots.append(bp[k] - y0 / spline.slopes[i, k + 1])
        if bp.size:
            s0, sK = spline.slopes[i, 0], spline.slopes[i, -1]
            # left unbounded interval: crossing iff value and slope share sign
            if s0 != 0.0 and vals[0] * s0 > 0.0:
                roots.append(bp[0] - vals[0] / s0)
            # right unbounded interval: crossing iff value and slope oppose
            if sK != 0.0 and vals[-1] * sK < 0.0:
                roots.append(bp[-1] - vals[-1] / sK)
        elif spline.slopes[i, 0] != 0.0:
            roots.append(-spline.anchors[i] / spline.slopes[i, 0])
    new_bp = np.unique(np.concatenate([bp, np.asarray(roots, dtype=float)]))

    # rebuild every component on the refined grid
    if new_bp.size == 0:
        # affine network with no kinks anywhere
        slopes = spline.slopes.copy()
        anchors = spline.anchors.copy()
        positive = anchors > 0.0
        slopes[~positive] = 0.0
        anchors = np.maximum(anchors, 0.0)
        return _Spline1D(new_bp, slopes, anchors)

    span = max(1.0, float(new_bp[-1] - new_bp[0]))
    probes = np.concatenate(
        [[new_bp[0] - span], (new_bp[:-1] + new_bp[1:]) / 2.0, [new_bp[-1] + span]]
    )
    old_at_new = spline.values_at(new_bp)              # (m, K')
    old_at_probes = spline.values_at(probes)           # (m, K'+1)
    old_idx = np.searchsorted(bp, probes, side="right") if bp.size else np.zeros(
        probes.size, dtype=int
    )
    new_slopes = spline.slopes[:, old_idx]             # slope of containing interval
    new_slopes = np.where(old_at_probes > 0.0, new_slopes, 0.0)
    new_anchors = np.maximum(old_at_new[:, 0], 0.0)
    return _Spline1D(new_bp, new_slopes, new_anchors)


def relu_to_cpwl_1d(weights):
    """Exact breakpoints and interval slopes of a 1-d ReLU network.

    Breakpoints are propagated layer by layer: every zero crossing of a
    preactivation inserts one.  Slopes are exact (they are sums and
    products of weights, never divided differences).  Breakpoints whose
    slope jump is exactly zero are pruned.
    """
    if weights.input_dim != 1:
        raise InvariantViolation("relu_to_cpwl_1d requires input dimension 1")
    spline = _Spline1D(np.empty(0), np.ones((1, 1)), np.zeros(1))  # identity
    for w, b in weights.layers[:-1]:
        spline = _relu_layer(_affine_combine(spline, w, b))
    w, b = weights.layers[-1]
    out = _affine_combine(spline, w, b)
    bp, slopes = out.bp, out.slopes[0]
    jumps = np.diff(slopes)
    keep = jumps != 0.0
    return bp[keep], np.concatenate([[slopes[0]], slopes[1:][keep]])


def mesh_from_relu_1d(weights, lo=None, hi=None, margin=1.0):
    """1-d mesh of the network on [lo, hi] with breakpoints as vertices."""
    bp, _ = relu_to_cpwl_1d(weights)
    if lo is None:
        lo = (bp[0] if bp.size else 0.0) - margin
    if hi is None:
        hi = (bp[-1] if bp.size else 0.0) + margin
    inner = bp[(bp > lo) & (bp < hi)]
    xs = np.concatenate([[lo], inner, [hi]])
    if len(xs) < 2 or np.any(np.diff(xs) <= 0.0):
        raise InvariantViolation("interval does not properly contain the breakpoints")
    vals = mlp_forward(weights, xs[:, None])
    simplices = np.column_stack([np.arange(len(xs) - 1), np.arange(1, len(xs))])
    return SimplicialCpwl(
        xs[:, None], simplices, vals, meta={"construction": "relu-exact-1d"}
    )


# -- 2-d arrangement (exact path) ------------------------------------------


class _VertexPool:
    """Deduplicates nearly identical points with a spatial hash."""

    def __init__(self, tol):
        self.tol = tol
        self.points = []
        self.cells = {}

    def index(self, p):
        key = (round(p[0] / self.tol), round(p[1] / self.tol))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self.cells.get((key[0] + dx, key[1] + dy), ()):
                    q = self.points[idx]
                    if abs(q[0] - p[0]) <= self.tol and abs(q[1] - p[1]) <= self.tol:
                        return idx
        idx = len(self.points)
        self.points.append((float(p[0]), float(p[1])))
        self.cells.setdefault(key, []).append(idx)
        return idx


def _split_cell(poly, line_w, line_b, tol):
    """Split a convex polygon by the line w.x + b = 0; returns 1 or 2 cells."""
    s = poly @ line_w + line_b
    side = np.zeros(len(poly), dtype=int)
    side[s > tol] = 1
    side[s < -tol] = -1
    if not np.any(side > 0) or not np.any(side < 0):
        return [poly]
    plus, minus = [], []
    n = len(poly)
    for i in range(n):
        j = (i + 1) % n
        if side[i] >= 0:
            plus.append(poly[i])
        if side[i] <= 0:
            minus.append(poly[i])
        if side[i] * side[j] < 0:
            t = s[i] / (s[i] - s[j])
            q = poly[i] + t * (poly[j] - poly[i])
            plus.append(q)
            minus.append(q)
    return [np.asarray(c) for c in (plus, minus) if len(c) >= 3]


def _strip_collinear(poly, tol):
    keep = []
    n = len(poly)
    for i in range(n):
        a, b, c = poly[i - 1], poly[i], poly[(i + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if abs(cross) > tol:
            keep.append(poly[i])
    return np.asarray(keep) if len(keep) >= 3 else None


def relu_to_cpwl_2d(weights, box, cells=64, method="auto"):
    """CPWL mesh of a 2-d ReLU network over a box.

    A single hidden layer admits the exact path: the hidden hyperplanes
    are intersected with the box, the arrangement cells triangulated,
    and vertex values taken from the network (exact by per-cell
    linearity).  Deeper networks use the approximate path: the network
    is sampled on a grid of ``cells`` cells per axis plus the cell
    centers and triangulated around the centers (see
    :func:`_relu_approximate_2d` for why the triangulation matters).
    ``mesh.meta["construction"]`` records which path produced the
    result; asking for ``method="exact"`` on an unsupported depth raises
    instead of silently downgrading.
    """
    if weights.input_dim != 2:
        raise InvariantViolation("relu_to_cpwl_2d requires input dimension 2")
    box = box if isinstance(box, BoxDomain) else BoxDomain(*box)
    if box.dim != 2:
        raise InvariantViolation("box must be two-dimensional")
    if method not in ("auto", "exact", "approximate"):
        raise InvariantViolation(f"unknown method {method!r}")
    exact_possible = weights.depth == 1
    if method == "exact" and not exact_possible:
        raise InvariantViolation(
            f"exact import supports exactly one hidden layer, got {weights.depth}"
        )
    if method == "auto" and not exact_possible:
        warnings.warn(
            f"network has {weights.depth} hidden layers; downgrading to the "
            "approximate sampled import",
            stacklevel=2,
        )
    if method == "approximate" or not exact_possible:
        return _relu_approximate_2d(weights, box, cells)
    return _relu_exact_2d(weights, box)


def _relu_exact_2d(weights, box):
    (lo_x, lo_y), (hi_x, hi_y) = box.lower, box.upper
    corners = np.array(
        [[lo_x, lo_y], [hi_x, lo_y], [hi_x, hi_y], [lo_x, hi_y]]
    )
    scale = float(np.max(np.abs(corners)))
    w, b = weights.layers[0]
    cells = [corners]
    for row, bias in zip(w, b):
        wnorm = float(np.linalg.norm(row))
        if wnorm == 0.0:
            continue
        tol = _GEOM_RTOL * (wnorm * scale + abs(bias) + 1.0)
        cells = [piece for cell in cells for piece in _split_cell(cell, row, bias, tol)]

    area_tol = _GEOM_RTOL * max(scale, 1.0) ** 2
    pool = _VertexPool(_MERGE_RTOL * max(scale, 1.0))
    triangles = []
    for cell in cells:
        cleaned = _strip_collinear(cell, area_tol)
        if cleaned is None:
            continue
        ids = [pool.index(p) for p in cleaned]
        for k in range(1, len(ids) - 1):
            triangles.append((ids[0], ids[k], ids[k + 1]))
    points = np.asarray(pool.points)
    values = mlp_forward(weights, points)
    return SimplicialCpwl(
        points, np.asarray(triangles), values, meta={"construction": "relu-exact"}
    )


def _relu_approximate_2d(weights, box, cells):
    """Sample on an (n+1)x(n+1) grid plus the n x n cell centers and
    triangulate each cell as a fan of four triangles around its center.

    The point set is the grid-with-centers lattice; the center fan is a
    Delaunay triangulation of it (every circumdisk is empty) chosen for
    its edge directions: axis-aligned edges along grid lines and both
    diagonal directions through the centers, so kinks along any of those
    four directions are representable without staircasing.  A generic
    qhull triangulation of the same points breaks the cocircular ties
    arbitrarily and can double the apparent HTV of diagonal kinks.
    """
    n = int(cells)
    if n < 2:
        raise InvariantViolation("approximate import needs at least 2 cells per axis")
    xs = np.linspace(box.lower[0], box.upper[0], n + 1)
    ys = np.linspace(box.lower[1], box.upper[1], n + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    cx = (xs[:-1] + xs[1:]) / 2.0
    cy = (ys[:-1] + ys[1:]) / 2.0
    gcx, gcy = np.meshgrid(cx, cy, indexing="ij")
    centers = np.column_stack([gcx.ravel(), gcy.ravel()])
    points = np.vstack([grid, centers])
    values = mlp_forward(weights, points)

    corner = lambda i, j: i * (n + 1) + j
    center = lambda i, j: (n + 1) * (n + 1) + i * n + j
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    c = center(ii, jj)
    quarters = [
        (corner(ii, jj), corner(ii + 1, jj), c),
        (corner(ii + 1, jj), corner(ii + 1, jj + 1), c),
        (corner(ii + 1, jj + 1), corner(ii, jj + 1), c),
        (corner(ii, jj + 1), corner(ii, jj), c),
    ]
    triangles = np.vstack([np.column_stack(q) for q in quarters])
    return SimplicialCpwl(
        points,
        triangles,
        values,
        meta={"construction": "relu-approximate", "cells": n},
    )
