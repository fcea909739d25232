"""Dirac fence calculus.

A Dirac fence is a matrix-weighted Dirac layer supported on the graph of
an affine map over a compact convex base: weight A (d x d), base C (a
convex polytope in R^d1, d1 < d), and an affine map T: R^d1 -> R^(d-d1).
The fence lives in R^d as {(x1, T x1) : x1 in C} with the base block
occupying the ambient axes listed in ``base_axes``.  Such distributions
are exactly what the generalized Hessian of a piecewise-linear function
looks like across a facet.

The norm of a fence is ||A||_Sp * Leb(C).  Sums of fences are additive
in norm when the fences coincide only on a set of measure zero, which
for affine maps is decidable: two fences interfere precisely when they
share the coordinate split, realize the same affine map, and their bases
overlap on a set of positive d1-volume.  ``fences_total_norm`` refuses
to sum interfering fences rather than returning a wrong value.

Maps are restricted to affine ones; a point base (d1 = 0) carries
Lebesgue measure 1 by convention, which aligns the one-dimensional case
with second-order total variation.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, Delaunay, QhullError

from . import matnorm
from .errors import InvariantViolation

# tolerance for deciding that two affine maps are the same map
_MAP_RTOL = 1e-12
# minimal Chebyshev radius for a polytope intersection to count as full
# dimensional
_INTERIOR_TOL = 1e-12


def leb_polytope(vertices):
    """Lebesgue measure of the convex hull of points in R^d1.

    Computed by triangulating the hull and summing Gram-determinant
    simplex volumes.  A point (d1 = 0) has measure 1 by convention.
    Affinely dependent vertex sets report volume 0; building a fence on
    such a base is rejected.
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2:
        raise InvariantViolation("polytope vertices must form a 2-d array")
    if not np.all(np.isfinite(v)):
        raise InvariantViolation("polytope vertices must be finite")
    m, d1 = v.shape
    if m == 0:
        raise InvariantViolation("polytope needs at least one vertex")
    if d1 == 0:
        return 1.0
    if m < d1 + 1:
        return 0.0
    if d1 == 1:
        return float(np.max(v) - np.min(v))
    try:
        tri = Delaunay(v)
    except QhullError:
        return 0.0
    total = 0.0
    fact = math.factorial(d1)
    for simplex in tri.simplices:
        edges = v[simplex[1:]] - v[simplex[0]]
        gram = edges @ edges.T
        total += math.sqrt(max(np.linalg.det(gram), 0.0)) / fact
    return total


@dataclass(frozen=True)
class DiracFence:
    """Matrix-weighted Dirac layer on the graph of an affine map.

    ``base_axes`` records which ambient coordinates carry the base block
    (the remaining axes are the graph directions).  It defaults to the
    leading axes and only matters when fences from different coordinate
    splits are combined.
    """

    weight: np.ndarray = field(repr=False)
    base: np.ndarray = field(repr=False)
    map_matrix: np.ndarray = field(repr=False)
    map_offset: np.ndarray = field(repr=False)
    base_axes: tuple = None

    def __post_init__(self):
        w = np.asarray(self.weight, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise InvariantViolation("fence weight must be a square matrix")
        if not np.all(np.isfinite(w)):
            raise InvariantViolation("fence weight must be finite")
        if not np.any(w):
            raise InvariantViolation("fence weight must be nonzero")
        d = w.shape[0]
        base = np.atleast_2d(np.asarray(self.base, dtype=float))
        d1 = base.shape[1]
        if d1 >= d:
            raise InvariantViolation(f"base dimension {d1} must be below {d}")
        mat = np.asarray(self.map_matrix, dtype=float).reshape(d - d1, d1)
        off = np.asarray(self.map_offset, dtype=float).reshape(d - d1)
        if not (np.all(np.isfinite(mat)) and np.all(np.isfinite(off))):
            raise InvariantViolation("fence map must be finite")
        axes = self.base_axes
        axes = tuple(range(d1)) if axes is None else tuple(int(a) for a in axes)
        if len(axes) != d1 or len(set(axes)) != d1 or any(not 0 <= a < d for a in axes):
            raise InvariantViolation("base_axes must be d1 distinct ambient axes")
        volume = leb_polytope(base)
        if d1 > 0 and volume <= 0.0:
            raise InvariantViolation("fence base is degenerate (zero volume)")
        for name, value in (
            ("weight", w), ("base", base), ("map_matrix", mat), ("map_offset", off)
        ):
            value = value.copy()
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "base_axes", axes)
        object.__setattr__(self, "base_volume", volume)

    @property
    def dim(self):
        return self.weight.shape[0]

    @property
    def base_dim(self):
        return self.base.shape[1]


def fence_norm(f, p):
    """||A||_Sp times the Lebesgue measure of the base."""
    p = matnorm.check_order(p)
    return matnorm.schatten_norm(f.weight, p) * f.base_volume


def _same_map(a, b):
    scale = max(
        1.0,
        float(np.max(np.abs(a.map_matrix), initial=0.0)),
        float(np.max(np.abs(b.map_matrix), initial=0.0)),
        float(np.max(np.abs(a.map_offset), initial=0.0)),
        float(np.max(np.abs(b.map_offset), initial=0.0)),
    )
    tol = _MAP_RTOL * scale
    return np.all(np.abs(a.map_matrix - b.map_matrix) <= tol) and np.all(
        np.abs(a.map_offset - b.map_offset) <= tol
    )


def _bases_overlap(a, b):
    """Whether two convex bases intersect with positive d1-volume."""
    d1 = a.base_dim
    if d1 == 0:
        return True  # single points of R^0, measure 1 by convention
    if d1 == 1:
        lo = max(float(np.min(a.base)), float(np.min(b.base)))
        hi = min(float(np.max(a.base)), float(np.max(b.base)))
        return hi - lo > 0.0
    # Chebyshev radius of the joint halfspace system; positive radius
    # means the intersection contains a ball
    try:
        eq = np.vstack([_hull_equations(a.base), _hull_equations(b.base)])
    except QhullError:
        return False
    norms = np.linalg.norm(eq[:, :-1], axis=1)
    a_ub = np.column_stack([eq[:, :-1], norms])
    b_ub = -eq[:, -1]
    c = np.zeros(d1 + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * d1 + [(0, None)])
    if not res.success:
        return False
    scale = max(1.0, float(np.max(np.abs(a.base))), float(np.max(np.abs(b.base))))
    return float(res.x[-1]) > _INTERIOR_TOL * scale


def _hull_equations(points):
    return ConvexHull(points).equations


def fences_coincide(a, b):
    """True when two fences overlap on a set of positive base measure.

    Coincidence requires the same ambient dimension and coordinate
    split, the same affine map, and bases that intersect with positive
    volume; affine maps that differ agree at most on a lower-dimensional
    set, which is harmless for additivity.
    """
    if a.dim != b.dim:
        raise InvariantViolation("fences live in different ambient dimensions")
    if a.base_dim != b.base_dim or a.base_axes != b.base_axes:
        return False
    if not _same_map(a, b):
        return False
    return _bases_overlap(a, b)


def fences_total_norm(fences, p):
    """Sum of fence norms, valid only for non-interfering fences.

    Raises :class:`InvariantViolation` if any pair coincides on a set of
    positive measure instead of silently returning a wrong sum.
    """
    p = matnorm.check_order(p)
    fences = list(fences)
    for i in range(len(fences)):
        for j in range(i + 1, len(fences)):
            if fences_coincide(fences[i], fences[j]):
                raise InvariantViolation(
                    f"fences {i} and {j} overlap on a set of positive measure; "
                    "their combined norm is not the sum of norms"
                )
    return float(sum(fence_norm(f, p) for f in fences))
