"""Reference meshes and coefficient sets used by tests, demos and docs.

The pyramid is the workhorse: f = max(0, 1 - |x1| - |x2|) triangulated
over [-2, 2]^2 with the flat exterior meshed explicitly.  Its HTV is 16
for every Schatten order: the four spoke facets contribute jump 2 times
length 1 each, the four diamond facets jump sqrt(2) times length sqrt(2)
each, and the exterior facets carry no jump.
"""

import numpy as np

from .construct import delaunay_cpwl_2d
from .cpwl import SimplicialCpwl


def hat_1d():
    """Unit hat on [-1, 1] with flat tails, meshed on [-2, 2]; HTV 4."""
    xs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    values = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    simplices = np.column_stack([np.arange(4), np.arange(1, 5)])
    return SimplicialCpwl(xs[:, None], simplices, values, name="hat-1d")


def pyramid_2d():
    """Pyramid max(0, 1 - |x1| - |x2|) on [-2, 2]^2; HTV 16, 5 regions."""
    vertices = np.array(
        [
            [0.0, 0.0],                                     # 0 apex
            [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0],   # 1-4 diamond
            [2.0, 0.0], [0.0, 2.0], [-2.0, 0.0], [0.0, -2.0],   # 5-8 edge middles
            [2.0, 2.0], [-2.0, 2.0], [-2.0, -2.0], [2.0, -2.0],  # 9-12 corners
        ]
    )
    values = np.zeros(len(vertices))
    values[0] = 1.0
    interior = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1)]
    # each quadrant: diamond edge (d1, d2), box corner c, edge middles m1, m2
    quadrants = [
        (1, 5, 9, 2, 6),
        (2, 6, 10, 3, 7),
        (3, 7, 11, 4, 8),
        (4, 8, 12, 1, 5),
    ]
    exterior = []
    for d1, m1, c, d2, m2 in quadrants:
        exterior += [(d1, m1, c), (d1, c, d2), (d2, c, m2)]
    return SimplicialCpwl(
        vertices, np.array(interior + exterior), values, name="pyramid-2d"
    )


def two_tets_3d():
    """Two tetrahedra sharing the triangle {0,0,0},{1,0,0},{0,1,0}.

    Vertex values sample |x3|, so the gradient jumps by (0,0,2) across
    the shared face of area 1/2: HTV 1.
    """
    vertices = np.array(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ]
    )
    values = np.array([0.0, 0.0, 0.0, 1.0, 1.0])
    simplices = np.array([[0, 1, 2, 3], [0, 1, 2, 4]])
    return SimplicialCpwl(vertices, simplices, values, name="two-tets-3d")


def separated_points(rng, n, low, high, min_dist, existing=()):
    """Rejection-sample n points with pairwise separation min_dist."""
    points = list(existing)
    fresh = []
    attempts = 0
    while len(fresh) < n:
        attempts += 1
        if attempts > 100000:
            raise RuntimeError("separation too tight for the requested count")
        c = rng.uniform(low, high, 2)
        if all(np.linalg.norm(c - q) >= min_dist for q in points):
            points.append(c)
            fresh.append(c)
    return np.array(fresh)


def random_delaunay_2d(seed=0, n_interior=7, min_dist=0.75):
    """Random Delaunay mesh on [-2, 2]^2 with a flat collar.

    Box corners and a ring of radius ~1.7 carry value zero while
    well-separated random interior points carry random values.  The
    separation keeps gradients moderate and kink lines far apart, and
    the flat collar keeps every facet with a nonzero jump away from the
    box boundary: grid-based estimators that drop a boundary layer of
    nodes and aggregate over small blocks then see all of the mass.
    """
    rng = np.random.default_rng(seed)
    corners = np.array([[-2.0, -2.0], [2.0, -2.0], [2.0, 2.0], [-2.0, 2.0]])
    angles = np.linspace(0.0, 2.0 * np.pi, 13)[:-1]
    ring = 1.7 * np.column_stack([np.cos(angles), np.sin(angles)])
    interior = separated_points(rng, n_interior, -1.1, 1.1, min_dist)
    points = np.vstack([corners, ring, interior])
    values = np.concatenate([np.zeros(len(corners) + len(ring)),
                             rng.standard_normal(n_interior)])
    return delaunay_cpwl_2d(points, values, name=f"random-delaunay-2d-{seed}")


def affine_mesh_2d(a=(3.0, -2.0), b=5.0):
    """Triangulated box carrying an affine function; HTV 0, one region."""
    xs = np.linspace(-1.0, 1.0, 4)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    points = np.column_stack([gx.ravel(), gy.ravel()])
    values = points @ np.asarray(a, dtype=float) + b
    return delaunay_cpwl_2d(points, values, name="affine-2d")


def affine_mesh_1d(a=0.75, b=-0.5):
    xs = np.linspace(-1.0, 1.0, 6)
    simplices = np.column_stack([np.arange(5), np.arange(1, 6)])
    return SimplicialCpwl(
        xs[:, None], simplices, a * xs + b, name="affine-1d"
    )


def random_mesh_1d(rng, n_pieces=None):
    """Random sorted 1-d mesh with random slopes (via random values)."""
    n = int(n_pieces if n_pieces is not None else rng.integers(2, 12))
    xs = np.sort(rng.uniform(-3.0, 3.0, n + 1))
    while np.any(np.diff(xs) < 1e-6):
        xs = np.sort(rng.uniform(-3.0, 3.0, n + 1))
    simplices = np.column_stack([np.arange(n), np.arange(1, n + 1)])
    return SimplicialCpwl(xs[:, None], simplices, rng.standard_normal(n + 1))


def default_rbf_mixture():
    """Fixed 5-center Gaussian mixture used by the width-sweep command."""
    centers = np.array(
        [[0.0, 0.0], [0.6, 0.2], [-0.5, 0.4], [0.2, -0.6], [-0.3, -0.4]]
    )
    weights = np.array([1.0, -0.7, 0.5, 0.8, -0.6])
    return centers, weights
