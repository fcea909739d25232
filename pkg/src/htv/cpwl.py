"""Exact HTV of continuous piecewise-linear functions on simplicial meshes.

A CPWL function is represented by vertex values on a simplicial mesh,
which makes continuity hold by construction; a partition into general
convex polytopes is handled by triangulating each cell, which leaves the
HTV unchanged (facets interior to a cell carry no gradient jump).

The HTV of such a function is a finite sum over interior facets: the
Euclidean norm of the gradient jump times the (d-1)-dimensional surface
measure of the shared face.  The value does not depend on the Schatten
order because the Hessian concentrated on a facet is a rank-1 layer.
In one dimension a facet is a single breakpoint with counting measure 1,
so the HTV coincides with second-order total variation.

Meshes are immutable after construction and all queries are pure.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import matnorm
from .errors import InvariantViolation, NumericalError
from .fence import DiracFence

# relative volume below which a simplex counts as degenerate
_VOLUME_RTOL = 1e-12
# affine interpolation residual bound, relative to the value scale
_RESIDUAL_RTOL = 1e-10
# default merge tolerance for region counting
REGION_MERGE_RTOL = 1e-10
# gradient jumps must be parallel to the facet normal within this angle
_PARALLEL_TOL = 1e-8
# jumps below this (relative to the gradient scale) produce no fence
_FENCE_JUMP_RTOL = 1e-12


@dataclass(frozen=True)
class AffinePiece:
    """Affine restriction a.x + b of the function to one simplex."""

    simplex: int
    gradient: np.ndarray
    offset: float


@dataclass(frozen=True)
class Facet:
    """Shared (d-1)-face between two adjacent simplices.

    ``normal`` is the unit normal pointing outward from ``simplex_a``
    (the smaller index): normal . x + offset <= 0 on that simplex.
    ``measure`` is the (d-1)-dimensional Hausdorff measure of the face;
    a point (1-d meshes) counts as 1.
    """

    simplex_a: int
    simplex_b: int
    vertex_ids: tuple
    measure: float
    normal: np.ndarray = field(repr=False)
    offset: float = 0.0


class SimplicialCpwl:
    """Simplicial mesh with one value per vertex.

    Validates, on construction: positive simplex volumes, no face shared
    by three or more simplices, facet-connectedness, and exact affine
    interpolation of the vertex values on every simplex.  Derived data
    (per-simplex gradients and offsets, facet adjacency with measures
    and oriented unit normals) is computed eagerly and frozen.
    """

    def __init__(self, vertices, simplices, values, name="", meta=None):
        vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        simplices = np.atleast_2d(np.asarray(simplices, dtype=np.int64))
        values = np.asarray(values, dtype=float).reshape(-1)
        if vertices.ndim != 2 or vertices.shape[0] == 0:
            raise InvariantViolation("vertices must form a nonempty (V, d) array")
        d = vertices.shape[1]
        if d < 1:
            raise InvariantViolation("mesh dimension must be at least 1")
        if not np.all(np.isfinite(vertices)):
            raise InvariantViolation("vertex coordinates must be finite")
        if values.shape[0] != vertices.shape[0]:
            raise InvariantViolation("need exactly one value per vertex")
        if not np.all(np.isfinite(values)):
            raise InvariantViolation("vertex values must be finite")
        if simplices.ndim != 2 or simplices.shape[0] == 0 or simplices.shape[1] != d + 1:
            raise InvariantViolation(
                f"simplices must form a nonempty (S, {d + 1}) index array"
            )
        if simplices.min() < 0 or simplices.max() >= vertices.shape[0]:
            raise InvariantViolation("simplex vertex index out of range")
        if any(len(set(row)) != d + 1 for row in simplices.tolist()):
            raise InvariantViolation("simplex vertices must be distinct")

        self.vertices = vertices
        self.simplices = simplices
        self.values = values
        self.name = str(name)
        self.meta = dict(meta) if meta else {}

        self._check_volumes()
        self._fit_pieces()
        self._build_facets()
        for arr in (self.vertices, self.simplices, self.values,
                    self.piece_gradients, self.piece_offsets,
                    self.facet_pairs, self.facet_faces, self.facet_measures,
                    self.facet_normals, self.facet_offsets):
            arr.setflags(write=False)

    # -- construction ------------------------------------------------

    def _check_volumes(self):
        corners = self.vertices[self.simplices]          # (S, d+1, d)
        edges = corners[:, 1:] - corners[:, :1]          # (S, d, d)
        vols = np.abs(np.linalg.det(edges)) / math.factorial(self.dim)
        edge_scale = np.max(np.linalg.norm(edges, axis=2), axis=1)
        floor = _VOLUME_RTOL * edge_scale ** self.dim / math.factorial(self.dim)
        bad = np.nonzero(vols <= floor)[0]
        if bad.size:
            raise InvariantViolation(f"degenerate simplex at index {bad[0]}")
        self.simplex_volumes = vols

    def _fit_pieces(self):
        corners = self.vertices[self.simplices]
        s = corners.shape[0]
        mats = np.concatenate([corners, np.ones((s, self.dim + 1, 1))], axis=2)
        rhs = self.values[self.simplices]
        try:
            sol = np.linalg.solve(mats, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"singular interpolation system: {exc}") from exc
        resid = np.abs(np.einsum("sij,sj->si", mats, sol) - rhs).max()
        scale = max(1.0, float(np.abs(self.values).max()))
        if resid > _RESIDUAL_RTOL * scale:
            raise NumericalError(
                f"affine interpolation residual {resid:.3e} exceeds tolerance"
            )
        self.piece_gradients = sol[:, : self.dim].copy()
        self.piece_offsets = sol[:, self.dim].copy()

    def _build_facets(self):
        d = self.dim
        s = self.simplices.shape[0]
        # all (d-1)-faces: drop one vertex at a time, key on sorted ids
        faces = np.stack(
            [np.delete(self.simplices, i, axis=1) for i in range(d + 1)], axis=1
        ).reshape(s * (d + 1), d)
        faces_sorted = np.sort(faces, axis=1)
        owners = np.repeat(np.arange(s), d + 1)
        # dropping vertex i from simplex n leaves that vertex opposite the face
        opposite = self.simplices.reshape(-1)

        uniq, inverse, counts = np.unique(
            faces_sorted, axis=0, return_inverse=True, return_counts=True
        )
        if np.any(counts > 2):
            raise InvariantViolation("a face is shared by three or more simplices")

        order = np.argsort(inverse, kind="stable")
        interior_ids = np.nonzero(counts == 2)[0]
        # positions of each unique face's occurrences in the sorted stream
        starts = np.searchsorted(inverse[order], interior_ids)
        first, second = order[starts], order[starts + 1]
        a_owner, b_owner = owners[first], owners[second]
        swap = a_owner > b_owner
        a_owner, b_owner = np.where(swap, b_owner, a_owner), np.where(swap, a_owner, b_owner)
        a_opp = np.where(swap, opposite[second], opposite[first])

        # order facets by first appearance so sums are reproducible and,
        # for sorted 1-d meshes, spatially ordered
        appearance = np.argsort(np.minimum(first, second), kind="stable")
        a_owner, b_owner = a_owner[appearance], b_owner[appearance]
        a_opp = a_opp[appearance]
        face_ids = uniq[interior_ids][appearance]

        # connectivity of the facet graph
        if s > 1:
            graph = coo_matrix(
                (np.ones(len(a_owner)), (a_owner, b_owner)), shape=(s, s)
            )
            n_comp, _ = connected_components(graph, directed=False)
            if n_comp != 1:
                raise InvariantViolation(
                    f"mesh is not facet-connected ({n_comp} components)"
                )

        pts = self.vertices[face_ids]                    # (F, d, d)
        opp_pts = self.vertices[a_opp]                   # (F, d)
        normals, measures = _face_normals_measures(pts, d)
        # orient outward from the smaller-index simplex
        side = np.einsum("fd,fd->f", normals, opp_pts - pts[:, 0])
        normals[side > 0] *= -1.0
        offsets = -np.einsum("fd,fd->f", normals, pts[:, 0])

        self.facet_pairs = np.column_stack([a_owner, b_owner])
        self.facet_faces = face_ids
        self.facet_measures = measures
        self.facet_normals = normals
        self.facet_offsets = offsets

    # -- basic queries -------------------------------------------------

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def num_simplices(self):
        return self.simplices.shape[0]

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def __repr__(self):
        return (
            f"SimplicialCpwl(dim={self.dim}, vertices={len(self.vertices)}, "
            f"simplices={self.num_simplices}, facets={len(self.facet_pairs)})"
        )


def _face_normals_measures(pts, d):
    """Unit normals and H^(d-1) measures for stacked faces (F, d, d)."""
    f = pts.shape[0]
    if d == 1:
        # a face is a single point; H^0 counts points
        return np.ones((f, 1)), np.ones(f)
    edges = pts[:, 1:] - pts[:, :1]                      # (F, d-1, d)
    if d == 2:
        e = edges[:, 0]
        length = np.linalg.norm(e, axis=1)
        normals = np.column_stack([e[:, 1], -e[:, 0]]) / length[:, None]
        return normals, length
    if d == 3:
        cross = np.cross(edges[:, 0], edges[:, 1])
        area2 = np.linalg.norm(cross, axis=1)
        return cross / area2[:, None], area2 / 2.0
    # general dimension: null space of the edge span, Gram measure
    normals = np.empty((f, d))
    measures = np.empty(f)
    fact = math.factorial(d - 1)
    for k in range(f):
        e = edges[k]
        _, _, vt = np.linalg.svd(e)
        normals[k] = vt[-1]
        measures[k] = math.sqrt(max(np.linalg.det(e @ e.T), 0.0)) / fact
    return normals, measures


def _jumps(mesh):
    """Gradient jump magnitude per facet (plain abs in one dimension)."""
    ga = mesh.piece_gradients[mesh.facet_pairs[:, 0]]
    gb = mesh.piece_gradients[mesh.facet_pairs[:, 1]]
    delta = gb - ga
    if mesh.dim == 1:
        return np.abs(delta[:, 0])
    return np.linalg.norm(delta, axis=1)


def fit_affine_pieces(mesh):
    """Per-simplex affine pieces, solved exactly from the vertex values."""
    return [
        AffinePiece(n, mesh.piece_gradients[n].copy(), float(mesh.piece_offsets[n]))
        for n in range(mesh.num_simplices)
    ]


def adjacency(mesh):
    """One :class:`Facet` per unordered pair of adjacent simplices."""
    out = []
    for k in range(len(mesh.facet_pairs)):
        a, b = mesh.facet_pairs[k]
        out.append(
            Facet(
                simplex_a=int(a),
                simplex_b=int(b),
                vertex_ids=tuple(int(i) for i in mesh.facet_faces[k]),
                measure=float(mesh.facet_measures[k]),
                normal=mesh.facet_normals[k].copy(),
                offset=float(mesh.facet_offsets[k]),
            )
        )
    return out


def _barycentric_scan(mesh, x):
    """Index of the first simplex containing x, or -1."""
    x = np.asarray(x, dtype=float).reshape(mesh.dim)
    for n in range(mesh.num_simplices):
        corners = mesh.vertices[mesh.simplices[n]]
        edges = (corners[1:] - corners[0]).T
        try:
            lam = np.linalg.solve(edges, x - corners[0])
        except np.linalg.LinAlgError:
            continue
        lam0 = 1.0 - lam.sum()
        if lam.min(initial=lam0) >= -1e-12:
            return n
    return -1


def gradient_at(mesh, x):
    """Gradient of the containing affine piece.

    On a shared face the piece with the smaller simplex index wins (a
    measure-zero convention).  Points outside the mesh raise.
    """
    n = _barycentric_scan(mesh, x)
    if n < 0:
        raise InvariantViolation(f"point {np.asarray(x)} lies outside the mesh")
    return mesh.piece_gradients[n].copy()


def evaluate(mesh, points):
    """Function values at many points (first-containing-simplex rule)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != mesh.dim:
        raise InvariantViolation(f"points must have dimension {mesh.dim}")
    out = np.full(len(pts), np.nan)
    todo = np.arange(len(pts))
    for n in range(mesh.num_simplices):
        if todo.size == 0:
            break
        corners = mesh.vertices[mesh.simplices[n]]
        edges = (corners[1:] - corners[0]).T
        lam = np.linalg.solve(edges, (pts[todo] - corners[0]).T).T
        inside = (lam.min(axis=1) >= -1e-12) & (lam.sum(axis=1) <= 1.0 + 1e-12)
        hit = todo[inside]
        out[hit] = pts[hit] @ mesh.piece_gradients[n] + mesh.piece_offsets[n]
        todo = todo[~inside]
    if todo.size:
        raise InvariantViolation(
            f"{todo.size} evaluation points lie outside the mesh"
        )
    return out


def htv(mesh, p=1.0):
    """HTV of the mesh function: sum of jump * facet measure.

    The result is the same for every Schatten order p (the order is
    validated and otherwise ignored): each facet carries a rank-1
    Hessian layer whose Schatten norms all equal the jump magnitude.
    """
    matnorm.check_order(p)
    return float(np.sum(_jumps(mesh) * mesh.facet_measures))


def hessian_fences(mesh):
    """The generalized Hessian as a list of Dirac fences, one per facet
    with a nonzero gradient jump.

    The fence across a facet with outward unit normal u and gradient jump
    delta = a_k - a_n has weight (delta u^T) / |u_i*|, base equal to the
    face projected onto the ambient axes other than i*, and map equal to
    the supporting hyperplane solved for coordinate i*, where i* is the
    largest-magnitude normal component.  The projection factor makes the
    fence norm equal jump * H^(d-1)(face) for every order, so the fence
    norms sum to the HTV.
    """
    d = mesh.dim
    fences = []
    scale = max(1.0, float(np.linalg.norm(mesh.piece_gradients, axis=1).max()))
    for k in range(len(mesh.facet_pairs)):
        a, b = mesh.facet_pairs[k]
        delta = mesh.piece_gradients[b] - mesh.piece_gradients[a]
        jump = float(np.linalg.norm(delta))
        if jump <= _FENCE_JUMP_RTOL * scale:
            continue
        u = mesh.facet_normals[k]
        resid = delta - (delta @ u) * u
        if np.linalg.norm(resid) > _PARALLEL_TOL * jump:
            raise InvariantViolation(
                f"continuity violation: gradient jump on facet {k} is not "
                "parallel to the facet normal"
            )
        pivot = int(np.argmax(np.abs(u)))
        rest = [j for j in range(d) if j != pivot]
        face_pts = mesh.vertices[mesh.facet_faces[k]]
        base = face_pts[:, rest]
        map_matrix = (-u[rest] / u[pivot]).reshape(1, d - 1)
        map_offset = np.array([-mesh.facet_offsets[k] / u[pivot]])
        fences.append(
            DiracFence(
                weight=np.outer(delta, u) / abs(u[pivot]),
                base=base,
                map_matrix=map_matrix,
                map_offset=map_offset,
                base_axes=tuple(rest),
            )
        )
    return fences


def region_count(mesh, merge_rtol=REGION_MERGE_RTOL):
    """Number of linear regions: facet-connected components after merging
    adjacent simplices whose affine pieces agree within tolerance."""
    s = mesh.num_simplices
    if len(mesh.facet_pairs) == 0:
        return 1 if s == 1 else s
    scale = max(
        1.0,
        float(np.linalg.norm(mesh.piece_gradients, axis=1).max()),
        float(np.abs(mesh.piece_offsets).max()),
    )
    same_grad = _jumps(mesh) <= merge_rtol * scale
    db = np.abs(
        mesh.piece_offsets[mesh.facet_pairs[:, 1]]
        - mesh.piece_offsets[mesh.facet_pairs[:, 0]]
    )
    merge = same_grad & (db <= merge_rtol * scale)
    pairs = mesh.facet_pairs[merge]
    graph = coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(s, s)
    )
    n_comp, _ = connected_components(graph, directed=False)
    return int(n_comp)


def tv2_1d(breakpoints, slopes):
    """Second-order total variation of a linear spline: sum |slope jumps|."""
    breakpoints = np.asarray(breakpoints, dtype=float).reshape(-1)
    slopes = np.asarray(slopes, dtype=float).reshape(-1)
    if breakpoints.size and np.any(np.diff(breakpoints) <= 0.0):
        raise InvariantViolation("breakpoints must be strictly increasing")
    if slopes.size != breakpoints.size + 1:
        raise InvariantViolation("need exactly one slope per interval")
    if not (np.all(np.isfinite(breakpoints)) and np.all(np.isfinite(slopes))):
        raise InvariantViolation("breakpoints and slopes must be finite")
    return float(np.sum(np.abs(np.diff(slopes))))


def slopes_1d(mesh):
    """Breakpoints and interval slopes of a 1-d mesh, in spatial order."""
    if mesh.dim != 1:
        raise InvariantViolation("slopes_1d requires a one-dimensional mesh")
    left = np.min(mesh.vertices[mesh.simplices][:, :, 0], axis=1)
    order = np.argsort(left, kind="stable")
    slopes = mesh.piece_gradients[order, 0]
    rights = np.max(mesh.vertices[mesh.simplices][:, :, 0], axis=1)[order]
    return rights[:-1], slopes


def refine_barycentric(mesh):
    """Split every simplex at its barycenter, interpolating values.

    Original faces survive untouched, so the refined mesh represents the
    same function and has the same HTV; the new interior facets carry no
    gradient jump.
    """
    d = mesh.dim
    corners = mesh.vertices[mesh.simplices]
    centers = corners.mean(axis=1)
    center_vals = (
        np.einsum("sd,sd->s", centers, mesh.piece_gradients) + mesh.piece_offsets
    )
    center_ids = len(mesh.vertices) + np.arange(mesh.num_simplices)
    new_vertices = np.vstack([mesh.vertices, centers])
    new_values = np.concatenate([mesh.values, center_vals])
    children = []
    for n in range(mesh.num_simplices):
        for i in range(d + 1):
            child = np.delete(mesh.simplices[n], i)
            children.append(np.append(child, center_ids[n]))
    return SimplicialCpwl(
        new_vertices, np.array(children), new_values,
        name=mesh.name, meta=mesh.meta,
    )
