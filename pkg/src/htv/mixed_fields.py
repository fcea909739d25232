"""Mixed norms of matrix-valued fields on regular grids.

A matrix field assigns a d x d matrix to every node of a regular grid
over an axis-aligned box.  Two kinds exist and the distinction matters:

- a *test field* holds pointwise samples of a continuous matrix-valued
  function (the sup-type norms apply to it);
- a *measure field* holds cell masses, i.e. density already multiplied
  by cell volume (the sum-type norms apply to it).  This is the one
  place where the density-versus-mass convention is fixed.

Four mixed norms are provided, named inner-norm-first:

- ``norm_linf_sq``:  Schatten-q norm of the matrix of entrywise sup norms;
- ``norm_sq_linf``:  sup over nodes of the pointwise Schatten-q norm;
- ``norm_m_sp``:     Schatten-p norm of the matrix of entrywise total masses;
- ``norm_sp_m``:     sum over nodes of the pointwise Schatten-p norm.

``norm_sp_m`` is the discrete realization of the HTV's underlying norm:
the pointwise-witness field saturates the duality pairing against it,
which is what lets the grid oracle sum Schatten norms directly instead
of searching over test fields.

All reductions are plain numpy sums over immutable arrays (deterministic
pairwise summation); everything here is pure and concurrency safe.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import matnorm
from .errors import InvariantViolation

TEST_FIELD = "test"
MEASURE_FIELD = "measure"


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box given by per-axis lower and upper corners."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(x) for x in np.atleast_1d(self.lower))
        hi = tuple(float(x) for x in np.atleast_1d(self.upper))
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if len(lo) != len(hi) or not lo:
            raise InvariantViolation("box corners must have the same nonzero length")
        if not all(math.isfinite(a) and math.isfinite(b) for a, b in zip(lo, hi)):
            raise InvariantViolation("box corners must be finite")
        if not all(a < b for a, b in zip(lo, hi)):
            raise InvariantViolation("box must satisfy lower < upper on every axis")

    @property
    def dim(self):
        return len(self.lower)

    @property
    def widths(self):
        return tuple(b - a for a, b in zip(self.lower, self.upper))

    @property
    def volume(self):
        return float(np.prod(self.widths))


@dataclass(frozen=True)
class MatrixField:
    """Matrix-valued samples on a regular grid over a box.

    ``values`` has shape (n_nodes, d, d) with n_nodes equal to the product
    of the per-axis resolution.  ``kind`` is TEST_FIELD or MEASURE_FIELD.
    """

    domain: BoxDomain
    resolution: tuple
    values: np.ndarray = field(repr=False)
    kind: str = TEST_FIELD

    def __post_init__(self):
        res = tuple(int(n) for n in np.atleast_1d(self.resolution))
        object.__setattr__(self, "resolution", res)
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 3 or vals.shape[1] != vals.shape[2]:
            raise InvariantViolation("field values must have shape (n_nodes, d, d)")
        if vals.shape[0] == 0:
            raise InvariantViolation("field must contain at least one node")
        if any(n < 1 for n in res) or int(np.prod(res)) != vals.shape[0]:
            raise InvariantViolation(
                f"node count {vals.shape[0]} does not match resolution {res}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvariantViolation("field values must be finite")
        if self.kind not in (TEST_FIELD, MEASURE_FIELD):
            raise InvariantViolation(f"unknown field kind {self.kind!r}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self):
        return self.values.shape[1]


def _require_kind(f, kind, op):
    if f.kind != kind:
        raise InvariantViolation(f"{op} expects a {kind} field, got {f.kind}")


def grid_points(domain, resolution, endpoint=True):
    """Grid node coordinates, shape (n_nodes, dim), C-order over axes.

    ``endpoint=True`` places nodes on a closed linspace grid including
    box corners (test-field convention); ``endpoint=False`` places them
    at cell centers (measure-field convention).
    """
    res = tuple(int(n) for n in np.atleast_1d(resolution))
    axes = []
    for lo, hi, n in zip(domain.lower, domain.upper, res):
        if endpoint:
            axes.append(np.linspace(lo, hi, n) if n > 1 else np.array([(lo + hi) / 2.0]))
        else:
            h = (hi - lo) / n
            axes.append(lo + h * (np.arange(n) + 0.5))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def sample_test_field(domain, resolution, fn):
    """Sample a matrix-valued function at closed-grid nodes (sup norms see
    the box corners this way)."""
    pts = grid_points(domain, resolution, endpoint=True)
    vals = np.stack([np.asarray(fn(x), dtype=float) for x in pts])
    return MatrixField(domain, resolution, vals, TEST_FIELD)


def sample_measure_field(domain, resolution, density):
    """Sample a matrix-valued density at cell centers and store cell masses."""
    res = tuple(int(n) for n in np.atleast_1d(resolution))
    pts = grid_points(domain, res, endpoint=False)
    cell = domain.volume / float(np.prod(res))
    vals = np.stack([np.asarray(density(x), dtype=float) * cell for x in pts])
    return MatrixField(domain, res, vals, MEASURE_FIELD)


def norm_linf_sq(f, q):
    """Schatten-q norm of the matrix of entrywise sup norms of a test field."""
    _require_kind(f, TEST_FIELD, "norm_linf_sq")
    sup = np.max(np.abs(f.values), axis=0)
    return matnorm.schatten_norm(sup, q)


def norm_sq_linf(f, q):
    """Sup over nodes of the pointwise Schatten-q norm of a test field."""
    _require_kind(f, TEST_FIELD, "norm_sq_linf")
    return float(np.max(matnorm.schatten_norm(f.values, q)))


def norm_m_sp(w, p):
    """Schatten-p norm of the matrix of entrywise total masses of a measure field."""
    _require_kind(w, MEASURE_FIELD, "norm_m_sp")
    mass = np.sum(np.abs(w.values), axis=0)
    return matnorm.schatten_norm(mass, p)


def norm_sp_m(w, p):
    """Sum over nodes of the pointwise Schatten-p norm of a measure field."""
    _require_kind(w, MEASURE_FIELD, "norm_sp_m")
    return float(np.sum(matnorm.schatten_norm(w.values, p)))


def pairing(w, f):
    """Duality pairing: sum over nodes of the Frobenius inner products."""
    _require_kind(w, MEASURE_FIELD, "pairing")
    _require_kind(f, TEST_FIELD, "pairing")
    if w.domain != f.domain or w.resolution != f.resolution or w.dim != f.dim:
        raise InvariantViolation("pairing requires fields on the same grid")
    return float(np.sum(w.values * f.values))


def witness_field(w, p):
    """Test field of pointwise duality witnesses for a measure field.

    Pairing it with ``w`` attains ``norm_sp_m(w, p)``; nodes holding the
    zero matrix get the zero witness.
    """
    _require_kind(w, MEASURE_FIELD, "witness_field")
    out = np.zeros_like(w.values)
    for k in range(w.values.shape[0]):
        if np.any(w.values[k]):
            out[k] = matnorm.duality_witness(w.values[k], p)
    return MatrixField(w.domain, w.resolution, out, TEST_FIELD)


def equivalence_constants(d, q):
    """Constants (A, B) with A*norm_sq_linf <= norm_linf_sq <= B*norm_sq_linf.

    Derived by chaining two elementary matrix-norm bounds: for any d x d
    matrix, ||M||_F <= ||M||_sum <= d*||M||_F, and
    d^min(0, 1/q-1/2) * ||M||_F <= ||M||_Sq <= d^max(0, 1/q-1/2) * ||M||_F.
    Valid for every field; not claimed tight.
    """
    d = int(d)
    if d < 1:
        raise InvariantViolation("dimension must be >= 1")
    q = matnorm.check_order(q)
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    t = abs(inv_q - 0.5)
    return float(d) ** (-1.0 - t), float(d) ** (3.0 + t)
