"""HTV of twice-differentiable functions by quadrature.

For a function whose second derivatives are integrable, the HTV equals
the integral over the domain of the pointwise Schatten-p norm of the
Hessian.  This module evaluates that integral on tensor grids (midpoint
or 2-point Gauss per axis), using the analytic Hessian when the function
carries one and central second differences otherwise.  The error
estimate is a one-step Richardson difference against a grid with half
the nodes per axis; there is no adaptivity, so runtimes are predictable.

Evaluators must be pure; built-ins are numpy-vectorized over stacks of
points (``vectorized=True``), and pointwise user evaluators are looped.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import matnorm
from .errors import InvariantViolation, NumericalError
from .mixed_fields import BoxDomain

#: finite-difference step as a fraction of the smallest quadrature cell
FD_STEP_FRACTION = 1.0 / 8.0

MIDPOINT = "midpoint"
GAUSS2 = "gauss2"


@dataclass(frozen=True)
class SmoothFn:
    """Scalar function on R^d with an optional analytic Hessian.

    ``evaluator`` maps a point (or a stack of points when ``vectorized``)
    to values; ``hessian``, when given, maps points to (d, d) matrices.
    """

    dim: int
    evaluator: object
    hessian: object = None
    label: str = ""
    vectorized: bool = False


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product quadrature: a box, nodes per axis, and a rule."""

    domain: BoxDomain
    nodes: tuple
    rule: str = MIDPOINT

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=int))
        if nodes.size == 1:
            nodes = np.repeat(nodes, self.domain.dim)
        if nodes.size != self.domain.dim:
            raise InvariantViolation("need one node count per axis")
        if np.any(nodes < 2):
            raise InvariantViolation("need at least 2 nodes per axis")
        if self.rule not in (MIDPOINT, GAUSS2):
            raise InvariantViolation(f"unknown quadrature rule {self.rule!r}")
        object.__setattr__(self, "nodes", tuple(int(n) for n in nodes))

    def cell_widths(self):
        return tuple(w / n for w, n in zip(self.domain.widths, self.nodes))


def eval_values(fn, points):
    """Function values at stacked points, honoring the vectorized flag."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if fn.vectorized:
        return np.asarray(fn.evaluator(pts), dtype=float).reshape(len(pts))
    return np.array([float(fn.evaluator(p)) for p in pts])


def eval_hessians(fn, points):
    """Analytic Hessians at stacked points: (N, d, d)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if fn.vectorized:
        return np.asarray(fn.hessian(pts), dtype=float).reshape(
            len(pts), fn.dim, fn.dim
        )
    return np.stack([np.asarray(fn.hessian(p), dtype=float) for p in pts])


def hessian_fd(fn, x, h):
    """Symmetric central-difference Hessian at one point.

    Diagonal entries use the 3-point second difference, off-diagonal
    entries the 4-point cross stencil; the result is symmetrized by
    averaging with its transpose.  Exact on quadratics for any h.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    d = x.size
    h = float(h)
    if h <= 0.0:
        raise InvariantViolation("step must be positive")
    pts = [x]
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        pts += [x + e, x - e]
    for i in range(d):
        for j in range(i + 1, d):
            ei = np.zeros(d)
            ej = np.zeros(d)
            ei[i] = h
            ej[j] = h
            pts += [x + ei + ej, x + ei - ej, x - ei + ej, x - ei - ej]
    vals = eval_values(fn, np.asarray(pts))
    if not np.all(np.isfinite(vals)):
        raise NumericalError(f"non-finite sample in the stencil around {x}")
    out = np.empty((d, d))
    f0 = vals[0]
    for i in range(d):
        out[i, i] = (vals[1 + 2 * i] - 2.0 * f0 + vals[2 + 2 * i]) / h ** 2
    k = 1 + 2 * d
    for i in range(d):
        for j in range(i + 1, d):
            cross = (vals[k] - vals[k + 1] - vals[k + 2] + vals[k + 3]) / (4.0 * h ** 2)
            out[i, j] = cross
            out[j, i] = cross
            k += 4
    return (out + out.T) / 2.0


def _quad_points(spec):
    """Quadrature nodes and the (constant) weight per node."""
    axes = []
    for lo, n, w in zip(spec.domain.lower, spec.nodes, spec.domain.widths):
        cell = w / n
        centers = lo + cell * (np.arange(n) + 0.5)
        if spec.rule == MIDPOINT:
            axes.append(centers)
        else:
            off = cell / (2.0 * math.sqrt(3.0))
            axes.append(np.sort(np.concatenate([centers - off, centers + off])))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    weight = spec.domain.volume / len(pts)
    return pts, weight


def _hessians_at(fn, pts, spec):
    if fn.hessian is not None:
        return eval_hessians(fn, pts)
    h = FD_STEP_FRACTION * min(spec.cell_widths())
    return np.stack([hessian_fd(fn, x, h) for x in pts])


def _integrate(fn, spec, p, mask):
    pts, weight = _quad_points(spec)
    if mask is not None:
        keep = np.asarray([bool(mask(x)) for x in pts])
        pts = pts[keep]
        if len(pts) == 0:
            return 0.0
    hess = _hessians_at(fn, pts, spec)
    if not np.all(np.isfinite(hess)):
        bad = np.nonzero(~np.isfinite(hess).all(axis=(1, 2)))[0][0]
        raise NumericalError(f"non-finite Hessian sample at {pts[bad]}")
    norms = matnorm.schatten_norm(hess, p)
    return float(np.sum(norms) * weight)


def htv_quadrature(fn, spec, p=1.0, mask=None):
    """(value, error_estimate) of the integral of ||H f(x)||_Sp.

    ``mask``, when given, restricts midpoint quadrature to the indicated
    subset (for non-box domains); the error estimate is then doubled.
    """
    p = matnorm.check_order(p)
    if fn.dim != spec.domain.dim:
        raise InvariantViolation("function and quadrature dimensions differ")
    if mask is not None and spec.rule != MIDPOINT:
        raise InvariantViolation("masked quadrature requires the midpoint rule")
    value = _integrate(fn, spec, p, mask)
    coarse = QuadratureSpec(
        spec.domain, tuple(max(2, n // 2) for n in spec.nodes), spec.rule
    )
    error = abs(value - _integrate(fn, coarse, p, mask))
    if mask is not None:
        error *= 2.0
    return value, error


def sweep_rbf_width(centers, weights, sigmas, spec, p=1.0):
    """HTV of a Gaussian RBF mixture at each kernel width.

    The mixture coefficients stay fixed while sigma varies; returns a
    list of (sigma, value, error_estimate) rows.
    """
    rows = []
    for sigma in sigmas:
        fn = rbf_mixture(centers, weights, float(sigma))
        value, err = htv_quadrature(fn, spec, p)
        rows.append((float(sigma), value, err))
    return rows


# -- built-in functions ------------------------------------------------


def quadratic_bowl(d):
    """f(x) = ||x||^2 / 2 with identity Hessian."""
    d = int(d)
    return SmoothFn(
        dim=d,
        evaluator=lambda x: 0.5 * np.sum(np.asarray(x) ** 2, axis=-1),
        hessian=lambda x: np.broadcast_to(
            np.eye(d), (*np.asarray(x).shape[:-1], d, d)
        ).copy(),
        label="bowl",
        vectorized=True,
    )


def affine_fn(a, b=0.0):
    """f(x) = a.x + b with zero Hessian."""
    a = np.asarray(a, dtype=float).reshape(-1)
    d = a.size
    return SmoothFn(
        dim=d,
        evaluator=lambda x: np.asarray(x) @ a + b,
        hessian=lambda x: np.zeros((*np.asarray(x).shape[:-1], d, d)),
        label="affine",
        vectorized=True,
    )


def rbf_mixture(centers, weights, sigma):
    """Gaussian mixture sum_k w_k exp(-||x - c_k||^2 / (2 sigma^2))."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if len(weights) != len(centers):
        raise InvariantViolation("need one weight per center")
    sigma = float(sigma)
    if sigma <= 0.0:
        raise InvariantViolation("kernel width must be positive")
    d = centers.shape[1]
    s2 = sigma * sigma

    def evaluator(x):
        x = np.asarray(x, dtype=float)
        diff = x[..., None, :] - centers            # (..., K, d)
        r2 = np.sum(diff * diff, axis=-1)
        return np.exp(-r2 / (2.0 * s2)) @ weights

    def hessian(x):
        x = np.asarray(x, dtype=float)
        diff = x[..., None, :] - centers
        r2 = np.sum(diff * diff, axis=-1)
        g = np.exp(-r2 / (2.0 * s2)) * weights      # (..., K)
        outer = diff[..., :, None] * diff[..., None, :] / (s2 * s2)
        eye = np.eye(d) / s2
        return np.sum(g[..., None, None] * (outer - eye), axis=-3)

    return SmoothFn(
        dim=d, evaluator=evaluator, hessian=hessian,
        label=f"rbf(K={len(weights)},sigma={sigma:g})", vectorized=True,
    )


def gaussian_bump(d, sigma=1.0, center=None):
    """Single unit-weight Gaussian of width sigma."""
    center = np.zeros(int(d)) if center is None else np.asarray(center, dtype=float)
    fn = rbf_mixture(center[None, :], [1.0], sigma)
    return SmoothFn(
        dim=int(d), evaluator=fn.evaluator, hessian=fn.hessian,
        label=f"gauss(sigma={sigma:g})", vectorized=True,
    )


BUILTINS = {
    "bowl": lambda d=2, **kw: quadratic_bowl(d),
    "gauss": lambda d=2, sigma=1.0, **kw: gaussian_bump(d, sigma),
    "affine": lambda a=(1.0, 1.0), b=0.0, **kw: affine_fn(a, b),
}
