"""Domain transforms and their predicted effect on the HTV.

A transform acts on a function f as g(x) = f(U(alpha x) - x0), the
composition rotate-scale-translate frozen in this order.  Translation
and orthonormal maps leave the HTV unchanged while scaling multiplies it
by |alpha|^(2-d), so the combined predicted factor is |alpha|^(2-d).

On a mesh the transform is realized exactly by moving vertices through
the inverse coordinate map and keeping values and connectivity; on an
evaluator it wraps the call (and the Hessian by the chain rule,
alpha^2 U^T H U).  Since these laws hold on all of R^d, finite-domain
checks must transform the domain along with the function; see
``transform_box``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation
from .smooth import SmoothFn
from .cpwl import SimplicialCpwl
from .mixed_fields import BoxDomain

_ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class DomainTransform:
    """x maps to f(U(alpha x) - shift); U orthonormal, alpha nonzero."""

    u: np.ndarray = field(repr=False)
    alpha: float = 1.0
    shift: np.ndarray = None

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise InvariantViolation("U must be a square matrix")
        gram_defect = np.max(np.abs(u.T @ u - np.eye(u.shape[0])))
        if gram_defect > _ORTHO_TOL:
            raise InvariantViolation(
                f"U is not orthonormal (defect {gram_defect:.2e})"
            )
        alpha = float(self.alpha)
        if alpha == 0.0 or not np.isfinite(alpha):
            raise InvariantViolation("scale must be finite and nonzero")
        shift = (
            np.zeros(u.shape[0])
            if self.shift is None
            else np.asarray(self.shift, dtype=float).reshape(u.shape[0])
        )
        if not np.all(np.isfinite(shift)):
            raise InvariantViolation("shift must be finite")
        u = u.copy()
        shift = shift.copy()
        u.setflags(write=False)
        shift.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "shift", shift)

    @property
    def dim(self):
        return self.u.shape[0]

    def forward(self, points):
        """y = U(alpha x) - shift for points in rows."""
        pts = np.asarray(points, dtype=float)
        return (self.alpha * pts) @ self.u.T - self.shift

    def inverse(self, points):
        """x = U^T(y + shift) / alpha."""
        pts = np.asarray(points, dtype=float)
        return (pts + self.shift) @ self.u / self.alpha


def identity_transform(d):
    return DomainTransform(np.eye(int(d)))


def rotation(d, i, j, theta):
    """Plane rotation by theta in coordinates (i, j) of R^d."""
    u = np.eye(int(d))
    c, s = np.cos(theta), np.sin(theta)
    u[i, i] = c
    u[j, j] = c
    u[i, j] = -s
    u[j, i] = s
    return u


def random_transform(rng, d, scale_range=(0.5, 2.0)):
    """Random rotate-scale-translate transform (Haar orthonormal part)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    alpha = float(rng.uniform(*scale_range)) * (-1.0) ** int(rng.integers(0, 2))
    shift = rng.uniform(-1.0, 1.0, d)
    return DomainTransform(q, alpha, shift)


def predicted_factor(transform, d=None):
    """HTV(g) / HTV(f) predicted for g(x) = f(U(alpha x) - x0)."""
    d = transform.dim if d is None else int(d)
    return float(abs(transform.alpha) ** (2 - d))


def apply_to_cpwl(mesh, transform):
    """Mesh of g(x) = f(U(alpha x) - x0); values and connectivity kept."""
    if transform.dim != mesh.dim:
        raise InvariantViolation("transform and mesh dimensions differ")
    return SimplicialCpwl(
        transform.inverse(mesh.vertices),
        mesh.simplices,
        mesh.values,
        name=mesh.name,
        meta=mesh.meta,
    )


def apply_to_smooth(fn, transform):
    """Evaluator of g = f(U(alpha .) - x0), Hessian wrapped by the chain rule."""
    if transform.dim != fn.dim:
        raise InvariantViolation("transform and function dimensions differ")

    def evaluator(points):
        return fn.evaluator(transform.forward(points))

    hessian = None
    if fn.hessian is not None:
        a2 = transform.alpha ** 2
        u = transform.u

        def hessian(points):
            h = fn.hessian(transform.forward(points))
            return a2 * np.einsum("ji,...jk,kl->...il", u, h, u)

    return SmoothFn(
        dim=fn.dim,
        evaluator=evaluator,
        hessian=hessian,
        label=f"{fn.label}*t" if fn.label else "",
        vectorized=fn.vectorized,
    )


def transform_box(box, transform):
    """Axis-aligned bounding box of the preimage of ``box``.

    Exact for translations and scalings; for rotations it is the box
    hull of the rotated corners (checks using it must either tolerate
    the enlargement or use integrands that decay inside it).
    """
    lo = np.asarray(box.lower)
    hi = np.asarray(box.upper)
    corners = np.array(
        [[lo[k] if (m >> k) & 1 == 0 else hi[k] for k in range(box.dim)]
         for m in range(1 << box.dim)]
    )
    pre = transform.inverse(corners)
    return BoxDomain(tuple(pre.min(axis=0)), tuple(pre.max(axis=0)))
