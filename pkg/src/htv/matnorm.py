"""Schatten norms and duality witnesses for small dense matrices.

Singular values are computed with one-sided cyclic Jacobi rotations,
which is the symmetric Jacobi eigensolver applied implicitly to A^T A.
The method is unconditionally convergent and accurate for the small
matrices this package works with (Hessians, d <= 16), and it vectorizes
over stacks of matrices, which keeps the grid-based modules fast.

All functions accept a single ``(d, d)`` matrix or a stack ``(..., d, d)``
and are pure; they are safe for unrestricted concurrent use.
"""

import math

import numpy as np

from .errors import InvariantViolation, NumericalError

MAX_DIM = 16

# Singular values below RANK_RTOL * sigma_max count as zero when a rank
# decision is needed (the p=1 duality witness).
RANK_RTOL = 1e-12

_JACOBI_TOL = 1e-15
_JACOBI_MAX_SWEEPS = 64


def check_order(p):
    """Validate a Schatten order and return it as a float.

    Infinity must be passed as ``math.inf`` (or ``float("inf")``); it is
    an exact marker, never approximated by a large finite value.
    """
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvariantViolation(f"Schatten order must lie in [1, inf], got {p!r}")
    return p


def conjugate_order(p):
    """Holder conjugate q of p, with 1/p + 1/q = 1 (conjugate of 1 is inf)."""
    p = check_order(p)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _as_matrices(m):
    a = np.asarray(m, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise InvariantViolation(f"expected square matrices, got shape {a.shape}")
    d = a.shape[-1]
    if not 1 <= d <= MAX_DIM:
        raise InvariantViolation(f"matrix dimension must be in [1, {MAX_DIM}], got {d}")
    if not np.all(np.isfinite(a)):
        raise InvariantViolation("matrix entries must be finite")
    return a


def _jacobi_svd(a, want_uv=False):
    """One-sided cyclic Jacobi SVD of a stack of square matrices.

    Returns ``(s, u, vt)`` with singular values sorted nonincreasing and
    ``a = u @ diag(s) @ vt``.  Columns of ``u`` belonging to zero singular
    values are left as zero vectors.  ``u`` and ``vt`` are None unless
    requested.
    """
    d = a.shape[-1]
    lead = a.shape[:-2]
    w = a.reshape(-1, d, d).astype(float, copy=True)
    n = w.shape[0]
    v = np.broadcast_to(np.eye(d), (n, d, d)).copy() if want_uv else None

    # prescale each matrix to order one: squared column norms of very
    # small or very large matrices would otherwise leave double range
    scale = np.max(np.abs(w), axis=(1, 2))
    w /= np.where(scale > 0.0, scale, 1.0)[:, None, None]

    # columns whose squared norm falls below this are numerically zero;
    # the Frobenius norm is rotation invariant so computing it once is safe
    floor = (1e-16 ** 2) * np.einsum("nij,nij->n", w, w)

    for _ in range(_JACOBI_MAX_SWEEPS):
        active = False
        for i in range(d - 1):
            for j in range(i + 1, d):
                ci = w[:, :, i]
                cj = w[:, :, j]
                alpha = np.einsum("nk,nk->n", ci, ci)
                beta = np.einsum("nk,nk->n", cj, cj)
                gamma = np.einsum("nk,nk->n", ci, cj)
                unsettled = (
                    (np.abs(gamma) > _JACOBI_TOL * np.sqrt(alpha) * np.sqrt(beta))
                    & (alpha > floor)
                    & (beta > floor)
                )
                if np.any(unsettled):
                    active = True
                theta = 0.5 * np.arctan2(2.0 * gamma, alpha - beta)
                c = np.cos(theta)[:, None]
                s = np.sin(theta)[:, None]
                # zeroes the new column inner product; a pi/2 angle swaps
                # columns, which keeps the larger one in front
                ci_new = c * ci + s * cj
                cj_new = -s * ci + c * cj
                w[:, :, i] = ci_new
                w[:, :, j] = cj_new
                if want_uv:
                    vi = v[:, :, i]
                    vj = v[:, :, j]
                    vi_new = c * vi + s * vj
                    vj_new = -s * vi + c * vj
                    v[:, :, i] = vi_new
                    v[:, :, j] = vj_new
        if not active:
            break
    else:
        raise NumericalError("Jacobi SVD did not converge")

    scaled_sig = np.sqrt(np.einsum("nki,nki->ni", w, w))
    order = np.argsort(-scaled_sig, axis=1, kind="stable")
    scaled_sig = np.take_along_axis(scaled_sig, order, axis=1)
    sig = scaled_sig * scale[:, None]

    u = vt = None
    if want_uv:
        w = np.take_along_axis(w, order[:, None, :], axis=2)
        v = np.take_along_axis(v, order[:, None, :], axis=2)
        safe = np.where(scaled_sig > 0.0, scaled_sig, 1.0)
        u = np.where((scaled_sig > 0.0)[:, None, :], w / safe[:, None, :], 0.0)
        vt = np.swapaxes(v, 1, 2)
        u = u.reshape(*lead, d, d)
        vt = vt.reshape(*lead, d, d)
    return sig.reshape(*lead, d), u, vt


def singular_values(m):
    """Singular values of ``m``, sorted nonincreasing.

    For a stack ``(..., d, d)`` the result has shape ``(..., d)``.  For a
    symmetric matrix these are the absolute eigenvalues.
    """
    s, _, _ = _jacobi_svd(_as_matrices(m))
    return s


def schatten_norm(m, p):
    """Schatten-p norm: the l_p norm of the singular values.

    ``p=1`` is the nuclear norm, ``p=2`` Frobenius, ``p=math.inf`` spectral.
    Returns a float for a single matrix, an array for a stack.
    """
    p = check_order(p)
    s = singular_values(m)
    if math.isinf(p):
        out = np.max(s, axis=-1)
    elif p == 1.0:
        out = np.sum(s, axis=-1)
    elif p == 2.0:
        out = np.sqrt(np.sum(s * s, axis=-1))
    else:
        smax = np.max(s, axis=-1, keepdims=True)
        safe = np.where(smax > 0.0, smax, 1.0)
        out = np.squeeze(smax, -1) * np.sum((s / safe) ** p, axis=-1) ** (1.0 / p)
    return float(out) if out.ndim == 0 else out


def inner_product(a, b):
    """Frobenius pairing trace(a^T b); symmetric in its arguments."""
    a = _as_matrices(a)
    b = _as_matrices(b)
    if a.shape[-1] != b.shape[-1]:
        raise InvariantViolation(
            f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}"
        )
    out = np.sum(a * b, axis=(-2, -1))
    return float(out) if out.ndim == 0 else out


def duality_witness(m, p):
    """Matrix F with unit dual norm that attains the Holder bound.

    F satisfies ``schatten_norm(F, q) = 1`` for the conjugate order q and
    ``inner_product(m, F) = schatten_norm(m, p)``.  Built from the SVD of
    ``m``: for p in (1, inf) the usual duality mapping, for p=1 the
    minimum-rank conjugate (sum of the dyads of all nonzero singular
    values), for p=inf the leading dyad alone, ties broken by first index.
    """
    p = check_order(p)
    a = _as_matrices(m)
    if a.ndim != 2:
        raise InvariantViolation("duality_witness expects a single matrix")
    if not np.any(a):
        raise InvariantViolation("duality witness undefined for the zero matrix")
    s, u, vt = _jacobi_svd(a, want_uv=True)
    if math.isinf(p):
        return np.outer(u[:, 0], vt[0])
    if p == 1.0:
        keep = s > RANK_RTOL * s[0]
        return u[:, keep] @ vt[keep]
    norm = schatten_norm(a, p)
    coeff = (s / norm) ** (p - 1.0)
    return (u * coeff) @ vt
