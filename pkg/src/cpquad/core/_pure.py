"""NumPy fallback for the hot kernels.

Mirrors the compiled extension's interface: batched change-of-measure
weights over band nodes of a 5-slab window, and golden-section refinement
of coil closest-point parameters.  Used when the extension is not built
(or when CPQUAD_PURE=1), and as the reference in backend parity tests.
"""

from __future__ import annotations

import math

import numpy as np

JACOBI_TOL = 1e-15
JACOBI_MAX_SWEEPS = 30

CENTRAL2 = 0
BIASED3 = 1
ONE_SIDED2 = 2

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# batched eigenvalues / singular values


def jacobi_eigvals_batch(A):
    """Eigenvalues of symmetric 3x3 matrices (N, 3, 3), descending."""
    A = np.array(A, dtype=np.float64, copy=True)
    scale = np.sqrt((A * A).sum(axis=(1, 2)))
    tol = JACOBI_TOL * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(A[:, 0, 1] ** 2 + A[:, 0, 2] ** 2 + A[:, 1, 2] ** 2)
        if np.all(off <= tol):
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            r = 3 - p - q
            apq = A[:, p, q]
            active = apq != 0.0
            safe = np.where(active, apq, 1.0)
            theta = np.where(active, 0.5 * (A[:, q, q] - A[:, p, p]) / safe, 0.0)
            sign = np.where(theta >= 0.0, 1.0, -1.0)
            t = np.where(active,
                         sign / (np.abs(theta) + np.sqrt(theta * theta + 1.0)),
                         0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            app = A[:, p, p].copy()
            aqq = A[:, q, q].copy()
            A[:, p, p] = app - t * apq
            A[:, q, q] = aqq + t * apq
            A[:, p, q] = 0.0
            A[:, q, p] = 0.0
            arp = A[:, r, p].copy()
            arq = A[:, r, q].copy()
            new_rp = c * arp - s * arq
            new_rq = s * arp + c * arq
            A[:, r, p] = new_rp
            A[:, p, r] = new_rp
            A[:, r, q] = new_rq
            A[:, q, r] = new_rq
    lam = np.stack([A[:, 0, 0], A[:, 1, 1], A[:, 2, 2]], axis=1)
    return np.sort(lam, axis=1)[:, ::-1]


def eigvals_sym2_batch(a00, a01, a11):
    mean = 0.5 * (a00 + a11)
    disc = np.hypot(0.5 * (a00 - a11), a01)
    return mean + disc, mean - disc


def sigma_from_jacobian_batch(M, codim):
    """Band weights from batched Jacobians M (N, dim, dim)."""
    M = np.asarray(M, dtype=np.float64)
    dim = M.shape[1]
    A = np.einsum("nca,ncb->nab", M, M)
    if dim == 2:
        lam1, _ = eigvals_sym2_batch(A[:, 0, 0], A[:, 0, 1], A[:, 1, 1])
        return np.sqrt(np.maximum(lam1, 0.0))
    lam = jacobi_eigvals_batch(A)
    sig = np.sqrt(np.maximum(lam, 0.0))
    if codim == 1:
        return sig[:, 0] * sig[:, 1]
    return sig[:, 0]


# ---------------------------------------------------------------------------
# window stencils


def _gather_2d(W, jj, axis, offsets):
    """Stacked neighbor values, shape (len(offsets), N, 2); W is (5, n1, 2)."""
    if axis == 0:
        return np.stack([W[2 + off, jj, :] for off in offsets])
    return np.stack([W[2, jj + off, :] for off in offsets])


def _gather_3d(W, jj, kk, axis, offsets):
    if axis == 0:
        return np.stack([W[2 + off, jj, kk, :] for off in offsets])
    if axis == 1:
        return np.stack([W[2, jj + off, kk, :] for off in offsets])
    return np.stack([W[2, jj, kk + off, :] for off in offsets])


def _column_derivative(gather, axis, h, scheme):
    """Derivative of every component along one axis; gather supplies the
    needed neighbor stack."""
    if scheme == CENTRAL2:
        g = gather((-1, 1))
        return (g[1] - g[0]) / (2.0 * h)
    g = gather((-2, -1, 0, 1, 2))
    s_plus = g[4][:, axis] - 2.0 * g[3][:, axis] + g[2][:, axis]
    s_minus = g[0][:, axis] - 2.0 * g[1][:, axis] + g[2][:, axis]
    use_plus = (np.abs(s_plus) <= np.abs(s_minus))[:, None]
    if scheme == BIASED3:
        d_plus = (-2.0 * g[1] - 3.0 * g[2] + 6.0 * g[3] - g[4]) / (6.0 * h)
        d_minus = (2.0 * g[3] + 3.0 * g[2] - 6.0 * g[1] + g[0]) / (6.0 * h)
    else:
        d_plus = (-3.0 * g[2] + 4.0 * g[3] - g[4]) / (2.0 * h)
        d_minus = (3.0 * g[2] - 4.0 * g[1] + g[0]) / (2.0 * h)
    return np.where(use_plus, d_plus, d_minus)


def jacobian_band_2d(W, jj, h, scheme):
    """Batched 2x2 Jacobians at band nodes of the central window row."""
    jj = np.asarray(jj, dtype=np.int64)
    M = np.empty((jj.shape[0], 2, 2))
    for axis in range(2):
        M[:, :, axis] = _column_derivative(
            lambda offs, a=axis: _gather_2d(W, jj, a, offs), axis, h, scheme)
    return M


def jacobian_band_3d(W, jj, kk, h, scheme):
    jj = np.asarray(jj, dtype=np.int64)
    kk = np.asarray(kk, dtype=np.int64)
    M = np.empty((jj.shape[0], 3, 3))
    for axis in range(3):
        M[:, :, axis] = _column_derivative(
            lambda offs, a=axis: _gather_3d(W, jj, kk, a, offs), axis, h, scheme)
    return M


def sigma_band_2d(W, jj, h, scheme):
    """Change-of-measure weights at 2D band nodes (codimension 1)."""
    return sigma_from_jacobian_batch(jacobian_band_2d(W, jj, h, scheme), 1)


def sigma_band_3d(W, jj, kk, h, scheme, codim):
    """Change-of-measure weights at 3D band nodes."""
    return sigma_from_jacobian_batch(jacobian_band_3d(W, jj, kk, h, scheme), codim)


# ---------------------------------------------------------------------------
# coil closest-point refinement


def _coil_dist2(r_h, b, rho, m, x, y, z, t):
    w = math.hypot(r_h, b)
    ct = np.cos(t)
    st = np.sin(t)
    cmt = np.cos(m * t)
    smt = np.sin(m * t)
    px = r_h * ct + rho * (-cmt * ct + smt * b * st / w)
    py = r_h * st + rho * (-cmt * st - smt * b * ct / w)
    pz = b * t + rho * smt * r_h / w
    return (px - x) ** 2 + (py - y) ** 2 + (pz - z) ** 2


def refine_curve_params(r_h, b, rho, m, pts, lo, hi, iters):
    """Golden-section minimization of the coil distance per query point.

    lo/hi bracket the minimizer (from the coarse scan); the function is
    unimodal on such narrow brackets.
    """
    pts = np.asarray(pts, dtype=np.float64)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    a = np.asarray(lo, dtype=np.float64).copy()
    bb = np.asarray(hi, dtype=np.float64).copy()
    c = bb - _INVPHI * (bb - a)
    d = a + _INVPHI * (bb - a)
    fc = _coil_dist2(r_h, b, rho, m, x, y, z, c)
    fd = _coil_dist2(r_h, b, rho, m, x, y, z, d)
    for _ in range(int(iters)):
        shrink_right = fc < fd
        bb = np.where(shrink_right, d, bb)
        a = np.where(shrink_right, a, c)
        c = bb - _INVPHI * (bb - a)
        d = a + _INVPHI * (bb - a)
        eval_t = np.where(shrink_right, c, d)
        f_new = _coil_dist2(r_h, b, rho, m, x, y, z, eval_t)
        fc_old = fc
        fc = np.where(shrink_right, f_new, fd)
        fd = np.where(shrink_right, fc_old, f_new)
    return 0.5 * (a + bb)
