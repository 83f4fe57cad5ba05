"""Finite-difference Jacobians of sampled closest-point maps and their
singular values.

Three differencing schemes are provided:

  central2    second order, stencil radius 1;
  biased3     third order, 4-point stencil biased toward the smoother side;
  one_sided2  second order, 3-point one-sided stencil.

The biased and one-sided schemes pick the side per axis with a shifted
second-difference smoothness indicator.  For the derivative along axis k the
indicator is computed from closest-point component k, and the chosen side is
then applied to all components, which keeps the columns of the Jacobian
consistent near map discontinuities.

Singular values come from an eigendecomposition of M^T M: closed form for
2x2, cyclic Jacobi sweeps for 3x3.  The matrices are built from finite
differences and need not be symmetric, so a full SVD route is used rather
than a symmetric eigensolve of M itself.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import SingularConfigurationError

JACOBI_TOL = 1e-15
JACOBI_MAX_SWEEPS = 30


class JacobianScheme(Enum):
    CENTRAL2 = "central2"
    BIASED3 = "biased3"
    ONE_SIDED2 = "one_sided2"

    @property
    def stencil_radius(self):
        return 1 if self is JacobianScheme.CENTRAL2 else 2

    @classmethod
    def from_name(cls, name):
        for scheme in cls:
            if scheme.value == name:
                return scheme
        raise ValueError(f"unknown differencing scheme {name!r}")


def _node_margin(field, node, radius):
    node = tuple(int(i) for i in node)
    n = field.grid.n
    for i in node:
        if i < radius or i > n - 1 - radius:
            raise IndexError(f"node {node} within {radius} of the grid boundary")
    return node


def _axis_values(cp, node, axis, offsets):
    """Closest-point components along one grid axis: shape (len(offsets), dim)."""
    idx = list(node)
    out = np.empty((len(offsets), cp.shape[-1]))
    for row, off in enumerate(offsets):
        idx[axis] = node[axis] + off
        out[row] = cp[tuple(idx)]
    return out


def jacobian_central(field, node):
    """Second-order central-difference Jacobian M[j, k] = d p_j / d x_k."""
    node = _node_margin(field, node, 1)
    dim = field.grid.dim
    h = field.grid.h
    M = np.empty((dim, dim))
    for axis in range(dim):
        f = _axis_values(field.cp, node, axis, (-1, 1))
        M[:, axis] = (f[1] - f[0]) / (2.0 * h)
    return M


def _pick_side(minus2, minus1, center, plus1, plus2):
    """True selects the + stencil: |S+| <= |S-| with S the shifted second
    difference of the axis-matched component."""
    s_plus = plus2 - 2.0 * plus1 + center
    s_minus = minus2 - 2.0 * minus1 + center
    return abs(s_plus) <= abs(s_minus)


def jacobian_biased3(field, node):
    """Third-order biased-difference Jacobian (4-point stencil per axis)."""
    node = _node_margin(field, node, 2)
    dim = field.grid.dim
    h = field.grid.h
    M = np.empty((dim, dim))
    for axis in range(dim):
        f = _axis_values(field.cp, node, axis, (-2, -1, 0, 1, 2))
        use_plus = _pick_side(f[0, axis], f[1, axis], f[2, axis],
                              f[3, axis], f[4, axis])
        if use_plus:
            M[:, axis] = (-2.0 * f[1] - 3.0 * f[2] + 6.0 * f[3] - f[4]) / (6.0 * h)
        else:
            M[:, axis] = (2.0 * f[3] + 3.0 * f[2] - 6.0 * f[1] + f[0]) / (6.0 * h)
    return M


def jacobian_one_sided(field, node):
    """Second-order one-sided Jacobian with smoothness-indicator side choice."""
    node = _node_margin(field, node, 2)
    dim = field.grid.dim
    h = field.grid.h
    M = np.empty((dim, dim))
    for axis in range(dim):
        f = _axis_values(field.cp, node, axis, (-2, -1, 0, 1, 2))
        use_plus = _pick_side(f[0, axis], f[1, axis], f[2, axis],
                              f[3, axis], f[4, axis])
        if use_plus:
            M[:, axis] = (-3.0 * f[2] + 4.0 * f[3] - f[4]) / (2.0 * h)
        else:
            M[:, axis] = (3.0 * f[2] - 4.0 * f[1] + f[0]) / (2.0 * h)
    return M


def jacobian_for_scheme(field, node, scheme):
    if scheme is JacobianScheme.CENTRAL2:
        return jacobian_central(field, node)
    if scheme is JacobianScheme.BIASED3:
        return jacobian_biased3(field, node)
    return jacobian_one_sided(field, node)


# ---------------------------------------------------------------------------
# singular values


def _eigvals_sym2(a00, a01, a11):
    mean = 0.5 * (a00 + a11)
    disc = np.hypot(0.5 * (a00 - a11), a01)
    return mean + disc, mean - disc


def _jacobi_sweep_scalar(a):
    """One cyclic Jacobi sweep over the 3x3 symmetric matrix a (in place)."""
    for p, q in ((0, 1), (0, 2), (1, 2)):
        apq = a[p][q]
        if apq == 0.0:
            continue
        theta = 0.5 * (a[q][q] - a[p][p]) / apq
        sign = 1.0 if theta >= 0.0 else -1.0
        t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
        c = 1.0 / np.sqrt(t * t + 1.0)
        s = t * c
        app, aqq = a[p][p], a[q][q]
        a[p][p] = app - t * apq
        a[q][q] = aqq + t * apq
        a[p][q] = a[q][p] = 0.0
        r = 3 - p - q
        arp, arq = a[r][p], a[r][q]
        a[r][p] = a[p][r] = c * arp - s * arq
        a[r][q] = a[q][r] = s * arp + c * arq


def _eigvals_sym3(a):
    scale = np.sqrt(sum(a[i][j] ** 2 for i in range(3) for j in range(3)))
    tol = JACOBI_TOL * scale
    a = [list(row) for row in a]
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(a[0][1] ** 2 + a[0][2] ** 2 + a[1][2] ** 2)
        if off <= tol:
            break
        _jacobi_sweep_scalar(a)
    return a[0][0], a[1][1], a[2][2]


def singular_values(M):
    """Singular values of a 2x2 or 3x3 real matrix, sorted descending."""
    M = np.asarray(M, dtype=np.float64)
    if M.shape == (2, 2):
        A = M.T @ M
        lams = _eigvals_sym2(A[0, 0], A[0, 1], A[1, 1])
    elif M.shape == (3, 3):
        lams = _eigvals_sym3(M.T @ M)
    else:
        raise ValueError(f"expected a 2x2 or 3x3 matrix, got shape {M.shape}")
    lams = np.sort(np.asarray(lams))[::-1]
    return np.sqrt(np.maximum(lams, 0.0))


def sigma_weight(M, codim):
    """Change-of-measure weight from the leading singular values.

    codim 1: the largest singular value in 2D, the product of the two
    largest in 3D.  codim 2 (curves in 3D): the largest singular value.
    """
    sigmas = singular_values(M)
    dim = np.asarray(M).shape[0]
    if codim == 1:
        return float(sigmas[0] if dim == 2 else sigmas[0] * sigmas[1])
    if codim == 2:
        if dim != 3:
            raise ValueError("codimension 2 requires a 3x3 Jacobian")
        return float(sigmas[0])
    raise ValueError(f"unsupported codimension {codim}")


# ---------------------------------------------------------------------------
# curvature from distance derivatives


def gaussian_from_distance(hessian):
    """Gaussian curvature of a distance-function level set from the six
    second derivatives of d: dxx dyy + dxx dzz + dyy dzz - dxy^2 - dxz^2 - dyz^2."""
    H = np.asarray(hessian, dtype=np.float64)
    if H.shape != (3, 3):
        raise ValueError("expected a 3x3 Hessian")
    return float(H[0, 0] * H[1, 1] + H[0, 0] * H[2, 2] + H[1, 1] * H[2, 2]
                 - H[0, 1] ** 2 - H[0, 2] ** 2 - H[1, 2] ** 2)


def jacobian_eta_reference(eta, mean_curvature, gauss_curvature=0.0, dim=3):
    """Exact level-set change-of-measure factor at offset eta.

    dim 2: 1 + eta * kappa (mean_curvature plays the signed curvature);
    dim 3: 1 + 2 eta H + eta^2 G.  A negative value means eta reaches past
    the focal distance and is rejected.
    """
    if dim == 2:
        value = 1.0 + eta * mean_curvature
    elif dim == 3:
        value = 1.0 + 2.0 * eta * mean_curvature + eta * eta * gauss_curvature
    else:
        raise ValueError("dim must be 2 or 3")
    if value < 0.0:
        raise SingularConfigurationError(
            "offset eta lies beyond the focal distance")
    return float(value)


def hessian_central(grid, dist, node):
    """Central-difference Hessian of a sampled scalar field at a grid node."""
    node = tuple(int(i) for i in node)
    dim = grid.dim
    n = grid.n
    for i in node:
        if i < 1 or i > n - 2:
            raise IndexError("node too close to the grid boundary")
    h = grid.h
    H = np.empty((dim, dim))
    center = dist[node]
    for a in range(dim):
        idx = list(node)
        idx[a] = node[a] + 1
        fp = dist[tuple(idx)]
        idx[a] = node[a] - 1
        fm = dist[tuple(idx)]
        H[a, a] = (fp - 2.0 * center + fm) / (h * h)
        for b in range(a + 1, dim):
            idx = list(node)
            idx[a], idx[b] = node[a] + 1, node[b] + 1
            fpp = dist[tuple(idx)]
            idx[a], idx[b] = node[a] + 1, node[b] - 1
            fpm = dist[tuple(idx)]
            idx[a], idx[b] = node[a] - 1, node[b] + 1
            fmp = dist[tuple(idx)]
            idx[a], idx[b] = node[a] - 1, node[b] - 1
            fmm = dist[tuple(idx)]
            H[a, b] = H[b, a] = (fpp - fpm - fmp + fmm) / (4.0 * h * h)
    return H
