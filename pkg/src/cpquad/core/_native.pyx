# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: band Jacobians + singular values, coil refinement.

Semantics match cpquad.core._pure; see that module for documentation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, fabs, hypot

cnp.import_array()

DEF JACOBI_TOL = 1e-15
DEF JACOBI_MAX_SWEEPS = 30

CENTRAL2 = 0
BIASED3 = 1
ONE_SIDED2 = 2

cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# small symmetric eigenproblems

cdef void _jacobi3(double A[3][3], double lam[3]) noexcept nogil:
    cdef double scale = 0.0, off, tol
    cdef double apq, theta, sign, t, c, s, app, aqq, arp, arq
    cdef int sweep, pair, p, q, r, i, j
    for i in range(3):
        for j in range(3):
            scale += A[i][j] * A[i][j]
    tol = JACOBI_TOL * sqrt(scale)
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = sqrt(A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2])
        if off <= tol:
            break
        for pair in range(3):
            if pair == 0:
                p = 0; q = 1
            elif pair == 1:
                p = 0; q = 2
            else:
                p = 1; q = 2
            apq = A[p][q]
            if apq == 0.0:
                continue
            theta = 0.5 * (A[q][q] - A[p][p]) / apq
            sign = 1.0 if theta >= 0.0 else -1.0
            t = sign / (fabs(theta) + sqrt(theta * theta + 1.0))
            c = 1.0 / sqrt(t * t + 1.0)
            s = t * c
            app = A[p][p]; aqq = A[q][q]
            A[p][p] = app - t * apq
            A[q][q] = aqq + t * apq
            A[p][q] = 0.0; A[q][p] = 0.0
            r = 3 - p - q
            arp = A[r][p]; arq = A[r][q]
            A[r][p] = c * arp - s * arq
            A[p][r] = A[r][p]
            A[r][q] = s * arp + c * arq
            A[q][r] = A[r][q]
    lam[0] = A[0][0]; lam[1] = A[1][1]; lam[2] = A[2][2]
    # sort descending (3 elements)
    cdef double tmp
    if lam[0] < lam[1]:
        tmp = lam[0]; lam[0] = lam[1]; lam[1] = tmp
    if lam[1] < lam[2]:
        tmp = lam[1]; lam[1] = lam[2]; lam[2] = tmp
    if lam[0] < lam[1]:
        tmp = lam[0]; lam[0] = lam[1]; lam[1] = tmp


cdef inline double _sigma3(double M[3][3], int codim) noexcept nogil:
    cdef double A[3][3]
    cdef double lam[3]
    cdef double s0, s1
    cdef int a, b, c
    for a in range(3):
        for b in range(3):
            A[a][b] = 0.0
            for c in range(3):
                A[a][b] += M[c][a] * M[c][b]
    _jacobi3(A, lam)
    s0 = sqrt(lam[0]) if lam[0] > 0.0 else 0.0
    if codim == 2:
        return s0
    s1 = sqrt(lam[1]) if lam[1] > 0.0 else 0.0
    return s0 * s1


cdef inline double _sigma2(double M[2][2]) noexcept nogil:
    cdef double a00 = M[0][0] * M[0][0] + M[1][0] * M[1][0]
    cdef double a01 = M[0][0] * M[0][1] + M[1][0] * M[1][1]
    cdef double a11 = M[0][1] * M[0][1] + M[1][1] * M[1][1]
    cdef double mean = 0.5 * (a00 + a11)
    cdef double disc = hypot(0.5 * (a00 - a11), a01)
    cdef double lam = mean + disc
    return sqrt(lam) if lam > 0.0 else 0.0


# ---------------------------------------------------------------------------
# one-axis stencils


cdef inline double _deriv(double fm2, double fm1, double f0,
                          double fp1, double fp2,
                          bint use_plus, double h, int scheme) noexcept nogil:
    if scheme == 0:  # central
        return (fp1 - fm1) / (2.0 * h)
    if scheme == 1:  # biased third order
        if use_plus:
            return (-2.0 * fm1 - 3.0 * f0 + 6.0 * fp1 - fp2) / (6.0 * h)
        return (2.0 * fp1 + 3.0 * f0 - 6.0 * fm1 + fm2) / (6.0 * h)
    if use_plus:     # one-sided second order
        return (-3.0 * f0 + 4.0 * fp1 - fp2) / (2.0 * h)
    return (3.0 * f0 - 4.0 * fm1 + fm2) / (2.0 * h)


cdef inline bint _side(double fm2, double fm1, double f0,
                       double fp1, double fp2) noexcept nogil:
    cdef double sp = fp2 - 2.0 * fp1 + f0
    cdef double sm = fm2 - 2.0 * fm1 + f0
    return fabs(sp) <= fabs(sm)


def sigma_band_3d(double[:, :, :, ::1] W, cnp.int64_t[::1] jj,
                  cnp.int64_t[::1] kk, double h, int scheme, int codim):
    """Band weights over the central slab of a 5-slab window (3D)."""
    cdef Py_ssize_t n = jj.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef int axis, c
    cdef double M[3][3]
    cdef double fm2, fm1, f0, fp1, fp2
    cdef bint use_plus
    with nogil:
        for i in range(n):
            j = jj[i]
            k = kk[i]
            for axis in range(3):
                if scheme == 0:
                    for c in range(3):
                        if axis == 0:
                            M[c][0] = (W[3, j, k, c] - W[1, j, k, c]) / (2.0 * h)
                        elif axis == 1:
                            M[c][1] = (W[2, j + 1, k, c] - W[2, j - 1, k, c]) / (2.0 * h)
                        else:
                            M[c][2] = (W[2, j, k + 1, c] - W[2, j, k - 1, c]) / (2.0 * h)
                else:
                    if axis == 0:
                        use_plus = _side(W[0, j, k, 0], W[1, j, k, 0], W[2, j, k, 0],
                                         W[3, j, k, 0], W[4, j, k, 0])
                        for c in range(3):
                            M[c][0] = _deriv(W[0, j, k, c], W[1, j, k, c],
                                             W[2, j, k, c], W[3, j, k, c],
                                             W[4, j, k, c], use_plus, h, scheme)
                    elif axis == 1:
                        use_plus = _side(W[2, j - 2, k, 1], W[2, j - 1, k, 1],
                                         W[2, j, k, 1], W[2, j + 1, k, 1],
                                         W[2, j + 2, k, 1])
                        for c in range(3):
                            M[c][1] = _deriv(W[2, j - 2, k, c], W[2, j - 1, k, c],
                                             W[2, j, k, c], W[2, j + 1, k, c],
                                             W[2, j + 2, k, c], use_plus, h, scheme)
                    else:
                        use_plus = _side(W[2, j, k - 2, 2], W[2, j, k - 1, 2],
                                         W[2, j, k, 2], W[2, j, k + 1, 2],
                                         W[2, j, k + 2, 2])
                        for c in range(3):
                            M[c][2] = _deriv(W[2, j, k - 2, c], W[2, j, k - 1, c],
                                             W[2, j, k, c], W[2, j, k + 1, c],
                                             W[2, j, k + 2, c], use_plus, h, scheme)
            out[i] = _sigma3(M, codim)
    return out_arr


def sigma_band_2d(double[:, :, ::1] W, cnp.int64_t[::1] jj, double h, int scheme):
    """Band weights over the central row of a 5-row window (2D, codim 1)."""
    cdef Py_ssize_t n = jj.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef int c
    cdef double M[2][2]
    cdef bint use_plus
    with nogil:
        for i in range(n):
            j = jj[i]
            if scheme == 0:
                for c in range(2):
                    M[c][0] = (W[3, j, c] - W[1, j, c]) / (2.0 * h)
                    M[c][1] = (W[2, j + 1, c] - W[2, j - 1, c]) / (2.0 * h)
            else:
                use_plus = _side(W[0, j, 0], W[1, j, 0], W[2, j, 0],
                                 W[3, j, 0], W[4, j, 0])
                for c in range(2):
                    M[c][0] = _deriv(W[0, j, c], W[1, j, c], W[2, j, c],
                                     W[3, j, c], W[4, j, c], use_plus, h, scheme)
                use_plus = _side(W[2, j - 2, 1], W[2, j - 1, 1], W[2, j, 1],
                                 W[2, j + 1, 1], W[2, j + 2, 1])
                for c in range(2):
                    M[c][1] = _deriv(W[2, j - 2, c], W[2, j - 1, c], W[2, j, c],
                                     W[2, j + 1, c], W[2, j + 2, c],
                                     use_plus, h, scheme)
            out[i] = _sigma2(M)
    return out_arr


# ---------------------------------------------------------------------------
# coil refinement


cdef inline double _coil_dist2(double r_h, double b, double rho, double m,
                               double w, double x, double y, double z,
                               double t) noexcept nogil:
    cdef double ct = cos(t)
    cdef double st = sin(t)
    cdef double cmt = cos(m * t)
    cdef double smt = sin(m * t)
    cdef double px = r_h * ct + rho * (-cmt * ct + smt * b * st / w)
    cdef double py = r_h * st + rho * (-cmt * st - smt * b * ct / w)
    cdef double pz = b * t + rho * smt * r_h / w
    return (px - x) * (px - x) + (py - y) * (py - y) + (pz - z) * (pz - z)


def refine_curve_params(double r_h, double b, double rho, double m,
                        double[:, ::1] pts, double[::1] lo, double[::1] hi,
                        int iters):
    """Golden-section refinement of bracketed coil closest-point parameters."""
    cdef Py_ssize_t n = pts.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int it
    cdef double w = hypot(r_h, b)
    cdef double x, y, z, a, bb, c, d, fc, fd
    with nogil:
        for i in range(n):
            x = pts[i, 0]; y = pts[i, 1]; z = pts[i, 2]
            a = lo[i]; bb = hi[i]
            c = bb - INVPHI * (bb - a)
            d = a + INVPHI * (bb - a)
            fc = _coil_dist2(r_h, b, rho, m, w, x, y, z, c)
            fd = _coil_dist2(r_h, b, rho, m, w, x, y, z, d)
            for it in range(iters):
                if fc < fd:
                    bb = d
                    d = c
                    fd = fc
                    c = bb - INVPHI * (bb - a)
                    fc = _coil_dist2(r_h, b, rho, m, w, x, y, z, c)
                else:
                    a = c
                    c = d
                    fc = fd
                    d = a + INVPHI * (bb - a)
                    fd = _coil_dist2(r_h, b, rho, m, w, x, y, z, d)
            out[i] = 0.5 * (a + bb)
    return out_arr
