"""Numerical core with a compiled fast path.

The hot kernels (per-band-node finite-difference Jacobians with their
singular values, and coil closest-point refinement) live in a Cython
extension.  When the extension is unavailable, or CPQUAD_PURE is set in the
environment, a NumPy implementation with identical semantics is used.
`benchmarks/bench_core.py` compares the two.
"""

import os

from . import _pure

_FORCE_PURE = bool(os.environ.get("CPQUAD_PURE"))

try:
    from . import _native
except ImportError:  # extension not built; fall back silently
    _native = None

_ACTIVE = _pure if (_FORCE_PURE or _native is None) else _native


def active_backend_name():
    return "pure" if _ACTIVE is _pure else "native"


def available_backends():
    out = {"pure": _pure}
    if _native is not None:
        out["native"] = _native
    return out


def get_backend(name):
    return available_backends()[name]


def sigma_band_2d(W, jj, h, scheme):
    return _ACTIVE.sigma_band_2d(W, jj, h, scheme)


def sigma_band_3d(W, jj, kk, h, scheme, codim):
    return _ACTIVE.sigma_band_3d(W, jj, kk, h, scheme, codim)


def refine_curve_params(r_h, b, rho, m, pts, lo, hi, iters):
    return _ACTIVE.refine_curve_params(r_h, b, rho, m, pts, lo, hi, iters)


SCHEME_CODES = {"central2": _pure.CENTRAL2,
                "biased3": _pure.BIASED3,
                "one_sided2": _pure.ONE_SIDED2}
