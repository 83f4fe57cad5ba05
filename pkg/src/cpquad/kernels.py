"""Averaging kernels for band-limited surface and line quadrature.

Two unit-mass kernels ship:

  cosine   support [-eps, eps], used for codimension-1 integrals;
  k11      support [0, eps], vanishing to second order at 0, used for
           codimension-2 integrals where the weight K(d)/d appears.

Trigonometric terms of the form 1 - cos(u) are evaluated as 2 sin^2(u/2)
so small-argument values keep full relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# below this distance, K(d)/d is replaced by its limit 0; any band node on a
# feasible grid sits at distance >> this threshold
_ZERO_DISTANCE = 1e-12


@dataclass(frozen=True)
class Kernel:
    eps: float

    name = "kernel"

    def __post_init__(self):
        if not self.eps > 0.0:
            raise ValueError("kernel width eps must be positive")

    def __call__(self, eta):
        raise NotImplementedError

    @property
    def support(self):
        raise NotImplementedError


@dataclass(frozen=True)
class CosineKernel(Kernel):
    """(1/2eps)(1 + cos(pi eta / eps)) on [-eps, eps], zero outside."""

    name = "cos"

    def __call__(self, eta):
        eta = np.asarray(eta, dtype=np.float64)
        inside = np.abs(eta) < self.eps
        u = np.where(inside, eta, 0.0) * (math.pi / self.eps)
        # 1 + cos(u) = 2 cos^2(u/2)
        vals = (1.0 / self.eps) * np.cos(0.5 * u) ** 2
        return np.where(inside, vals, 0.0)

    @property
    def support(self):
        return (-self.eps, self.eps)


@dataclass(frozen=True)
class K11Kernel(Kernel):
    """(1/eps)(1 - cos(2 pi eta / eps)) on [0, eps], zero outside.

    Vanishes with zero slope at eta = 0, which keeps K(eta)/eta bounded.
    """

    name = "k11"

    def __call__(self, eta):
        eta = np.asarray(eta, dtype=np.float64)
        inside = (eta > 0.0) & (eta < self.eps)
        u = np.where(inside, eta, 0.0) * (math.pi / self.eps)
        # 1 - cos(2u) = 2 sin^2(u)
        vals = (2.0 / self.eps) * np.sin(u) ** 2
        return np.where(inside, vals, 0.0)

    @property
    def support(self):
        return (0.0, self.eps)

    def over_distance(self, d):
        """K(d)/d with the d -> 0 limit (= 0) patched in."""
        d = np.asarray(d, dtype=np.float64)
        if np.any(d < 0.0):
            raise ValueError("distance must be nonnegative for K(d)/d")
        safe = np.where(d > _ZERO_DISTANCE, d, 1.0)
        return np.where(d > _ZERO_DISTANCE, self(d) / safe, 0.0)


def kernel_by_name(name, eps):
    if name == "cos":
        return CosineKernel(eps)
    if name == "k11":
        return K11Kernel(eps)
    raise ValueError(f"unknown kernel {name!r}")


def eval_kernel(kernel, eta):
    """Pointwise kernel weight (scalar in, scalar out)."""
    return float(kernel(np.float64(eta)))


def eval_kernel_over_distance(kernel, d):
    """Pointwise K(d)/d for a kernel supported on [0, eps]."""
    if not isinstance(kernel, K11Kernel):
        raise TypeError("K(d)/d requires a kernel supported on [0, eps]")
    if d < 0.0:
        raise ValueError("distance must be nonnegative")
    return float(kernel.over_distance(np.float64(d)))


def kernel_moment(kernel, power, npoints=10_000):
    """integral of eta^power * K(eta) over the support (composite Simpson)."""
    lo, hi = kernel.support
    if npoints % 2 == 1:
        npoints += 1
    x = np.linspace(lo, hi, npoints + 1)
    y = x**power * kernel(x)
    h = (hi - lo) / npoints
    w = np.ones(npoints + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(h / 3.0 * np.sum(w * y))
