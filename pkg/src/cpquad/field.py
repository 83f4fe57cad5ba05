"""Uniform Cartesian grids and grid-sampled closest-point fields.

A CpField stores, at every node, the closest point on the shape and the
distance to it (signed for closed codimension-1 shapes).  The integrators
consume only this data; the shape oracles are not needed past sampling.

Fields can be dumped to a small binary format for caching expensive
samplings between runs, see `save_field` / `load_field`.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigError, EmptyBandError, SingularConfigurationError

_HEADER_MAGIC = None  # format starts directly with dim; see save_field


@dataclass(frozen=True)
class Grid:
    """Isotropic node-centered lattice over a box, n nodes per axis."""

    lower: tuple
    upper: tuple
    n: int

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(lower) != len(upper) or len(lower) not in (2, 3):
            raise ConfigError("grid must be 2D or 3D with matching corners")
        if not all(u > l for l, u in zip(lower, upper)):
            raise ConfigError("upper corner must exceed lower corner")
        if self.n < 8:
            raise ConfigError("need at least 8 nodes per axis")
        spacings = [(u - l) / (self.n - 1) for l, u in zip(lower, upper)]
        if max(spacings) - min(spacings) > 1e-14 * max(spacings):
            raise ConfigError("grid spacing must be isotropic")

    @property
    def dim(self):
        return len(self.lower)

    @property
    def h(self):
        return (self.upper[0] - self.lower[0]) / (self.n - 1)

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def num_nodes(self):
        return self.n**self.dim

    def axis(self, k):
        return np.linspace(self.lower[k], self.upper[k], self.n)

    def node_position(self, node):
        return np.array([self.axis(k)[i] for k, i in enumerate(node)])

    def slab_points(self, i0):
        """Node coordinates of the axis-0 slab i0, flattened C-order (N, dim)."""
        x0 = self.axis(0)[i0]
        if self.dim == 2:
            pts = np.empty((self.n, 2))
            pts[:, 0] = x0
            pts[:, 1] = self.axis(1)
            return pts
        a1, a2 = np.meshgrid(self.axis(1), self.axis(2), indexing="ij")
        pts = np.empty((self.n * self.n, 3))
        pts[:, 0] = x0
        pts[:, 1] = a1.ravel()
        pts[:, 2] = a2.ravel()
        return pts


@dataclass(frozen=True)
class CpField:
    """Grid-sampled closest points and distances."""

    grid: Grid
    cp: np.ndarray    # (*grid.shape, dim)
    dist: np.ndarray  # grid.shape
    codim: int

    def __post_init__(self):
        if self.cp.shape != self.grid.shape + (self.grid.dim,):
            raise ValueError("cp array shape does not match grid")
        if self.dist.shape != self.grid.shape:
            raise ValueError("dist array shape does not match grid")
        if self.codim not in (1, 2):
            raise ValueError("codim must be 1 or 2")
        if self.codim == 2 and self.grid.dim != 3:
            raise ValueError("codimension 2 requires a 3D grid")

    def validate(self, tol=1e-12):
        """Check |cp - x| == |dist| at every node and distance sign rules."""
        if self.codim == 2 and np.any(self.dist < 0.0):
            raise ValueError("codimension-2 distances must be nonnegative")
        grid = self.grid
        axes = [grid.axis(k) for k in range(grid.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        err = np.zeros(grid.shape)
        for k in range(grid.dim):
            err += (self.cp[..., k] - mesh[k]) ** 2
        gap = np.abs(np.sqrt(err) - np.abs(self.dist))
        worst = float(gap.max())
        if worst > tol:
            raise ValueError(f"|cp - x| vs |dist| mismatch up to {worst:.3e}")
        return worst


@dataclass(frozen=True)
class BandIndex:
    """Multi-indices of nodes inside the narrow band, lexicographic order."""

    indices: np.ndarray  # (N, dim) int64
    eps: float

    def __len__(self):
        return self.indices.shape[0]


def sample_field(grid, shape, chunk=1 << 18):
    """Evaluate the shape's closest-point oracle at every grid node."""
    if shape.dim != grid.dim:
        raise ConfigError(
            f"shape dimension {shape.dim} does not match grid dimension {grid.dim}")
    lo, hi = shape.bounding_box()
    if np.any(lo < np.asarray(grid.lower)) or np.any(hi > np.asarray(grid.upper)):
        raise ConfigError("shape (and hence its band) exits the grid box")

    axes = [grid.axis(k) for k in range(grid.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    dist = np.empty(grid.num_nodes)
    cp = np.empty((grid.num_nodes, grid.dim))
    for start in range(0, grid.num_nodes, chunk):
        sl = slice(start, min(start + chunk, grid.num_nodes))
        dist[sl], cp[sl] = shape.query(pts[sl])
    return CpField(
        grid=grid,
        cp=cp.reshape(grid.shape + (grid.dim,)),
        dist=dist.reshape(grid.shape),
        codim=shape.codim,
    )


def cp_from_distance(grid, dist, node):
    """Closest point recovered from sampled distances alone:
    x - d(x) grad d(x), with a central-difference gradient.

    Rejects nodes where |grad d| strays from 1 by more than 0.1, which
    flags proximity to the focal set or a map discontinuity.
    """
    node = tuple(int(i) for i in node)
    n = grid.n
    for i in node:
        if i < 1 or i > n - 2:
            raise IndexError("node too close to the grid boundary")
    h = grid.h
    grad = np.empty(grid.dim)
    for a in range(grid.dim):
        idx = list(node)
        idx[a] = node[a] + 1
        fp = dist[tuple(idx)]
        idx[a] = node[a] - 1
        fm = dist[tuple(idx)]
        grad[a] = (fp - fm) / (2.0 * h)
    d = dist[node]
    gnorm = float(np.linalg.norm(grad))
    if d != 0.0 and abs(gnorm - 1.0) > 0.1:
        raise SingularConfigurationError(
            f"|grad d| = {gnorm:.3f} at node {node}; closest point unreliable")
    return grid.node_position(node) - d * grad


def band_mask(dist, codim, eps):
    """Band membership by distance alone (no boundary margin applied)."""
    if codim == 1:
        return np.abs(dist) < eps
    return dist < eps  # codim-2 distances are nonnegative


def extract_band(field, eps, stencil_radius):
    """Indices of nodes in the band, excluding nodes whose stencil would
    leave the grid.  Lexicographic node order."""
    if eps <= 0.0:
        raise ConfigError("band half-width eps must be positive")
    mask = band_mask(field.dist, field.codim, eps)
    r = int(stencil_radius)
    if r > 0:
        interior = np.zeros_like(mask)
        core = (slice(r, field.grid.n - r),) * field.grid.dim
        interior[core] = True
        mask &= interior
    idx = np.argwhere(mask)
    if idx.shape[0] == 0:
        raise EmptyBandError(
            f"no nodes with |distance| < {eps}; grid too coarse or eps too small")
    return BandIndex(indices=idx, eps=float(eps))


# ---------------------------------------------------------------------------
# binary cache format
#
# little-endian, in this order:
#   uint32 dim, uint32 n, float64 lower[dim], float64 upper[dim], uint32 codim
#   float64 dist[n^dim]            row-major
#   float64 cp_k[n^dim] for k = 1..dim, row-major


def save_field(field_obj, path):
    grid = field_obj.grid
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", grid.dim, grid.n))
        fh.write(struct.pack(f"<{grid.dim}d", *grid.lower))
        fh.write(struct.pack(f"<{grid.dim}d", *grid.upper))
        fh.write(struct.pack("<I", field_obj.codim))
        field_obj.dist.astype("<f8").tofile(fh)
        for k in range(grid.dim):
            np.ascontiguousarray(field_obj.cp[..., k]).astype("<f8").tofile(fh)


def load_field(path):
    with open(path, "rb") as fh:
        dim, n = struct.unpack("<II", fh.read(8))
        lower = struct.unpack(f"<{dim}d", fh.read(8 * dim))
        upper = struct.unpack(f"<{dim}d", fh.read(8 * dim))
        (codim,) = struct.unpack("<I", fh.read(4))
        grid = Grid(lower=lower, upper=upper, n=n)
        count = grid.num_nodes
        dist = np.fromfile(fh, dtype="<f8", count=count).reshape(grid.shape)
        cp = np.empty(grid.shape + (dim,))
        for k in range(dim):
            cp[..., k] = np.fromfile(fh, dtype="<f8", count=count).reshape(grid.shape)
    return CpField(grid=grid, cp=cp, dist=dist, codim=codim)
