"""Analytic test shapes with exact distance and closest-point queries.

Each shape knows its ambient dimension, codimension, whether it is closed,
and answers vectorized closest-point queries.  Closed codimension-1 shapes
return a signed distance (positive inside the enclosed region); open shapes
and space curves return a nonnegative distance.

Ties on the focal set (where the nearest point is not unique) are broken
deterministically: the candidate with lexicographically smallest world
coordinates wins.  Such points never enter a valid narrow band, so the rule
only matters for reproducibility of point queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, SingularConfigurationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CurvePoint:
    """Point on a space curve with its Frenet data."""

    position: np.ndarray
    arclength: float
    tangent: np.ndarray
    normal: np.ndarray
    binormal: np.ndarray
    curvature: float


def _as_points(x, dim):
    """Coerce input to an (N, dim) float array; reject non-finite values."""
    pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite query point")
    return pts


def _lex_less(a, b):
    """Componentwise lexicographic '<' for stacks of points (N, dim)."""
    less = np.zeros(a.shape[0], dtype=bool)
    decided = np.zeros(a.shape[0], dtype=bool)
    for k in range(a.shape[1]):
        lk = ~decided & (a[:, k] < b[:, k])
        gk = ~decided & (a[:, k] > b[:, k])
        less |= lk
        decided |= lk | gk
    return less


def _pick_best(dists, cps):
    """Select per-point minimum-distance candidate, lexicographic tie-break.

    dists: list of (N,) arrays; cps: list of (N, dim) arrays.
    """
    best_d = dists[0].copy()
    best_cp = cps[0].copy()
    for d, cp in zip(dists[1:], cps[1:]):
        better = d < best_d
        tie = (d == best_d) & _lex_less(cp, best_cp)
        take = better | tie
        best_d[take] = d[take]
        best_cp[take] = cp[take]
    return best_d, best_cp


class Shape:
    """Common query surface for all analytic shapes."""

    dim: int
    codim: int
    closed: bool

    def query(self, points):
        """Vectorized closest-point query.

        Returns (d, cp) with d of shape (N,) and cp of shape (N, dim).
        d is signed for closed codimension-1 shapes (positive inside),
        nonnegative otherwise.
        """
        raise NotImplementedError

    def reference_measure(self):
        """Exact length/area of the shape (analytic or frozen quadrature)."""
        raise NotImplementedError

    def curvature_bound(self):
        """Upper bound on |principal curvature|, or None if unknown."""
        return None

    def bounding_box(self):
        """(lower, upper) arrays enclosing the shape itself (not its band)."""
        raise NotImplementedError

    def endpoints(self):
        """Endpoints of an open curve; empty tuple otherwise."""
        return ()


# ---------------------------------------------------------------------------
# codimension 1, 2D


@dataclass(frozen=True)
class CircleArc2D(Shape):
    """Portion of a circle of given radius centered at the origin.

    The arc covers parameter angles [alpha0, alpha1] and is then rotated
    rigidly by `rotation` radians.  A span of exactly 2*pi yields the full
    (closed) circle with signed distance.
    """

    radius: float
    alpha0: float = 0.0
    alpha1: float = TWO_PI
    rotation: float = 0.0

    dim = 2
    codim = 1

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ConfigError("radius must be positive")
        span = self.alpha1 - self.alpha0
        if not (0.0 < span <= TWO_PI + 1e-12):
            raise ConfigError("need alpha0 < alpha1 <= alpha0 + 2*pi")

    @property
    def closed(self):
        return self.alpha1 - self.alpha0 >= TWO_PI - 1e-12

    def _rot(self):
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return np.array([[c, -s], [s, c]])

    def query(self, points):
        pts = _as_points(points, 2)
        rot = self._rot()
        local = pts @ rot  # world -> arc frame (multiply by R^T)
        r = np.hypot(local[:, 0], local[:, 1])
        safe_r = np.where(r > 0.0, r, 1.0)
        radial = self.radius * local / safe_r[:, None]
        # center of the circle: all arc points equidistant; lex-min arc point
        center_hits = r == 0.0
        if np.any(center_hits):
            radial[center_hits] = self._lex_min_local()

        if self.closed:
            d = self.radius - r
            cp = radial @ rot.T
            return d, cp

        span = self.alpha1 - self.alpha0
        theta = np.arctan2(local[:, 1], local[:, 0])
        rel = np.mod(theta - self.alpha0, TWO_PI)
        on_arc = rel <= span
        d_on = np.abs(r - self.radius)

        e0 = self.radius * np.array([math.cos(self.alpha0), math.sin(self.alpha0)])
        e1 = self.radius * np.array([math.cos(self.alpha1), math.sin(self.alpha1)])
        d0 = np.hypot(local[:, 0] - e0[0], local[:, 1] - e0[1])
        d1 = np.hypot(local[:, 0] - e1[0], local[:, 1] - e1[1])
        ends = np.broadcast_to(e0, local.shape).copy()
        de = d0.copy()
        take1 = (d1 < d0) | ((d1 == d0) & _lex_less(
            np.broadcast_to(e1 @ rot.T, local.shape),
            np.broadcast_to(e0 @ rot.T, local.shape)))
        ends[take1] = e1
        de[take1] = d1[take1]

        d = np.where(on_arc & ~center_hits, d_on, de)
        cp_local = np.where((on_arc & ~center_hits)[:, None], radial, ends)
        if np.any(center_hits):
            d[center_hits] = self.radius
            cp_local[center_hits] = self._lex_min_local()
        return d, cp_local @ rot.T

    def _lex_min_local(self):
        """Arc point of lexicographically smallest world coordinates."""
        span = self.alpha1 - self.alpha0
        cands = [self.alpha0, self.alpha1]
        # interior angle where world x is minimal: t + rotation = pi
        t_star = self.alpha0 + np.mod(math.pi - self.rotation - self.alpha0, TWO_PI)
        if t_star <= self.alpha0 + span:
            cands.append(t_star)
        rot = self._rot()
        pts = np.array([[self.radius * math.cos(t), self.radius * math.sin(t)]
                        for t in cands])
        world = pts @ rot.T
        order = np.lexsort((world[:, 1], world[:, 0]))
        return pts[order[0]]

    def reference_measure(self):
        return self.radius * (self.alpha1 - self.alpha0)

    def curvature_bound(self):
        return 1.0 / self.radius

    def bounding_box(self):
        r = self.radius
        return np.array([-r, -r]), np.array([r, r])

    def endpoints(self):
        if self.closed:
            return ()
        rot = self._rot()
        e0 = self.radius * np.array([math.cos(self.alpha0), math.sin(self.alpha0)])
        e1 = self.radius * np.array([math.cos(self.alpha1), math.sin(self.alpha1)])
        return (rot @ e0, rot @ e1)


# ---------------------------------------------------------------------------
# codimension 1, 3D


@dataclass(frozen=True)
class Sphere(Shape):
    """Closed sphere centered at the origin; signed distance, positive inside."""

    radius: float

    dim = 3
    codim = 1
    closed = True

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ConfigError("radius must be positive")

    def query(self, points):
        pts = _as_points(points, 3)
        rho = np.linalg.norm(pts, axis=1)
        safe = np.where(rho > 0.0, rho, 1.0)
        cp = self.radius * pts / safe[:, None]
        at_center = rho == 0.0
        cp[at_center] = np.array([-self.radius, 0.0, 0.0])
        return self.radius - rho, cp

    def reference_measure(self):
        return 4.0 * math.pi * self.radius**2

    def curvature_bound(self):
        return 1.0 / self.radius

    def bounding_box(self):
        r = self.radius
        return np.full(3, -r), np.full(3, r)


@dataclass(frozen=True)
class Torus(Shape):
    """Torus about the z axis: ring radius (center to tube) and tube radius."""

    ring_radius: float
    tube_radius: float

    dim = 3
    codim = 1
    closed = True

    def __post_init__(self):
        if not (self.ring_radius > 0.0 and self.tube_radius > 0.0):
            raise ConfigError("torus radii must be positive")
        if not self.tube_radius < self.ring_radius:
            raise ConfigError("tube radius must be smaller than ring radius")

    def query(self, points):
        pts = _as_points(points, 3)
        R, r = self.ring_radius, self.tube_radius
        x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
        rho = np.hypot(x, y)
        safe_rho = np.where(rho > 0.0, rho, 1.0)
        # nearest point on the ring circle; z axis -> lex-min ring point
        ringx = np.where(rho > 0.0, R * x / safe_rho, -R)
        ringy = np.where(rho > 0.0, R * y / safe_rho, 0.0)
        vx, vy, vz = x - ringx, y - ringy, z
        q = np.sqrt(vx * vx + vy * vy + vz * vz)
        d = r - q

        safe_q = np.where(q > 0.0, q, 1.0)
        cp = np.stack([ringx + r * vx / safe_q,
                       ringy + r * vy / safe_q,
                       r * vz / safe_q], axis=1)
        on_ring = q == 0.0
        if np.any(on_ring):
            cp[on_ring] = self._ring_tiebreak(ringx[on_ring], ringy[on_ring])
        return d, cp

    def _ring_tiebreak(self, ringx, ringy):
        """Point exactly on the tube center circle: whole cross-section circle
        is equidistant; pick its lexicographically smallest point."""
        R, r = self.ring_radius, self.tube_radius
        ux, uy = ringx / R, ringy / R
        out = np.empty((len(ringx), 3))
        # minimize x = (R + r*c)*ux, then y, with psi in the radial/z plane
        c = np.where(ux > 0.0, -1.0, np.where(ux < 0.0, 1.0,
                     np.where(uy > 0.0, -1.0, 1.0)))
        out[:, 0] = (R + r * c) * ux
        out[:, 1] = (R + r * c) * uy
        out[:, 2] = 0.0
        return out

    def reference_measure(self):
        return 4.0 * math.pi**2 * self.ring_radius * self.tube_radius

    def curvature_bound(self):
        return max(1.0 / self.tube_radius,
                   1.0 / (self.ring_radius - self.tube_radius))

    def bounding_box(self):
        R, r = self.ring_radius, self.tube_radius
        return np.array([-(R + r), -(R + r), -r]), np.array([R + r, R + r, r])


_QUARTER = "quarter"
_THREE_QUARTER = "three_quarter"


@dataclass(frozen=True)
class SphereSector(Shape):
    """Open portion of the sphere |x| = radius.

    quarter:       points with y >= 0 and z >= 0.
    three_quarter: the complement piece (y <= 0 or z <= 0).

    Both share the same boundary: two half great circles in the y = 0 and
    z = 0 planes, meeting at the corners (+-radius, 0, 0).
    """

    radius: float
    fraction: str = _QUARTER

    dim = 3
    codim = 1
    closed = False

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ConfigError("radius must be positive")
        if self.fraction not in (_QUARTER, _THREE_QUARTER):
            raise ConfigError(f"unknown sector fraction {self.fraction!r}")

    def query(self, points):
        pts = _as_points(points, 3)
        R = self.radius
        x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
        rho = np.linalg.norm(pts, axis=1)
        safe = np.where(rho > 0.0, rho, 1.0)
        p = R * pts / safe[:, None]
        p[rho == 0.0] = np.array([-R, 0.0, 0.0])

        if self.fraction == _QUARTER:
            admissible = (p[:, 1] >= 0.0) & (p[:, 2] >= 0.0)
        else:
            admissible = (p[:, 1] <= 0.0) | (p[:, 2] <= 0.0)
        d_rad = np.where(admissible, np.abs(rho - R), np.inf)

        c_y = self._half_circle_clamp(x, y, z, plane="z")   # edge in z=0, y>=0
        c_z = self._half_circle_clamp(x, z, y, plane="y")   # edge in y=0, z>=0
        d_y = np.linalg.norm(pts - c_y, axis=1)
        d_z = np.linalg.norm(pts - c_z, axis=1)

        return _pick_best([d_rad, d_y, d_z], [p, c_y, c_z])

    def _half_circle_clamp(self, a, b, other, plane):
        """Nearest point on the half circle {(R cos t, R sin t) in the (a,b)
        plane, t in [0, pi]}; angles past the ends clamp to the nearer end,
        with the exact mid-gap tie going to the lex-smaller end (-R, 0)."""
        R = self.radius
        t = np.arctan2(b, a)
        t = np.where(t >= 0.0, t, np.where(t > -0.5 * math.pi, 0.0, math.pi))
        t = np.where(np.hypot(a, b) == 0.0, math.pi, t)
        ca, cb = R * np.cos(t), R * np.sin(t)
        out = np.empty((len(a), 3))
        if plane == "z":
            out[:, 0], out[:, 1], out[:, 2] = ca, cb, 0.0
        else:
            out[:, 0], out[:, 1], out[:, 2] = ca, 0.0, cb
        return out

    def reference_measure(self):
        full = 4.0 * math.pi * self.radius**2
        return 0.25 * full if self.fraction == _QUARTER else 0.75 * full

    def curvature_bound(self):
        return 1.0 / self.radius

    def bounding_box(self):
        r = self.radius
        return np.full(3, -r), np.full(3, r)

    def boundary_distance(self, points):
        """Distance from on-shape points to the sector's boundary arcs.

        Used to classify band nodes whose closest point is an edge/corner.
        """
        pts = _as_points(points, 3)
        c_y = self._half_circle_clamp(pts[:, 0], pts[:, 1], pts[:, 2], plane="z")
        c_z = self._half_circle_clamp(pts[:, 0], pts[:, 2], pts[:, 1], plane="y")
        return np.minimum(np.linalg.norm(pts - c_y, axis=1),
                          np.linalg.norm(pts - c_z, axis=1))


# ---------------------------------------------------------------------------
# codimension 2 (curves in 3D)


def _plane_basis(normal):
    """Deterministic orthonormal (e1, e2, n) with n = normalized normal."""
    n = np.asarray(normal, dtype=np.float64)
    n = n / np.linalg.norm(n)
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(n)))] = 1.0
    e1 = seed - np.dot(seed, n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2, n


@dataclass(frozen=True)
class Circle3D(Shape):
    """Circle of given radius embedded in a plane in 3D (a closed curve)."""

    radius: float
    center: tuple = (0.0, 0.0, 0.0)
    normal: tuple = (0.0, 0.0, 1.0)

    dim = 3
    codim = 2
    closed = True

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ConfigError("radius must be positive")

    def _basis(self):
        return _plane_basis(self.normal)

    def point(self, t):
        e1, e2, _ = self._basis()
        t = np.asarray(t, dtype=np.float64)
        c = np.asarray(self.center)
        return (c + self.radius * (np.multiply.outer(np.cos(t), e1)
                                   + np.multiply.outer(np.sin(t), e2)))

    def query(self, points):
        pts = _as_points(points, 3)
        e1, e2, n = self._basis()
        w = pts - np.asarray(self.center)
        a, b, c = w @ e1, w @ e2, w @ n
        rho = np.hypot(a, b)
        safe = np.where(rho > 0.0, rho, 1.0)
        cp = (np.asarray(self.center)
              + (self.radius / safe)[:, None] * (a[:, None] * e1 + b[:, None] * e2))
        on_axis = rho == 0.0
        if np.any(on_axis):
            cp[on_axis] = self._lex_min_point()
        d = np.hypot(rho - self.radius, c)
        d[on_axis] = np.hypot(self.radius, c[on_axis])
        return d, cp

    def _lex_min_point(self):
        e1, e2, _ = self._basis()
        c = np.asarray(self.center)
        # minimize successive world coordinates over the circle
        for k in range(3):
            alpha, beta = e1[k], e2[k]
            if np.hypot(alpha, beta) > 1e-15:
                t = math.atan2(-beta, -alpha)
                return c + self.radius * (math.cos(t) * e1 + math.sin(t) * e2)
        return c + self.radius * e1

    def frame(self, t):
        e1, e2, n = self._basis()
        pos = self.point(t)
        tangent = -math.sin(t) * e1 + math.cos(t) * e2
        normal = -(math.cos(t) * e1 + math.sin(t) * e2)
        binormal = np.cross(tangent, normal)
        return CurvePoint(pos, self.radius * t, tangent, normal, binormal,
                          1.0 / self.radius)

    def speed(self, t):
        return np.full_like(np.asarray(t, dtype=np.float64), self.radius)

    def reference_measure(self):
        return TWO_PI * self.radius

    def curvature_bound(self):
        return 1.0 / self.radius

    def bounding_box(self):
        r = self.radius
        c = np.asarray(self.center)
        # loose box; exact extent depends on the plane orientation
        return c - (r + 1e-9), c + (r + 1e-9)


@dataclass(frozen=True)
class Segment3D(Shape):
    """Straight segment between two points (an open curve, zero curvature)."""

    start: tuple
    end: tuple

    dim = 3
    codim = 2
    closed = False

    def __post_init__(self):
        if not np.linalg.norm(np.subtract(self.end, self.start)) > 0.0:
            raise ConfigError("segment endpoints must differ")

    def query(self, points):
        pts = _as_points(points, 3)
        a = np.asarray(self.start, dtype=np.float64)
        b = np.asarray(self.end, dtype=np.float64)
        ab = b - a
        L2 = float(ab @ ab)
        s = np.clip((pts - a) @ ab / L2, 0.0, 1.0)
        cp = a + s[:, None] * ab
        return np.linalg.norm(pts - cp, axis=1), cp

    def frame(self, t):
        a = np.asarray(self.start, dtype=np.float64)
        b = np.asarray(self.end, dtype=np.float64)
        ab = b - a
        L = float(np.linalg.norm(ab))
        tangent = ab / L
        e1, e2, _ = _plane_basis(tangent)
        pos = a + t * ab
        return CurvePoint(pos, t * L, tangent, e1, np.cross(tangent, e1), 0.0)

    def point(self, t):
        a = np.asarray(self.start, dtype=np.float64)
        b = np.asarray(self.end, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
        return a + np.multiply.outer(t, b - a)

    def speed(self, t):
        L = float(np.linalg.norm(np.subtract(self.end, self.start)))
        return np.full_like(np.asarray(t, dtype=np.float64), L)

    def reference_measure(self):
        return float(np.linalg.norm(np.subtract(self.end, self.start)))

    def curvature_bound(self):
        return 0.0

    def bounding_box(self):
        a = np.asarray(self.start, dtype=np.float64)
        b = np.asarray(self.end, dtype=np.float64)
        return np.minimum(a, b), np.maximum(a, b)

    def endpoints(self):
        return (np.asarray(self.start, dtype=np.float64),
                np.asarray(self.end, dtype=np.float64))


@dataclass(frozen=True)
class HelixCoil(Shape):
    """Coil winding around a circular helix.

    The base helix is (r cos t, r sin t, b t).  The coil sits at a constant
    offset from the helix in its normal plane and wraps around it
    `windings` times per helix turn:

        coil(t) = helix(t) + offset * (cos(m t) N(t) + sin(m t) B(t))

    with (T, N, B) the helix Frenet frame.  offset = 0 degenerates to the
    helix itself.  Closest-point queries have no closed form: a coarse
    global scan (4096 parameter samples) brackets the minimizer, then
    golden-section refinement resolves it to 1e-13 in parameter.
    """

    helix_radius: float = 0.75
    pitch: float = 0.25
    offset: float = 0.2
    windings: int = 10
    t_min: float = 0.0
    t_max: float = 4.0 * math.pi

    dim = 3
    codim = 2
    closed = False

    _N_SCAN = 4096
    _REFINE_ITERS = 60

    def __post_init__(self):
        if not (self.helix_radius > 0.0 and self.pitch > 0.0):
            raise ConfigError("helix radius and pitch must be positive")
        if not (0.0 <= self.offset < self.helix_radius):
            raise ConfigError("coil offset must satisfy 0 <= offset < helix radius")
        if not self.t_min < self.t_max:
            raise ConfigError("need t_min < t_max")

    # -- helix frame ingredients -------------------------------------------

    def _consts(self):
        r, b = self.helix_radius, self.pitch
        w = math.hypot(r, b)            # |helix'(t)|
        kappa = r / (w * w)
        tau = b / (w * w)
        return w, kappa, tau

    def _helix_frame(self, t):
        r, b = self.helix_radius, self.pitch
        w, _, _ = self._consts()
        ct, st = np.cos(t), np.sin(t)
        T = np.stack([-r * st, r * ct, np.broadcast_to(b, np.shape(t))], axis=-1) / w
        N = np.stack([-ct, -st, np.zeros_like(ct)], axis=-1)
        B = np.stack([b * st, -b * ct, np.broadcast_to(r, np.shape(t))], axis=-1) / w
        return T, N, B

    def point(self, t):
        t = np.asarray(t, dtype=np.float64)
        r, b = self.helix_radius, self.pitch
        _, N, B = self._helix_frame(t)
        base = np.stack([r * np.cos(t), r * np.sin(t), b * t], axis=-1)
        mt = self.windings * t
        return base + self.offset * (np.cos(mt)[..., None] * N
                                     + np.sin(mt)[..., None] * B)

    def _derivatives(self, t):
        """First and second t-derivatives, in ambient coordinates."""
        t = np.asarray(t, dtype=np.float64)
        w, kap, tau = self._consts()
        rho, m = self.offset, float(self.windings)
        T, N, B = self._helix_frame(t)
        mt = m * t
        cmt, smt = np.cos(mt), np.sin(mt)
        mw = m + w * tau
        A = w * (1.0 - rho * kap * cmt)
        C = -rho * mw * smt
        D = rho * mw * cmt
        Ap = w * rho * kap * m * smt
        Cp = -rho * mw * m * cmt
        Dp = -rho * mw * m * smt
        d1 = A[..., None] * T + C[..., None] * N + D[..., None] * B
        d2 = ((Ap - C * w * kap)[..., None] * T
              + (A * w * kap + Cp - D * w * tau)[..., None] * N
              + (C * w * tau + Dp)[..., None] * B)
        return d1, d2

    def speed(self, t):
        d1, _ = self._derivatives(t)
        return np.linalg.norm(d1, axis=-1)

    def frame(self, t):
        d1, d2 = self._derivatives(float(t))
        d1, d2 = d1.reshape(3), d2.reshape(3)
        v = np.linalg.norm(d1)
        tangent = d1 / v
        cross = np.cross(d1, d2)
        nc = np.linalg.norm(cross)
        if nc < 1e-14 * v**3:
            raise SingularConfigurationError("curvature vanishes; frame undefined")
        binormal = cross / nc
        normal = np.cross(binormal, tangent)
        kappa = nc / v**3
        return CurvePoint(self.point(float(t)).reshape(3),
                          self._arclength_to(float(t)),
                          tangent, normal, binormal, kappa)

    def _arclength_to(self, t):
        # composite Gauss; panel count resolves the winding oscillation
        xs, ws = np.polynomial.legendre.leggauss(10)
        panels = max(16, 8 * max(self.windings, 1))
        edges = np.linspace(self.t_min, t, panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        nodes = (mid[:, None] + half * xs[None, :]).ravel()
        return float(half * np.sum(self.speed(nodes).reshape(panels, -1) @ ws))

    # -- scalar geometry ----------------------------------------------------

    def reference_measure(self):
        return _coil_length(self)

    def curvature_bound(self):
        ts = np.linspace(self.t_min, self.t_max, 8192)
        d1, d2 = self._derivatives(ts)
        v = np.linalg.norm(d1, axis=-1)
        kappa = np.linalg.norm(np.cross(d1, d2), axis=-1) / v**3
        return float(kappa.max() * 1.01)

    def bounding_box(self):
        ts = np.linspace(self.t_min, self.t_max, 100001)
        pts = self.point(ts)
        return pts.min(axis=0), pts.max(axis=0)

    def endpoints(self):
        return (self.point(self.t_min).reshape(3),
                self.point(self.t_max).reshape(3))

    # -- closest-point query --------------------------------------------------

    def _scan_points(self):
        ts = np.linspace(self.t_min, self.t_max, self._N_SCAN)
        return ts, self.point(ts)

    def query(self, points):
        from .core import refine_curve_params  # selected backend

        pts = _as_points(points, 3)
        ts, samples = _coil_scan(self)
        tree = _coil_tree(self)
        _, idx = tree.query(pts, k=1)
        spacing = ts[1] - ts[0]
        lo = np.maximum(ts[idx] - 2.0 * spacing, self.t_min)
        hi = np.minimum(ts[idx] + 2.0 * spacing, self.t_max)
        t_star = refine_curve_params(
            self.helix_radius, self.pitch, self.offset, float(self.windings),
            pts, lo, hi, self._REFINE_ITERS)
        cp = self.point(t_star)
        d = np.linalg.norm(pts - cp, axis=1)
        return d, cp


@lru_cache(maxsize=8)
def _coil_scan(coil):
    ts = np.linspace(coil.t_min, coil.t_max, coil._N_SCAN)
    return ts, coil.point(ts)


@lru_cache(maxsize=8)
def _coil_tree(coil):
    from scipy.spatial import cKDTree

    return cKDTree(_coil_scan(coil)[1])


@lru_cache(maxsize=8)
def _coil_length(coil):
    """Arclength by composite Gauss quadrature, panels doubled until two
    successive refinements agree to 1e-12 (relative)."""
    xs, ws = np.polynomial.legendre.leggauss(10)
    def estimate(panels):
        edges = np.linspace(coil.t_min, coil.t_max, panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        nodes = (mid[:, None] + half * xs[None, :]).ravel()
        return half * float(np.sum(coil.speed(nodes).reshape(panels, -1) @ ws))

    panels = 16
    prev = estimate(panels)
    for _ in range(16):
        panels *= 2
        cur = estimate(panels)
        if abs(cur - prev) <= 1e-12 * abs(cur):
            return cur
        prev = cur
    raise RuntimeError("coil length quadrature did not converge")


# ---------------------------------------------------------------------------
# functional surface mirroring the per-operation contracts


def shape_query(shape, x):
    """Distance and closest point of a single query point."""
    d, cp = shape.query(np.asarray(x, dtype=np.float64)[None, :])
    return float(d[0]), cp[0]


def curve_frame(shape, t):
    """Frenet frame of a space curve at parameter t."""
    t = float(t)
    if isinstance(shape, (Circle3D, Segment3D)):
        return shape.frame(t)
    if isinstance(shape, HelixCoil):
        if not (shape.t_min <= t <= shape.t_max):
            raise ValueError("parameter outside the curve's span")
        return shape.frame(t)
    raise TypeError(f"no Frenet frame for shape {type(shape).__name__}")


def reference_measure(shape):
    return shape.reference_measure()


def analytic_sigma_reference(shape, x):
    """Closed-form change-of-measure weight at x for sphere, circle, torus.

    This is the exact value that the finite-difference weight converges to;
    it is used as an independent oracle.
    """
    x = np.asarray(x, dtype=np.float64)
    if isinstance(shape, Sphere):
        rho = float(np.linalg.norm(x))
        if rho < 1e-12:
            raise SingularConfigurationError("query at the sphere center")
        return (shape.radius / rho) ** 2
    if isinstance(shape, CircleArc2D):
        rho = float(np.hypot(x[0], x[1]))
        if rho < 1e-12:
            raise SingularConfigurationError("query at the circle center")
        return shape.radius / rho
    if isinstance(shape, Torus):
        # product of the two tangential stretch factors of the offset torus;
        # algebraically equal to 1 + 2 eta H + eta^2 G but computed on an
        # independent route so the polynomial form can be checked against it
        R = shape.ring_radius
        rho_xy = math.hypot(x[0], x[1])
        if rho_xy < 1e-12:
            raise SingularConfigurationError("query on the torus axis")
        u = rho_xy - R
        q = math.hypot(u, x[2])
        if q < 1e-12:
            raise SingularConfigurationError("query on the tube center circle")
        eta = shape.tube_radius - q
        return (1.0 + eta / q) * (1.0 + eta * u / (q * rho_xy))
    raise TypeError(f"no closed-form weight for shape {type(shape).__name__}")


def _torus_level_curvatures(shape, x):
    R, r = shape.ring_radius, shape.tube_radius
    rho_xy = math.hypot(x[0], x[1])
    if rho_xy < 1e-12:
        raise SingularConfigurationError("query on the torus axis")
    u = rho_xy - R
    q = math.hypot(u, x[2])
    if q < 1e-12:
        raise SingularConfigurationError("query on the tube center circle")
    h_eta = 0.5 * (1.0 / q + u / (q * rho_xy))
    g_eta = u / (q * q * rho_xy)
    return h_eta, g_eta, r - q


def level_set_curvatures(shape, x):
    """Mean and Gaussian curvature (distance-function convention) of the
    level set of d through x, for shapes with closed forms."""
    x = np.asarray(x, dtype=np.float64)
    if isinstance(shape, Sphere):
        rho = float(np.linalg.norm(x))
        if rho < 1e-12:
            raise SingularConfigurationError("query at the sphere center")
        return 1.0 / rho, 1.0 / rho**2
    if isinstance(shape, Torus):
        h_eta, g_eta, _ = _torus_level_curvatures(shape, x)
        return h_eta, g_eta
    if isinstance(shape, CircleArc2D):
        rho = float(np.hypot(x[0], x[1]))
        if rho < 1e-12:
            raise SingularConfigurationError("query at the circle center")
        return 1.0 / rho, 0.0
    raise TypeError(f"no closed-form curvatures for {type(shape).__name__}")
