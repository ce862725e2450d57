"""Rotation sets: periodic-orbit point clouds, convex hulls, the vertex
fan of the fish potential, distinguished boundary points, membership
classification, and fiber slices of joint rotation sets.

Every cloud point is the exact rotation vector of a periodic orbit, so
clouds are inner approximations of the full rotation set and their
hulls grow monotonically with the maximal period.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .potentials import FishGeometry
from .shift import PeriodicOrbit, TransitionSystem, enumerate_periodic_orbits


@dataclass(frozen=True)
class RotationCloud:
    """Rotation vectors of periodic orbits, one point per orbit."""

    points: np.ndarray  # (N, m)
    orbits: tuple[PeriodicOrbit, ...]
    potential_id: str
    max_period: int

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class ConvexPolytope:
    """Extreme points of a convex hull; counterclockwise order for
    dimension 2, sorted endpoints for dimension 1."""

    dim: int
    vertices: np.ndarray

    @property
    def area(self) -> float:
        if self.dim != 2:
            raise ValueError("area is defined for planar polytopes")
        V = self.vertices
        if V.shape[0] < 3:
            return 0.0
        x, y = V[:, 0], V[:, 1]
        return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


@dataclass(frozen=True)
class FishVertexFan:
    """Boundary vertex candidates w_i(j) of the fish rotation set for
    alpha <= j <= j_max, both classes."""

    geometry: FishGeometry
    j_max: int
    lower: np.ndarray  # class-1 vertices, rows j = alpha .. j_max
    upper: np.ndarray  # class-2 vertices
    hypothesis_warnings: tuple[str, ...]

    def vertex(self, i: int, j: int) -> np.ndarray:
        if not (self.geometry.alpha <= j <= self.j_max):
            raise ValueError("vertex index out of range")
        row = j - self.geometry.alpha
        return (self.lower if i == 1 else self.upper)[row]

    def polygon_with_cap(self) -> ConvexPolytope:
        """Hull of the fan vertices together with the accumulation
        point, closing the infinite polygon by the two cap segments."""
        pts = np.vstack([self.lower, self.upper, self.geometry.w_inf[None, :]])
        return convex_hull(pts)


def rotation_cloud(
    ts: TransitionSystem,
    potential,
    max_period: int,
    limit: int | None = None,
    extra_generators: Iterable[Sequence[int]] = (),
) -> RotationCloud:
    """Rotation vectors of primitive periodic orbits up to max_period.

    `limit` caps the number of streamed orbits (the enumeration is
    period-ordered only loosely, so small limits favor short periods);
    `extra_generators` appends chosen orbits, deduplicated.
    """
    orbits: list[PeriodicOrbit] = []
    seen = set()
    for orbit in enumerate_periodic_orbits(ts, max_period):
        orbits.append(orbit)
        seen.add(orbit.generator)
        if limit is not None and len(orbits) >= limit:
            break
    for gen in extra_generators:
        orbit = PeriodicOrbit(tuple(gen))
        if orbit.generator not in seen:
            orbits.append(orbit)
            seen.add(orbit.generator)
    if not orbits:
        raise ValueError("no admissible periodic orbits found")
    points = np.array([np.atleast_1d(potential.birkhoff_average(o)) for o in orbits])
    label = getattr(potential, "label", potential.__class__.__name__)
    return RotationCloud(points, tuple(orbits), label, max_period)


def _orientation(o, a, b) -> int:
    """Sign of the cross product (a-o) x (b-o); exact.

    A floating evaluation with a forward error filter decides the
    generic case; near-degenerate configurations fall back to exact
    rational arithmetic on the binary representations.
    """
    acx, acy = a[0] - o[0], a[1] - o[1]
    bcx, bcy = b[0] - o[0], b[1] - o[1]
    det = acx * bcy - acy * bcx
    err = 4e-16 * (abs(acx * bcy) + abs(acy * bcx))
    if abs(det) > err:
        return 1 if det > 0 else -1
    fo = [Fraction(float(t)) for t in o]
    fa = [Fraction(float(t)) for t in a]
    fb = [Fraction(float(t)) for t in b]
    d = (fa[0] - fo[0]) * (fb[1] - fo[1]) - (fa[1] - fo[1]) * (fb[0] - fo[0])
    return (d > 0) - (d < 0)


def convex_hull(points: np.ndarray | Sequence[Sequence[float]]) -> ConvexPolytope:
    """Convex hull for dimension <= 3.

    Dimension 1 returns the endpoints; dimension 2 runs a monotone-chain
    sweep with exact orientation tests (collinear points dropped, so all
    vertices are extreme); dimension 3 delegates to Qhull.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] == 0:
        raise ValueError("empty point cloud")
    m = P.shape[1]
    if m == 1:
        return ConvexPolytope(1, np.array([[P.min()], [P.max()]]))
    if m == 2:
        pts = sorted({(float(x), float(y)) for x, y in P})
        if len(pts) == 1:
            return ConvexPolytope(2, np.array(pts))
        if all(_orientation(pts[0], pts[-1], p) == 0 for p in pts):
            return ConvexPolytope(2, np.array([pts[0], pts[-1]]))

        def chain(seq):
            out: list[tuple[float, float]] = []
            for p in seq:
                while len(out) > 1 and _orientation(out[-2], out[-1], p) <= 0:
                    out.pop()
                out.append(p)
            return out

        lower = chain(pts)
        upper = chain(reversed(pts))
        return ConvexPolytope(2, np.array(lower[:-1] + upper[:-1]))
    if m == 3:
        from scipy.spatial import ConvexHull as _Qhull

        hull = _Qhull(P, qhull_options="QJ")
        return ConvexPolytope(3, P[sorted(set(hull.vertices))])
    raise ValueError("hulls are supported for dimension <= 3")


def hull_membership(
    point: Sequence[float], polytope: ConvexPolytope, tol: float = 1e-9
) -> str:
    """Classify a point against a hull: 'interior', 'boundary', or
    'exterior', with an absolute tolerance on supporting-plane
    distances."""
    p = np.atleast_1d(np.asarray(point, dtype=float))
    if p.shape[0] != polytope.dim:
        raise ValueError("dimension mismatch")
    V = polytope.vertices
    if polytope.dim == 1:
        lo, hi = float(V.min()), float(V.max())
        x = float(p[0])
        if x < lo - tol or x > hi + tol:
            return "exterior"
        if x <= lo + tol or x >= hi - tol:
            return "boundary"
        return "interior"
    if polytope.dim == 2:
        n = V.shape[0]
        if n == 1:
            return "boundary" if np.linalg.norm(p - V[0]) <= tol else "exterior"
        if n == 2:
            a, b = V[0], V[1]
            ab = b - a
            L = float(np.linalg.norm(ab))
            u = ab / L
            s = float((p - a) @ u)
            dist = float(np.linalg.norm(p - a - s * u))
            if dist > tol or s < -tol or s > L + tol:
                return "exterior"
            return "boundary"
        signed = []
        for i in range(n):
            a, b = V[i], V[(i + 1) % n]
            e = b - a
            L = float(np.linalg.norm(e))
            signed.append(float(e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0])) / L)
        worst = min(signed)
        if worst < -tol:
            return "exterior"
        if worst <= tol:
            return "boundary"
        return "interior"
    # dimension 3: support-function test on facets via Qhull equations
    from scipy.spatial import ConvexHull as _Qhull

    hull = _Qhull(polytope.vertices, qhull_options="QJ")
    vals = hull.equations[:, :3] @ p + hull.equations[:, 3]
    worst = float(vals.max())
    if worst > tol:
        return "exterior"
    if worst >= -tol:
        return "boundary"
    return "interior"


def fish_vertices(geometry: FishGeometry, j_max: int) -> FishVertexFan:
    """Vertex candidates of the fish rotation set.

    For j > alpha, w_i(j) = (alpha*w0 + v_i(1) + ... + v_i(j-alpha)) / j
    is the rotation vector of the orbit spending j-1 symbols in class i
    and one outside.  The j = alpha entry is the distinguished pair with
    ordinate l(x1)/(3*alpha), kept verbatim from the construction; it
    bounds the cloud but is not itself realized by any orbit.
    """
    alpha = geometry.alpha
    if j_max < alpha:
        raise ValueError("j_max must be >= alpha")
    w0 = geometry.w0_vec
    lower, upper = [], []
    special_x = ((alpha - 1) * w0[0] + geometry.x1) / alpha
    special_y = geometry.curve.l(geometry.x1) / (3 * alpha)
    lower.append(np.array([special_x, -special_y]))
    upper.append(np.array([special_x, special_y]))
    acc1 = np.zeros(2)
    acc2 = np.zeros(2)
    for j in range(alpha + 1, j_max + 1):
        acc1 = acc1 + geometry.v(1, j - alpha)
        acc2 = acc2 + geometry.v(2, j - alpha)
        lower.append((alpha * w0 + acc1) / j)
        upper.append((alpha * w0 + acc2) / j)
    return FishVertexFan(
        geometry,
        j_max,
        np.array(lower),
        np.array(upper),
        tuple(geometry.validate()),
    )


def fish_star_points(geometry: FishGeometry, j_max: int) -> dict[int, np.ndarray]:
    """Per-symbol block averages w_s*(j) = ((alpha-1) w0 + v_s(1) + ...
    + v_s(j-alpha+1)) / j for alpha <= j <= j_max, per class."""
    alpha = geometry.alpha
    if j_max < alpha:
        raise ValueError("j_max must be >= alpha")
    out = {}
    for s in (1, 2):
        acc = np.zeros(2)
        rows = []
        for k in range(1, j_max - alpha + 2):
            acc = acc + geometry.v(s, k)
            j = k + alpha - 1
            rows.append(((alpha - 1) * geometry.w0_vec + acc) / j)
        out[s] = np.array(rows)
    return out


def star_point_bound(geometry: FishGeometry, j: int) -> float:
    """Distance bound |w_s*(j) - w_inf| <= ((alpha-1)|w0 - w_inf| +
    sum_i |v_s(i) - w_inf|) / j with the actual arc-point norms.

    The idealized form replaces the sum by 1 (valid when all arc points
    satisfy |v(k)| < 2^-k, including k = 1)."""
    alpha = geometry.alpha
    total = sum(geometry.v_norm(k) for k in range(1, j - alpha + 2))
    w0n = float(np.linalg.norm(geometry.w0_vec - geometry.w_inf))
    return ((alpha - 1) * w0n + total) / j


def vertex_orbit_generator(geometry: FishGeometry, i: int, j: int) -> tuple[int, ...]:
    """Generator of the period-j orbit realizing w_i(j) for j > alpha:
    j-1 symbols of class i followed by one symbol of the other class
    (lexicographically minimal representatives)."""
    if j <= geometry.alpha:
        raise ValueError("vertex orbits exist for j > alpha")
    if i == 1:
        return (0,) * (j - 1) + (2,)
    return (0,) + (2,) * (j - 1)  # minimal rotation of 2^(j-1) 0


def slice_interval(
    joint_cloud: RotationCloud, w: Sequence[float], tol: float = 1e-9
) -> tuple[float, float]:
    """Fiber of the joint cloud hull over w: the interval of first
    coordinates of hull points whose remaining coordinates equal w.

    Solved as two small linear programs over convex combinations of the
    cloud points; w must be interior to the projected hull.
    """
    from scipy.optimize import linprog

    P = joint_cloud.points
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if P.shape[1] != w.shape[0] + 1:
        raise ValueError("w must have one coordinate fewer than the joint cloud")
    proj = convex_hull(P[:, 1:])
    if hull_membership(w, proj, tol=max(tol, 1e-12)) == "exterior":
        raise ValueError("w lies outside the projected rotation hull")
    N = P.shape[0]
    A_eq = np.vstack([P[:, 1:].T, np.ones((1, N))])
    b_eq = np.concatenate([w, [1.0]])
    ends = []
    for sign in (1.0, -1.0):
        res = linprog(
            sign * P[:, 0],
            A_eq=A_eq,
            b_eq=b_eq,
            bounds=[(0.0, 1.0)] * N,
            method="highs",
        )
        if not res.success:
            raise ValueError(f"fiber at {w} is infeasible: {res.message}")
        ends.append(sign * res.fun)
    return (min(ends), max(ends))
