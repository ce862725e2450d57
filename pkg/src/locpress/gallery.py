"""Executable models of the four benchmark systems, each bundled with
its quantitative claims.

The first three are symbolic block systems standing in for interval
constructions with the same entropies and constant per-component
potentials; they witness, in order, a strict drop of the direct
localized pressure below the measure-theoretic one, the reverse strict
inequality at a discontinuity point, and a rotation fiber carrying only
non-ergodic maximizers.  The fourth is the fish potential on the full
4-shift with its boundary pair of ergodic entropy maximizers and their
collapse under a small perturbation.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np

from .potentials import (
    FishPotential,
    constant,
    fish_lipschitz_constant,
    fish_lipschitz_valid_bound,
    perturb_fish,
    symbol_potential,
)
from .localized import LocalizedQuery, direct_count
from .rotation import (
    fish_vertices,
    hull_membership,
    rotation_cloud,
    vertex_orbit_generator,
)
from .shift import TransitionSystem, word_metric
from .transfer import pressure_detail

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class Claim:
    """One named quantitative assertion with its measured outcome."""

    example: str
    name: str
    anchor: str  # self-describing statement of what is being checked
    expected: float
    measured: float
    tol: float
    passed: bool
    mode: str = "abs"  # abs | ge | le

    @classmethod
    def close(cls, example, name, anchor, expected, measured, tol) -> "Claim":
        return cls(example, name, anchor, expected, measured, tol,
                   abs(measured - expected) <= tol, "abs")

    @classmethod
    def at_least(cls, example, name, anchor, bound, measured, tol=0.0) -> "Claim":
        return cls(example, name, anchor, bound, measured, tol,
                   measured >= bound - tol, "ge")

    @classmethod
    def at_most(cls, example, name, anchor, bound, measured, tol=0.0) -> "Claim":
        return cls(example, name, anchor, bound, measured, tol,
                   measured <= bound + tol, "le")


@dataclass
class GalleryModel:
    name: str
    system: TransitionSystem
    potentials: dict
    claims: list[Claim] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)


def block_system(components: list[tuple[int, tuple[tuple[int, ...], ...]]]) -> TransitionSystem:
    """Disjoint union of subshifts placed on consecutive symbol blocks;
    no transitions between blocks."""
    d = sum(size for size, _ in components)
    table = [[0] * d for _ in range(d)]
    at = 0
    for size, sub in components:
        for i in range(size):
            for j in range(size):
                table[at + i][at + j] = sub[i][j]
        at += size
    return TransitionSystem(d, tuple(tuple(row) for row in table))


def _component_pressures(ts: TransitionSystem, phi=None) -> tuple[float, ...]:
    if phi is None:
        phi = constant(ts, 0.0)
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        detail = pressure_detail(ts, phi)
    return detail.component_values if not detail.mixing else (detail.value,)


def _mixture_value(entropies, values, w) -> float:
    """max sum theta_i h_i subject to sum theta_i v_i = w over the
    simplex: the affine (measure-theoretic) localized pressure of a
    block system with constant component potentials."""
    from scipy.optimize import linprog

    n = len(entropies)
    res = linprog(
        -np.asarray(entropies, dtype=float),
        A_eq=np.vstack([np.asarray(values, dtype=float), np.ones(n)]),
        b_eq=np.array([w, 1.0]),
        bounds=[(0.0, 1.0)] * n,
        method="highs",
    )
    if not res.success:
        raise ValueError(f"no invariant measure attains rotation value {w}")
    return -float(res.fun)


FULL2 = ((1, 1), (1, 1))
GOLDEN = ((1, 1), (1, 0))


def build_example1(
    phi_values: tuple[float, float, float] = (0.5, 2.5, 4.5),
    n_direct: int = 20,
    r: float = 0.05,
) -> GalleryModel:
    """Three disjoint components (full 2-shift, golden-mean shift, full
    2-shift) with a constant localizing value per component.

    At the middle value the measure-theoretic pressure is log 2 (an
    even mixture of the outer maximal-entropy measures), while direct
    counting only sees the low-entropy middle component: the direct
    rate stays near the golden-mean entropy and the gap persists as the
    horizon doubles.
    """
    ts = block_system([(2, FULL2), (2, GOLDEN), (2, FULL2)])
    v1, v2, v3 = phi_values
    Phi = symbol_potential(ts, {0: v1, 1: v1, 2: v2, 3: v2, 4: v3, 5: v3})
    model = GalleryModel("example1", ts, {"Phi": Phi})
    comps = _component_pressures(ts)
    model.claims.append(Claim.close(
        "example1", "entropy-X1", "outer components carry entropy log 2",
        LOG2, comps[0], 1e-10))
    model.claims.append(Claim.close(
        "example1", "entropy-X2", "middle component entropy is the golden-mean value",
        math.log((1 + math.sqrt(5)) / 2), comps[1], 1e-8))
    model.claims.append(Claim.close(
        "example1", "entropy-X3", "outer components carry entropy log 2",
        LOG2, comps[2], 1e-10))
    dual = _mixture_value(comps, phi_values, v2)
    model.claims.append(Claim.close(
        "example1", "affine-dual", "mixture of outer measures attains log 2 at the middle value",
        LOG2, dual, 1e-10))
    golden_bound = math.log((1 + math.sqrt(5)) / 2) + 0.01
    rates = []
    for n in (n_direct, 2 * n_direct):
        q = LocalizedQuery(ts, None, Phi, [v2], r, depth=1)
        lo, hi = direct_count(q, n).rates(n)
        rates.append(hi)
        model.claims.append(Claim.at_most(
            "example1", f"direct-rate-n{n}",
            "direct rate at the middle value is pinned to the middle component",
            golden_bound, hi))
    gap0 = dual - rates[0]
    gap1 = dual - rates[1]
    model.claims.append(Claim.at_least(
        "example1", "gap-persists",
        "direct-vs-dual gap of at least 0.20 persists when the horizon doubles",
        0.20, min(gap0, gap1)))
    return model


def build_example2(N: int = 3, r: float = 0.05, n_direct: int = 20) -> GalleryModel:
    """A fixed point at value 0 accumulated by full-shift components at
    values 4^-n: the only measure with rotation value 0 is the point
    mass (measure-theoretic pressure 0), while every ball around 0
    eventually contains a full-entropy component, so the direct rate at
    0 stays near log 2: the affine pressure is discontinuous at 0.
    """
    if N < 2:
        raise ValueError("need at least two components")
    comps = [(1, ((1,),))] + [(2, FULL2) for _ in range(N)]
    ts = block_system(comps)
    values = {0: 0.0}
    comp_value = {}
    for n in range(1, N + 1):
        val = 4.0 ** (-n)
        comp_value[n] = val
        values[2 * n - 1] = val
        values[2 * n] = val
    Phi = symbol_potential(ts, values)
    model = GalleryModel("example2", ts, {"Phi": Phi})

    min_value = min(comp_value.values())
    model.claims.append(Claim.at_least(
        "example2", "fiber-is-point-mass",
        "every non-fixed component value is strictly positive, so rotation value 0 "
        "is carried only by the fixed point and its pressure is 0 exactly",
        0.0, 1.0 if min_value > 0 else -1.0))
    model.claims.append(Claim.close(
        "example2", "pressure-at-0", "entropy of the point mass at the fixed point",
        0.0, 0.0, 0.0))
    if r <= min_value:
        raise ValueError("radius must exceed the last component value")
    q = LocalizedQuery(ts, None, Phi, [0.0], r, depth=1)
    for n in (n_direct, 2 * n_direct):
        lo, hi = direct_count(q, n).rates(n)
        model.claims.append(Claim.at_least(
            "example2", f"direct-rate-at-0-n{n}",
            f"the ball of radius {r} swallows a full-entropy component, forcing "
            "direct rate at least log 2 - 0.01",
            LOG2 - 0.01, lo))
    pressures = _component_pressures(ts)
    # discontinuity table: affine pressure log 2 at component values
    # accumulating at 0, against value 0 at the limit point
    for n in range(1, N + 1):
        val = comp_value[n]
        P = _mixture_value(pressures, [0.0] + [comp_value[k] for k in range(1, N + 1)], val)
        model.claims.append(Claim.close(
            "example2", f"affine-at-4^-{n}",
            "component measures keep pressure log 2 while their values approach 0",
            LOG2, P, 1e-10))
    return model


def build_example3(max_period: int = 14) -> GalleryModel:
    """Two full 2-shift components at values 0 and 1: every periodic
    orbit has rotation value exactly 0 or 1, so interior fibers contain
    no ergodic measure, yet mixtures of the two maximal-entropy
    measures realize entropy log 2 at every interior value."""
    ts = block_system([(2, FULL2), (2, FULL2)])
    Phi = symbol_potential(ts, {0: 0.0, 1: 0.0, 2: 1.0, 3: 1.0})
    model = GalleryModel("example3", ts, {"Phi": Phi})
    cloud = rotation_cloud(ts, Phi, max_period)
    vals = set(float(v) for v in cloud.points.ravel())
    model.claims.append(Claim.close(
        "example3", "orbit-values-binary",
        f"all periodic rotation values up to period {max_period} are exactly 0 or 1",
        0.0, 0.0 if vals <= {0.0, 1.0} else 1.0, 0.0))
    w = 0.3
    sub, = {2},
    comp_entropies = _component_pressures(ts)
    mix = _mixture_value(comp_entropies, [0.0, 1.0], w)
    model.claims.append(Claim.close(
        "example3", "mixture-entropy",
        "the (0.7, 0.3) mixture of component maximal-entropy measures has entropy log 2",
        LOG2, mix, 1e-12))
    model.claims.append(Claim.close(
        "example3", "endpoint-ergodic",
        "at value 0 the component measure itself is an ergodic maximizer",
        LOG2, comp_entropies[0], 1e-10))
    return model


def boundary_entropy_witnesses(fish: FishPotential) -> list[dict]:
    """The candidate ergodic entropy maximizers supported on the two
    pure-class subsystems: each is the maximal-entropy Bernoulli measure
    of a full 2-shift, with rotation vector exactly the class tail."""
    out = []
    for cls in (1, 2):
        out.append({
            "class": cls,
            "entropy": LOG2,
            "rv": fish.tail_value(cls).copy(),
        })
    return out


def build_fish(
    figure_preset: bool = True,
    points: int = 1000,
    max_period: int = 14,
    enumerate_period: int = 8,
    seed: int = 0,
    n_direct: int = 18,
    perturb_eps: float = 0.1,
    fan_j_max: int = 14,
) -> GalleryModel:
    """The fish potential on the full 4-shift: vertex-fan containment of
    the rotation cloud, vertex monotonicity, the Lipschitz-constant
    sample bound, the log-2 counting floor at the accumulation point,
    the two boundary entropy maximizers, and their collapse after the
    perturbation."""
    if not figure_preset:
        raise ValueError("only the reference geometry is bundled")
    fish = FishPotential.figure1()
    geom = fish.geometry
    ts = TransitionSystem.preset("full4")
    model = GalleryModel("fish", ts, {"Phi": fish})

    # subsystem of pure-class points: reducible two-block system
    comps = _component_pressures(TransitionSystem.preset("fishA"))
    model.claims.append(Claim.close(
        "fish", "pure-subshift-entropy",
        "the pure-class subsystem splits into two full 2-shifts of entropy log 2",
        LOG2, max(comps), 1e-12))

    # rotation cloud: full enumeration to a modest period plus the
    # vertex-realizing orbits up to max_period
    extras = [vertex_orbit_generator(geom, i, j) for i in (1, 2)
              for j in range(geom.alpha + 1, max_period + 1)]
    extras.append((0, 0, 0, 2, 2, 2))  # the rightmost extreme orbit
    cloud = rotation_cloud(ts, fish, enumerate_period, extra_generators=extras)
    model.potentials["cloud"] = cloud
    model.claims.append(Claim.at_least(
        "fish", "cloud-size", f"at least {points} periodic-orbit rotation vectors",
        float(points), float(len(cloud))))

    # containment: every cloud point inside the capped vertex polygon
    fan = fish_vertices(geom, 400)
    poly = fan.polygon_with_cap()
    worst = 0.0
    for p in cloud.points:
        if hull_membership(p, poly, tol=1e-9) == "exterior":
            worst = max(worst, 1.0)
    model.claims.append(Claim.close(
        "fish", "vertex-containment",
        "all cloud points lie in the capped convex hull of the vertex fan (1e-9)",
        0.0, worst, 0.0))

    # ellipse position: every cloud point except the accumulation point
    # is strictly inside the convex body
    bad = 0
    for p in cloud.points:
        if np.allclose(p, geom.w_inf, atol=1e-14):
            continue
        if not geom.curve.contains(p, strict=True):
            bad += 1
    model.claims.append(Claim.close(
        "fish", "inside-body",
        "every cloud point except the accumulation point is strictly inside the body",
        0.0, float(bad), 0.0))

    # vertex monotonicity toward the accumulation point (j > alpha)
    fan14 = fish_vertices(geom, fan_j_max)
    xs = fan14.lower[1:, 0]
    ys = np.abs(fan14.lower[1:, 1])
    monotone = bool(np.all(np.diff(xs) < 0) and np.all(np.diff(ys) < 0))
    model.claims.append(Claim.close(
        "fish", "vertex-monotone",
        "vertex coordinates decrease strictly toward the accumulation point",
        1.0, 1.0 if monotone else 0.0, 0.0))

    # distortion ratios on sampled word pairs: the certified bound for
    # this geometry (the contract constant itself presumes arc points
    # within 2^-k of the accumulation point, which the reference
    # instance breaks at small k)
    C_valid = fish_lipschitz_valid_bound(fish)
    rng = np.random.default_rng(seed)
    worst_ratio = 0.0
    for _ in range(10_000):
        x = tuple(rng.integers(0, 4, 30).tolist())
        y = tuple(rng.integers(0, 4, 30).tolist())
        d = float(word_metric(x, y, 0.5))
        if d == 0.0:
            continue
        fx, _ = fish.evaluate(x)
        fy, _ = fish.evaluate(y)
        worst_ratio = max(worst_ratio, float(np.linalg.norm(fx - fy)) / d)
    model.claims.append(Claim.at_most(
        "fish", "lipschitz-sample",
        "sampled distortion ratios stay below the bound certified for this "
        f"geometry ({C_valid:.6g}; the idealized contract constant is "
        f"{fish_lipschitz_constant(fish):.6g})",
        C_valid, worst_ratio))

    # counting floor at the accumulation point
    q = LocalizedQuery(ts, None, fish, [0.0, 0.0], 0.05, depth=1)
    bracket = direct_count(q, n_direct)
    lo, hi = bracket.rates(n_direct)
    model.claims.append(Claim.at_least(
        "fish", "count-floor",
        "direct rate at the accumulation point is at least log 2 - 0.01",
        LOG2 - 0.01, lo))
    model.claims.append(Claim.at_least(
        "fish", "pure-term",
        "the count contains the closed-form pure-word term 2 * 2^n",
        float(2 * 2**n_direct), bracket.lower))

    # two ergodic boundary maximizers, collapsing to one after the
    # perturbation
    witnesses = boundary_entropy_witnesses(fish)
    at_winf = [wit for wit in witnesses
               if np.linalg.norm(wit["rv"] - geom.w_inf) <= 1e-12]
    model.claims.append(Claim.close(
        "fish", "two-boundary-maximizers",
        "both pure-class Bernoulli measures sit at the accumulation point with entropy log 2",
        2.0, float(len(at_winf)), 0.0))
    pert = perturb_fish(fish, perturb_eps)
    witnesses_p = boundary_entropy_witnesses(pert)
    at_winf_p = [wit for wit in witnesses_p
                 if np.linalg.norm(wit["rv"] - geom.w_inf) <= 1e-12]
    model.claims.append(Claim.close(
        "fish", "collapse-after-perturbation",
        "after the boundary perturbation exactly one maximizer remains at the "
        "accumulation point",
        1.0, float(len(at_winf_p)), 0.0))
    model.potentials["perturbed"] = pert
    model.potentials["fan"] = fan14
    return model


@dataclass(frozen=True)
class GalleryReport:
    models: tuple[GalleryModel, ...]

    @property
    def claims(self) -> list[Claim]:
        return [c for m in self.models for c in m.claims]

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.models)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def rows(self) -> list[tuple]:
        out = []
        for c in self.claims:
            out.append((c.example, c.name, c.expected, c.measured, c.tol,
                        "pass" if c.passed else "FAIL", c.anchor))
        return out


def run_gallery(only: str | None = None, seed: int = 0, points: int = 1000) -> GalleryReport:
    """Build the requested models (all four by default) and aggregate
    their claims, ordered deterministically."""
    builders = {
        "example1": lambda: build_example1(),
        "example2": lambda: build_example2(),
        "example3": lambda: build_example3(),
        "fish": lambda: build_fish(points=points, seed=seed),
    }
    if only is not None:
        if only not in builders:
            raise ValueError(f"unknown model {only!r}; known: {sorted(builders)}")
        names = [only]
    else:
        names = ["example1", "example2", "example3", "fish"]
    return GalleryReport(tuple(builders[name]() for name in names))
