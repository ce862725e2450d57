"""Vector-valued potentials on shift spaces.

Two concrete families are provided.  Locally constant potentials of
finite depth q read only the first q symbols.  The fish potential reads
the initial run of class-equal symbols (classes {0,1} and {2,3} on a
four-letter alphabet) and sends long runs toward an accumulation point
on the boundary of a convex set; it is the engine's running example of
a Lipschitz potential whose rotation set is an infinite polygon with
two ergodic entropy maximizers on the boundary.

Birkhoff data attached to a finite word always uses the cyclic
extension of the word, matching the block decomposition of periodic
orbits: a cyclic class-run of length L contributes

    L * w0                                          if L <= alpha - 1,
    (alpha-1) * w0 + v_i(1) + ... + v_i(L-alpha+1)  if L >= alpha,

and pure-class words sit exactly at the tail value of their class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .shift import (
    PeriodicOrbit,
    TransitionSystem,
    Word,
    WordLengthError,
    enumerate_admissible_words,
)

_TAIL_WINDOW = 64  # window used when bounding suprema over point tails


@dataclass(frozen=True)
class LocallyConstantPotential:
    """Potential determined by the first `depth` symbols of a point.

    `values` maps every admissible word of length `depth` to a vector of
    length `dim` (scalars are dim-1 vectors).
    """

    depth: int
    dim: int
    values: dict[Word, np.ndarray]
    label: str = "locally-constant"

    def __post_init__(self):
        if self.depth < 1 or self.dim < 1:
            raise ValueError("depth and dim must be >= 1")
        fixed = {}
        for word, vec in self.values.items():
            arr = np.asarray(vec, dtype=float).reshape(-1)
            if arr.shape != (self.dim,):
                raise ValueError(f"value for {word} has wrong dimension")
            fixed[tuple(word)] = arr
        object.__setattr__(self, "values", fixed)

    def value(self, word: Sequence[int]) -> np.ndarray:
        if len(word) < self.depth:
            raise WordLengthError(
                f"need {self.depth} symbols to evaluate", required=self.depth
            )
        key = tuple(word[: self.depth])
        try:
            return self.values[key]
        except KeyError:
            raise KeyError(f"word {key} not in the admissible table") from None

    def evaluate(self, word: Sequence[int]) -> tuple[np.ndarray, float]:
        """Value on the cylinder of `word` plus an oscillation bound
        (identically 0 once the word covers the depth)."""
        return self.value(word), 0.0

    def birkhoff_average(self, orbit: PeriodicOrbit | Sequence[int]) -> np.ndarray:
        """Average of the potential along the cyclic extension."""
        word = orbit.generator if isinstance(orbit, PeriodicOrbit) else tuple(orbit)
        p = len(word)
        total = np.zeros(self.dim)
        for j in range(p):
            window = tuple(word[(j + i) % p] for i in range(self.depth))
            total += self.values[window]
        return total / p

    def range_box(self) -> tuple[np.ndarray, np.ndarray]:
        vals = np.array(list(self.values.values()))
        return vals.min(axis=0), vals.max(axis=0)


def indicator(ts: TransitionSystem, word: Sequence[int]) -> LocallyConstantPotential:
    """Scalar indicator of the cylinder [word]."""
    word = tuple(word)
    depth = len(word)
    values = {
        w: np.array([1.0 if w == word else 0.0])
        for w in enumerate_admissible_words(ts, depth)
    }
    return LocallyConstantPotential(depth, 1, values, label=f"1_[{word}]")


def constant(ts: TransitionSystem, c: float | Sequence[float]) -> LocallyConstantPotential:
    vec = np.atleast_1d(np.asarray(c, dtype=float))
    values = {(a,): vec.copy() for a in range(ts.alphabet_size)}
    return LocallyConstantPotential(1, len(vec), values, label=f"const{tuple(vec)}")


def symbol_potential(
    ts: TransitionSystem, of_symbol: dict[int, float | Sequence[float]]
) -> LocallyConstantPotential:
    """Depth-1 potential given by a value per symbol."""
    vecs = {a: np.atleast_1d(np.asarray(v, dtype=float)) for a, v in of_symbol.items()}
    dims = {v.shape for v in vecs.values()}
    if len(dims) != 1:
        raise ValueError("inconsistent value dimensions")
    if set(vecs) != set(range(ts.alphabet_size)):
        raise ValueError("need a value for every symbol")
    dim = next(iter(dims))[0]
    return LocallyConstantPotential(1, dim, {(a,): vecs[a] for a in vecs})


def affine_combination(
    ts: TransitionSystem,
    terms: Iterable[tuple[np.ndarray | float, LocallyConstantPotential]],
) -> LocallyConstantPotential:
    """Scalar potential sum_i coeff_i . pot_i, re-blocked to the largest
    depth among the terms."""
    terms = [(np.atleast_1d(np.asarray(c, dtype=float)), p) for c, p in terms]
    for c, p in terms:
        if c.shape != (p.dim,):
            raise ValueError("coefficient dimension mismatch")
    depth = max(p.depth for _, p in terms)
    values = {}
    for w in enumerate_admissible_words(ts, depth):
        values[w] = np.array(
            [sum(float(c @ p.value(w)) for c, p in terms)]
        )
    return LocallyConstantPotential(depth, 1, values)


@dataclass(frozen=True)
class JointPotential:
    """The pair (scalar, vector) evaluated as a stacked vector in
    R^(1+m); used for slices of joint rotation sets."""

    scalar: "LocallyConstantPotential | FishPotential"
    vector: "LocallyConstantPotential | FishPotential"

    @property
    def dim(self) -> int:
        return 1 + self.vector.dim

    def birkhoff_average(self, orbit) -> np.ndarray:
        s = np.atleast_1d(self.scalar.birkhoff_average(orbit))
        v = np.atleast_1d(self.vector.birkhoff_average(orbit))
        return np.concatenate([s, v])

    def evaluate(self, word) -> tuple[np.ndarray, float]:
        s, es = self.scalar.evaluate(word)
        v, ev = self.vector.evaluate(word)
        return np.concatenate([np.atleast_1d(s), np.atleast_1d(v)]), max(es, ev)


@dataclass(frozen=True)
class BoundaryCurve:
    """Upper-half boundary y = l(x) of the convex body, in coordinates
    with the accumulation point at the origin.  Only the ellipse family
    (x-a)^2/a^2 + y^2/b^2 = 1 is parameterized; it covers every preset
    in this package."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("ellipse semi-axes must be positive")

    def l(self, x: float) -> float:
        if not 0.0 <= x <= 2 * self.a:
            raise ValueError(f"x={x} outside the curve domain [0, {2*self.a}]")
        return (self.b / self.a) * math.sqrt(x * (2 * self.a - x))

    @property
    def diameter(self) -> float:
        return 2.0 * max(self.a, self.b)

    def contains(self, point: Sequence[float], *, strict: bool = True) -> bool:
        x, y = float(point[0]), float(point[1])
        q = (x - self.a) ** 2 / self.a**2 + y**2 / self.b**2
        return q < 1.0 if strict else q <= 1.0 + 1e-12


@dataclass(frozen=True)
class FishGeometry:
    """Run-length geometry: marker abscissas x_k decreasing to 0, arc
    points v_i(k) = (x_k, (-1)^i l(x_k)), an interior base point w0 on
    the symmetry axis, and the accumulation point w_inf at the origin.

    x_1 is stored explicitly; the tail follows x_k = tail_base**(-k).
    `alpha` is the run-length threshold of the induced potential and is
    unrelated to the metric base used elsewhere.
    """

    alpha: int
    curve: BoundaryCurve
    x1: float
    tail_base: float
    w0: tuple[float, float] | None = None

    def __post_init__(self):
        if self.alpha < 3:
            raise ValueError("alpha must be an integer >= 3")
        if not (0 < self.x1 <= 2 * self.curve.a):
            raise ValueError("x1 must lie in the curve domain")
        if self.tail_base <= 1:
            raise ValueError("tail_base must exceed 1")
        if self.x(2) >= self.x1:
            raise ValueError("marker abscissas must decrease")
        if self.w0 is None:
            object.__setattr__(self, "w0", ((self.x1 + self.x(2)) / 2.0, 0.0))

    @classmethod
    def figure1(cls) -> "FishGeometry":
        """The standard instance: ellipse with semi-axes 1 and 2,
        x_1 = 1, x_k = 6**-k afterwards, alpha = 3 (w0 = (37/72, 0))."""
        return cls(alpha=3, curve=BoundaryCurve(1.0, 2.0), x1=1.0, tail_base=6.0)

    @property
    def w_inf(self) -> np.ndarray:
        return np.zeros(2)

    @property
    def w0_vec(self) -> np.ndarray:
        return np.asarray(self.w0, dtype=float)

    @property
    def gamma(self) -> float:
        """Diameter of the convex body."""
        return self.curve.diameter

    def x(self, k: int) -> float:
        if k < 1:
            raise ValueError("k must be >= 1")
        return self.x1 if k == 1 else self.tail_base ** (-k)

    def v(self, i: int, k: int) -> np.ndarray:
        """Arc point for class i in {1, 2}; class 1 sits on the lower
        arc, class 2 on the upper."""
        if i not in (1, 2):
            raise ValueError("class index must be 1 or 2")
        xk = self.x(k)
        return np.array([xk, (-1.0) ** i * self.curve.l(xk)])

    def v_norm(self, k: int) -> float:
        """|v_i(k) - w_inf| (class independent by symmetry)."""
        xk = self.x(k)
        return math.hypot(xk, self.curve.l(xk))

    def tail_radius(self, j: int) -> float:
        """sup over k >= j of |v_i(k) - w_inf|.

        The norms decrease once x_k does, so the window maximum is the
        supremum; a defensive tail term covers the truncation.
        """
        window = max(self.v_norm(k) for k in range(j, j + _TAIL_WINDOW))
        return window + 2.0 ** (-(j + _TAIL_WINDOW))

    def boundary_point_near_origin(self, i: int, distance: float) -> np.ndarray:
        """Point on the class-i arc at the given distance from w_inf,
        found by bisection along the abscissa."""
        if not 0 < distance < self.gamma:
            raise ValueError("distance must lie in (0, diameter)")
        lo, hi = 0.0, 2 * self.curve.a

        def norm_at(x: float) -> float:
            return math.hypot(x, self.curve.l(x))

        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if norm_at(mid) < distance:
                lo = mid
            else:
                hi = mid
        x = 0.5 * (lo + hi)
        return np.array([x, (-1.0) ** i * self.curve.l(x)])

    def validate(self) -> list[str]:
        """Check the construction's hypotheses; violations are returned
        as warnings since reference instances break some of them at
        small k while all asymptotic conclusions survive."""
        warnings = []
        lx1, lx2 = self.curve.l(self.x(1)), self.curve.l(self.x(2))
        if not lx1 > (self.alpha + 1) * lx2:
            warnings.append(
                f"l(x1)={lx1:.6g} does not exceed (alpha+1) l(x2)={(self.alpha+1)*lx2:.6g}"
            )
        for k in range(2, 40):
            if not self.x(k) <= 2.0 ** (-k):
                warnings.append(f"x_{k} exceeds 2^-{k}")
            if not self.v_norm(k) < 2.0 ** (-k):
                warnings.append(f"|v({k})| = {self.v_norm(k):.6g} >= 2^-{k}")
        for k in range(1, 60):
            if not self.v_norm(k + 1) < self.v_norm(k):
                warnings.append(f"|v({k+1})| not below |v({k})|")
        return warnings


def symbol_class(symbol: int) -> int:
    """Class of a symbol on the 4-letter alphabet: {0,1} -> 1, {2,3} -> 2."""
    if symbol in (0, 1):
        return 1
    if symbol in (2, 3):
        return 2
    raise ValueError(f"symbol {symbol} outside the 4-letter alphabet")


@dataclass(frozen=True)
class FishPotential:
    """Run-length potential on the full 4-shift.

    With L the length of the initial class-constant run of a point, the
    value is w0 when L < alpha, v_i(L - alpha + 1) when L is finite and
    >= alpha, and the class tail value for pure-class points (w_inf, or
    a boundary point w_eps for the perturbed variant, which re-fits the
    far class-2 arc points toward w_eps).

    `truncation_depth` is the evaluation horizon: a word whose run
    covers all its symbols must be at least this long, and is then
    assigned the tail value together with an oscillation bound.
    """

    geometry: FishGeometry
    truncation_depth: int = 20
    class2_tail: tuple[float, float] | None = None
    refit_start: int | None = None
    label: str = "fish"

    def __post_init__(self):
        if self.truncation_depth < self.geometry.alpha:
            raise ValueError("truncation depth must be >= alpha")
        if (self.class2_tail is None) != (self.refit_start is None):
            raise ValueError("perturbation needs both tail point and refit start")

    @classmethod
    def figure1(cls, truncation_depth: int = 20) -> "FishPotential":
        return cls(FishGeometry.figure1(), truncation_depth, label="fish-figure1")

    @property
    def dim(self) -> int:
        return 2

    @property
    def alpha(self) -> int:
        return self.geometry.alpha

    @property
    def perturbed(self) -> bool:
        return self.class2_tail is not None

    def tail_value(self, i: int) -> np.ndarray:
        if i == 2 and self.class2_tail is not None:
            return np.asarray(self.class2_tail, dtype=float)
        return self.geometry.w_inf

    def v(self, i: int, k: int) -> np.ndarray:
        base = self.geometry.v(i, k)
        if i == 2 and self.refit_start is not None and k >= self.refit_start:
            # Re-fitted arc point: pulled to the perturbed tail, scaled
            # so its distance stays strictly under 2^-k.
            center = np.asarray(self.class2_tail, dtype=float)
            offset = base - self.geometry.w_inf
            norm = float(np.linalg.norm(offset))
            if norm == 0.0:
                return center.copy()
            scale = min(1.0, (1.0 - 1e-9) * 2.0 ** (-k) / norm)
            return center + scale * offset
        return base

    def run_value(self, i: int, run_length: int | None) -> np.ndarray:
        """Potential value for a point whose initial class-i run has the
        given length (None = infinite)."""
        if run_length is None:
            return self.tail_value(i)
        if run_length < self.alpha:
            return self.geometry.w0_vec
        return self.v(i, run_length - self.alpha + 1)

    def tail_radius(self, i: int, j: int) -> float:
        """sup over k >= j of |v_i(k) - tail_i|."""
        if i == 2 and self.perturbed:
            center = np.asarray(self.class2_tail, dtype=float)
            window = max(
                float(np.linalg.norm(self.v(2, k) - center))
                for k in range(j, j + _TAIL_WINDOW)
            )
            return window + 2.0 ** (-(j + _TAIL_WINDOW))
        return self.geometry.tail_radius(j)

    def evaluate(self, word: Sequence[int]) -> tuple[np.ndarray, float]:
        """Value on the cylinder of `word` plus an oscillation bound:
        0 when the initial run terminates inside the word, otherwise the
        radius of the unresolved arc tail."""
        if len(word) == 0:
            raise WordLengthError("empty word", required=self.truncation_depth)
        c = symbol_class(word[0])
        run = 1
        while run < len(word) and symbol_class(word[run]) == c:
            run += 1
        if run < len(word):
            return self.run_value(c, run), 0.0
        if len(word) < self.truncation_depth:
            raise WordLengthError(
                f"pure prefix of length {len(word)} cannot resolve the value; "
                f"need {self.truncation_depth} symbols",
                required=self.truncation_depth,
            )
        return self.tail_value(c), self.tail_radius(c, len(word) - self.alpha + 1)

    def cyclic_runs(self, word: Sequence[int]) -> list[tuple[int, int]] | None:
        """Maximal cyclic class-runs of a word as (class, length) pairs,
        or None when the word is pure."""
        classes = [symbol_class(s) for s in word]
        if all(c == classes[0] for c in classes):
            return None
        # rotate so a run starts at index 0
        n = len(classes)
        start = next(
            j for j in range(n) if classes[j] != classes[j - 1]
        )
        rolled = classes[start:] + classes[:start]
        runs = []
        j = 0
        while j < n:
            c = rolled[j]
            length = 1
            while j + length < n and rolled[j + length] == c:
                length += 1
            runs.append((c, length))
            j += length
        return runs

    def birkhoff_average(self, orbit: PeriodicOrbit | Sequence[int]) -> np.ndarray:
        """Exact rotation vector of the periodic point generated by the
        word, via the cyclic block decomposition."""
        word = orbit.generator if isinstance(orbit, PeriodicOrbit) else tuple(orbit)
        runs = self.cyclic_runs(word)
        if runs is None:
            return self.tail_value(symbol_class(word[0])).copy()
        total = np.zeros(2)
        for c, length in runs:
            total += fish_block_contribution(self, c, length)
        return total / len(word)


def fish_block_contribution(
    fish: FishPotential | FishGeometry, class_index: int, block_length: int
) -> np.ndarray:
    """Total contribution of one maximal cyclic block to the summed
    potential: L*w0 for short blocks, else (alpha-1)*w0 plus the first
    L-alpha+1 arc points of the block's class."""
    if block_length < 1:
        raise ValueError("block length must be >= 1")
    if isinstance(fish, FishGeometry):
        geometry, v = fish, fish.v
    else:
        geometry, v = fish.geometry, fish.v
    alpha = geometry.alpha
    if block_length <= alpha - 1:
        return block_length * geometry.w0_vec
    total = (alpha - 1) * geometry.w0_vec
    for j in range(1, block_length - alpha + 2):
        total = total + v(class_index, j)
    return total


def fish_lipschitz_constant(fish: FishPotential) -> float:
    """The contract constant max(gamma * 2**alpha, 4) for the metric of
    base 1/2 (gamma = diameter of the convex body).

    This value is a true Lipschitz constant whenever the geometry keeps
    |v_i(k) - w_inf| < 2^-k for every k >= 1; reference instances break
    that premise at small k, where `fish_lipschitz_valid_bound` gives
    the constant certified from the actual arc spreads.
    """
    return max(fish.geometry.gamma * 2.0**fish.alpha, 4.0)


def fish_lipschitz_valid_bound(fish: FishPotential) -> float:
    """A distortion bound certified for the concrete geometry.

    Pairs disagreeing within the first alpha symbols or across classes
    move at most the body diameter at distance >= 2^-alpha.  A pair of
    points on the same arc, the shorter run of length j + alpha - 1,
    disagrees no later than position j + alpha while the values spread
    at most over {v(k) : k >= j} plus the class tails, so each arc index
    contributes 2^(j+alpha) times that spread.
    """
    geom = fish.geometry
    alpha = fish.alpha
    best = max(geom.gamma * 2.0**alpha, 4.0)
    tails = [fish.tail_value(1), fish.tail_value(2)]
    for j in range(1, _TAIL_WINDOW):
        vj = geom.v(1, j)
        spread = max(
            max(float(np.linalg.norm(vj - geom.v(1, k))) for k in range(j + 1, j + _TAIL_WINDOW)),
            max(float(np.linalg.norm(vj - t)) for t in tails),
        )
        best = max(best, 2.0 ** (j + alpha) * (spread + 2.0 ** (-(j + _TAIL_WINDOW))))
    return best


def perturb_fish(
    fish: FishPotential, epsilon: float, w_eps: Sequence[float] | None = None
) -> FishPotential:
    """Move the class-2 tail limit to a boundary point w_eps within
    distance epsilon of w_inf, re-fitting the far class-2 arc points.

    Arc points with index below the re-fit window are untouched, so no
    word showing both classes within the truncation depth changes
    value; the sup distance to the original potential stays below
    epsilon.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if fish.perturbed:
        raise ValueError("potential is already perturbed")
    geom = fish.geometry
    if w_eps is None:
        w_eps = geom.boundary_point_near_origin(2, epsilon / 2.0)
    w_eps = np.asarray(w_eps, dtype=float)
    delta = float(np.linalg.norm(w_eps - geom.w_inf))
    if delta == 0.0:
        return replace(fish, label=fish.label)  # degenerate: identical potential
    if delta >= epsilon:
        raise ValueError(f"|w_eps - w_inf| = {delta:.6g} must be < epsilon = {epsilon:.6g}")
    x = float(w_eps[0])
    if not (0.0 <= x <= 2 * geom.curve.a) or abs(
        geom.curve.l(x) - abs(float(w_eps[1]))
    ) > 1e-6 * max(1.0, geom.curve.b):
        raise ValueError("w_eps must lie on the boundary curve")
    start = max(fish.truncation_depth - geom.alpha + 1, 2)
    while delta + fish.tail_radius(2, start) + 2.0 ** (-start) >= epsilon:
        start += 1
        if start > 500:
            raise ValueError("cannot fit the perturbation inside epsilon")
    return replace(
        fish,
        class2_tail=(float(w_eps[0]), float(w_eps[1])),
        refit_start=start,
        label=fish.label + "-perturbed",
    )


def truncate_to_locally_constant(
    fish: FishPotential, K: int
) -> tuple[LocallyConstantPotential, float]:
    """Depth-K table of the fish potential over the full 4-shift, with
    pure-class words assigned their tail value.

    The returned bound dominates the sup distance to the run-length
    potential and decays geometrically in K.
    """
    if K < fish.alpha:
        raise ValueError("K must be >= alpha")
    if K > 12:
        raise ValueError("table would need 4**K entries; keep K <= 12")
    values = {}
    for word in _product_words(4, K):
        values[word] = _tail_convention_value(fish, word)
    bound = max(fish.tail_radius(i, K - fish.alpha + 1) for i in (1, 2))
    return (
        LocallyConstantPotential(K, 2, values, label=f"{fish.label}-depth{K}"),
        bound,
    )


def fish_class_potential(fish: FishPotential, K: int) -> LocallyConstantPotential:
    """Depth-K table of the fish potential pushed to the two-letter
    class alphabet (symbol 0 = class 1, symbol 1 = class 2).

    The fish value only depends on the class word, and each class step
    hides exactly two symbol choices, so pressures on the 4-shift equal
    class-shift pressures plus log 2 while rotation data is unchanged.
    """
    if K < fish.alpha:
        raise ValueError("K must be >= alpha")
    values = {}
    for cw in _product_words(2, K):
        word = tuple(0 if c == 0 else 2 for c in cw)
        values[cw] = _tail_convention_value(fish, word)
    return LocallyConstantPotential(K, 2, values, label=f"{fish.label}-classes{K}")


def _tail_convention_value(fish: FishPotential, word: Word) -> np.ndarray:
    c = symbol_class(word[0])
    run = 1
    while run < len(word) and symbol_class(word[run]) == c:
        run += 1
    if run < len(word):
        return fish.run_value(c, run)
    return fish.tail_value(c)


def _product_words(d: int, length: int):
    word = [0] * length
    while True:
        yield tuple(word)
        j = length - 1
        while j >= 0 and word[j] == d - 1:
            word[j] = 0
            j -= 1
        if j < 0:
            return
        word[j] += 1
