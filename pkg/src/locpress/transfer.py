"""Classical thermodynamic data for locally constant potentials on
mixing subshifts of finite type.

A depth-q potential is re-blocked onto the edge shift whose states are
admissible words of length max(q-1, 1); the matrix with entries
exp(value) on allowed transitions has a simple positive dominant
eigenvalue, whose logarithm is the topological pressure.  The dominant
left/right eigendata produce the unique equilibrium Markov measure, and
derivatives of the pressure in potential directions are rotation
vectors (first order) and covariance forms (second order).
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass

import numpy as np

from .potentials import LocallyConstantPotential, affine_combination
from .shift import TransitionSystem, Word, enumerate_admissible_words, is_mixing

PERRON_TOL = 1e-13
PERRON_MAX_ITER = 200_000


class NonMixingError(ValueError):
    """The operation needs a topologically mixing system."""


class PerronConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightedMatrix:
    """Transfer matrix of a re-blocked potential: states are admissible
    words of length block_length; entry (a, b) is exp(potential on the
    spliced word) when b extends a by one symbol, else 0.

    Entries are computed with the maximal value subtracted (recorded in
    log_shift) so extreme potentials cannot overflow; the dominant
    eigenvalue of the unshifted matrix is exp(log_shift) times that of
    `matrix`."""

    states: tuple[Word, ...]
    block_length: int
    matrix: np.ndarray
    edge_words: dict[tuple[int, int], Word]
    log_shift: float = 0.0


@dataclass(frozen=True)
class PerronData:
    eigenvalue: float
    right_vector: np.ndarray
    left_vector: np.ndarray
    residual: float
    iterations: int


@dataclass(frozen=True)
class MarkovEquilibrium:
    """Stationary Markov measure on the re-blocked state space together
    with its entropy and the pressure it realizes."""

    states: tuple[Word, ...]
    block_length: int
    stationary: np.ndarray
    kernel: np.ndarray
    entropy: float
    pressure: float
    edge_words: dict[tuple[int, int], Word]

    def integrate(self, pot: LocallyConstantPotential) -> np.ndarray:
        """Integral of a locally constant potential whose depth fits
        inside the edge words (length block_length + 1)."""
        if pot.depth > self.block_length + 1:
            raise ValueError(
                f"potential depth {pot.depth} exceeds edge length "
                f"{self.block_length + 1}; rebuild the equilibrium deeper"
            )
        total = np.zeros(pot.dim)
        for (i, j), word in self.edge_words.items():
            weight = self.stationary[i] * self.kernel[i, j]
            if weight > 0.0:
                total += weight * pot.value(word)
        return total


@dataclass(frozen=True)
class PressureResult:
    value: float
    mixing: bool
    component_values: tuple[float, ...]


def build_weighted_matrix(
    ts: TransitionSystem, phi: LocallyConstantPotential, block_length: int | None = None
) -> WeightedMatrix:
    if phi.dim != 1:
        raise ValueError("transfer matrices take scalar potentials")
    ell = max(phi.depth - 1, 1)
    if block_length is not None:
        ell = max(ell, block_length)
    states = tuple(enumerate_admissible_words(ts, ell))
    index = {w: i for i, w in enumerate(states)}
    n = len(states)
    M = np.zeros((n, n))
    edge_words: dict[tuple[int, int], Word] = {}
    pending: list[tuple[int, int, float]] = []
    for i, u in enumerate(states):
        for b in ts.successors(u[-1]):
            v = u[1:] + (b,)
            j = index.get(v)
            if j is None:
                continue
            word = u + (b,)
            edge_words[(i, j)] = word
            pending.append((i, j, float(phi.value(word)[0])))
    shift = max(val for _, _, val in pending)
    for i, j, val in pending:
        M[i, j] = math.exp(val - shift)
    return WeightedMatrix(states, ell, M, edge_words, shift)


def perron(
    M: np.ndarray,
    tol: float = PERRON_TOL,
    max_iter: int = PERRON_MAX_ITER,
    v0: np.ndarray | None = None,
    l0: np.ndarray | None = None,
) -> PerronData:
    """Dominant eigendata of a nonnegative primitive matrix by power
    iteration with a residual-based stopping rule.

    Deterministic: fixed all-ones start (unless warm-started), no
    randomization.  The left and right vectors are normalized so that
    left . right = 1.
    """
    n = M.shape[0]
    if n == 1:
        lam = float(M[0, 0])
        return PerronData(lam, np.ones(1), np.ones(1), 0.0, 0)

    def iterate(A: np.ndarray, start: np.ndarray | None) -> tuple[np.ndarray, float, int]:
        v = np.full(n, 1.0 / n) if start is None else start / start.sum()
        lam = 0.0
        for it in range(1, max_iter + 1):
            w = A @ v
            s = w.sum()
            if s <= 0.0:
                raise PerronConvergenceError("matrix is not irreducible")
            lam = float(v @ w / (v @ v))
            w = w / s
            resid = float(np.max(np.abs(A @ w - lam * w)))
            v = w
            if resid <= tol * max(1.0, abs(lam)):
                return v, lam, it
        raise PerronConvergenceError(
            f"power iteration failed to reach residual {tol} in {max_iter} steps"
        )

    r, lam, it_r = iterate(M, v0)
    l, lam_l, it_l = iterate(M.T, l0)
    lam = 0.5 * (lam + lam_l)
    l = l / float(l @ r)
    resid = float(np.max(np.abs(M @ r - lam * r)))
    return PerronData(lam, r, l, resid, it_r + it_l)


def _graph_period(adj: list[list[int]]) -> int:
    """Period of a strongly connected directed graph (gcd of closed
    walk lengths), via BFS levels."""
    n = len(adj)
    level = [-1] * n
    level[0] = 0
    queue = [0]
    g = 0
    while queue:
        u = queue.pop()
        for v in adj[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g) if g else 1


def _strongly_connected_components(ts: TransitionSystem) -> list[list[int]]:
    """Tarjan's algorithm, iterative."""
    d = ts.alphabet_size
    index = [-1] * d
    low = [0] * d
    on_stack = [False] * d
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(d):
        if index[root] >= 0:
            continue
        work = [(root, iter(ts.successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            u, it = work[-1]
            advanced = False
            for v in it:
                if index[v] < 0:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack[v] = True
                    work.append((v, iter(ts.successors(v))))
                    advanced = True
                    break
                elif on_stack[v]:
                    low[u] = min(low[u], index[v])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[u])
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == u:
                        break
                comps.append(sorted(comp))
    return comps


def restrict_system(
    ts: TransitionSystem, symbols: list[int]
) -> tuple[TransitionSystem, dict[int, int]]:
    """Subsystem on a symbol subset (must be closed enough to keep
    every row/column nonzero)."""
    relabel = {s: i for i, s in enumerate(symbols)}
    d = len(symbols)
    table = tuple(
        tuple(ts.table[a][b] for b in symbols) for a in symbols
    )
    return TransitionSystem(d, table), relabel


def restrict_potential(
    phi: LocallyConstantPotential, sub: TransitionSystem, relabel: dict[int, int]
) -> LocallyConstantPotential:
    inverse = {v: k for k, v in relabel.items()}
    values = {}
    for w in enumerate_admissible_words(sub, phi.depth):
        original = tuple(inverse[s] for s in w)
        values[w] = phi.value(original)
    return LocallyConstantPotential(phi.depth, phi.dim, values, label=phi.label)


def _component_log_radius(sub: TransitionSystem, phi_sub: LocallyConstantPotential) -> float:
    wm = build_weighted_matrix(sub, phi_sub)
    adj = [list(np.nonzero(wm.matrix[i])[0]) for i in range(wm.matrix.shape[0])]
    p = _graph_period(adj)
    if p == 1:
        return math.log(perron(wm.matrix).eigenvalue) + wm.log_shift
    Mp = np.linalg.matrix_power(wm.matrix, p)
    return math.log(perron(Mp).eigenvalue) / p + wm.log_shift


def pressure_detail(ts: TransitionSystem, phi: LocallyConstantPotential) -> PressureResult:
    """Topological pressure as log of the dominant transfer eigenvalue;
    reducible systems report the maximum over strongly connected
    components (flagged)."""
    if is_mixing(ts):
        wm = build_weighted_matrix(ts, phi)
        return PressureResult(math.log(perron(wm.matrix).eigenvalue) + wm.log_shift, True, ())
    values = []
    for comp in _strongly_connected_components(ts):
        has_edge = any(ts.table[a][b] for a in comp for b in comp)
        if not has_edge:
            continue  # transient singleton, carries no invariant measure
        sub, relabel = restrict_system(ts, comp)
        values.append(_component_log_radius(sub, restrict_potential(phi, sub, relabel)))
    if not values:
        raise ValueError("system has no recurrent component")
    return PressureResult(max(values), False, tuple(values))


def pressure(ts: TransitionSystem, phi: LocallyConstantPotential) -> float:
    detail = pressure_detail(ts, phi)
    if not detail.mixing:
        _warnings.warn(
            "system is not mixing; returning the maximal component pressure",
            stacklevel=2,
        )
    return detail.value


def equilibrium_state(
    ts: TransitionSystem,
    phi: LocallyConstantPotential,
    block_length: int | None = None,
    v0: np.ndarray | None = None,
) -> MarkovEquilibrium:
    """The unique Gibbs/equilibrium Markov measure of a locally constant
    potential on a mixing system.

    kernel[a, b] = M[a, b] r[b] / (lambda r[a]); stationary = l * r.
    The identity  entropy + integral = pressure  is exact for this
    construction up to solver tolerance.
    """
    if not is_mixing(ts):
        raise NonMixingError("equilibrium states need a mixing system")
    wm = build_weighted_matrix(ts, phi, block_length)
    pd = perron(wm.matrix, v0=v0)
    lam, r, l = pd.eigenvalue, pd.right_vector, pd.left_vector
    n = len(wm.states)
    kernel = wm.matrix * r[None, :] / (lam * r[:, None])
    # rows sum to 1 up to solver tolerance; renormalize exactly
    kernel = kernel / kernel.sum(axis=1, keepdims=True)
    stationary = l * r
    stationary = stationary / stationary.sum()
    with np.errstate(divide="ignore"):
        logk = np.where(kernel > 0.0, np.log(np.where(kernel > 0.0, kernel, 1.0)), 0.0)
    entropy = float(-np.sum(stationary[:, None] * kernel * logk))
    return MarkovEquilibrium(
        wm.states,
        wm.block_length,
        stationary,
        kernel,
        entropy,
        math.log(lam) + wm.log_shift,
        wm.edge_words,
    )


def rotation_vector(mu: MarkovEquilibrium, Phi: LocallyConstantPotential) -> np.ndarray:
    """Integral of the (vector) potential against the Markov measure."""
    return mu.integrate(Phi)


class PotentialFamily:
    """Pre-assembled transfer data for the linear family c . (pot_1,
    ..., pot_p) of locally constant potentials on a fixed block length.

    Building the state graph and the per-edge value matrix once makes
    repeated equilibrium solves (Newton iterations, grid scans) pure
    array work.
    """

    def __init__(
        self,
        ts: TransitionSystem,
        potentials: list[LocallyConstantPotential],
        block_length: int | None = None,
    ):
        if not is_mixing(ts):
            raise NonMixingError("equilibrium families need a mixing system")
        self.ts = ts
        self.potentials = list(potentials)
        depth = max(p.depth for p in potentials)
        ell = max(depth - 1, 1)
        if block_length is not None:
            ell = max(ell, block_length)
        self.block_length = ell
        self.states = tuple(enumerate_admissible_words(ts, ell))
        index = {w: i for i, w in enumerate(self.states)}
        rows, cols, words = [], [], []
        for i, u in enumerate(self.states):
            for b in ts.successors(u[-1]):
                v = u[1:] + (b,)
                j = index.get(v)
                if j is None:
                    continue
                rows.append(i)
                cols.append(j)
                words.append(u + (b,))
        self.rows = np.array(rows)
        self.cols = np.array(cols)
        self.edge_words = {(i, j): w for i, j, w in zip(rows, cols, words)}
        self.dims = [p.dim for p in potentials]
        cols_v = []
        for p in potentials:
            cols_v.append(np.array([p.value(w) for w in words]))
        self.values = np.hstack(cols_v)  # (E, total_dim)
        self._warm: np.ndarray | None = None
        self._warm_left: np.ndarray | None = None

    def split(self, coeffs: np.ndarray) -> list[np.ndarray]:
        out = []
        at = 0
        for d in self.dims:
            out.append(coeffs[at : at + d])
            at += d
        return out

    def equilibrium(self, coeffs) -> MarkovEquilibrium:
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if coeffs.shape[0] != self.values.shape[1]:
            raise ValueError("coefficient dimension mismatch")
        edge_vals = self.values @ coeffs
        shift = float(edge_vals.max())
        n = len(self.states)
        M = np.zeros((n, n))
        M[self.rows, self.cols] = np.exp(edge_vals - shift)
        pd = perron(M, v0=self._warm, l0=self._warm_left)
        self._warm = pd.right_vector
        self._warm_left = pd.left_vector / max(float(pd.left_vector.sum()), 1e-300)
        lam, r, l = pd.eigenvalue, pd.right_vector, pd.left_vector
        kernel = M * r[None, :] / (lam * r[:, None])
        kernel = kernel / kernel.sum(axis=1, keepdims=True)
        stationary = l * r
        stationary = stationary / stationary.sum()
        with np.errstate(divide="ignore"):
            logk = np.where(kernel > 0.0, np.log(np.where(kernel > 0.0, kernel, 1.0)), 0.0)
        entropy = float(-np.sum(stationary[:, None] * kernel * logk))
        return MarkovEquilibrium(
            self.states,
            self.block_length,
            stationary,
            kernel,
            entropy,
            math.log(lam) + shift,
            self.edge_words,
        )

    def moments(self, mu: MarkovEquilibrium) -> np.ndarray:
        """Integrals of every family component against the measure."""
        edge_weights = (mu.stationary[:, None] * mu.kernel)[self.rows, self.cols]
        return edge_weights @ self.values


def _scaled_potential(
    ts: TransitionSystem, Phi: LocallyConstantPotential, t: np.ndarray
) -> LocallyConstantPotential:
    return affine_combination(ts, [(t, Phi)])


def pressure_gradient(
    ts: TransitionSystem, Phi: LocallyConstantPotential, t: np.ndarray
) -> np.ndarray:
    """Gradient of t -> pressure(t . Phi): the rotation vector of the
    equilibrium measure of t . Phi."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    mu = equilibrium_state(ts, _scaled_potential(ts, Phi, t), block_length=max(Phi.depth - 1, 1))
    return rotation_vector(mu, Phi)


def pressure_hessian(
    ts: TransitionSystem,
    Phi: LocallyConstantPotential,
    t: np.ndarray,
    step: float = 1e-4,
    richardson: bool = True,
) -> np.ndarray:
    """Hessian of t -> pressure(t . Phi) by central differences of the
    gradient (one Richardson refinement), symmetrized."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    m = t.shape[0]

    def fd(h: float) -> np.ndarray:
        H = np.zeros((m, m))
        for j in range(m):
            e = np.zeros(m)
            e[j] = h
            H[:, j] = (pressure_gradient(ts, Phi, t + e) - pressure_gradient(ts, Phi, t - e)) / (
                2 * h
            )
        return H

    H = fd(step)
    if richardson:
        H = (4.0 * fd(step / 2) - H) / 3.0
    return 0.5 * (H + H.T)
