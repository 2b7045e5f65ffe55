"""Monte Carlo simulation of the minimal jump process of a weighted graph.

At vertex ``x`` the process waits an exponential time with rate
``(sum_y b(x, y) + c(x)) / m(x)`` and then jumps to ``y`` with probability
proportional to ``b(x, y)``, or to the cemetery with probability
proportional to ``c(x)``.  Payoffs vanish on the cemetery.

Samples are drawn in fixed-size blocks.  Block ``i`` uses its own Philox
stream keyed by ``(seed, i)``, so estimates are reproducible and do not
depend on how blocks are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import (
    EmptySet,
    InvalidSeedStream,
    NegativeTime,
    UnboundedPotential,
    ValidationError,
)
from .graphs import restrict, vertex_set

__all__ = [
    "CEMETERY",
    "BLOCK_SIZE",
    "JumpPath",
    "MCEstimate",
    "simulate_path",
    "sample_paths",
    "mc_semigroup",
    "mc_killed_semigroup",
    "mc_hitting_laplace",
    "mc_hitting_probability",
    "mc_feynman_kac_potential",
]

CEMETERY = -1
BLOCK_SIZE = 8192
HORIZON_FLOOR = 50.0
HORIZON_CAP = 500.0


def _check_seed(seed):
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise InvalidSeedStream(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)


def _stream(seed, block):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class _Chain:
    rate: np.ndarray  # total jump rate per vertex
    cum: np.ndarray   # cumulative jump distribution, last column = cemetery


def _chain(system):
    Q = sp.csr_matrix(system.Q).toarray()
    m = np.asarray(system.m, dtype=float)
    b = -Q.copy()
    np.fill_diagonal(b, 0.0)
    if b.min() < 0:
        raise ValidationError("positive off-diagonal entries in Q; not a Dirichlet form")
    kill = np.maximum(Q.sum(axis=1), 0.0)
    total = b.sum(axis=1) + kill
    probs = np.hstack([b, kill[:, None]])
    with np.errstate(invalid="ignore", divide="ignore"):
        probs = np.where(total[:, None] > 0, probs / total[:, None], 0.0)
    cum = np.cumsum(probs, axis=1)
    cum[:, -1] = np.where(total > 0, 1.0, 0.0)
    return _Chain(total / m, cum)


@dataclass(frozen=True)
class JumpPath:
    """One trajectory: ``states[i]`` is occupied from ``times[i]`` on.

    ``times[0] == 0``; a final state of :data:`CEMETERY` marks a killed path.
    """

    states: list
    times: list
    killed_flag: bool
    horizon: float
    hit_times: dict = field(default_factory=dict)

    def state_at(self, t):
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.states[i]


def simulate_path(system, x0, horizon, rng_seed, *, watch=None) -> JumpPath:
    """Simulate a single path from ``x0`` up to ``horizon``.

    ``watch`` maps names to vertex sets whose first hitting times are
    recorded in :attr:`JumpPath.hit_times` (``inf`` if not hit).
    """
    if not horizon > 0:
        raise ValidationError("horizon must be positive")
    seed = _check_seed(rng_seed)
    (x0,) = vertex_set([x0], system.n)
    chain = _chain(system)
    rng = _stream(seed, 0)
    watch = {k: set(vertex_set(v, system.n)) for k, v in (watch or {}).items()}
    hits = {k: (0.0 if x0 in v else math.inf) for k, v in watch.items()}
    states, times = [x0], [0.0]
    x, now = x0, 0.0
    while True:
        r = float(chain.rate[x])
        if r == 0:
            break
        now += -math.log1p(-rng.random()) / r
        if now >= horizon:
            break
        nxt = int(np.count_nonzero(chain.cum[x] <= rng.random()))
        if nxt == system.n:
            states.append(CEMETERY)
            times.append(now)
            return JumpPath(states, times, True, horizon, hits)
        x = nxt
        states.append(x)
        times.append(now)
        for k, v in watch.items():
            if x in v and hits[k] == math.inf:
                hits[k] = now
    return JumpPath(states, times, False, horizon, hits)


@dataclass(frozen=True)
class _Batch:
    final: np.ndarray     # state at the horizon, CEMETERY if killed
    hit: np.ndarray       # first hitting time of the target set, inf if none
    integral: np.ndarray  # int_0^horizon W(X_s) ds


def _run_block(chain, x0, horizon, size, rng, inB, W, stop):
    n = chain.rate.size
    state = np.full(size, x0, dtype=np.int64)
    now = np.zeros(size)
    hit = np.full(size, 0.0 if inB[x0] else np.inf)
    integral = np.zeros(size)
    active = np.arange(size)
    if stop is not None:
        active = active[~stop(state, hit)]
    while active.size:
        s = state[active]
        r = chain.rate[s]
        u = rng.random(active.size)
        with np.errstate(divide="ignore"):
            hold = np.where(r > 0, -np.log1p(-u) / r, np.inf)
        end = now[active] + hold
        over = end >= horizon
        if W is not None:
            integral[active] += W[s] * (np.minimum(end, horizon) - now[active])
        jumpers = active[~over]
        if not jumpers.size:
            break
        now[jumpers] = end[~over]
        u = rng.random(jumpers.size)
        nxt = np.count_nonzero(chain.cum[state[jumpers]] <= u[:, None], axis=1)
        dead = nxt == n
        state[jumpers] = np.where(dead, CEMETERY, nxt)
        alive = jumpers[~dead]
        first = alive[inB[state[alive]] & np.isinf(hit[alive])]
        hit[first] = now[first]
        active = alive
        if stop is not None:
            active = active[~stop(state[active], hit[active])]
    return _Batch(state, hit, integral)


def sample_paths(system, x0, horizon, n_samples, seed, *, B=(), W=None,
                 stop_on_hit=False, workers=None) -> _Batch:
    """Simulate ``n_samples`` paths and return per-sample records.

    All estimators share this routine, so estimators called with the same
    seed see the same paths sample for sample (as long as
    ``stop_on_hit`` is off).
    """
    seed = _check_seed(seed)
    (x0,) = vertex_set([x0], system.n)
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    chain = _chain(system)
    inB = np.zeros(system.n, dtype=bool)
    inB[list(vertex_set(B, system.n))] = True
    stop = None
    if stop_on_hit:
        reach = _can_reach(system, inB)
        stop = lambda st, h: np.isfinite(h) | ~reach[st]  # noqa: E731
    W = None if W is None else np.asarray(W, dtype=float)
    sizes = [BLOCK_SIZE] * (n_samples // BLOCK_SIZE)
    if n_samples % BLOCK_SIZE:
        sizes.append(n_samples % BLOCK_SIZE)

    def run(i):
        return _run_block(chain, x0, horizon, sizes[i], _stream(seed, i), inB, W, stop)

    if workers and workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    return _Batch(
        np.concatenate([p.final for p in parts]),
        np.concatenate([p.hit for p in parts]),
        np.concatenate([p.integral for p in parts]),
    )


def _can_reach(system, inB):
    """Mask of vertices with a jump path into ``B``; the cemetery index maps to False."""
    pattern = (sp.csr_matrix(system.Q) != 0).astype(float)
    _, labels = csgraph.connected_components(pattern, directed=False)
    good = np.isin(labels, labels[inB])
    # index -1 (cemetery) reads the appended False
    return np.append(good, False)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int
    bias_bound: float = 0.0

    def to_dict(self):
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "n": self.n_samples,
            "seed": self.seed,
            "bias_bound": self.bias_bound,
        }


def _estimate(payoff, seed, bias=0.0):
    n = payoff.size
    se = float(payoff.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MCEstimate(float(payoff.mean()), se, int(n), int(seed), bias)


def _payoff_vector(system, f):
    f = np.asarray(f, dtype=float)
    if f.shape != (system.n,):
        raise ValidationError(f"f must have length {system.n}")
    if not np.all(np.isfinite(f)):
        raise ValidationError("f must be finite")
    return np.append(f, 0.0)  # f(cemetery) = 0 via index -1


def _check_time(t):
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")


def mc_semigroup(system, f, x, t, n_samples, seed, *, workers=None) -> MCEstimate:
    """Estimate ``(exp(-tL) f)(x) = E_x[f(X_t)]``."""
    _check_time(t)
    fx = _payoff_vector(system, f)
    batch = sample_paths(system, x, t, n_samples, seed, workers=workers)
    return _estimate(fx[batch.final], seed)


def mc_killed_semigroup(system, B, f, x, t, n_samples, seed, *, workers=None) -> MCEstimate:
    """Estimate ``(exp(-tL_{X \\ B}) f)(x) = E_x[f(X_t); sigma_B > t]``."""
    _check_time(t)
    fx = _payoff_vector(system, f)
    batch = sample_paths(system, x, t, n_samples, seed, B=B, workers=workers)
    return _estimate(fx[batch.final] * (batch.hit > t), seed)


def mc_feynman_kac_potential(system, B, W, f, x, t, n_samples, seed, *, workers=None) -> MCEstimate:
    """Estimate ``(exp(-t(L_{X \\ B} + W)) f)(x)`` with the weight ``exp(-int_0^t W(X_s) ds)``.

    The time integral is exact on the piecewise constant path.
    """
    _check_time(t)
    W = np.asarray(W, dtype=float)
    if W.shape != (system.n,):
        raise ValidationError(f"W must have length {system.n}")
    if not np.all(np.isfinite(W)):
        raise UnboundedPotential("W must be finite")
    fx = _payoff_vector(system, f)
    batch = sample_paths(system, x, t, n_samples, seed, B=B, W=W, workers=workers)
    payoff = fx[batch.final] * (batch.hit > t) * np.exp(-batch.integral)
    return _estimate(payoff, seed)


def mc_hitting_probability(system, B, x, t, n_samples, seed, *, workers=None) -> MCEstimate:
    """Estimate ``P^x{sigma_B <= t}``."""
    _check_time(t)
    if not vertex_set(B, system.n):
        raise EmptySet("B must be nonempty")
    batch = sample_paths(system, x, t, n_samples, seed, B=B, workers=workers)
    return _estimate((batch.hit <= t).astype(float), seed)


def hitting_horizon(system, B):
    """Simulation horizon for ``E_x[exp(-sigma_B)]``: ``max(50, 10 / lambda_min(L_U))``, capped."""
    from .spectral import bottom_of_spectrum

    B = vertex_set(B, system.n)
    if len(B) == system.n:
        return HORIZON_FLOOR
    lam = bottom_of_spectrum(restrict(system, B).S, 1).eigenvalues[0]
    if lam <= 0:
        return HORIZON_CAP
    return float(min(max(HORIZON_FLOOR, 10.0 / lam), HORIZON_CAP))


def mc_hitting_laplace(system, B, x, n_samples, seed, *, workers=None) -> MCEstimate:
    """Estimate ``E_x[exp(-sigma_B)]``.

    Paths are followed until they hit ``B``, die, reach a component that
    cannot lead to ``B``, or pass the horizon of :func:`hitting_horizon`.
    Unresolved paths contribute 0, which biases the estimate down by at
    most ``exp(-horizon)``; that bound is returned as ``bias_bound``.
    """
    B = vertex_set(B, system.n)
    if not B:
        raise EmptySet("B must be nonempty")
    T = hitting_horizon(system, B)
    batch = sample_paths(system, x, T, n_samples, seed, B=B, stop_on_hit=True, workers=workers)
    payoff = np.where(batch.hit <= T, np.exp(-batch.hit), 0.0)
    return _estimate(payoff, seed, bias=math.exp(-T))
