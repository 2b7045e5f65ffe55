"""Eigenvalues, semigroups, restriction norm bounds and Persson sweeps.

Everything here acts on "systems": objects exposing the form matrix ``Q``,
the measure vector ``m`` and the symmetrized generator ``S`` (see
:mod:`dirichlet_spectra.graphs`).  Restricted systems return semigroups in
global coordinates, extended by zero off the retained set.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    EmptyComplement,
    ExhaustionNotNested,
    NegativeTime,
    SupportViolation,
    TooLargeForDense,
    ValidationError,
    ZeroVector,
)
from .graphs import RestrictedSystem, hop_distances, restrict, vertex_set
from .potential import equilibrium_potential, hitting_probability_exact, tail_sets

__all__ = [
    "DENSE_THRESHOLD",
    "ITERATIVE_SWITCH",
    "SpectralSummary",
    "BoundCheck",
    "PerssonSweep",
    "spectrum_dense",
    "bottom_of_spectrum",
    "semigroup_matrix",
    "semigroup_difference",
    "operator_norm",
    "bound_check",
    "tail_bound_check",
    "tail_bound_profile",
    "ball_exhaustion",
    "persson_sweep",
    "rayleigh_quotient",
    "weyl_upper_bound",
    "variational_chain",
]

DENSE_THRESHOLD = 2000
# bottom_of_spectrum switches to shift-invert Lanczos above this size
ITERATIVE_SWITCH = 500
RESIDUAL_RTOL = 1e-8
SLACK = 1e-10


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    method: str
    residuals: np.ndarray
    requested: int
    eigenvectors: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self):
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "method": self.method,
            "residuals": self.residuals.tolist(),
            "requested": self.requested,
        }


def _residuals(S, vals, vecs):
    R = S @ vecs - vecs * vals
    return np.linalg.norm(R, axis=0)


def _certify(S, vals, vecs, method, k):
    res = _residuals(S, vals, vecs)
    bad = res > RESIDUAL_RTOL * (1 + np.abs(vals))
    if np.any(bad):
        raise ConvergenceFailure(
            f"{method} eigenpairs not certified (max residual {res.max():.3e})",
            residual=float(res.max()),
        )
    return SpectralSummary(vals, method, res, k, vecs)


def _dense(S):
    return S.toarray() if sp.issparse(S) else np.asarray(S, dtype=float)


def spectrum_dense(S, *, threshold=DENSE_THRESHOLD) -> SpectralSummary:
    """Full spectrum of a symmetric matrix by dense diagonalization."""
    n = S.shape[0]
    if n > threshold:
        raise TooLargeForDense(f"{n} unknowns exceed the dense threshold {threshold}")
    A = _dense(S)
    vals, vecs = np.linalg.eigh(A)
    return _certify(A, vals, vecs, "dense", n)


def _gershgorin_low(S):
    S = sp.csr_matrix(S)
    diag = S.diagonal()
    off = np.asarray(abs(S).sum(axis=1)).ravel() - np.abs(diag)
    return float(np.min(diag - off))


def bottom_of_spectrum(S, k=1, *, threshold=ITERATIVE_SWITCH) -> SpectralSummary:
    """The ``k`` smallest eigenvalues of a symmetric matrix.

    Problems up to ``threshold`` unknowns (or with ``k`` close to ``n``) are
    diagonalized densely.  Larger ones use shift-invert
    Lanczos (ARPACK) with the shift placed just below the Gershgorin lower
    bound, so the eigenvalues nearest the shift are the smallest ones.
    Every returned pair is residual-checked.
    """
    n = S.shape[0]
    if not 1 <= k <= n:
        raise DimensionMismatch(f"k must lie in 1..{n}, got {k}")
    if n <= threshold or k >= n - 1:
        full = spectrum_dense(S, threshold=max(threshold, n))
        return SpectralSummary(
            full.eigenvalues[:k], "dense", full.residuals[:k], k, full.eigenvectors[:, :k]
        )
    A = sp.csc_matrix(S)
    low = _gershgorin_low(A)
    sigma = low - 1e-6 * (1.0 + abs(low))
    v0 = np.full(n, 1.0 / math.sqrt(n))
    try:
        vals, vecs = spla.eigsh(A, k=k, sigma=sigma, which="LM", v0=v0)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"ARPACK did not converge: {exc}") from exc
    order = np.argsort(vals)
    return _certify(A, vals[order], vecs[:, order], "iterative", k)


def semigroup_matrix(system, t) -> np.ndarray:
    """Kernel of ``exp(-t L)`` as a dense matrix in global coordinates.

    ``(exp(-tL) f)(x) = sum_y P[x, y] f(y)``.  For a restricted system the
    rows and columns of the removed set are zero.
    """
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    n_loc = system.n
    if n_loc > DENSE_THRESHOLD:
        raise TooLargeForDense(f"{n_loc} unknowns exceed the dense threshold")
    vals, vecs = np.linalg.eigh(_dense(system.S))
    E = (vecs * np.exp(-t * vals)) @ vecs.T
    sq = np.sqrt(system.m)
    P_loc = E * (sq[None, :] / sq[:, None])
    if not isinstance(system, RestrictedSystem):
        return P_loc
    P = np.zeros((system.n_global, system.n_global))
    P[np.ix_(system.kept, system.kept)] = P_loc
    return P


def semigroup_difference(system, B, t) -> np.ndarray:
    """``exp(-tL) - exp(-tL_G)`` with ``G = X \\ B``, zero-extended."""
    return semigroup_matrix(system, t) - semigroup_matrix(restrict(system, B), t)


def operator_norm(D, m=None, *, rows=None, tol=1e-10, max_iter=10_000) -> float:
    """Operator norm of ``D`` on ``l^2(X, m)``, optionally after ``1_rows D``.

    Dense SVD below the dense threshold, power iteration on ``D D^T`` above.
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    if rows is not None:
        mask = np.zeros(n, dtype=bool)
        mask[list(rows)] = True
        D = np.where(mask[:, None], D, 0.0)
    if m is not None:
        sq = np.sqrt(np.asarray(m, dtype=float))
        D = D * (sq[:, None] / sq[None, :])
    if not np.any(D):
        return 0.0
    if n <= DENSE_THRESHOLD:
        return float(np.linalg.norm(D, 2))
    x = np.ones(n) / math.sqrt(n)
    est = 0.0
    for _ in range(max_iter):
        y = D @ (D.T @ x)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        x = y / new
        if abs(new - est) <= tol * new:
            return math.sqrt(new)
        est = new
    raise ConvergenceFailure("power iteration for the operator norm did not converge")


@dataclass(frozen=True)
class BoundCheck:
    """Restriction norm estimate ``lhs <= rhs_prob <= rhs_eq``."""

    t: float
    A: tuple
    B: tuple
    lhs: float
    rhs_prob: float
    rhs_eq: float
    pass_prob: bool
    pass_eq: bool

    @property
    def passed(self):
        return self.pass_prob and self.pass_eq

    def to_dict(self):
        return {
            "t": self.t,
            "A": list(self.A),
            "B": list(self.B),
            "lhs": self.lhs,
            "rhs_prob": self.rhs_prob,
            "rhs_eq": self.rhs_eq,
            "pass_prob": self.pass_prob,
            "pass_eq": self.pass_eq,
            "passed": self.passed,
        }


def bound_check(system, B, A, t, *, slack=SLACK) -> BoundCheck:
    """Compare ``||1_A (exp(-tL) - exp(-tL_G))||`` with its two upper bounds.

    The middle term is ``sup_A P^x{sigma_B <= t}^(1/2)``, the right one
    ``exp(t/2) sup_A e_B^(1/2)``.  Norms are taken in ``l^2(X, m)``.
    """
    if not t > 0:
        raise NegativeTime(f"t must be > 0, got {t}")
    B = vertex_set(B, system.n)
    A = vertex_set(A, system.n)
    D = semigroup_difference(system, B, t)
    lhs = operator_norm(D, system.m, rows=A)
    if A:
        hit = hitting_probability_exact(system, B, t)
        eq = equilibrium_potential(system, B)
        rhs_prob = math.sqrt(max(hit[list(A)].max(), 0.0))
        rhs_eq = math.exp(t / 2) * math.sqrt(eq.e_B[list(A)].max())
    else:
        rhs_prob = rhs_eq = 0.0
    return BoundCheck(
        float(t), A, B, lhs, rhs_prob, rhs_eq,
        lhs <= rhs_prob + slack, rhs_prob <= rhs_eq + slack,
    )


def tail_bound_profile(system, B, t, ns):
    """``[(||1_{X \\ M_n} D||, exp(t/2) / sqrt(n)) for n in ns]`` with ``M_n = {e_B > 1/n}``."""
    D = semigroup_difference(system, B, t)
    eq = equilibrium_potential(system, B)
    out = []
    for n in ns:
        inside = set(tail_sets(eq, n))
        outside = [x for x in range(system.n) if x not in inside]
        lhs = operator_norm(D, system.m, rows=outside)
        out.append((lhs, math.exp(t / 2) / math.sqrt(n)))
    return out


def tail_bound_check(system, B, t, n):
    """Norm of the semigroup difference outside the tail set ``M_n`` and its bound."""
    return tail_bound_profile(system, B, t, [n])[0]


def ball_exhaustion(graph, root, radii):
    """Nested hop-distance balls ``{x : dist(x, root) <= r}`` for each radius."""
    dist = hop_distances(graph, root)
    return [tuple(int(x) for x in np.flatnonzero(dist <= r)) for r in radii]


@dataclass(frozen=True)
class PerssonSweep:
    exhaustion: list
    ground_values: np.ndarray
    residuals: np.ndarray
    lambda0: float
    monotone_flag: bool
    ground_vectors: Optional[list] = field(default=None, repr=False)

    def to_csv(self):
        buf = io.StringIO()
        buf.write("n,size,lambda_n,residual\n")
        for i, (K, lam, res) in enumerate(zip(self.exhaustion, self.ground_values, self.residuals)):
            buf.write(f"{i},{len(K)},{float(lam)!r},{float(res)!r}\n")
        return buf.getvalue()

    def to_dict(self):
        return {
            "lambda0": self.lambda0,
            "monotone": self.monotone_flag,
            "sizes": [len(K) for K in self.exhaustion],
            "ground_values": self.ground_values.tolist(),
        }


def _normalize_exhaustion(system, exhaustion):
    n = system.n_global if isinstance(system, RestrictedSystem) else system.n
    sets = [vertex_set(K, n) for K in exhaustion] or [()]
    for i, (K1, K2) in enumerate(zip(sets, sets[1:])):
        if not set(K1) <= set(K2):
            raise ExhaustionNotNested(f"K_{i} is not contained in K_{i + 1}")
    removed = set(getattr(system, "removed", ()))
    if len(set(sets[-1]) | removed) >= n:
        raise EmptyComplement("the last exhaustion set covers the whole space")
    return sets


def persson_sweep(system, exhaustion, *, workers=None, keep_vectors=False) -> PerssonSweep:
    """Ground values ``inf sigma(L_{X \\ K_n})`` along a nested exhaustion.

    The sets are in global coordinates.  An empty exhaustion is read as
    ``[()]``, i.e. the bottom of the spectrum of the system itself.
    Independent solves run in a thread pool when ``workers > 1``; results
    are merged by index.
    """
    sets = _normalize_exhaustion(system, exhaustion)

    def solve(K):
        rs = restrict(system, K)
        summary = bottom_of_spectrum(rs.S, 1)
        vec = None
        if keep_vectors:
            local = summary.eigenvectors[:, 0] / np.sqrt(rs.m)
            vec = np.zeros(rs.n_global)
            vec[rs.kept] = local * np.sign(local.sum() or 1.0)
        return summary.eigenvalues[0], summary.residuals[0], vec

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, sets))
    else:
        results = [solve(K) for K in sets]
    vals = np.array([r[0] for r in results])
    res = np.array([r[1] for r in results])
    monotone = bool(np.all(np.diff(vals) >= -SLACK))
    return PerssonSweep(
        sets, vals, res, float(vals.max()), monotone,
        [r[2] for r in results] if keep_vectors else None,
    )


def rayleigh_quotient(system, f) -> float:
    """``E(f, f) / ||f||^2`` in ``l^2(X, m)``."""
    f = np.asarray(f, dtype=float)
    if f.shape != (system.n,):
        raise DimensionMismatch(f"f must have length {system.n}")
    nrm = system.norm2(f)
    if nrm == 0:
        raise ZeroVector("Rayleigh quotient of the zero vector")
    return system.form(f) / nrm


def weyl_upper_bound(system, trial_family, exhaustion=None) -> float:
    """Upper certificate for the Persson limit from trial functions.

    ``trial_family[i]`` must vanish on ``exhaustion[i]``.  Since each
    ground value is at most the Rayleigh quotient of any admissible trial
    function, the largest quotient among the last third of the family bounds
    the limit from above.
    """
    family = [np.asarray(f, dtype=float) for f in trial_family]
    if not family:
        raise ValidationError("empty trial family")
    if exhaustion is not None:
        if len(exhaustion) != len(family):
            raise DimensionMismatch("one exhaustion set per trial vector is required")
        for i, (f, K) in enumerate(zip(family, exhaustion)):
            K = list(vertex_set(K, system.n))
            if K and np.any(f[K] != 0):
                raise SupportViolation(f"trial vector {i} does not vanish on K_{i}")
    tail = family[len(family) - math.ceil(len(family) / 3):]
    return max(rayleigh_quotient(system, f) for f in tail)


def variational_chain(system, exhaustion):
    """Three finite-scale readings of the Persson limit along ``exhaustion``.

    Returns ``(limit, sup_inf_spectrum, sup_inf_rayleigh)``: the last ground
    value, the largest ground value, and the largest minimal Rayleigh
    quotient over functions vanishing on ``K_n`` (computed from the
    generalized problem ``Q_U v = lam M_U v`` rather than from ``S``).
    """
    sweep = persson_sweep(system, exhaustion)
    rayleigh = []
    for K in sweep.exhaustion:
        rs = restrict(system, K)
        Q = _dense(rs.Q)
        lam = sla.eigh(Q, np.diag(rs.m), eigvals_only=True, subset_by_index=[0, 0])
        rayleigh.append(lam[0])
    return float(sweep.ground_values[-1]), sweep.lambda0, float(max(rayleigh))
