"""Capacities, equilibrium potentials, hitting probabilities and Kato constants.

The capacity follows the square-root convention

    cap(B) = inf { (E(v, v) + ||v||^2)^(1/2) : v >= 1 on B },

and :attr:`EquilibriumData.cap_squared` gives the more common squared value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    EmptySet,
    NegativePotential,
    NegativeTime,
    NonPositiveAlpha,
    NumericalError,
    SingularSystem,
    ValidationError,
)
from .graphs import vertex_set

__all__ = [
    "DIRECT_SOLVE_LIMIT",
    "EquilibriumData",
    "KatoReport",
    "solve_spd",
    "equilibrium_potential",
    "capacity_qp",
    "absorbing_generator",
    "hitting_probability_exact",
    "hitting_laplace_exact",
    "tail_sets",
    "kato_constant",
]

DIRECT_SOLVE_LIMIT = 5000
CG_RTOL = 1e-12


def solve_spd(A, rhs):
    """Solve ``A x = rhs`` for symmetric positive definite ``A``.

    Direct sparse factorization up to :data:`DIRECT_SOLVE_LIMIT` unknowns,
    conjugate gradients beyond.
    """
    A = sp.csc_matrix(A)
    rhs = np.asarray(rhs, dtype=float)
    if A.shape[0] == 0:
        return np.zeros(0)
    if A.shape[0] <= DIRECT_SOLVE_LIMIT:
        x = spla.spsolve(A, rhs)
    else:
        x, info = spla.cg(A, rhs, rtol=CG_RTOL, atol=0.0, maxiter=20 * A.shape[0])
        if info != 0:
            raise NumericalError(f"conjugate gradients stopped with info={info}")
    x = np.atleast_1d(x)
    if not np.all(np.isfinite(x)):
        raise SingularSystem("linear system is singular")
    return x


@dataclass(frozen=True)
class EquilibriumData:
    """1-equilibrium potential ``e_B`` of a vertex set and its capacity."""

    B: tuple
    e_B: np.ndarray
    cap_value: float
    residual: float = 0.0

    @property
    def cap(self):
        return self.cap_value

    @property
    def cap_squared(self):
        return self.cap_value**2

    def to_dict(self):
        return {
            "B": list(self.B),
            "e_B": self.e_B.tolist(),
            "cap": self.cap_value,
            "cap_squared": self.cap_squared,
        }


def _nonempty(system, B):
    B = vertex_set(B, system.n)
    if not B:
        raise EmptySet("B must be nonempty")
    return B


def equilibrium_potential(system, B) -> EquilibriumData:
    """Solve ``(Q + M) e = 0`` off ``B`` with ``e = 1`` on ``B``.

    The solution is the minimizer of the capacity problem and equals
    ``E_x[exp(-sigma_B)]`` for the associated jump process.
    """
    B = _nonempty(system, B)
    n = system.n
    inB = np.zeros(n, dtype=bool)
    inB[list(B)] = True
    U = np.flatnonzero(~inB)
    A = (system.Q + system.M).tocsr()
    e = np.ones(n)
    residual = 0.0
    if U.size:
        rhs = -np.asarray(A[U][:, list(B)].sum(axis=1)).ravel()
        A_UU = A[U][:, U]
        e[U] = solve_spd(A_UU, rhs)
        residual = float(np.max(np.abs(A_UU @ e[U] - rhs)))
    if e.min() < -1e-10 or e.max() > 1 + 1e-10:
        raise NumericalError(f"maximum principle violated: range [{e.min()}, {e.max()}]")
    e = np.clip(e, 0.0, 1.0)
    e.flags.writeable = False
    cap = np.sqrt(system.form(e) + system.norm2(e))
    return EquilibriumData(B, e, float(cap), residual)


def capacity_qp(system, B, *, return_minimizer=False, tol=1e-13, max_iter=None):
    """Capacity by direct minimization of ``E(v, v) + ||v||^2`` subject to ``v >= 1`` on ``B``.

    Uses a primal active-set method for the bound constraints; it makes no
    use of the fact that the optimum sits at ``v = 1`` on ``B``.
    """
    B = vertex_set(B, system.n)
    n = system.n
    if not B:
        # v = 0 is feasible
        return (0.0, np.zeros(n)) if return_minimizer else 0.0
    A = (system.Q + system.M).tocsr()
    bidx = np.array(B)
    v = np.zeros(n)
    v[bidx] = 1.0
    working = set(B)
    max_iter = max_iter or 10 * (len(B) + 5)
    for _ in range(max_iter):
        fixed = np.array(sorted(working), dtype=int)
        free = np.setdiff1d(np.arange(n), fixed)
        target = v.copy()
        target[fixed] = 1.0
        if free.size:
            rhs = -(A[free][:, fixed] @ np.ones(fixed.size))
            target[free] = solve_spd(A[free][:, free], rhs)
        step = target - v
        if np.max(np.abs(step)) <= tol:
            grad = 2.0 * (A @ v)
            mult = grad[fixed]
            if mult.min() >= -tol * (1 + np.abs(grad).max()):
                break
            working.discard(int(fixed[np.argmin(mult)]))
            continue
        # largest feasible step towards the subproblem optimum
        alpha, blocking = 1.0, None
        for i in bidx:
            if i not in working and step[i] < 0:
                ratio = (v[i] - 1.0) / -step[i]
                if ratio < alpha:
                    alpha, blocking = ratio, int(i)
        v = v + alpha * step
        if blocking is not None:
            working.add(blocking)
    else:
        raise NumericalError("active-set iteration did not converge")
    value = float(np.sqrt(v @ (A @ v)))
    return (value, v) if return_minimizer else value


def absorbing_generator(system, B):
    """Rate matrix of the chain absorbed in ``B`` and killed into a cemetery.

    State order: vertices of ``U = X \\ B`` (ascending), then the absorbing
    sink standing for ``B``, then the cemetery.  Returns ``(G, U)``.
    """
    B = vertex_set(B, system.n)
    n = system.n
    Q = sp.csr_matrix(system.Q).toarray()
    m = np.asarray(system.m)
    inB = np.zeros(n, dtype=bool)
    inB[list(B)] = True
    U = np.flatnonzero(~inB)
    kill = Q.sum(axis=1)
    if kill.min() < -1e-12 * (1 + np.abs(Q).max()):
        raise ValidationError("system has negative killing; it is not a Dirichlet form")
    k = U.size
    G = np.zeros((k + 2, k + 2))
    rates = -Q[np.ix_(U, U)] / m[U, None]
    np.fill_diagonal(rates, 0.0)
    G[:k, :k] = rates
    G[:k, k] = -Q[np.ix_(U, inB.nonzero()[0])].sum(axis=1) / m[U]
    G[:k, k + 1] = np.maximum(kill[U], 0.0) / m[U]
    G[:k, :k][np.diag_indices(k)] = -G[:k].sum(axis=1)
    return G, U


def hitting_probability_exact(system, B, t) -> np.ndarray:
    """``P^x{sigma_B <= t}`` for every vertex, by exponentiating the absorbing chain.

    Paths killed before reaching ``B`` never hit it.
    """
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    B = _nonempty(system, B)
    G, U = absorbing_generator(system, B)
    out = np.ones(system.n)
    if U.size:
        P = sla.expm(t * G)
        out[U] = np.clip(P[: U.size, U.size], 0.0, 1.0)
    return out


def hitting_laplace_exact(system, B, rate=1.0) -> np.ndarray:
    """``E_x[exp(-rate * sigma_B)]`` from the resolvent of the absorbing chain."""
    B = _nonempty(system, B)
    G, U = absorbing_generator(system, B)
    out = np.ones(system.n)
    if U.size:
        R = np.linalg.solve(rate * np.eye(G.shape[0]) - G, np.eye(G.shape[0]))
        out[U] = rate * R[: U.size, U.size]
    return out


def tail_sets(eq: EquilibriumData, n: int) -> tuple:
    """Superlevel set ``{x : e_B(x) > 1/n}``."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    return tuple(int(x) for x in np.flatnonzero(eq.e_B > 1.0 / n))


@dataclass(frozen=True)
class KatoReport:
    """Kato constant ``c_alpha(V) = sup_x ((L + alpha)^{-1} V)(x)``."""

    alpha: float
    c_alpha: float
    potential: np.ndarray
    resolvent_image: np.ndarray

    def to_dict(self):
        return {"alpha": self.alpha, "c_alpha": self.c_alpha}


def kato_constant(system, potential, alpha) -> KatoReport:
    """Sup-norm of ``(L + alpha)^{-1} V`` for a nonnegative density ``V``."""
    V = np.asarray(potential, dtype=float)
    if V.shape != (system.n,):
        raise ValidationError(f"potential must have length {system.n}")
    if not np.all(np.isfinite(V)):
        raise ValidationError("potential must be finite")
    if np.any(V < 0):
        raise NegativePotential("potential must be >= 0")
    if not alpha > 0:
        raise NonPositiveAlpha(f"alpha must be > 0, got {alpha}")
    A = system.Q + alpha * system.M
    w = solve_spd(A, system.m * V)
    return KatoReport(float(alpha), float(max(w.max(), 0.0)), V.copy(), w)
