"""Schrodinger-type perturbations ``L + mu_+ - mu_-`` of a graph form.

Potentials are densities with respect to ``m``, so the perturbed form
matrix is ``Q' = Q + M diag(mu_+ - mu_-)`` and ``S' = S + diag(mu_+ - mu_-)``.
The negative part is gated by the Kato condition ``c_alpha(mu_-) < 1/2``.
Infinite potentials are not accepted; use :func:`~dirichlet_spectra.graphs.restrict`
for a hard wall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    InadmissiblePerturbation,
    NegativeDensity,
    NegativeTime,
    NonPositiveAlpha,
    ValidationError,
)
from .graphs import _SystemMixin, _freeze_sparse, vertex_set
from .potential import KatoReport, equilibrium_potential, hitting_probability_exact, kato_constant
from .spectral import (
    SLACK,
    PerssonSweep,
    bottom_of_spectrum,
    operator_norm,
    persson_sweep,
    semigroup_difference,
    semigroup_matrix,
)

__all__ = [
    "KATO_GATE",
    "Perturbation",
    "PerturbedSystem",
    "DominationReport",
    "PerturbedBoundCheck",
    "make_perturbation",
    "perturbed_system",
    "domination_check",
    "perturbed_bound_check",
    "l1_norm",
    "l1_bound_check",
    "perturbed_persson",
    "truncation_resolvent_gaps",
]

KATO_GATE = 0.5


@dataclass(frozen=True)
class Perturbation:
    plus: np.ndarray
    minus: np.ndarray
    alpha: float
    kato: KatoReport
    admissible_flag: bool

    def to_dict(self):
        return {
            "plus": self.plus.tolist(),
            "minus": self.minus.tolist(),
            "alpha": self.alpha,
            "c_alpha": self.kato.c_alpha,
            "admissible": self.admissible_flag,
        }


def _density(values, n, name):
    v = np.zeros(n) if values is None else np.asarray(values, dtype=float)
    if v.ndim == 0:
        v = np.full(n, float(v))
    if v.shape != (n,):
        raise ValidationError(f"{name} must have length {n}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(
            f"{name} must be finite; restrict() the system for infinite walls"
        )
    if np.any(v < 0):
        raise NegativeDensity(f"{name} must be >= 0")
    return v


def make_perturbation(system, plus=None, minus=None, alpha=1.0) -> Perturbation:
    """Bundle ``mu_+`` and ``mu_-`` with the Kato constant of ``mu_-``."""
    if not alpha > 0:
        raise NonPositiveAlpha(f"alpha must be > 0, got {alpha}")
    plus = _density(plus, system.n, "plus")
    minus = _density(minus, system.n, "minus")
    kato = kato_constant(system, minus, alpha)
    return Perturbation(plus, minus, float(alpha), kato, kato.c_alpha < KATO_GATE)


@dataclass(frozen=True, eq=False)
class PerturbedSystem(_SystemMixin):
    """Form ``E + mu`` of a base system; usable wherever a system is expected."""

    base: object
    pert: Perturbation
    Q: sp.csr_matrix
    m: np.ndarray
    S: sp.csr_matrix
    override: bool = False

    @property
    def graph(self):
        return self.base.graph

    @property
    def kept(self):
        return np.arange(self.n)

    @property
    def removed(self):
        return ()

    @property
    def n_global(self):
        return self.n

    @property
    def root(self):
        return self


def _with_potential(system, V, pert=None, override=False):
    V = np.asarray(V, dtype=float)
    Q = _freeze_sparse(system.Q + sp.diags(system.m * V))
    S = _freeze_sparse(system.S + sp.diags(V))
    return PerturbedSystem(system, pert, Q, system.m, S, override)


def perturbed_system(system, pert: Perturbation, *, override=False) -> PerturbedSystem:
    """Assemble ``Q' = Q + M diag(mu_+ - mu_-)``.

    Raises :class:`InadmissiblePerturbation` unless the Kato gate holds or
    ``override`` is set; an override is recorded on the result.
    """
    if not pert.admissible_flag and not override:
        raise InadmissiblePerturbation(
            f"c_alpha(mu_-) = {pert.kato.c_alpha:.6g} >= {KATO_GATE} at alpha = {pert.alpha}"
        )
    return _with_potential(system, pert.plus - pert.minus, pert, override)


@dataclass(frozen=True)
class DominationReport:
    lhs: np.ndarray
    rhs: np.ndarray
    max_violation: float

    @property
    def passed(self):
        return self.max_violation <= SLACK

    def to_dict(self):
        return {
            "lhs": self.lhs.tolist(),
            "rhs": self.rhs.tolist(),
            "max_violation": self.max_violation,
            "passed": self.passed,
        }


def domination_check(system, B, pert: Perturbation, f, t) -> DominationReport:
    """Entrywise check of
    ``|(e^{-t(L+mu)} - e^{-t(L_G+mu)}) f| <= (e^{-t(L-mu_-)} - e^{-t(L_G-mu_-)}) |f|``.
    """
    if not t > 0:
        raise NegativeTime(f"t must be > 0, got {t}")
    f = np.asarray(f, dtype=float)
    full = _with_potential(system, pert.plus - pert.minus)
    neg = _with_potential(system, -pert.minus)
    lhs = np.abs(semigroup_difference(full, B, t) @ f)
    rhs = semigroup_difference(neg, B, t) @ np.abs(f)
    return DominationReport(lhs, rhs, float(max(np.max(lhs - rhs), 0.0)))


def l1_norm(P, m) -> float:
    """Norm of the kernel ``P`` as an operator on ``l^1(X, m)``: max weighted column sum."""
    m = np.asarray(m, dtype=float)
    return float(np.max((m[:, None] * np.abs(P)).sum(axis=0) / m))


def l1_bound_check(system, pert: Perturbation, t) -> float:
    """``||exp(-t(L - mu_-))||_{1,1}``; needs ``c_alpha(2 mu_-) = 2 c_alpha(mu_-) < 1``."""
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    if not 2 * pert.kato.c_alpha < 1:
        raise InadmissiblePerturbation("l1 bound needs 2 c_alpha(mu_-) < 1")
    value = l1_norm(semigroup_matrix(_with_potential(system, -pert.minus), t), system.m)
    if not math.isfinite(value):
        raise ArithmeticError("l1 norm is not finite")
    return value


@dataclass(frozen=True)
class PerturbedBoundCheck:
    """``lhs <= C rhs_prob <= C rhs_eq`` for the perturbed semigroups."""

    t: float
    A: tuple
    B: tuple
    lhs: float
    C: float
    rhs_prob: float
    rhs_eq: float
    passed: bool

    def to_dict(self):
        return {
            "t": self.t,
            "A": list(self.A),
            "B": list(self.B),
            "lhs": self.lhs,
            "C": self.C,
            "rhs_prob": self.rhs_prob,
            "rhs_eq": self.rhs_eq,
            "passed": self.passed,
        }


def perturbed_bound_check(system, B, A, pert: Perturbation, t) -> PerturbedBoundCheck:
    """Norm estimate for ``1_A (e^{-t(L+mu)} - e^{-t(L_G+mu)})``.

    The constant is ``C = ||exp(-t(L - 2 mu_-))||_{1,1}^(1/2)``, the bound on
    the first Cauchy-Schwarz factor; hitting probabilities and the
    equilibrium potential are those of the unperturbed process.
    """
    if not pert.admissible_flag:
        raise InadmissiblePerturbation("perturbed bound requires c_alpha(mu_-) < 1/2")
    if not t > 0:
        raise NegativeTime(f"t must be > 0, got {t}")
    B = vertex_set(B, system.n)
    A = vertex_set(A, system.n)
    full = _with_potential(system, pert.plus - pert.minus)
    lhs = operator_norm(semigroup_difference(full, B, t), system.m, rows=A)
    C = math.sqrt(l1_norm(semigroup_matrix(_with_potential(system, -2 * pert.minus), t), system.m))
    if A:
        hit = hitting_probability_exact(system, B, t)
        eq = equilibrium_potential(system, B)
        rhs_prob = math.sqrt(hit[list(A)].max())
        rhs_eq = math.exp(t / 2) * math.sqrt(eq.e_B[list(A)].max())
    else:
        rhs_prob = rhs_eq = 0.0
    passed = lhs <= C * rhs_prob + SLACK and rhs_prob <= rhs_eq + SLACK
    return PerturbedBoundCheck(float(t), A, B, lhs, C, rhs_prob, rhs_eq, passed)


def perturbed_persson(system, pert: Perturbation, exhaustion, *, override=False, workers=None) -> PerssonSweep:
    """Persson sweep of ``L + mu`` along ``exhaustion``."""
    return persson_sweep(perturbed_system(system, pert, override=override), exhaustion, workers=workers)


def truncation_resolvent_gaps(system, pert: Perturbation, levels):
    """``||(S'_k + E)^{-1} - (S' + E)^{-1}||`` for the truncations ``min(mu_-, k)``.

    ``E`` is chosen so that ``S' + E >= 1``.  The gaps vanish once a level
    reaches ``max(mu_-)``.
    """
    target = _with_potential(system, pert.plus - pert.minus)
    low = bottom_of_spectrum(target.S, 1).eigenvalues[0]
    shift = 1.0 + max(0.0, -low)
    n = system.n
    ref = np.linalg.inv(target.S.toarray() + shift * np.eye(n))
    gaps = []
    for k in levels:
        trunc = _with_potential(system, pert.plus - np.minimum(pert.minus, k))
        R = np.linalg.inv(trunc.S.toarray() + shift * np.eye(n))
        gaps.append(float(np.linalg.norm(R - ref, 2)))
    return gaps
