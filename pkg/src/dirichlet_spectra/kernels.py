"""Graph builders: discretized jump kernels, lattices and confining potentials.

Continuum jump forms

    E(u, v) = int int_{x != y} (u(x)-u(y)) (v(x)-v(y)) j(x, y) dx dy

are sampled on a regular grid with quadrature weight ``h**d`` per
integration variable.  Every pair of grid points is coupled, the diagonal is
left out, and the result is an ordinary weighted graph, so the rest of the
package applies to it unchanged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    AsymmetricKernel,
    DisconnectedFromCenter,
    InvalidAlpha,
    LowerBoundViolated,
    ValidationError,
)
from .graphs import WeightedGraph, build_graph, hop_distances

__all__ = [
    "GridSpec",
    "KernelSpec",
    "fractional_kernel",
    "table_kernel",
    "fractional_graph",
    "general_jump_graph",
    "lower_bound_ratio",
    "lattice_path",
    "lattice_grid",
    "confining_potential",
    "random_graph",
    "kernel_from_config",
]


@dataclass(frozen=True)
class GridSpec:
    """Regular grid with ``extent[i]`` points along axis ``i`` and spacing ``h``."""

    dim: int
    extent: tuple
    h: float = 1.0
    origin: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "extent", tuple(int(e) for e in self.extent))
        if self.dim < 1 or len(self.extent) != self.dim:
            raise ValidationError("extent must have one entry per dimension")
        if any(e < 1 for e in self.extent):
            raise ValidationError("every axis needs at least one point")
        if not self.h > 0:
            raise ValidationError(f"spacing must be positive, got {self.h}")
        if self.origin is not None and len(self.origin) != self.dim:
            raise ValidationError("origin must have one entry per dimension")

    @property
    def size(self):
        return int(np.prod(self.extent))

    def points(self):
        """Grid coordinates, shape ``(size, dim)``, in C (row-major) order."""
        axes = [np.arange(e) * self.h for e in self.extent]
        pts = np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, self.dim)
        if self.origin is not None:
            pts = pts + np.asarray(self.origin, dtype=float)
        return pts


def _check_alpha(alpha):
    if not 0 < alpha < 2:
        raise InvalidAlpha(f"alpha must lie in (0, 2), got {alpha}")


def fractional_kernel(dim, alpha):
    """The alpha-stable kernel ``|x-y|^(-d-alpha)`` as a vectorized callable."""
    _check_alpha(alpha)
    expo = -(dim + alpha)

    def j(x, y):
        return np.linalg.norm(x - y, axis=-1) ** expo

    return j


def table_kernel(n_points, pairs):
    """Kernel given by an explicit table ``[(i, k, value), ...]`` of grid indices.

    Pairs not listed evaluate to 0.  The table is not symmetrized, so an
    inconsistent table is caught by :func:`general_jump_graph`.
    """
    table = np.zeros((n_points, n_points))
    for i, k, val in pairs:
        table[int(i), int(k)] = float(val)
    return table


@dataclass(frozen=True)
class KernelSpec:
    """Jump kernel together with the constants of the alpha-stable lower bound.

    ``kernel`` is either a callable ``j(x, y)`` acting on coordinate arrays of
    shape ``(k, d)`` or a dense ``(size, size)`` table indexed by grid point.
    """

    alpha: float
    lower_const: float
    kernel: Callable | np.ndarray

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.lower_const < 0:
            raise ValidationError("lower_const must be >= 0")


def _pair_values(grid, kernel):
    pts = grid.points()
    i, k = np.triu_indices(len(pts), k=1)
    if callable(kernel):
        fwd = np.asarray(kernel(pts[i], pts[k]), dtype=float)
        bwd = np.asarray(kernel(pts[k], pts[i]), dtype=float)
    else:
        table = np.asarray(kernel, dtype=float)
        if table.shape != (len(pts), len(pts)):
            raise ValidationError(f"kernel table must be {len(pts)}x{len(pts)}")
        fwd, bwd = table[i, k], table[k, i]
    dist = np.linalg.norm(pts[i] - pts[k], axis=-1)
    return i, k, fwd, bwd, dist


def lower_bound_ratio(grid: GridSpec, spec: KernelSpec):
    """Worst ratio ``j(x,y) / (c |x-y|^(-d-alpha))`` over all sampled pairs.

    Returns ``(ratio, (x, y))`` with the grid indices of the worst pair, or
    ``(inf, None)`` if there are no pairs or ``lower_const == 0``.
    """
    i, k, fwd, _, dist = _pair_values(grid, spec.kernel)
    if spec.lower_const == 0 or i.size == 0:
        return np.inf, None
    ratio = fwd / (spec.lower_const * dist ** (-(grid.dim + spec.alpha)))
    worst = int(np.argmin(ratio))
    return float(ratio[worst]), (int(i[worst]), int(k[worst]))


def _jump_graph(grid, i, k, jvals):
    hd = grid.h**grid.dim
    weights = (hd * hd) * jvals
    return build_graph(
        grid.size, zip(i, k, weights), kill=0.0, measure=np.full(grid.size, hd)
    )


def general_jump_graph(grid: GridSpec, spec: KernelSpec, *, return_ratio=False):
    """Discretize a symmetric jump kernel on ``grid``.

    Edge weights are ``b(x, y) = h**(2d) j(x, y)`` and the measure is
    ``m = h**d``.  When ``spec.lower_const > 0`` the bound
    ``j >= lower_const |x-y|^(-d-alpha)`` is certified on every pair.

    Raises
    ------
    AsymmetricKernel
        If ``j(x, y) != j(y, x)`` on some sampled pair.
    LowerBoundViolated
        If the lower bound fails; ``witness`` holds the offending pair.
    """
    i, k, fwd, bwd, _ = _pair_values(grid, spec.kernel)
    if np.any(~np.isfinite(fwd)) or np.any(fwd < 0):
        raise ValidationError("kernel values must be finite and nonnegative")
    bad = np.flatnonzero(fwd != bwd)
    if bad.size:
        p = bad[0]
        raise AsymmetricKernel(f"j({i[p]},{k[p]}) = {fwd[p]} but j({k[p]},{i[p]}) = {bwd[p]}")
    ratio, witness = lower_bound_ratio(grid, spec)
    if ratio < 1:
        raise LowerBoundViolated(
            f"lower bound fails at pair {witness} (ratio {ratio:.6g})",
            witness=witness,
            ratio=ratio,
        )
    g = _jump_graph(grid, i, k, fwd)
    return (g, ratio) if return_ratio else g


def fractional_graph(grid: GridSpec, alpha: float) -> WeightedGraph:
    """Discretized fractional Laplacian ``b(x, y) = h**(2d) |x-y|^(-d-alpha)``."""
    _check_alpha(alpha)
    i, k, fwd, _, _ = _pair_values(grid, fractional_kernel(grid.dim, alpha))
    return _jump_graph(grid, i, k, fwd)


def lattice_path(n: int, weight: float = 1.0) -> WeightedGraph:
    """Path ``0 - 1 - ... - n-1`` with constant edge weight, ``m = 1``, ``c = 0``."""
    if n < 1:
        raise ValidationError("path needs n >= 1")
    if not weight > 0:
        raise ValidationError("weight must be positive")
    return build_graph(n, [(x, x + 1, weight) for x in range(n - 1)])


def lattice_grid(shape, weight: float = 1.0) -> WeightedGraph:
    """Nearest-neighbour lattice box in ``len(shape)`` dimensions."""
    shape = tuple(int(s) for s in shape)
    idx = np.arange(int(np.prod(shape))).reshape(shape)
    edges = []
    for axis in range(len(shape)):
        a = np.moveaxis(idx, axis, 0)
        edges += [(int(x), int(y), weight) for x, y in zip(a[:-1].ravel(), a[1:].ravel())]
    return build_graph(idx.size, edges)


def confining_potential(g: WeightedGraph, center: int, p: float) -> WeightedGraph:
    """Copy of ``g`` with ``dist(x, center)**p`` added to the killing weights.

    Distances are hop counts.  Vertices unreachable from ``center`` would get
    an infinite potential, which is refused.
    """
    if not p > 0:
        raise ValidationError(f"growth exponent must be positive, got {p}")
    dist = hop_distances(g, center)
    if not np.all(np.isfinite(dist)):
        far = np.flatnonzero(~np.isfinite(dist))
        raise DisconnectedFromCenter(f"vertices {far[:5].tolist()} unreachable from {center}")
    return g.with_kill(g.kill + dist**p)


def random_graph(
    rng: np.random.Generator,
    n: int,
    density: float = 0.3,
    kill_prob: float = 0.3,
    unit_measure: bool = False,
    connected: bool = True,
) -> WeightedGraph:
    """Random weighted graph for property tests and demos.

    With ``connected=True`` a random spanning path is added first so that
    every vertex is reachable.
    """
    edges = []
    if connected and n > 1:
        perm = rng.permutation(n)
        edges += [(perm[a], perm[a + 1], rng.uniform(0.1, 2.0)) for a in range(n - 1)]
    for x in range(n):
        for y in range(x + 1, n):
            if rng.random() < density:
                edges.append((x, y, rng.uniform(0.0, 2.0)))
    kill = np.where(rng.random(n) < kill_prob, rng.uniform(0.0, 1.0, n), 0.0)
    measure = np.ones(n) if unit_measure else rng.uniform(0.2, 3.0, n)
    return build_graph(n, edges, kill=kill, measure=measure)


def kernel_from_config(grid_cfg: dict, kernel_cfg: dict) -> WeightedGraph:
    """Build a jump graph from the JSON grid/kernel configuration blocks.

    ``grid_cfg``: ``{"dim": d, "extent": [...], "h": ...}``.
    ``kernel_cfg``: ``{"type": "fractional", "alpha": ...}`` or
    ``{"type": "table", "pairs": [[i, k, j], ...], "alpha": ..., "lower_const": ...}``.
    """
    extra = set(grid_cfg) - {"dim", "extent", "h", "origin"}
    if extra:
        raise ValidationError(f"unknown grid keys {sorted(extra)}")
    grid = GridSpec(
        int(grid_cfg["dim"]), tuple(grid_cfg["extent"]), float(grid_cfg.get("h", 1.0)),
        tuple(grid_cfg["origin"]) if "origin" in grid_cfg else None,
    )
    kind = kernel_cfg.get("type")
    if kind == "fractional":
        extra = set(kernel_cfg) - {"type", "alpha"}
        if extra:
            raise ValidationError(f"unknown kernel keys {sorted(extra)}")
        return fractional_graph(grid, float(kernel_cfg["alpha"]))
    if kind == "table":
        extra = set(kernel_cfg) - {"type", "pairs", "alpha", "lower_const"}
        if extra:
            raise ValidationError(f"unknown kernel keys {sorted(extra)}")
        spec = KernelSpec(
            float(kernel_cfg.get("alpha", 1.0)),
            float(kernel_cfg.get("lower_const", 0.0)),
            table_kernel(grid.size, kernel_cfg.get("pairs", [])),
        )
        return general_jump_graph(grid, spec)
    raise ValidationError(f"unknown kernel type {kind!r}")
