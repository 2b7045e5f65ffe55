"""Weighted graphs (b, c, m) and the Dirichlet forms they carry.

A graph over the vertex set ``{0, ..., n-1}`` is given by symmetric edge
weights ``b(x, y) >= 0`` with ``b(x, x) = 0``, killing weights ``c(x) >= 0``
and a vertex measure ``m(x) > 0``.  The associated form is

    E(u, v) = 1/2 sum_{x,y} b(x,y) (u(x)-u(y)) (v(x)-v(y)) + sum_x c(x) u(x) v(x)

on ``l^2(X, m)`` and its generator is ``L = M^{-1} Q``.  All spectral work is
done on the unitarily equivalent symmetric matrix ``S = M^{-1/2} Q M^{-1/2}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import (
    DimensionMismatch,
    DuplicateVertex,
    EmptyComplement,
    IndexOutOfRange,
    NegativeWeight,
    NonPositiveMeasure,
    SelfLoop,
    ValidationError,
)

__all__ = [
    "WeightedGraph",
    "FormSystem",
    "RestrictedSystem",
    "vertex_set",
    "build_graph",
    "form_eval",
    "assemble",
    "restrict",
    "extend_by_zero",
    "hop_distances",
    "graph_to_dict",
    "graph_from_dict",
    "load_graph",
    "save_graph",
]


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _freeze_sparse(A):
    A = sp.csr_matrix(A)
    A.sort_indices()
    for arr in (A.data, A.indices, A.indptr):
        arr.flags.writeable = False
    return A


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable finite weighted graph ``(b, c, m)``.

    Use :func:`build_graph` rather than the constructor; it validates the
    input and symmetrizes the weights.
    """

    n: int
    weights: sp.csr_matrix
    kill: np.ndarray
    measure: np.ndarray

    def weight(self, x, y):
        return float(self.weights[x, y])

    @property
    def degree(self):
        """Weighted degree ``sum_y b(x, y)`` of every vertex."""
        return np.asarray(self.weights.sum(axis=1)).ravel()

    def edges(self):
        """Upper-triangle edge list ``[(x, y, b(x, y)), ...]`` with ``x < y``."""
        upper = sp.triu(self.weights, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        return [
            (int(upper.row[i]), int(upper.col[i]), float(upper.data[i]))
            for i in order
        ]

    def with_kill(self, kill):
        return build_graph(self.n, self.edges(), kill=kill, measure=self.measure)

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.kill, other.kill)
            and np.array_equal(self.measure, other.measure)
            and (self.weights != other.weights).nnz == 0
        )

    __hash__ = None


def vertex_set(members, n) -> tuple:
    """Validate a collection of vertex indices and return it as a sorted tuple."""
    if members is None:
        return ()
    members = [int(x) for x in members]
    if len(set(members)) != len(members):
        raise DuplicateVertex(f"duplicate vertices in {sorted(members)}")
    for x in members:
        if not 0 <= x < n:
            raise IndexOutOfRange(f"vertex {x} outside 0..{n - 1}")
    return tuple(sorted(members))


def _vector(values, n, name, default):
    if values is None:
        return np.full(n, default, dtype=float)
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise DimensionMismatch(f"{name} has shape {arr.shape}, expected ({n},)")
    return arr.copy()


def build_graph(n, edge_list=(), kill=None, measure=None) -> WeightedGraph:
    """Build a validated :class:`WeightedGraph`.

    Parameters
    ----------
    n : int
        Number of vertices.
    edge_list : iterable of (x, y, weight)
        Orientation is irrelevant; repeated pairs are summed.
    kill : array_like or float, optional
        Killing weights ``c`` (default 0).
    measure : array_like or float, optional
        Vertex measure ``m`` (default 1).
    """
    n = int(n)
    if n < 1:
        raise ValidationError("a graph needs at least one vertex")
    kill = _vector(kill, n, "kill", 0.0)
    measure = _vector(measure, n, "measure", 1.0)
    if not np.all(np.isfinite(measure)):
        raise NonPositiveMeasure("measure must be finite")
    if np.any(measure <= 0):
        raise NonPositiveMeasure(f"measure must be > 0, got min {measure.min()}")
    if not np.all(np.isfinite(kill)):
        raise ValidationError("kill weights must be finite")
    if np.any(kill < 0):
        raise NegativeWeight(f"kill weights must be >= 0, got min {kill.min()}")

    rows, cols, vals = [], [], []
    for x, y, w in edge_list:
        x, y, w = int(x), int(y), float(w)
        if not (0 <= x < n and 0 <= y < n):
            raise IndexOutOfRange(f"edge ({x}, {y}) outside 0..{n - 1}")
        if x == y:
            raise SelfLoop(f"self-loop at vertex {x}")
        if not np.isfinite(w):
            raise ValidationError(f"non-finite weight on edge ({x}, {y})")
        if w < 0:
            raise NegativeWeight(f"negative weight {w} on edge ({x}, {y})")
        rows.append(min(x, y))
        cols.append(max(x, y))
        vals.append(w)
    # coo -> csr sums duplicates
    upper = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    upper.eliminate_zeros()
    weights = upper + upper.T
    return WeightedGraph(n, _freeze_sparse(weights), _frozen(kill), _frozen(measure))


def form_eval(g: WeightedGraph, u, v) -> float:
    """Evaluate the Dirichlet form ``E(u, v)`` directly from the edge list."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (g.n,) or v.shape != (g.n,):
        raise DimensionMismatch(f"vectors must have length {g.n}")
    upper = sp.triu(g.weights, k=1).tocoo()
    du = u[upper.row] - u[upper.col]
    dv = v[upper.row] - v[upper.col]
    # each unordered pair appears twice in the symmetric sum, cancelling the 1/2
    return float(np.sum(upper.data * du * dv) + np.sum(g.kill * u * v))


class _SystemMixin:
    """Shared accessors for form-like systems carrying ``Q``, ``m`` and ``S``."""

    @property
    def n(self):
        return self.Q.shape[0]

    @property
    def M(self):
        return sp.diags(self.m, format="csr")

    def form(self, u, v=None):
        u = np.asarray(u, dtype=float)
        v = u if v is None else np.asarray(v, dtype=float)
        return float(u @ (self.Q @ v))

    def norm2(self, u):
        u = np.asarray(u, dtype=float)
        return float(np.sum(self.m * u * u))


def _symmetrize(Q, m):
    d = sp.diags(1.0 / np.sqrt(m))
    S = (d @ Q @ d).tocsr()
    # exact symmetry despite rounding in the scaling
    return _freeze_sparse((S + S.T) * 0.5)


@dataclass(frozen=True, eq=False)
class FormSystem(_SystemMixin):
    """Assembled form matrix ``Q``, measure ``m`` and symmetrized generator ``S``."""

    graph: WeightedGraph
    Q: sp.csr_matrix
    m: np.ndarray
    S: sp.csr_matrix

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


def assemble(g: WeightedGraph) -> FormSystem:
    """Assemble ``Q = diag(deg + c) - b`` and ``S = M^{-1/2} Q M^{-1/2}``."""
    Q = sp.diags(g.degree + g.kill) - g.weights
    Q = _freeze_sparse(Q)
    return FormSystem(g, Q, g.measure, _symmetrize(Q, g.measure))


@dataclass(frozen=True, eq=False)
class RestrictedSystem(_SystemMixin):
    """Dirichlet restriction of a system to ``U = X \\ B``.

    ``Q``, ``m`` and ``S`` are the principal blocks on ``U`` in local
    coordinates; ``kept[i]`` is the global index of local vertex ``i``.
    """

    parent: object
    removed: tuple
    kept: np.ndarray
    Q: sp.csr_matrix
    m: np.ndarray
    S: sp.csr_matrix

    Q_U = property(lambda self: self.Q)
    S_U = property(lambda self: self.S)
    M_U = property(lambda self: self.M)

    @property
    def n_global(self):
        return self.parent.n

    @property
    def root(self):
        return self.parent

    @property
    def graph(self):
        return self.parent.graph


def restrict(system, B) -> RestrictedSystem:
    """Restrict ``system`` to the complement of the vertex set ``B``.

    ``B`` is given in global coordinates.  Restricting an already restricted
    system removes the union of both sets from the common parent.
    """
    if isinstance(system, RestrictedSystem):
        B = set(vertex_set(B, system.n_global)) | set(system.removed)
        return restrict(system.parent, B)
    B = vertex_set(B, system.n)
    mask = np.ones(system.n, dtype=bool)
    mask[list(B)] = False
    kept = np.flatnonzero(mask)
    if kept.size == 0:
        raise EmptyComplement("cannot remove every vertex")
    Q = _freeze_sparse(system.Q[kept][:, kept])
    S = _freeze_sparse(system.S[kept][:, kept])
    kept.flags.writeable = False
    return RestrictedSystem(system, B, kept, Q, _frozen(system.m[kept]), S)


def extend_by_zero(rs, u_local) -> np.ndarray:
    """Embed a function on ``U`` into ``X`` by setting it to 0 on ``B``."""
    u_local = np.asarray(u_local, dtype=float)
    if u_local.shape != (len(rs.kept),):
        raise DimensionMismatch(
            f"expected a vector of length {len(rs.kept)}, got {u_local.shape}"
        )
    out = np.zeros(rs.n_global)
    out[rs.kept] = u_local
    return out


def hop_distances(g: WeightedGraph, source: int) -> np.ndarray:
    """Graph distance (number of hops) from ``source``; ``inf`` if unreachable."""
    vertex_set([source], g.n)
    pattern = (g.weights > 0).astype(float)
    return csgraph.shortest_path(pattern, unweighted=True, indices=source, directed=False)


# -- JSON file format -------------------------------------------------------


def graph_to_dict(g: WeightedGraph) -> dict:
    return {
        "vertices": [
            {"id": i, "m": float(g.measure[i]), "c": float(g.kill[i])} for i in range(g.n)
        ],
        "edges": [{"u": x, "v": y, "b": w} for x, y, w in g.edges()],
    }


def graph_from_dict(data: dict) -> WeightedGraph:
    """Build a graph from the ``{"vertices": [...], "edges": [...]}`` layout."""
    if not isinstance(data, dict) or "vertices" not in data:
        raise ValidationError("graph JSON needs a 'vertices' list")
    unknown = set(data) - {"vertices", "edges"}
    if unknown:
        raise ValidationError(f"unknown graph keys {sorted(unknown)}")
    verts = data["vertices"]
    n = len(verts)
    ids = [int(v["id"]) for v in verts]
    if sorted(ids) != list(range(n)):
        raise IndexOutOfRange("vertex ids must be exactly 0..n-1")
    kill = np.zeros(n)
    measure = np.ones(n)
    for v in verts:
        extra = set(v) - {"id", "m", "c"}
        if extra:
            raise ValidationError(f"unknown vertex keys {sorted(extra)}")
        kill[int(v["id"])] = v.get("c", 0.0)
        measure[int(v["id"])] = v.get("m", 1.0)
    edges = []
    for e in data.get("edges", []):
        extra = set(e) - {"u", "v", "b"}
        if extra:
            raise ValidationError(f"unknown edge keys {sorted(extra)}")
        edges.append((e["u"], e["v"], e["b"]))
    return build_graph(n, edges, kill=kill, measure=measure)


def load_graph(path) -> WeightedGraph:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed graph JSON: {exc}") from exc
    return graph_from_dict(data)


def save_graph(g: WeightedGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(g), indent=1))
