"""
Internal graph with boundary vertices and the matrices derived from it.

A :class:`SymmetricDigraph` stores a finite, connected, simple graph ``G0``
together with an ordered boundary set.  Every boundary vertex implicitly
carries one semi-infinite tail; tails are never materialized, they only
enter through the tailed degree ``d~(u) = d(u) + 1`` on the boundary.

Arc convention
--------------
Edge ``k = (u, v)`` (input order) produces arc ``2k = u -> v`` and arc
``2k + 1 = v -> u``.  The inverse of arc ``a`` is therefore ``a ^ 1``.  All
arc-indexed vectors in the package use this ordering.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from gwalk.errors import GraphError

__all__ = [
    "SymmetricDigraph",
    "VertexMatrixBundle",
    "BipartitePartition",
    "build_graph",
    "matrices",
    "bipartite_partition",
    "flat_arc",
    "flat_vertex",
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "random_connected_graph",
    "load_graph_json",
    "graph_to_json",
    "parse_graph_source",
]


@dataclass(frozen=True)
class SymmetricDigraph:
    """
    Connected simple graph with an ordered boundary set.

    Attributes
    ----------
    n_vertices : int
        Number of vertices ``N``; vertices are ``0..N-1``.
    edges : tuple of (int, int)
        Undirected edges in input order.  Fixes the arc ordering.
    boundary : tuple of int
        Tail-attachment vertices ``u_1..u_r``.  Fixes the row/column order
        of scattering matrices and the indexing of inflow vectors.
    """

    n_vertices: int
    edges: tuple
    boundary: tuple

    @property
    def n_arcs(self) -> int:
        return 2 * len(self.edges)

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)

    @cached_property
    def origin(self) -> np.ndarray:
        e = np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)
        return np.ascontiguousarray(e.reshape(-1))

    @cached_property
    def terminus(self) -> np.ndarray:
        e = np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)
        return np.ascontiguousarray(e[:, ::-1].reshape(-1))

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.arange(self.n_arcs, dtype=np.intp) ^ 1

    @cached_property
    def degree(self) -> np.ndarray:
        return np.bincount(self.origin, minlength=self.n_vertices).astype(float)

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[list(self.boundary)] = True
        return mask

    @cached_property
    def tailed_degree(self) -> np.ndarray:
        return self.degree + self.boundary_mask

    @cached_property
    def interior(self) -> np.ndarray:
        """Vertices without a tail, in increasing order."""
        return np.flatnonzero(~self.boundary_mask)

    def arc(self, a: int) -> tuple:
        return int(self.origin[a]), int(self.terminus[a])

    def embed_boundary(self, values: Sequence[complex]) -> np.ndarray:
        """Lift a boundary-indexed vector to a vertex vector (zero elsewhere)."""
        values = np.asarray(values, dtype=complex).reshape(-1)
        if values.shape[0] != self.n_boundary:
            raise GraphError(
                f"expected {self.n_boundary} boundary amplitudes, got {values.shape[0]}"
            )
        out = np.zeros(self.n_vertices, dtype=complex)
        out[list(self.boundary)] = values
        return out

    def restrict_boundary(self, f: np.ndarray) -> np.ndarray:
        return np.asarray(f)[list(self.boundary)]

    def in_sum(self, psi: np.ndarray) -> np.ndarray:
        """``f(u) = sum over arcs a with t(a) = u of psi(a)``."""
        psi = np.asarray(psi)
        out = np.zeros(self.n_vertices, dtype=np.result_type(psi, float))
        np.add.at(out, self.terminus, psi)
        return out

    def has_boundary_leaf(self) -> bool:
        return bool(np.any(self.degree[list(self.boundary)] == 1))


@dataclass(frozen=True)
class VertexMatrixBundle:
    """Dense vertex-space matrices of ``G0``."""

    adjacency: np.ndarray
    degree: np.ndarray
    boundary_projection: np.ndarray
    transition: np.ndarray
    tailed_degree: np.ndarray


@dataclass(frozen=True)
class BipartitePartition:
    """Two-colouring ``(X, Y)`` with vertex sign ``+1`` on X and ``-1`` on Y."""

    X: tuple
    Y: tuple
    sign: np.ndarray

    def arc_sign(self, g: SymmetricDigraph) -> np.ndarray:
        # arc sign follows its terminus
        return self.sign[g.terminus]


def _check_connected(n: int, adj: list) -> bool:
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == n


def build_graph(n: int, edges: Iterable, boundary: Iterable) -> SymmetricDigraph:
    """
    Validate and build a :class:`SymmetricDigraph`.

    Parameters
    ----------
    n : int
        Vertex count.
    edges : iterable of pairs
        Undirected edges ``(u, v)``; order fixes arc numbering.
    boundary : iterable of int
        Ordered boundary vertices.

    Raises
    ------
    GraphError
        On self-loops, duplicate edges, out-of-range indices, a repeated or
        empty boundary, or a disconnected graph.
    """
    n = int(n)
    if n < 1:
        raise GraphError(f"vertex count must be positive, got {n}")
    clean = []
    seen = set()
    adj = [[] for _ in range(n)]
    for pair in edges:
        if len(pair) != 2:
            raise GraphError(f"edge must be a vertex pair, got {pair!r}")
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for {n} vertices")
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"duplicate edge {key}")
        seen.add(key)
        clean.append((u, v))
        adj[u].append(v)
        adj[v].append(u)

    bnd = tuple(int(b) for b in boundary)
    if not 1 <= len(bnd) <= n:
        raise GraphError(f"boundary size must be in [1, {n}], got {len(bnd)}")
    if len(set(bnd)) != len(bnd):
        raise GraphError(f"boundary vertices repeated: {bnd}")
    for b in bnd:
        if not 0 <= b < n:
            raise GraphError(f"boundary vertex {b} out of range")
    if not _check_connected(n, adj):
        raise GraphError("graph is not connected")
    return SymmetricDigraph(n, tuple(clean), bnd)


def matrices(g: SymmetricDigraph) -> VertexMatrixBundle:
    n = g.n_vertices
    M = np.zeros((n, n))
    for u, v in g.edges:
        M[u, v] = M[v, u] = 1.0
    d = g.degree
    Pi = np.diag(g.boundary_mask.astype(float))
    return VertexMatrixBundle(
        adjacency=M,
        degree=np.diag(d),
        boundary_projection=Pi,
        transition=M / d[:, None],
        tailed_degree=np.diag(d) + Pi,
    )


def bipartite_partition(g: SymmetricDigraph) -> Optional[BipartitePartition]:
    """BFS two-colouring; ``None`` when the graph has an odd cycle."""
    adj = [[] for _ in range(g.n_vertices)]
    for u, v in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    colour = [-1] * g.n_vertices
    colour[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if colour[v] < 0:
                colour[v] = 1 - colour[u]
                queue.append(v)
            elif colour[v] == colour[u]:
                return None
    sign = np.array([1.0 if c == 0 else -1.0 for c in colour])
    X = tuple(u for u in range(g.n_vertices) if colour[u] == 0)
    Y = tuple(u for u in range(g.n_vertices) if colour[u] == 1)
    return BipartitePartition(X, Y, sign)


def _require_partition(g, partition):
    if partition is None:
        partition = bipartite_partition(g)
    if partition is None:
        raise GraphError("flat operation requested on a non-bipartite graph")
    return partition


def flat_arc(g: SymmetricDigraph, psi, partition=None) -> np.ndarray:
    """Flip the sign of ``psi(a)`` on arcs whose terminus lies in Y."""
    partition = _require_partition(g, partition)
    return partition.arc_sign(g) * np.asarray(psi)


def flat_vertex(g: SymmetricDigraph, f, partition=None) -> np.ndarray:
    partition = _require_partition(g, partition)
    return partition.sign * np.asarray(f)


# builtin families -----------------------------------------------------------

def complete_graph(n: int, ell: int) -> SymmetricDigraph:
    """``K_n`` with boundary ``[0, .., ell-1]``."""
    return build_graph(n, itertools.combinations(range(n), 2), range(ell))


def cycle_graph(n: int, ell: int) -> SymmetricDigraph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)], range(ell))


def path_graph(n: int, ell: int) -> SymmetricDigraph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)], range(ell))


def random_connected_graph(
    rng: np.random.Generator,
    n: int,
    p_extra: float = 0.3,
    bipartite: Optional[bool] = None,
    n_boundary: Optional[int] = None,
) -> SymmetricDigraph:
    """
    Random connected simple graph: a random tree plus extra edges.

    Parameters
    ----------
    rng : numpy.random.Generator
    n : int
        Vertex count (at least 2).
    p_extra : float
        Probability of adding each admissible non-tree edge.
    bipartite : bool, optional
        ``True`` keeps the tree colouring (only cross edges are added);
        ``False`` forces at least one odd cycle (needs ``n >= 3``);
        ``None`` imposes nothing.
    n_boundary : int, optional
        Boundary size; drawn uniformly from ``1..n`` when omitted.  The
        boundary is a random ordered subset.
    """
    if n < 2:
        raise GraphError("random graphs need at least 2 vertices")
    if bipartite is False and n < 3:
        raise GraphError("a non-bipartite simple graph needs at least 3 vertices")
    perm = rng.permutation(n)
    edges = []
    depth = {int(perm[0]): 0}
    for k in range(1, n):
        parent = int(perm[rng.integers(0, k)])
        child = int(perm[k])
        edges.append((parent, child))
        depth[child] = depth[parent] + 1
    present = {(min(e), max(e)) for e in edges}
    same_side = []
    for u, v in itertools.combinations(range(n), 2):
        if (u, v) in present:
            continue
        if (depth[u] - depth[v]) % 2 == 0:
            same_side.append((u, v))
            if bipartite:
                continue
        if rng.random() < p_extra:
            edges.append((u, v))
            present.add((u, v))
    if bipartite is False and not any((depth[u] - depth[v]) % 2 == 0 for u, v in edges):
        edges.append(same_side[int(rng.integers(0, len(same_side)))])
    r = int(rng.integers(1, n + 1)) if n_boundary is None else int(n_boundary)
    boundary = [int(b) for b in rng.permutation(n)[:r]]
    return build_graph(n, edges, boundary)


_BUILTINS = {"complete": complete_graph, "cycle": cycle_graph, "path": path_graph}


def load_graph_json(path) -> SymmetricDigraph:
    """Read ``{"vertices": N, "edges": [[u, v], ...], "boundary": [...]}``."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        return build_graph(data["vertices"], data["edges"], data["boundary"])
    except KeyError as exc:
        raise GraphError(f"graph JSON missing key {exc}") from None


def graph_to_json(g: SymmetricDigraph) -> dict:
    return {
        "vertices": g.n_vertices,
        "edges": [list(e) for e in g.edges],
        "boundary": list(g.boundary),
    }


def parse_graph_source(source: str) -> SymmetricDigraph:
    """
    Resolve a CLI graph argument.

    Accepts ``complete:N:L``, ``cycle:N:L``, ``path:N:L`` or a path to a
    graph JSON file.
    """
    head, _, rest = source.partition(":")
    if head in _BUILTINS and rest:
        try:
            n_str, ell_str = rest.split(":")
            n, ell = int(n_str), int(ell_str)
        except ValueError:
            raise GraphError(f"builtin graph spec must be {head}:N:L, got {source!r}") from None
        return _BUILTINS[head](n, ell)
    p = Path(source)
    if not p.is_file():
        raise GraphError(f"graph file not found: {source}")
    try:
        return load_graph_json(p)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid graph JSON {source}: {exc}") from None
