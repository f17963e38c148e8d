"""Graph construction, ingestion, and shift operators.

Graphs are plain edge lists; the shift operator wraps a sparse matrix
(normalized adjacency or normalized Laplacian) and is applied matrix-free
at O(E) cost per product.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    CsvParseError,
    DegenerateDistanceError,
    DimensionError,
    ParameterError,
    ZeroDegreeError,
    ZeroNormError,
)

NORMALIZED_ADJACENCY = "normalized-adjacency"
NORMALIZED_LAPLACIAN = "normalized-laplacian"
CUSTOM = "custom"

# Spectral radius below this fraction of the max row sum is treated as
# nilpotent and triggers the row-sum normalization fallback.
_NILPOTENT_REL_TOL = 1e-12


@dataclass(frozen=True)
class Graph:
    """Weighted graph as an edge list.

    Edges are (source, target, weight) with indices in [0, n). Undirected
    graphs store both orientations of every edge.
    """

    n: int
    edges: tuple
    directed: bool

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"node count must be positive, got {self.n}")
        object.__setattr__(self, "edges", tuple((int(i), int(j), float(w)) for i, j, w in self.edges))
        seen = {}
        for i, j, w in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ParameterError(f"edge ({i},{j}) out of range for n={self.n}")
            if not math.isfinite(w):
                raise ParameterError(f"edge ({i},{j}) has non-finite weight {w}")
            seen[(i, j)] = w
        if not self.directed:
            for (i, j), w in seen.items():
                if seen.get((j, i)) != w:
                    raise ParameterError(
                        f"undirected graph is missing the reverse of edge ({i},{j},{w})"
                    )

    @property
    def edge_count(self) -> int:
        """Number of stored directed arcs (undirected edges count twice)."""
        return len(self.edges)

    def adjacency(self) -> sp.csr_array:
        """Sparse adjacency with A[i, j] = weight of edge i -> j."""
        if not self.edges:
            return sp.csr_array((self.n, self.n))
        rows = [e[0] for e in self.edges]
        cols = [e[1] for e in self.edges]
        vals = [e[2] for e in self.edges]
        return sp.csr_array(sp.coo_array((vals, (rows, cols)), shape=(self.n, self.n)))


@dataclass(frozen=True)
class ShiftOperator:
    """A graph shift operator: a real matrix applied matrix-free.

    spectral_norm is the constant the raw matrix was divided by
    (1.0 when no scaling was applied); norm_fallback flags the nilpotent
    row-sum fallback.
    """

    kind: str
    matrix: sp.csr_array
    spectral_norm: float
    norm_fallback: bool = False

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def build_er_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi graph: each unordered pair linked independently with probability p."""
    if n < 2:
        raise ParameterError(f"need at least 2 nodes, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"link probability must be in [0,1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    linked = rng.random(len(iu)) < p
    edges = []
    for i, j in zip(iu[linked], ju[linked]):
        edges.append((int(i), int(j), 1.0))
        edges.append((int(j), int(i), 1.0))
    return Graph(n=n, edges=tuple(edges), directed=False)


def build_knn_directed(coords, k: int) -> Graph:
    """Directed k-nearest-neighbor graph with Gaussian-kernel weights.

    Each node gets directed edges to its k nearest nodes. The edge weight
    is exp(-d^2) normalized by the square root of the product of the two
    endpoints' neighbor-set exponential sums; distance ties are broken by
    lower node index.
    """
    pts = np.asarray(coords, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ParameterError("coords must be an (n, 2) array")
    n = pts.shape[0]
    if not 1 <= k < n:
        raise ParameterError(f"need 1 <= k < n, got k={k}, n={n}")
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    off = dist[~np.eye(n, dtype=bool)]
    if np.min(off) == 0.0:
        raise DegenerateDistanceError("duplicate coordinates produce zero distance")

    neighbors = []
    for i in range(n):
        order = np.lexsort((np.arange(n), dist[i]))
        neighbors.append([int(j) for j in order if j != i][:k])
    sums = np.array([np.sum(np.exp(-dist[i, neighbors[i]] ** 2)) for i in range(n)])

    edges = []
    for i in range(n):
        for j in neighbors[i]:
            w = math.exp(-dist[i, j] ** 2) / math.sqrt(sums[i] * sums[j])
            edges.append((i, j, w))
    return Graph(n=n, edges=tuple(edges), directed=True)


def symmetrize_max(graph: Graph) -> Graph:
    """Undirected version of a graph, keeping the larger weight of each direction."""
    best = {}
    for i, j, w in graph.edges:
        key = (min(i, j), max(i, j))
        best[key] = max(best.get(key, 0.0), w)
    edges = []
    for (i, j), w in sorted(best.items()):
        edges.append((i, j, w))
        edges.append((j, i, w))
    return Graph(n=graph.n, edges=tuple(edges), directed=False)


def _spectral_radius(a: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(a)))) if a.size else 0.0


def normalize(graph: Graph, kind: str) -> ShiftOperator:
    """Build the normalized shift operator of a graph.

    normalized-adjacency divides A by its spectral radius (falling back to
    the max absolute row sum for nilpotent A); normalized-laplacian builds
    D^{-1/2} (D - A) D^{-1/2} and requires an undirected graph with no
    isolated nodes.
    """
    a = graph.adjacency().toarray()
    if kind == NORMALIZED_ADJACENCY:
        radius = _spectral_radius(a)
        row_sum = float(np.max(np.sum(np.abs(a), axis=1))) if a.size else 0.0
        fallback = radius <= _NILPOTENT_REL_TOL * max(row_sum, 1.0)
        norm = row_sum if fallback else radius
        if norm <= 0.0:
            raise ZeroNormError("adjacency matrix is zero; nothing to normalize")
        return ShiftOperator(
            kind=kind,
            matrix=sp.csr_array(a / norm),
            spectral_norm=norm,
            norm_fallback=fallback,
        )
    if kind == NORMALIZED_LAPLACIAN:
        if graph.directed:
            raise ParameterError("normalized Laplacian requires an undirected graph")
        deg = np.sum(a, axis=1)
        if np.any(deg <= 0.0):
            bad = int(np.argmin(deg))
            raise ZeroDegreeError(f"node {bad} has zero degree")
        dinv = 1.0 / np.sqrt(deg)
        lap = np.diag(deg) - a
        s = (dinv[:, None] * lap) * dinv[None, :]
        s = (s + s.T) / 2.0
        return ShiftOperator(kind=kind, matrix=sp.csr_array(s), spectral_norm=1.0)
    raise ParameterError(f"unknown shift kind {kind!r}")


def custom_operator(matrix) -> ShiftOperator:
    """Wrap an arbitrary real square matrix as a shift operator."""
    m = np.asarray(matrix, dtype=float) if not sp.issparse(matrix) else matrix
    if sp.issparse(m):
        m = sp.csr_array(m)
        if m.shape[0] != m.shape[1]:
            raise ParameterError("shift operator must be square")
    else:
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError("shift operator must be square")
        m = sp.csr_array(m)
    return ShiftOperator(kind=CUSTOM, matrix=m, spectral_norm=1.0)


def shift_apply(op: ShiftOperator, x: np.ndarray) -> np.ndarray:
    """S @ x without forming dense powers; O(E) per call."""
    x = np.asarray(x)
    if x.shape != (op.n,):
        raise DimensionError(f"signal length {x.shape} does not match n={op.n}")
    return op.matrix @ x


def shift_apply_transpose(op: ShiftOperator, x: np.ndarray) -> np.ndarray:
    """S.T @ x, used by the normal-equations CG fallback."""
    x = np.asarray(x)
    if x.shape != (op.n,):
        raise DimensionError(f"signal length {x.shape} does not match n={op.n}")
    return op.matrix.T @ x


def is_symmetric(op: ShiftOperator, tol: float = 1e-12) -> bool:
    d = op.matrix - op.matrix.T
    if d.nnz == 0:
        return True
    scale = max(float(abs(op.matrix).max()), 1.0)
    return float(abs(d).max()) <= tol * scale


def normality_defect(op: ShiftOperator) -> float:
    """Frobenius norm of S S^T - S^T S; zero iff the operator is normal.

    Recorded as a diagnostic only: nothing downstream requires normality.
    """
    a = op.dense()
    return float(np.linalg.norm(a @ a.T - a.T @ a))


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def graph_to_json(graph: Graph) -> str:
    payload = {
        "n": graph.n,
        "directed": graph.directed,
        "edges": [[i, j, w] for i, j, w in sorted(graph.edges)],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def graph_from_json(text: str) -> Graph:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CsvParseError(f"invalid graph JSON: {exc}") from exc
    for key in ("n", "directed", "edges"):
        if key not in payload:
            raise CsvParseError(f"graph JSON missing key {key!r}")
    edges = tuple((int(i), int(j), float(w)) for i, j, w in payload["edges"])
    return Graph(n=int(payload["n"]), edges=edges, directed=bool(payload["directed"]))


def read_edge_csv(path, directed: bool, one_based: bool = False) -> Graph:
    """Read a `src,dst,weight` edge list.

    Undirected input may list each edge once; the reverse orientation is
    added automatically. Conflicting duplicate weights are rejected.
    """
    offset = 1 if one_based else 0
    entries = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["src", "dst", "weight"]:
            raise CsvParseError("expected header 'src,dst,weight'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise CsvParseError(f"expected 3 fields, got {len(row)}", line=lineno)
            try:
                i, j, w = int(row[0]) - offset, int(row[1]) - offset, float(row[2])
            except ValueError as exc:
                raise CsvParseError(str(exc), line=lineno) from exc
            if i < 0 or j < 0:
                raise CsvParseError(f"negative index after offset: ({i},{j})", line=lineno)
            if entries.get((i, j), w) != w:
                raise CsvParseError(f"conflicting duplicate edge ({i},{j})", line=lineno)
            entries[(i, j)] = w
    if not entries:
        raise CsvParseError("edge list is empty")
    n = max(max(i, j) for i, j in entries) + 1
    if not directed:
        for (i, j), w in list(entries.items()):
            rev = entries.get((j, i))
            if rev is None:
                entries[(j, i)] = w
            elif rev != w:
                raise CsvParseError(f"asymmetric weights for undirected edge ({i},{j})")
    edges = tuple((i, j, w) for (i, j), w in sorted(entries.items()))
    return Graph(n=n, edges=edges, directed=directed)


def read_coords_csv(path, one_based: bool = False) -> np.ndarray:
    """Read an `id,x,y` coordinate table; ids must cover 0..n-1 after offset."""
    offset = 1 if one_based else 0
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["id", "x", "y"]:
            raise CsvParseError("expected header 'id,x,y'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise CsvParseError(f"expected 3 fields, got {len(row)}", line=lineno)
            try:
                idx = int(row[0]) - offset
                xy = (float(row[1]), float(row[2]))
            except ValueError as exc:
                raise CsvParseError(str(exc), line=lineno) from exc
            if idx in rows:
                raise CsvParseError(f"duplicate id {idx}", line=lineno)
            rows[idx] = xy
    n = len(rows)
    if n == 0:
        raise CsvParseError("coordinate table is empty")
    if sorted(rows) != list(range(n)):
        raise CsvParseError(f"ids must cover 0..{n - 1} exactly")
    return np.array([rows[i] for i in range(n)], dtype=float)
