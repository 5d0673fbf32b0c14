"""Small-world social network: geographic radius, homophily, random links."""

from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree


@dataclass(frozen=True)
class NetworkParams:
    phi: float = 500.0  # m
    rho: float = 0.10
    lambda_: float = 0.10

    def __post_init__(self):
        if not self.phi > 0:
            raise ValueError("phi must be positive")
        for name in ("rho", "lambda_"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name.rstrip('_')} must be in (0, 1], got {v}")


def _homophily_links(tree, xy, egos, financial, params, chunk=512) -> tuple[list, list]:
    """Each ego links to the ``ceil(rho * candidates)`` most similar agents
    within ``phi``.  Egos are queried in chunks to bound memory.
    """
    rows, cols = [], []
    egos = np.asarray(egos, dtype=np.int64)
    for start in range(0, egos.size, chunk):
        block = egos[start:start + chunk]
        if np.isfinite(params.phi):
            cands = tree.query_ball_point(xy[block], r=params.phi)
        else:
            cands = [range(len(xy))] * block.size
        for ego, cand in zip(block, cands):
            cand = np.asarray(cand, dtype=np.int64)
            cand = cand[cand != ego]
            if cand.size == 0:
                continue
            k = math.ceil(params.rho * cand.size)
            diff = np.abs(financial[cand] - financial[ego])
            keep = cand[np.lexsort((cand, diff))[:k]]  # most similar, index breaks ties
            rows.append(np.full(keep.size, ego, dtype=np.int64))
            cols.append(keep)
    return rows, cols


def _symmetric(n, rows, cols) -> sparse.csr_matrix:
    r = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    c = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    a = sparse.coo_matrix((np.ones(r.size), (r, c)), shape=(n, n)).tocsr()
    a = a + a.T
    a.data[:] = 1.0
    a.setdiag(0)
    a.eliminate_zeros()
    return a.tocsr()


def _random_links(adj, egos, pool_size, lam, rng) -> tuple[list, list]:
    deg = np.diff(adj.indptr)
    rows, cols = [], []
    for ego in egos:
        k = int(math.floor(lam * deg[ego]))
        if k == 0 or pool_size < 2:
            continue
        picks = rng.integers(0, pool_size - 1, size=k)
        picks = picks + (picks >= ego)  # uniform over everyone but the ego
        rows.append(np.full(k, ego, dtype=np.int64))
        cols.append(picks.astype(np.int64))
    return rows, cols


def build_network(xy, financial, params: NetworkParams = NetworkParams(),
                  seed: int | np.random.Generator = 0) -> sparse.csr_matrix:
    """Undirected adjacency over agents given their coordinates and financial index.

    1. candidates are the agents within ``phi`` metres of the ego;
    2. the ego links to the ``ceil(rho * candidates)`` with the closest
       financial index;
    3. ``floor(lambda * degree)`` extra links go to uniformly random agents.
    """
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    financial = np.asarray(financial, dtype=float)
    n = len(xy)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if n == 0:
        return sparse.csr_matrix((0, 0))
    rows, cols = _homophily_links(cKDTree(xy), xy, np.arange(n), financial, params)
    adj = _symmetric(n, rows, cols)
    r2, c2 = _random_links(adj, range(n), n, params.lambda_, rng)
    return _symmetric(n, rows + r2, cols + c2)


def remove_nodes(adj: sparse.csr_matrix, keep: np.ndarray) -> sparse.csr_matrix:
    """Drop every node not in the boolean mask ``keep`` and its incident edges."""
    idx = np.flatnonzero(keep)
    return adj[idx][:, idx].tocsr()


def add_nodes(adj: sparse.csr_matrix, xy, financial, new: np.ndarray,
              params: NetworkParams, rng: np.random.Generator) -> sparse.csr_matrix:
    """Wire the agents flagged in ``new`` (already appended to ``adj``'s index
    space) with the same three steps, searching candidates among all agents.
    """
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    n = len(xy)
    egos = np.flatnonzero(new)
    if egos.size == 0:
        return adj
    old = adj.shape[0]
    base = sparse.block_diag((adj, sparse.csr_matrix((n - old, n - old))), format="csr") \
        if n > old else adj
    rows, cols = _homophily_links(cKDTree(xy), xy, egos, np.asarray(financial, float), params)
    local = _symmetric(n, rows, cols)
    r2, c2 = _random_links(local, egos, n, params.lambda_, rng)
    out = base + _symmetric(n, rows + r2, cols + c2)
    out.data[:] = 1.0
    return out.tocsr()


def edge_set(adj: sparse.csr_matrix) -> set[tuple[int, int]]:
    coo = sparse.triu(adj, k=1).tocoo()
    return {(int(i), int(j)) for i, j in zip(coo.row, coo.col)}


def clustering_coefficient(adj: sparse.csr_matrix) -> float:
    """Average local clustering coefficient."""
    return float(nx.average_clustering(nx.from_scipy_sparse_array(adj)))


def random_reference_clustering(adj: sparse.csr_matrix, seed: int = 0) -> float:
    """Clustering of a uniform random graph with the same node and edge counts."""
    n = adj.shape[0]
    m = int(sparse.triu(adj, k=1).nnz)
    return float(nx.average_clustering(nx.gnm_random_graph(n, m, seed=seed)))
