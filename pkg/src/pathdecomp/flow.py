"""Unit-capacity max-flow queries backed by scipy's push-relabel solver."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import maximum_flow


def capacity_matrix(n: int, arcs: Iterable[tuple[int, int]]) -> sp.csr_matrix:
    """Sparse capacity matrix with one unit per arc; parallel arcs add up."""
    arcs = list(arcs)
    if not arcs:
        return sp.csr_matrix((n, n), dtype=np.int32)
    tails = np.fromiter((a for a, _ in arcs), dtype=np.int64, count=len(arcs))
    heads = np.fromiter((b for _, b in arcs), dtype=np.int64, count=len(arcs))
    data = np.ones(len(arcs), dtype=np.int32)
    mat = sp.coo_matrix((data, (tails, heads)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def undirected_arcs(pairs: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    out = []
    for u, v in pairs:
        out.append((u, v))
        out.append((v, u))
    return out


def flow_value(cap: sp.csr_matrix, s: int, t: int) -> int:
    if s == t:
        raise ValueError("source equals sink")
    return int(maximum_flow(cap, s, t).flow_value)


def rooted_connectivity(cap: sp.csr_matrix, root: int, *, inbound: bool = False) -> np.ndarray:
    """lambda(root -> v) for every v (or lambda(v -> root) with ``inbound``).

    The entry for the root itself is set to a large sentinel.
    """
    n = cap.shape[0]
    mat = cap.T.tocsr() if inbound else cap
    if inbound:
        mat.sort_indices()
    out = np.full(n, np.iinfo(np.int32).max, dtype=np.int64)
    for v in range(n):
        if v != root:
            out[v] = int(maximum_flow(mat, root, v).flow_value)
    return out


def sink_side(cap: sp.csr_matrix, s: int, t: int) -> tuple[int, set[int]]:
    """Max-flow value and the sink side of a minimum s-t cut.

    The returned set is the complement of the vertices reachable from ``s``
    in the residual network, so it contains ``t`` and has exactly ``value``
    arcs entering it.
    """
    res = maximum_flow(cap, s, t)
    residual = (cap - res.flow).tocsr()
    residual.eliminate_zeros()
    n = cap.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[s] = True
    queue = deque([s])
    indptr, indices, data = residual.indptr, residual.indices, residual.data
    while queue:
        u = queue.popleft()
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if data[k] > 0 and not seen[w]:
                seen[w] = True
                queue.append(w)
    return int(res.flow_value), {v for v in range(n) if not seen[v]}


def min_rooted_connectivity(n: int, arcs: Sequence[tuple[int, int]], root: int) -> tuple[int, int | None]:
    """Smallest lambda(root -> v) over v != root, with a witness vertex."""
    if n <= 1:
        return 0, None
    vals = rooted_connectivity(capacity_matrix(n, arcs), root)
    vals[root] = np.iinfo(np.int64).max
    v = int(np.argmin(vals))
    return int(vals[v]), v
