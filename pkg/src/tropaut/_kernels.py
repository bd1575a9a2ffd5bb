"""Chip-firing reduction kernels.

Two interchangeable backends compute the ``q``-reduced divisor of an integer
chip vector on a lattice multigraph together with the firing script that
produces it (``reduced = chips - L @ script`` for the graph Laplacian ``L``):

* a loop-based kernel compiled with ``numba.njit`` (batched with ``prange``),
* a vectorized numpy kernel over the dense adjacency matrix.

The numba path is used when numba imports and ``TROPAUT_NUMBA`` is not set to
``0``/``false``/``off``.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np


def _numba_requested() -> bool:
    return os.environ.get("TROPAUT_NUMBA", "1").strip().lower() not in ("0", "false", "off", "no")


try:
    if not _numba_requested():
        raise ImportError
    import numba

    # the bundled TBB is often too old; try the other layers first
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag in CI
    numba = None
    HAVE_NUMBA = False


class GraphArrays(NamedTuple):
    """Integer description of a loopless multigraph rooted at ``q``."""

    q: int
    indptr: np.ndarray  # CSR row pointers, int64
    indices: np.ndarray  # neighbor lists with multiplicity, int64
    dist: np.ndarray  # BFS distance from q, int64
    adjacency: np.ndarray  # dense edge multiplicities, int64
    laplacian: np.ndarray  # dense Laplacian, int64


def graph_arrays(n: int, edges, q: int = 0) -> GraphArrays:
    """Build kernel inputs from ``(i, j)`` pairs; self-loops are ignored."""
    adj = np.zeros((n, n), dtype=np.int64)
    for i, j in edges:
        if i != j:
            adj[i, j] += 1
            adj[j, i] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = []
    for i in range(n):
        row = []
        for j in range(n):
            row.extend([j] * int(adj[i, j]))
        indices.extend(row)
        indptr[i + 1] = len(indices)
    dist = np.full(n, -1, dtype=np.int64)
    dist[q] = 0
    frontier = [q]
    while frontier:
        nxt = []
        for v in frontier:
            for w in np.nonzero(adj[v])[0]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    nxt.append(int(w))
        frontier = nxt
    if (dist < 0).any():
        raise ValueError("lattice graph is disconnected")
    lap = np.diag(adj.sum(axis=1)) - adj
    return GraphArrays(q, indptr, np.asarray(indices, dtype=np.int64), dist, adj, lap)


# ---------------------------------------------------------------------------
# loop kernel (numba target)


def _reduce_loops(chips, q, indptr, indices, dist):
    n = chips.shape[0]
    c = chips.copy()
    script = np.zeros(n, dtype=np.int64)
    maxd = 0
    for v in range(n):
        if dist[v] > maxd:
            maxd = dist[v]
    # make every vertex other than q solvent, peeling BFS layers from the outside in
    for d in range(maxd - 1, -1, -1):
        k = 0
        for v in range(n):
            if dist[v] == d + 1 and c[v] < 0:
                m = 0
                for p in range(indptr[v], indptr[v + 1]):
                    if dist[indices[p]] <= d:
                        m += 1
                need = (-c[v] + m - 1) // m
                if need > k:
                    k = need
        if k > 0:
            for v in range(n):
                if dist[v] <= d:
                    script[v] += k
                    for p in range(indptr[v], indptr[v + 1]):
                        w = indices[p]
                        if dist[w] > d:
                            c[v] -= k
                            c[w] += k
    # Dhar burning from q; fire the unburnt set as often as it stays solvent
    burnt = np.zeros(n, dtype=np.bool_)
    cnt = np.zeros(n, dtype=np.int64)
    stack = np.zeros(n, dtype=np.int64)
    while True:
        burnt[:] = False
        cnt[:] = 0
        burnt[q] = True
        top = 0
        stack[top] = q
        top += 1
        nburnt = 1
        while top > 0:
            top -= 1
            v = stack[top]
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if not burnt[w]:
                    cnt[w] += 1
                    if cnt[w] > c[w]:
                        burnt[w] = True
                        nburnt += 1
                        stack[top] = w
                        top += 1
        if nburnt == n:
            break
        t = -1
        for v in range(n):
            if not burnt[v] and cnt[v] > 0:
                r = c[v] // cnt[v]
                if t < 0 or r < t:
                    t = r
        for v in range(n):
            if not burnt[v]:
                script[v] += t
                c[v] -= t * cnt[v]
            else:
                for p in range(indptr[v], indptr[v + 1]):
                    if not burnt[indices[p]]:
                        c[v] += t
    return c, script


def _reduce_batch_loops(batch, q, indptr, indices, dist):
    m, n = batch.shape
    out = np.empty((m, n), dtype=np.int64)
    scripts = np.empty((m, n), dtype=np.int64)
    for i in range(m):
        c, s = _reduce_loops(batch[i], q, indptr, indices, dist)
        out[i] = c
        scripts[i] = s
    return out, scripts


if HAVE_NUMBA:
    _reduce_nb = numba.njit(cache=True)(_reduce_loops)

    @numba.njit(cache=True, parallel=True)
    def _reduce_batch_nb(batch, q, indptr, indices, dist):
        m, n = batch.shape
        out = np.empty((m, n), dtype=np.int64)
        scripts = np.empty((m, n), dtype=np.int64)
        for i in numba.prange(m):
            c, s = _reduce_nb(batch[i], q, indptr, indices, dist)
            out[i] = c
            scripts[i] = s
        return out, scripts


# ---------------------------------------------------------------------------
# vectorized numpy kernel


def _reduce_numpy(chips: np.ndarray, g: GraphArrays) -> tuple[np.ndarray, np.ndarray]:
    adj, lap, dist, q = g.adjacency, g.laplacian, g.dist, g.q
    c = chips.astype(np.int64).copy()
    n = c.shape[0]
    script = np.zeros(n, dtype=np.int64)
    for d in range(int(dist.max()) - 1, -1, -1):
        layer = (dist == d + 1) & (c < 0)
        if not layer.any():
            continue
        inner = dist <= d
        m = adj[np.ix_(layer, inner)].sum(axis=1)
        k = int(((-c[layer] + m - 1) // m).max())
        x = inner.astype(np.int64) * k
        c -= lap @ x
        script += x
    while True:
        burnt = np.zeros(n, dtype=bool)
        burnt[q] = True
        while True:
            cnt = adj[:, burnt].sum(axis=1)
            new = ~burnt & (cnt > c)
            if not new.any():
                break
            burnt |= new
        if burnt.all():
            return c, script
        unburnt = ~burnt
        out = adj[np.ix_(unburnt, burnt)].sum(axis=1)
        live = out > 0
        t = int((c[unburnt][live] // out[live]).min())
        x = unburnt.astype(np.int64) * t
        c -= lap @ x
        script += x


# ---------------------------------------------------------------------------
# public entry points


def reduce_divisor(chips: np.ndarray, g: GraphArrays, backend: str | None = None):
    """Return ``(reduced, script)`` for one chip vector."""
    chips = np.ascontiguousarray(chips, dtype=np.int64)
    backend = backend or default_backend()
    if backend == "numba":
        return _reduce_nb(chips, g.q, g.indptr, g.indices, g.dist)
    if backend == "loops":
        return _reduce_loops(chips, g.q, g.indptr, g.indices, g.dist)
    if backend == "numpy":
        return _reduce_numpy(chips, g)
    raise ValueError(f"unknown backend {backend!r}")


def reduce_batch(batch: np.ndarray, g: GraphArrays, backend: str | None = None):
    """Reduce every row of ``batch``; returns ``(reduced, scripts)`` arrays."""
    batch = np.ascontiguousarray(batch, dtype=np.int64)
    if batch.ndim != 2:
        raise ValueError("batch must be two-dimensional")
    backend = backend or default_backend()
    if backend == "numba":
        if batch.shape[0] == 0:
            return batch.copy(), batch.copy()
        return _reduce_batch_nb(batch, g.q, g.indptr, g.indices, g.dist)
    if backend == "loops":
        return _reduce_batch_loops(batch, g.q, g.indptr, g.indices, g.dist)
    if backend == "numpy":
        out = np.empty_like(batch)
        scripts = np.empty_like(batch)
        for i in range(batch.shape[0]):
            out[i], scripts[i] = _reduce_numpy(batch[i], g)
        return out, scripts
    raise ValueError(f"unknown backend {backend!r}")


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and _numba_requested() else "numpy"


def effective_divisors(n: int, degree: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``n`` summing to ``degree``, lexicographically descending."""
    if degree < 0:
        return np.zeros((0, n), dtype=np.int64)
    rows: list[list[int]] = []

    def rec(prefix: list[int], left: int, slots: int):
        if slots == 1:
            rows.append(prefix + [left])
            return
        for k in range(left, -1, -1):
            rec(prefix + [k], left - k, slots - 1)

    rec([], degree, n)
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), n)
