"""2-core peeling of K-XORGAME systems and the predicted core sizes."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .constants import mu_of_c, q_of, tilde_c
from .errors import DomainError
from .gf2 import BitMatrix, count_solutions_log2
from .instances import BlockShape, GameInstance, iter_game_edges

__all__ = [
    "CoreReport",
    "core_rows_parallel",
    "edges_from_matrix",
    "predicted_core",
    "peel_matrix",
    "peel_supports",
    "satisfiability_preserved",
    "two_core",
    "two_core_edges",
    "uniformity_census",
]


@dataclass(frozen=True)
class CoreReport:
    core_m: int
    core_n: tuple
    kept_rows: tuple
    kept_cols: tuple
    predicted_m: float = math.nan
    predicted_n_j: float = math.nan
    predicted_ratio: float = math.nan

    @property
    def empty(self):
        return self.core_m == 0


def predicted_core(K: int, n: int, c: float):
    """Asymptotic (core rows, core columns per block, their ratio) at density c."""
    if not c > tilde_c(K):
        raise DomainError(f"c = {c} <= tilde_c({K}): the 2-core is empty a.a.s.")
    mu = mu_of_c(c, K)
    em = math.exp(-mu)
    n_j = em * (math.expm1(mu) - mu) * n
    m_core = mu * em * math.expm1(mu) * n
    return m_core, n_j, q_of(mu)


def edges_from_matrix(gamma: BitMatrix, shape: BlockShape):
    """Recover the (m, K) edge array; each row must have exactly one 1 per block."""
    if gamma.cols != shape.total:
        raise ValueError(f"matrix has {gamma.cols} columns, shape expects {shape.total}")
    dense = gamma.to_dense()
    edges = np.empty((gamma.rows, shape.K), dtype=np.int64)
    for j, (off, nj) in enumerate(zip(shape.offsets, shape.n)):
        block = dense[:, off : off + nj]
        if gamma.rows and not np.all(block.sum(axis=1) == 1):
            raise ValueError(f"block {j} does not have exactly one 1 in every row")
        edges[:, j] = off + np.argmax(block, axis=1) if gamma.rows else 0
    return edges


def two_core_edges(edges, total_cols, rng=None):
    """Worklist peeling on an edge list.

    Returns (kept row indices, kept column indices), both sorted. With ``rng``
    the worklist is served in random order instead of LIFO; the result must not
    depend on it.
    """
    rows = np.asarray(edges, dtype=np.int64).tolist()
    return peel_supports(rows, total_cols, rng)


def peel_supports(rows, total_cols, rng=None):
    """2-core of a general 0/1 matrix given as a list of row supports."""
    m = len(rows)
    deg = [0] * total_cols
    incident = [[] for _ in range(total_cols)]
    for r, row in enumerate(rows):
        for v in row:
            deg[v] += 1
            incident[v].append(r)
    alive = [True] * m
    work = [v for v in range(total_cols) if deg[v] == 1]
    while work:
        if rng is None:
            v = work.pop()
        else:
            i = int(rng.integers(len(work)))
            work[i], work[-1] = work[-1], work[i]
            v = work.pop()
        if deg[v] != 1:
            continue
        r = next(r for r in incident[v] if alive[r])
        alive[r] = False
        for u in rows[r]:
            deg[u] -= 1
            if deg[u] == 1:
                work.append(u)
    # an all-zero row is never peeled: it still carries its 0 = s_r constraint
    kept_rows = tuple(r for r in range(m) if alive[r])
    kept_cols = tuple(v for v in range(total_cols) if deg[v] >= 2)
    return kept_rows, kept_cols


def peel_matrix(M: BitMatrix, rng=None):
    """(kept rows, kept cols) of the 2-core of an arbitrary BitMatrix."""
    dense = M.to_dense()
    return peel_supports([np.flatnonzero(row).tolist() for row in dense], M.cols, rng)


def core_rows_parallel(edges, total_cols):
    """Boolean mask of surviving rows, peeling all leaf columns per round.

    Same 2-core as :func:`two_core_edges` (the 2-core is unique); vectorised
    for large Monte Carlo instances.
    """
    edges = np.asarray(edges, dtype=np.int64)
    alive = np.ones(edges.shape[0], dtype=bool)
    deg = np.bincount(edges.ravel(), minlength=total_cols)
    while True:
        leaf = deg == 1
        hit = alive & leaf[edges].any(axis=1)
        if not hit.any():
            break
        alive &= ~hit
        deg -= np.bincount(edges[hit].ravel(), minlength=total_cols)
    return alive, deg


def _report(shape, kept_rows, kept_cols, m):
    cols = np.asarray(kept_cols, dtype=np.int64)
    core_n = tuple(int(x) for x in np.bincount(shape.block_of(cols), minlength=shape.K)) if cols.size else (0,) * shape.K
    pred = (math.nan, math.nan, math.nan)
    if shape.is_uniform and shape.K >= 3:
        c = m / shape.n[0]
        if c > tilde_c(shape.K):
            pred = predicted_core(shape.K, shape.n[0], c)
    return CoreReport(len(kept_rows), core_n, tuple(kept_rows), tuple(kept_cols), *pred)


def two_core(gamma, shape: BlockShape, rng=None):
    """2-core of a K-XORGAME matrix.

    ``gamma`` is a :class:`BitMatrix` or an ``(m, K)`` edge array. Returns
    ``(core matrix, CoreReport, reduce_s)`` where ``reduce_s(s)`` restricts a
    right-hand side to the surviving rows. The empty core is a 0x0 matrix.
    """
    if isinstance(gamma, BitMatrix):
        edges = edges_from_matrix(gamma, shape)
    else:
        edges = np.asarray(gamma, dtype=np.int64)
        if edges.ndim != 2 or edges.shape[1] != shape.K:
            raise ValueError("edge array must have shape (m, K)")
    kept_rows, kept_cols = two_core_edges(edges, shape.total, rng=rng)
    report = _report(shape, kept_rows, kept_cols, edges.shape[0])
    core = _core_matrix(edges, kept_rows, kept_cols)
    rows_idx = np.asarray(kept_rows, dtype=np.int64)

    def reduce_s(s):
        return np.asarray(s, dtype=np.uint8)[rows_idx]

    return core, report, reduce_s


def _core_matrix(edges, kept_rows, kept_cols):
    if not kept_rows:
        return BitMatrix.zeros(0, 0)
    relabel = np.full(int(edges.max()) + 1, -1, dtype=np.int64)
    relabel[np.asarray(kept_cols)] = np.arange(len(kept_cols))
    sub = relabel[edges[np.asarray(kept_rows)]]
    return BitMatrix.from_row_supports(sub, len(kept_cols))


def core_is_satisfiable(edges, s, total_cols):
    """Decide Gamma x = s via its 2-core (fast path used by the sweeps)."""
    alive, _ = core_rows_parallel(edges, total_cols)
    if not alive.any():
        return True, 0, alive
    kept_rows = np.flatnonzero(alive)
    kept_cols = np.unique(np.asarray(edges)[kept_rows])
    core = _core_matrix(np.asarray(edges), tuple(kept_rows), tuple(kept_cols))
    return count_solutions_log2(core, np.asarray(s)[kept_rows]) is not None, len(kept_rows), alive


def satisfiability_preserved(instance: GameInstance) -> bool:
    """Does Gamma x = s have a solution iff its 2-core system does?"""
    full = count_solutions_log2(instance.gamma, instance.s) is not None
    core, _, reduce_s = two_core(instance.edges, instance.shape)
    reduced = True if core.rows == 0 else count_solutions_log2(core, reduce_s(instance.s)) is not None
    return full == reduced


def uniformity_census(m: int, shape: BlockShape):
    """Group the 2-cores of every G in Xi_{m,n} by size and count each core.

    Returns {(core_m, core_n): {core key: multiplicity}}, where a core key is
    (kept rows, kept cols, core bits) -- labelled, no isomorphism reduction.
    """
    census = defaultdict(lambda: defaultdict(int))
    for edges in iter_game_edges(m, shape):
        arr = np.asarray(edges, dtype=np.int64).reshape(m, shape.K)
        kept_rows, kept_cols = two_core_edges(arr, shape.total)
        rep = _report(shape, kept_rows, kept_cols, m)
        bits = tuple(map(tuple, arr[list(kept_rows)].tolist())) if kept_rows else ()
        census[(rep.core_m, rep.core_n)][(kept_rows, kept_cols, bits)] += 1
    return {k: dict(v) for k, v in census.items()}
