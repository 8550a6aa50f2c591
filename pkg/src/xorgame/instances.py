"""Random and exhaustive K-XORGAME / k-XORSAT instances.

A K-XORGAME row picks exactly one column in each of the K blocks, so an
instance is stored as an ``(m, K)`` array of *global* column indices (the
hypergraph edge list); the packed :class:`BitMatrix` is built on demand.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import BudgetExceeded
from .gf2 import BitMatrix, count_solutions_log2, critical_sets_bruteforce, critical_sets_by_cardinality

__all__ = [
    "BlockShape",
    "ENUMERATION_BUDGET",
    "GameInstance",
    "enumerate_block_space",
    "enumerate_core_space",
    "enumerate_game_space",
    "exact_EY",
    "exact_EZ",
    "make_rng",
    "sample_core",
    "second_moment_terms",
    "mix_seed",
    "sample_game",
    "sample_xorsat",
]

ENUMERATION_BUDGET = 10**7
_MASK64 = (1 << 64) - 1


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """Per-trial 64-bit sub-seed; a function of (master_seed, index) only."""
    return _splitmix64((master_seed & _MASK64) ^ _splitmix64(index & _MASK64))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


@dataclass(frozen=True)
class BlockShape:
    K: int
    n: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        if self.K < 2 or len(self.n) != self.K:
            raise ValueError(f"need K >= 2 block sizes, got K={self.K}, n={self.n}")
        if any(v < 1 for v in self.n):
            raise ValueError(f"every block needs at least one column, got {self.n}")

    @classmethod
    def uniform(cls, K, n):
        return cls(K, (n,) * K)

    @property
    def total(self):
        return sum(self.n)

    @property
    def offsets(self):
        return tuple(itertools.accumulate((0,) + self.n[:-1]))

    @property
    def is_uniform(self):
        return len(set(self.n)) == 1

    def block_of(self, col):
        """Block index of each global column index."""
        return np.searchsorted(np.asarray(self.offsets[1:]), np.asarray(col), side="right")


@dataclass(frozen=True, eq=False)
class GameInstance:
    shape: BlockShape
    edges: np.ndarray  # (m, K) global column indices, one per block
    s: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.edges.flags.writeable = False
        self.s.flags.writeable = False

    @property
    def m(self):
        return self.edges.shape[0]

    @cached_property
    def gamma(self) -> BitMatrix:
        return BitMatrix.from_row_supports(self.edges, self.shape.total)


def sample_game(m: int, shape: BlockShape, rng: np.random.Generator, seed: int = 0) -> GameInstance:
    """Uniform draw from (K-XORGAME matrices of size m x |n|) x Z_2^m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    cols = [off + rng.integers(0, nj, size=m) for off, nj in zip(shape.offsets, shape.n)]
    edges = np.stack(cols, axis=1).astype(np.int64)
    s = rng.integers(0, 2, size=m, dtype=np.uint8)
    return GameInstance(shape, edges, s, seed)


def sample_xorsat(m: int, n: int, k: int, rng: np.random.Generator) -> BitMatrix:
    """m rows, each an independent uniform k-subset of the n columns."""
    if not n >= k >= 1:
        raise ValueError(f"need n >= k >= 1, got n={n}, k={k}")
    supports = np.stack([rng.choice(n, size=k, replace=False) for _ in range(m)]) if m else np.zeros((0, k), int)
    return BitMatrix.from_row_supports(supports, n)


def sample_core(m: int, shape: BlockShape, rng: np.random.Generator, max_tries: int = 100_000) -> GameInstance:
    """Uniform draw from Psi_{m,n} x Z_2^m by rejection; slow away from m ~ 2 n_j."""
    if m < 2 * max(shape.n):
        raise ValueError(f"Psi is empty: m={m} < 2*max(n)={2 * max(shape.n)}")
    for _ in range(max_tries):
        g = sample_game(m, shape, rng)
        if _min_degree_ok(g.edges, shape.total):
            return g
    raise BudgetExceeded(f"no 2-core matrix accepted in {max_tries} draws")


# exhaustive enumeration ----------------------------------------------------


def _check_budget(count):
    if count > ENUMERATION_BUDGET:
        raise BudgetExceeded(f"{count} objects exceeds the enumeration budget {ENUMERATION_BUDGET}")


def iter_game_edges(m: int, shape: BlockShape):
    """Every edge list of Xi_{m,n} as a tuple of m row tuples."""
    _check_budget(math.prod(shape.n) ** m)
    row_choices = list(itertools.product(*[range(o, o + nj) for o, nj in zip(shape.offsets, shape.n)]))
    return itertools.product(row_choices, repeat=m)


def _min_degree_ok(edges, total):
    deg = np.bincount(np.asarray(edges, dtype=np.int64).ravel(), minlength=total)
    return bool(np.all(deg >= 2))


def enumerate_game_space(m: int, shape: BlockShape):
    """Yield each K-XORGAME matrix with m rows and block sizes n exactly once."""
    for edges in iter_game_edges(m, shape):
        yield BitMatrix.from_row_supports(np.array(edges).reshape(m, shape.K), shape.total)


def iter_core_edges(m: int, shape: BlockShape):
    if m < 2 * max(shape.n):
        warnings.warn(f"Psi is empty: m={m} < 2*max(n)={2 * max(shape.n)}", stacklevel=3)
        return
    for edges in iter_game_edges(m, shape):
        if _min_degree_ok(edges, shape.total):
            yield edges


def enumerate_core_space(m: int, shape: BlockShape):
    """Yield every 2-core K-XORGAME matrix (all column degrees >= 2)."""
    for edges in iter_core_edges(m, shape):
        yield BitMatrix.from_row_supports(np.array(edges).reshape(m, shape.K), shape.total)


def enumerate_block_space(m: int, n: int):
    """Yield every m x n matrix with one 1 per row and column degrees >= 2."""
    _check_budget(n**m)
    if m < 2 * n:
        return
    for choice in itertools.product(range(n), repeat=m):
        if _min_degree_ok(choice, n):
            yield BitMatrix.from_row_supports(np.array(choice).reshape(m, 1), n)


def _expected_critical(matrices, ell):
    total = 0
    count = 0
    for M in matrices:
        total += critical_sets_by_cardinality(M).get(ell, 0)
        count += 1
    if count == 0:
        raise ValueError("expectation over an empty space")
    return Fraction(total, count)


def exact_EY(m: int, n: int, ell: int) -> Fraction:
    """E[Y^(ell)_{m,n,1}] over the uniform distribution on A_{m,n,1}."""
    return _expected_critical(enumerate_block_space(m, n), ell)


def exact_EZ(m: int, shape: BlockShape, ell: int) -> Fraction:
    """E[Z^(ell)_{m,n}] over the uniform distribution on Psi_{m,n}."""
    return _expected_critical(enumerate_core_space(m, shape), ell)


def second_moment_terms(m: int, shape: BlockShape):
    """Exact (E[N], E[N^2], E[X]) over uniform (Gamma, s) in Psi_{m,n} x Z_2^m.

    N is counted by solving for every s; X by subset enumeration, so the two
    sides of E[N^2]/E[N]^2 = E[X] + 1 are computed independently.
    """
    svecs = all_bit_vectors(m)
    sum_n = sum_n2 = sum_x = 0
    count = 0
    for M in enumerate_core_space(m, shape):
        for s in svecs:
            lg = count_solutions_log2(M, s)
            if lg is not None:
                sum_n += 2**lg
                sum_n2 += 4**lg
        sum_x += critical_sets_bruteforce(M)
        count += 1
    if count == 0:
        raise ValueError("expectation over an empty space")
    pairs = count * len(svecs)
    return Fraction(sum_n, pairs), Fraction(sum_n2, pairs), Fraction(sum_x, count)


def all_bit_vectors(m):
    """Every s in Z_2^m, as rows of a (2^m, m) uint8 array."""
    idx = np.arange(2**m, dtype=np.int64)[:, None]
    return ((idx >> np.arange(m)) & 1).astype(np.uint8)
