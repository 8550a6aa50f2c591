"""Dense bit-packed linear algebra over GF(2).

Rows are packed little-endian into uint64 words: column ``j`` lives in word
``j // 64`` at bit ``j % 64``. Padding bits past ``cols`` are always zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded

__all__ = [
    "BitMatrix",
    "ENUMERATION_BUDGET_ROWS",
    "count_solutions_log2",
    "critical_sets_bruteforce",
    "critical_sets_by_cardinality",
    "format_system",
    "parse_system",
    "rank",
    "solve",
]

WORD = 64
ENUMERATION_BUDGET_ROWS = 24

_ONE = np.uint64(1)


def _words(cols):
    return max(1, (cols + WORD - 1) // WORD)


def _pack_bits(dense):
    """Pack a (rows, cols) 0/1 array into (rows, words) uint64."""
    dense = np.asarray(dense, dtype=np.uint8)
    rows, cols = dense.shape
    w = _words(cols)
    padded = np.zeros((rows, w * WORD), dtype=np.uint8)
    padded[:, :cols] = dense
    as_bytes = np.packbits(padded, axis=1, bitorder="little")
    return as_bytes.view("<u8").astype(np.uint64).reshape(rows, w)


def _unpack_bits(data, cols):
    rows, w = data.shape
    as_bytes = np.ascontiguousarray(data.astype("<u8")).view(np.uint8).reshape(rows, w * 8)
    return np.unpackbits(as_bytes, axis=1, count=cols, bitorder="little")


def as_bits(v, length=None):
    """Coerce a 0/1 sequence to a uint8 vector, optionally checking its length."""
    arr = np.asarray(v, dtype=np.uint8).ravel()
    if np.any(arr > 1):
        raise ValueError("bit vectors hold only 0 and 1")
    if length is not None and arr.shape[0] != length:
        raise ValueError(f"expected a bit vector of length {length}, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """Immutable boolean matrix, rows = equations, columns = variables."""

    rows: int
    cols: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != (self.rows, _words(self.cols)):
            raise ValueError("packed data has the wrong shape")
        self.data.flags.writeable = False

    @classmethod
    def from_dense(cls, dense):
        dense = np.asarray(dense, dtype=np.uint8)
        if dense.ndim != 2:
            dense = dense.reshape(-1, dense.shape[-1] if dense.ndim else 0)
        rows, cols = dense.shape
        return cls(rows, cols, _pack_bits(dense))

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, np.zeros((rows, _words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n):
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_row_supports(cls, supports, cols):
        """Build from a (rows, r) integer array of column indices (one 1 per entry)."""
        supports = np.asarray(supports, dtype=np.int64)
        rows = supports.shape[0]
        data = np.zeros((rows, _words(cols)), dtype=np.uint64)
        if rows:
            r = np.repeat(np.arange(rows), supports.shape[1])
            c = supports.ravel()
            # xor so that a repeated column cancels, as GF(2) addition would
            np.bitwise_xor.at(data, (r, c // WORD), _ONE << (c % WORD).astype(np.uint64))
        return cls(rows, cols, data)

    def to_dense(self):
        return _unpack_bits(self.data, self.cols)

    def bit(self, i, j):
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError((i, j))
        return int((int(self.data[i, j // WORD]) >> (j % WORD)) & 1)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def column_degrees(self):
        return self.to_dense().sum(axis=0, dtype=np.int64)

    def row_weights(self):
        return self.to_dense().sum(axis=1, dtype=np.int64)

    def submatrix(self, row_idx, col_idx):
        dense = self.to_dense()[np.asarray(row_idx, dtype=np.int64)][:, np.asarray(col_idx, dtype=np.int64)]
        return BitMatrix.from_dense(dense.reshape(len(row_idx), len(col_idx)))

    def matvec(self, x):
        """M x over GF(2)."""
        x = as_bits(x, self.cols)
        if self.rows == 0:
            return np.zeros(0, dtype=np.uint8)
        xp = _pack_bits(x[None, :])[0]
        anded = self.data & xp
        parity = np.zeros(self.rows, dtype=np.uint64)
        for w in range(anded.shape[1]):
            parity ^= anded[:, w]
        return _popcount_parity(parity)

    def row_key(self):
        """Hashable identity of the bit pattern."""
        return (self.rows, self.cols, self.data.tobytes())

    def __eq__(self, other):
        return isinstance(other, BitMatrix) and self.row_key() == other.row_key()

    def __hash__(self):
        return hash(self.row_key())

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols})"


def _popcount_parity(words):
    w = words.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        w ^= w >> np.uint64(shift)
    return (w & _ONE).astype(np.uint8)


def _echelon(data, cols, track_rhs=None):
    """Forward elimination on a copy of ``data``.

    Returns (reduced rows, pivot columns, reduced rhs). Rows ``r >= rank`` of
    the result are zero on the coefficient side.
    """
    A = np.array(data, dtype=np.uint64, copy=True)
    rhs = None if track_rhs is None else np.array(track_rhs, dtype=np.uint8, copy=True)
    m = A.shape[0]
    r = 0
    pivots = []
    for j in range(cols):
        if r == m:
            break
        w, b = divmod(j, WORD)
        colbits = (A[r:, w] >> np.uint64(b)) & _ONE
        hits = np.flatnonzero(colbits)
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
            if rhs is not None:
                rhs[[r, p]] = rhs[[p, r]]
        below = r + 1 + np.flatnonzero((A[r + 1 :, w] >> np.uint64(b)) & _ONE)
        if below.size:
            A[below, w:] ^= A[r, w:]
            if rhs is not None:
                rhs[below] ^= rhs[r]
        pivots.append(j)
        r += 1
    return A, pivots, rhs


def rank(M: BitMatrix) -> int:
    return len(_echelon(M.data, M.cols)[1])


def solve(M: BitMatrix, s):
    """Some x with M x = s, or None when the system is inconsistent."""
    s = as_bits(s, M.rows)
    A, pivots, rhs = _echelon(M.data, M.cols, s)
    r = len(pivots)
    if np.any(rhs[r:]):
        return None
    x = np.zeros(M.cols, dtype=np.uint8)
    # back substitution, free variables = 0
    for i in range(r - 1, -1, -1):
        j = pivots[i]
        row = _unpack_bits(A[i : i + 1], M.cols)[0]
        val = rhs[i] ^ (int(np.dot(row[j + 1 :].astype(np.int64), x[j + 1 :])) & 1)
        x[j] = val
    return x


def count_solutions_log2(M: BitMatrix, s):
    """log2 of the number of solutions of M x = s, or None if there are none."""
    s = as_bits(s, M.rows)
    _, pivots, rhs = _echelon(M.data, M.cols, s)
    if np.any(rhs[len(pivots) :]):
        return None
    return M.cols - len(pivots)


def _subset_xors(M):
    if M.rows > ENUMERATION_BUDGET_ROWS:
        raise BudgetExceeded(f"{M.rows} rows exceeds the enumeration budget of {ENUMERATION_BUDGET_ROWS}")
    sums = np.zeros((1, M.data.shape[1]), dtype=np.uint64)
    card = np.zeros(1, dtype=np.int64)
    for i in range(M.rows):
        sums = np.concatenate([sums, sums ^ M.data[i]])
        card = np.concatenate([card, card + 1])
    return sums, card


def critical_sets_bruteforce(M: BitMatrix) -> int:
    """Number of non-empty row subsets summing to zero, by full enumeration."""
    sums, _ = _subset_xors(M)
    return int(np.count_nonzero(~np.any(sums, axis=1))) - 1


def critical_sets_by_cardinality(M: BitMatrix) -> dict:
    """{cardinality: count} of critical row sets (only non-zero counts)."""
    sums, card = _subset_xors(M)
    zero = ~np.any(sums, axis=1)
    zero[0] = False
    counts = np.bincount(card[zero], minlength=M.rows + 1)
    return {int(l): int(c) for l, c in enumerate(counts) if c and l >= 1}


def parse_system(text: str):
    """Read ``m n``, then m rows of n 0/1 characters, then one row of m characters for s."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty input")
    try:
        m, n = (int(v) for v in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"bad header line {lines[0]!r}, expected 'm n'") from exc
    body = lines[1 : 1 + m]
    if len(body) != m or len(lines) != m + 2:
        raise ValueError(f"expected {m} matrix rows and one s line, got {len(lines) - 1} lines")
    for i, row in enumerate(body):
        if len(row) != n or set(row) - {"0", "1"}:
            raise ValueError(f"row {i + 1} must be {n} characters from {{0,1}}")
    s_line = lines[-1]
    if len(s_line) != m or set(s_line) - {"0", "1"}:
        raise ValueError(f"s must be {m} characters from {{0,1}}")
    dense = np.array([[ch == "1" for ch in row] for row in body], dtype=np.uint8).reshape(m, n)
    s = np.array([ch == "1" for ch in s_line], dtype=np.uint8)
    return BitMatrix.from_dense(dense), s


def format_system(M: BitMatrix, s) -> str:
    dense = M.to_dense()
    out = [f"{M.rows} {M.cols}"]
    out += ["".join("1" if b else "0" for b in row) for row in dense]
    out.append("".join(str(int(b)) for b in as_bits(s, M.rows)))
    return "\n".join(out) + "\n"
