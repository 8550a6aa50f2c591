import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from xorgame.errors import BudgetExceeded
from xorgame.gf2 import (
    BitMatrix,
    count_solutions_log2,
    critical_sets_bruteforce,
    critical_sets_by_cardinality,
    format_system,
    parse_system,
    rank,
    solve,
)


def naive_rank(dense):
    """Textbook elimination on Python ints; independent of the packed code."""
    rows = [int("".join(map(str, r[::-1])) or "0", 2) for r in dense.tolist()]
    r = 0
    for bit in range(dense.shape[1] if dense.ndim == 2 else 0):
        piv = next((i for i in range(r, len(rows)) if rows[i] >> bit & 1), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] >> bit & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


def matrices(max_rows=12, max_cols=10):
    return st.tuples(st.integers(0, max_rows), st.integers(0, max_cols)).flatmap(
        lambda rc: arrays(np.uint8, rc, elements=st.integers(0, 1))
    )


def test_rank_examples():
    assert rank(BitMatrix.identity(3)) == 3
    assert rank(BitMatrix.from_dense([[1, 1], [1, 1]])) == 1
    assert rank(BitMatrix.zeros(0, 0)) == 0


@given(matrices())
def test_rank_matches_naive(dense):
    M = BitMatrix.from_dense(dense)
    assert rank(M) == naive_rank(dense)


@given(matrices(max_cols=150))
def test_dense_roundtrip(dense):
    M = BitMatrix.from_dense(dense)
    assert np.array_equal(M.to_dense(), dense)
    assert M.shape == dense.shape


def test_padding_bits_zero():
    M = BitMatrix.from_dense(np.ones((3, 70), dtype=np.uint8))
    assert int(M.data[0, 1]) == (1 << 6) - 1


def test_bit_bounds():
    M = BitMatrix.identity(2)
    assert M.bit(1, 1) == 1 and M.bit(0, 1) == 0
    with pytest.raises(IndexError):
        M.bit(2, 0)


def test_from_row_supports_xors_repeats():
    M = BitMatrix.from_row_supports([[0, 0, 2]], 3)
    assert M.to_dense().tolist() == [[0, 0, 1]]


def test_solve_examples():
    assert solve(BitMatrix.identity(3), [1, 0, 1]).tolist() == [1, 0, 1]
    dup = BitMatrix.from_dense([[1, 1], [1, 1]])
    assert solve(dup, [1, 0]) is None
    x = solve(dup, [1, 1])
    assert x[0] ^ x[1] == 1


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve(BitMatrix.identity(3), [1, 0])


@given(matrices(), st.data())
def test_solve_witness_or_inconsistent(dense, data):
    M = BitMatrix.from_dense(dense)
    s = np.array(data.draw(st.lists(st.integers(0, 1), min_size=M.rows, max_size=M.rows)), dtype=np.uint8)
    x = solve(M, s)
    if x is not None:
        assert np.array_equal(M.matvec(x), s)
    else:
        # inconsistent: s is outside the column space, checked by brute force on small cols
        if M.cols <= 10:
            assert all(
                not np.array_equal(M.matvec(np.array(bits, dtype=np.uint8)), s)
                for bits in itertools.product((0, 1), repeat=M.cols)
            )


def test_count_examples():
    assert count_solutions_log2(BitMatrix.identity(4), [1, 1, 0, 1]) == 0
    assert count_solutions_log2(BitMatrix.zeros(2, 3), [0, 0]) == 3
    assert count_solutions_log2(BitMatrix.zeros(2, 3), [0, 1]) is None


def test_count_bruteforce_4x3():
    rng = np.random.default_rng(11)
    assignments = np.array(list(itertools.product((0, 1), repeat=3)), dtype=np.uint8)
    for _ in range(100):
        dense = rng.integers(0, 2, size=(4, 3), dtype=np.uint8)
        s = rng.integers(0, 2, size=4, dtype=np.uint8)
        M = BitMatrix.from_dense(dense)
        count = sum(np.array_equal(M.matvec(a), s) for a in assignments)
        lg = count_solutions_log2(M, s)
        assert (count == 0 and lg is None) or count == 2**lg


def test_critical_examples():
    assert critical_sets_bruteforce(BitMatrix.identity(3)) == 0
    two = BitMatrix.from_dense([[1, 0, 1], [1, 0, 1]])
    assert critical_sets_bruteforce(two) == 1
    assert critical_sets_by_cardinality(two) == {2: 1}
    three = BitMatrix.from_dense([[1, 1, 0]] * 3)
    assert critical_sets_by_cardinality(three) == {2: 3}


@given(matrices())
def test_critical_count_identity(dense):
    M = BitMatrix.from_dense(dense)
    total = critical_sets_bruteforce(M)
    assert total == 2 ** (M.rows - rank(M)) - 1
    by_card = critical_sets_by_cardinality(M)
    assert sum(by_card.values()) == total
    if M.rows and np.all(dense.any(axis=1)):
        assert 1 not in by_card


def test_critical_cardinality_against_subsets():
    rng = np.random.default_rng(5)
    dense = rng.integers(0, 2, size=(6, 4), dtype=np.uint8)
    M = BitMatrix.from_dense(dense)
    expected = {}
    for r in range(1, 7):
        for sub in itertools.combinations(range(6), r):
            if not dense[list(sub)].sum(axis=0).astype(int).__mod__(2).any():
                expected[r] = expected.get(r, 0) + 1
    assert critical_sets_by_cardinality(M) == expected


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        critical_sets_bruteforce(BitMatrix.zeros(25, 2))


@given(matrices(max_rows=8, max_cols=6))
def test_solvable_fraction(dense):
    M = BitMatrix.from_dense(dense)
    consistent = sum(
        count_solutions_log2(M, np.array(s, dtype=np.uint8)) is not None
        for s in itertools.product((0, 1), repeat=M.rows)
    )
    assert consistent == 2 ** rank(M)


def test_large_rank_full():
    rng = np.random.default_rng(0)
    dense = rng.integers(0, 2, size=(300, 300), dtype=np.uint8)
    assert rank(BitMatrix.from_dense(dense)) == naive_rank(dense)


def test_inputs_not_mutated():
    M = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    before = M.data.copy()
    solve(M, [1, 0])
    rank(M)
    assert np.array_equal(M.data, before)


def test_text_roundtrip():
    M = BitMatrix.from_dense([[1, 0, 1], [0, 1, 1]])
    text = format_system(M, [1, 0])
    assert text == "2 3\n101\n011\n10\n"
    M2, s = parse_system(text)
    assert M2 == M and s.tolist() == [1, 0]


@pytest.mark.parametrize("bad", ["", "2 3\n101\n011\n", "1 2\n12\n1\n", "1 2\n10\n11\n", "x y\n"])
def test_text_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_system(bad)
