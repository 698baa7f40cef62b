"""Dense GF(2) matrix helpers on numpy uint8 arrays."""

from __future__ import annotations

import numpy as np


def rank(matrix: np.ndarray) -> int:
    """GF(2) rank by forward elimination."""
    m = (np.asarray(matrix, dtype=np.uint8) & 1).copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivots = np.nonzero(m[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + pivots[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        below = np.nonzero(m[r + 1:, c])[0]
        if below.size:
            m[r + 1 + below] ^= m[r]
        r += 1
    return r


def systematic_with_permutation(matrix: np.ndarray, col_order: np.ndarray):
    """Row-reduce to [I | P] form, permuting columns as needed.

    Columns are first arranged per col_order (preferred first); whenever a
    candidate pivot column is dependent on the pivots found so far it is
    swapped towards the back and the next preferred column is tried, so the
    identity block lands on the earliest independent columns of the
    preference order.

    Returns (systematic matrix, permutation) where permutation maps output
    column positions to input column indices.  Raises ValueError if the
    matrix has fewer independent columns than rows.
    """
    m = (np.asarray(matrix, dtype=np.uint8) & 1)[:, col_order].copy()
    perm = np.asarray(col_order, dtype=np.int64).copy()
    k, n = m.shape
    r = 0
    for c in range(n):
        if r == k:
            break
        col_rows = np.nonzero(m[:, c])[0]
        pos = int(np.searchsorted(col_rows, r))
        if pos == col_rows.size:
            continue
        p = int(col_rows[pos])
        if p != r:
            # row r cannot carry this bit (p is the first such row >= r),
            # so after the swap the bit-carrying rows are col_rows with p
            # replaced by r
            m[[r, p]] = m[[p, r]]
        others = np.concatenate([col_rows[:pos], col_rows[pos + 1:]])
        if others.size:
            m[others] ^= m[r]
        if c != r:
            m[:, [r, c]] = m[:, [c, r]]
            perm[[r, c]] = perm[[c, r]]
        r += 1
    if r < k:
        raise ValueError("matrix does not have full row rank over GF(2)")
    return m, perm


def parity_check_matrix(generator: np.ndarray) -> np.ndarray:
    """An (n-k) x n parity-check matrix for the row space of generator."""
    g = np.asarray(generator, dtype=np.uint8) & 1
    k, n = g.shape
    sys, perm = systematic_with_permutation(g, np.arange(n))
    p = sys[:, k:]
    h_perm = np.concatenate([p.T, np.eye(n - k, dtype=np.uint8)], axis=1)
    h = np.empty_like(h_perm)
    h[:, perm] = h_perm
    return h
