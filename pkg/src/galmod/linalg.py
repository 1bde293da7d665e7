"""Dense linear algebra over prime fields, built on integer numpy arrays.

All routines use deterministic first-nonzero pivoting so that reported
solutions and ranks are reproducible.
"""

from __future__ import annotations

import numpy as np


def _as_matrix(a, p: int) -> np.ndarray:
    m = np.asarray(a, dtype=np.int64) % p
    if m.ndim != 2:
        raise ValueError("expected a 2-d array")
    return m


def inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def row_echelon(a, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = _as_matrix(a, p).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        m[r] = (m[r] * inv_mod(m[r, c], p)) % p
        factors = m[:, c].copy()
        factors[r] = 0
        if np.any(factors):
            m = (m - np.outer(factors, m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a, p: int) -> int:
    if np.asarray(a).size == 0:
        return 0
    _, pivots = row_echelon(a, p)
    return len(pivots)


def solve(a, b, p: int):
    """A deterministic solution x of a x = b mod p, or None if inconsistent.

    Free variables are set to zero.
    """
    m = _as_matrix(a, p)
    rhs = np.asarray(b, dtype=np.int64).reshape(-1) % p
    if rhs.shape[0] != m.shape[0]:
        raise ValueError("dimension mismatch")
    aug = np.concatenate([m, rhs[:, None]], axis=1)
    ech, pivots = row_echelon(aug, p)
    ncols = m.shape[1]
    if ncols in pivots:
        return None  # pivot in the constant column: inconsistent system
    x = np.zeros(ncols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = ech[r, ncols]
    return x


def nullspace(a, p: int) -> np.ndarray:
    """Basis of the right nullspace, one vector per row."""
    m = _as_matrix(a, p)
    ncols = m.shape[1]
    ech, pivots = row_echelon(m, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, c in enumerate(pivots):
            basis[k, c] = (-ech[r, fc]) % p
    return basis


def in_row_span(basis, v, p: int) -> bool:
    """Whether v lies in the span of the given row vectors."""
    basis = np.asarray(basis, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64).reshape(1, -1)
    if basis.size == 0:
        return bool(np.all(v % p == 0))
    return rank(basis, p) == rank(np.concatenate([basis, v]), p)
