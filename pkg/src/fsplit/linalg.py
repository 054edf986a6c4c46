"""Dense linear algebra over F_p."""
from __future__ import annotations

from typing import List, Optional, Sequence, Tuple


def row_reduce(rows: List[List[int]], p: int, ncols: int) -> Tuple[List[List[int]], List[int]]:
    """Reduced row echelon form in place; returns (rows, pivot columns)."""
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][col] % p:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][col], -1, p)
        rows[r] = [v * inv % p for v in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][col] % p:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], prow)]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def solve(A: Sequence[Sequence[int]], b: Sequence[int], p: int, ncols: int
          ) -> Tuple[Optional[List[int]], List[List[int]]]:
    """Solve A x = b over F_p.

    Returns (particular solution or None, basis of the null space of A). The
    particular solution sets every free variable to zero.
    """
    rows = [list(r) + [bi % p] for r, bi in zip(A, b)]
    rows, pivots = row_reduce(rows, p, ncols)
    for row in rows[len(pivots):]:
        if row[ncols] % p:
            return None, nullspace_from_rref(rows, pivots, p, ncols)
    x = [0] * ncols
    for i, col in enumerate(pivots):
        x[col] = rows[i][ncols]
    return x, nullspace_from_rref(rows, pivots, p, ncols)


def nullspace_from_rref(rows, pivots, p, ncols) -> List[List[int]]:
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for i, col in enumerate(pivots):
            v[col] = -rows[i][free] % p
        basis.append(v)
    return basis


def rank(A: Sequence[Sequence[int]], p: int, ncols: int) -> int:
    _, piv = row_reduce([list(r) for r in A], p, ncols)
    return len(piv)
