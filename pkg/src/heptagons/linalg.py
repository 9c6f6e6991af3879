"""Fraction-free elimination over exact fields and over F_p."""
from __future__ import annotations

from fractions import Fraction


def _is_zero(x) -> bool:
    return x == 0


def echelon(matrix):
    """Bareiss fraction-free row echelon form.

    Pivots are the first nonzero entry in each column (rows are swapped in
    place on a copy).  Returns ``(rows, pivot_columns, sign)`` where ``sign``
    tracks row swaps.  Works over any exact field whose elements support
    ``+ - * /`` and comparison with 0.
    """
    rows = [list(r) for r in matrix]
    if not rows:
        return rows, [], 1
    n_rows, n_cols = len(rows), len(rows[0])
    prev = 1
    pivots = []
    sign = 1
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        k = next((i for i in range(r, n_rows) if not _is_zero(rows[i][c])), None)
        if k is None:
            continue
        if k != r:
            rows[r], rows[k] = rows[k], rows[r]
            sign = -sign
        piv = rows[r][c]
        inv_prev = None if prev == 1 else 1 / (Fraction(prev) if isinstance(prev, int) else prev)
        for i in range(r + 1, n_rows):
            lead = rows[i][c]
            row_i = rows[i]
            row_r = rows[r]
            for j in range(c + 1, n_cols):
                v = piv * row_i[j]
                if not _is_zero(lead) and not _is_zero(row_r[j]):
                    v = v - lead * row_r[j]
                row_i[j] = v if inv_prev is None else v * inv_prev
            row_i[c] = 0 * piv
        # entries left of c in rows below are already zero
        pivots.append(c)
        prev = piv
        r += 1
    return rows, pivots, sign


def rank(matrix) -> int:
    return len(echelon(matrix)[1])


def det(matrix):
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    rows, pivots, sign = echelon(matrix)
    if len(pivots) < n:
        return 0 * matrix[0][0]
    # Bareiss: the last pivot is the determinant
    return rows[n - 1][n - 1] if sign == 1 else -rows[n - 1][n - 1]


def normalize_vector(v):
    """Scale so the first nonzero entry is 1."""
    for x in v:
        if not _is_zero(x):
            inv = 1 / (Fraction(x) if isinstance(x, int) else x)
            return [y * inv for y in v]
    raise ValueError("zero vector has no canonical scaling")


def nullspace(matrix, n_cols: int | None = None):
    """Basis of the right kernel, each vector canonically normalized."""
    rows, pivots, _ = echelon(matrix)
    if n_cols is None:
        n_cols = len(matrix[0])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n_cols
        x[f] = Fraction(1)
        for i in range(len(pivots) - 1, -1, -1):
            pc = pivots[i]
            acc = Fraction(0)
            for j in range(pc + 1, n_cols):
                if not _is_zero(x[j]) and not _is_zero(rows[i][j]):
                    acc = acc + rows[i][j] * x[j]
            x[pc] = -acc / rows[i][pc] if not _is_zero(acc) else Fraction(0)
        basis.append(normalize_vector(x))
    return basis


def rank_mod_p(matrix, p: int) -> int:
    rows = [[int(x) % p for x in row] for row in matrix]
    if not rows:
        return 0
    n_rows, n_cols = len(rows), len(rows[0])
    r = 0
    for c in range(n_cols):
        k = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = pow(rows[r][c], -1, p)
        pivot_row = [x * inv % p for x in rows[r]]
        rows[r] = pivot_row
        for i in range(r + 1, n_rows):
            f = rows[i][c]
            if f:
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], pivot_row)]
        r += 1
        if r == n_rows:
            break
    return r


def det_mod_p(matrix, p: int) -> int:
    n = len(matrix)
    rows = [[int(x) % p for x in row] for row in matrix]
    d = 1
    for c in range(n):
        k = next((i for i in range(c, n) if rows[i][c]), None)
        if k is None:
            return 0
        if k != c:
            rows[c], rows[k] = rows[k], rows[c]
            d = -d
        d = d * rows[c][c] % p
        inv = pow(rows[c][c], -1, p)
        for i in range(c + 1, n):
            f = rows[i][c] * inv % p
            if f:
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[c])]
    return d % p
