"""Exact linear algebra over Fraction entries.

Matrices are numpy arrays with dtype=object holding fractions.Fraction.
Kernel/rank computations go through fraction-free (Bareiss) elimination on
integer matrices so that pivot decisions are exact and intermediate entries
stay single integers instead of normalized fractions.
"""

from fractions import Fraction
from math import gcd

import numpy as np


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def fmat(rows) -> np.ndarray:
    """Object-dtype matrix of Fractions from nested lists/arrays."""
    a = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            a[i, j] = frac(v)
    return a


def fzeros(nrows, ncols) -> np.ndarray:
    a = np.empty((nrows, ncols), dtype=object)
    a[:] = Fraction(0)
    return a


def fidentity(n) -> np.ndarray:
    a = fzeros(n, n)
    for i in range(n):
        a[i, i] = Fraction(1)
    return a


def to_float(a: np.ndarray) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in a], dtype=float)


def is_zero(a: np.ndarray) -> bool:
    return all(v == 0 for v in a.flat)


def mat_eq(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a @ x = b exactly; b may be a matrix of right-hand sides."""
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("square matrix required")
    rhs = b.reshape(n, -1) if b.ndim == 1 else b
    m = np.concatenate([a.copy(), rhs.copy()], axis=1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r, col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
        m[col] = m[col] / m[col, col]
        for r in range(n):
            if r != col and m[r, col] != 0:
                m[r] = m[r] - m[r, col] * m[col]
    x = m[:, n:]
    return x[:, 0] if b.ndim == 1 else x


def inv(a: np.ndarray) -> np.ndarray:
    return solve(a, fidentity(a.shape[0]))


def det(a: np.ndarray) -> Fraction:
    n = a.shape[0]
    m = a.copy()
    sign = 1
    out = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r, col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
            sign = -sign
        out *= m[col, col]
        for r in range(col + 1, n):
            if m[r, col] != 0:
                m[r] = m[r] - (m[r, col] / m[col, col]) * m[col]
    return sign * out


def _clear_rows(a: np.ndarray):
    """Integer matrix with the same row space / kernel, via per-row lcm."""
    out = []
    for row in a:
        denlcm = 1
        for v in row:
            v = frac(v)
            denlcm = denlcm * v.denominator // gcd(denlcm, v.denominator)
        out.append([int(frac(v) * denlcm) for v in row])
    return out


def _bareiss_echelon(m):
    """In-place fraction-free elimination; returns list of pivot columns."""
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        pc = m[r][c]
        for i in range(r + 1, nrows):
            mic = m[i][c]
            row_i = m[i]
            row_r = m[r]
            if mic == 0:
                for j in range(c, ncols):
                    row_i[j] = (pc * row_i[j]) // prev
            else:
                for j in range(c, ncols):
                    row_i[j] = (pc * row_i[j] - mic * row_r[j]) // prev
        pivots.append(c)
        prev = pc
        r += 1
        if r == nrows:
            break
    return pivots


def rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    m = _clear_rows(a)
    return len(_bareiss_echelon(m))


def nullspace(a: np.ndarray) -> list[np.ndarray]:
    """Exact basis of {x : a @ x = 0}, one Fraction vector per free column."""
    nrows, ncols = a.shape
    if nrows == 0 or ncols == 0:
        return [_unit(ncols, j) for j in range(ncols)]
    m = _clear_rows(a)
    pivots = _bareiss_echelon(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = np.empty(ncols, dtype=object)
        x[:] = Fraction(0)
        x[fc] = Fraction(1)
        # back-substitute through the echelon rows, bottom up
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            s = Fraction(0)
            for c in range(pc + 1, ncols):
                if m[r][c] != 0 and x[c] != 0:
                    s += Fraction(m[r][c]) * x[c]
            x[pc] = -s / m[r][pc]
        basis.append(_normalize_int(x))
    return basis


def _unit(n, j):
    x = np.empty(n, dtype=object)
    x[:] = Fraction(0)
    x[j] = Fraction(1)
    return x


def _normalize_int(x: np.ndarray) -> np.ndarray:
    """Scale a rational vector to coprime integer entries (first nonzero > 0)."""
    denlcm = 1
    for v in x:
        denlcm = denlcm * v.denominator // gcd(denlcm, v.denominator)
    ints = [int(v * denlcm) for v in x]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    lead = next((v for v in ints if v != 0), 1)
    if lead < 0:
        ints = [-v for v in ints]
    out = np.empty(len(ints), dtype=object)
    for i, v in enumerate(ints):
        out[i] = Fraction(v)
    return out
