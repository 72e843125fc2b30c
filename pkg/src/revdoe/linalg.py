"""Small dense linear algebra on plain Python lists.

Every system solved in this package is tiny (at most 4 regression
coefficients, KKT systems of order <= 7), so the solvers below favor
clarity and exact reproducibility over asymptotics. Two factorizations
cover all needs:

* Cholesky for the symmetric positive-definite normal equations, with a
  pivot tolerance so rank deficiency is reported by name instead of
  surfacing as a math-domain error.
* LU with partial pivoting for the (indefinite) KKT systems of the
  active-set solver.

Matrices are lists of row lists of floats; vectors are lists of floats.
Inputs are never mutated.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from .errors import NumericalError

Matrix = Sequence[Sequence[float]]
Vector = Sequence[float]

CHOLESKY_PIVOT_TOL = 1e-12


def dot(a: Vector, b: Vector) -> float:
    return sum(x * y for x, y in zip(a, b, strict=True))


def mat_vec(m: Matrix, v: Vector) -> list[float]:
    return [dot(row, v) for row in m]


def transpose(m: Matrix) -> list[list[float]]:
    return [list(col) for col in zip(*m, strict=True)]


def mat_mat(a: Matrix, b: Matrix) -> list[list[float]]:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def gram(a: Matrix) -> list[list[float]]:
    """A^T A for a tall matrix, symmetrized exactly."""
    at = transpose(a)
    g = [[dot(r, c) for c in at] for r in at]
    for i in range(len(g)):
        for j in range(i):
            s = 0.5 * (g[i][j] + g[j][i])
            g[i][j] = s
            g[j][i] = s
    return g


def norm2(v: Vector) -> float:
    return math.sqrt(dot(v, v))


def cholesky_factor(
    a: Matrix,
    pivot_tol: float = CHOLESKY_PIVOT_TOL,
    column_names: Sequence[str] | None = None,
) -> list[list[float]]:
    """Lower-triangular L with L L^T = a.

    Raises NumericalError naming the offending pivot (and column, when
    names are supplied) if a diagonal pivot falls at or below pivot_tol
    times the largest diagonal entry. That relative test keeps the check
    meaningful for both O(1) and O(1e4) scales of A^T A.
    """
    n = len(a)
    scale = max((abs(a[i][i]) for i in range(n)), default=1.0) or 1.0
    low = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = a[i][j] - sum(low[i][k] * low[j][k] for k in range(j))
            if i == j:
                if s <= pivot_tol * scale:
                    name = (
                        column_names[i]
                        if column_names is not None and i < len(column_names)
                        else f"column {i}"
                    )
                    raise NumericalError(
                        f"matrix is not positive definite: pivot {i} ({name}) "
                        f"is {s:.3e}, at or below tolerance {pivot_tol:.0e}"
                    )
                low[i][j] = math.sqrt(s)
            else:
                low[i][j] = s / low[j][j]
    return low


def cholesky_solve(
    a: Matrix,
    b: Vector,
    pivot_tol: float = CHOLESKY_PIVOT_TOL,
    column_names: Sequence[str] | None = None,
) -> list[float]:
    """Solve a x = b for symmetric positive-definite a."""
    low = cholesky_factor(a, pivot_tol, column_names)
    n = len(low)
    # forward: L y = b
    y = [0.0] * n
    for i in range(n):
        y[i] = (b[i] - sum(low[i][k] * y[k] for k in range(i))) / low[i][i]
    # backward: L^T x = y
    x = [0.0] * n
    for i in reversed(range(n)):
        x[i] = (y[i] - sum(low[k][i] * x[k] for k in range(i + 1, n))) / low[i][i]
    return x


def lu_solve(a: Matrix, b: Vector, pivot_tol: float = 1e-12) -> list[float]:
    """Solve a x = b by Gaussian elimination with partial pivoting.

    Used for KKT systems, which are symmetric but indefinite. Raises
    NumericalError on a (relatively) zero pivot.
    """
    n = len(a)
    m = [list(row) for row in a]
    x = list(b)
    scale = max((abs(v) for row in m for v in row), default=1.0) or 1.0
    perm = list(range(n))
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col]))
        if abs(m[piv][col]) <= pivot_tol * scale:
            raise NumericalError(f"singular system: pivot {col} below tolerance")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            x[col], x[piv] = x[piv], x[col]
            perm[col], perm[piv] = perm[piv], perm[col]
        inv = 1.0 / m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] * inv
            if factor != 0.0:
                m[r][col] = 0.0
                for c in range(col + 1, n):
                    m[r][c] -= factor * m[col][c]
                x[r] -= factor * x[col]
    for i in reversed(range(n)):
        x[i] = (x[i] - sum(m[i][k] * x[k] for k in range(i + 1, n))) / m[i][i]
    return x


def is_singular(a: Matrix, pivot_tol: float = 1e-12) -> bool:
    """True when lu_solve would reject `a` as rank deficient."""
    try:
        lu_solve(a, [0.0] * len(a), pivot_tol)
    except NumericalError:
        return True
    return False
