"""Elasticity recovery from cost/revenue data.

Three routes to the same question (what are the output elasticities of
the two cost factors?):

* `ols` - log-linear least squares by normal equations and Cholesky;
* `constrained_fit` - the same objective as a quadratic program
  min x^T (A^T A) x - 2 y^T A x subject to elasticity positivity and
  alpha + beta <= 1, solved with a primal active-set method;
* `mlr` - multiple linear regression (raw or log space, optional zero
  intercept, deterministic leading-rows train split) with the textbook
  variation diagnostics SSY, SS0, SST, SSE, SSR, R^2, R.

The QP convention throughout is min x^T H x + f^T x (no 1/2 factor), so
stationarity reads 2 H x + f + C^T lambda = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import linalg
from .errors import NumericalError, ValidationError

#: Strict inequalities like alpha > 0 are realized as alpha >= EPSILON_STRICT.
EPSILON_STRICT = 1e-9

_FEASIBILITY_TOL = 1e-9
_MULTIPLIER_TOL = 1e-9
_STATIONARITY_TOL = 1e-7
_CURVATURE_TOL = 1e-12


@dataclass(frozen=True)
class CostDataset:
    """Rows of (server_cost, power_cooling_cost, revenue), million USD.

    Revenue may be None when a file carries only the two cost columns
    (enough for PRF or Gaussian fitting); fits reject such rows by index.
    """

    rows: tuple[tuple[float, float, float | None], ...]
    label: str | None = None

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValidationError("dataset has no rows")
        cleaned = []
        for i, row in enumerate(self.rows):
            if len(row) != 3:
                raise ValidationError(f"row {i + 1}: expected 3 fields, got {len(row)}")
            server, power, revenue = row
            for name, value in (("server_cost", server), ("power_cooling_cost", power)):
                value = float(value)
                if not math.isfinite(value) or value <= 0.0:
                    raise ValidationError(f"row {i + 1}: {name} must be positive, got {value}")
            if revenue is not None:
                revenue = float(revenue)
                if not math.isfinite(revenue) or revenue <= 0.0:
                    raise ValidationError(f"row {i + 1}: revenue must be positive, got {revenue}")
            cleaned.append((float(server), float(power), revenue))
        object.__setattr__(self, "rows", tuple(cleaned))

    def __len__(self) -> int:
        return len(self.rows)

    def revenues(self) -> list[float]:
        out = []
        for i, (_, _, revenue) in enumerate(self.rows):
            if revenue is None:
                raise ValidationError(f"row {i + 1}: revenue column is required for fitting")
            out.append(revenue)
        return out


@dataclass(frozen=True)
class DesignMatrix:
    """Regression system: row-major matrix, column roles, response vector."""

    rows: tuple[tuple[float, ...], ...]
    roles: tuple[str, ...]
    response: tuple[float, ...]

    def __post_init__(self) -> None:
        n = len(self.rows)
        p = len(self.roles)
        if n == 0 or p == 0:
            raise ValidationError("design matrix is empty")
        if any(len(r) != p for r in self.rows):
            raise ValidationError("ragged design matrix")
        if len(self.response) != n:
            raise ValidationError(f"response length {len(self.response)} != {n} rows")
        if n < p:
            raise ValidationError(f"underdetermined system: {n} rows for {p} columns")


@dataclass(frozen=True)
class QPProblem:
    """min x^T H x + f^T x  s.t.  C x <= b  (and A_eq x = b_eq if given)."""

    h: tuple[tuple[float, ...], ...]
    f: tuple[float, ...]
    c: tuple[tuple[float, ...], ...] = ()
    b: tuple[float, ...] = ()
    eq_c: tuple[tuple[float, ...], ...] = ()
    eq_b: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        p = len(self.f)
        if len(self.h) != p or any(len(row) != p for row in self.h):
            raise ValidationError("H must be square and match f")
        scale = max((abs(v) for row in self.h for v in row), default=1.0) or 1.0
        for i in range(p):
            for j in range(p):
                if abs(self.h[i][j] - self.h[j][i]) > 1e-12 * scale:
                    raise ValidationError(f"H is not symmetric at ({i}, {j})")
        if len(self.c) != len(self.b):
            raise ValidationError("C and b row counts differ")
        if any(len(row) != p for row in self.c):
            raise ValidationError("C column count must match f")
        if len(self.eq_c) != len(self.eq_b):
            raise ValidationError("equality C and b row counts differ")
        if any(len(row) != p for row in self.eq_c):
            raise ValidationError("equality C column count must match f")


@dataclass(frozen=True)
class QPSolution:
    x: tuple[float, ...]
    objective: float
    active_set: tuple[int, ...]
    multipliers: tuple[float, ...]
    eq_multipliers: tuple[float, ...]
    iterations: int
    stationarity_residual: float


@dataclass(frozen=True)
class FitResult:
    """Fitted coefficients plus the variation diagnostics of the response."""

    intercept: float
    elasticities: tuple[float, ...]
    coefficients: tuple[float, ...]
    roles: tuple[str, ...]
    rss: float
    active_set: tuple[int, ...]
    ssy: float
    ss0: float
    sst: float
    sse: float
    ssr: float
    r_squared: float | None
    r_multiple: float | None
    degenerate_sst: bool


@dataclass(frozen=True)
class HeldOutPrediction:
    row_index: int
    predicted: float
    observed: float


@dataclass(frozen=True)
class MlrResult:
    fit: FitResult
    predictions: tuple[HeldOutPrediction, ...]


def log_linearize(data: CostDataset, with_intercept: bool = True) -> DesignMatrix:
    """ln(revenue) against [1,] ln(server_cost), ln(power_cooling_cost)."""
    revenues = data.revenues()
    rows = []
    for server, power, _ in data.rows:
        regressors = (math.log(server), math.log(power))
        rows.append((1.0,) + regressors if with_intercept else regressors)
    roles = ("intercept", "log_server", "log_power") if with_intercept else ("log_server", "log_power")
    response = tuple(math.log(r) for r in revenues)
    return DesignMatrix(rows=tuple(rows), roles=roles, response=response)


def _raw_matrix(data: CostDataset, with_intercept: bool) -> DesignMatrix:
    revenues = data.revenues()
    rows = []
    for server, power, _ in data.rows:
        regressors = (server, power)
        rows.append((1.0,) + regressors if with_intercept else regressors)
    roles = ("intercept", "server", "power") if with_intercept else ("server", "power")
    return DesignMatrix(rows=tuple(rows), roles=roles, response=tuple(revenues))


def _finish_fit(
    matrix: DesignMatrix, coefficients: Sequence[float], active_set: tuple[int, ...] = ()
) -> FitResult:
    y = matrix.response
    n = len(y)
    x = list(coefficients)
    fitted = [linalg.dot(row, x) for row in matrix.rows]
    rss = sum((yi - fi) ** 2 for yi, fi in zip(y, fitted))
    ssy = sum(yi * yi for yi in y)
    mean = sum(y) / n
    ss0 = n * mean * mean
    sst = ssy - ss0
    # textbook shortcut, equal to the residual sum at a least-squares optimum
    aty = [linalg.dot(col, y) for col in linalg.transpose(matrix.rows)]
    sse = ssy - linalg.dot(x, aty)
    ssr = sst - sse
    degenerate = sst <= 1e-12 * max(ssy, 1.0)
    r_squared = None if degenerate else ssr / sst
    r_multiple = None if r_squared is None else math.sqrt(max(r_squared, 0.0))
    if "intercept" in matrix.roles:
        k = matrix.roles.index("intercept")
        intercept = x[k]
        slopes = tuple(v for i, v in enumerate(x) if i != k)
    else:
        intercept = 0.0
        slopes = tuple(x)
    return FitResult(
        intercept=intercept,
        elasticities=slopes,
        coefficients=tuple(x),
        roles=matrix.roles,
        rss=rss,
        active_set=active_set,
        ssy=ssy,
        ss0=ss0,
        sst=sst,
        sse=sse,
        ssr=ssr,
        r_squared=r_squared,
        r_multiple=r_multiple,
        degenerate_sst=degenerate,
    )


def ols(matrix: DesignMatrix) -> FitResult:
    """Least squares by the normal equations A^T A x = A^T y."""
    gram = linalg.gram(matrix.rows)
    aty = [linalg.dot(col, matrix.response) for col in linalg.transpose(matrix.rows)]
    coefficients = linalg.cholesky_solve(gram, aty, column_names=matrix.roles)
    return _finish_fit(matrix, coefficients)


def _active_rows(problem: QPProblem, working: list[int]) -> list[list[float]]:
    rows = [list(problem.eq_c[i]) for i in range(len(problem.eq_c))]
    rows.extend(list(problem.c[i]) for i in working)
    return rows


def solve_qp(
    problem: QPProblem,
    start: Sequence[float],
    max_iterations: int | None = None,
) -> QPSolution:
    """Primal active-set method for a PSD quadratic program.

    The working set begins at the constraints active at the (feasible)
    start; each iteration solves the equality-constrained subproblem via
    its KKT system, then either steps to the nearest blocking constraint
    or drops the most negative multiplier. A singular KKT system is
    handled by moving along a projected zero-curvature descent direction;
    if no constraint blocks that ray the problem is unbounded.
    """
    p = len(problem.f)
    x = [float(v) for v in start]
    if len(x) != p:
        raise ValidationError(f"start has {len(x)} entries for {p} variables")
    m = len(problem.c)
    for i in range(m):
        if linalg.dot(problem.c[i], x) > problem.b[i] + _FEASIBILITY_TOL:
            raise ValidationError(f"infeasible start: constraint {i} violated")
    for i in range(len(problem.eq_c)):
        if abs(linalg.dot(problem.eq_c[i], x) - problem.eq_b[i]) > _FEASIBILITY_TOL:
            raise ValidationError(f"infeasible start: equality {i} violated")

    cap = max_iterations if max_iterations is not None else max(3**m, 1) + 1
    h2 = [[2.0 * problem.h[i][j] for j in range(p)] for i in range(p)]
    working = [
        i for i in range(m)
        if abs(linalg.dot(problem.c[i], x) - problem.b[i]) <= _FEASIBILITY_TOL
    ]
    n_eq = len(problem.eq_c)
    iterations = 0
    while True:
        iterations += 1
        if iterations > cap:
            raise NumericalError(
                f"active-set iteration cap {cap} exceeded (working set cycling?)"
            )
        grad = [2.0 * linalg.dot(problem.h[i], x) + problem.f[i] for i in range(p)]
        rows = _active_rows(problem, working)
        k = len(rows)
        kkt = [[0.0] * (p + k) for _ in range(p + k)]
        rhs = [0.0] * (p + k)
        for i in range(p):
            for j in range(p):
                kkt[i][j] = h2[i][j]
            rhs[i] = -grad[i]
        for a, row in enumerate(rows):
            for j in range(p):
                kkt[p + a][j] = row[j]
                kkt[j][p + a] = row[j]
            target = problem.eq_b[a] if a < n_eq else problem.b[working[a - n_eq]]
            rhs[p + a] = target - linalg.dot(row, x)
        try:
            sol = linalg.lu_solve(kkt, rhs)
        except NumericalError:
            step = _zero_curvature_step(problem, x, grad, working, h2)
            x, added = step
            if added is not None:
                working.append(added)
                working.sort()
            continue
        d = sol[:p]
        lam = sol[p:]
        if linalg.norm2(d) <= 1e-11 * (1.0 + linalg.norm2(x)):
            ineq_lam = lam[n_eq:]
            if not ineq_lam or min(ineq_lam) >= -_MULTIPLIER_TOL:
                return _package_solution(problem, x, working, lam, iterations)
            worst = min(range(len(ineq_lam)), key=lambda i: ineq_lam[i])
            working.pop(worst)
            continue
        # step toward the EQP optimum, stopping at the first blocking constraint
        t = 1.0
        blocker = None
        for i in range(m):
            if i in working:
                continue
            ci_d = linalg.dot(problem.c[i], d)
            if ci_d > _CURVATURE_TOL:
                slack = problem.b[i] - linalg.dot(problem.c[i], x)
                ratio = slack / ci_d
                if ratio < t - 1e-15:
                    t = max(ratio, 0.0)
                    blocker = i
        x = [xi + t * di for xi, di in zip(x, d)]
        if blocker is not None:
            working.append(blocker)
            working.sort()


def _zero_curvature_step(
    problem: QPProblem,
    x: list[float],
    grad: list[float],
    working: list[int],
    h2: list[list[float]],
) -> tuple[list[float], int | None]:
    """Handle a singular KKT system: ride a flat descent direction.

    Projects -grad onto the null space of the working constraints. Zero
    curvature along that ray with a negative slope means the objective
    decreases forever unless some inactive constraint blocks; no blocker
    means the problem is unbounded.
    """
    p = len(x)
    rows = _active_rows(problem, working)
    d = [-g for g in grad]
    if rows:
        gram_w = [[linalg.dot(r1, r2) for r2 in rows] for r1 in rows]
        try:
            mu = linalg.lu_solve(gram_w, [linalg.dot(r, d) for r in rows])
        except NumericalError as exc:
            raise NumericalError(f"degenerate working set in QP: {exc}") from exc
        for coef, row in zip(mu, rows):
            for j in range(p):
                d[j] -= coef * row[j]
    norm_d = linalg.norm2(d)
    if norm_d <= 1e-12 * (1.0 + linalg.norm2(grad)):
        raise NumericalError("singular KKT system with no descent direction")
    curvature = linalg.dot(d, linalg.mat_vec(h2, d))
    if curvature > _CURVATURE_TOL * norm_d * norm_d:
        raise NumericalError("singular KKT system with curved descent direction")
    t_block = math.inf
    blocker = None
    for i in range(len(problem.c)):
        if i in working:
            continue
        ci_d = linalg.dot(problem.c[i], d)
        if ci_d > _CURVATURE_TOL:
            ratio = (problem.b[i] - linalg.dot(problem.c[i], x)) / ci_d
            if ratio < t_block:
                t_block = ratio
                blocker = i
    if blocker is None:
        raise NumericalError("unbounded problem: zero-curvature descent direction never blocked")
    new_x = [xi + t_block * di for xi, di in zip(x, d)]
    return new_x, blocker


def _package_solution(
    problem: QPProblem,
    x: list[float],
    working: list[int],
    lam: list[float],
    iterations: int,
) -> QPSolution:
    p = len(x)
    n_eq = len(problem.eq_c)
    eq_lam = tuple(lam[:n_eq])
    multipliers = [0.0] * len(problem.c)
    for idx, lam_i in zip(working, lam[n_eq:]):
        multipliers[idx] = max(lam_i, 0.0)
    residual = [2.0 * linalg.dot(problem.h[i], x) + problem.f[i] for i in range(p)]
    for lam_i, row in zip(multipliers, problem.c):
        for j in range(p):
            residual[j] += lam_i * row[j]
    for nu, row in zip(eq_lam, problem.eq_c):
        for j in range(p):
            residual[j] += nu * row[j]
    res_norm = linalg.norm2(residual)
    if res_norm > _STATIONARITY_TOL:
        raise NumericalError(f"stationarity residual {res_norm:.2e} above tolerance")
    objective = linalg.dot(x, linalg.mat_vec(problem.h, x)) + linalg.dot(problem.f, x)
    return QPSolution(
        x=tuple(x),
        objective=objective,
        active_set=tuple(sorted(working)),
        multipliers=tuple(multipliers),
        eq_multipliers=eq_lam,
        iterations=iterations,
        stationarity_residual=res_norm,
    )


def default_elasticity_constraints() -> tuple[tuple[tuple[float, ...], ...], tuple[float, ...]]:
    """alpha >= eps, beta >= eps, alpha + beta <= 1 over (K', alpha, beta)."""
    c = ((0.0, -1.0, 0.0), (0.0, 0.0, -1.0), (0.0, 1.0, 1.0))
    b = (-EPSILON_STRICT, -EPSILON_STRICT, 1.0)
    return c, b


#: Feasible active-set seed: zero intercept, elasticities (0.4, 0.1).
DEFAULT_QP_START = (0.0, 0.4, 0.1)


def constrained_fit(
    data: CostDataset,
    c: Sequence[Sequence[float]] | None = None,
    b: Sequence[float] | None = None,
    start: Sequence[float] | None = None,
) -> FitResult:
    """Log-linear least squares under elasticity constraints, via QP."""
    if (c is None) != (b is None):
        raise ValidationError("custom constraints need both C and b")
    matrix = log_linearize(data, with_intercept=True)
    if c is None:
        c_rows, b_vals = default_elasticity_constraints()
    else:
        c_rows = tuple(tuple(float(v) for v in row) for row in c)
        b_vals = tuple(float(v) for v in b)  # type: ignore[union-attr]
    gram = linalg.gram(matrix.rows)
    aty = [linalg.dot(col, matrix.response) for col in linalg.transpose(matrix.rows)]
    problem = QPProblem(
        h=tuple(tuple(row) for row in gram),
        f=tuple(-2.0 * v for v in aty),
        c=c_rows,
        b=b_vals,
    )
    seed = tuple(float(v) for v in (start if start is not None else DEFAULT_QP_START))
    solution = solve_qp(problem, seed)
    return _finish_fit(matrix, solution.x, active_set=solution.active_set)


def mlr(
    data: CostDataset,
    log_space: bool = False,
    zero_intercept: bool = False,
    train_fraction: float = 1.0,
) -> MlrResult:
    """Multiple linear regression with a deterministic leading-rows split.

    The interaction term is never included; regressors are the two cost
    columns (log-transformed when log_space). Diagnostics are computed on
    the training rows; predictions are returned for the held-out tail in
    the regression's response space.
    """
    if not 0.0 < train_fraction <= 1.0:
        raise ValidationError(f"train_fraction must lie in (0, 1], got {train_fraction}")
    n = len(data)
    n_train = int(math.floor(n * train_fraction))
    if n_train < 1:
        raise ValidationError(f"train split of {n} rows at {train_fraction} keeps no rows")
    train = CostDataset(rows=data.rows[:n_train], label=data.label)
    build = log_linearize if log_space else _raw_matrix
    matrix = build(train, not zero_intercept)
    fit = ols(matrix)
    predictions = []
    for idx in range(n_train, n):
        server, power, revenue = data.rows[idx]
        if revenue is None:
            raise ValidationError(f"row {idx + 1}: revenue column is required for fitting")
        if log_space:
            regressors = (math.log(server), math.log(power))
            observed = math.log(revenue)
        else:
            regressors = (server, power)
            observed = revenue
        row = regressors if zero_intercept else (1.0,) + regressors
        predictions.append(
            HeldOutPrediction(
                row_index=idx,
                predicted=linalg.dot(row, fit.coefficients),
                observed=observed,
            )
        )
    return MlrResult(fit=fit, predictions=tuple(predictions))
