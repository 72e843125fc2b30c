import math

import pytest
from hypothesis import given, settings, strategies as st

from revdoe import estimation as est
from revdoe import linalg
from revdoe.errors import NumericalError, ValidationError


def make_dataset(rows):
    return est.CostDataset(rows=tuple(rows))


class TestCostDataset:
    def test_rejects_empty(self):
        with pytest.raises(ValidationError, match="no rows"):
            est.CostDataset(rows=())

    def test_rejects_nonpositive_cost_by_row(self):
        with pytest.raises(ValidationError, match="row 2: power_cooling_cost"):
            make_dataset([(50.0, 10.0, 100.0), (50.0, -1.0, 100.0)])

    def test_rejects_nonpositive_revenue(self):
        with pytest.raises(ValidationError, match="row 1: revenue"):
            make_dataset([(50.0, 10.0, 0.0)])

    def test_revenue_may_be_absent(self):
        data = make_dataset([(50.0, 10.0, None), (60.0, 20.0, None)])
        assert len(data) == 2
        with pytest.raises(ValidationError, match="row 1: revenue"):
            data.revenues()


class TestLogLinearize:
    def test_roles_and_values(self):
        data = make_dataset([
            (math.e, math.e**2, math.e**3),
            (math.e**2, math.e, math.e**2),
            (math.e**3, math.e**2, math.e),
        ])
        matrix = est.log_linearize(data)
        assert matrix.roles == ("intercept", "log_server", "log_power")
        assert matrix.rows[0] == pytest.approx((1.0, 1.0, 2.0))
        assert matrix.rows[2] == pytest.approx((1.0, 3.0, 2.0))
        assert matrix.response == pytest.approx((3.0, 2.0, 1.0))

    def test_without_intercept(self):
        data = make_dataset([(50.0, 10.0, 100.0), (60.0, 20.0, 150.0), (70.0, 30.0, 180.0)])
        matrix = est.log_linearize(data, with_intercept=False)
        assert matrix.roles == ("log_server", "log_power")
        assert len(matrix.rows[0]) == 2

    def test_needs_revenue(self):
        data = make_dataset([(50.0, 10.0, None), (60.0, 20.0, 120.0), (1.0, 1.0, 1.0)])
        with pytest.raises(ValidationError, match="row 1"):
            est.log_linearize(data)


class TestDesignMatrix:
    def test_ragged_rejected(self):
        with pytest.raises(ValidationError, match="ragged"):
            est.DesignMatrix(rows=((1.0, 2.0), (1.0,)), roles=("a", "b"), response=(1.0, 2.0))

    def test_underdetermined_rejected(self):
        with pytest.raises(ValidationError, match="underdetermined"):
            est.DesignMatrix(rows=((1.0, 2.0),), roles=("a", "b"), response=(1.0,))


class TestOls:
    def test_hand_worked_line(self):
        # y on (1, x) for points (1,1), (2,2), (3,2), (4,3):
        # normal equations give intercept 0.5, slope 0.6
        matrix = est.DesignMatrix(
            rows=((1.0, 1.0), (1.0, 2.0), (1.0, 3.0), (1.0, 4.0)),
            roles=("intercept", "x"),
            response=(1.0, 2.0, 2.0, 3.0),
        )
        fit = est.ols(matrix)
        assert fit.intercept == pytest.approx(0.5, rel=1e-12)
        assert fit.elasticities[0] == pytest.approx(0.6, rel=1e-12)
        assert fit.rss == pytest.approx(0.2, rel=1e-9)
        assert fit.ssy == pytest.approx(18.0)
        assert fit.ss0 == pytest.approx(16.0)
        assert fit.sst == pytest.approx(2.0)
        assert fit.sse == pytest.approx(0.2, rel=1e-9)
        assert fit.ssr == pytest.approx(1.8, rel=1e-9)
        assert fit.r_squared == pytest.approx(0.9, rel=1e-9)
        assert fit.r_multiple == pytest.approx(math.sqrt(0.9), rel=1e-9)
        assert not fit.degenerate_sst

    def test_collinear_columns_named(self):
        matrix = est.DesignMatrix(
            rows=((1.0, 2.0), (2.0, 4.0), (3.0, 6.0)),
            roles=("a", "b"),
            response=(1.0, 2.0, 3.0),
        )
        with pytest.raises(NumericalError, match="positive definite"):
            est.ols(matrix)

    def test_constant_response_is_degenerate(self):
        matrix = est.DesignMatrix(
            rows=((1.0, 1.0), (1.0, 2.0), (1.0, 3.0)),
            roles=("intercept", "x"),
            response=(5.0, 5.0, 5.0),
        )
        fit = est.ols(matrix)
        assert fit.degenerate_sst
        assert fit.r_squared is None
        assert fit.r_multiple is None

    def test_exact_interpolation_reaches_r_squared_one(self):
        matrix = est.DesignMatrix(
            rows=((1.0, 1.0), (1.0, 2.0), (1.0, 3.0)),
            roles=("intercept", "x"),
            response=(2.0, 4.0, 6.0),
        )
        fit = est.ols(matrix)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.rss == pytest.approx(0.0, abs=1e-12)

    def test_recovers_elasticities_from_fixture(self, drs_dataset):
        fit = est.ols(est.log_linearize(drs_dataset))
        assert fit.elasticities[0] == pytest.approx(0.8, abs=1e-3)
        assert fit.elasticities[1] == pytest.approx(0.1, abs=1e-3)
        assert abs(fit.intercept) < 1e-2


class TestQpProblem:
    def test_asymmetric_h_rejected(self):
        with pytest.raises(ValidationError, match="symmetric"):
            est.QPProblem(h=((1.0, 0.5), (0.2, 1.0)), f=(0.0, 0.0))

    def test_constraint_shape_mismatch(self):
        with pytest.raises(ValidationError, match="row counts"):
            est.QPProblem(h=((1.0,),), f=(0.0,), c=((1.0,),), b=())


class TestSolveQp:
    def test_unconstrained_interior(self):
        # min x^2 + y^2 - 2x - 4y: optimum (1, 2), objective -5
        problem = est.QPProblem(h=((1.0, 0.0), (0.0, 1.0)), f=(-2.0, -4.0))
        sol = est.solve_qp(problem, (0.0, 0.0))
        assert sol.x == pytest.approx((1.0, 2.0), abs=1e-10)
        assert sol.objective == pytest.approx(-5.0, abs=1e-10)
        assert sol.active_set == ()
        assert sol.stationarity_residual <= 1e-7

    def test_one_dimensional_clipped_parabola(self):
        # min x^2 + 2x subject to x >= 0: clipped at 0 with multiplier 2
        problem = est.QPProblem(h=((1.0,),), f=(2.0,), c=((-1.0,),), b=(0.0,))
        sol = est.solve_qp(problem, (0.0,))
        assert sol.x[0] == pytest.approx(0.0, abs=1e-12)
        assert sol.active_set == (0,)
        assert sol.multipliers[0] == pytest.approx(2.0, abs=1e-10)

    def test_binding_constraint_with_multiplier(self):
        # interior optimum (1, 2) pushed to the half-plane x >= 2
        problem = est.QPProblem(
            h=((1.0, 0.0), (0.0, 1.0)),
            f=(-2.0, -4.0),
            c=((-1.0, 0.0),),
            b=(-2.0,),
        )
        sol = est.solve_qp(problem, (3.0, 0.0))
        assert sol.x == pytest.approx((2.0, 2.0), abs=1e-10)
        assert sol.multipliers[0] == pytest.approx(2.0, abs=1e-10)

    def test_equality_constraint(self):
        # min x^2 + y^2 on the line x + y = 2: optimum (1, 1)
        problem = est.QPProblem(
            h=((1.0, 0.0), (0.0, 1.0)),
            f=(0.0, 0.0),
            eq_c=((1.0, 1.0),),
            eq_b=(2.0,),
        )
        sol = est.solve_qp(problem, (2.0, 0.0))
        assert sol.x == pytest.approx((1.0, 1.0), abs=1e-10)
        assert sol.eq_multipliers[0] == pytest.approx(-2.0, abs=1e-10)

    def test_infeasible_start_rejected(self):
        problem = est.QPProblem(h=((1.0,),), f=(0.0,), c=((1.0,),), b=(1.0,))
        with pytest.raises(ValidationError, match="infeasible start"):
            est.solve_qp(problem, (2.0,))

    def test_unbounded_linear_program(self):
        # zero curvature, pure descent, nothing blocking
        problem = est.QPProblem(h=((0.0,),), f=(-1.0,))
        with pytest.raises(NumericalError, match="unbounded"):
            est.solve_qp(problem, (0.0,))

    def test_zero_curvature_blocked_by_constraint(self):
        # same ray, but x <= 5 stops it; LP optimum x = 5, multiplier 1
        problem = est.QPProblem(h=((0.0,),), f=(-1.0,), c=((1.0,),), b=(5.0,))
        sol = est.solve_qp(problem, (0.0,))
        assert sol.x[0] == pytest.approx(5.0, abs=1e-12)
        assert sol.multipliers[0] == pytest.approx(1.0, abs=1e-10)

    def test_iteration_cap(self):
        problem = est.QPProblem(h=((1.0,),), f=(2.0,), c=((-1.0,),), b=(0.0,))
        with pytest.raises(NumericalError, match="cap"):
            est.solve_qp(problem, (0.0,), max_iterations=0)

    def test_multipliers_are_nonnegative(self):
        problem = est.QPProblem(
            h=((2.0, 0.5), (0.5, 1.0)),
            f=(-3.0, -1.0),
            c=((-1.0, 0.0), (0.0, -1.0), (1.0, 1.0)),
            b=(0.0, 0.0, 1.0),
        )
        sol = est.solve_qp(problem, (0.0, 0.0))
        assert all(lam >= 0.0 for lam in sol.multipliers)
        assert sol.stationarity_residual <= 1e-7


def _coordinate_descent_box(h, f, sweeps=600):
    """Cyclic projected coordinate descent on min x'Hx + f'x, 0 <= x <= 1."""
    p = len(f)
    x = [0.0] * p
    for _ in range(sweeps):
        for j in range(p):
            linear = f[j] + 2.0 * sum(h[j][k] * x[k] for k in range(p) if k != j)
            x[j] = min(1.0, max(0.0, -linear / (2.0 * h[j][j])))
    return x


@st.composite
def box_qp(draw, dim=2):
    entries = st.floats(min_value=-2.0, max_value=2.0)
    m = [[draw(entries) for _ in range(dim)] for _ in range(dim)]
    # H = M'M + I/2 keeps curvature strictly positive
    h = [
        [
            sum(m[k][i] * m[k][j] for k in range(dim)) + (0.5 if i == j else 0.0)
            for j in range(dim)
        ]
        for i in range(dim)
    ]
    f = [draw(entries) for _ in range(dim)]
    return h, f


@given(box_qp(dim=2))
@settings(max_examples=60, deadline=None)
def test_qp_matches_coordinate_descent_on_random_boxes_2d(instance):
    h, f = instance
    dim = len(f)
    c = tuple(
        tuple(-1.0 if j == i else 0.0 for j in range(dim)) for i in range(dim)
    ) + tuple(tuple(1.0 if j == i else 0.0 for j in range(dim)) for i in range(dim))
    b = (0.0,) * dim + (1.0,) * dim
    problem = est.QPProblem(
        h=tuple(tuple(row) for row in h), f=tuple(f), c=c, b=b
    )
    sol = est.solve_qp(problem, (0.0,) * dim)
    oracle_x = _coordinate_descent_box(h, f)
    oracle_obj = linalg.dot(oracle_x, linalg.mat_vec(h, oracle_x)) + linalg.dot(f, oracle_x)
    assert sol.objective <= oracle_obj + 1e-8
    assert sol.x == pytest.approx(tuple(oracle_x), abs=1e-5)


@given(box_qp(dim=3))
@settings(max_examples=40, deadline=None)
def test_qp_matches_coordinate_descent_on_random_boxes_3d(instance):
    h, f = instance
    dim = len(f)
    c = tuple(
        tuple(-1.0 if j == i else 0.0 for j in range(dim)) for i in range(dim)
    ) + tuple(tuple(1.0 if j == i else 0.0 for j in range(dim)) for i in range(dim))
    b = (0.0,) * dim + (1.0,) * dim
    problem = est.QPProblem(h=tuple(tuple(row) for row in h), f=tuple(f), c=c, b=b)
    sol = est.solve_qp(problem, (0.0,) * dim)
    oracle_x = _coordinate_descent_box(h, f)
    oracle_obj = linalg.dot(oracle_x, linalg.mat_vec(h, oracle_x)) + linalg.dot(f, oracle_x)
    assert sol.objective <= oracle_obj + 1e-8


class TestConstrainedFit:
    def test_drs_interior_solution_matches_ols(self, drs_dataset):
        qp_fit = est.constrained_fit(drs_dataset)
        ls_fit = est.ols(est.log_linearize(drs_dataset))
        assert qp_fit.active_set == ()
        assert qp_fit.coefficients == pytest.approx(ls_fit.coefficients, abs=1e-9)

    def test_crs_lands_on_the_sum_constraint(self, crs_dataset):
        fit = est.constrained_fit(crs_dataset)
        # unconstrained optimum has alpha + beta just above 1, so the QP
        # projects onto the boundary
        assert 2 in fit.active_set
        assert sum(fit.elasticities) == pytest.approx(1.0, abs=1e-9)
        assert fit.elasticities[0] == pytest.approx(0.9, abs=1e-3)
        assert fit.elasticities[1] == pytest.approx(0.1, abs=1e-3)
        assert abs(fit.intercept) < 1e-3

    def test_elasticities_respect_strict_positivity(self, irs_dataset):
        fit = est.constrained_fit(irs_dataset)
        assert fit.elasticities[0] >= est.EPSILON_STRICT
        assert fit.elasticities[1] >= est.EPSILON_STRICT
        assert sum(fit.elasticities) <= 1.0 + 1e-12

    def test_custom_constraints_must_come_in_pairs(self, drs_dataset):
        with pytest.raises(ValidationError, match="both C and b"):
            est.constrained_fit(drs_dataset, c=((0.0, 1.0, 0.0),))

    def test_default_constraint_matrix_shape(self):
        c, b = est.default_elasticity_constraints()
        assert len(c) == len(b) == 3
        assert all(len(row) == 3 for row in c)
        # rows: alpha >= eps, beta >= eps, alpha + beta <= 1
        assert c[2] == (0.0, 1.0, 1.0) and b[2] == 1.0


class TestMlr:
    def test_leading_rows_split(self, crs_dataset):
        result = est.mlr(crs_dataset, log_space=True, zero_intercept=True, train_fraction=0.75)
        # floor(17 * 0.75) = 12 training rows, 5 held out
        assert len(result.predictions) == 5
        assert [p.row_index for p in result.predictions] == [12, 13, 14, 15, 16]

    def test_predictions_are_in_log_space_when_log_fitting(self, crs_dataset):
        result = est.mlr(crs_dataset, log_space=True, zero_intercept=True, train_fraction=0.9)
        for p in result.predictions:
            observed_raw = crs_dataset.rows[p.row_index][2]
            assert p.observed == pytest.approx(math.log(observed_raw), rel=1e-12)
            assert p.predicted == pytest.approx(p.observed, abs=0.05)

    def test_full_train_has_no_predictions(self, drs_dataset):
        result = est.mlr(drs_dataset, log_space=True, zero_intercept=True)
        assert result.predictions == ()

    def test_zero_intercept_omits_the_role(self, drs_dataset):
        result = est.mlr(drs_dataset, log_space=True, zero_intercept=True)
        assert "intercept" not in result.fit.roles
        assert result.fit.intercept == 0.0

    def test_raw_space_fit(self, drs_dataset):
        result = est.mlr(drs_dataset, log_space=False, zero_intercept=False)
        assert result.fit.roles == ("intercept", "server", "power")

    def test_train_fraction_validated(self, drs_dataset):
        for bad in (0.0, -0.5, 1.5):
            with pytest.raises(ValidationError, match="train_fraction"):
                est.mlr(drs_dataset, train_fraction=bad)

    def test_split_keeping_no_rows_rejected(self, drs_dataset):
        with pytest.raises(ValidationError, match="keeps no rows"):
            est.mlr(drs_dataset, train_fraction=0.01)
