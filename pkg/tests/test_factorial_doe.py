import math

import pytest
from hypothesis import given, strategies as st

from revdoe import factorial_doe as doe
from revdoe import model_core, stats_lab
from revdoe.errors import ValidationError

finite_obs = st.floats(min_value=-1e6, max_value=1e6)


def design_from_means(means, r=1, deviation=0.0):
    """Cells holding r observations each, centered on the given means."""
    cells = {}
    for key, mean in zip(doe.CELL_ORDER, means):
        if r == 1:
            cells[key] = (mean,)
        else:
            obs = [mean + deviation if k % 2 == 0 else mean - deviation for k in range(r)]
            cells[key] = tuple(obs)
    return doe.Design22(cells=cells)


class TestCodeLevels:
    def test_low_type1_pair(self):
        assert doe.code_levels((10.0, 50.0)) == (-1, -1)

    def test_high_type2_pair(self):
        assert doe.code_levels((28.0, 60.0)) == (1, 1)

    def test_boundaries_are_inclusive(self):
        assert doe.code_levels((15.0, 55.0)) == (-1, -1)
        assert doe.code_levels((16.0, 56.0)) == (1, 1)
        assert doe.code_levels((5.0, 45.0)) == (-1, -1)
        assert doe.code_levels((40.0, 65.0)) == (1, 1)

    def test_gap_cost_is_rejected_naming_the_factor(self):
        with pytest.raises(ValidationError, match="factor 1 cost 42"):
            doe.code_levels((42.0, 50.0))

    def test_factor2_outside_both_intervals(self):
        # 68 falls past the default type-2 interval; strict coding refuses
        with pytest.raises(ValidationError, match="factor 2 cost 68"):
            doe.code_levels((38.0, 68.0))

    def test_widened_coding_admits_the_same_pair(self):
        widened = doe.LevelCoding(factor2_type2=(56.0, 80.0))
        assert doe.code_levels((38.0, 68.0), widened) == (1, 1)

    def test_overlapping_intervals_rejected(self):
        with pytest.raises(ValidationError, match="overlap"):
            doe.LevelCoding(factor1_low=(5.0, 20.0), factor1_high=(16.0, 40.0))

    def test_unordered_interval_rejected(self):
        with pytest.raises(ValidationError, match="not ordered"):
            doe.LevelCoding(factor1_low=(15.0, 5.0))


class TestDesign22:
    def test_missing_cell(self):
        cells = {key: (1.0,) for key in doe.CELL_ORDER[:3]}
        with pytest.raises(ValidationError, match="missing"):
            doe.Design22(cells=cells)

    def test_unequal_replicates(self):
        cells = {key: (1.0,) for key in doe.CELL_ORDER}
        cells[(1, 1)] = (1.0, 2.0)
        with pytest.raises(ValidationError, match="replicate"):
            doe.Design22(cells=cells)

    def test_unknown_cell_key(self):
        cells = {key: (1.0,) for key in doe.CELL_ORDER}
        cells[(0, 1)] = (1.0,)
        with pytest.raises(ValidationError, match="unexpected"):
            doe.Design22(cells=cells)

    def test_non_finite_observation(self):
        cells = {key: (1.0,) for key in doe.CELL_ORDER}
        cells[(1, -1)] = (math.nan,)
        with pytest.raises(ValidationError, match="finite"):
            doe.Design22(cells=cells)

    def test_replicates_and_means(self):
        design = design_from_means((10.0, 14.0, 20.0, 28.0), r=2, deviation=1.0)
        assert design.replicates == 2
        assert design.cell_means()[(1, 1)] == pytest.approx(28.0)

    def test_from_observations_groups_rows(self, irs_design):
        assert irs_design.replicates == 1
        assert set(irs_design.cells) == set(doe.CELL_ORDER)

    def test_from_observations_rejects_bad_codes(self):
        with pytest.raises(ValidationError, match="codes"):
            doe.design_from_observations([(0, 1, 5.0)])


class TestEffects:
    def test_hand_worked_design(self):
        design = design_from_means((10.0, 14.0, 20.0, 28.0))
        e = doe.estimate_effects(design)
        assert (e.q0, e.qa, e.qb, e.qab) == (18.0, 3.0, 6.0, 1.0)

    def test_reconstruct_hits_every_cell_mean(self, crs_design):
        e = doe.estimate_effects(crs_design)
        means = crs_design.cell_means()
        for x_a, x_b in doe.CELL_ORDER:
            assert e.reconstruct(x_a, x_b) == pytest.approx(means[(x_a, x_b)], rel=1e-12)

    @given(st.lists(finite_obs, min_size=4, max_size=4), st.permutations(range(3)))
    def test_invariant_under_replicate_permutation(self, means, order):
        base = {
            key: (m, m + 1.0, m - 2.0) for key, m in zip(doe.CELL_ORDER, means)
        }
        shuffled = {
            key: tuple(obs[i] for i in order) for key, obs in base.items()
        }
        e1 = doe.estimate_effects(doe.Design22(cells=base))
        e2 = doe.estimate_effects(doe.Design22(cells=shuffled))
        assert (e1.q0, e1.qa, e1.qb, e1.qab) == (e2.q0, e2.qa, e2.qb, e2.qab)


class TestAllocation:
    def test_hand_worked_sums(self):
        design = design_from_means((10.0, 14.0, 20.0, 28.0))
        a = doe.allocate_variation(doe.estimate_effects(design), design)
        assert a.ssa == pytest.approx(36.0)
        assert a.ssb == pytest.approx(144.0)
        assert a.ssab == pytest.approx(4.0)
        assert a.sse == pytest.approx(0.0, abs=1e-12)
        assert a.sst == pytest.approx(184.0)
        assert a.fraction_b == pytest.approx(144.0 / 184.0)

    @given(st.lists(finite_obs, min_size=8, max_size=8))
    def test_decomposition_identity(self, obs):
        cells = {
            key: (obs[2 * k], obs[2 * k + 1]) for k, key in enumerate(doe.CELL_ORDER)
        }
        design = doe.Design22(cells=cells)
        a = doe.allocate_variation(doe.estimate_effects(design), design)
        parts = a.ssa + a.ssb + a.ssab + a.sse
        assert parts == pytest.approx(a.sst, rel=1e-9, abs=1e-6)

    def test_constant_design_is_degenerate(self):
        design = design_from_means((7.0, 7.0, 7.0, 7.0), r=2)
        a = doe.allocate_variation(doe.estimate_effects(design), design)
        assert a.degenerate
        assert a.sst == 0.0
        assert (a.fraction_a, a.fraction_b, a.fraction_ab, a.fraction_error) == (
            0.0, 0.0, 0.0, 0.0,
        )

    def test_foreign_effects_are_rejected(self, irs_design, crs_design):
        foreign = doe.estimate_effects(crs_design)
        with pytest.raises(ValidationError, match="different data"):
            doe.allocate_variation(foreign, irs_design)


class TestReplication:
    def test_requires_two_replicates(self, irs_design):
        with pytest.raises(ValidationError, match="r >= 2"):
            doe.analyze_replicated(irs_design)

    def test_identical_replicates_have_zero_mse(self):
        design = design_from_means((10.0, 14.0, 20.0, 28.0), r=2, deviation=0.0)
        analysis = doe.analyze_replicated(design)
        assert analysis.allocation.sse == 0.0
        assert analysis.mse == 0.0

    def test_hand_worked_mse(self):
        # each cell holds mean +- 1, so SSE = 8 and mse = 8 / (4 (r-1)) = 2
        design = design_from_means((10.0, 14.0, 20.0, 28.0), r=2, deviation=1.0)
        analysis = doe.analyze_replicated(design)
        assert analysis.allocation.sse == pytest.approx(8.0)
        assert analysis.mse == pytest.approx(2.0)

    def test_seeded_cost_simulation_error_fraction(self):
        # simulate the replicated experiment: per-cell cost Gaussians at the
        # level-interval midpoints, two replicates per cell, increasing-returns
        # revenue model. The error share of variation should land near the
        # few-percent mark reported for this setup.
        model = model_core.CobbDouglasModel(1.0, (1.8, 0.1))
        pc = {-1: stats_lab.GaussianSpec(10.0, 10.0 / 6.0), 1: stats_lab.GaussianSpec(28.0, 4.0)}
        server = {-1: stats_lab.GaussianSpec(50.0, 5.0 / 3.0), 1: stats_lab.GaussianSpec(60.5, 1.5)}
        base_seed = 9  # frozen; error fraction 2.552% with this stream
        cells = {}
        for k, (x_a, x_b) in enumerate(doe.CELL_ORDER):
            pc_draws = stats_lab.generate_gaussian(pc[x_a], 2, base_seed + 2 * k)
            server_draws = stats_lab.generate_gaussian(server[x_b], 2, base_seed + 2 * k + 1)
            cells[(x_a, x_b)] = tuple(
                model_core.evaluate(model, model_core.FactorBundle((s, p)))
                for s, p in zip(server_draws, pc_draws)
            )
        analysis = doe.analyze_replicated(doe.Design22(cells=cells))
        assert analysis.allocation.fraction_error == pytest.approx(0.0255, abs=0.01)


class TestConfidenceIntervals:
    def test_hand_worked_intervals(self):
        design = design_from_means((50.0, 58.0, 68.0, 80.0), r=2, deviation=1.0)
        # means decompose into effects (64, 5, 10, 1); mse = 2 as above
        ci = doe.effect_confidence_intervals(design, 0.90)
        assert ci.dof == 4
        assert ci.mse == pytest.approx(2.0)
        assert ci.effect_std_error == pytest.approx(0.5)
        half_width = 2.131846786326649 * 0.5  # t(0.95, 4) from tables
        for q, (lo, hi) in zip((64.0, 5.0, 10.0, 1.0), ci.intervals):
            assert lo == pytest.approx(q - half_width, rel=1e-9)
            assert hi == pytest.approx(q + half_width, rel=1e-9)
        # only the interaction interval straddles zero
        assert ci.includes_zero == (False, False, False, True)

    def test_zero_sse_gives_zero_width(self):
        design = design_from_means((10.0, 14.0, 20.0, 28.0), r=2, deviation=0.0)
        ci = doe.effect_confidence_intervals(design, 0.90)
        e = doe.estimate_effects(design)
        for q, (lo, hi) in zip((e.q0, e.qa, e.qb, e.qab), ci.intervals):
            assert lo == q == hi

    def test_confidence_level_validated(self):
        design = design_from_means((10.0, 14.0, 20.0, 28.0), r=2, deviation=1.0)
        for bad in (0.0, 1.0, 1.2):
            with pytest.raises(ValidationError):
                doe.effect_confidence_intervals(design, bad)

    def test_needs_replication(self, irs_design):
        with pytest.raises(ValidationError, match="r >= 2"):
            doe.effect_confidence_intervals(irs_design, 0.9)

    def test_wider_confidence_widens_intervals(self):
        design = design_from_means((10.0, 14.0, 20.0, 28.0), r=2, deviation=1.0)
        narrow = doe.effect_confidence_intervals(design, 0.80)
        wide = doe.effect_confidence_intervals(design, 0.99)
        for (nlo, nhi), (wlo, whi) in zip(narrow.intervals, wide.intervals):
            assert whi - wlo > nhi - nlo
