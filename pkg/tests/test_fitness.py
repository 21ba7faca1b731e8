"""
Tests for fitness models, the Lenski cycle time and selective advantages
"""

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import DegeneratePopulationError, ExpOverflowError
from src.dynamics import StoppingRule, iterate
from src.fitness import (
    FitnessContext,
    KingmanFitness,
    LenskiFitness,
    fitness_weight,
    lenski_time,
    mean_fitness,
    model_from_spec,
    selective_advantage,
    solve_cycle_time,
)
from src.measure import dirac, make_measure, mean, stoch_dominated, upper_support


class TestCycleTime:
    """Cycle time t_u with ∫ e^{t x} u(dx) = gamma"""

    @pytest.mark.parametrize("u, expected", [
        (dirac(1.0), math.log(100.0)),
        (dirac(0.5), 2 * math.log(100.0)),
        (make_measure([(0.0, 0.5), (1.0, 0.5)]), math.log(199.0)),
    ])
    def test_closed_forms(self, u, expected):
        assert lenski_time(u, 100.0) == pytest.approx(expected, rel=1e-12)

    def test_all_mass_at_zero_is_degenerate(self):
        with pytest.raises(DegeneratePopulationError):
            lenski_time(dirac(0.0), 100.0)

    @given(
        st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5),
        st.floats(1.5, 1e4),
    )
    @settings(max_examples=50, deadline=None)
    def test_moment_matches_gamma(self, xs, gamma):
        u = make_measure((x, 1.0 / len(xs)) for x in xs)
        t = lenski_time(u, gamma)
        moment = math.fsum(np.exp(t * u.locations) * u.masses)
        assert moment == pytest.approx(gamma, rel=1e-9)

    @pytest.mark.parametrize("x, gamma", [(3.2e-245, 2.0), (1e-12, 100.0), (1e-300, 1e4)])
    def test_tiny_support_has_finite_cycle_time(self, x, gamma):
        assert lenski_time(dirac(x), gamma) == pytest.approx(math.log(gamma) / x, rel=1e-12)

    def test_subnormal_support_overflows(self):
        with pytest.raises(ExpOverflowError):
            lenski_time(dirac(5e-324), 100.0)

    def test_tiny_positive_type_next_to_zero(self):
        t = solve_cycle_time(np.array([0.0, 1e-200]), np.array([0.5, 0.5]), 2.0)
        assert t == pytest.approx(math.log(3.0) / 1e-200, rel=1e-12)

    @given(
        st.lists(st.tuples(st.floats(0.0, 1.0), st.floats(0.01, 1.0)), min_size=1, max_size=6),
        st.floats(1.5, 1e4),
    )
    @settings(max_examples=100, deadline=None)
    def test_cycle_time_inside_closed_form_bracket(self, atoms, gamma):
        u = make_measure([(max(x, 1e-6), m) for x, m in atoms])
        u = u.scaled(1.0 / u.total_mass)
        top = upper_support(u)
        t = lenski_time(u, gamma)
        assert math.log(gamma) / top * (1 - 1e-12) <= t
        assert t <= math.log(gamma / u.mass_at(top)) / top * (1 + 1e-12)

    @given(
        st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6),
        st.floats(1.5, 1e4),
        st.floats(0.0, 1e3),
    )
    @settings(max_examples=100, deadline=None)
    def test_warm_start_reaches_the_same_root(self, xs, gamma, start):
        u = make_measure((x, 1.0 / len(xs)) for x in xs)
        cold = solve_cycle_time(u.locations, u.masses, gamma)
        warm = solve_cycle_time(u.locations, u.masses, gamma, initial=start)
        assert warm == pytest.approx(cold, rel=1e-12)

    def test_lenski_context_uses_hint(self):
        model = LenskiFitness(100.0)
        u = make_measure([(0.2, 0.5), (0.9, 0.5)])
        cold = model.context(u.locations, u.masses)
        warm = model.context(u.locations, u.masses, hint=FitnessContext(cycle_time=5.0))
        assert warm.cycle_time == pytest.approx(cold.cycle_time, rel=1e-12)

    @given(
        st.lists(st.tuples(st.floats(0.01, 1.0), st.floats(0.01, 1.0)), min_size=1, max_size=6),
        st.floats(0.01, 0.5),
        st.floats(1.5, 1e4),
    )
    @settings(max_examples=100, deadline=None)
    def test_higher_types_need_less_time(self, atoms, shift, gamma):
        total = math.fsum(m for _, m in atoms)
        u = make_measure((x, m / total) for x, m in atoms)
        v = make_measure((x + shift, m) for x, m in u.atoms())
        assert stoch_dominated(u, v)
        assert lenski_time(v, gamma) <= lenski_time(u, gamma) * (1 + 1e-12)

    def test_many_lenski_steps_are_fast(self):
        q = make_measure([(0.5, 0.5), (0.9, 0.5)])
        start = time.perf_counter()
        rule = StoppingRule(max_iterations=2000, tv_tolerance=1e-300)
        iterate(LenskiFitness(100.0), dirac(1.0), q, 0.8, stop=rule)
        assert time.perf_counter() - start < 2.0


class TestWeights:
    """w(x, u) and the mean fitness"""

    def test_kingman_weight_is_type(self):
        assert fitness_weight(KingmanFitness(), 0.7, dirac(0.2)) == pytest.approx(0.7)

    def test_lenski_weights(self):
        model = LenskiFitness(100.0)
        assert fitness_weight(model, 1.0, dirac(1.0)) == pytest.approx(100.0)
        assert fitness_weight(model, 0.0, dirac(1.0)) == pytest.approx(1.0)

    def test_kingman_mean_fitness(self):
        assert mean_fitness(KingmanFitness(), dirac(0.5)) == 0.5
        assert mean_fitness(KingmanFitness(), dirac(0.0)) == 0.0

    def test_lenski_mean_fitness_is_gamma(self):
        u = make_measure([(0.1, 0.2), (0.4, 0.3), (0.9, 0.5)])
        assert mean_fitness(LenskiFitness(100.0), u) == pytest.approx(100.0, rel=1e-8)

    def test_lenski_overflow_raises(self):
        model = LenskiFitness(1e305)
        with pytest.raises(ExpOverflowError):
            model.evaluate(dirac(1.0))


class TestSelectiveAdvantage:
    """s(x, u) = w(x, u) / mean fitness"""

    def test_kingman_fixed_point_of_normalization(self):
        assert selective_advantage(KingmanFitness(), 1.0, dirac(1.0)) == 1.0

    def test_kingman_two_atoms(self):
        u = make_measure([(0.25, 0.5), (0.75, 0.5)])
        assert selective_advantage(KingmanFitness(), 0.75, u) == pytest.approx(1.5)

    def test_lenski_at_support(self):
        assert selective_advantage(LenskiFitness(100.0), 1.0, dirac(1.0)) == pytest.approx(1.0)

    @given(
        st.lists(st.tuples(st.floats(0.01, 1.0), st.floats(0.01, 1.0)), min_size=1, max_size=6),
    )
    @settings(max_examples=100, deadline=None)
    def test_advantages_average_to_one(self, atoms):
        total = math.fsum(m for _, m in atoms)
        u = make_measure((x, m / total) for x, m in atoms)
        for model in (KingmanFitness(), LenskiFitness(100.0)):
            s = model.evaluate(u).advantage(u.locations)
            assert math.fsum(s * u.masses) == pytest.approx(1.0, rel=1e-12)

    @given(
        st.lists(st.tuples(st.floats(0.01, 1.0), st.floats(0.01, 1.0)), min_size=1, max_size=6),
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_kingman_advantage_is_linear_in_type(self, atoms, x, y):
        total = math.fsum(m for _, m in atoms)
        u = make_measure((loc, m / total) for loc, m in atoms)
        state = KingmanFitness().evaluate(u)
        s = state.advantage(np.array([x, y, x + y]))
        assert s[0] == pytest.approx(x / mean(u), rel=1e-12, abs=1e-300)
        assert s[2] == pytest.approx(s[0] + s[1], rel=1e-12, abs=1e-300)

    def test_zero_mean_raises(self):
        with pytest.raises(DegeneratePopulationError):
            selective_advantage(KingmanFitness(), 0.5, dirac(0.0))

    def test_selection_state_flags_degenerate(self):
        state = KingmanFitness().evaluate(dirac(0.0))
        assert state.degenerate == True
        assert KingmanFitness().evaluate(dirac(0.3)).degenerate == False


class TestModelSpec:
    """Scenario descriptors of the models"""

    def test_round_trip(self):
        for model in (KingmanFitness(), LenskiFitness(100.0)):
            rebuilt = model_from_spec(model.to_spec())
            assert rebuilt.to_spec() == model.to_spec()

    def test_lenski_equality(self):
        assert LenskiFitness(100.0) == LenskiFitness(100.0)
        assert LenskiFitness(100.0) != LenskiFitness(50.0)

    def test_unknown_kind_raises(self):
        with pytest.raises(ValueError):
            model_from_spec({"kind": "wright"})

    def test_gamma_must_exceed_one(self):
        with pytest.raises(ValueError):
            LenskiFitness(1.0)

    def test_declared_assumptions(self):
        assert KingmanFitness().declared_assumptions == {1, 2, 3}
        assert LenskiFitness(100.0).declared_assumptions == {1, 2, 3}


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
