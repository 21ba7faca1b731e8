"""
Tests for the verification module: pair generation, assumption checks,
couplings, the atom-mass oracle and the suites built on them
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import PreconditionError
from src.dynamics import iterate, StoppingRule
from src.fitness import KingmanFitness, LenskiFitness
from src.limits import kingman_limit, lenski_limit
from src.measure import (
    Interval,
    dirac,
    is_component,
    make_measure,
    restrict,
    upper_support,
)
from src.verify import (
    CheckReport,
    DominatedPair,
    assumption1_suite,
    assumption2_suite,
    assumption3_diagnostic,
    atom_mass_recursion,
    check_assumption1,
    check_assumption2_kingman,
    check_assumption2_lenski,
    check_coupling,
    check_fixed_point,
    check_monotone_from_top,
    check_recursion_oracle,
    check_truncated_coupling,
    coupling_suite,
    fixed_point_suite,
    generate_dominated_pair,
    recursion_suite,
    run_verification,
    sample_measure,
)

MODELS = [KingmanFitness(), LenskiFitness(100.0)]
BELOW = Interval.half_open(0.0, 1.0)


class TestSampling:
    """Seeded measures and dominated pairs"""

    def test_sample_measure_is_reproducible(self):
        assert sample_measure(7, 4) == sample_measure(7, 4)
        assert sample_measure(7, 4) != sample_measure(8, 4)
        assert sample_measure(7, 4, index=1) != sample_measure(7, 4, index=2)

    def test_sample_measure_shape(self):
        u = sample_measure(3, 5, bound=0.8)
        assert u.is_probability()
        assert upper_support(u) == 0.8
        v = sample_measure(3, 5, bound=0.8, top_atom=False)
        assert upper_support(v) <= 0.8

    def test_sample_measure_needs_atoms(self):
        with pytest.raises(ValueError):
            sample_measure(0, 0)

    def test_pair_from_top_dirac(self):
        pair = generate_dominated_pair(0, dirac(1.0))
        assert pair.moved_mass == 0.0
        assert pair.u == dirac(1.0)
        assert pair.v == dirac(1.0)

    def test_pair_from_dirac_at_zero(self):
        pair = generate_dominated_pair(5, dirac(0.0), bound=1.0)
        assert 0.0 <= pair.moved_mass <= 1.0
        assert pair.v.mass_at(0.0) == pytest.approx(1.0 - pair.moved_mass)
        assert pair.v.mass_at(1.0) == pytest.approx(pair.moved_mass)

    def test_pair_above_bound_raises(self):
        with pytest.raises(PreconditionError):
            generate_dominated_pair(0, dirac(1.0), bound=0.5)

    @given(st.integers(0, 10_000), st.integers(1, 8))
    @settings(max_examples=50, deadline=None)
    def test_pairs_are_dominated(self, seed, n_atoms):
        base = sample_measure(seed, n_atoms)
        pair = generate_dominated_pair(seed, base, bound=1.0)
        assert is_component(restrict(pair.v, BELOW), restrict(pair.u, BELOW), BELOW)
        assert pair.v.mass_at(1.0) == pytest.approx(pair.u.mass_at(1.0) + pair.moved_mass)
        assert pair.v.total_mass == pytest.approx(1.0, abs=1e-12)


class TestAssumptions:
    """Assumption 1 and Assumption 2 checks"""

    @pytest.mark.parametrize("model", MODELS)
    def test_assumption1_on_seeded_pairs(self, model):
        pairs = [generate_dominated_pair(k, sample_measure(k, 4), bound=1.0) for k in range(30)]
        report = check_assumption1(model, pairs, np.linspace(0.0, 1.0, 11))
        assert report.passed
        assert report.worst_violation <= 1e-10

    def test_assumption1_identical_pair(self):
        u = make_measure([(0.3, 0.5), (1.0, 0.5)])
        report = check_assumption1(KingmanFitness(), [DominatedPair(u, u, 0.0, 1.0)], [0.0, 0.5, 1.0])
        assert report.worst_violation == 0.0

    def test_assumption1_skips_degenerate_pairs(self):
        pair = DominatedPair(dirac(0.0), dirac(1.0), 1.0, 1.0)
        report = check_assumption1(KingmanFitness(), [pair], [0.0, 1.0])
        assert report.passed
        assert report.details["skipped_degenerate"] == 1

    def test_assumption2_kingman_constant(self):
        u = make_measure([(0.2, 0.5), (1.0, 0.5)])
        v = make_measure([(0.2, 0.2), (1.0, 0.8)])
        report = check_assumption2_kingman(DominatedPair(u, v, 0.3, 1.0), 0.5, 0.2)
        assert report.details["c"] == pytest.approx(1.0 / 0.9)
        assert report.hypothesis_met
        assert report.passed

    def test_assumption2_kingman_zero_eps_is_assumption1(self):
        u = make_measure([(0.2, 0.5), (1.0, 0.5)])
        v = make_measure([(0.2, 0.2), (1.0, 0.8)])
        report = check_assumption2_kingman(DominatedPair(u, v, 0.3, 1.0), 0.5, 0.0)
        assert report.details["c"] == 1.0
        assert report.passed

    def test_assumption2_kingman_degenerate_u(self):
        pair = DominatedPair(dirac(0.0), dirac(1.0), 1.0, 1.0)
        report = check_assumption2_kingman(pair, 0.5, 1.0)
        assert report.details["c"] == pytest.approx(2.0)
        assert report.hypothesis_met == False
        assert report.passed
        assert "degenerate" in report.witness

    def test_assumption2_hypothesis_unmet(self):
        u = make_measure([(0.2, 0.5), (1.0, 0.5)])
        v = make_measure([(0.2, 0.45), (1.0, 0.55)])
        report = check_assumption2_kingman(DominatedPair(u, v, 0.05, 1.0), 0.5, 0.2)
        assert report.hypothesis_met == False

    def test_assumption2_lenski_margin(self):
        u = make_measure([(0.2, 0.5), (1.0, 0.5)])
        v = make_measure([(0.2, 0.2), (1.0, 0.8)])
        report = check_assumption2_lenski(LenskiFitness(100.0), DominatedPair(u, v, 0.3, 1.0), 0.5, 0.2)
        assert report.passed
        assert report.details["margin"] > 0
        assert report.worst_violation == pytest.approx(-report.details["margin"])

    @pytest.mark.parametrize("model", MODELS)
    def test_assumption_suites(self, model):
        first = assumption1_suite(model, 40, seed=3, grid_size=11)
        second = assumption2_suite(model, 40, seed=3)
        assert first.passed and second.passed
        assert first.seeds == [3]
        assert second.details["cases"] == 40


class TestCouplings:
    """Coupled runs and monotonicity from δ_M"""

    @pytest.mark.parametrize("model", MODELS)
    def test_coupling_of_dominated_pair(self, model):
        base = make_measure([(0.1, 0.3), (0.5, 0.4), (1.0, 0.3)])
        pair = generate_dominated_pair(11, base, bound=1.0)
        q = make_measure([(0.0, 0.5), (0.3, 0.5)])
        report = check_coupling(model, pair.u, pair.v, q, 0.3, 50, bound=1.0)
        assert report.passed

    @pytest.mark.parametrize("model", MODELS)
    def test_coupling_against_top_dirac(self, model):
        h0 = make_measure([(0.2, 0.5), (0.7, 0.5)])
        report = check_coupling(model, h0, dirac(1.0), dirac(0.4), 0.5, 50, bound=1.0)
        assert report.passed

    def test_coupling_precondition(self):
        with pytest.raises(PreconditionError):
            check_coupling(KingmanFitness(), dirac(1.0), dirac(0.5), dirac(0.0), 0.5, 5, bound=1.0)

    @pytest.mark.parametrize("model", MODELS)
    def test_truncated_coupling(self, model):
        p0 = make_measure([(0.1, 0.4), (0.6, 0.6)])
        phat0 = make_measure([(0.1, 0.2), (0.6, 0.3), (0.9, 0.5)])
        qhat = make_measure([(0.2, 0.5), (0.8, 0.5)])
        report = check_truncated_coupling(model, p0, phat0, qhat, 0.4, 50)
        assert report.passed
        assert report.details["m"] == 0.6

    def test_truncated_coupling_precondition(self):
        with pytest.raises(PreconditionError):
            check_truncated_coupling(
                KingmanFitness(), dirac(0.9), dirac(0.5), dirac(0.2), 0.4, 5
            )

    @pytest.mark.parametrize("model, q", [
        (KingmanFitness(), make_measure([(0.2, 0.5), (0.4, 0.5)])),
        (KingmanFitness(), dirac(0.0)),
        (LenskiFitness(100.0), make_measure([(0.5, 0.5), (0.9, 0.5)])),
        (LenskiFitness(100.0), dirac(0.0)),
    ])
    def test_monotone_from_top(self, model, q):
        report = check_monotone_from_top(model, q, 0.5, 100, bound=1.0)
        assert report.passed

    @pytest.mark.parametrize("model", MODELS)
    def test_coupling_suite(self, model):
        reports = coupling_suite(model, 6, 30, seed=1, beta=0.4)
        assert [r.check for r in reports] == ["coupling", "coupling_from_top", "truncated_coupling"]
        assert all(r.passed for r in reports)


class TestFixedPoints:
    """Limits are fixed points of one step"""

    def test_kingman_cases(self):
        for q, beta in ((dirac(0.0), 0.5), (make_measure([(0.2, 0.5), (0.4, 0.5)]), 0.8)):
            report = check_fixed_point(KingmanFitness(), kingman_limit(q, beta, 1.0), q, beta)
            assert report.passed

    def test_lenski_cases(self):
        model = LenskiFitness(100.0)
        for q, beta in ((dirac(0.0), 0.5), (make_measure([(0.5, 0.5), (0.9, 0.5)]), 0.8)):
            report = check_fixed_point(model, lenski_limit(q, beta, 100.0, 1.0), q, beta)
            assert report.passed

    @pytest.mark.parametrize("model", MODELS)
    def test_fixed_point_suite(self, model):
        report = fixed_point_suite(model, 6, seed=2)
        assert report.passed
        assert report.details["cases"] == 6


class TestAtomMassRecursion:
    """Product/sum form of p_i({M})"""

    def test_two_atom_kingman_by_hand(self):
        # s(1, δ_1) = 1 and s(1, 0.5δ_0 + 0.5δ_1) = 2: factors 0.5 then 1.
        masses = atom_mass_recursion(KingmanFitness(), dirac(1.0), dirac(0.0), 0.5, 3)
        assert masses == pytest.approx([1.0, 0.5, 0.5, 0.5])

    def test_mutants_at_top(self):
        masses = atom_mass_recursion(KingmanFitness(), dirac(1.0), dirac(1.0), 0.3, 4)
        assert masses == pytest.approx([1.0] * 5)

    def test_zero_steps(self):
        assert atom_mass_recursion(KingmanFitness(), dirac(1.0), dirac(0.0), 0.5, 0) == [1.0]

    @pytest.mark.parametrize("model", MODELS)
    def test_matches_trajectory(self, model):
        p0 = make_measure([(0.3, 0.6), (1.0, 0.4)])
        q = make_measure([(0.1, 0.7), (1.0, 0.3)])
        n = 40
        rule = StoppingRule(max_iterations=n, tv_tolerance=1e-300)
        t = iterate(model, p0, q, 0.35, stop=rule)
        oracle = atom_mass_recursion(model, p0, q, 0.35, n)
        direct = t.atom_mass_series
        assert len(direct) == n + 1
        assert np.max(np.abs(np.asarray(oracle) - direct)) <= 1e-10

    @pytest.mark.parametrize("model", MODELS)
    def test_oracle_report(self, model):
        p0 = make_measure([(0.5, 0.5), (1.0, 0.5)])
        report = check_recursion_oracle(model, p0, dirac(0.2), 0.6, 60)
        assert report.passed

    @pytest.mark.parametrize("model", MODELS)
    def test_recursion_suite(self, model):
        report = recursion_suite(model, 5, 40, seed=4)
        assert report.passed


class TestTruncatedLimits:
    """Lévy distance of truncated limits to the limit at M"""

    @pytest.mark.parametrize("model", MODELS)
    def test_mutants_at_zero(self, model):
        report = assumption3_diagnostic(model, dirac(0.0), 0.5, [0.9, 0.99, 0.999], bound=1.0)
        assert report.passed
        distances = report.details["distances"]
        assert distances == pytest.approx([0.1, 0.01, 0.001], abs=1e-8)


def test_check_report_from_violation():
    report = CheckReport.from_violation("demo", 1e-11)
    assert report.passed
    assert report.tolerance == 1e-10
    assert CheckReport.from_violation("demo", 1e-9).passed == False
    assert report.model_dump()["check"] == "demo"


@pytest.mark.parametrize("model", MODELS)
def test_run_verification_small(model):
    reports = run_verification(
        model, 0.4, seed=9,
        n_pairs=10, n_coupling_pairs=3, coupling_steps=20,
        n_recursion_scenarios=3, recursion_steps=20, grid_size=5,
        q=dirac(0.0), a_values=[0.9, 0.99, 0.999], bound=1.0,
    )
    names = [r.check for r in reports]
    assert names[:2] == ["assumption1", assumption2_suite(model, 1, 9).check]
    assert "fixed_point" in names
    assert names[-1] == "assumption3"
    assert all(r.passed for r in reports)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
