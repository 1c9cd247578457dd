import math

import numpy as np
import pytest

from qdini import (
    ApproximationScheme,
    DensityOperator,
    OperatorSequence,
    PositiveOperator,
    appendix_domination,
    approximation_gap_grid,
    channel_mi_family,
    check_convex_mixture,
    check_dct_basic,
    check_dct_simon,
    constant_sequence,
    entropy_family,
    fixed_basis_schedule,
    g_c_linear,
    laa_check,
    truncation_lower_bound_slack,
    random_density,
    relative_entropy_domination,
    relative_entropy_family,
    relative_entropy_sum,
    residual_shrinks,
    shrinks_toward_zero,
    trace_neg_log_family,
    truncation_criterion,
    windowed_sup,
)
from qdini.verdicts import CONSISTENT, INCONCLUSIVE, VIOLATED


def _diag_seq(limit, pert, rate=0.5):
    limit = np.asarray(limit, dtype=float)
    pert = np.asarray(pert, dtype=float)

    def member(n):
        if n == 0:
            return PositiveOperator(diagonal=limit)
        return PositiveOperator(diagonal=limit + rate ** n * pert)

    return OperatorSequence(member, limit.size)


class TestTrendRule:
    def test_halving_with_majority_decrease(self):
        assert residual_shrinks([1.0, 0.8, 0.6, 0.4, 0.2])

    def test_last_not_halved_fails(self):
        assert not residual_shrinks([1.0, 0.9, 0.8, 0.7, 0.6])

    def test_majority_rule(self):
        # last < first/2 but most steps increase
        assert not residual_shrinks([1.0, 2.0, 3.0, 4.0, 0.3])

    def test_all_zero_counts_as_shrunk(self):
        assert residual_shrinks([0.0, 0.0, 0.0])

    def test_zero_plateau_steps_count_as_decreasing(self):
        vals = [1.0, 1.0] + [0.0] * 9
        assert residual_shrinks(vals)

    def test_nonfinite_never_shrinks(self):
        assert not residual_shrinks([1.0, math.inf, 0.1])

    def test_toward_zero_needs_small_last_value(self):
        # halves but plateaus far from zero
        assert not shrinks_toward_zero([10.0, 8.0, 6.0, 5.0, 4.5, 4.0])
        assert shrinks_toward_zero([10.0, 5.0, 2.0, 1.0, 0.5, 0.2])

    def test_windowed_sup_uses_tail_half(self):
        # tail length ceil(n_max/2) = 2
        assert windowed_sup([5.0, 4.0, 3.0, 2.0, 1.0], 4) == 2.0


class TestGapGrid:
    def test_gap_vanishes_at_full_rank_cut(self):
        rho = DensityOperator(diagonal=[0.5, 0.3, 0.2])
        grid = approximation_gap_grid(entropy_family(), constant_sequence(rho),
                                      ApproximationScheme(), n_max=2, m_max=3)
        cell = grid.cell(0, 3)
        assert abs(cell.gap) < 1e-12
        assert abs(cell.mu - 1.0) < 1e-12
        assert cell.tail == 0.0

    def test_gap_closed_form_at_m_one(self):
        lam = np.array([0.6, 0.4])
        rho = DensityOperator(diagonal=lam)
        grid = approximation_gap_grid(entropy_family(), constant_sequence(rho),
                                      ApproximationScheme(), n_max=0, m_max=2)
        s = float(-np.sum(lam * np.log(lam)))
        # S([Psi_1]) = 0 for the pure truncated state
        assert abs(grid.cell(0, 1).gap - s) < 1e-12

    def test_inf_cells_flagged_not_fatal(self):
        sigma = constant_sequence(PositiveOperator(diagonal=[1.0, 0.0]))
        rho = DensityOperator(diagonal=[0.5, 0.5])
        grid = approximation_gap_grid(relative_entropy_family(sigma), constant_sequence(rho),
                                      ApproximationScheme(), n_max=0, m_max=2)
        flagged = [c for c in grid.cells if "inf-gap" in c.flags or "inf-tail" in c.flags]
        assert flagged

    def test_csv_shape(self):
        rho = DensityOperator(diagonal=[0.7, 0.3])
        grid = approximation_gap_grid(entropy_family(), constant_sequence(rho),
                                      ApproximationScheme(), n_max=1, m_max=2)
        lines = grid.to_csv().strip().split("\n")
        assert lines[0] == "n,m,mu,gap,tail,flags"
        assert len(lines) == 1 + 2 * 2


class TestTruncationBoundAndLaa:
    def test_entropy_lower_bound_random(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            rho = random_density(rng, 5)
            slack = truncation_lower_bound_slack(entropy_family(), constant_sequence(rho),
                                    ApproximationScheme(), n_max=0, m_max=5)
            assert slack >= -1e-9

    def test_laa_entropy_sides(self):
        rng = np.random.default_rng(1)
        fam = entropy_family()
        for _ in range(20):
            rho = random_density(rng, 4)
            sigma = random_density(rng, 4)
            a_slack, b_slack = laa_check(fam, 0, rho, sigma, 0.3)
            # entropy is concave (a_f = 0) with mixing defect bounded by h2
            assert a_slack >= -1e-9
            assert b_slack >= -1e-9

    def test_g_c_linear(self):
        g = g_c_linear(0.5)
        assert g(1.0) == 2.0


class TestDctBasic:
    def test_entropy_dominates_itself(self):
        seq = _diag_seq([0.5, 0.3, 0.2], [0.1, -0.05, -0.05])
        v = check_dct_basic(entropy_family(), entropy_family(), seq, n_max=10, m_max=3)
        assert v.status == CONSISTENT
        assert v.trend_only

    def test_infinite_f_is_inconclusive(self):
        sigma = constant_sequence(PositiveOperator(diagonal=[1.0, 0.0, 0.0]))
        seq = _diag_seq([0.4, 0.3, 0.3], [0.1, -0.05, -0.05])
        v = check_dct_basic(relative_entropy_family(sigma), entropy_family(), seq,
                            n_max=6, m_max=3)
        assert v.status == INCONCLUSIVE

    def test_domination_failure_is_violated(self):
        # g = S + const cannot be dominated by f = S at pure truncations
        seq = _diag_seq([0.5, 0.5, 0.0], [0.2, -0.2, 0.0])
        sigma = constant_sequence(PositiveOperator(diagonal=[0.1, 0.1, 0.1]))
        v = check_dct_basic(entropy_family(), trace_neg_log_family(sigma), seq,
                            n_max=6, m_max=3)
        assert v.status == VIOLATED
        dom = next(c for c in v.hypothesis_checks if c.name.startswith("|g_n|"))
        assert not dom.passed


class TestDctSimon:
    def test_rejects_broken_domination(self):
        rho = _diag_seq([0.5, 0.5], [0.1, -0.1])
        tau = constant_sequence(PositiveOperator(diagonal=[0.1, 0.1]))
        with pytest.raises(ValueError):
            check_dct_simon(entropy_family(), rho, tau, 1.0, 4, 2)

    def test_self_domination_consistent(self):
        seq = _diag_seq([0.5, 0.3, 0.2], [0.05, -0.02, -0.03])
        v = check_dct_simon(entropy_family(), seq, seq, 1.0, 10, 3)
        assert v.status == CONSISTENT
        assert "A_window" in v.values


class TestConvexMixture:
    def test_consistent_on_converging_pair(self):
        rho = _diag_seq([0.6, 0.25, 0.15], [0.05, -0.03, -0.02])
        sigma = _diag_seq([0.2, 0.5, 0.3], [-0.02, 0.05, -0.03])
        p = [0.5] + [0.5 + 0.1 * 0.5 ** n for n in range(1, 11)]
        v = check_convex_mixture(entropy_family(), rho, sigma, p, n_max=10, m_max=3)
        assert v.status == CONSISTENT

    def test_rejects_short_p_seq(self):
        rho = _diag_seq([0.6, 0.4], [0.05, -0.05])
        with pytest.raises(ValueError):
            check_convex_mixture(entropy_family(), rho, rho, [0.5, 0.5], n_max=4, m_max=2)


class TestTruncationCriterion:
    def test_consistent_when_tails_vanish(self):
        seq = _diag_seq([0.7, 0.2, 0.06, 0.04], [0.02, -0.01, -0.005, -0.005])
        sched = fixed_basis_schedule(4, 4, seq, n_max=8)
        v = truncation_criterion(entropy_family(), seq, sched, n_0=1, n_max=8, m_max=4)
        assert v.status == CONSISTENT
        tails = v.values["tail_sup_per_m"]
        assert tails[-1] < 1e-10

    def test_inconclusive_when_tails_stay_large(self):
        # flat spectrum: entropy tails halve but stay far from zero over the
        # scanned m-window, so the toward-zero test fails
        seq = constant_sequence(DensityOperator(diagonal=np.full(8, 1.0 / 8)))
        sched = fixed_basis_schedule(8, 8, seq, n_max=6)
        v = truncation_criterion(entropy_family(), seq, sched, n_0=1, n_max=6, m_max=4)
        assert v.status == INCONCLUSIVE
        tail_check = next(c for c in v.hypothesis_checks if "tail sup" in c.name)
        assert not tail_check.passed


class TestRelativeEntropyDomination:
    def _pair(self):
        rho1 = _diag_seq([0.4, 0.35, 0.25], [0.02, -0.01, -0.01])
        rho2 = _diag_seq([0.2, 0.175, 0.125], [0.01, -0.005, -0.005])
        sigma1 = _diag_seq([0.3, 0.3, 0.4], [0.01, 0.01, -0.02])
        sigma2 = _diag_seq([0.6, 0.6, 0.8], [0.02, 0.02, -0.04])
        return rho1, rho2, sigma1, sigma2

    def test_consistent_on_ordered_quadruple(self):
        v = relative_entropy_domination(*self._pair(), n_max=10)
        assert v.status == CONSISTENT
        assert len(v.values["hypothesis"]) == 11

    def test_enforces_ordering_on_members(self):
        rho1, rho2, sigma1, sigma2 = self._pair()
        with pytest.raises(ValueError):
            relative_entropy_domination(rho2, rho1, sigma1, sigma2, n_max=4)

    def test_planted_infinite_conclusion_is_violated(self):
        # conclusion hits +inf at the declared limit while the hypothesis
        # converges: reported as a violation, not an input error
        rho1 = _diag_seq([0.5, 0.3, 0.0], [0.02, -0.01, 0.05])
        sigma1 = _diag_seq([0.3, 0.3, 0.0], [0.01, -0.01, 0.05])

        def rho2_member(n):
            if n == 0:
                return PositiveOperator(diagonal=[0.25, 0.15, 0.05])
            return PositiveOperator(diagonal=[0.25, 0.15, 0.04 * 0.5 ** n])

        rho2 = OperatorSequence(rho2_member, 3)
        sigma2 = OperatorSequence(lambda n: sigma1(n).scale(2.0), 3)
        v = relative_entropy_domination(rho1, rho2, sigma1, sigma2, n_max=10)
        assert v.status == VIOLATED


class TestRelativeEntropySum:
    def test_per_n_inequalities_and_trends(self):
        rho = _diag_seq([0.3, 0.2, 0.1], [0.02, -0.01, -0.01])
        sigma = _diag_seq([0.1, 0.2, 0.3], [-0.01, 0.02, -0.01])
        omega = _diag_seq([0.4, 0.3, 0.3], [0.01, -0.01, 0.0])
        v = relative_entropy_sum(rho, sigma, omega, n_max=10)
        assert v.status == CONSISTENT
        guard = next(c for c in v.hypothesis_checks if "sum inequalities" in c.name)
        assert guard.passed
        assert guard.slack >= -1e-9

    def test_shifted_variant_tracked(self):
        rho = _diag_seq([0.3, 0.2, 0.1], [0.02, -0.01, -0.01])
        sigma = _diag_seq([0.1, 0.2, 0.3], [-0.01, 0.02, -0.01])
        omega = _diag_seq([0.4, 0.3, 0.3], [0.01, -0.01, 0.0])
        theta = _diag_seq([0.2, 0.3, 0.4], [0.0, 0.01, -0.01])
        v = relative_entropy_sum(rho, sigma, omega, n_max=10, theta_seq=theta)
        assert "shifted_conclusion" in v.values
        assert v.status == CONSISTENT


class TestAppendixDomination:
    def test_consistent_with_monotone_ladder(self):
        rho1 = _diag_seq([0.5, 0.3, 0.2], [0.02, -0.01, -0.01])
        rho2 = OperatorSequence(lambda n: rho1(n).scale(0.6), 3)
        sigma1 = _diag_seq([0.2, 0.3, 0.5], [0.01, -0.01, 0.0])
        sigma2 = OperatorSequence(lambda n: sigma1(n).scale(1.5), 3)
        v = appendix_domination(rho1, rho2, sigma1, sigma2,
                                k_schedule=[1, 10, 100, 1000], n_max=8)
        assert v.status == CONSISTENT
        assert v.values["A_2"] - v.values["Delta"] <= float(v.values["A_1"]) + 1e-6

    def test_rejects_unordered_inputs(self):
        rho1 = _diag_seq([0.5, 0.5], [0.0, 0.0])
        rho2 = OperatorSequence(lambda n: rho1(n).scale(2.0), 2)
        with pytest.raises(ValueError):
            appendix_domination(rho1, rho2, rho1, rho1, k_schedule=[1, 10], n_max=2)

    def test_infinite_hypothesis_inconclusive(self):
        rho1 = _diag_seq([0.5, 0.5], [0.02, -0.02])
        rho2 = OperatorSequence(lambda n: rho1(n).scale(0.5), 2)
        sigma = constant_sequence(PositiveOperator(diagonal=[1.0, 0.0]))
        v = appendix_domination(rho1, rho2, sigma, sigma, k_schedule=[1, 10], n_max=4)
        assert v.status == INCONCLUSIVE


class TestChannelMiFamily:
    def test_homogeneous_extension(self):
        from qdini import ChannelSequence, identity_channel

        seq = ChannelSequence(lambda n: identity_channel(2), 2, 2)
        fam = channel_mi_family(seq)
        rho = DensityOperator(diagonal=[0.5, 0.5])
        scaled = PositiveOperator(diagonal=[1.5, 1.5])
        assert abs(float(fam.value(0, scaled)) - 3.0 * float(fam.value(0, rho))) < 1e-9
