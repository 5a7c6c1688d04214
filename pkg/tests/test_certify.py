import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qutrit_teleport import algebra, certify, tomography


def max_coherent_rho():
    return algebra.projector(certify.max_coherent_state())


class TestLinearCriteria:
    def test_eight_triples(self):
        assert len(certify.LINEAR_TRIPLES) == 8
        vals = certify.linear_criteria(max_coherent_rho())
        assert vals.shape == (8,)

    def test_max_coherent_first_triple_is_two(self):
        # <l1> = <l4> = <l6> = 2/3 for (|0>+|1>+|2>)/sqrt3
        vals = certify.linear_criteria(max_coherent_rho())
        assert abs(vals[0] - 2.0) < 1e-12

    def test_maximally_mixed_all_zero(self):
        assert np.abs(certify.linear_criteria(np.eye(3) / 3)).max() < 1e-12


class TestNonlinearCriterion:
    def test_max_coherent_is_two(self):
        assert abs(certify.nonlinear_criterion(max_coherent_rho()) - 2.0) < 1e-12

    def test_published_example_state(self):
        # (sqrt(1/8), sqrt(1/8), -sqrt(3/4)): nonlinear ~ 1.475 > 1 while the
        # fidelity witness is far below 2/3
        psi = np.array([math.sqrt(1 / 8), math.sqrt(1 / 8), -math.sqrt(3 / 4)])
        rho = algebra.projector(psi)
        nl = certify.nonlinear_criterion(rho)
        expected = 2 * (1 / 8) + 4 * math.sqrt(1 / 8 * 3 / 4)
        assert abs(nl - expected) < 1e-12
        assert abs(nl - 1.475) < 1e-3
        assert nl > 1.0
        assert certify.fidelity_witness(rho) < 2 / 3

    def test_basis_state_is_zero(self):
        assert certify.nonlinear_criterion(algebra.projector(algebra.ket(0))) < 1e-12


class TestFidelityWitness:
    def test_max_coherent_is_one(self):
        assert abs(certify.fidelity_witness(max_coherent_rho()) - 1.0) < 1e-12

    def test_maximally_mixed_is_one_third(self):
        assert abs(certify.fidelity_witness(np.eye(3) / 3) - 1 / 3) < 1e-12


class TestFeasibility:
    def test_maximally_mixed_is_simulable(self):
        dec = certify.qubit_mixture_feasibility(np.eye(3) / 3)
        assert dec is not None
        dec.check(np.eye(3) / 3)

    def test_max_coherent_is_not_simulable(self):
        assert certify.qubit_mixture_feasibility(max_coherent_rho()) is None

    def test_block_diagonal_state_is_simulable(self):
        psi01 = np.array([1, 1, 0]) / math.sqrt(2)
        dec = certify.qubit_mixture_feasibility(algebra.projector(psi01))
        assert dec is not None
        dec.check(algebra.projector(psi01))

    def test_decomposition_checker_rejects_leakage(self):
        s = np.zeros((3, 3), dtype=complex)
        s[0, 2] = 0.1
        bad = certify.SubspaceDecomposition(s, np.zeros((3, 3)), np.zeros((3, 3)))
        with pytest.raises(ValueError):
            bad.check(s)


class TestRobustness:
    def test_max_coherent_mu_is_half(self):
        mu, dec = certify.robustness_mu(max_coherent_rho())
        assert abs(mu - 0.5) < 1e-5
        dec.check(0.5 * np.eye(3) / 3 + 0.5 * max_coherent_rho(), atol=1e-4)

    def test_simulable_state_nonpositive_mu(self):
        mu, dec = certify.robustness_mu(np.eye(3) / 3)
        assert mu <= 0.0
        dec.check(mu * np.eye(3) / 3 + (1 - mu) * np.eye(3) / 3, atol=1e-6)

    def test_soundness_of_returned_decomposition(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            rho = algebra.random_density_matrix(3, rng)
            mu, dec = certify.robustness_mu(rho)
            if mu <= 0:
                noisy = mu * np.eye(3) / 3 + (1 - mu) * rho
                dec.check(noisy, atol=1e-5)

    def test_hierarchy_on_random_states(self):
        # fidelity witness > 2/3 => nonlinear > 1 => mu > 0, no counterexamples
        rng = np.random.default_rng(22)
        for _ in range(1000):
            if rng.random() < 0.5:
                rho = algebra.random_density_matrix(3, rng)
            else:
                psi = algebra.random_pure_state(3, rng)
                rho = algebra.projector(psi)
            w = certify.fidelity_witness(rho)
            nl = certify.nonlinear_criterion(rho)
            mu, _ = certify.robustness_mu(rho)
            if w > 2 / 3 + 1e-9:
                assert nl > 1 - 1e-9
            if nl > 1 + 1e-9:
                assert mu > -1e-5

    @given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_phase_invariance(self, p1, p2, seed):
        rng = np.random.default_rng(seed)
        rho = algebra.random_density_matrix(3, rng)
        u = np.diag([1.0, np.exp(1j * p1), np.exp(1j * p2)])
        mu1, _ = certify.robustness_mu(rho)
        mu2, _ = certify.robustness_mu(u @ rho @ u.conj().T)
        assert abs(mu1 - mu2) < 5e-6


class TestOracle:
    def test_oracle_brackets_mu_of_max_coherent(self):
        # the relaxed oracle confirms feasibility above mu* = 0.5; the strict
        # oracle (slack_tol = 0) confirms infeasibility below it
        rho = max_coherent_rho()
        assert certify.oracle_feasible(rho, 0.52)
        assert not certify.oracle_feasible(rho, 0.45, slack_tol=0.0)

    def test_oracle_equivalence_on_random_states(self):
        # the conic reduction and the brute-force grid agree up to grid
        # resolution around the bisection optimum: the relaxed oracle must
        # accept just above mu*, the strict oracle must reject just below
        rng = np.random.default_rng(23)
        eps = 0.02  # grid-resolution margin at n_grid = 200
        for _ in range(100):
            rho = algebra.random_density_matrix(3, rng)
            mu, _ = certify.robustness_mu(rho)
            if mu + eps <= 1.0:
                assert certify.oracle_feasible(rho, mu + eps)
            if mu - eps >= -1.0:
                assert not certify.oracle_feasible(rho, mu - eps, slack_tol=0.0)


class TestCertifyState:
    def test_max_coherent_verdict(self):
        report = certify.certify_state(max_coherent_rho())
        assert report.verdict == "genuine_qutrit"
        assert report.mu > 0.49
        assert report.decomposition is None

    def test_maximally_mixed_verdict(self):
        report = certify.certify_state(np.eye(3) / 3)
        assert report.verdict == "qubit_simulable"
        assert report.decomposition is not None


class TestPhaseGrid:
    def test_default_grid_is_half_open(self):
        states = certify.phase_grid_states(20, 20)
        assert len(states) == 400
        phases = sorted({p1 for (p1, _), _ in states})
        assert abs(phases[0]) < 1e-12
        assert abs(phases[-1] - 19 * math.pi / 20) < 1e-12

    def test_closed_interval_flag(self):
        states = certify.phase_grid_states(5, 5, closed_interval=True)
        phases = sorted({p1 for (p1, _), _ in states})
        assert abs(phases[-1] - math.pi) < 1e-12

    def test_states_are_max_coherent(self):
        for _, psi in certify.phase_grid_states(4, 4):
            assert np.abs(np.abs(psi) - 1 / math.sqrt(3)).max() < 1e-12


class TestBatchCertification:
    def test_identity_channel_all_genuine_mu_half(self):
        summary = certify.batch_certification(lambda r: r, grid=(20, 20))
        assert summary["n_states"] == 400
        assert summary["n_genuine"] == 400
        assert summary["n_simulable"] == 0
        assert abs(summary["mean_mu_of_genuine"] - 0.5) < 1e-4

    def test_depolarizing_channel_none_genuine(self):
        chi = tomography.depolarizing_chi()
        summary = certify.batch_certification(
            lambda r: tomography.apply_process(chi, r, repair=True), grid=(5, 5)
        )
        assert summary["n_genuine"] == 0
