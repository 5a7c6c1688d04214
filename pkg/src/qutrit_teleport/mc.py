"""Poisson Monte Carlo error propagation and tomography design studies.

Every ensemble is a pure function of (inputs, seed, n_trials): trial RNG
streams are spawned from one master SeedSequence, so results do not
depend on execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra, certify, tomography
from .errors import InsufficientDataError, SolverError


def trial_rngs(seed, n_trials):
    """Independent per-trial generators split from a master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_trials)]


@dataclass(frozen=True)
class ResampleEnsemble:
    n_trials: int
    seed: int
    samples: np.ndarray
    n_excluded: int

    @property
    def mean(self):
        return float(self.samples.mean())

    @property
    def std(self):
        return float(self.samples.std(ddof=1)) if len(self.samples) > 1 else 0.0


def poisson_resample(counts_tables, statistic, n_trials, seed):
    """Monte Carlo error bar: redraw every count as Poisson(observed).

    ``counts_tables`` is a list of CountsTable; ``statistic`` maps a
    resampled list to one real number (a full analysis pipeline). Trials
    whose pipeline fails are excluded and counted.
    """
    if n_trials < 2:
        raise ValueError("need at least 2 trials")
    samples = []
    n_excluded = 0
    for rng in trial_rngs(seed, n_trials):
        resampled = [
            tomography.CountsTable(
                tuple(int(c) for c in rng.poisson(np.asarray(t.counts, dtype=float))),
                t.exposure,
            )
            for t in counts_tables
        ]
        try:
            samples.append(float(statistic(resampled)))
        except (InsufficientDataError, SolverError, ValueError):
            n_excluded += 1
    return ResampleEnsemble(
        n_trials=n_trials, seed=seed, samples=np.array(samples), n_excluded=n_excluded
    )


def counts_for_state(rho, rate, rng, per_setting=False):
    """Simulate one tomography run of a state at the given counting rate.

    By default ``rate`` is the expected total count over all nine
    settings (exposure split accordingly); with ``per_setting`` each
    setting individually has expected total ``rate``.
    """
    probs = np.clip(tomography.born_probabilities(rho), 0.0, None)
    exposure = float(rate) if per_setting else float(rate) / probs.sum()
    return tomography.simulate_counts(rho, exposure, rng)


def _fit_channel(chi_true, input_states, rate, rng, per_setting=False, estimator="mle"):
    """Simulate tomography of each output and refit the process matrix.

    estimator 'mle' uses maximum-likelihood states and the constrained
    (PSD + trace-preserving) chi fit; 'linear' uses linear inversion and
    the unconstrained least-squares chi, which is linear in the counts
    and hence unbiased under Poisson noise.
    """
    pairs = []
    for phi in input_states:
        rho_out = tomography.apply_process(chi_true, algebra.projector(phi), repair=True)
        counts = counts_for_state(rho_out, rate, rng, per_setting=per_setting)
        pairs.append((phi, tomography.reconstruct_state(counts, estimator)))
    return tomography.reconstruct_process(pairs, physical=(estimator == "mle")).chi


@dataclass(frozen=True)
class StudyResult:
    x_grid: tuple
    errors: np.ndarray
    converged_value: float


def convergence_study(
    chi, statistic="average_fidelity", n_states_grid=(1, 2, 5, 10, 20, 50),
    trials=50, rate=150, seed=0,
):
    """Statistical error of a channel statistic vs number of probe states.

    Each trial refits the channel from Poisson-noisy tomography of the
    nine canonical inputs, then estimates the statistic by averaging over
    n Haar-random probe states; the reported error is the across-trial
    std. The state-sampling contribution dies off with n while the
    channel-fit noise does not, so the curve plateaus at that floor.
    """
    grid = tuple(n_states_grid)
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be ascending")
    inputs = tomography.canonical_kets()
    values = np.zeros((trials, len(grid)))
    for t, rng in enumerate(trial_rngs(seed, trials)):
        chi_hat = _fit_channel(chi, inputs, rate, rng)
        for g, n in enumerate(grid):
            probes = [algebra.random_pure_state(3, rng) for _ in range(n)]
            vals = []
            for phi in probes:
                rho_out = tomography.apply_process(chi_hat, algebra.projector(phi), repair=True)
                if statistic == "average_fidelity":
                    vals.append(algebra.fidelity(rho_out, phi))
                elif statistic == "mean_mu":
                    vals.append(certify.robustness_mu(rho_out)[0])
                else:
                    raise ValueError(f"unknown statistic {statistic!r}")
            values[t, g] = np.mean(vals)
    errors = values.std(axis=0, ddof=1)
    return StudyResult(
        x_grid=grid, errors=errors, converged_value=float(values[:, -1].mean())
    )


def mub_design_study(
    rate=150, trials=100, seed=0, weight=0.55, per_setting=False, estimator="linear"
):
    """Compare MUB-input vs canonical-input process tomography designs.

    The true channel is weight * identity + (1 - weight) * depolarizing.
    Each trial refits chi from Poisson tomography with either the twelve
    MUB inputs or the nine canonical tomography inputs, then scores the
    mean fidelity of the twelve MUB states through the fitted channel.

    The default 'linear' estimator chain is unbiased (every step linear
    in the counts), so the trial means sit at the true value; the 'mle'
    chain is physical but noticeably biased low at low counting rates.
    """
    chi_true = tomography.noisy_model_chi(weight)
    mub_inputs = algebra.mub_family()
    canonical_inputs = tomography.canonical_kets()
    res = {"mub": [], "nonmub": []}
    for rng in trial_rngs(seed, trials):
        for key, inputs in (("mub", mub_inputs), ("nonmub", canonical_inputs)):
            chi_hat = _fit_channel(
                chi_true, inputs, rate, rng, per_setting=per_setting, estimator=estimator
            )
            _, mean_f = tomography.mub_fidelities(chi_hat, repair=(estimator == "mle"))
            res[key].append(mean_f)
    mub = np.array(res["mub"])
    nonmub = np.array(res["nonmub"])
    return {
        "mean_mub": float(mub.mean()),
        "err_mub": float(mub.std(ddof=1)),
        "mean_nonmub": float(nonmub.mean()),
        "err_nonmub": float(nonmub.std(ddof=1)),
    }


__all__ = [
    "trial_rngs",
    "ResampleEnsemble",
    "poisson_resample",
    "counts_for_state",
    "StudyResult",
    "convergence_study",
    "mub_design_study",
]
