"""Qutrit state and process tomography.

Nine-projector counting model with Poisson statistics, linear-inversion
and maximum-likelihood density-matrix estimation, chi process-matrix
reconstruction with PSD + trace-preserving constraints, and the fidelity
calculus (process fidelity, average fidelity, the twelve MUB fidelities).

Process matrices are stored in the basis [I, lambda_1 .. lambda_8]
(identity unnormalized), so the ideal teleportation channel is
chi[0,0] = 1 and trace preservation reads sum_lk chi_lk s_k s_l = I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import algebra
from .errors import IllPosedError, InsufficientDataError, SolverError

TP_TOL = 1e-6
PSD_TOL = 1e-9


def canonical_kets():
    """The nine tomography projectors, in measurement order."""
    k0, k1, k2 = (algebra.ket(i) for i in range(3))
    r2 = 1 / math.sqrt(2)
    return [
        k0,
        k1,
        k2,
        r2 * (k0 + k1),
        r2 * (k0 + 1j * k1),
        r2 * (k0 + k2),
        r2 * (k0 + 1j * k2),
        r2 * (k1 + k2),
        r2 * (k1 + 1j * k2),
    ]


CANONICAL_KETS = canonical_kets()

SETTING_NAMES = ("0", "1", "2", "0+1", "0+i1", "0+2", "0+i2", "1+2", "1+i2")


@dataclass(frozen=True)
class CountsTable:
    """Nine detection counts plus the exposure (reference count scale)."""

    counts: tuple
    exposure: float

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != 9:
            raise ValueError("expected 9 counts")
        if any(c < 0 for c in counts):
            raise ValueError("counts must be non-negative")
        if self.exposure <= 0:
            raise ValueError("exposure must be positive")
        object.__setattr__(self, "counts", counts)


def born_probabilities(rho):
    rho = np.asarray(rho, dtype=complex)
    return np.array([algebra.fidelity(rho, psi) for psi in CANONICAL_KETS])


def simulate_counts(rho, exposure, rng):
    """Poisson counts with mean exposure * <psi_i|rho|psi_i> per setting."""
    probs = np.clip(born_probabilities(rho), 0.0, None)
    counts = rng.poisson(exposure * probs)
    return CountsTable(tuple(int(c) for c in counts), float(exposure))


def _linear_inversion(counts):
    c = np.asarray(counts.counts, dtype=float)
    basis_total = c[:3].sum()
    if basis_total == 0:
        raise InsufficientDataError("basis-projector counts are all zero")
    p = c / basis_total  # diagonal normalized to the basis-triple sum
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0], rho[1, 1], rho[2, 2] = p[0], p[1], p[2]
    for (j, k), (i_re, i_im) in {(0, 1): (3, 4), (0, 2): (5, 6), (1, 2): (7, 8)}.items():
        half = 0.5 * (p[j] + p[k])
        re = p[i_re] - half
        im = half - p[i_im]
        rho[j, k] = re + 1j * im
        rho[k, j] = re - 1j * im
    return rho


def _t_to_rho(t):
    """Lower-triangular Cholesky-like factor (9 reals) -> density matrix."""
    T = np.array(
        [
            [t[0], 0, 0],
            [t[3] + 1j * t[4], t[1], 0],
            [t[5] + 1j * t[6], t[7] + 1j * t[8], t[2]],
        ],
        dtype=complex,
    )
    rho = T.conj().T @ T
    tr = np.trace(rho).real
    if tr <= 0:
        return np.eye(3, dtype=complex) / 3.0
    return rho / tr


def _rho_to_t(rho):
    """Seed parameters: lower-triangular T with rho = T^dagger T.

    Uses the index-reversal trick: if J rho J = C C^dagger (Cholesky, C
    lower), then rho = D D^dagger with D = J C J upper triangular, so
    T = D^dagger is lower triangular.
    """
    rho = repair_density_matrix(rho)[0]
    J = np.fliplr(np.eye(3))
    C = np.linalg.cholesky(J @ rho @ J + 1e-10 * np.eye(3))
    T = (J @ C @ J).conj().T
    return np.array(
        [
            T[0, 0].real,
            T[1, 1].real,
            T[2, 2].real,
            T[1, 0].real,
            T[1, 0].imag,
            T[2, 0].real,
            T[2, 0].imag,
            T[2, 1].real,
            T[2, 1].imag,
        ]
    )


def _mle(counts):
    c = np.asarray(counts.counts, dtype=float)
    if c.sum() == 0:
        raise InsufficientDataError("all counts are zero")
    kets = np.array(CANONICAL_KETS)

    def neg_loglik(t):
        rho = _t_to_rho(t)
        p = np.einsum("ij,jk,ik->i", kets.conj(), rho, kets).real
        p = np.clip(p, 1e-12, None)
        # analytic optimal exposure scale: s = sum(n) / sum(p)
        s = c.sum() / p.sum()
        lam = s * p
        return float(np.sum(lam - c * np.log(lam)))

    t0 = _rho_to_t(_linear_inversion(counts))
    res = minimize(neg_loglik, t0, method="L-BFGS-B", options={"ftol": 1e-14, "gtol": 1e-10})
    return _t_to_rho(res.x)


def reconstruct_state(counts, method="mle"):
    """Density matrix from a CountsTable; method 'linear' or 'mle'.

    Linear inversion can return a non-physical matrix (Hermitian, trace 1,
    possibly indefinite); the MLE result is PSD and trace 1 by construction.
    """
    if method == "linear":
        return _linear_inversion(counts)
    if method == "mle":
        return _mle(counts)
    raise ValueError(f"unknown method {method!r}")


def repair_density_matrix(mat, atol=0.0):
    """Symmetrize, clip negative eigenvalues, renormalize the trace.

    Returns (rho, log) where log records the size of each adjustment.
    """
    mat = np.asarray(mat, dtype=complex)
    herm_resid = float(np.abs(mat - mat.conj().T).max())
    rho = (mat + mat.conj().T) / 2
    w, u = np.linalg.eigh(rho)
    clip_size = float(-min(w.min(), 0.0))
    w = np.clip(w, 0.0, None)
    rho = u @ np.diag(w) @ u.conj().T
    tr = np.trace(rho).real
    trace_adjust = abs(tr - 1.0)
    if tr <= 0:
        raise InsufficientDataError("matrix has non-positive trace after clipping")
    rho = rho / tr
    log = {
        "hermiticity_residual": herm_resid,
        "eigenvalue_clip": clip_size,
        "trace_adjustment": float(trace_adjust),
    }
    return rho, log


# --- process matrices -----------------------------------------------------

_BASIS = algebra.gell_mann_basis()
_BASIS_STACK = np.array(_BASIS)  # shape (9, 3, 3)
_N = 9


# Isometric vectorization of Hermitian 9x9 matrices: off-diagonal
# parameters carry a sqrt(2) so the parameter 2-norm equals the Frobenius
# norm (required for the PSD and TP projections to share one metric).
_SQRT2 = math.sqrt(2.0)


def _chi_from_params(x):
    chi = np.zeros((_N, _N), dtype=complex)
    idx = 0
    for i in range(_N):
        chi[i, i] = x[idx]
        idx += 1
    for i in range(_N):
        for j in range(i + 1, _N):
            val = (x[idx] + 1j * x[idx + 1]) / _SQRT2
            chi[i, j] = val
            chi[j, i] = val.conjugate()
            idx += 2
    return chi


def _params_from_chi(chi):
    x = np.zeros(_N * _N)
    idx = 0
    for i in range(_N):
        x[idx] = chi[i, i].real
        idx += 1
    for i in range(_N):
        for j in range(i + 1, _N):
            x[idx] = _SQRT2 * chi[i, j].real
            x[idx + 1] = _SQRT2 * chi[i, j].imag
            idx += 2
    return x


def apply_process(chi, rho, repair=False):
    """rho_out = sum_lk chi_lk sigma_l rho sigma_k (optionally repaired).

    With ``repair`` the output is symmetrized, eigenvalue-clipped and
    trace-renormalized; use it when chi is only approximately physical.
    """
    chi = np.asarray(chi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    out = np.einsum("lk,lab,bc,kcd->ad", chi, _BASIS_STACK, rho, _BASIS_STACK)
    if repair:
        out, _ = repair_density_matrix(out)
    return out


def tp_matrix(chi):
    """sum_lk chi_lk sigma_k sigma_l; equals I iff chi is trace preserving."""
    chi = np.asarray(chi, dtype=complex)
    return np.einsum("lk,kab,lbc->ac", chi, _BASIS_STACK, _BASIS_STACK)


def chi_ideal():
    chi = np.zeros((_N, _N), dtype=complex)
    chi[0, 0] = 1.0
    return chi


def depolarizing_chi():
    """chi of the fully depolarizing channel rho -> I/3 in this basis.

    Using sum_a lambda_a rho lambda_a = 2 I - (2/3) rho, the channel
    (1/9) I rho I + (1/6) sum_a lambda_a rho lambda_a maps every state
    to I/3 and is exactly trace preserving.
    """
    chi = np.zeros((_N, _N), dtype=complex)
    chi[0, 0] = 1.0 / 9.0
    for a in range(1, _N):
        chi[a, a] = 1.0 / 6.0
    return chi


def noisy_model_chi(weight=0.55):
    """weight * chi_ideal + (1 - weight) * (depolarizing chi)."""
    return weight * chi_ideal() + (1 - weight) * depolarizing_chi()


def process_fidelity(chi):
    """Tr(chi_ideal chi) = Re chi[0,0] in this basis."""
    return float(np.asarray(chi)[0, 0].real)


def average_fidelity_from_process(f_process, dim):
    """f_ave = (f_process * d + 1) / (d + 1)."""
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    return (f_process * dim + 1) / (dim + 1)


def mub_fidelities(chi, repair=False):
    """Fidelities of the twelve MUB states through the channel, plus mean."""
    fids = []
    for psi in algebra.mub_family():
        out = apply_process(chi, algebra.projector(psi), repair=repair)
        out = (out + out.conj().T) / 2
        fids.append(algebra.fidelity(out, psi))
    return np.array(fids), float(np.mean(fids))


# --- chi reconstruction ---------------------------------------------------


def _design_operator(inputs):
    """Real 81x81 matrix mapping chi parameters to stacked output entries."""
    cols = []
    for col in range(_N * _N):
        e = np.zeros(_N * _N)
        e[col] = 1.0
        chi = _chi_from_params(e)
        outs = [apply_process(chi, algebra.projector(phi)) for phi in inputs]
        cols.append(np.concatenate([np.r_[o.real.ravel(), o.imag.ravel()] for o in outs]))
    return np.array(cols).T


_TP_CACHE = None


def _tp_constraint():
    """Affine TP constraint rows M x = b in parameter space (cached pinv)."""
    global _TP_CACHE
    if _TP_CACHE is None:
        rows = []
        for col in range(_N * _N):
            e = np.zeros(_N * _N)
            e[col] = 1.0
            t = tp_matrix(_chi_from_params(e))
            rows.append(np.r_[t.real.ravel(), t.imag.ravel()])
        M = np.array(rows).T
        b = np.r_[np.eye(3).ravel(), np.zeros(9)]
        _TP_CACHE = (M, np.linalg.pinv(M), b)
    return _TP_CACHE


def project_tp(chi):
    """Euclidean projection of chi onto the trace-preserving affine subspace."""
    M, Mp, b = _tp_constraint()
    x = _params_from_chi(np.asarray(chi, dtype=complex))
    x = x - Mp @ (M @ x - b)
    return _chi_from_params(x)


def project_psd(chi):
    chi = np.asarray(chi, dtype=complex)
    chi = (chi + chi.conj().T) / 2
    w, u = np.linalg.eigh(chi)
    return u @ np.diag(np.clip(w, 0.0, None)) @ u.conj().T


def project_physical(chi, tol=1e-9, max_iter=20000):
    """Dykstra alternating projection onto PSD intersect TP."""
    x = np.asarray(chi, dtype=complex)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for _ in range(max_iter):
        y = project_psd(x + p)
        p = x + p - y
        x_new = project_tp(y + q)
        q = y + q - x_new
        if np.abs(x_new - x).max() < tol:
            x = x_new
            break
        x = x_new
    else:
        raise SolverError("Dykstra projection did not converge")
    return x


@dataclass
class ProcessFit:
    chi: np.ndarray
    residual: float
    n_iterations: int


def reconstruct_process(pairs, tol=1e-9, max_iter=20000, physical=True):
    """Least-squares chi under PSD and trace-preservation constraints.

    ``pairs`` is a list of (input pure state, output density matrix).
    Minimizes the summed Frobenius misfit by projected gradient descent,
    with Dykstra alternating projection onto the PSD cone and the TP
    affine subspace as the projection step. Returns a ProcessFit with the
    final residual.

    With ``physical=False`` the constraints are dropped and the plain
    least-squares (Hermitian) solution is returned; that estimator is
    linear in the data and therefore unbiased under Poisson noise.
    """
    inputs = [algebra.check_pure_state(np.asarray(p, dtype=complex)) for p, _ in pairs]
    outputs = [np.asarray(r, dtype=complex) for _, r in pairs]

    proj_stack = np.array([algebra.projector(p).ravel() for p in inputs])
    if np.linalg.matrix_rank(proj_stack, tol=1e-9) < 9:
        raise IllPosedError("input states do not span qutrit operator space")

    A = _design_operator(inputs)
    b = np.concatenate([np.r_[o.real.ravel(), o.imag.ravel()] for o in outputs])
    gram = A.T @ A
    atb = A.T @ b
    step = 1.0 / np.linalg.norm(gram, 2)

    def proj(v):
        return _params_from_chi(project_physical(_chi_from_params(v)))

    # FISTA from the projected unconstrained interpolant.
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    if not physical:
        chi = _chi_from_params(x)
        residual = float(np.sum((A @ x - b) ** 2))
        return ProcessFit(chi=chi, residual=residual, n_iterations=0)
    x = proj(x)
    z, t_mom = x.copy(), 1.0
    prev = np.inf
    it = 0
    for it in range(max_iter):
        x_new = proj(z - step * (gram @ z - atb))
        t_new = (1 + math.sqrt(1 + 4 * t_mom * t_mom)) / 2
        z = x_new + ((t_mom - 1) / t_new) * (x_new - x)
        obj = float(np.sum((A @ x_new - b) ** 2))
        moved = np.abs(x_new - x).max()
        x, t_mom = x_new, t_new
        if moved < tol and abs(prev - obj) < tol * max(1.0, obj):
            break
        prev = obj
    else:
        raise SolverError("projected gradient did not converge")
    chi = _chi_from_params(x)
    residual = float(np.sum((A @ x - b) ** 2))
    return ProcessFit(chi=chi, residual=residual, n_iterations=it + 1)


def check_process_matrix(chi, tp_tol=TP_TOL, psd_tol=PSD_TOL):
    """Validate Hermiticity, PSD-ness, and trace preservation of chi."""
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (_N, _N):
        raise ValueError(f"chi must be 9x9, got {chi.shape}")
    if np.abs(chi - chi.conj().T).max() > 1e-9:
        raise ValueError("chi is not Hermitian")
    if np.linalg.eigvalsh((chi + chi.conj().T) / 2).min() < -psd_tol:
        raise ValueError("chi is not positive semidefinite")
    if np.abs(tp_matrix(chi) - np.eye(3)).max() > tp_tol:
        raise ValueError("chi is not trace preserving")
    return chi


def chi_from_orthonormal(chi_on):
    """Convert a chi given in the orthonormal basis {I/sqrt3, lambda/sqrt2}
    and normalized to unit trace (Choi-state form) into this module's basis.

    The channel sum chi'_lk s'_l rho s'_k with Tr chi' = 1 maps states to
    trace-1/3 outputs; multiplying by 3 restores trace preservation, and
    the basis rescaling absorbs sqrt3 / sqrt2 factors per index.
    """
    chi_on = np.asarray(chi_on, dtype=complex)
    scale = np.array([math.sqrt(3.0)] + [math.sqrt(2.0)] * 8)
    return 3.0 * chi_on / np.outer(scale, scale)


def chi_to_orthonormal(chi):
    """Inverse of :func:`chi_from_orthonormal`."""
    chi = np.asarray(chi, dtype=complex)
    scale = np.array([math.sqrt(3.0)] + [math.sqrt(2.0)] * 8)
    return chi * np.outer(scale, scale) / 3.0


__all__ = [
    "CANONICAL_KETS",
    "SETTING_NAMES",
    "canonical_kets",
    "CountsTable",
    "born_probabilities",
    "simulate_counts",
    "reconstruct_state",
    "repair_density_matrix",
    "apply_process",
    "tp_matrix",
    "chi_ideal",
    "depolarizing_chi",
    "noisy_model_chi",
    "process_fidelity",
    "average_fidelity_from_process",
    "mub_fidelities",
    "reconstruct_process",
    "ProcessFit",
    "project_tp",
    "project_psd",
    "project_physical",
    "check_process_matrix",
    "chi_from_orthonormal",
    "chi_to_orthonormal",
]
