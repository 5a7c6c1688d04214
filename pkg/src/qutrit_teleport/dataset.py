"""Bundled reference data and matrix (de)serialization.

The fixtures directory carries the ten published teleported-state
density matrices (rho1 .. rho10, rounded to three decimals) and the
published 9x9 process matrix. Loading applies the standard invariant
repairs (symmetrize, clip, renormalize / project) and logs every
adjustment; repairs beyond ``REPAIR_CAP`` raise DataQualityError.

The published process matrix is stated in the orthonormal operator basis
{I/sqrt3, lambda_a/sqrt2} and normalized to unit trace (Choi-state
form); ``load_reference_chi`` converts it to this package's convention
(sigma_0 = I, trace preservation sum chi_lk s_k s_l = I).
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from . import protocol, tomography
from .errors import DataQualityError, ParseError

REPAIR_CAP = 0.05

# Published fidelity list for the teleported states. Eleven values are
# listed for ten states; recomputation from the printed matrices matches
# positions 1-8 at index parity and the last two values, leaving the
# ninth listed value (0.643) unattached. The reconciled positions map
# state i (1-based) to its slot in the list.
LISTED_STATE_FIDELITIES = (
    0.745, 0.715, 0.708, 0.724, 0.693, 0.661, 0.626, 0.668, 0.643, 0.665, 0.647,
)
STATE_FIDELITY_POSITIONS = {i: i - 1 for i in range(1, 9)} | {9: 9, 10: 10}
LISTED_STATE_FIDELITY_MEAN = 0.685

LISTED_MUB_FIDELITIES = (
    0.740, 0.689, 0.713, 0.634, 0.728, 0.687, 0.674, 0.664, 0.751, 0.668, 0.764, 0.648,
)
LISTED_MUB_MEAN = 0.697
LISTED_PROCESS_FIDELITY = 0.596

# Published batch-certification summary over the 20x20 phase grid.
LISTED_N_SIMULABLE = 149
LISTED_N_GENUINE = 251
LISTED_MEAN_MU = 0.111
LISTED_STD_MU = 0.034


def matrix_to_json(mat):
    mat = np.asarray(mat, dtype=complex)
    return {
        "dim": mat.shape[0],
        "entries": [[[float(v.real), float(v.imag)] for v in row] for row in mat],
    }


def save_matrix(mat, path):
    with open(path, "w") as f:
        json.dump(matrix_to_json(mat), f, indent=1)


def parse_matrix(doc, source="<memory>"):
    """Validate the {"dim", "entries"} schema and return a complex array."""
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be an object")
    for key in ("dim", "entries"):
        if key not in doc:
            raise ParseError(f"{source}: missing field {key!r}")
    dim = doc["dim"]
    entries = doc["entries"]
    if not isinstance(dim, int) or dim < 1:
        raise ParseError(f"{source}: field 'dim' must be a positive integer")
    if not isinstance(entries, list) or len(entries) != dim:
        raise ParseError(f"{source}: 'entries' must have {dim} rows")
    mat = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{source}: row {i} must have {dim} entries")
        for j, cell in enumerate(row):
            if (
                not isinstance(cell, list)
                or len(cell) != 2
                or not all(isinstance(v, (int, float)) for v in cell)
            ):
                raise ParseError(f"{source}: entry ({i},{j}) must be [re, im]")
            mat[i, j] = complex(cell[0], cell[1])
    return mat


def load_matrix(path):
    try:
        with open(path) as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from None
    return parse_matrix(doc, source=str(path))


def repair_and_log_density(mat, cap=REPAIR_CAP):
    rho, log = tomography.repair_density_matrix(mat)
    worst = max(log.values())
    if worst > cap:
        raise DataQualityError(
            f"density-matrix repair {worst:.3f} exceeds the cap {cap}"
        )
    return rho, log


def repair_and_log_process(mat, cap=REPAIR_CAP, assume_choi_normalized=None):
    """Repair a 9x9 process matrix; returns (chi, adjustment log).

    ``assume_choi_normalized`` selects the published convention
    (orthonormal basis, unit trace); by default the interpretation whose
    trace-preservation residual is smaller wins -- a matrix stated in the
    operator basis already has sum chi_lk s_k s_l close to I, while a
    Choi-normalized one reaches that only after conversion.
    """
    mat = np.asarray(mat, dtype=complex)
    if assume_choi_normalized is None:
        resid_raw = float(np.abs(tomography.tp_matrix(mat) - np.eye(3)).max())
        resid_conv = float(
            np.abs(tomography.tp_matrix(tomography.chi_from_orthonormal(mat)) - np.eye(3)).max()
        )
        assume_choi_normalized = resid_conv < resid_raw
    chi = tomography.chi_from_orthonormal(mat) if assume_choi_normalized else mat
    herm = float(np.abs(chi - chi.conj().T).max())
    eigs = np.linalg.eigvalsh((chi + chi.conj().T) / 2)
    clip = float(-min(eigs.min(), 0.0))
    tp_resid = float(np.abs(tomography.tp_matrix(chi) - np.eye(3)).max())
    log = {
        "converted_from_choi_normalized": bool(assume_choi_normalized),
        "hermiticity_residual": herm,
        "eigenvalue_clip": clip,
        "tp_residual": tp_resid,
    }
    worst = max(herm, clip, tp_resid)
    if worst > cap:
        raise DataQualityError(f"process-matrix repair {worst:.3f} exceeds the cap {cap}")
    return tomography.project_physical(chi), log


def ingest_matrix(path, cap=REPAIR_CAP):
    """Load and repair a matrix file; returns (matrix, kind, adjustment log).

    3x3 files are treated as density matrices, 9x9 files as process
    matrices; anything else is rejected.
    """
    mat = load_matrix(path)
    if mat.shape == (3, 3):
        rho, log = repair_and_log_density(mat, cap)
        return rho, "density", log
    if mat.shape == (9, 9):
        chi, log = repair_and_log_process(mat, cap)
        return chi, "process", log
    raise ParseError(f"{path}: unsupported dimension {mat.shape[0]}")


def _fixture(name):
    ref = resources.files("qutrit_teleport") / "fixtures" / name
    with resources.as_file(ref) as path:
        return load_matrix(path)


def reference_rho_raw(i):
    """Printed density matrix rho_i (1-based), exactly as published."""
    if not 1 <= i <= 10:
        raise ValueError("reference states are numbered 1..10")
    return _fixture(f"rho{i}.json")


def reference_rho(i):
    """Printed rho_i after the standard repairs, with the adjustment log."""
    return repair_and_log_density(reference_rho_raw(i))


def reference_chi_raw():
    """The published 9x9 process matrix, exactly as printed."""
    return _fixture("chi.json")


def reference_chi():
    """Published chi converted to this package's basis and made physical."""
    return repair_and_log_process(reference_chi_raw(), assume_choi_normalized=True)


def reference_targets():
    """Ideal target states for rho_1 .. rho_10 (the benchmark inputs)."""
    return protocol.benchmark_input_states()


__all__ = [
    "REPAIR_CAP",
    "LISTED_STATE_FIDELITIES",
    "STATE_FIDELITY_POSITIONS",
    "LISTED_STATE_FIDELITY_MEAN",
    "LISTED_MUB_FIDELITIES",
    "LISTED_MUB_MEAN",
    "LISTED_PROCESS_FIDELITY",
    "LISTED_N_SIMULABLE",
    "LISTED_N_GENUINE",
    "LISTED_MEAN_MU",
    "LISTED_STD_MU",
    "matrix_to_json",
    "save_matrix",
    "parse_matrix",
    "load_matrix",
    "repair_and_log_density",
    "repair_and_log_process",
    "ingest_matrix",
    "reference_rho_raw",
    "reference_rho",
    "reference_chi_raw",
    "reference_chi",
    "reference_targets",
]
