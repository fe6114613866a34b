"""Per-batch discrete collision diagnostics.

A batch of B trigger-target pairs is laid out as 2B instances (triggers
first). From the instances' SIDs and normalized embeddings we build the
pairwise Hamming matrix H, the cosine-distance matrix D, the validity
mask M that excludes constructed positives and same-item duplicates, and
the full/partial conflict-pair partition consumed by the repulsion loss.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, ContractError, DataError

UNIT_ROW_TOL = 1e-6


@dataclass
class BatchLayout:
    """2B instance ids, triggers in [0, B) and targets in [B, 2B)."""

    pair_count: int
    instance_ids: list

    def __post_init__(self):
        if len(self.instance_ids) != 2 * self.pair_count:
            raise ContractError(
                f"expected {2 * self.pair_count} instance ids, got {len(self.instance_ids)}"
            )


@dataclass
class CollisionView:
    H: np.ndarray  # (2B, 2B) int64
    D: np.ndarray  # (2B, 2B) float64
    M: np.ndarray  # (2B, 2B) uint8
    omega_full: np.ndarray  # (n_full, 2) unordered pairs, i < j
    omega_partial: np.ndarray  # (n_partial, 2)


def hamming_matrix(sids: np.ndarray) -> np.ndarray:
    """H[i, j] = number of token positions where SIDs i and j disagree."""
    sids = np.asarray(sids)
    if sids.ndim != 2:
        raise DataError("sids must be a rectangular (n, L) index matrix")
    return _kernels.hamming_matrix(sids)


def cosine_distance_matrix(E: np.ndarray) -> np.ndarray:
    """D[i, j] = 1 - e_i . e_j for unit-normalized rows."""
    E = np.asarray(E, dtype=np.float64)
    norms = np.linalg.norm(E, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_ROW_TOL):
        worst = int(np.argmax(np.abs(norms - 1.0)))
        raise ContractError(
            f"row {worst} has norm {norms[worst]:.8f}; rows must be unit-normalized"
        )
    return 1.0 - E @ E.T


def cosine_distance_vjp(E: np.ndarray, dD: np.ndarray) -> np.ndarray:
    """Backward of cosine_distance_matrix: dE given upstream dD."""
    # D = 1 - E E^T  =>  dE = -(dD + dD^T) E
    return -(dD + dD.T) @ E


def cvpm_mask(layout: BatchLayout) -> np.ndarray:
    """Validity mask: 1 where a pair may count as a collision.

    Zeroes the constructed positive pairs (i, i+B) and every pair whose
    two instances share an underlying item id (the diagonal included).
    """
    B = layout.pair_count
    n = 2 * B
    M = np.ones((n, n), dtype=np.uint8)
    ids = layout.instance_ids
    idx = np.arange(B)
    M[idx, idx + B] = 0
    M[idx + B, idx] = 0
    id_arr = np.asarray(ids, dtype=object)
    same = id_arr[:, None] == id_arr[None, :]
    M[same] = 0
    return M


def partition_collisions(H: np.ndarray, M: np.ndarray, R: int, n_layers=None):
    """Split qualified pairs into full (H=0) and partial (0<H<=R) conflicts.

    Pairs are unordered, reported once with i < j. When n_layers is
    given, R is validated against it.
    """
    if R < 1 or (n_layers is not None and R > n_layers):
        hi = n_layers if n_layers is not None else "L"
        raise ConfigError(f"Hamming radius R must be in [1, {hi}], got {R}")
    upper = np.triu(np.ones_like(H, dtype=bool), k=1)
    valid = (M != 0) & upper
    full = np.argwhere(valid & (H == 0))
    partial = np.argwhere(valid & (H > 0) & (H <= R))
    return full.astype(np.int64), partial.astype(np.int64)


def build_view(sids, E, layout: BatchLayout, R: int, mask_override=None) -> CollisionView:
    """Assemble H, D, M and the conflict partition for one 2B batch."""
    H = hamming_matrix(sids)
    L = np.asarray(sids).shape[1]
    D = cosine_distance_matrix(E)
    M = mask_override if mask_override is not None else cvpm_mask(layout)
    omega_full, omega_partial = partition_collisions(H, M, R, n_layers=L)
    return CollisionView(H=H, D=D, M=M, omega_full=omega_full, omega_partial=omega_partial)


def diagonal_only_mask(n: int) -> np.ndarray:
    """All-ones mask minus the diagonal (the no-CVPM ablation)."""
    M = np.ones((n, n), dtype=np.uint8)
    np.fill_diagonal(M, 0)
    return M
