"""L-layer residual vector quantizer.

Codebooks are a single (L, K, d) float64 array. Encoding assigns each
layer's nearest codeword to the running residual; the quantized embedding
is the sum of selected codewords, so z = z_hat + final residual holds
bit-exactly. Quantization losses follow the usual two-term form: a
codeword-side term (gradients reach only the selected codewords) and a
beta-weighted commitment term (gradients reach only the encoder path;
the residual recursion detaches codewords).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, ContractError, DataError


@dataclass
class QuantizeResult:
    sids: np.ndarray  # (B, L) int64
    q_layers: np.ndarray  # (L, B, d) selected codewords
    residuals: np.ndarray  # (L+1, B, d); residuals[0] is the input Z
    z_hat: np.ndarray  # (B, d)
    n_codes: int


@dataclass
class UtilizationStats:
    histogram: np.ndarray  # (L, K) int64
    perplexity: np.ndarray  # (L,)
    dead_codes: np.ndarray  # (L,) int64


def assign_nearest(codebook_layer: np.ndarray, residuals: np.ndarray) -> np.ndarray:
    """Nearest-codeword index (squared L2) per residual row; ties -> smallest index."""
    codebook_layer = np.asarray(codebook_layer, dtype=np.float64)
    residuals = np.asarray(residuals, dtype=np.float64)
    if codebook_layer.ndim != 2 or codebook_layer.shape[0] == 0:
        raise ContractError("codebook layer must be a non-empty (K, d) matrix")
    if residuals.ndim != 2 or residuals.shape[1] != codebook_layer.shape[1]:
        raise ContractError(
            f"residual dim {residuals.shape} does not match codebook dim {codebook_layer.shape}"
        )
    return _kernels.assign_nearest(codebook_layer, residuals)


def rq_encode(codebooks: np.ndarray, Z: np.ndarray) -> QuantizeResult:
    """Quantize rows of Z through all layers, tracking residuals and SIDs."""
    codebooks = np.asarray(codebooks, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    L, K, d = codebooks.shape
    if Z.ndim != 2 or Z.shape[1] != d:
        raise ContractError(f"Z shape {Z.shape} does not match codeword dim {d}")
    B = Z.shape[0]
    sids = np.empty((B, L), dtype=np.int64)
    q_layers = np.empty((L, B, d))
    residuals = np.empty((L + 1, B, d))
    residuals[0] = Z
    for l in range(L):
        idx = assign_nearest(codebooks[l], residuals[l])
        sids[:, l] = idx
        q_layers[l] = codebooks[l][idx]
        residuals[l + 1] = residuals[l] - q_layers[l]
    z_hat = q_layers.sum(axis=0)
    return QuantizeResult(sids=sids, q_layers=q_layers, residuals=residuals, z_hat=z_hat, n_codes=K)


def rq_losses(result: QuantizeResult, beta: float):
    """Quantization loss and its gradients.

    Returns (loss, dZ, dCodebooks). Both terms share the same value
    ||r^(l-1) - q^(l)||^2 = ||r^(l)||^2; they differ only in where the
    gradient flows (codewords vs encoder).
    """
    if beta < 0:
        raise ConfigError(f"commitment weight beta must be >= 0, got {beta}")
    L = result.q_layers.shape[0]
    B = result.sids.shape[0]
    post = result.residuals[1:]  # (L, B, d) = r^(l-1) - q^(l)
    per_layer_sq = (post**2).sum(axis=2)  # (L, B)
    loss = (1.0 + beta) * per_layer_sq.sum() / B

    dZ = (2.0 * beta / B) * post.sum(axis=0)

    K = result.n_codes
    d = result.q_layers.shape[2]
    dC = np.zeros((L, K, d))
    coeff = -2.0 / B
    for l in range(L):
        np.add.at(dC[l], result.sids[:, l], coeff * post[l])
    return loss, dZ, dC


def ste_route(dL_dzhat: np.ndarray) -> np.ndarray:
    """Straight-through routing: the quantizer is identity in the backward pass."""
    return dL_dzhat


def _kmeans_pp_seed(X, K, rng):
    n = X.shape[0]
    centers = np.empty((K, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for k in range(1, K):
        total = d2.sum()
        if total <= 0.0:
            # every point coincides with a chosen center; fall back to uniform
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers[k] = X[idx]
        d2 = np.minimum(d2, ((X - centers[k]) ** 2).sum(axis=1))
    return centers


def _lloyd(X, centers, iters):
    K = centers.shape[0]
    for _ in range(iters):
        idx = _kernels.assign_nearest(centers, X)
        for k in range(K):
            members = X[idx == k]
            if len(members):
                centers[k] = members.mean(axis=0)
            # empty clusters keep their previous center
    return centers


def init_codebooks(Z_warmup: np.ndarray, K: int, L: int, iters: int = 10, seed: int = 0):
    """Layer-wise k-means (k-means++ seeding) on greedily computed residuals."""
    Z_warmup = np.asarray(Z_warmup, dtype=np.float64)
    if Z_warmup.shape[0] < K:
        raise DataError(
            f"insufficient warmup: {Z_warmup.shape[0]} rows < K={K} codes per layer"
        )
    rng = np.random.default_rng(seed)
    d = Z_warmup.shape[1]
    codebooks = np.empty((L, K, d))
    residual = Z_warmup.copy()
    for l in range(L):
        centers = _kmeans_pp_seed(residual, K, rng)
        centers = _lloyd(residual, centers, iters)
        codebooks[l] = centers
        idx = _kernels.assign_nearest(centers, residual)
        residual = residual - centers[idx]
    return codebooks


def utilization(sids: np.ndarray, n_codes: int) -> UtilizationStats:
    """Per-layer usage histogram, perplexity exp(-sum p log p), dead-code count."""
    sids = np.asarray(sids, dtype=np.int64)
    if sids.ndim != 2:
        raise DataError("sids must be a (N, L) index matrix")
    if sids.size and (sids.min() < 0 or sids.max() >= n_codes):
        raise DataError(f"SID index out of range [0, {n_codes})")
    L = sids.shape[1]
    hist = np.zeros((L, n_codes), dtype=np.int64)
    for l in range(L):
        hist[l] = np.bincount(sids[:, l], minlength=n_codes)
    total = max(sids.shape[0], 1)
    p = hist / total
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(p > 0, p * np.log(p), 0.0)
    perplexity = np.exp(-plogp.sum(axis=1))
    dead = (hist == 0).sum(axis=1)
    return UtilizationStats(histogram=hist, perplexity=perplexity, dead_codes=dead)
