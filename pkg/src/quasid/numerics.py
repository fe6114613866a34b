"""Dense numeric primitives: a small feed-forward net with analytic
forward/backward, a decoupled-weight-decay Adam, row normalization, and
the central finite-difference checker every loss module is verified
against.

All math runs in float64. Functions are pure except :func:`adam_step`,
which updates the optimizer state in place.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, NumericError

NORM_FLOOR = 1e-12


def ensure_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"non-finite values in {what}")


@dataclass
class DenseLayer:
    W: np.ndarray  # (d_in, d_out)
    b: np.ndarray  # (d_out,)
    act: str  # "relu" or "linear"


@dataclass
class Mlp:
    layers: list

    @property
    def in_dim(self):
        return self.layers[0].W.shape[0]

    @property
    def out_dim(self):
        return self.layers[-1].W.shape[1]

    def param_arrays(self):
        out = []
        for layer in self.layers:
            out.append(layer.W)
            out.append(layer.b)
        return out


@dataclass
class MlpCache:
    """Per-layer inputs and pre-activations retained for the backward pass."""

    inputs: list = field(default_factory=list)
    preacts: list = field(default_factory=list)
    shapes: list = field(default_factory=list)


def init_mlp(dims, rng, hidden_act="relu"):
    """Fan-in-scaled uniform init; the last layer is affine-only."""
    layers = []
    for i in range(len(dims) - 1):
        d_in, d_out = dims[i], dims[i + 1]
        scale = 1.0 / np.sqrt(d_in)
        W = rng.uniform(-scale, scale, size=(d_in, d_out))
        b = np.zeros(d_out)
        act = hidden_act if i < len(dims) - 2 else "linear"
        layers.append(DenseLayer(W, b, act))
    return Mlp(layers)


def _activate(pre, act):
    if act == "relu":
        return np.maximum(pre, 0.0)
    if act == "linear":
        return pre
    raise ContractError(f"unknown activation {act!r}")


def mlp_apply(params: Mlp, X: np.ndarray):
    """Forward pass. Returns (Y, cache); the cache feeds mlp_grad."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != params.in_dim:
        raise ContractError(
            f"input shape {X.shape} does not match first layer in_dim {params.in_dim}"
        )
    cache = MlpCache()
    h = X
    for layer in params.layers:
        if h.shape[1] != layer.W.shape[0]:
            raise ContractError("layer dimensions do not chain")
        cache.inputs.append(h)
        pre = h @ layer.W + layer.b
        cache.preacts.append(pre)
        cache.shapes.append((layer.W.shape, layer.b.shape, layer.act))
        h = _activate(pre, layer.act)
    ensure_finite(h, "mlp output")
    return h, cache


def mlp_grad(params: Mlp, cache: MlpCache, dY: np.ndarray):
    """Backward pass for a cached forward. Returns (dParams, dX).

    dParams mirrors params as a Mlp holding gradient arrays.
    """
    if len(cache.inputs) != len(params.layers):
        raise ContractError("cache does not match params (layer count)")
    for layer, (w_shape, b_shape, act) in zip(params.layers, cache.shapes):
        if layer.W.shape != w_shape or layer.b.shape != b_shape or layer.act != act:
            raise ContractError("cache does not match params (stale cache?)")
    dY = np.asarray(dY, dtype=np.float64)
    if dY.shape != (cache.inputs[0].shape[0], params.out_dim):
        raise ContractError(f"dY shape {dY.shape} does not match forward output")

    grad_layers = []
    dh = dY
    for layer, h_in, pre in zip(
        reversed(params.layers), reversed(cache.inputs), reversed(cache.preacts)
    ):
        if layer.act == "relu":
            dpre = dh * (pre > 0.0)
        else:
            dpre = dh
        dW = h_in.T @ dpre
        db = dpre.sum(axis=0)
        dh = dpre @ layer.W.T
        grad_layers.append(DenseLayer(dW, db, layer.act))
    grad_layers.reverse()
    return Mlp(grad_layers), dh


@dataclass
class AdamState:
    lr: float
    weight_decay: float = 0.0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    @classmethod
    def for_params(cls, params, lr, weight_decay=0.0, beta1=0.9, beta2=0.999, eps=1e-8):
        state = cls(lr=lr, weight_decay=weight_decay, beta1=beta1, beta2=beta2, eps=eps)
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
        return state


def adam_step(state: AdamState, params, grads, decay_mask=None):
    """Bias-corrected Adam with decoupled weight decay, in place.

    params/grads are parallel lists of arrays; decay_mask marks which
    entries receive weight decay (all, when omitted).
    """
    if len(params) != len(state.m) or len(grads) != len(params):
        raise ContractError("adam_step: params/grads/state length mismatch")
    if decay_mask is None:
        decay_mask = [True] * len(params)
    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape:
            raise ContractError(f"adam_step: grad shape {g.shape} != param shape {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient for parameter {i} (shape {p.shape})")
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g
        m_hat = state.m[i] / bc1
        v_hat = state.v[i] / bc2
        p -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        if decay_mask[i] and state.weight_decay:
            p -= state.lr * state.weight_decay * p
    return params


def row_normalize(X: np.ndarray) -> np.ndarray:
    """Unit-L2 rows; degenerate rows divide by a 1e-12 floor instead of 0."""
    X = np.asarray(X, dtype=np.float64)
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    return X / np.maximum(norms, NORM_FLOOR)


def row_normalize_vjp(X: np.ndarray, dE: np.ndarray) -> np.ndarray:
    """Backward of row_normalize: dZ given upstream dE at input X."""
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    safe = np.maximum(norms, NORM_FLOOR)
    E = X / safe
    proj = (E * dE).sum(axis=1, keepdims=True)
    dX = (dE - E * proj) / safe
    # below the floor the map is plain scaling by 1/floor
    degenerate = (norms < NORM_FLOOR).ravel()
    if degenerate.any():
        dX[degenerate] = dE[degenerate] / NORM_FLOOR
    return dX


def finite_diff_check(loss_fn, x0, probe_eps=1e-5, max_coords=None, rng=None):
    """Worst-coordinate relative error of analytic vs central-difference grads.

    loss_fn maps a flat float64 vector to (scalar, grad_vector) and must
    be deterministic. Error per coordinate is
    |analytic - numeric| / max(|analytic|, |numeric|, 1).
    When max_coords is given, a random subset of coordinates is probed.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    loss_a, grad = loss_fn(x0)
    loss_b, _ = loss_fn(x0)
    if loss_a != loss_b:
        raise ContractError("loss_fn is not deterministic; finite-difference check invalid")
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != x0.shape:
        raise ContractError("gradient shape does not match parameter vector")

    coords = np.arange(x0.size)
    if max_coords is not None and max_coords < x0.size:
        rng = rng or np.random.default_rng(0)
        coords = rng.choice(x0.size, size=max_coords, replace=False)

    worst = 0.0
    for i in coords:
        xp = x0.copy()
        xp[i] += probe_eps
        xm = x0.copy()
        xm[i] -= probe_eps
        fp, _ = loss_fn(xp)
        fm, _ = loss_fn(xm)
        numeric = (fp - fm) / (2.0 * probe_eps)
        err = abs(grad[i] - numeric) / max(abs(grad[i]), abs(numeric), 1.0)
        worst = max(worst, err)
    return worst
