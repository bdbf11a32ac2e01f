# pylint:disable=invalid-name,logging-fstring-interpolation,too-many-arguments
"""GcnModel.py

Term embedding layer, M GCN layers, sequence projection, dot-product sigmoid
prediction and binary cross entropy, with hand-written gradients.

Shapes: N terms, d0 embedding width, d hidden width, B batch, seq_dim input.

    H0 = X @ W_embed                       (N, d0)   X: one-hot ancestors
    H_l = relu(A_hat @ H_{l-1} @ W_gcn[l])  (N, d)
    P = E @ W_proj + b_proj                 (B, d)
    logits = P @ H_M.T                      (B, N)
    Y = sigmoid(logits)
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .GoFeatures import GraphInputs, NodeFeatureMatrix
from .OntologyGraph import OntologyGraph
from .const import (
    ADAM_BETA1,
    ADAM_BETA2,
    ADAM_EPSILON,
    CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
    DEFAULT_BATCH_SIZE,
    DEFAULT_DEPTH_CAP,
    DEFAULT_EPOCHS,
    DEFAULT_LAYERS,
    DEFAULT_LR,
    DEFAULT_SEED,
    DEFAULT_SEQ_DIM,
    DOMAIN,
    MAX_LAYERS,
    Namespace,
)
from .exceptions import (
    CheckpointError,
    NonFiniteError,
    PreconditionError,
    ShapeMismatchError,
)
from .lib.seeding import glorot_uniform, stream
from .utils import format_float, read_text

_LOGGER = logging.getLogger(__name__)


@dataclass
class ModelConfig:
    n_terms: int
    d0: int
    d: int
    n_layers: int = DEFAULT_LAYERS
    seq_dim: int = DEFAULT_SEQ_DIM
    lr: float = DEFAULT_LR
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    seed: int = DEFAULT_SEED
    depth_cap: int = DEFAULT_DEPTH_CAP
    projection_relu: bool = False
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    epsilon: float = ADAM_EPSILON

    def __post_init__(self):
        for name in ("n_terms", "d0", "d", "seq_dim", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise PreconditionError(f"{name} must be positive")
        if not 1 <= self.n_layers <= MAX_LAYERS:
            raise PreconditionError(f"n_layers must be within 1..{MAX_LAYERS}")
        if self.lr <= 0:
            raise PreconditionError("lr must be positive")

    @classmethod
    def from_graph(
        cls,
        g: OntologyGraph,
        namespace: Namespace,
        depth_cap: int = DEFAULT_DEPTH_CAP,
        hidden_dim: int | None = None,
        **kwargs,
    ) -> "ModelConfig":
        """d0 = d = min(max depth of the namespace, depth_cap) unless overridden."""
        width = hidden_dim or min(g.max_depth(namespace), depth_cap)
        return cls(n_terms=len(g), d0=width, d=width, depth_cap=depth_cap, **kwargs)


@dataclass
class ModelParams:
    W_embed: np.ndarray
    W_gcn: list[np.ndarray]
    W_proj: np.ndarray
    b_proj: np.ndarray

    def named(self) -> dict[str, np.ndarray]:
        """Name -> array, in checkpoint order. Arrays are shared, not copied."""
        named = {"W_embed": self.W_embed}
        for layer, w in enumerate(self.W_gcn):
            named[f"W_gcn.{layer}"] = w
        named["W_proj"] = self.W_proj
        named["b_proj"] = self.b_proj
        return named

    @classmethod
    def from_named(cls, named: dict[str, np.ndarray]) -> "ModelParams":
        layers = sorted(
            (int(k.split(".")[1]), v) for k, v in named.items() if k.startswith("W_gcn.")
        )
        return cls(
            W_embed=named["W_embed"],
            W_gcn=[v for _, v in layers],
            W_proj=named["W_proj"],
            b_proj=named["b_proj"],
        )

    def copy(self) -> "ModelParams":
        return ModelParams.from_named({k: v.copy() for k, v in self.named().items()})


@dataclass
class ForwardCache:
    params: ModelParams
    E: np.ndarray
    H0: np.ndarray
    AH: list[np.ndarray]  # A_hat @ H_{l-1}, input of layer l
    H: list[np.ndarray]  # post-relu outputs, H[-1] is H_final
    ZP: np.ndarray  # projection before the optional relu
    P: np.ndarray
    logits: np.ndarray
    Y: np.ndarray
    projection_relu: bool = False

    @property
    def H_final(self) -> np.ndarray:
        return self.H[-1]


@dataclass
class AdamState:
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def init_params(cfg: ModelConfig) -> ModelParams:
    """Glorot uniform weights, zero bias; one independent stream per tensor."""
    W_gcn = []
    fan_in = cfg.d0
    for layer in range(cfg.n_layers):
        W_gcn.append(glorot_uniform(stream(cfg.seed, "W_gcn", layer), fan_in, cfg.d))
        fan_in = cfg.d
    return ModelParams(
        W_embed=glorot_uniform(stream(cfg.seed, "W_embed"), cfg.n_terms, cfg.d0),
        W_gcn=W_gcn,
        W_proj=glorot_uniform(stream(cfg.seed, "W_proj"), cfg.seq_dim, cfg.d),
        b_proj=np.zeros(cfg.d, dtype=np.float64),
    )


def _check_finite(name: str, value: np.ndarray) -> None:
    if not np.all(np.isfinite(value)):
        raise NonFiniteError(f"non-finite values in {name}")


def embed_terms(onehot: NodeFeatureMatrix, W_embed: np.ndarray) -> np.ndarray:
    if onehot.n != W_embed.shape[0]:
        raise ShapeMismatchError(
            f"one-hot features have {onehot.n} terms, W_embed has {W_embed.shape[0]} rows"
        )
    return np.asarray(onehot.matrix @ W_embed)


def gcn_forward(
    H0: np.ndarray, a_hat: sp.spmatrix, W_gcn: list[np.ndarray]
) -> tuple[np.ndarray, list[np.ndarray], list[np.ndarray]]:
    """Apply H_l = relu(A_hat H_{l-1} W_l). Returns (H_final, AH list, H list)."""
    if a_hat.shape != (H0.shape[0], H0.shape[0]):
        raise ShapeMismatchError(
            f"A_hat of shape {a_hat.shape} does not match {H0.shape[0]} terms"
        )
    AH, H = [], []
    h = H0
    for layer, w in enumerate(W_gcn):
        if w.shape[0] != h.shape[1]:
            raise ShapeMismatchError(
                f"layer {layer} expects width {w.shape[0]}, got {h.shape[1]}"
            )
        ah = np.asarray(a_hat @ h)
        h = np.maximum(ah @ w, 0.0)
        _check_finite(f"GCN layer {layer}", h)
        AH.append(ah)
        H.append(h)
    return h, AH, H


def project_sequence(
    e: np.ndarray, W_proj: np.ndarray, bias: np.ndarray, relu: bool = False
) -> np.ndarray:
    """P = e W_proj + bias for one vector or a (B, seq_dim) batch."""
    if e.shape[-1] != W_proj.shape[0]:
        raise ShapeMismatchError(
            f"embedding length {e.shape[-1]} does not match seq_dim {W_proj.shape[0]}"
        )
    p = e @ W_proj + bias
    return np.maximum(p, 0.0) if relu else p


def predict(H_final: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Y = sigmoid(H_final P) for one projected vector or a batch of them."""
    if P.shape[-1] != H_final.shape[1]:
        raise ShapeMismatchError(
            f"P has width {P.shape[-1]}, H has width {H_final.shape[1]}"
        )
    if P.ndim == 1:
        return expit(H_final @ P)
    return expit(P @ H_final.T)


def bce_loss(logits: np.ndarray, targets: np.ndarray) -> float:
    """Mean binary cross entropy over every entry, taken from the logits."""
    if logits.shape != targets.shape:
        raise ShapeMismatchError(f"logits {logits.shape} vs targets {targets.shape}")
    return float(np.mean(np.logaddexp(0.0, logits) - targets * logits))


def forward(
    params: ModelParams,
    graph: GraphInputs,
    E: np.ndarray,
    projection_relu: bool = False,
    graph_side: tuple | None = None,
) -> ForwardCache:
    """Full forward pass. ``graph_side`` reuses a precomputed (H0, AH, H)."""
    if graph_side is None:
        H0 = embed_terms(graph.onehot, params.W_embed)
        _, AH, H = gcn_forward(H0, graph.a_hat, params.W_gcn)
    else:
        H0, AH, H = graph_side
    ZP = project_sequence(E, params.W_proj, params.b_proj)
    P = np.maximum(ZP, 0.0) if projection_relu else ZP
    logits = P @ H[-1].T
    return ForwardCache(
        params=params,
        E=E,
        H0=H0,
        AH=AH,
        H=H,
        ZP=ZP,
        P=P,
        logits=logits,
        Y=expit(logits),
        projection_relu=projection_relu,
    )


def backward(
    cache: ForwardCache,
    T: np.ndarray,
    a_hat: sp.spmatrix,
    onehot: NodeFeatureMatrix,
) -> dict[str, np.ndarray]:
    """Exact gradients of the mean BCE loss, keyed like ModelParams.named()."""
    if T.shape != cache.logits.shape:
        raise ShapeMismatchError(f"targets {T.shape} vs logits {cache.logits.shape}")
    params = cache.params
    dlogits = (cache.Y - T) / T.size  # (B, N)

    dP = dlogits @ cache.H_final  # (B, d)
    dH = dlogits.T @ cache.P  # (N, d)
    if cache.projection_relu:
        dP = dP * (cache.ZP > 0)
    grads = {
        "W_proj": cache.E.T @ dP,
        "b_proj": dP.sum(axis=0),
    }

    a_hat_t = a_hat.T.tocsr()
    for layer in reversed(range(len(params.W_gcn))):
        dZ = dH * (cache.H[layer] > 0)
        grads[f"W_gcn.{layer}"] = cache.AH[layer].T @ dZ
        dH = np.asarray(a_hat_t @ (dZ @ params.W_gcn[layer].T))

    grads["W_embed"] = np.asarray(onehot.matrix.T @ dH)
    return {name: grads[name] for name in params.named()}


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float = DEFAULT_LR,
    beta1: float = ADAM_BETA1,
    beta2: float = ADAM_BETA2,
    eps: float = ADAM_EPSILON,
) -> tuple[dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update, in place on the param arrays."""
    state.t += 1
    bc1 = 1.0 - beta1**state.t
    bc2 = 1.0 - beta2**state.t
    for k, p in params.items():
        g = grads[k]
        if k not in state.m:
            state.m[k] = np.zeros_like(p)
            state.v[k] = np.zeros_like(p)
        m, v = state.m[k], state.v[k]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
    return params, state


def save_checkpoint(path, cfg: ModelConfig, params: ModelParams) -> None:
    """Versioned text checkpoint, 17 significant digits per value."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(
            f"{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION} {cfg.n_terms} {cfg.d0} "
            f"{cfg.d} {cfg.n_layers} {cfg.seq_dim}\n"
        )
        for name, array in params.named().items():
            matrix = array.reshape(1, -1) if array.ndim == 1 else array
            rows, cols = matrix.shape
            f.write(f"{name} {rows} {cols}\n")
            for row in matrix:
                f.write(" ".join(format_float(v) for v in row) + "\n")


def load_checkpoint(path) -> tuple[dict, ModelParams]:
    """Returns ({n_terms, d0, d, n_layers, seq_dim}, params)."""
    lines = read_text(path).splitlines()
    if not lines:
        raise CheckpointError(f"{path}: empty checkpoint")
    header = lines[0].split()
    if len(header) != 7 or header[0] != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path}: bad header {lines[0]!r}")
    if header[1] != CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: unsupported version {header[1]}")
    shape = dict(
        zip(("n_terms", "d0", "d", "n_layers", "seq_dim"), map(int, header[2:]))
    )
    named = {}
    pos = 1
    try:
        while pos < len(lines):
            name, rows, cols = lines[pos].split()
            rows, cols = int(rows), int(cols)
            values = [
                np.array(lines[pos + 1 + r].split(), dtype=np.float64)
                for r in range(rows)
            ]
            matrix = np.vstack(values).reshape(rows, cols)
            named[name] = matrix.ravel() if name == "b_proj" else matrix
            pos += 1 + rows
    except (ValueError, IndexError) as exc:
        raise CheckpointError(f"{path}: malformed body near line {pos + 1}") from exc
    expected = 3 + shape["n_layers"]
    if len(named) != expected or "W_embed" not in named:
        raise CheckpointError(f"{path}: expected {expected} matrices, got {len(named)}")
    params = ModelParams.from_named(named)
    if params.W_embed.shape != (shape["n_terms"], shape["d0"]) or params.W_proj.shape != (
        shape["seq_dim"],
        shape["d"],
    ):
        raise CheckpointError(f"{path}: matrix shapes disagree with header")
    _LOGGER.debug(f"{DOMAIN} - Loaded checkpoint {path}")
    return shape, params
