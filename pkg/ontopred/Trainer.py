# pylint:disable=invalid-name,logging-fstring-interpolation,too-many-locals
"""Trainer.py"""

import logging
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from tqdm import tqdm

from .GcnModel import (
    AdamState,
    ModelConfig,
    ModelParams,
    adam_step,
    backward,
    bce_loss,
    embed_terms,
    forward,
    gcn_forward,
    init_params,
    predict,
    project_sequence,
    save_checkpoint,
)
from .GoFeatures import GraphInputs
from .const import DOMAIN
from .exceptions import NonFiniteError, ShapeMismatchError
from .lib.parallel import ordered_map
from .lib.seeding import stream
from .utils import chunk_bounds

_LOGGER = logging.getLogger(__name__)


@dataclass
class TrainingData:
    proteins: tuple[str, ...]
    embeddings: np.ndarray  # (n, seq_dim)
    targets: sp.csr_matrix  # (n, N) binary

    def __post_init__(self):
        if self.embeddings.shape[0] != len(self.proteins) or self.targets.shape[0] != len(
            self.proteins
        ):
            raise ShapeMismatchError("proteins, embeddings and targets disagree")


@dataclass
class TrainResult:
    params: ModelParams
    epoch_losses: list[float] = field(default_factory=list)
    initial_loss: float = None
    final_loss: float = None
    checkpoints: list[str] = field(default_factory=list)


def full_loss(
    params: ModelParams, graph: GraphInputs, data: TrainingData, projection_relu=False
) -> float:
    cache = forward(params, graph, data.embeddings, projection_relu)
    return bce_loss(cache.logits, data.targets.toarray())


def _graph_side(params: ModelParams, graph: GraphInputs):
    H0 = embed_terms(graph.onehot, params.W_embed)
    _, AH, H = gcn_forward(H0, graph.a_hat, params.W_gcn)
    return H0, AH, H


def train(
    cfg: ModelConfig,
    data: TrainingData,
    graph: GraphInputs,
    checkpoint_dir=None,
    show_progress: bool = False,
) -> TrainResult:
    """Mini-batch Adam on the mean BCE loss.

    Protein order is reshuffled every epoch from the seeded shuffle stream; the
    last partial batch is kept. The GCN branch does not depend on the proteins,
    so it is evaluated once per batch and shared by every protein in it.
    """
    if data.embeddings.shape[1] != cfg.seq_dim:
        raise ShapeMismatchError(
            f"embeddings have dim {data.embeddings.shape[1]}, config says {cfg.seq_dim}"
        )
    if data.targets.shape[1] != cfg.n_terms or graph.n_terms != cfg.n_terms:
        raise ShapeMismatchError("targets, graph and config disagree on N")

    params = init_params(cfg)
    named = params.named()
    state = AdamState()
    shuffle = stream(cfg.seed, "shuffle")
    n = len(data.proteins)
    result = TrainResult(params=params)
    result.initial_loss = full_loss(params, graph, data, cfg.projection_relu)
    _LOGGER.info(f"{DOMAIN} - Initial loss {result.initial_loss:.6f} on {n} proteins")

    epochs = tqdm(
        range(cfg.epochs), desc="epochs", disable=not show_progress, leave=False
    )
    for epoch in epochs:
        order = shuffle.permutation(n)
        total = 0.0
        for batch, start in enumerate(range(0, n, cfg.batch_size)):
            rows = order[start : start + cfg.batch_size]
            E = data.embeddings[rows]
            T = data.targets[rows].toarray()
            cache = forward(
                params,
                graph,
                E,
                cfg.projection_relu,
                graph_side=_graph_side(params, graph),
            )
            loss = bce_loss(cache.logits, T)
            if not np.isfinite(loss):
                raise NonFiniteError("non-finite loss", epoch=epoch, batch=batch)
            total += loss * len(rows)
            grads = backward(cache, T, graph.a_hat, graph.onehot)
            adam_step(
                named,
                grads,
                state,
                lr=cfg.lr,
                beta1=cfg.beta1,
                beta2=cfg.beta2,
                eps=cfg.epsilon,
            )
        epoch_loss = total / n
        result.epoch_losses.append(epoch_loss)
        _LOGGER.info(f"{DOMAIN} - Epoch {epoch + 1}/{cfg.epochs} loss {epoch_loss:.6f}")
        if checkpoint_dir is not None:
            path = os.path.join(checkpoint_dir, f"checkpoint_epoch{epoch + 1:03d}.txt")
            save_checkpoint(path, cfg, params)
            result.checkpoints.append(path)

    result.final_loss = full_loss(params, graph, data, cfg.projection_relu)
    return result


def predict_batch(
    params: ModelParams,
    graph: GraphInputs,
    embeddings: np.ndarray,
    projection_relu: bool = False,
    threads: int = 1,
) -> np.ndarray:
    """Scores in (0, 1), one row per embedding row, independent of batching."""
    if embeddings.ndim != 2 or embeddings.shape[1] != params.W_proj.shape[0]:
        raise ShapeMismatchError(
            f"embeddings of shape {embeddings.shape} do not match "
            f"seq_dim {params.W_proj.shape[0]}"
        )
    _, _, H = _graph_side(params, graph)
    H_final = H[-1]

    def score(bounds):
        start, stop = bounds
        # row by row keeps each protein's arithmetic independent of its chunk
        rows = [
            predict(
                H_final,
                project_sequence(e, params.W_proj, params.b_proj, projection_relu),
            )
            for e in embeddings[start:stop]
        ]
        return np.vstack(rows) if rows else np.empty((0, H_final.shape[0]))

    chunks = ordered_map(score, chunk_bounds(len(embeddings), threads), threads)
    return np.vstack(chunks) if chunks else np.empty((0, H_final.shape[0]))


def write_loss_tsv(path, losses: list[float]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for epoch, loss in enumerate(losses, start=1):
            f.write(f"{epoch}\t{loss:.17g}\n")
