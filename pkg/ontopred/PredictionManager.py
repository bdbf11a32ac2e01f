"""PredictionManager.py"""

# pylint:disable=logging-fstring-interpolation,missing-function-docstring,invalid-name,too-many-instance-attributes

import logging
import os

import numpy as np

from .AnnotationSet import (
    AnnotationSet,
    CountTable,
    build_targets,
    count_annotations,
    filter_experimental,
    propagate_true_path,
)
from .Embeddings import EmbeddingTable
from .Evaluation import PredictionMatrix, propagate_scores
from .GcnModel import ModelConfig, ModelParams, load_checkpoint, save_checkpoint
from .GoFeatures import (
    GraphInputs,
    ICTable,
    WeightedAdjacency,
    build_graph_inputs,
    build_onehot_features,
    normalize_adjacency,
    read_adjacency_tsv,
    read_terms_tsv,
    write_adjacency_tsv,
    write_ic_tsv,
    write_terms_tsv,
)
from .OntologyGraph import OntologyGraph, drop_isolated
from .Trainer import TrainingData, TrainResult, predict_batch, train, write_loss_tsv
from .config import RunConfig, load_config_file, write_config_file
from .const import (
    ADJACENCY_FILE,
    CONFIG_FILE,
    DOMAIN,
    IC_FILE,
    LOSS_FILE,
    MODEL_FILE,
    TERMS_FILE,
    Namespace,
)
from .exceptions import (
    CheckpointError,
    EmptyNamespaceError,
    ShapeMismatchError,
    UnknownTermError,
)

_LOGGER = logging.getLogger(__name__)


def parse_namespace(value) -> Namespace:
    if isinstance(value, Namespace):
        return value
    try:
        return Namespace(str(value).upper())
    except ValueError as exc:
        raise EmptyNamespaceError(
            f"unknown namespace {value!r}, expected one of "
            f"{', '.join(ns.value for ns in Namespace)}"
        ) from exc


class PredictionManager:
    """Runs the pipeline for one namespace of an ontology.

    ``graph`` starts as the namespace subgraph and shrinks to the terms kept
    after isolation filtering once training annotations are loaded.
    """

    def __init__(self, ontology: OntologyGraph, namespace, threads: int = 1):
        self.ontology: OntologyGraph = ontology
        self.namespace: Namespace = parse_namespace(namespace)
        self.threads: int = threads
        self.graph, self._remap = ontology.subgraph(self.namespace)

        self.annotations: AnnotationSet = None
        self.counts: CountTable = None
        self.inputs: GraphInputs = None
        self.adjacency: WeightedAdjacency = None
        self.ic: ICTable = None
        self.model_config: ModelConfig = None
        self.params: ModelParams = None
        self.projection_relu: bool = False

    def annotations_for(self, records, experimental_only: bool = True) -> AnnotationSet:
        """Propagated annotations re-indexed onto ``graph``; empty proteins dropped."""
        if experimental_only:
            records = filter_experimental(records)
        annotations = AnnotationSet.from_records(records, self.ontology)
        annotations = propagate_true_path(annotations, self.ontology, self.threads)
        return annotations.restrict(self._remap)

    def retained_fraction(self, records, experimental_only: bool = True) -> float:
        """Share of namespace terms that survive isolation filtering."""
        annotations = self.annotations_for(records, experimental_only)
        graph, _ = drop_isolated(self.graph, annotations.annotated_terms())
        return len(graph) / len(self.graph)

    def load_training_annotations(
        self, records, experimental_only: bool = True
    ) -> AnnotationSet:
        annotations = self.annotations_for(records, experimental_only)
        if not len(annotations):
            raise EmptyNamespaceError(
                f"no training annotations in namespace {self.namespace.value}"
            )
        graph, remap = drop_isolated(self.graph, annotations.annotated_terms())
        self._remap = {old: remap[new] for old, new in self._remap.items() if new in remap}
        self.graph = graph
        self.annotations = annotations.restrict(remap)
        self.counts = count_annotations(self.annotations, self.graph)
        _LOGGER.info(
            f"{DOMAIN} - {self.namespace.value}: {len(self.annotations)} proteins, "
            f"{len(self.graph)} terms"
        )
        return self.annotations

    def build_graph(self) -> GraphInputs:
        if self.counts is None:
            raise EmptyNamespaceError("training annotations must be loaded first")
        self.inputs, self.adjacency, self.ic = build_graph_inputs(
            self.counts, self.graph, self.namespace
        )
        return self.inputs

    def training_data(self, embeddings: EmbeddingTable) -> TrainingData:
        keep = [p for p in self.annotations.proteins if p in embeddings]
        missing = len(self.annotations) - len(keep)
        if missing:
            _LOGGER.warning(
                f"{DOMAIN} - Dropped {missing} annotated proteins without an embedding"
            )
        if not keep:
            raise EmptyNamespaceError("no annotated protein has an embedding")
        annotations = self.annotations.select_proteins(keep)
        return TrainingData(
            proteins=annotations.proteins,
            embeddings=embeddings.select(keep),
            targets=build_targets(annotations, self.graph),
        )

    def train(
        self,
        config: RunConfig,
        embeddings: EmbeddingTable,
        checkpoint_dir=None,
        show_progress: bool = False,
    ) -> TrainResult:
        if self.inputs is None:
            self.build_graph()
        data = self.training_data(embeddings)
        self.model_config = ModelConfig.from_graph(
            self.graph,
            self.namespace,
            depth_cap=config.depth_cap,
            hidden_dim=config.hidden_dim or None,
            n_layers=config.layers,
            seq_dim=embeddings.dim,
            lr=config.lr,
            epochs=config.epochs,
            batch_size=config.batch_size,
            seed=config.seed,
            projection_relu=config.projection_relu,
        )
        self.projection_relu = config.projection_relu
        result = train(
            self.model_config,
            data,
            self.inputs,
            checkpoint_dir=checkpoint_dir,
            show_progress=show_progress,
        )
        self.params = result.params
        return result

    def write_graph(self, out_dir, adjacency_digits: int = 9) -> None:
        os.makedirs(out_dir, exist_ok=True)
        write_terms_tsv(os.path.join(out_dir, TERMS_FILE), self.graph)
        write_adjacency_tsv(
            os.path.join(out_dir, ADJACENCY_FILE),
            self.adjacency,
            self.graph,
            adjacency_digits,
        )
        write_ic_tsv(os.path.join(out_dir, IC_FILE), self.ic, self.graph)

    def write_model(self, out_dir, config: RunConfig, result: TrainResult) -> None:
        # exact weights; predict rebuilds A-hat from them
        self.write_graph(out_dir, adjacency_digits=17)
        write_config_file(os.path.join(out_dir, CONFIG_FILE), config)
        write_loss_tsv(os.path.join(out_dir, LOSS_FILE), result.epoch_losses)
        save_checkpoint(
            os.path.join(out_dir, MODEL_FILE), self.model_config, self.params
        )

    @classmethod
    def from_model_dir(
        cls, ontology: OntologyGraph, model_dir, threads: int = 1
    ) -> "PredictionManager":
        """Rebuild the graph inputs and weights written by ``write_model``."""
        saved = load_config_file(os.path.join(model_dir, CONFIG_FILE))
        manager = cls(ontology, saved.get("namespace"), threads)
        terms = read_terms_tsv(os.path.join(model_dir, TERMS_FILE))
        unknown = [t for t in terms if t not in manager.graph.index]
        if unknown:
            raise UnknownTermError(
                f"model terms missing from the ontology namespace: {unknown[:5]}"
            )
        manager.graph, remap = manager.graph.select(manager.graph.index[t] for t in terms)
        manager._remap = {
            old: remap[new] for old, new in manager._remap.items() if new in remap
        }
        manager.adjacency = read_adjacency_tsv(
            os.path.join(model_dir, ADJACENCY_FILE), manager.graph
        )
        manager.inputs = GraphInputs(
            a_hat=normalize_adjacency(manager.adjacency),
            onehot=build_onehot_features(manager.graph),
        )
        shape, manager.params = load_checkpoint(os.path.join(model_dir, MODEL_FILE))
        if shape["n_terms"] != len(manager.graph):
            raise CheckpointError(
                f"checkpoint has {shape['n_terms']} terms, model directory has "
                f"{len(manager.graph)}"
            )
        manager.projection_relu = bool(saved.get("projection_relu", False))
        return manager

    def predict(
        self, embeddings: EmbeddingTable, propagate: bool = False
    ) -> PredictionMatrix:
        if self.params is None:
            raise CheckpointError("no trained or loaded model")
        if embeddings.dim != self.params.W_proj.shape[0]:
            raise ShapeMismatchError(
                f"embeddings have dim {embeddings.dim}, model expects "
                f"{self.params.W_proj.shape[0]}"
            )
        scores = predict_batch(
            self.params,
            self.inputs,
            embeddings.vectors,
            projection_relu=self.projection_relu,
            threads=self.threads,
        )
        pred = PredictionMatrix(
            proteins=embeddings.proteins, terms=self.graph.terms, scores=scores
        )
        return propagate_scores(pred, self.graph) if propagate else pred

    def truth_matrix(
        self, records, experimental_only: bool = True
    ) -> tuple[tuple[str, ...], np.ndarray]:
        """Benchmark proteins and their propagated true terms on ``graph``."""
        truth = self.annotations_for(records, experimental_only)
        dense = build_targets(truth, self.graph).toarray() > 0
        return truth.proteins, dense
