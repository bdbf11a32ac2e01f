"""Top-level package for ontopred."""

# flake8: noqa
__version__ = "0.1.0"

from .AnnotationSet import (
    AnnotationRecord,
    AnnotationSet,
    CountTable,
    build_targets,
    count_annotations,
    filter_experimental,
    load_annotations,
    parse_annotations,
    propagate_true_path,
)
from .Embeddings import EmbeddingTable, load_embeddings
from .Evaluation import (
    EvalReport,
    PredictionMatrix,
    aupr,
    evaluate,
    fmax,
    propagate_scores,
)
from .GcnModel import ModelConfig, ModelParams
from .GoFeatures import (
    GraphInputs,
    ICTable,
    NodeFeatureMatrix,
    WeightedAdjacency,
    build_adjacency,
    build_graph_inputs,
    build_onehot_features,
    compute_freq,
    compute_ic,
    compute_prior,
    normalize_adjacency,
)
from .OntologyGraph import (
    OntologyGraph,
    ancestors,
    drop_isolated,
    load_obo,
    max_depth,
    parse_obo,
)
from .PredictionManager import PredictionManager
from .RunManifest import RunManifest
from .Trainer import TrainingData, TrainResult, predict_batch, train

from .const import Namespace
