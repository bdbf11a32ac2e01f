# pylint:disable=invalid-name,logging-fstring-interpolation
"""Evaluation.py

Protein-centric Fmax over a 0.01 threshold grid and micro/macro AUPR.

Precision at threshold t is averaged over the proteins predicting at least one
term (score >= t); recall is averaged over every benchmark protein, i.e. every
protein with at least one true term.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .OntologyGraph import OntologyGraph
from .const import DOMAIN, THRESHOLD_STEPS
from .exceptions import (
    EmptyBenchmarkError,
    ParseError,
    ShapeMismatchError,
)
from .lib.parallel import ordered_map
from .utils import format_fixed, format_float, read_text

_LOGGER = logging.getLogger(__name__)

MICRO = "micro"
MACRO = "macro"


@dataclass(frozen=True)
class PredictionMatrix:
    proteins: tuple[str, ...]
    terms: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self):
        if self.scores.shape != (len(self.proteins), len(self.terms)):
            raise ShapeMismatchError(
                f"scores {self.scores.shape} vs {len(self.proteins)} proteins x "
                f"{len(self.terms)} terms"
            )
        if self.scores.size and (
            not np.all(np.isfinite(self.scores))
            or self.scores.min() < 0
            or self.scores.max() > 1
        ):
            raise ShapeMismatchError("scores must be finite and within [0, 1]")


@dataclass
class EvalReport:
    fmax: float
    best_threshold: float
    aupr_micro: float = None
    aupr_macro: float = None
    curve: list[tuple[float, float, float]] = field(default_factory=list)
    n_proteins: int = 0

    def lines(self) -> list[str]:
        return [
            f"fmax\t{format_float(self.fmax, 6)}",
            f"best_threshold\t{self.best_threshold:.2f}",
            f"aupr_micro\t{format_float(self.aupr_micro, 6)}",
            f"aupr_macro\t{format_float(self.aupr_macro, 6)}",
            f"n_proteins\t{self.n_proteins}",
        ]


def threshold_grid() -> np.ndarray:
    # i / 100 is the correctly rounded double for every grid point
    return np.arange(THRESHOLD_STEPS + 1) / float(THRESHOLD_STEPS)


def _scores(pred) -> np.ndarray:
    if isinstance(pred, PredictionMatrix):
        return pred.scores
    return np.asarray(pred, dtype=np.float64)


def _benchmark(scores: np.ndarray, truth) -> tuple[np.ndarray, np.ndarray]:
    truth = np.asarray(truth) > 0
    if scores.shape != truth.shape:
        raise ShapeMismatchError(f"scores {scores.shape} vs truth {truth.shape}")
    has_true = truth.any(axis=1)
    return scores[has_true], truth[has_true]


def pr_at_threshold(
    pred, truth: np.ndarray, t: float
) -> tuple[float, float, int]:
    """(average precision, average recall, G(t)) at threshold t."""
    scores, truth = _benchmark(_scores(pred), truth)
    return _pr(scores, truth, t)


def _pr(scores: np.ndarray, truth: np.ndarray, t: float) -> tuple[float, float, int]:
    n = scores.shape[0]
    if n == 0:
        return 0.0, 0.0, 0
    predicted = scores >= t
    n_pred = predicted.sum(axis=1)
    tp = (predicted & truth).sum(axis=1)
    covered = n_pred > 0
    G = int(covered.sum())
    precision = float((tp[covered] / n_pred[covered]).mean()) if G else 0.0
    recall = float((tp / truth.sum(axis=1)).mean())
    return precision, recall, G


def _f(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def fmax(pred, truth: np.ndarray, threads: int = 1) -> EvalReport:
    """Sweep t = 0.00 .. 1.00; ties go to the smaller threshold."""
    scores, truth = _benchmark(_scores(pred), truth)
    if scores.shape[0] == 0:
        raise EmptyBenchmarkError("no protein has a true term")
    thresholds = threshold_grid()
    points = ordered_map(lambda t: _pr(scores, truth, t), thresholds, threads)
    curve = [(float(t), pr, rc) for t, (pr, rc, _) in zip(thresholds, points)]
    best, best_t = 0.0, 0.0
    for t, pr, rc in curve:
        f = _f(pr, rc)
        if f > best:
            best, best_t = f, t
    return EvalReport(
        fmax=best, best_threshold=best_t, curve=curve, n_proteins=scores.shape[0]
    )


def _average_precision(scores: np.ndarray, labels: np.ndarray) -> float:
    """Sum of (r_k - r_{k-1}) p_k over distinct score thresholds, highest first.

    p_k is the precision envelope: the best precision at recall r_k or above.
    """
    order = np.argsort(-scores, kind="mergesort")
    scores = scores[order]
    labels = labels[order].astype(np.float64)
    positives = labels.sum()
    tp = np.cumsum(labels)
    # last position of each block of tied scores
    last = np.r_[np.nonzero(np.diff(scores))[0], len(scores) - 1]
    tp = tp[last]
    predicted = last + 1.0
    precision = np.maximum.accumulate((tp / predicted)[::-1])[::-1]
    recall = tp / positives
    return float(np.sum(np.diff(np.r_[0.0, recall]) * precision))


def aupr(pred, truth: np.ndarray, mode: str = MICRO, threads: int = 1) -> float:
    scores = _scores(pred)
    truth = np.asarray(truth) > 0
    if scores.shape != truth.shape:
        raise ShapeMismatchError(f"scores {scores.shape} vs truth {truth.shape}")
    if mode == MICRO:
        if not truth.any():
            raise EmptyBenchmarkError("no positive (protein, term) pair")
        return _average_precision(scores.ravel(), truth.ravel())
    if mode != MACRO:
        raise ValueError(f"unknown AUPR mode {mode!r}")
    columns = [k for k in range(truth.shape[1]) if truth[:, k].any()]
    if not columns:
        raise EmptyBenchmarkError("no term has a positive")
    values = ordered_map(
        lambda k: _average_precision(scores[:, k], truth[:, k]), columns, threads
    )
    return float(np.mean(values))


def propagate_scores(pred: PredictionMatrix, g: OntologyGraph) -> PredictionMatrix:
    """Score of term i becomes the max over i and its descendants."""
    if len(pred.terms) != len(g):
        raise ShapeMismatchError("prediction terms do not match the graph")
    scores = pred.scores.copy()
    for k in reversed(g.topological_order):
        children = g.children[k]
        if children:
            scores[:, k] = np.maximum(scores[:, k], scores[:, list(children)].max(axis=1))
    return PredictionMatrix(proteins=pred.proteins, terms=pred.terms, scores=scores)


def evaluate(
    pred: PredictionMatrix, truth: np.ndarray, threads: int = 1
) -> EvalReport:
    report = fmax(pred, truth, threads)
    scores, bench_truth = _benchmark(pred.scores, truth)
    report.aupr_micro = aupr(scores, bench_truth, MICRO)
    report.aupr_macro = aupr(scores, bench_truth, MACRO, threads)
    _LOGGER.info(
        f"{DOMAIN} - Fmax {report.fmax:.4f} at t={report.best_threshold:.2f}, "
        f"AUPR micro {report.aupr_micro:.4f} macro {report.aupr_macro:.4f}"
    )
    return report


def write_predictions_tsv(path, pred: PredictionMatrix, floor: float) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for protein, row in zip(pred.proteins, pred.scores):
            for k in np.nonzero(row >= floor)[0]:
                f.write(f"{protein}\t{pred.terms[k]}\t{format_fixed(row[k], 6)}\n")


def read_predictions_tsv(path, g: OntologyGraph) -> PredictionMatrix:
    """Read `protein \\t accession \\t score`; terms outside g are skipped."""
    proteins = {}
    entries = []
    skipped = 0
    for line_number, line in enumerate(read_text(path).split("\n"), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.rstrip("\r\n").split("\t")
        if len(fields) != 3:
            raise ParseError("expected 3 tab separated fields", line_number, str(path))
        protein, accession, value = fields
        try:
            score = float(value)
        except ValueError as exc:
            raise ParseError(f"bad score {value!r}", line_number, str(path)) from exc
        if not 0.0 <= score <= 1.0:
            raise ParseError(f"score {score} outside [0, 1]", line_number, str(path))
        k = g.term_index(accession)
        if k is None:
            skipped += 1
            continue
        proteins.setdefault(protein, len(proteins))
        entries.append((proteins[protein], k, score))
    if skipped:
        _LOGGER.warning(
            f"{DOMAIN} - Skipped {skipped} predictions for terms outside the graph"
        )
    scores = np.zeros((len(proteins), len(g)), dtype=np.float64)
    for row, k, score in entries:
        scores[row, k] = max(scores[row, k], score)
    return PredictionMatrix(proteins=tuple(proteins), terms=g.terms, scores=scores)


def align_predictions(pred: PredictionMatrix, proteins) -> PredictionMatrix:
    """One row per benchmark protein, in the given order; missing rows score 0."""
    position = {p: i for i, p in enumerate(pred.proteins)}
    scores = np.zeros((len(proteins), len(pred.terms)), dtype=np.float64)
    missing = 0
    for row, protein in enumerate(proteins):
        if protein in position:
            scores[row] = pred.scores[position[protein]]
        else:
            missing += 1
    if missing:
        _LOGGER.warning(
            f"{DOMAIN} - {missing} benchmark proteins have no predictions, scored 0"
        )
    return PredictionMatrix(proteins=tuple(proteins), terms=pred.terms, scores=scores)


def write_curve_tsv(path, report: EvalReport) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("threshold\tprecision\trecall\tf\n")
        for t, pr, rc in report.curve:
            f.write(
                f"{t:.2f}\t{format_float(pr, 9)}\t{format_float(rc, 9)}\t"
                f"{format_float(_f(pr, rc), 9)}\n"
            )
