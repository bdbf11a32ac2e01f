#!/usr/bin/env python3

"""Predicts Gene Ontology terms for proteins from sequence embeddings."""

# pylint:disable=logging-fstring-interpolation,missing-function-docstring

import argparse
import logging
import os
import sys

from . import const
from .AnnotationSet import (
    AnnotationSet,
    filter_experimental,
    load_annotations,
    propagate_true_path,
    write_annotations,
)
from .Embeddings import load_embeddings
from .Evaluation import (
    align_predictions,
    evaluate,
    propagate_scores,
    read_predictions_tsv,
    write_curve_tsv,
    write_predictions_tsv,
)
from .GoFeatures import graph_manifest_fields
from .OntologyGraph import load_obo
from .PredictionManager import PredictionManager, parse_namespace
from .RunManifest import RunManifest
from .config import RunConfig, build_config, load_config_file
from .exceptions import DataError, OntoPredException, UsageError
from .lib.logging import get_logger
from .utils import format_float

_LOGGER = logging.getLogger(__name__)

NAMESPACE_CHOICES = [ns.value for ns in const.Namespace]


class ArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting with status 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _require(config: RunConfig, *keys: str) -> None:
    for key in keys:
        if getattr(config, key) in (None, ""):
            raise UsageError(f"missing required option --{key.replace('_', '-')}")


def _manifest(subcommand: str, config: RunConfig, **inputs) -> RunManifest:
    manifest = RunManifest(
        subcommand=subcommand,
        config=config.resolved(),
        namespace=config.namespace or "",
        seed=config.seed,
    )
    for name, path in inputs.items():
        manifest.add_input(name, path)
    return manifest


def _file_manifest_path(out: str) -> str:
    return f"{out}.{const.MANIFEST_FILE}"


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_ontology_stats(config: RunConfig, args) -> int:
    _require(config, "ontology")
    ontology = load_obo(config.ontology)
    records = (
        load_annotations(config.annotations, ontology) if config.annotations else None
    )
    present = ontology.present_namespaces()
    lines = [
        f"terms\t{len(ontology)}",
        f"edges\t{ontology.edge_count}",
        f"max_depth\t{max((ontology.max_depth(ns) for ns in present), default=0)}",
        f"roots\t{len(ontology.roots())}",
        f"obsolete_dropped\t{ontology.obsolete_dropped}",
    ]
    for ns in present:
        members = ontology.namespace_indices(ns)
        roots = ",".join(ontology.terms[r] for r in ontology.roots(ns))
        lines += [
            f"{ns.value}.terms\t{len(members)}",
            f"{ns.value}.roots\t{roots}",
            f"{ns.value}.max_depth\t{ontology.max_depth(ns)}",
        ]
        if records is not None:
            manager = PredictionManager(ontology, ns, config.threads)
            fraction = manager.retained_fraction(records, config.experimental_only)
            lines.append(f"{ns.value}.retained_fraction\t{format_float(fraction, 6)}")
    _emit(lines, config.out)
    if config.out:
        manifest = _manifest(
            "ontology-stats",
            config,
            ontology=config.ontology,
            annotations=config.annotations,
        )
        manifest.n_terms = len(ontology)
        manifest.write(_file_manifest_path(config.out))
    return 0


def cmd_propagate(config: RunConfig, args) -> int:
    _require(config, "ontology", "annotations")
    ontology = load_obo(config.ontology)
    records = load_annotations(config.annotations, ontology)
    if config.experimental_only:
        records = filter_experimental(records)
    annotations = AnnotationSet.from_records(records, ontology)
    annotations = propagate_true_path(annotations, ontology, config.threads)
    if config.namespace:
        members = ontology.namespace_indices(parse_namespace(config.namespace))
        annotations = annotations.restrict({i: i for i in members})
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="\n") as f:
            write_annotations(f, annotations, ontology)
        manifest = _manifest(
            "propagate",
            config,
            ontology=config.ontology,
            annotations=config.annotations,
        )
        manifest.extra["proteins"] = len(annotations)
        manifest.write(_file_manifest_path(config.out))
    else:
        write_annotations(sys.stdout, annotations, ontology)
    return 0


def _training_manager(config: RunConfig) -> PredictionManager:
    ontology = load_obo(config.ontology)
    records = load_annotations(config.annotations, ontology)
    manager = PredictionManager(ontology, config.namespace, config.threads)
    manager.load_training_annotations(records, config.experimental_only)
    manager.build_graph()
    return manager


def cmd_build_graph(config: RunConfig, args) -> int:
    _require(config, "ontology", "annotations", "namespace", "out")
    manager = _training_manager(config)
    manager.write_graph(config.out)
    manifest = _manifest(
        "build-graph", config, ontology=config.ontology, annotations=config.annotations
    )
    manifest.n_terms = len(manager.graph)
    manifest.d0 = manifest.d = config.hidden_dim or min(
        manager.graph.max_depth(manager.namespace), config.depth_cap
    )
    manifest.extra.update(
        graph_manifest_fields(manager.graph, manager.ic, manager.namespace)
    )
    manifest.write(os.path.join(config.out, const.MANIFEST_FILE))
    return 0


def cmd_train(config: RunConfig, args) -> int:
    _require(config, "ontology", "annotations", "embeddings", "namespace", "out")
    embeddings = load_embeddings(config.embeddings)
    manager = _training_manager(config)
    os.makedirs(config.out, exist_ok=True)
    result = manager.train(
        config, embeddings, checkpoint_dir=config.out, show_progress=args.verbose
    )
    manager.write_model(config.out, config, result)
    manifest = _manifest(
        "train",
        config,
        ontology=config.ontology,
        annotations=config.annotations,
        embeddings=config.embeddings,
    )
    manifest.n_terms = len(manager.graph)
    manifest.d0 = manager.model_config.d0
    manifest.d = manager.model_config.d
    manifest.extra.update(
        graph_manifest_fields(manager.graph, manager.ic, manager.namespace)
    )
    manifest.extra["initial_loss"] = format_float(result.initial_loss)
    manifest.extra["final_loss"] = format_float(result.final_loss)
    manifest.write(os.path.join(config.out, const.MANIFEST_FILE))
    return 0


def cmd_predict(config: RunConfig, args) -> int:
    _require(config, "ontology", "model", "embeddings", "out")
    ontology = load_obo(config.ontology)
    manager = PredictionManager.from_model_dir(ontology, config.model, config.threads)
    if config.namespace and parse_namespace(config.namespace) != manager.namespace:
        raise UsageError(
            f"--namespace {config.namespace} does not match the model's "
            f"{manager.namespace.value}"
        )
    embeddings = load_embeddings(config.embeddings)
    pred = manager.predict(embeddings, propagate=config.propagate_scores)
    write_predictions_tsv(config.out, pred, config.score_floor)
    manifest = _manifest(
        "predict",
        config,
        ontology=config.ontology,
        model=os.path.join(config.model, const.MODEL_FILE),
        embeddings=config.embeddings,
    )
    manifest.namespace = manager.namespace.value
    manifest.n_terms = len(manager.graph)
    manifest.d0 = manager.params.W_embed.shape[1]
    manifest.d = manager.params.W_proj.shape[1]
    manifest.extra["proteins"] = len(pred.proteins)
    manifest.write(_file_manifest_path(config.out))
    return 0


def cmd_evaluate(config: RunConfig, args) -> int:
    _require(config, "ontology", "predictions", "truth", "namespace")
    ontology = load_obo(config.ontology)
    manager = PredictionManager(ontology, config.namespace, config.threads)
    records = load_annotations(config.truth, ontology)
    proteins, truth = manager.truth_matrix(records, config.experimental_only)
    pred = read_predictions_tsv(config.predictions, manager.graph)
    if config.propagate_scores:
        pred = propagate_scores(pred, manager.graph)
    pred = align_predictions(pred, proteins)
    report = evaluate(pred, truth, config.threads)
    _emit(report.lines(), config.out)
    if config.curve_out:
        write_curve_tsv(config.curve_out, report)
    if config.out:
        manifest = _manifest(
            "evaluate",
            config,
            ontology=config.ontology,
            predictions=config.predictions,
            truth=config.truth,
        )
        manifest.n_terms = len(manager.graph)
        manifest.extra["benchmark_proteins"] = report.n_proteins
        manifest.write(_file_manifest_path(config.out))
    return 0


def _common_options() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", help="Flat 'key = value' configuration file")
    common.add_argument(
        "--threads",
        type=int,
        help=f"Worker threads, use env var {const.THREADS_ENV} (default: all cores)",
    )
    common.add_argument("-v", "--verbose", action=argparse.BooleanOptionalAction)
    common.add_argument(
        "--experimental-only",
        action=argparse.BooleanOptionalAction,
        help="Keep only experimental evidence codes (default: on)",
    )
    return common


def _add_namespace(parser, help_text="GO namespace"):
    parser.add_argument("--namespace", choices=NAMESPACE_CHOICES, help=help_text)


def _add_model_options(parser) -> None:
    parser.add_argument("--epochs", type=int, help="Training epochs (default: 10)")
    parser.add_argument("--batch-size", type=int, help="Mini-batch size (default: 32)")
    parser.add_argument("--lr", type=float, help="Adam learning rate (default: 1e-3)")
    parser.add_argument("--layers", type=int, help="GCN layers, 1..4 (default: 2)")
    parser.add_argument("--seed", type=int, help="64-bit unsigned seed (default: 0)")
    parser.add_argument(
        "--hidden-dim", type=int, help="Override d0 = d (default: min(depth, cap))"
    )
    parser.add_argument("--depth-cap", type=int, help="Depth cap for d (default: 80)")
    parser.add_argument(
        "--projection-relu",
        action=argparse.BooleanOptionalAction,
        help="Apply ReLU after the sequence projection",
    )


def build_parser() -> ArgumentParser:
    common = _common_options()
    parser = ArgumentParser(prog=const.DOMAIN, description=sys.modules[__name__].__doc__)
    subparsers = parser.add_subparsers(dest="command", help="Commands", required=True)

    stats = subparsers.add_parser(
        "ontology-stats", parents=[common], help="Prints term, edge and depth counts"
    )
    stats.add_argument("--ontology", help="OBO 1.2 ontology file")
    stats.add_argument(
        "--annotations", help="Annotations, adds the retained fraction per namespace"
    )
    stats.add_argument("--out", help="Write the report here instead of stdout")
    stats.set_defaults(func=cmd_ontology_stats)

    propagate = subparsers.add_parser(
        "propagate", parents=[common], help="Applies the true path rule"
    )
    propagate.add_argument("--ontology", help="OBO 1.2 ontology file")
    propagate.add_argument("--annotations", help="protein/term/evidence TSV")
    _add_namespace(propagate, "Keep only this namespace")
    propagate.add_argument("--out", help="Write here instead of stdout")
    propagate.set_defaults(func=cmd_propagate)

    build = subparsers.add_parser(
        "build-graph", parents=[common], help="Writes terms, weighted edges and IC"
    )
    build.add_argument("--ontology", help="OBO 1.2 ontology file")
    build.add_argument("--annotations", help="Training annotations TSV")
    _add_namespace(build)
    build.add_argument("--hidden-dim", type=int, help="Override d0 = d in the manifest")
    build.add_argument("--depth-cap", type=int, help="Depth cap for d (default: 80)")
    build.add_argument("--out", help="Output directory")
    build.set_defaults(func=cmd_build_graph)

    train = subparsers.add_parser(
        "train", parents=[common], help="Trains the GCN model for one namespace"
    )
    train.add_argument("--ontology", help="OBO 1.2 ontology file")
    train.add_argument("--annotations", help="Training annotations TSV")
    train.add_argument("--embeddings", help="Protein embeddings, TSV or PEMB binary")
    _add_namespace(train)
    _add_model_options(train)
    train.add_argument("--out", help="Model output directory")
    train.set_defaults(func=cmd_train)

    predict = subparsers.add_parser(
        "predict", parents=[common], help="Scores proteins with a trained model"
    )
    predict.add_argument("--ontology", help="OBO 1.2 ontology file")
    predict.add_argument("--model", help="Directory written by 'train'")
    predict.add_argument("--embeddings", help="Protein embeddings, TSV or PEMB binary")
    _add_namespace(predict, "Expected namespace of the model")
    predict.add_argument(
        "--score-floor", type=float, help="Omit scores below this (default: 0.01)"
    )
    predict.add_argument(
        "--propagate-scores",
        action=argparse.BooleanOptionalAction,
        help="Raise each score to the max over its descendants",
    )
    predict.add_argument("--out", help="Predictions TSV")
    predict.set_defaults(func=cmd_predict)

    evaluate_parser = subparsers.add_parser(
        "evaluate", parents=[common], help="Computes Fmax and AUPR"
    )
    evaluate_parser.add_argument("--ontology", help="OBO 1.2 ontology file")
    evaluate_parser.add_argument("--predictions", help="Predictions TSV")
    evaluate_parser.add_argument("--truth", help="Benchmark annotations TSV")
    _add_namespace(evaluate_parser)
    evaluate_parser.add_argument(
        "--propagate-scores",
        action=argparse.BooleanOptionalAction,
        help="Raise each score to the max over its descendants first",
    )
    evaluate_parser.add_argument("--curve-out", help="Precision/recall curve TSV")
    evaluate_parser.add_argument("--out", help="Write the report here instead of stdout")
    evaluate_parser.set_defaults(func=cmd_evaluate)
    return parser


_NOT_CONFIG = {"command", "func", "config", "verbose"}


def dispatch(argv: list[str]) -> int:
    """Run one subcommand. 0 on success, 1 on usage errors, 2 on data errors."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as err:
        print(f"{const.DOMAIN}: error: {err}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0

    logger = get_logger(const.DOMAIN)
    if args.verbose:
        logger.setLevel(logging.DEBUG)

    try:
        file_values = load_config_file(args.config) if args.config else {}
        flags = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
        config = build_config(file_values, flags)
        return args.func(config, args)
    except UsageError as err:
        print(f"{const.DOMAIN}: error: {err}", file=sys.stderr)
        return 1
    except (DataError, OSError) as err:
        print(
            f"{const.DOMAIN}: error: {type(err).__name__}: {err}", file=sys.stderr
        )
        return 2
    except OntoPredException as err:
        _LOGGER.debug(f"{const.DOMAIN} - {args.command} failed", exc_info=True)
        print(
            f"{const.DOMAIN}: error: {type(err).__name__}: {err}", file=sys.stderr
        )
        return 2


def main():
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
