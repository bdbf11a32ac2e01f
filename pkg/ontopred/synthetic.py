# pylint:disable=invalid-name
"""synthetic.py

Random ontologies and corpora for tests and benchmarks. Every generator takes
an explicit seed and draws from the ``synthetic`` stream.
"""

from dataclasses import dataclass

import numpy as np

from .AnnotationSet import AnnotationRecord, AnnotationSet, propagate_true_path
from .Embeddings import EmbeddingTable
from .OntologyGraph import OntologyGraph
from .const import ACCESSION_PREFIX, EXPERIMENTAL_EVIDENCE_CODES, Namespace
from .lib.seeding import stream

BPO_TERM_COUNT = 28678


def accession(number: int) -> str:
    return f"{ACCESSION_PREFIX}{number:07d}"


def random_dag(
    n_terms: int,
    seed: int = 0,
    namespace: Namespace = Namespace.MFO,
    window: int = None,
    extra_parent_prob: float = 0.3,
    first_id: int = 1,
) -> OntologyGraph:
    """Single-rooted random DAG.

    Term i draws its first parent among the ``window`` terms before it, so the
    depth grows like 2 * n / window. An extra parent, when drawn, is a sibling
    of the first parent, which keeps ancestor sets close to the depth.
    """
    rng = stream(seed, "synthetic", 0)
    window = window or max(4, n_terms // 50)
    parents = [()]
    children = [[]]
    for i in range(1, n_terms):
        primary = int(rng.integers(max(0, i - window), i))
        ps = {primary}
        if parents[primary] and rng.random() < extra_parent_prob:
            grand = parents[primary][int(rng.integers(len(parents[primary])))]
            siblings = children[grand]
            ps.add(siblings[int(rng.integers(len(siblings)))])
        parents.append(tuple(sorted(ps)))
        children.append([])
        for p in ps:
            children[p].append(i)
    return OntologyGraph(
        terms=tuple(accession(first_id + i) for i in range(n_terms)),
        names=tuple(f"synthetic term {i}" for i in range(n_terms)),
        namespaces=(namespace,) * n_terms,
        parents=tuple(parents),
    )


def bpo_scale_graph(n_terms: int = BPO_TERM_COUNT, seed: int = 0) -> OntologyGraph:
    return random_dag(
        n_terms, seed=seed, namespace=Namespace.BPO, extra_parent_prob=0.6
    )


def random_annotations(
    g: OntologyGraph, n_proteins: int, seed: int = 0, max_terms: int = 3
) -> list[AnnotationRecord]:
    rng = stream(seed, "synthetic", 1)
    codes = sorted(EXPERIMENTAL_EVIDENCE_CODES)
    records = []
    for j in range(n_proteins):
        count = int(rng.integers(1, max_terms + 1))
        for k in rng.choice(len(g), size=min(count, len(g)), replace=False):
            records.append(
                AnnotationRecord(
                    protein=f"P{j:05d}",
                    term=g.terms[int(k)],
                    evidence=codes[int(rng.integers(len(codes)))],
                )
            )
    return records


@dataclass
class SyntheticCorpus:
    graph: OntologyGraph
    records: list[AnnotationRecord]
    annotations: AnnotationSet  # propagated
    embeddings: EmbeddingTable


def make_separable_corpus(
    n_terms: int = 20,
    n_proteins: int = 200,
    seq_dim: int = 32,
    noise: float = 0.05,
    signal: float = 0.65,
    seed: int = 0,
) -> SyntheticCorpus:
    """Each protein is annotated with one leaf; its embedding is a noisy
    linear function of the propagated label vector in +-1 form.

    The mixing matrix has N(0, 1 / seq_dim) entries, so ``signal`` is roughly
    the per-label contribution to the embedding norm.
    """
    g = random_dag(n_terms, seed=seed)
    rng = stream(seed, "synthetic", 2)
    leaves = [i for i in range(len(g)) if not g.children[i]]
    records = [
        AnnotationRecord(
            protein=f"P{j:05d}",
            term=g.terms[leaves[int(rng.integers(len(leaves)))]],
            evidence="EXP",
        )
        for j in range(n_proteins)
    ]
    annotations = propagate_true_path(AnnotationSet.from_records(records, g), g)
    labels = np.zeros((len(annotations), len(g)))
    for row, ls in enumerate(annotations.labels):
        labels[row, list(ls)] = 1.0
    mixing = rng.normal(scale=1.0 / np.sqrt(seq_dim), size=(len(g), seq_dim))
    vectors = signal * (2.0 * labels - 1.0) @ mixing
    vectors += noise * rng.normal(size=vectors.shape)
    embeddings = EmbeddingTable(proteins=annotations.proteins, vectors=vectors)
    return SyntheticCorpus(
        graph=g, records=records, annotations=annotations, embeddings=embeddings
    )
