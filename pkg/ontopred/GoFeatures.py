# pylint:disable=invalid-name,logging-fstring-interpolation
"""Graph-side numerical inputs: IC, priors, weighted adjacency, node features."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .AnnotationSet import CountTable
from .OntologyGraph import OntologyGraph
from .const import DOMAIN, LOG_BASE, Namespace
from .exceptions import EmptyNamespaceError, PreconditionError
from .utils import format_float, read_text

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ICTable:
    freq: np.ndarray
    p: np.ndarray
    ic: np.ndarray
    root_freq: float
    p_floor: float


@dataclass(frozen=True)
class WeightedAdjacency:
    """Raw hybrid edge weights stored at (parent t, child s) for every is_a edge."""

    n: int
    parent_index: np.ndarray
    child_index: np.ndarray
    weights: np.ndarray

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.weights, (self.parent_index, self.child_index)),
            shape=(self.n, self.n),
        )

    def entries(self) -> dict[tuple[int, int], float]:
        return {
            (int(t), int(s)): float(w)
            for t, s, w in zip(self.parent_index, self.child_index, self.weights)
        }


@dataclass(frozen=True)
class NodeFeatureMatrix:
    """Sparse N x N one-hot matrix: row i marks i and its ancestors."""

    n: int
    matrix: sp.csr_matrix

    def row(self, i: int) -> list[int]:
        start, stop = self.matrix.indptr[i], self.matrix.indptr[i + 1]
        return self.matrix.indices[start:stop].tolist()

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)


@dataclass(frozen=True)
class GraphInputs:
    """What the model needs from the graph side."""

    a_hat: sp.csr_matrix
    onehot: NodeFeatureMatrix

    @property
    def n_terms(self) -> int:
        return self.onehot.n


def compute_freq(u: CountTable, g: OntologyGraph) -> np.ndarray:
    """freq(k) = U[k] + sum of freq over direct children of k.

    A descendant reachable along two paths is counted once per path.
    """
    if len(u.U) != len(g):
        raise PreconditionError("count table and graph sizes differ")
    freq = u.U.astype(np.float64)
    for k in reversed(g.topological_order):
        children = g.children[k]
        if children:
            freq[k] += freq[list(children)].sum()
    return freq


def compute_ic(freq: np.ndarray, g: OntologyGraph, namespace: Namespace) -> ICTable:
    """p(k) = freq(k) / freq(root), ic(k) = -ln p(k).

    With several roots, freq(root) is the largest root frequency. Terms never
    annotated get p = 1 / (freq(root) + 1).
    """
    if any(ns != namespace for ns in g.namespaces):
        raise PreconditionError(
            f"graph has terms outside namespace {namespace.value}, use subgraph()"
        )
    roots = g.roots(namespace)
    if not roots:
        raise EmptyNamespaceError(f"namespace {namespace.value} has no terms")
    root_freq = float(max(freq[r] for r in roots))
    if root_freq <= 0:
        raise EmptyNamespaceError(
            f"namespace {namespace.value} has no annotations"
        )
    p_floor = 1.0 / (root_freq + 1.0)
    p = freq / root_freq
    p[freq <= 0] = p_floor
    ic = -np.log(p)
    # -log(1.0) is -0.0
    ic[ic == 0] = 0.0
    return ICTable(freq=freq, p=p, ic=ic, root_freq=root_freq, p_floor=p_floor)


def compute_prior(u: CountTable, t: int, s: int) -> float:
    """P(U_s | U_t) = U[s] / U[t], 0 when the parent is never annotated."""
    if u.U[t] <= 0:
        return 0.0
    return float(u.U[s]) / float(u.U[t])


def build_adjacency(u: CountTable, ic: ICTable, g: OntologyGraph) -> WeightedAdjacency:
    """Weight of edge (t, s) = prior(s|t) + ic(s) / sum of ic over children of t.

    A zero IC denominator splits the share uniformly over the children.
    """
    if len(ic.ic) != len(g):
        raise PreconditionError("IC table and graph sizes differ")
    parent_index, child_index, weights = [], [], []
    for t in range(len(g)):
        children = g.children[t]
        if not children:
            continue
        denominator = float(ic.ic[list(children)].sum())
        for s in children:
            if denominator > 0:
                share = float(ic.ic[s]) / denominator
            else:
                share = 1.0 / len(children)
            parent_index.append(t)
            child_index.append(s)
            weights.append(compute_prior(u, t, s) + share)
    return WeightedAdjacency(
        n=len(g),
        parent_index=np.asarray(parent_index, dtype=np.int64),
        child_index=np.asarray(child_index, dtype=np.int64),
        weights=np.asarray(weights, dtype=np.float64),
    )


def normalize_adjacency(a: WeightedAdjacency) -> sp.csr_matrix:
    """Row-stochastic D^-1 (max(A, A^T) + I)."""
    raw = a.to_csr()
    s = raw.maximum(raw.T) + sp.identity(a.n, format="csr", dtype=np.float64)
    row_sums = np.asarray(s.sum(axis=1)).ravel()
    a_hat = sp.diags(1.0 / row_sums) @ s
    return sp.csr_matrix(a_hat)


def build_onehot_features(g: OntologyGraph) -> NodeFeatureMatrix:
    rows = [np.union1d(g.ancestor_array(i), [i]) for i in range(len(g))]
    indptr = np.zeros(len(g) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r in rows])
    indices = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    data = np.ones(len(indices), dtype=np.float64)
    matrix = sp.csr_matrix((data, indices, indptr), shape=(len(g), len(g)))
    return NodeFeatureMatrix(n=len(g), matrix=matrix)


def build_graph_inputs(
    u: CountTable, g: OntologyGraph, namespace: Namespace
) -> tuple[GraphInputs, WeightedAdjacency, ICTable]:
    freq = compute_freq(u, g)
    ic = compute_ic(freq, g, namespace)
    adjacency = build_adjacency(u, ic, g)
    inputs = GraphInputs(
        a_hat=normalize_adjacency(adjacency), onehot=build_onehot_features(g)
    )
    _LOGGER.debug(
        f"{DOMAIN} - Graph inputs for {namespace.value}: N={len(g)}, "
        f"edges={len(adjacency.weights)}, one-hot nnz={inputs.onehot.nnz}"
    )
    return inputs, adjacency, ic


def graph_manifest_fields(g: OntologyGraph, ic: ICTable, namespace: Namespace) -> dict:
    return {
        "log_base": LOG_BASE,
        "p_floor": format_float(ic.p_floor),
        "prior_floor": "0",
        "ic_share_zero_denominator": "uniform",
        "counts": "after_isolation_filter",
        "root_freq": format_float(ic.root_freq),
        "max_depth": str(g.max_depth(namespace)),
    }


def write_terms_tsv(path, g: OntologyGraph) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for i, term in enumerate(g.terms):
            f.write(f"{i}\t{term}\t{g.names[i]}\n")


def read_terms_tsv(path) -> list[str]:
    terms = []
    for line in read_text(path).split("\n"):
        if line.strip():
            terms.append(line.split("\t")[1])
    return terms


def write_adjacency_tsv(
    path, a: WeightedAdjacency, g: OntologyGraph, digits: int = 9
) -> None:
    """Raw weights with `digits` significant digits; 17 round-trips exactly."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for t, s, w in zip(a.parent_index, a.child_index, a.weights):
            f.write(f"{g.terms[t]}\t{g.terms[s]}\t{format_float(w, digits)}\n")


def read_adjacency_tsv(path, g: OntologyGraph) -> WeightedAdjacency:
    parent_index, child_index, weights = [], [], []
    for line in read_text(path).split("\n"):
        if not line.strip():
            continue
        parent, child, weight = line.split("\t")
        parent_index.append(g.index[parent])
        child_index.append(g.index[child])
        weights.append(float(weight))
    return WeightedAdjacency(
        n=len(g),
        parent_index=np.asarray(parent_index, dtype=np.int64),
        child_index=np.asarray(child_index, dtype=np.int64),
        weights=np.asarray(weights, dtype=np.float64),
    )


def write_ic_tsv(path, ic: ICTable, g: OntologyGraph) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for k, term in enumerate(g.terms):
            f.write(
                f"{term}\t{format_float(ic.freq[k], 9)}\t"
                f"{format_float(ic.p[k], 9)}\t{format_float(ic.ic[k], 9)}\n"
            )
