# pylint:disable=invalid-name,logging-fstring-interpolation
"""OntologyGraph.py"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np

from .const import DOMAIN, NAMESPACE_NAMES, NAMESPACES, Namespace
from .exceptions import (
    CrossNamespaceError,
    CycleError,
    EmptyNamespaceError,
    ParseError,
    PreconditionError,
    UnknownTermError,
)
from .utils import canonical_accession, read_text

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class OntologyGraph:
    """Immutable is_a DAG with a dense index.

    Index order is the lexicographic order of accessions. ``parents[i]`` and
    ``children[i]`` are sorted tuples of indices.
    """

    terms: tuple[str, ...]
    names: tuple[str, ...]
    namespaces: tuple[Namespace, ...]
    parents: tuple[tuple[int, ...], ...]
    children: tuple[tuple[int, ...], ...] = None
    obsolete_dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        n = len(self.terms)
        if not (len(self.names) == len(self.namespaces) == len(self.parents) == n):
            raise PreconditionError("per-term fields must all have length N")
        if list(self.terms) != sorted(self.terms):
            raise PreconditionError("terms must be in lexicographic order")
        if self.children is None:
            children = [[] for _ in range(n)]
            for child, ps in enumerate(self.parents):
                for p in ps:
                    children[p].append(child)
            object.__setattr__(
                self, "children", tuple(tuple(sorted(c)) for c in children)
            )
        self._validate()

    def _validate(self) -> None:
        n = len(self.terms)
        for child, ps in enumerate(self.parents):
            for p in ps:
                if not 0 <= p < n:
                    raise PreconditionError(f"parent index {p} out of range")
                if child not in self.children[p]:
                    raise PreconditionError("parents and children disagree")
                if self.namespaces[p] != self.namespaces[child]:
                    raise CrossNamespaceError(
                        f"is_a edge {self.terms[child]} -> {self.terms[p]} crosses "
                        f"namespaces {self.namespaces[child].value} and "
                        f"{self.namespaces[p].value}"
                    )
        if sum(len(c) for c in self.children) != self.edge_count:
            raise PreconditionError("parents and children disagree")
        graph = nx.DiGraph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(
            (child, p) for child, ps in enumerate(self.parents) for p in ps
        )
        if not nx.is_directed_acyclic_graph(graph):
            cycle = [self.terms[u] for u, _ in nx.find_cycle(graph)]
            raise CycleError(cycle)

    def __len__(self) -> int:
        return len(self.terms)

    @cached_property
    def index(self) -> dict[str, int]:
        return {term: i for i, term in enumerate(self.terms)}

    @property
    def edge_count(self) -> int:
        return sum(len(ps) for ps in self.parents)

    def edges(self):
        """Yield (parent, child) index pairs in child-major index order."""
        for child, ps in enumerate(self.parents):
            for p in ps:
                yield p, child

    def term_index(self, accession: str) -> int | None:
        return self.index.get(canonical_accession(accession))

    def namespace_indices(self, namespace: Namespace) -> list[int]:
        return [i for i, ns in enumerate(self.namespaces) if ns == namespace]

    def present_namespaces(self) -> list[Namespace]:
        seen = set(self.namespaces)
        return [ns for ns in Namespace if ns in seen]

    def roots(self, namespace: Namespace | None = None) -> list[int]:
        return [
            i
            for i, ps in enumerate(self.parents)
            if not ps and (namespace is None or self.namespaces[i] == namespace)
        ]

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Parents before children; ties broken by index."""
        indegree = [len(ps) for ps in self.parents]
        ready = [i for i, d in enumerate(indegree) if d == 0]
        order = []
        while ready:
            nxt = []
            for i in ready:
                order.append(i)
                for c in self.children[i]:
                    indegree[c] -= 1
                    if indegree[c] == 0:
                        nxt.append(c)
            ready = sorted(nxt)
        return tuple(order)

    @cached_property
    def _ancestor_table(self) -> tuple[np.ndarray, ...]:
        table = [None] * len(self.terms)
        for i in self.topological_order:
            ps = self.parents[i]
            if not ps:
                table[i] = np.empty(0, dtype=np.int64)
            elif len(ps) == 1:
                table[i] = np.union1d(table[ps[0]], ps)
            else:
                table[i] = np.unique(
                    np.concatenate([np.asarray(ps)] + [table[p] for p in ps])
                )
        return tuple(table)

    @cached_property
    def depths(self) -> np.ndarray:
        """Depth per term, roots have depth 1."""
        depth = np.ones(len(self.terms), dtype=np.int64)
        for i in self.topological_order:
            if self.parents[i]:
                depth[i] = 1 + max(depth[p] for p in self.parents[i])
        return depth

    def ancestors(self, i: int) -> list[int]:
        """Sorted transitive is_a ancestors of term i, excluding i."""
        self._check_index(i)
        return self._ancestor_table[i].tolist()

    def ancestor_array(self, i: int) -> np.ndarray:
        self._check_index(i)
        return self._ancestor_table[i]

    def descendants(self, i: int) -> list[int]:
        self._check_index(i)
        seen = set()
        stack = list(self.children[i])
        while stack:
            c = stack.pop()
            if c not in seen:
                seen.add(c)
                stack.extend(self.children[c])
        return sorted(seen)

    def max_depth(self, namespace: Namespace) -> int:
        members = self.namespace_indices(namespace)
        if not members:
            raise EmptyNamespaceError(f"namespace {namespace.value} has no terms")
        return int(self.depths[members].max())

    def _check_index(self, i: int) -> None:
        if not 0 <= i < len(self.terms):
            raise PreconditionError(
                f"term index {i} out of range for {len(self.terms)} terms"
            )

    def select(self, keep) -> tuple["OntologyGraph", dict[int, int]]:
        """Restrict to the given term indices; edges to dropped terms go away."""
        keep = sorted(set(keep))
        remap = {old: new for new, old in enumerate(keep)}
        graph = OntologyGraph(
            terms=tuple(self.terms[i] for i in keep),
            names=tuple(self.names[i] for i in keep),
            namespaces=tuple(self.namespaces[i] for i in keep),
            parents=tuple(
                tuple(sorted(remap[p] for p in self.parents[i] if p in remap))
                for i in keep
            ),
            obsolete_dropped=self.obsolete_dropped,
        )
        return graph, remap

    def subgraph(self, namespace: Namespace) -> tuple["OntologyGraph", dict[int, int]]:
        members = self.namespace_indices(namespace)
        if not members:
            raise EmptyNamespaceError(f"namespace {namespace.value} has no terms")
        return self.select(members)

    def to_obo(self) -> str:
        lines = ["format-version: 1.2", ""]
        for i, term in enumerate(self.terms):
            lines.append("[Term]")
            lines.append(f"id: {term}")
            lines.append(f"name: {self.names[i]}")
            lines.append(f"namespace: {NAMESPACE_NAMES[self.namespaces[i]]}")
            for p in self.parents[i]:
                lines.append(f"is_a: {self.terms[p]} ! {self.names[p]}")
            lines.append("")
        return "\n".join(lines)


def ancestors(g: OntologyGraph, i: int) -> list[int]:
    return g.ancestors(i)


def max_depth(g: OntologyGraph, namespace: Namespace) -> int:
    return g.max_depth(namespace)


def drop_isolated(
    g: OntologyGraph, annotated
) -> tuple[OntologyGraph, dict[int, int]]:
    """Remove terms with no parents, no children and no training annotation."""
    annotated = set(annotated)
    keep = [
        i
        for i in range(len(g))
        if g.parents[i] or g.children[i] or i in annotated
    ]
    dropped = len(g) - len(keep)
    if dropped:
        _LOGGER.info(f"{DOMAIN} - Dropped {dropped} isolated terms of {len(g)}")
    return g.select(keep)


def _strip_value(value: str) -> str:
    # "GO:0000001 ! name" and trailing "{qualifiers}"
    value = value.split("!", 1)[0]
    value = value.split("{", 1)[0]
    return value.strip()


def parse_obo(text: str, source: str = "<obo>") -> OntologyGraph:
    """Parse the [Term] stanzas of an OBO 1.2 document into an OntologyGraph."""
    stanzas = []
    current = None
    in_term = False
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("!"):
            continue
        if line.startswith("[") and line.endswith("]"):
            if current is not None:
                stanzas.append(current)
            in_term = line == "[Term]"
            current = {"line": line_number, "is_a": []} if in_term else None
            continue
        if not in_term:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", line_number, source)
        key = key.strip()
        if key == "is_a":
            current["is_a"].append((_strip_value(value), line_number))
        elif key in ("id", "name", "namespace", "is_obsolete"):
            current[key] = (_strip_value(value) if key != "name" else value.strip())
    if current is not None:
        stanzas.append(current)

    defined = {}
    obsolete = set()
    for stanza in stanzas:
        for key in ("id", "namespace"):
            if key not in stanza:
                raise ParseError(
                    f"[Term] stanza without '{key}:'", stanza["line"], source
                )
        accession = canonical_accession(stanza["id"])
        if accession is None:
            raise ParseError(
                f"invalid accession {stanza['id']!r}", stanza["line"], source
            )
        if stanza["namespace"] not in NAMESPACES:
            raise ParseError(
                f"unknown namespace {stanza['namespace']!r}", stanza["line"], source
            )
        if accession in defined or accession in obsolete:
            raise ParseError(f"duplicate term {accession}", stanza["line"], source)
        if stanza.get("is_obsolete", "false").lower() == "true":
            obsolete.add(accession)
            continue
        defined[accession] = stanza

    terms = tuple(sorted(defined))
    index = {term: i for i, term in enumerate(terms)}
    parents = []
    edges_to_obsolete = 0
    for term in terms:
        stanza = defined[term]
        ps = set()
        for target, line_number in stanza["is_a"]:
            target_acc = canonical_accession(target)
            if target_acc in index:
                ps.add(index[target_acc])
            elif target_acc in obsolete:
                edges_to_obsolete += 1
            else:
                raise UnknownTermError(
                    f"{source}:{line_number}: is_a target {target!r} of {term} "
                    "is not defined"
                )
        parents.append(tuple(sorted(ps)))

    if edges_to_obsolete:
        _LOGGER.warning(
            f"{DOMAIN} - Ignored {edges_to_obsolete} is_a edges to obsolete terms"
        )
    graph = OntologyGraph(
        terms=terms,
        names=tuple(defined[t].get("name", "") for t in terms),
        namespaces=tuple(NAMESPACES[defined[t]["namespace"]] for t in terms),
        parents=tuple(parents),
        obsolete_dropped=len(obsolete),
    )
    _LOGGER.debug(
        f"{DOMAIN} - Parsed {len(graph)} terms, {graph.edge_count} is_a edges, "
        f"{len(obsolete)} obsolete dropped from {source}"
    )
    return graph


def load_obo(path) -> OntologyGraph:
    return parse_obo(read_text(path), source=str(path))
