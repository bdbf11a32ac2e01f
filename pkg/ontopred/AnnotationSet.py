# pylint:disable=invalid-name,logging-fstring-interpolation
"""AnnotationSet.py"""

import logging
import re
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .OntologyGraph import OntologyGraph
from .const import DOMAIN, EXPERIMENTAL_EVIDENCE_CODES, PROPAGATED_EVIDENCE
from .exceptions import ParseError, PreconditionError
from .lib.parallel import ordered_map
from .utils import canonical_accession, chunk_bounds, read_text

_LOGGER = logging.getLogger(__name__)

_EVIDENCE_RE = re.compile(r"^[A-Z0-9]{1,3}$")


@dataclass(frozen=True)
class AnnotationRecord:
    protein: str
    term: str
    evidence: str


@dataclass(frozen=True)
class CountTable:
    """U[k]: number of training proteins annotated with term k."""

    U: np.ndarray

    def __getitem__(self, k: int) -> int:
        return int(self.U[k])


@dataclass(frozen=True)
class AnnotationSet:
    proteins: tuple[str, ...]
    labels: tuple[tuple[int, ...], ...]
    propagated: bool = False
    # per protein: term index -> evidence code of the direct annotation,
    # None when the set was built without records
    direct: tuple[dict, ...] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.proteins) != len(self.labels):
            raise PreconditionError("proteins and labels must have equal length")
        if len(set(self.proteins)) != len(self.proteins):
            raise PreconditionError("duplicate protein ids")
        if self.direct is None:
            object.__setattr__(
                self, "direct", tuple({t: None for t in ls} for ls in self.labels)
            )

    def __len__(self) -> int:
        return len(self.proteins)

    @classmethod
    def from_records(cls, records, graph: OntologyGraph) -> "AnnotationSet":
        """Group records by protein, first-seen protein order.

        Records whose term is not in ``graph`` are dropped with one warning.
        Duplicate (protein, term) records collapse, the first evidence wins.
        """
        order = {}
        direct = []
        unknown = []
        for record in records:
            k = graph.index.get(record.term)
            if k is None:
                unknown.append(record.term)
                continue
            if record.protein not in order:
                order[record.protein] = len(direct)
                direct.append({})
            direct[order[record.protein]].setdefault(k, record.evidence)
        if unknown:
            _warn_dropped("annotations with terms outside the ontology", unknown)
        return cls(
            proteins=tuple(order),
            labels=tuple(tuple(sorted(d)) for d in direct),
            propagated=False,
            direct=tuple(direct),
        )

    def restrict(self, remap: dict[int, int], drop_empty: bool = True) -> "AnnotationSet":
        """Re-index labels through an old->new term map, dropping unmapped terms."""
        proteins, labels, direct = [], [], []
        for protein, ls, d in zip(self.proteins, self.labels, self.direct):
            new = tuple(sorted(remap[k] for k in ls if k in remap))
            if drop_empty and not new:
                continue
            proteins.append(protein)
            labels.append(new)
            direct.append({remap[k]: v for k, v in d.items() if k in remap})
        return replace(
            self, proteins=tuple(proteins), labels=tuple(labels), direct=tuple(direct)
        )

    def select_proteins(self, proteins) -> "AnnotationSet":
        position = {p: i for i, p in enumerate(self.proteins)}
        rows = [position[p] for p in proteins]
        return replace(
            self,
            proteins=tuple(self.proteins[i] for i in rows),
            labels=tuple(self.labels[i] for i in rows),
            direct=tuple(self.direct[i] for i in rows),
        )

    def annotated_terms(self) -> set[int]:
        return {k for ls in self.labels for k in ls}

    def rows(self):
        """Yield (protein, term index, evidence) with PROP for inferred rows."""
        for protein, ls, d in zip(self.proteins, self.labels, self.direct):
            for k in ls:
                yield protein, k, d[k] if k in d else PROPAGATED_EVIDENCE


def _warn_dropped(what: str, identifiers) -> None:
    examples = ", ".join(sorted(set(identifiers))[:5])
    _LOGGER.warning(f"{DOMAIN} - Dropped {len(identifiers)} {what} (e.g. {examples})")


def parse_annotations(
    text: str, graph: OntologyGraph | None = None, source: str = "<annotations>"
) -> list[AnnotationRecord]:
    """Parse `protein \\t GO:xxxxxxx \\t EVIDENCE` lines.

    Lines starting with ``!`` or ``#`` are comments. When ``graph`` is given,
    records for terms it does not define are dropped and reported.
    """
    records = []
    unknown = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("!", "#")):
            continue
        fields = [f.strip() for f in line.rstrip("\r\n").split("\t")]
        if len(fields) != 3:
            raise ParseError(
                f"expected 3 tab separated fields, got {len(fields)}",
                line_number,
                source,
            )
        protein, accession, evidence = fields
        term = canonical_accession(accession)
        if not protein:
            raise ParseError("empty protein id", line_number, source)
        if term is None:
            raise ParseError(f"invalid GO accession {accession!r}", line_number, source)
        evidence = evidence.upper()
        if not (_EVIDENCE_RE.match(evidence) or evidence == PROPAGATED_EVIDENCE):
            raise ParseError(f"invalid evidence code {evidence!r}", line_number, source)
        if graph is not None and term not in graph.index:
            unknown.append(term)
            continue
        records.append(AnnotationRecord(protein, term, evidence))
    if unknown:
        _warn_dropped(f"records with terms missing from the ontology in {source}", unknown)
    return records


def load_annotations(path, graph: OntologyGraph | None = None) -> list[AnnotationRecord]:
    return parse_annotations(read_text(path), graph, source=str(path))


def filter_experimental(records) -> list[AnnotationRecord]:
    return [r for r in records if r.evidence in EXPERIMENTAL_EVIDENCE_CODES]


def propagate_true_path(
    a: AnnotationSet, g: OntologyGraph, threads: int = 1
) -> AnnotationSet:
    """Close every label set under is_a ancestors. Idempotent."""
    if a.propagated:
        _LOGGER.debug(f"{DOMAIN} - Annotation set already propagated")

    def close(bounds):
        start, stop = bounds
        out = []
        for ls in a.labels[start:stop]:
            closed = set(ls)
            for k in ls:
                closed.update(g.ancestor_array(k).tolist())
            out.append(tuple(sorted(closed)))
        return out

    chunks = ordered_map(close, chunk_bounds(len(a), threads), threads)
    labels = tuple(ls for chunk in chunks for ls in chunk)
    return replace(a, labels=labels, propagated=True)


def _require_propagated(a: AnnotationSet) -> None:
    if not a.propagated:
        raise PreconditionError("annotation set must be propagated first")


def build_targets(a: AnnotationSet, g: OntologyGraph) -> sp.csr_matrix:
    """Binary proteins x N matrix, rows in a.proteins order."""
    _require_propagated(a)
    indptr = np.zeros(len(a) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(ls) for ls in a.labels])
    indices = np.fromiter(
        (k for ls in a.labels for k in ls), dtype=np.int64, count=int(indptr[-1])
    )
    data = np.ones(len(indices), dtype=np.float64)
    return sp.csr_matrix((data, indices, indptr), shape=(len(a), len(g)))


def count_annotations(a: AnnotationSet, g: OntologyGraph) -> CountTable:
    _require_propagated(a)
    U = np.zeros(len(g), dtype=np.int64)
    for ls in a.labels:
        U[list(ls)] += 1
    return CountTable(U=U)


def write_annotations(stream, a: AnnotationSet, g: OntologyGraph) -> None:
    """Write `protein \\t accession \\t evidence` rows, PROP marking inferred rows."""
    for protein, k, evidence in a.rows():
        stream.write(f"{protein}\t{g.terms[k]}\t{evidence}\n")
