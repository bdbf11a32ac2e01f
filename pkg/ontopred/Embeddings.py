# pylint:disable=invalid-name,logging-fstring-interpolation
"""Embeddings.py

Fixed, externally computed per-protein sequence embeddings. Two on-disk
formats are read:

* TSV: ``protein_id \\t v1 \\t ... \\t v_dim``
* binary: ``PEMB`` magic, uint32 LE dim, then records of
  [uint16 LE id length, id bytes, dim float32 LE].
"""

import logging
import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .const import DOMAIN, EMBEDDING_MAGIC
from .exceptions import ParseError, ShapeMismatchError
from .utils import decode_text

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingTable:
    proteins: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.proteins):
            raise ShapeMismatchError(
                f"{len(self.proteins)} proteins but vectors of shape {self.vectors.shape}"
            )

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @cached_property
    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.proteins)}

    def __contains__(self, protein: str) -> bool:
        return protein in self.index

    def select(self, proteins) -> np.ndarray:
        return self.vectors[[self.index[p] for p in proteins]]


def _check_unique(proteins: list[str], source: str) -> None:
    if len(set(proteins)) != len(proteins):
        seen = set()
        for p in proteins:
            if p in seen:
                raise ParseError(f"duplicate protein id {p!r}", source=source)
            seen.add(p)


def parse_embeddings_tsv(text: str, source: str = "<embeddings>") -> EmbeddingTable:
    proteins = []
    rows = []
    dim = None
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.rstrip("\r\n").split("\t")
        if dim is None:
            dim = len(fields) - 1
        if dim == 0:
            raise ParseError("no embedding values", line_number, source)
        if len(fields) - 1 != dim:
            raise ParseError(
                f"expected {dim} values, got {len(fields) - 1}", line_number, source
            )
        try:
            rows.append(np.array(fields[1:], dtype=np.float64))
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", line_number, source) from exc
        proteins.append(fields[0])
    _check_unique(proteins, source)
    vectors = np.vstack(rows) if rows else np.empty((0, 0), dtype=np.float64)
    return EmbeddingTable(proteins=tuple(proteins), vectors=vectors)


def parse_embeddings_binary(data: bytes, source: str = "<embeddings>") -> EmbeddingTable:
    if data[:4] != EMBEDDING_MAGIC:
        raise ParseError("missing PEMB magic", source=source)
    if len(data) < 8:
        raise ParseError("truncated header", source=source)
    (dim,) = struct.unpack_from("<I", data, 4)
    offset = 8
    proteins = []
    rows = []
    while offset < len(data):
        if offset + 2 > len(data):
            raise ParseError(f"truncated record at byte {offset}", source=source)
        (id_length,) = struct.unpack_from("<H", data, offset)
        offset += 2
        end = offset + id_length + 4 * dim
        if end > len(data):
            raise ParseError(f"truncated record at byte {offset}", source=source)
        try:
            proteins.append(data[offset : offset + id_length].decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise ParseError(
                f"protein id at byte {offset} is not UTF-8", source=source
            ) from exc
        offset += id_length
        rows.append(np.frombuffer(data, dtype="<f4", count=dim, offset=offset))
        offset = end
    _check_unique(proteins, source)
    vectors = (
        np.vstack(rows).astype(np.float64)
        if rows
        else np.empty((0, dim), dtype=np.float64)
    )
    return EmbeddingTable(proteins=tuple(proteins), vectors=vectors)


def load_embeddings(path) -> EmbeddingTable:
    """Read either format, detected from the leading magic bytes."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] == EMBEDDING_MAGIC:
        table = parse_embeddings_binary(data, source=str(path))
    else:
        table = parse_embeddings_tsv(decode_text(data, str(path)), source=str(path))
    _LOGGER.debug(
        f"{DOMAIN} - Loaded {len(table.proteins)} embeddings of dim {table.dim}"
    )
    return table


def write_embeddings_tsv(path, table: EmbeddingTable) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for protein, vector in zip(table.proteins, table.vectors):
            values = "\t".join(f"{v:.17g}" for v in vector)
            f.write(f"{protein}\t{values}\n")


def write_embeddings_binary(path, table: EmbeddingTable) -> None:
    with open(path, "wb") as f:
        f.write(EMBEDDING_MAGIC)
        f.write(struct.pack("<I", table.dim))
        for protein, vector in zip(table.proteins, table.vectors):
            encoded = protein.encode("utf-8")
            f.write(struct.pack("<H", len(encoded)))
            f.write(encoded)
            f.write(np.asarray(vector, dtype="<f4").tobytes())
