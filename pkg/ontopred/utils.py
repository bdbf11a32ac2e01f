# pylint:disable=missing-function-docstring,invalid-name
"""utils.py"""

import re

from .const import ACCESSION_DIGITS, ACCESSION_PREFIX
from .exceptions import ParseError

FNV_OFFSET_BASIS_64 = 0xCBF29CE484222325
FNV_PRIME_64 = 0x100000001B3
_MASK_64 = 0xFFFFFFFFFFFFFFFF
DIGEST_CHUNK_SIZE = 1 << 20

_ACCESSION_RE = re.compile(r"^go:(\d{%d})$" % ACCESSION_DIGITS, re.IGNORECASE)


def canonical_accession(value: str) -> str | None:
    """Return the canonical "GO:nnnnnnn" form, or None if value is not one."""
    if value is None:
        return None
    m = _ACCESSION_RE.match(value.strip())
    if m is None:
        return None
    return ACCESSION_PREFIX + m.group(1)


def fnv1a_64(data: bytes, h: int = FNV_OFFSET_BASIS_64) -> int:
    """FNV-1a over data, continuing from state h."""
    prime, mask = FNV_PRIME_64, _MASK_64
    for byte in data:
        h = ((h ^ byte) * prime) & mask
    return h


def file_digest(path, chunk_size: int = DIGEST_CHUNK_SIZE) -> str:
    h = FNV_OFFSET_BASIS_64
    with open(path, "rb") as f:
        while chunk := f.read(chunk_size):
            h = fnv1a_64(chunk, h)
    return f"{h:016x}"


def decode_text(data: bytes, source: str = None) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line_number = data.count(b"\n", 0, exc.start) + 1
        raise ParseError("invalid UTF-8", line_number, source) from exc


def read_text(path) -> str:
    """Read a UTF-8 text file with universal newlines.

    Undecodable bytes raise ParseError.
    """
    with open(path, "rb") as f:
        text = decode_text(f.read(), str(path))
    return text.replace("\r\n", "\n").replace("\r", "\n")


def format_float(value: float, digits: int = 17) -> str:
    """Locale independent %g formatting with the given significant digits."""
    return f"{float(value):.{digits}g}"


def format_fixed(value: float, places: int = 6) -> str:
    return f"{float(value):.{places}f}"


def chunk_bounds(n: int, chunks: int) -> list[tuple[int, int]]:
    """Split range(n) into at most `chunks` contiguous (start, stop) pairs."""
    chunks = max(1, min(chunks, n)) if n else 1
    size, rest = divmod(n, chunks)
    bounds = []
    start = 0
    for i in range(chunks):
        stop = start + size + (1 if i < rest else 0)
        bounds.append((start, stop))
        start = stop
    return bounds
