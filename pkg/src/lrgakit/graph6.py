"""graph6 reading and writing (undirected simple graphs).

Layout of a record: ``N(n) R(x)`` where ``N`` encodes the node count and
``R`` packs the upper triangle of the adjacency, column by column
(x(0,1), x(0,2), x(1,2), x(0,3), ...), six bits per printable byte
offset by 63.  The final byte is zero padded on the right.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .graphs import Graph

HEADER = ">>graph6<<"

_SMALL_MAX = 62
_MEDIUM_MAX = 258047
_LARGE_MAX = 68719476735


class Graph6Error(ValueError):
    """Malformed graph6 record; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def _encode_n(n: int) -> list[int]:
    if n <= _SMALL_MAX:
        return [n + 63]
    if n <= _MEDIUM_MAX:
        return [126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)]
    if n <= _LARGE_MAX:
        return [126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)]
    raise ValueError(f"graph6 cannot encode n={n}")


def _upper_bits(adjacency: np.ndarray) -> np.ndarray:
    n = adjacency.shape[0]
    j, i = np.nonzero(np.tril(np.ones((n, n), dtype=bool), -1))
    # np.nonzero on the lower triangle yields (j, i) with i < j, j-major: the column-major upper triangle
    return adjacency[i, j].astype(np.uint8)


def encode_graph6(g: Graph, header: bool = False) -> str:
    bits = _upper_bits(g.adjacency)
    pad = (-bits.size) % 6
    bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)]).reshape(-1, 6)
    chunks = (bits @ (1 << np.arange(5, -1, -1))).astype(int) + 63
    body = bytes(_encode_n(g.n) + chunks.tolist()).decode("ascii")
    return (HEADER if header else "") + body


def parse_graph6(text: str) -> Graph:
    """Decode a single graph6 record into a :class:`Graph`."""
    s = text.strip()
    base = 0
    if s.startswith(HEADER):
        base = len(HEADER)
        s = s[base:]
    if not s:
        raise Graph6Error("empty graph6 record", base)
    try:
        data = s.encode("ascii")
    except UnicodeEncodeError:
        bad = next(k for k, ch in enumerate(s) if ord(ch) > 127)
        raise Graph6Error("non-ascii byte", base + bad) from None
    for k, b in enumerate(data):
        if not 63 <= b <= 126:
            raise Graph6Error(f"byte {b!r} outside 63..126", base + k)
    vals = [b - 63 for b in data]

    if data[0] != 126:
        n, pos = vals[0], 1
    elif len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise Graph6Error("truncated 8-byte node count", base + len(data))
        n, pos = 0, 8
        for v in vals[2:8]:
            n = (n << 6) | v
    else:
        if len(data) < 4:
            raise Graph6Error("truncated 4-byte node count", base + len(data))
        n, pos = 0, 4
        for v in vals[1:4]:
            n = (n << 6) | v
    if n < 1:
        raise Graph6Error("graph with zero nodes", base)

    nbits = n * (n - 1) // 2
    nbytes = -(-nbits // 6)
    body = vals[pos:]
    if len(body) != nbytes:
        at = base + pos + min(len(body), nbytes)
        raise Graph6Error(f"expected {nbytes} edge bytes for n={n}, found {len(body)}", at)
    if nbytes:
        arr = np.array(body, dtype=np.uint8)[:, None]
        bits = ((arr >> np.arange(5, -1, -1, dtype=np.uint8)) & 1).ravel()
        if bits[nbits:].any():
            raise Graph6Error("nonzero padding bits", base + pos + nbytes - 1)
        bits = bits[:nbits]
    else:
        bits = np.zeros(0, dtype=np.uint8)

    a = np.zeros((n, n), dtype=np.int64)
    j, i = np.nonzero(np.tril(np.ones((n, n), dtype=bool), -1))
    a[i, j] = bits
    a[j, i] = bits
    return Graph(a)


def parse_graph6_lines(text: str) -> list[Graph]:
    """Parse every non-blank line.  Offsets in errors are relative to the whole text."""
    graphs = []
    start = 0
    for line in text.splitlines(keepends=True):
        if line.strip():
            lead = len(line) - len(line.lstrip())
            try:
                graphs.append(parse_graph6(line))
            except Graph6Error as exc:
                raise Graph6Error(str(exc).rsplit(" (byte", 1)[0], start + lead + exc.offset) from None
        start += len(line)
    return graphs


def write_graph6_lines(graphs: Iterable[Graph]) -> str:
    return "".join(encode_graph6(g) + "\n" for g in graphs)
