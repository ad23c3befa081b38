"""Simple undirected graphs with bit-row adjacency.

A :class:`Graph` stores one Python ``int`` per vertex whose set bits are the
neighbors, plus the sorted edge list as an ``(m, 2)`` integer array. Memory
is O(n^2 / 8) bytes for the rows and O(m) for the edge list. Values are
immutable; the ``with_edge``/``without_edge`` builders return new graphs.

Vertices are the integers ``0..n-1``. Edge ids are positions in the sorted
edge list and are stable for a given Graph value.
"""

from __future__ import annotations

import json
from typing import Iterable, NamedTuple

import numpy as np

from ._bits import array_to_row, iter_bits, row_to_array
from .exceptions import OutOfRange, ParseError, SelfLoop

GRAPH6_HEADER = b">>graph6<<"
_ROW_BLOCK = 2048


class EdgeId(NamedTuple):
    index: int
    u: int
    v: int


class Graph:
    __slots__ = ("n", "_rows", "_edges", "_codes", "_edge_list", "_hash")

    def __init__(self, n, rows, edges):
        # Internal constructor; use build() or the readers.
        self.n = n
        self._rows = tuple(rows)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        edges.setflags(write=False)
        self._edges = edges
        codes = edges[:, 0] * max(n, 1) + edges[:, 1]
        codes.setflags(write=False)
        self._codes = codes
        self._edge_list = None
        self._hash = None

    # -- basic queries ---------------------------------------------------
    @property
    def m(self):
        return len(self._edges)

    @property
    def rows(self):
        return self._rows

    @property
    def edge_array(self):
        return self._edges

    @property
    def edges(self):
        if self._edge_list is None:
            self._edge_list = [(int(u), int(v)) for u, v in self._edges]
        return self._edge_list

    def has_edge(self, u, v):
        return bool((self._rows[u] >> v) & 1)

    def neighbors(self, v):
        return list(iter_bits(self._rows[v]))

    def degree(self, v):
        return self._rows[v].bit_count()

    def edge_index(self, u, v):
        """Index of edge ``uv`` in the edge list, or -1 if absent."""
        if u > v:
            u, v = v, u
        if not (0 <= u < self.n and 0 <= v < self.n):
            return -1
        code = u * self.n + v
        pos = int(np.searchsorted(self._codes, code))
        if pos < len(self._codes) and self._codes[pos] == code:
            return pos
        return -1

    def edge_id(self, e):
        """Normalize ``e`` (an index, a pair, or an EdgeId) to an EdgeId."""
        if isinstance(e, EdgeId):
            return e
        if isinstance(e, (int, np.integer)):
            idx = int(e)
            if not 0 <= idx < self.m:
                raise OutOfRange(f"edge index {idx} not in 0..{self.m - 1}")
            u, v = self._edges[idx]
            return EdgeId(idx, int(u), int(v))
        u, v = (int(x) for x in e)
        idx = self.edge_index(u, v)
        if idx < 0:
            raise OutOfRange(f"({u}, {v}) is not an edge")
        return EdgeId(idx, min(u, v), max(u, v))

    # -- derived graphs --------------------------------------------------
    def with_edge(self, u, v):
        return build(self.n, np.vstack([self._edges, [[u, v]]]))

    def without_edge(self, u, v):
        idx = self.edge_index(u, v)
        if idx < 0:
            return self
        return build(self.n, np.delete(self._edges, idx, axis=0))

    def relabel(self, perm):
        """Graph with vertex ``i`` renamed to ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise OutOfRange("perm must be a permutation of 0..n-1")
        return build(self.n, perm[self._edges])

    def complement(self):
        return complement(self)

    # -- value semantics -------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self._rows == other._rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self._rows))
        return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def check_invariants(self):
        """Assert symmetry, loop-freedom and edge-list consistency."""
        rows = self._rows
        total = 0
        for v, row in enumerate(rows):
            assert not (row >> v) & 1, f"self-loop at {v}"
            assert row >> self.n == 0, f"row {v} has bits beyond n"
            for w in iter_bits(row):
                assert (rows[w] >> v) & 1, f"asymmetric pair ({v}, {w})"
            total += row.bit_count()
        assert total == 2 * self.m
        assert np.all(self._edges[:, 0] < self._edges[:, 1])
        assert np.all(np.diff(self._codes) > 0)
        for u, v in self._edges:
            assert (rows[u] >> int(v)) & 1
        return True

    # -- serialization ---------------------------------------------------
    def to_graph6(self, header=False):
        return to_graph6(self, header=header)

    def to_json(self):
        return to_json(self)


def _rows_from_edges(n, edges):
    if n == 0:
        return []
    if len(edges) < 4 * n or n <= 64:
        rows = [0] * n
        for u, v in edges.tolist():
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return rows
    both = np.concatenate([edges, edges[:, ::-1]])
    order = np.argsort(both[:, 0], kind="stable")
    both = both[order]
    rows = []
    for start in range(0, n, _ROW_BLOCK):
        stop = min(n, start + _ROW_BLOCK)
        lo, hi = np.searchsorted(both[:, 0], [start, stop])
        block = np.zeros((stop - start, n), dtype=bool)
        sel = both[lo:hi]
        block[sel[:, 0] - start, sel[:, 1]] = True
        packed = np.packbits(block, axis=1, bitorder="little")
        rows.extend(int.from_bytes(r.tobytes(), "little") for r in packed)
    return rows


def build(n, edges: Iterable = ()):
    """Build a Graph on ``n`` vertices; duplicate edges are dropped."""
    n = int(n)
    if n < 0:
        raise OutOfRange("n must be non-negative")
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if len(arr):
        bad = (arr < 0) | (arr >= n)
        if bad.any():
            i = int(np.argwhere(bad.any(axis=1))[0, 0])
            raise OutOfRange(f"edge {tuple(arr[i].tolist())} has an endpoint outside 0..{n - 1}")
        loops = arr[:, 0] == arr[:, 1]
        if loops.any():
            i = int(np.argmax(loops))
            raise SelfLoop(f"self-loop at vertex {int(arr[i, 0])}")
        arr = np.sort(arr, axis=1)
        codes = np.unique(arr[:, 0] * n + arr[:, 1])
        arr = np.stack([codes // n, codes % n], axis=1)
    rows = _rows_from_edges(n, arr)
    return Graph(n, rows, arr)


def edges_from_rows(n, rows):
    """Sorted ``(m, 2)`` edge array read off the upper triangle of ``rows``."""
    parts = []
    small = n <= 256
    for u, row in enumerate(rows):
        upper = row >> (u + 1)
        if not upper:
            continue
        if small:
            vs = np.fromiter((u + 1 + b for b in iter_bits(upper)), dtype=np.int64)
        else:
            vs = np.flatnonzero(row_to_array(upper, n - u - 1)) + u + 1
        parts.append(np.stack([np.full(len(vs), u, dtype=np.int64), vs], axis=1))
    if not parts:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(parts)


def from_rows(n, rows):
    rows = list(rows)
    return Graph(n, rows, edges_from_rows(n, rows))


def complement(g):
    full = (1 << g.n) - 1
    rows = [full ^ row ^ (1 << v) for v, row in enumerate(g.rows)]
    return from_rows(g.n, rows)


def degrees(g):
    return np.array([row.bit_count() for row in g.rows], dtype=np.int64)


def degree_square_sum(g):
    return sum(row.bit_count() ** 2 for row in g.rows)


# -- graph6 -----------------------------------------------------------------

def _encode_n(n):
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n <= 68719476735:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise OutOfRange("graph6 supports at most 68719476735 vertices")


def to_graph6(g, header=False):
    """graph6 encoding (no trailing newline)."""
    n = g.n
    total = n * (n - 1) // 2
    nbytes = (total + 5) // 6
    bits = np.zeros(nbytes * 6, dtype=np.uint8)
    if g.m:
        i, j = g.edge_array[:, 0], g.edge_array[:, 1]
        bits[j * (j - 1) // 2 + i] = 1
    weights = np.array([32, 16, 8, 4, 2, 1], dtype=np.uint8)
    body = (bits.reshape(-1, 6) @ weights + 63).astype(np.uint8).tobytes()
    out = _encode_n(n) + body
    return GRAPH6_HEADER + out if header else out


def from_graph6(data):
    """Parse one graph6 record (bytes or str); strict about length and padding."""
    if isinstance(data, str):
        try:
            data = data.encode("ascii")
        except UnicodeEncodeError as exc:
            raise ParseError("non-ASCII character", exc.start) from None
    data = bytes(data)
    start = 0
    if data.startswith(GRAPH6_HEADER):
        start = len(GRAPH6_HEADER)
    end = len(data)
    while end > start and data[end - 1] in b"\r\n":
        end -= 1
    if end <= start:
        raise ParseError("empty graph6 record", start)
    if data[start] in b":;&":
        raise ParseError("sparse6/digraph6 records are not supported", start)
    for off in range(start, end):
        if not 63 <= data[off] <= 126:
            raise ParseError(f"invalid graph6 byte 0x{data[off]:02x}", off)
    pos = start
    if data[pos] != 126:
        n = data[pos] - 63
        pos += 1
    else:
        width = 6 if end - pos > 1 and data[pos + 1] == 126 else 3
        pos += 2 if width == 6 else 1
        if end - pos < width:
            raise ParseError("truncated vertex-count field", pos)
        n = 0
        for off in range(pos, pos + width):
            n = (n << 6) | (data[off] - 63)
        pos += width
    total = n * (n - 1) // 2
    nbytes = (total + 5) // 6
    if end - pos != nbytes:
        raise ParseError(f"expected {nbytes} adjacency bytes for n={n}, got {end - pos}", min(end, pos + nbytes))
    vals = np.frombuffer(data[pos:end], dtype=np.uint8) - 63
    bits = np.unpackbits(vals[:, None], axis=1)[:, 2:].reshape(-1)
    if bits[total:].any():
        raise ParseError("nonzero padding bits", end - 1)
    idx = np.flatnonzero(bits[:total]).astype(np.int64)
    # bit index = j(j-1)/2 + i for i < j
    j = ((1 + np.sqrt(1 + 8 * idx.astype(np.float64))) // 2).astype(np.int64)
    j[j * (j - 1) // 2 > idx] -= 1
    j[(j + 1) * j // 2 <= idx] += 1
    i = idx - j * (j - 1) // 2
    return build(n, np.stack([i, j], axis=1))


def read_graph6_lines(text):
    return [from_graph6(line) for line in text.splitlines() if line.strip()]


# -- JSON edge list ---------------------------------------------------------

def to_json_dict(g):
    return {"n": g.n, "edges": [list(e) for e in g.edges]}


def to_json(g):
    return json.dumps(to_json_dict(g))


def from_json_dict(obj):
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise ParseError("JSON graph must be an object with 'n' and 'edges'")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ParseError("'n' must be a non-negative integer")
    edges = obj["edges"]
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in e)
        for e in edges
    ):
        raise ParseError("'edges' must be a list of integer pairs")
    return build(n, edges)


def from_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
    return from_json_dict(obj)


# -- small named graphs -----------------------------------------------------

def empty_graph(n):
    return build(n, [])


def complete_graph(n):
    return build(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n):
    return build(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return build(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite(a, b):
    return build(a + b, [(u, a + v) for u in range(a) for v in range(b)])


def petersen_graph():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build(10, outer + spokes + inner)


def from_adjacency(matrix):
    """Graph from a symmetric 0/1 matrix (upper triangle is read)."""
    a = np.asarray(matrix, dtype=bool)
    iu = np.argwhere(np.triu(a, 1))
    return build(a.shape[0], iu)


__all__ = [
    "EdgeId",
    "Graph",
    "array_to_row",
    "build",
    "complement",
    "complete_bipartite",
    "complete_graph",
    "cycle_graph",
    "degree_square_sum",
    "degrees",
    "empty_graph",
    "from_graph6",
    "from_json",
    "from_json_dict",
    "from_rows",
    "path_graph",
    "petersen_graph",
    "to_graph6",
    "to_json",
    "to_json_dict",
]
