"""Distances, diameter, and distances after deleting one edge.

Distances are ints; unreachable is ``INF`` (``math.inf``), which compares
above every int and absorbs addition. BFS frontiers are bit masks over the
adjacency rows, so one layer costs O(min(|frontier|, |unvisited|)) big-int
operations of n/64 words each.

Deletion queries never copy the graph: the deleted edge is masked out while
expanding frontiers.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from ._bits import iter_bits
from .exceptions import OutOfRange, Unreachable

INF = math.inf


def _expand(rows, frontier, unvisited, a=-1, b=-1):
    """Vertices of ``unvisited`` adjacent to ``frontier``, ignoring edge ``ab``."""
    if frontier.bit_count() <= unvisited.bit_count():
        acc = 0
        for w in iter_bits(frontier):
            acc |= rows[w]
        new = acc & unvisited
        if a >= 0:
            for p, q in ((a, b), (b, a)):
                if (frontier >> p) & 1 and (new >> q) & 1:
                    if not (rows[q] & frontier) & ~(1 << p):
                        new &= ~(1 << q)
        return new
    new = 0
    for y in iter_bits(unvisited):
        r = rows[y] & frontier
        if y == a:
            r &= ~(1 << b)
        elif y == b:
            r &= ~(1 << a)
        if r:
            new |= 1 << y
    return new


def bfs_layers(g, source, max_depth=None, skip_edge=None):
    """Distance layers from ``source`` as bit masks; ``layers[j]`` = distance j."""
    rows = g.rows if hasattr(g, "rows") else g
    n = len(rows)
    if not 0 <= source < n:
        raise OutOfRange(f"source {source} not in 0..{n - 1}")
    a, b = skip_edge if skip_edge is not None else (-1, -1)
    frontier = 1 << source
    unvisited = ((1 << n) - 1) ^ frontier
    layers = [frontier]
    depth = 0
    while frontier and unvisited and (max_depth is None or depth < max_depth):
        frontier = _expand(rows, frontier, unvisited, a, b)
        if not frontier:
            break
        unvisited ^= frontier
        layers.append(frontier)
        depth += 1
    return layers


def _dist_from_layers(layers, n):
    dist = [INF] * n
    for j, layer in enumerate(layers):
        for v in iter_bits(layer):
            dist[v] = j
    return dist


def bfs_distances(g, source):
    """Exact distances from ``source``; unreachable vertices get INF."""
    return _dist_from_layers(bfs_layers(g, source), g.n)


def distance_matrix(g):
    """All-pairs distances as an int64 array with -1 for unreachable pairs."""
    n = g.n
    out = np.full((n, n), -1, dtype=np.int64)
    for x in range(n):
        for j, layer in enumerate(bfs_layers(g, x)):
            for v in iter_bits(layer):
                out[x, v] = j
    return out


def eccentricity(g, v):
    layers = bfs_layers(g, v)
    total = sum(layer.bit_count() for layer in layers)
    return len(layers) - 1 if total == g.n else INF


def diameter(g):
    """Exact diameter; INF iff disconnected, 0 for a single vertex."""
    if g.n == 0:
        raise OutOfRange("diameter of the empty graph is undefined")
    best = 0
    for x in range(g.n):
        ecc = eccentricity(g, x)
        if ecc == INF:
            return INF
        best = max(best, ecc)
    return best


def _endpoints(g, e):
    eid = g.edge_id(e)
    return eid.u, eid.v


def distance_without_edge(g, x, y, e, limit=None):
    """d_{G-e}(x, y). With ``limit``, anything beyond ``limit`` is reported as INF."""
    a, b = _endpoints(g, e)
    if x == y:
        return 0
    rows = g.rows
    n = g.n
    target = 1 << y
    frontier = 1 << x
    unvisited = ((1 << n) - 1) ^ frontier
    depth = 0
    while frontier and (limit is None or depth < limit):
        frontier = _expand(rows, frontier, unvisited, a, b)
        depth += 1
        if frontier & target:
            return depth
        unvisited ^= frontier
    return INF


def distance(g, x, y):
    if x == y:
        return 0
    rows = g.rows
    target = 1 << y
    frontier = 1 << x
    unvisited = ((1 << g.n) - 1) ^ frontier
    depth = 0
    while frontier:
        frontier = _expand(rows, frontier, unvisited)
        depth += 1
        if frontier & target:
            return depth
        unvisited ^= frontier
    return INF


def edge_on_all_shortest(g, x, y, e):
    """True iff every shortest (x, y)-path uses ``e``."""
    d = distance(g, x, y)
    if d == INF:
        raise Unreachable(f"{x} and {y} are disconnected")
    return distance_without_edge(g, x, y, e, limit=d) > d


def canonical_shortest_path(g, x, y):
    """Shortest (x, y)-path, stepping to the smallest neighbor closer to ``y``."""
    if x == y:
        return (x,)
    layers = bfs_layers(g, y)
    level = None
    for j, layer in enumerate(layers):
        if (layer >> x) & 1:
            level = j
            break
    if level is None:
        raise Unreachable(f"{x} and {y} are disconnected")
    rows = g.rows
    path = [x]
    cur = x
    for j in range(level - 1, -1, -1):
        step = rows[cur] & layers[j]
        cur = (step & -step).bit_length() - 1
        path.append(cur)
    return tuple(path)


# -- deletion kernel --------------------------------------------------------

def fragile_edges(rows, layers):
    """Yield ``(u, v)`` where ``u`` is the unique BFS parent of ``v``.

    Only these edges can change any distance from the layers' source.
    """
    for j in range(1, len(layers)):
        prev = layers[j - 1]
        for v in iter_bits(layers[j]):
            par = rows[v] & prev
            if not par & (par - 1):
                yield par.bit_length() - 1, v


def deletion_far_set(rows, layers, level, u, v, k):
    """Vertices whose distance from the source exceeds ``k`` once ``uv`` is gone.

    ``u`` must be the unique parent of ``v`` and ``v`` must sit in
    ``layers[level]``. Only the set D of vertices all of whose shortest paths
    pass through ``uv`` can move; their new distances are relaxed inside D
    from the unaffected boundary.
    """
    depth = len(layers) - 1
    members = [(v, level)]
    d_mask = 1 << v
    cur = 1 << v
    for j in range(level, depth):
        nxt_layer = layers[j + 1]
        acc = 0
        for w in iter_bits(cur):
            acc |= rows[w]
        cand = acc & nxt_layer
        if not cand:
            break
        prev = layers[j]
        nxt = 0
        for y in iter_bits(cand):
            if not (rows[y] & prev) & ~cur:
                nxt |= 1 << y
        if not nxt:
            break
        d_mask |= nxt
        members.extend((y, j + 1) for y in iter_bits(nxt))
        cur = nxt
    far = 0
    best = {}
    heap = []
    not_d = ~d_mask
    for y, lvl in members:
        out = rows[y] & not_d
        if y == v:
            out &= ~(1 << u)
        nd = INF
        if lvl < len(layers) and out & layers[lvl]:
            nd = lvl + 1
        elif lvl + 1 < len(layers) and out & layers[lvl + 1]:
            nd = lvl + 2
        best[y] = nd
        if nd != INF:
            heap.append((nd, y))
    heapq.heapify(heap)
    done = 0
    while heap:
        dy, y = heapq.heappop(heap)
        if (done >> y) & 1 or dy > best[y]:
            continue
        done |= 1 << y
        for z in iter_bits(rows[y] & d_mask & ~done):
            if dy + 1 < best[z]:
                best[z] = dy + 1
                heapq.heappush(heap, (dy + 1, z))
    for y, nd in best.items():
        if nd > k:
            far |= 1 << y
    return far


def deletion_scan(g, k, skip=None, truncate=False):
    """Yield ``(x, u, v, far_mask)`` for every source x and fragile edge uv.

    ``far_mask`` holds the y with d(x, y) <= k and d_{G-uv}(x, y) > k. Pairs
    at distance > k in G are never reported. ``skip(u, v)`` may veto an edge
    (used to stop examining edges already known to be critical).
    Raises ValueError if some eccentricity exceeds ``k``, unless ``truncate``
    is set, in which case BFS simply stops at depth ``k``.
    """
    rows = g.rows
    n = g.n
    for x in range(n):
        if truncate:
            layers = bfs_layers(g, x, max_depth=k)
        else:
            layers = bfs_layers(g, x)
            if sum(layer.bit_count() for layer in layers) != n or len(layers) - 1 > k:
                raise ValueError(f"vertex {x} has eccentricity above {k}")
        for j in range(1, len(layers)):
            prev = layers[j - 1]
            for v in iter_bits(layers[j]):
                par = rows[v] & prev
                if par & (par - 1):
                    continue
                u = par.bit_length() - 1
                if skip is not None and skip(u, v):
                    continue
                far = deletion_far_set(rows, layers, j, u, v, k)
                yield x, u, v, far


__all__ = [
    "INF",
    "bfs_distances",
    "bfs_layers",
    "canonical_shortest_path",
    "deletion_far_set",
    "deletion_scan",
    "diameter",
    "distance",
    "distance_matrix",
    "distance_without_edge",
    "eccentricity",
    "edge_on_all_shortest",
    "fragile_edges",
]
