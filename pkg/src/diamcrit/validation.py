"""Coerce user input into :class:`~diamcrit.graph.Graph` values.

Accepted graph inputs: a Graph, graph6 text or bytes, an ``(n, edges)``
pair, a ``{"n": ..., "edges": ...}`` dict, a square 0/1 adjacency matrix,
or anything with ``nodes()``/``edges()`` whose nodes are 0..n-1
(networkx graphs, for instance).
"""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import BadParams
from .graph import Graph, build, from_adjacency, from_graph6, from_json_dict


def check_graph(X):
    if isinstance(X, Graph):
        return X
    if isinstance(X, (bytes, str)):
        return from_graph6(X.encode() if isinstance(X, str) else X)
    if isinstance(X, dict):
        return from_json_dict(X)
    if hasattr(X, "nodes") and hasattr(X, "edges") and callable(X.nodes):
        nodes = sorted(X.nodes())
        if nodes != list(range(len(nodes))):
            raise BadParams("graph nodes must be 0..n-1")
        return build(len(nodes), list(X.edges()))
    if isinstance(X, tuple) and len(X) == 2 and isinstance(X[0], numbers.Integral):
        return build(X[0], X[1])
    try:
        arr = np.asarray(X)
    except (ValueError, TypeError):
        arr = None
    if arr is not None and arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        if not np.isin(arr, (0, 1)).all() or (arr != arr.T).any() or np.diagonal(arr).any():
            raise BadParams("adjacency matrix must be symmetric 0/1 with zero diagonal")
        return from_adjacency(arr)
    raise BadParams(f"cannot interpret {type(X).__name__} as a graph")


def check_graphs(X):
    """A single graph or an iterable of graphs, as a list of Graphs."""
    try:
        return [check_graph(X)]
    except BadParams:
        pass
    if isinstance(X, (str, bytes)):
        raise BadParams("not a graph6 string")
    try:
        items = list(X)
    except TypeError:
        raise BadParams(f"cannot interpret {type(X).__name__} as graphs") from None
    return [check_graph(x) for x in items]


def check_k(k, minimum=1):
    if isinstance(k, bool) or not isinstance(k, numbers.Integral) or k < minimum:
        raise BadParams(f"k must be an integer >= {minimum}, got {k!r}")
    return int(k)


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise BadParams(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
