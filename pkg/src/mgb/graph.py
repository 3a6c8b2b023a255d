"""Attributed graph container, propagation operators and node splits."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

__all__ = [
    "Graph",
    "NodeSplit",
    "normalized_adjacency",
    "feature_sparsity",
    "make_split",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _canonical_edges(edges, n: int) -> np.ndarray:
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if e.min() < 0 or e.max() >= n:
        raise ValueError(f"edge endpoint out of range for {n} nodes")
    e = e[e[:, 0] != e[:, 1]]
    e = np.sort(e, axis=1)
    return np.unique(e, axis=0)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected node-classification graph.

    ``edges`` is stored once per pair with ``src < dst``; self-loops and
    duplicates are dropped on construction. ``absent`` flags feature entries
    that were missing in the source data. Absent entries hold 0.0 in
    ``features`` so the value channel never carries a magic number.
    """

    features: np.ndarray
    labels: np.ndarray
    edges: np.ndarray
    num_classes: int | None = None
    absent: np.ndarray | None = None
    name: str = field(default="graph", compare=False)

    def __post_init__(self):
        x = np.array(self.features, dtype=np.float64, copy=True)
        if x.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        n, d = x.shape
        y = np.array(self.labels, dtype=np.int64, copy=True).reshape(-1)
        if y.shape[0] != n:
            raise ValueError(f"{y.shape[0]} labels for {n} nodes")
        c = int(self.num_classes) if self.num_classes is not None else int(y.max(initial=0)) + 1
        c = max(c, 2)
        if y.size and (y.min() < 0 or y.max() >= c):
            raise ValueError(f"labels must lie in [0, {c})")
        if self.absent is None:
            absent = np.zeros((n, d), dtype=bool)
        else:
            absent = np.array(self.absent, dtype=bool, copy=True)
            if absent.shape != (n, d):
                raise ValueError("absent marker shape must match features")
        x[absent] = 0.0
        if not np.all(np.isfinite(x)):
            raise ValueError("observed features must be finite")
        object.__setattr__(self, "features", _frozen(x))
        object.__setattr__(self, "labels", _frozen(y))
        object.__setattr__(self, "edges", _frozen(_canonical_edges(self.edges, n)))
        object.__setattr__(self, "num_classes", c)
        object.__setattr__(self, "absent", _frozen(absent))

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def has_absent(self) -> bool:
        return bool(self.absent.any())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.absent, other.absent)
        )

    __hash__ = object.__hash__

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency without self-loops (sparse)."""
        n = self.num_nodes
        e = self.edges
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        a = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
        a.sort_indices()
        return a

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    @cached_property
    def gcn_operator(self) -> sp.csr_matrix:
        """D^-1/2 (A + I) D^-1/2 as a sparse matrix."""
        n = self.num_nodes
        a = self.adjacency + sp.identity(n, format="csr")
        dinv = 1.0 / np.sqrt(self.degrees + 1.0)
        s = sp.diags(dinv)
        op = (s @ a @ s).tocsr()
        op.sort_indices()
        return op

    @cached_property
    def mean_operator(self) -> sp.csr_matrix:
        """Row-normalised neighbour average; isolated nodes get a zero row."""
        deg = self.degrees
        inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
        op = (sp.diags(inv) @ self.adjacency).tocsr()
        op.sort_indices()
        return op

    @cached_property
    def gin_operator(self) -> sp.csr_matrix:
        """(1 + eps) I + A with eps = 0, i.e. self plus neighbour sum."""
        op = (self.adjacency + sp.identity(self.num_nodes, format="csr")).tocsr()
        op.sort_indices()
        return op

    def components(self) -> np.ndarray:
        """Connected-component id per node."""
        _, comp = connected_components(self.adjacency, directed=False)
        return comp

    def with_absent(self, bits: np.ndarray) -> "Graph":
        """Copy of the graph with ``bits`` (1 = missing) added to the absent channel."""
        bits = np.asarray(bits, dtype=bool)
        return Graph(self.features, self.labels, self.edges, self.num_classes,
                     self.absent | bits, name=self.name)


def normalized_adjacency(g: Graph) -> np.ndarray:
    """Dense symmetric normalisation D^-1/2 (A+I) D^-1/2 with self-loops."""
    return g.gcn_operator.toarray()


def feature_sparsity(g: Graph | np.ndarray) -> float:
    """Fraction of feature entries that are exactly zero."""
    if isinstance(g, Graph):
        if g.has_absent:
            raise ValueError("sparsity is defined on fully observed features only")
        x = g.features
    else:
        x = np.asarray(g, dtype=np.float64)
        if np.isnan(x).any():
            raise ValueError("sparsity is defined on fully observed features only")
    if x.size == 0:
        return 0.0
    return float(np.count_nonzero(x == 0) / x.size)


@dataclass(frozen=True, eq=False)
class NodeSplit:
    train_ids: np.ndarray
    val_ids: np.ndarray
    test_ids: np.ndarray
    mode: str = "transductive"

    def __post_init__(self):
        if self.mode not in ("transductive", "inductive"):
            raise ValueError(f"unknown split mode {self.mode!r}")
        parts = []
        for name in ("train_ids", "val_ids", "test_ids"):
            ids = np.unique(np.asarray(getattr(self, name), dtype=np.int64))
            if ids.size == 0:
                raise ValueError(f"{name} is empty")
            object.__setattr__(self, name, _frozen(ids))
            parts.append(ids)
        total = np.concatenate(parts)
        if np.unique(total).size != total.size:
            raise ValueError("split parts overlap")

    def __eq__(self, other):
        if not isinstance(other, NodeSplit):
            return NotImplemented
        return (self.mode == other.mode
                and np.array_equal(self.train_ids, other.train_ids)
                and np.array_equal(self.val_ids, other.val_ids)
                and np.array_equal(self.test_ids, other.test_ids))

    __hash__ = object.__hash__

    @property
    def fit_ids(self) -> np.ndarray:
        """Train and validation nodes together."""
        return np.union1d(self.train_ids, self.val_ids)

    def check_inductive(self, g: Graph) -> None:
        """Raise if any edge joins a test node to a train or val node."""
        is_test = np.zeros(g.num_nodes, dtype=bool)
        is_test[self.test_ids] = True
        e = g.edges
        if np.any(is_test[e[:, 0]] != is_test[e[:, 1]]):
            raise ValueError("inductive split violated: an edge crosses the test boundary")


def _stratified_parts(ids_by_class, fractions, rng):
    parts = [[], [], []]
    cum = np.cumsum(fractions)
    for ids in ids_by_class:
        if ids.size < len(fractions):
            raise ValueError(
                f"class with {ids.size} nodes cannot fill {len(fractions)} split parts")
        ids = rng.permutation(ids)
        # rounded cumulative cut points, nudged so every part keeps a node
        cuts = [0]
        for k, c in enumerate(cum):
            lo = cuts[-1] + 1
            hi = ids.size - (len(fractions) - 1 - k)
            cuts.append(min(max(int(round(c * ids.size)), lo), hi))
        for k in range(len(fractions)):
            parts[k].append(ids[cuts[k]:cuts[k + 1]])
    return [np.concatenate(p) for p in parts]


def make_split(g: Graph, fractions=(0.6, 0.2, 0.2), mode: str = "transductive",
               seed: int = 0) -> NodeSplit:
    """Stratified train/val/test split.

    In ``inductive`` mode whole connected components, visited in random
    order, join the test part as long as the test part stays within the
    test fraction (the smallest component is used if none fits). The
    remainder is split stratified into train and validation.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or min(fractions) <= 0 or sum(fractions) > 1 + 1e-12:
        raise ValueError("fractions must be three positive numbers summing to at most 1")
    rng = np.random.default_rng(seed)
    y = g.labels

    if mode == "transductive":
        by_class = [np.flatnonzero(y == c) for c in range(g.num_classes)]
        by_class = [ids for ids in by_class if ids.size]
        train, val, test = _stratified_parts(by_class, fractions, rng)
        return NodeSplit(train, val, test, mode)

    if mode != "inductive":
        raise ValueError(f"unknown split mode {mode!r}")
    comp = g.components()
    n_comp = comp.max() + 1
    if n_comp < 2:
        raise ValueError("inductive split needs at least two connected components")
    sizes = np.bincount(comp)
    target = int(round(fractions[2] * g.num_nodes))
    order = rng.permutation(n_comp)
    # components join the test side in random order while they fit the target
    test_mask = np.zeros(g.num_nodes, dtype=bool)
    taken, chosen = 0, []
    for c in order:
        if taken + sizes[c] <= target and len(chosen) < n_comp - 1:
            chosen.append(c)
            taken += sizes[c]
    if not chosen:
        chosen = [int(np.argmin(sizes))]
    test_mask[np.isin(comp, chosen)] = True
    rest = np.flatnonzero(~test_mask)
    scale = fractions[0] + fractions[1]
    by_class = [rest[y[rest] == c] for c in range(g.num_classes)]
    by_class = [ids for ids in by_class if ids.size]
    train, val = _two_way(by_class, fractions[0] / scale, rng)
    split = NodeSplit(train, val, np.flatnonzero(test_mask), mode)
    split.check_inductive(g)
    return split


def _two_way(ids_by_class, train_frac, rng):
    train, val = [], []
    for ids in ids_by_class:
        if ids.size < 2:
            raise ValueError("class too small for a train/val split")
        ids = rng.permutation(ids)
        k = int(round(train_frac * ids.size))
        k = min(max(k, 1), ids.size - 1)
        train.append(ids[:k])
        val.append(ids[k:])
    return np.concatenate(train), np.concatenate(val)
