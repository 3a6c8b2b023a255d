"""A small binary CART classifier with Gini splits.

Only what the class-dependent masking needs: fit, predict and the list of
conditions along every path that ends in a positive leaf.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Node", "Tree", "fit", "predict", "positive_paths", "best_split", "gini", "holds"]

_GAIN_EPS = 1e-12


@dataclass(frozen=True)
class Node:
    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    predicted_class: int = 0
    positive_fraction: float = 0.0
    n_samples: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass(frozen=True)
class Tree:
    """Flat node list; index 0 is the root. Left child takes ``x < threshold``."""

    nodes: tuple[Node, ...]
    max_depth: int
    depth: int = field(default=0)

    @property
    def root(self) -> Node:
        return self.nodes[0]


def gini(pos: float, total: float) -> float:
    if total <= 0:
        return 0.0
    p = pos / total
    return 2.0 * p * (1.0 - p)


def best_split(x: np.ndarray, y: np.ndarray, min_leaf: int):
    """Best (feature, threshold, gain) over midpoint candidates, or None.

    Scans features in index order and thresholds in increasing order, so a
    later candidate must beat the incumbent by more than a rounding margin.
    """
    n, d = x.shape
    total_pos = float(y.sum())
    parent = gini(total_pos, n)
    best = None
    best_gain = _GAIN_EPS
    for j in range(d):
        order = np.argsort(x[:, j], kind="stable")
        xs = x[order, j]
        cum = np.cumsum(y[order], dtype=np.float64)
        # k = size of the left part; a cut is legal between distinct values
        k = np.arange(1, n)
        legal = (xs[1:] != xs[:-1]) & (k >= min_leaf) & (n - k >= min_leaf)
        if not legal.any():
            continue
        k = k[legal]
        lp = cum[k - 1]
        rp = total_pos - lp
        pl = lp / k
        pr = rp / (n - k)
        child = (k * 2 * pl * (1 - pl) + (n - k) * 2 * pr * (1 - pr)) / n
        gains = parent - child
        # lowest threshold among gains tied up to rounding
        i = int(np.flatnonzero(gains >= gains.max() - _GAIN_EPS)[0])
        if gains[i] > best_gain + (_GAIN_EPS if best is not None else 0.0):
            best_gain = float(gains[i])
            cut = k[i]
            thr = (xs[cut - 1] + xs[cut]) / 2.0
            best = (j, float(thr), best_gain)
    return best


def fit(features, labels, depth: int = 3, min_leaf: int = 5) -> Tree:
    """Greedy top-down tree on binary labels.

    Growth stops at ``depth``, at a pure node, or when no split leaves at
    least ``min_leaf`` samples on both sides with positive Gini gain.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(labels).ravel()
    if x.shape[0] == 0:
        raise ValueError("cannot fit a tree on empty input")
    if x.shape[0] != y.shape[0]:
        raise ValueError("features and labels differ in length")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0/1")
    if depth < 0 or min_leaf < 1:
        raise ValueError("need depth >= 0 and min_leaf >= 1")
    y = y.astype(np.float64)

    nodes: list[Node | None] = []
    reached = 0

    def grow(idx: np.ndarray, level: int) -> int:
        nonlocal reached
        reached = max(reached, level)
        slot = len(nodes)
        nodes.append(None)
        pos = float(y[idx].sum())
        size = idx.size
        frac = pos / size
        majority = 1 if pos > size - pos else 0
        leaf = Node(predicted_class=majority, positive_fraction=frac, n_samples=size)
        split = None
        if level < depth and 0.0 < frac < 1.0:
            split = best_split(x[idx], y[idx], min_leaf)
        if split is None:
            nodes[slot] = leaf
            return slot
        j, thr, _ = split
        go_left = x[idx, j] < thr
        left = grow(idx[go_left], level + 1)
        right = grow(idx[~go_left], level + 1)
        nodes[slot] = Node(feature=j, threshold=thr, left=left, right=right,
                           predicted_class=majority, positive_fraction=frac, n_samples=size)
        return slot

    grow(np.arange(x.shape[0]), 0)
    return Tree(tuple(nodes), max_depth=depth, depth=reached)


def predict(tree: Tree, features) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    out = np.empty(x.shape[0], dtype=np.int64)
    for i, row in enumerate(x):
        node = tree.nodes[0]
        while not node.is_leaf:
            node = tree.nodes[node.left if row[node.feature] < node.threshold else node.right]
        out[i] = node.predicted_class
    return out


def positive_paths(tree: Tree) -> list[list[tuple[int, str, float]]]:
    """One conjunction of ``(feature, comparator, threshold)`` per positive leaf.

    Comparators are ``"<"`` for a left edge and ``">="`` for a right edge.
    Leaves are listed left to right.
    """
    paths = []

    def walk(i, conds):
        node = tree.nodes[i]
        if node.is_leaf:
            if node.predicted_class == 1:
                paths.append(list(conds))
            return
        walk(node.left, conds + [(node.feature, "<", node.threshold)])
        walk(node.right, conds + [(node.feature, ">=", node.threshold)])

    walk(0, [])
    return paths


def holds(condition, value: float) -> bool:
    _, op, thr = condition
    return value < thr if op == "<" else value >= thr
