"""Synthetic node-classification graphs.

Topology is Barabasi-Albert preferential attachment, features are standard
normal, and labels come from a two-layer GCN whose weights are drawn from a
fixed internal seed. The label function therefore depends only on the
feature width, never on the data seed.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graph import Graph, NodeSplit, _two_way

__all__ = [
    "barabasi_albert",
    "generate_synthetic",
    "generate_scaled",
    "generate_inductive",
    "label_with_gcn",
    "PRESETS",
    "LABELER_SEED",
]

LABELER_SEED = 271828
LABELER_HIDDEN = 16
BALANCE_FLOOR = 0.30
MAX_REDRAWS = 50

PRESETS = {
    "synthetic": (1000, 5),
    "s2": (1000, 20),
    "s3": (1000, 50),
    "s4": (50000, 5),
}


def barabasi_albert(n: int, m_attach: int = 2, seed: int = 0) -> np.ndarray:
    """Edge list of a preferential-attachment graph grown from an ``m``-clique.

    Every new node links to ``m`` distinct earlier nodes picked with
    probability proportional to degree (uniformly while all degrees are 0).
    """
    n, m = int(n), int(m_attach)
    if m < 1 or n <= m:
        raise ValueError(f"need n > m_attach >= 1, got n={n}, m_attach={m}")
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    # each node appears once per incident edge end
    ends = [v for e in edges for v in e]
    for new in range(m, n):
        targets: set[int] = set()
        while len(targets) < m:
            if ends:
                targets.add(ends[int(rng.integers(len(ends)))])
            else:
                targets.add(int(rng.integers(new)))
        for t in sorted(targets):
            edges.append((t, new))
            ends.extend((t, new))
    return np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def _gcn_operator(n: int, edges: np.ndarray) -> sp.csr_matrix:
    a = sp.csr_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    a = a + a.T + sp.identity(n, format="csr")
    dinv = 1.0 / np.sqrt(np.asarray(a.sum(axis=1)).ravel())
    return (sp.diags(dinv) @ a @ sp.diags(dinv)).tocsr()


def _labeler_weights(d: int, attempt: int):
    rng = np.random.default_rng([LABELER_SEED, d, attempt])
    w1 = rng.normal(size=(d, LABELER_HIDDEN))
    w2 = rng.normal(size=(LABELER_HIDDEN, 2))
    return w1, w2


def label_with_gcn(x: np.ndarray, edges: np.ndarray, attempt: int = 0) -> np.ndarray:
    """Argmax of the fixed two-layer labeler (ties go to class 0)."""
    op = _gcn_operator(x.shape[0], edges)
    w1, w2 = _labeler_weights(x.shape[1], attempt)
    h = np.maximum(op @ (x @ w1), 0.0)
    logits = op @ (h @ w2)
    return (logits[:, 1] > logits[:, 0]).astype(np.int64)


def _balanced_labels(x, edges):
    for attempt in range(MAX_REDRAWS):
        y = label_with_gcn(x, edges, attempt)
        if min(y.mean(), 1.0 - y.mean()) >= BALANCE_FLOOR:
            return y
    raise RuntimeError(
        f"labeler could not reach a {BALANCE_FLOOR:.0%} minority class in {MAX_REDRAWS} draws")


def generate_synthetic(n: int = 1000, d: int = 5, m_attach: int = 2, seed: int = 0,
                       name: str = "synthetic") -> Graph:
    if n < 10:
        raise ValueError("synthetic graphs need n >= 10")
    if d < 1:
        raise ValueError("need at least one feature")
    rng = np.random.default_rng([seed, 1])
    edges = barabasi_albert(n, m_attach, seed)
    x = rng.standard_normal((n, d))
    return Graph(x, _balanced_labels(x, edges), edges, 2, name=name)


def generate_scaled(preset: str, seed: int = 0) -> Graph:
    key = preset.lower()
    if key not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    n, d = PRESETS[key]
    return generate_synthetic(n, d, seed=seed, name=key)


def generate_inductive(n_train_component: int = 800, n_test_component: int = 200, d: int = 5,
                       seed: int = 0, m_attach: int = 2,
                       train_fraction: float = 0.75) -> tuple[Graph, NodeSplit]:
    """Two disconnected BA components; the second one is the test set.

    Nodes of the first component are split stratified into train and
    validation with ``train_fraction`` going to train.
    """
    n1, n2 = int(n_train_component), int(n_test_component)
    if n1 < 10 or n2 < 10:
        raise ValueError("both components need at least 10 nodes")
    rng = np.random.default_rng([seed, 1])
    e1 = barabasi_albert(n1, m_attach, seed)
    e2 = barabasi_albert(n2, m_attach, seed + 1_000_003) + n1
    edges = np.vstack([e1, e2])
    x = rng.standard_normal((n1 + n2, d))
    g = Graph(x, _balanced_labels(x, edges), edges, 2, name="inductive")
    split_rng = np.random.default_rng([seed, 2])
    first = np.arange(n1)
    by_class = [first[g.labels[:n1] == c] for c in range(2)]
    train, val = _two_way([ids for ids in by_class if ids.size], train_fraction, split_rng)
    split = NodeSplit(train, val, np.arange(n1, n1 + n2), "inductive")
    split.check_inductive(g)
    return g, split
