"""Entropy, binned mutual information, quantiles and curve areas.

All information quantities are in nats.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["binary_entropy", "entropy", "mi_binned", "equal_frequency_bins",
           "quantile", "auc_f1_curve"]


def binary_entropy(u: float) -> float:
    """h2(u) = -u log u - (1-u) log(1-u), with 0 log 0 = 0."""
    u = float(u)
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"binary entropy needs u in [0, 1], got {u}")
    h = 0.0
    if u > 0.0:
        h -= u * math.log(u)
    if u < 1.0:
        h -= (1.0 - u) * math.log1p(-u)
    return h


def entropy(p) -> float:
    """Shannon entropy of a probability vector (any shape)."""
    p = np.asarray(p, dtype=np.float64).ravel()
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def equal_frequency_bins(column, bins: int = 10) -> np.ndarray:
    """Bin index per entry using at most ``min(bins, #distinct)`` bins.

    With no more distinct values than bins, each value is its own bin.
    Otherwise bins are assigned by rank so that tied values always share a
    bin and each bin holds roughly ``n / bins`` entries.
    """
    x = np.asarray(column, dtype=np.float64).ravel()
    distinct, inverse = np.unique(x, return_inverse=True)
    if distinct.size <= bins:
        return inverse.astype(np.int64)
    counts = np.bincount(inverse)
    first_rank = np.concatenate([[0], np.cumsum(counts)[:-1]])
    b = (first_rank[inverse] * bins) // x.size
    _, b = np.unique(b, return_inverse=True)
    return b.astype(np.int64)


def mi_binned(column, labels, bins: int = 10) -> float:
    """Plug-in I(X_j; Y) after equal-frequency binning of the column."""
    x = np.asarray(column).ravel()
    y = np.asarray(labels).ravel()
    if x.size != y.size:
        raise ValueError("column and labels differ in length")
    if x.size < 2:
        raise ValueError("need at least two samples")
    xb = equal_frequency_bins(x, bins)
    _, yb = np.unique(y, return_inverse=True)
    joint = np.zeros((xb.max() + 1, yb.max() + 1))
    np.add.at(joint, (xb, yb), 1.0)
    joint /= x.size
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    mi = float((joint[nz] * np.log(joint[nz] / (px @ py)[nz])).sum())
    return max(mi, 0.0)


def quantile(values, tau: float) -> float:
    """Lower empirical quantile: sorted value at index ceil(tau n) - 1."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if v.size == 0:
        raise ValueError("quantile of an empty sequence")
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    # tolerance guards products like 0.7 * 10 = 7.000000000000001
    k = math.ceil(tau * v.size - 1e-9) - 1
    return float(v[min(max(k, 0), v.size - 1)])


def auc_f1_curve(points) -> float:
    """Trapezoidal area under F1(mu), divided by the mu range."""
    pts = [(float(m), float(f)) for m, f in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    mus = np.array([p[0] for p in pts])
    f1 = np.array([p[1] for p in pts])
    if np.any(np.diff(mus) <= 0):
        raise ValueError("mu values must be strictly increasing")
    if mus[0] < 0 or mus[-1] > 1:
        raise ValueError("mu values must lie in [0, 1]")
    area = float(np.sum(np.diff(mus) * (f1[1:] + f1[:-1]) / 2.0))
    return area / float(mus[-1] - mus[0])
