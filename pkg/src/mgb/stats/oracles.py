"""Exhaustive-enumeration checks of the ignorability and sparsity results.

A :class:`JointTable` holds the full joint P(X, Y, M) of a tiny problem with
binary features. States are integer codes:

* ``x`` and ``m``: bit ``k`` is cell ``k = i * d + j``;
* ``y``: base-``C`` digits, digit ``i`` is the label of node ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .info import binary_entropy

__all__ = [
    "JointTable",
    "random_xy",
    "mcar_table",
    "monotone_mar_table",
    "label_dependent_table",
    "random_mar_table",
    "verify_theorem1",
    "verify_theorem2",
    "MAX_CELLS",
]

MAX_CELLS = 6


@dataclass(frozen=True, eq=False)
class JointTable:
    probs: np.ndarray  # shape (2**K, C**n, 2**K), axes (x, y, m)
    n: int
    d: int
    num_classes: int

    def __post_init__(self):
        n, d, c = self.n, self.d, self.num_classes
        if n < 1 or d < 1 or c < 2:
            raise ValueError("need n >= 1, d >= 1, C >= 2")
        if n * d > MAX_CELLS:
            raise ValueError(f"n*d = {n * d} exceeds the enumeration bound {MAX_CELLS}")
        k = n * d
        p = np.asarray(self.probs, dtype=np.float64)
        if p.shape != (2 ** k, c ** n, 2 ** k):
            raise ValueError(f"probs shape {p.shape} does not match (n, d, C) = {(n, d, c)}")
        if (p < 0).any():
            raise ValueError("negative probability")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def cells(self) -> int:
        return self.n * self.d

    @property
    def p_xy(self) -> np.ndarray:
        return self.probs.sum(axis=2)

    def expected_sparsity(self) -> float:
        """E[s(X)]: expected fraction of zero cells."""
        k = self.cells
        px = self.p_xy.sum(axis=1)
        ones = np.array([bin(x).count("1") for x in range(2 ** k)])
        return float(px @ ((k - ones) / k))


def _dirichlet(rng, size, alpha=1.0):
    w = rng.gamma(alpha, size=size)
    return w / w.sum()


def random_xy(n: int, d: int, num_classes: int, rng, alpha: float = 1.0) -> np.ndarray:
    """Random P(X, Y) drawn from a symmetric Dirichlet."""
    k = n * d
    return _dirichlet(rng, 2 ** k * num_classes ** n, alpha).reshape(2 ** k, num_classes ** n)


def _finish(p_xy, p_m_given, n, d, c):
    probs = p_xy[:, :, None] * p_m_given
    probs = probs / probs.sum()
    return JointTable(probs, n, d, c)


def mcar_table(n, d, num_classes, rng) -> JointTable:
    """Mask distribution independent of (X, Y); not necessarily a product."""
    k = n * d
    q = _dirichlet(rng, 2 ** k)
    return _finish(random_xy(n, d, num_classes, rng), q[None, None, :], n, d, num_classes)


def monotone_mar_table(n, d, num_classes, rng) -> JointTable:
    """Monotone dropout whose hazard depends on the already observed cells.

    Cells are visited in a random order; once a cell drops out, every later
    cell is missing too. The hazard at step ``t`` is a function of the ``t``
    cells observed so far, so P(M | X, Y) depends on X_obs only.
    """
    k = n * d
    order = rng.permutation(k)
    # hazard[t][prefix code]; step k terminates with everything observed
    hazard = [rng.uniform(0.05, 0.95, size=2 ** t) for t in range(k)]
    p_m = np.zeros((2 ** k, 1, 2 ** k))
    for x in range(2 ** k):
        bits = [(x >> order[t]) & 1 for t in range(k)]
        stay = 1.0
        prefix = 0
        for t in range(k + 1):
            missing_cells = order[t:]
            m = int(sum(1 << int(c) for c in missing_cells))
            h = 1.0 if t == k else hazard[t][prefix]
            p_m[x, 0, m] += stay * h
            if t < k:
                stay *= 1.0 - h
                prefix |= bits[t] << t
    return _finish(random_xy(n, d, num_classes, rng), p_m, n, d, num_classes)


def random_mar_table(n, d, num_classes, rng) -> JointTable:
    """Alternate between the MCAR and monotone-MAR builders."""
    if rng.random() < 0.5:
        return mcar_table(n, d, num_classes, rng)
    return monotone_mar_table(n, d, num_classes, rng)


def label_dependent_table(n, d, num_classes, rng, rates=None) -> JointTable:
    """Cells go missing independently with a probability set by the node label.

    This breaks label-MAR; it is the negative control for the ignorability
    check.
    """
    k = n * d
    rates = rng.uniform(0.05, 0.95, size=num_classes) if rates is None else np.asarray(rates)
    p_m = np.zeros((1, num_classes ** n, 2 ** k))
    for y in range(num_classes ** n):
        lab = [(y // num_classes ** i) % num_classes for i in range(n)]
        for m in range(2 ** k):
            pr = 1.0
            for cell in range(k):
                r = rates[lab[cell // d]]
                pr *= r if (m >> cell) & 1 else 1.0 - r
            p_m[0, y, m] = pr
    return _finish(random_xy(n, d, num_classes, rng), p_m, n, d, num_classes)


def verify_theorem1(table: JointTable) -> dict:
    """Compare P(Y | X_obs, M) with the MAR-simplified predictive.

    The left side sums the full joint over the unobserved cells. The right
    side is sum over X_miss of P(Y | X) P(X_miss | X_obs), which never looks
    at the mask model. Returns the largest absolute difference over every
    (X_obs, M) of positive probability.
    """
    k = table.cells
    full = (1 << k) - 1
    probs = table.probs
    p_xy = table.p_xy
    p_x = p_xy.sum(axis=1)
    xs = np.arange(2 ** k)
    worst = 0.0
    for m in range(2 ** k):
        key = xs & (full & ~m)
        joint = np.zeros((2 ** k, p_xy.shape[1]))
        np.add.at(joint, key, probs[:, :, m])
        weight = np.zeros(2 ** k)
        np.add.at(weight, key, p_x)
        mar = np.zeros_like(joint)
        np.add.at(mar, key, p_xy)
        total = joint.sum(axis=1)
        live = total > 0
        if not live.any():
            continue
        lhs = joint[live] / total[live, None]
        rhs = mar[live] / weight[live, None]
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return {"max_discrepancy": worst}


def _mi_from_joint(joint: np.ndarray, py: np.ndarray) -> float:
    pa = joint.sum(axis=1)
    if np.count_nonzero(pa) <= 1:
        return 0.0
    rows, cols = np.nonzero(joint)
    j = joint[rows, cols]
    return float(np.sum(j * np.log(j / (pa[rows] * py[cols]))))


def verify_theorem2(table: JointTable, mu: float, tol: float = 1e-9) -> dict:
    """Exact information change under uniform MCAR masking with rate ``mu``.

    The table's own mask model is ignored; cells are masked independently
    with probability ``mu``. Returns ``delta`` = I(Y; X~) - I(Y; X), the
    sparsity-based ``lower_bound`` and whether both sides hold within ``tol``.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    k = table.cells
    p_xy = table.p_xy
    py = p_xy.sum(axis=0)
    i_full = _mi_from_joint(p_xy, py)

    # x~ digit per cell: 0/1 observed value, 2 for '?'
    pow3 = 3 ** np.arange(k)
    xs = np.arange(2 ** k)
    xbits = (xs[:, None] >> np.arange(k)) & 1
    joint = np.zeros((3 ** k, p_xy.shape[1]))
    for m in range(2 ** k):
        mbits = (m >> np.arange(k)) & 1
        nmiss = int(mbits.sum())
        w = mu ** nmiss * (1.0 - mu) ** (k - nmiss)
        if w == 0.0:
            continue
        codes = (np.where(mbits[None, :] == 1, 2, xbits) * pow3).sum(axis=1)
        # several x collapse onto one code once cells are hidden
        np.add.at(joint, codes, p_xy if w == 1.0 else w * p_xy)
    i_masked = _mi_from_joint(joint, py)
    delta = i_masked - i_full
    lower = -k * mu * binary_entropy(table.expected_sparsity())
    holds = (lower - tol <= delta) and (delta <= tol)
    return {"delta": delta, "lower_bound": lower, "holds": bool(holds),
            "i_full": i_full, "i_masked": i_masked}
