"""Missingness generators and the train/test regimes.

Every generator is a pure function of its inputs and seed. The kind name is
mixed into the random stream, so two mechanisms given the same seed do not
share uniforms.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import cart
from .graph import Graph, NodeSplit
from .masks import Mask
from .stats import mi_binned, quantile

__all__ = [
    "KINDS",
    "MechanismSpec",
    "RegimeSpec",
    "gen_umcar",
    "gen_smcar",
    "gen_ldmcar",
    "gen_fdmnar",
    "gen_cdmnar",
    "generate",
    "realize_regime",
    "ld_column_rates",
    "hi_lo_rates",
    "fd_column_rates",
    "cd_informative",
]

KINDS = ("UMCAR", "SMCAR", "LDMCAR", "FDMNAR", "CDMNAR")
_KIND_CODE = {k: i for i, k in enumerate(KINDS)}
_ALIASES = {k.lower().replace("mcar", "-mcar").replace("mnar", "-mnar"): k for k in KINDS}


def normalize_kind(kind: str) -> str:
    k = str(kind).strip()
    if k.upper() in _KIND_CODE:
        return k.upper()
    if k.lower() in _ALIASES:
        return _ALIASES[k.lower()]
    raise ValueError(f"unknown mechanism kind {kind!r}")


def _rng(kind: str, seed: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), _KIND_CODE[kind]])


def _check_rate(mu: float) -> float:
    mu = float(mu)
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"target rate must lie in [0, 1], got {mu}")
    return mu


def _features(g) -> np.ndarray:
    if isinstance(g, Graph):
        return g.features
    return np.asarray(g, dtype=np.float64)


def _fully_observed(g, kind: str) -> np.ndarray:
    if isinstance(g, Graph) and g.has_absent:
        raise ValueError(f"{kind} needs fully observed features")
    x = _features(g)
    if np.isnan(x).any():
        raise ValueError(f"{kind} needs fully observed features")
    return x


def _fmt(v: float) -> str:
    return f"{v:g}"


@dataclass(frozen=True)
class MechanismSpec:
    kind: str
    target_rate: float
    tau: float = 0.75
    hi_lo_ratio: float = 4.0
    tree_depth: int = 3
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", normalize_kind(self.kind))
        object.__setattr__(self, "target_rate", _check_rate(self.target_rate))
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if not self.hi_lo_ratio > 1.0:
            raise ValueError("hi_lo_ratio must exceed 1")
        if int(self.tree_depth) < 1:
            raise ValueError("tree_depth must be at least 1")
        object.__setattr__(self, "tree_depth", int(self.tree_depth))
        object.__setattr__(self, "seed", int(self.seed))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MechanismSpec":
        known = {"kind", "target_rate", "tau", "hi_lo_ratio", "tree_depth", "seed"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown mechanism fields: {sorted(extra)}")
        return cls(**d)

    def with_seed(self, seed: int) -> "MechanismSpec":
        return MechanismSpec(self.kind, self.target_rate, self.tau, self.hi_lo_ratio,
                             self.tree_depth, seed)

    def same_process(self, other: "MechanismSpec") -> bool:
        """Equal in everything but the seed."""
        return self.with_seed(0) == other.with_seed(0)


@dataclass(frozen=True)
class RegimeSpec:
    train_mech: MechanismSpec
    test_mech: MechanismSpec
    regime: str = "R1"

    def __post_init__(self):
        if self.regime not in ("R1", "R2"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.regime == "R1" and not self.train_mech.same_process(self.test_mech):
            raise ValueError("R1 needs identical train and test mechanisms")

    def to_dict(self) -> dict:
        return {"regime": self.regime, "train_mech": self.train_mech.to_dict(),
                "test_mech": self.test_mech.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "RegimeSpec":
        return cls(MechanismSpec.from_dict(d["train_mech"]),
                   MechanismSpec.from_dict(d["test_mech"]), d.get("regime", "R1"))


# -- MCAR ---------------------------------------------------------------

def gen_umcar(g, mu: float, seed: int = 0) -> Mask:
    mu = _check_rate(mu)
    shape = _features(g).shape
    bits = _rng("UMCAR", seed).random(shape) < mu
    return Mask(bits, f"UMCAR(mu={_fmt(mu)})", seed)


def gen_smcar(g, mu: float, seed: int = 0) -> Mask:
    """Whole rows of exactly ``round(mu * n)`` nodes."""
    mu = _check_rate(mu)
    n, d = _features(g).shape
    k = int(round(mu * n))
    rows = _rng("SMCAR", seed).choice(n, size=k, replace=False)
    bits = np.zeros((n, d), dtype=bool)
    bits[rows] = True
    return Mask(bits, f"SMCAR(mu={_fmt(mu)})", seed)


def ld_column_rates(mi, mu: float, iters: int = 200) -> np.ndarray:
    """Per-column rates ``clip(rho * mi, 0, 1)`` whose mean is ``mu``.

    ``rho`` is found by bisection. When the columns with positive ``mi`` all
    saturate before the mean reaches ``mu``, every one of them is set to 1.
    """
    mi = np.asarray(mi, dtype=np.float64)
    mu = _check_rate(mu)
    if mu == 0.0 or not (mi > 0).any():
        return np.zeros_like(mi)

    def mean_rate(rho):
        return float(np.clip(rho * mi, 0.0, 1.0).mean())

    hi = 1.0 / mi[mi > 0].min()
    if mean_rate(hi) <= mu:
        return np.clip(hi * mi, 0.0, 1.0)
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mean_rate(mid) < mu:
            lo = mid
        else:
            hi = mid
    return np.clip(0.5 * (lo + hi) * mi, 0.0, 1.0)


def gen_ldmcar(g: Graph, mu: float, seed: int = 0, bins: int = 10) -> Mask:
    """Column-wise MCAR with rates proportional to each column's label information."""
    mu = _check_rate(mu)
    x = _fully_observed(g, "LDMCAR")
    mi = np.array([mi_binned(x[:, j], g.labels, bins) for j in range(x.shape[1])])
    tag = f"LDMCAR(mu={_fmt(mu)})"
    if mu > 0 and not (mi > 0).any():
        m = gen_umcar(g, mu, seed)
        return Mask(m.bits, tag + "[fallback=UMCAR:zero-mi]", seed)
    p = ld_column_rates(mi, mu)
    bits = _rng("LDMCAR", seed).random(x.shape) < p[None, :]
    return Mask(bits, tag, seed)


# -- MNAR ---------------------------------------------------------------

def hi_lo_rates(mu: float, p: float, ratio: float) -> tuple[float, float]:
    """(mu_lo, mu_hi) with ``p * mu_hi + (1 - p) * mu_lo = mu``.

    Normally ``mu_hi = ratio * mu_lo``. If that would push ``mu_hi`` above 1
    it is clamped there and ``mu_lo`` absorbs the rest.
    """
    mu = _check_rate(mu)
    if not 0.0 <= p <= 1.0:
        raise ValueError("fraction p must lie in [0, 1]")
    lo = mu / (p * ratio + 1.0 - p)
    hi = ratio * lo
    if hi > 1.0:
        hi = 1.0
        lo = (mu - p) / (1.0 - p)
    return lo, hi


def fd_column_rates(column, mu: float, tau: float, ratio: float):
    """Entry rates for one column and a degeneracy flag."""
    col = np.asarray(column, dtype=np.float64)
    q = quantile(col, tau)
    above = col >= q
    p = float(above.mean())
    if p >= 1.0:
        return np.full(col.shape, mu), True
    lo, hi = hi_lo_rates(mu, p, ratio)
    return np.where(above, hi, lo), False


def gen_fdmnar(g, mu: float, tau: float = 0.75, ratio: float = 4.0, seed: int = 0) -> Mask:
    """Entries at or above the column's tau-quantile go missing ``ratio`` times as often."""
    mu = _check_rate(mu)
    x = _fully_observed(g, "FDMNAR")
    probs = np.empty_like(x)
    degenerate = []
    for j in range(x.shape[1]):
        probs[:, j], flat = fd_column_rates(x[:, j], mu, tau, ratio)
        if flat:
            degenerate.append(j)
    bits = _rng("FDMNAR", seed).random(x.shape) < probs
    tag = f"FDMNAR(mu={_fmt(mu)},tau={_fmt(tau)},ratio={_fmt(ratio)})"
    if degenerate:
        tag += "[degenerate_cols=" + ";".join(map(str, degenerate)) + "]"
    return Mask(bits, tag, seed)


def cd_informative(x: np.ndarray, labels: np.ndarray, num_classes: int,
                   depth: int = 3, min_leaf: int = 5) -> np.ndarray:
    """Entries whose value meets a positive-path condition of their node's class tree.

    A condition counts for entry (i, j) when it tests feature ``j``; the test
    is made per condition, not per whole path.
    """
    inf = np.zeros(x.shape, dtype=bool)
    for c in range(num_classes):
        rows = labels == c
        if not rows.any():
            continue
        tree = cart.fit(x, rows.astype(np.int64), depth=depth, min_leaf=min_leaf)
        for path in cart.positive_paths(tree):
            for j, op, thr in path:
                col = x[rows, j]
                hit = col < thr if op == "<" else col >= thr
                inf[rows, j] |= hit
    return inf


def gen_cdmnar(g: Graph, mu: float, depth: int = 3, ratio: float = 4.0, seed: int = 0,
               min_leaf: int = 5) -> Mask:
    """Class-conditional MNAR driven by one-vs-rest tree conditions."""
    mu = _check_rate(mu)
    x = _fully_observed(g, "CDMNAR")
    tag = f"CDMNAR(mu={_fmt(mu)},depth={depth},ratio={_fmt(ratio)})"
    inf = cd_informative(x, g.labels, g.num_classes, depth, min_leaf)
    p = float(inf.mean())
    if p == 0.0:
        m = gen_umcar(g, mu, seed)
        return Mask(m.bits, tag + "[fallback=UMCAR:no-conditions]", seed)
    if p == 1.0:
        probs = np.full(x.shape, mu)
    else:
        lo, hi = hi_lo_rates(mu, p, ratio)
        probs = np.where(inf, hi, lo)
    bits = _rng("CDMNAR", seed).random(x.shape) < probs
    return Mask(bits, tag, seed)


def generate(spec: MechanismSpec, g: Graph) -> Mask:
    """Mask for ``g`` described by ``spec``."""
    k, mu, s = spec.kind, spec.target_rate, spec.seed
    if k == "UMCAR":
        return gen_umcar(g, mu, s)
    if k == "SMCAR":
        return gen_smcar(g, mu, s)
    if k == "LDMCAR":
        return gen_ldmcar(g, mu, s)
    if k == "FDMNAR":
        return gen_fdmnar(g, mu, spec.tau, spec.hi_lo_ratio, s)
    return gen_cdmnar(g, mu, spec.tree_depth, spec.hi_lo_ratio, s)


def realize_regime(g: Graph, split: NodeSplit, spec: RegimeSpec) -> Mask:
    """One mask: train and validation rows from the train mechanism, test rows from the test one.

    Both mechanisms are run on the whole graph so quantiles, trees and
    rates are defined on the same population; rows are then selected.
    """
    train = generate(spec.train_mech, g)
    if spec.regime == "R1":
        return train
    test = generate(spec.test_mech, g)
    bits = train.bits.copy()
    rows = split.test_ids
    bits[rows] = test.bits[rows]
    return Mask(bits, f"R2[{train.mechanism_tag}->{test.mechanism_tag}]", spec.train_mech.seed)
