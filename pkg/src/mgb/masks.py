"""Missingness indicator matrices and the imputation front-ends."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Mask",
    "apply_zero_pad",
    "apply_column_statistic",
    "mim_augment",
    "build_input",
    "save_mask",
    "load_mask",
    "IMPUTATIONS",
]

IMPUTATIONS = ("zero", "mean", "median", "mim")


@dataclass(frozen=True, eq=False)
class Mask:
    """Binary n x d indicator, 1 where the feature entry is missing."""

    bits: np.ndarray
    mechanism_tag: str = "none"
    seed: int = 0

    def __post_init__(self):
        b = np.array(self.bits, copy=True)
        if b.ndim != 2:
            raise ValueError("mask bits must be a 2-D matrix")
        if b.dtype != bool:
            if not np.isin(b, (0, 1)).all():
                raise ValueError("mask bits must be 0/1")
            b = b.astype(bool)
        b.flags.writeable = False
        object.__setattr__(self, "bits", b)

    @classmethod
    def empty(cls, shape, tag: str = "none") -> "Mask":
        return cls(np.zeros(shape, dtype=bool), tag, 0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    @property
    def realized_rate(self) -> float:
        if self.bits.size == 0:
            return 0.0
        return float(self.bits.mean())

    def rate_on(self, rows) -> float:
        sub = self.bits[np.asarray(rows)]
        return float(sub.mean()) if sub.size else 0.0

    def __or__(self, other: "Mask") -> "Mask":
        return Mask(self.bits | other.bits, f"{self.mechanism_tag}|{other.mechanism_tag}", self.seed)

    def __eq__(self, other):
        if not isinstance(other, Mask):
            return NotImplemented
        return (np.array_equal(self.bits, other.bits)
                and self.mechanism_tag == other.mechanism_tag
                and self.seed == other.seed)

    __hash__ = object.__hash__


def _check(features, m: Mask) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)
    if x.shape != m.shape:
        raise ValueError(f"feature shape {x.shape} does not match mask shape {m.shape}")
    return x


def apply_zero_pad(features, m: Mask) -> np.ndarray:
    x = _check(features, m)
    return np.where(m.bits, 0.0, x)


def apply_column_statistic(features, m: Mask, statistic: str = "mean") -> np.ndarray:
    """Fill each column's missing entries with a statistic of its observed entries.

    A column with no observed entry is filled with 0.
    """
    x = _check(features, m)
    if statistic not in ("mean", "median"):
        raise ValueError(f"unknown statistic {statistic!r}")
    out = x.copy()
    for j in range(x.shape[1]):
        miss = m.bits[:, j]
        if not miss.any():
            continue
        observed = x[~miss, j]
        if observed.size == 0:
            fill = 0.0
        elif statistic == "mean":
            fill = float(observed.mean())
        else:
            fill = float(np.median(observed))
        out[miss, j] = fill
    return out


def mim_augment(features, m: Mask) -> np.ndarray:
    """Zero-padded features followed by the mask bits: an n x 2d matrix."""
    return np.hstack([apply_zero_pad(features, m), m.bits.astype(np.float64)])


def build_input(features, m: Mask, imputation: str) -> np.ndarray:
    """Model input matrix for one of ``IMPUTATIONS``."""
    if imputation == "zero":
        return apply_zero_pad(features, m)
    if imputation in ("mean", "median"):
        return apply_column_statistic(features, m, imputation)
    if imputation == "mim":
        return mim_augment(features, m)
    raise ValueError(f"unknown imputation {imputation!r}")


def save_mask(m: Mask, path) -> None:
    """Write ``path`` (CSV of 0/1) and ``path`` + ``.json`` metadata."""
    path = Path(path)
    d = m.shape[1]
    lines = [",".join(f"m{j}" for j in range(d))]
    lines.extend(",".join("1" if b else "0" for b in row) for row in m.bits)
    path.write_text("\n".join(lines) + "\n")
    meta = {"mechanism_tag": m.mechanism_tag, "seed": int(m.seed),
            "realized_rate": m.realized_rate, "shape": list(m.shape)}
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def load_mask(path) -> Mask:
    path = Path(path)
    rows = path.read_text().splitlines()
    meta = json.loads(Path(str(path) + ".json").read_text())
    d = len(rows[0].split(",")) if rows and rows[0] else meta["shape"][1]
    body = [r for r in rows[1:] if r]
    bits = np.zeros((len(body), d), dtype=bool)
    for i, r in enumerate(body):
        cells = r.split(",")
        if len(cells) != d:
            raise ValueError(f"{path}: row {i} has {len(cells)} cells, expected {d}")
        bits[i] = [c == "1" for c in cells]
    m = Mask(bits, meta["mechanism_tag"], int(meta["seed"]))
    if abs(m.realized_rate - float(meta["realized_rate"])) > 1e-12:
        raise ValueError(f"{path}: realized_rate in metadata does not match the bits")
    return m
