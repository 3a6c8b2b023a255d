"""Macro-F1 and aggregation of run reports over seeds."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

__all__ = ["confusion_matrix", "macro_f1", "RunReport", "aggregate", "mean_std"]


def confusion_matrix(predictions, truths, num_classes: int) -> np.ndarray:
    """C x C counts, rows = truth, columns = prediction."""
    p = np.asarray(predictions, dtype=np.int64).ravel()
    t = np.asarray(truths, dtype=np.int64).ravel()
    if p.size != t.size:
        raise ValueError("predictions and truths differ in length")
    if p.size == 0:
        raise ValueError("macro-F1 of an empty set")
    for a in (p, t):
        if a.min() < 0 or a.max() >= num_classes:
            raise ValueError(f"class id outside [0, {num_classes})")
    cm = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(cm, (t, p), 1)
    return cm


def macro_f1(predictions, truths, num_classes: int) -> float:
    """Unweighted mean of per-class F1 over all ``num_classes`` classes.

    F1 of a class is 2 TP / (2 TP + FP + FN), and 0 when that is 0/0.
    """
    cm = confusion_matrix(predictions, truths, num_classes)
    tp = np.diag(cm).astype(np.float64)
    fp = cm.sum(axis=0) - tp
    fn = cm.sum(axis=1) - tp
    denom = 2 * tp + fp + fn
    f1 = np.divide(2 * tp, denom, out=np.zeros_like(tp), where=denom > 0)
    return float(f1.mean())


@dataclass
class RunReport:
    dataset_id: str
    mechanism: str
    regime: str
    mu_train: float
    mu_test: float
    seed: int
    layer_kind: str
    layers: int
    imputation: str
    lr: float
    weight_decay: float
    test_macro_f1: float
    val_macro_f1: float
    realized_rate: float
    epochs: int
    seconds: float
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("test_macro_f1", "val_macro_f1"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [0, 1]")
        for name in ("mu_train", "mu_test", "realized_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [0, 1]")

    def setting(self) -> tuple:
        """Everything that identifies a cell except the seed."""
        return (self.dataset_id, self.mechanism, self.regime, self.mu_train, self.mu_test,
                self.imputation)

    def row(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        return d


def aggregate(reports, key: str = "test_macro_f1") -> tuple[float, float]:
    """(mean, sample std) of ``key`` over reports of a single setting."""
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to aggregate")
    settings = {r.setting() for r in reports}
    if len(settings) > 1:
        raise ValueError(f"reports mix {len(settings)} settings")
    vals = [float(getattr(r, key)) for r in reports]
    return mean_std(vals)


def mean_std(values) -> tuple[float, float]:
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("nothing to aggregate")
    mean = math.fsum(vals) / len(vals)
    if len(vals) == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return mean, math.sqrt(var)
