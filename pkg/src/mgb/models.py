"""GCN, GraphSAGE and GIN encoders with full-batch training and grid search.

A model is a list of layers; each layer is a list of parameter tensors:

* GCN:  ``[W, b]`` with ``H' = A_hat H W + b``
* SAGE: ``[W, b]`` with ``H' = [H | mean_nbr(H)] W + b``
* GIN:  ``[W1, b1, W2, b2]`` with ``H' = relu((I + A) H W1 + b1) W2 + b2``

Hidden layers are followed by ReLU; the last layer emits raw logits.
"""
from __future__ import annotations

import json
import struct
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .graph import Graph, NodeSplit
from .masks import IMPUTATIONS, Mask, build_input
from .metrics import macro_f1
from .numerics import Adam, NonFiniteError, Tape, Tensor

__all__ = [
    "LAYER_KINDS",
    "ModelConfig",
    "TrainedModel",
    "TrainingError",
    "GridCell",
    "layer_forward",
    "operator_for",
    "init_params",
    "forward",
    "train",
    "grid_search",
    "predict",
    "logits",
    "evaluate",
    "save_model",
    "load_model",
    "DEFAULT_LRS",
    "DEFAULT_WEIGHT_DECAYS",
    "DEFAULT_LAYER_COUNTS",
]

LAYER_KINDS = ("GCN", "SAGE", "GIN")
GIN_MLP_WIDTH = 64
DEFAULT_LRS = (1e-4, 1e-3, 1e-2)
DEFAULT_WEIGHT_DECAYS = (1e-5, 1e-4, 1e-3)
DEFAULT_LAYER_COUNTS = (1, 2, 3)

_MAGIC = b"MGBM"


class TrainingError(RuntimeError):
    """A run that could not finish; the message names the epoch and config."""


def _norm_kind(kind: str) -> str:
    k = str(kind).upper()
    if k == "GRAPHSAGE":
        k = "SAGE"
    if k not in LAYER_KINDS:
        raise ValueError(f"unknown layer kind {kind!r}")
    return k


def _norm_imputation(imp: str) -> str:
    i = str(imp).lower()
    if i not in IMPUTATIONS:
        raise ValueError(f"unknown imputation {imp!r}")
    return i


@dataclass(frozen=True)
class ModelConfig:
    layer_kind: str = "GCN"
    num_layers: int = 2
    hidden_dim: int = 64
    imputation: str = "mim"
    lr: float = 1e-2
    weight_decay: float = 1e-4
    max_epochs: int = 500
    patience: int = 50
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "layer_kind", _norm_kind(self.layer_kind))
        object.__setattr__(self, "imputation", _norm_imputation(self.imputation))
        if self.num_layers not in (1, 2, 3):
            raise ValueError("num_layers must be 1, 2 or 3")
        if not 1e-4 <= self.lr <= 1e-2:
            raise ValueError(f"lr {self.lr} outside [1e-4, 1e-2]")
        if not 1e-5 <= self.weight_decay <= 1e-3:
            raise ValueError(f"weight_decay {self.weight_decay} outside [1e-5, 1e-3]")
        if self.hidden_dim < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("hidden_dim, max_epochs and patience must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)

    def short(self) -> str:
        return (f"{self.layer_kind}x{self.num_layers}/{self.imputation}"
                f"/lr={self.lr:g}/wd={self.weight_decay:g}/seed={self.seed}")


@dataclass
class TrainedModel:
    config: ModelConfig
    params: list  # per layer, list of ndarrays
    input_width: int
    num_classes: int
    best_val_f1: float = 0.0
    epochs_run: int = 0
    best_epoch: int = 0
    history: dict = field(default_factory=dict)

    def shapes(self) -> list[list[tuple[int, int]]]:
        return [[tuple(p.shape) for p in layer] for layer in self.params]


def input_width(imputation: str, d: int) -> int:
    return 2 * d if _norm_imputation(imputation) == "mim" else d


def operator_for(kind: str, g: Graph):
    kind = _norm_kind(kind)
    if kind == "GCN":
        return g.gcn_operator
    if kind == "SAGE":
        return g.mean_operator
    return g.gin_operator


def _glorot(rng, fan_in, fan_out):
    a = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-a, a, size=(fan_in, fan_out))


def init_params(kind: str, widths, seed: int) -> list[list[np.ndarray]]:
    """Glorot-uniform weights and zero biases for consecutive ``widths``."""
    kind = _norm_kind(kind)
    rng = np.random.default_rng(seed)
    layers = []
    for w_in, w_out in zip(widths[:-1], widths[1:]):
        if kind == "GCN":
            layers.append([_glorot(rng, w_in, w_out), np.zeros((1, w_out))])
        elif kind == "SAGE":
            layers.append([_glorot(rng, 2 * w_in, w_out), np.zeros((1, w_out))])
        else:
            layers.append([_glorot(rng, w_in, GIN_MLP_WIDTH), np.zeros((1, GIN_MLP_WIDTH)),
                           _glorot(rng, GIN_MLP_WIDTH, w_out), np.zeros((1, w_out))])
    return layers


def layer_forward(kind: str, h, op, params, tape: Tape | None = None, final: bool = False):
    """One message-passing layer; ReLU unless ``final``.

    ``params`` holds Tensors (or arrays); the result is a Tensor recorded on
    ``tape`` when one is given.
    """
    kind = _norm_kind(kind)
    t = tape if tape is not None else Tape(record=False)
    if kind == "GCN":
        w, b = params
        out = t.add_row_bias(t.propagate(op, t.matmul(h, w)), b)
    elif kind == "SAGE":
        w, b = params
        out = t.add_row_bias(t.matmul(t.concat_cols(h, t.propagate(op, h)), w), b)
    else:
        w1, b1, w2, b2 = params
        z = t.relu(t.add_row_bias(t.matmul(t.propagate(op, h), w1), b1))
        out = t.add_row_bias(t.matmul(z, w2), b2)
    return out if final else t.relu(out)


def forward(kind: str, x, op, params, tape: Tape | None = None):
    h = x
    last = len(params) - 1
    for i, layer in enumerate(params):
        h = layer_forward(kind, h, op, layer, tape, final=(i == last))
    return h


def _tensors(params):
    return [[Tensor(p, requires_grad=True) for p in layer] for layer in params]


def _flat(layers):
    return [p for layer in layers for p in layer]


def _snapshot(layers):
    return [[p.data.copy() for p in layer] for layer in layers]


def train(g: Graph, split: NodeSplit, mask: Mask, config: ModelConfig) -> TrainedModel:
    """Full-batch Adam with early stopping on validation macro-F1.

    The kept parameters are those of the epoch with the highest validation
    F1 (earliest on ties). The patience counter restarts whenever either the
    validation F1 or the validation loss reaches a new best, so a flat F1
    plateau with a still falling loss does not end the run.

    Validation scores come from the same forward pass as the training loss,
    i.e. before that epoch's update, so the stored parameters reproduce the
    stored score exactly.
    """
    if mask.shape != (g.num_nodes, g.num_features):
        raise ValueError(f"mask shape {mask.shape} does not match graph "
                         f"{(g.num_nodes, g.num_features)}")
    x = build_input(g.features, mask, config.imputation)
    op = operator_for(config.layer_kind, g)
    c = g.num_classes
    widths = [x.shape[1]] + [config.hidden_dim] * (config.num_layers - 1) + [c]
    layers = _tensors(init_params(config.layer_kind, widths, config.seed))
    flat = _flat(layers)
    opt = Adam(flat, lr=config.lr, weight_decay=config.weight_decay)
    y = g.labels
    tr, va = split.train_ids, split.val_ids
    y_tr, y_va = y[tr], y[va]

    best_f1, best_epoch, best = -1.0, 0, None
    best_val_loss, last_gain = np.inf, 0
    losses, val_scores = [], []
    epoch = 0
    for epoch in range(1, config.max_epochs + 1):
        try:
            tape = Tape()
            out = forward(config.layer_kind, x, op, layers, tape)
            loss = tape.cross_entropy_mean(tape.take_rows(out, tr), y_tr)
            f1 = macro_f1(np.argmax(out.data[va], axis=1), y_va, c)
            val_loss = _nll(out.data[va], y_va)
            if f1 > best_f1:
                best_f1, best_epoch, best = f1, epoch, _snapshot(layers)
                last_gain = epoch
            if val_loss < best_val_loss:
                best_val_loss = val_loss
                last_gain = epoch
            losses.append(loss.item())
            val_scores.append(f1)
            if epoch - last_gain >= config.patience:
                break
            grads = tape.backward(loss, flat)
            opt.step(grads)
        except NonFiniteError as exc:
            raise TrainingError(f"non-finite value at epoch {epoch} for {config.short()}: {exc}") \
                from exc
    return TrainedModel(config, best, x.shape[1], c, float(best_f1), epoch, best_epoch,
                        {"train_loss": losses, "val_f1": val_scores})


def _nll(z: np.ndarray, y: np.ndarray) -> float:
    z = z - z.max(axis=1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=1))
    return float(np.mean(lse - z[np.arange(len(y)), y]))


def logits(model: TrainedModel, g: Graph, mask: Mask) -> np.ndarray:
    x = build_input(g.features, mask, model.config.imputation)
    if x.shape[1] != model.input_width:
        raise ValueError(f"input width {x.shape[1]} differs from trained width {model.input_width}")
    op = operator_for(model.config.layer_kind, g)
    return forward(model.config.layer_kind, x, op, model.params).data


def predict(model: TrainedModel, g: Graph, mask: Mask) -> np.ndarray:
    """Arg-max class per node; ties go to the lowest class id."""
    return np.argmax(logits(model, g, mask), axis=1)


def evaluate(model: TrainedModel, g: Graph, mask: Mask, ids) -> float:
    ids = np.asarray(ids)
    return macro_f1(predict(model, g, mask)[ids], g.labels[ids], g.num_classes)


@dataclass
class GridCell:
    config: ModelConfig
    val_f1: float | None
    error: str | None = None
    seconds: float = 0.0


def _tie_key(cfg: ModelConfig, val: float):
    return (-val, cfg.num_layers, cfg.lr, cfg.weight_decay, LAYER_KINDS.index(cfg.layer_kind))


def grid_search(g: Graph, split: NodeSplit, mask: Mask, layer_kinds=LAYER_KINDS,
                layer_counts=DEFAULT_LAYER_COUNTS, lrs=DEFAULT_LRS,
                weight_decays=DEFAULT_WEIGHT_DECAYS, imputation: str = "mim", seed: int = 0,
                **overrides):
    """Train every grid cell; return ``(config, model, cells)`` for the best validation F1.

    Ties prefer fewer layers, then lower lr, lower weight decay, and the
    layer kind order GCN, SAGE, GIN. Cells that raise are kept in ``cells``
    with their error message and skipped.
    """
    grid = [ModelConfig(k, n, imputation=imputation, lr=lr, weight_decay=wd, seed=seed,
                        **overrides)
            for k in layer_kinds for n in layer_counts for lr in lrs for wd in weight_decays]
    if not grid:
        raise ValueError("empty hyperparameter grid")
    cells, best = [], None
    for cfg in grid:
        t0 = time.perf_counter()
        try:
            model = train(g, split, mask, cfg)
        except (TrainingError, ValueError) as exc:
            cells.append(GridCell(cfg, None, str(exc), time.perf_counter() - t0))
            continue
        cells.append(GridCell(cfg, model.best_val_f1, None, time.perf_counter() - t0))
        if best is None or _tie_key(cfg, model.best_val_f1) < _tie_key(best.config,
                                                                        best.best_val_f1):
            best = model
    if best is None:
        raise TrainingError("every grid cell failed: " + "; ".join(c.error for c in cells))
    return best.config, best, cells


def save_model(model: TrainedModel, path) -> None:
    """Header (JSON) followed by every parameter as little-endian float64."""
    header = {
        "config": model.config.to_dict(),
        "shapes": model.shapes(),
        "input_width": model.input_width,
        "num_classes": model.num_classes,
        "best_val_f1": model.best_val_f1,
        "epochs_run": model.epochs_run,
        "best_epoch": model.best_epoch,
    }
    raw = json.dumps(header, sort_keys=True).encode()
    blob = b"".join(np.ascontiguousarray(p, dtype="<f8").tobytes()
                    for layer in model.params for p in layer)
    Path(path).write_bytes(_MAGIC + struct.pack("<I", len(raw)) + raw + blob)


def load_model(path) -> TrainedModel:
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise ValueError(f"{path}: not a model file")
    (size,) = struct.unpack("<I", data[4:8])
    header = json.loads(data[8:8 + size])
    buf = np.frombuffer(data[8 + size:], dtype="<f8")
    params, off = [], 0
    for layer_shapes in header["shapes"]:
        layer = []
        for r, c in layer_shapes:
            layer.append(buf[off:off + r * c].reshape(r, c).astype(np.float64))
            off += r * c
        params.append(layer)
    if off != buf.size:
        raise ValueError(f"{path}: parameter blob length does not match header shapes")
    return TrainedModel(ModelConfig.from_dict(header["config"]), params, header["input_width"],
                        header["num_classes"], header["best_val_f1"], header["epochs_run"],
                        header["best_epoch"])


def with_seed(cfg: ModelConfig, seed: int) -> ModelConfig:
    return replace(cfg, seed=seed)
