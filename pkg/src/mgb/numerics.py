"""Reverse-mode gradients over a small fixed set of dense matrix primitives.

Values live in float64 numpy arrays. A :class:`Tape` records each primitive
together with a closure that pushes the output gradient back to its inputs;
:meth:`Tape.backward` replays the closures in reverse order.

    tape = Tape()
    h = tape.relu(tape.add_row_bias(tape.matmul(x, w), b))
    loss = tape.cross_entropy_mean(h, targets)
    gw, gb = tape.backward(loss, [w, b])
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

__all__ = ["Tensor", "Tape", "NonFiniteError", "Adam", "adam_step"]


class NonFiniteError(ArithmeticError):
    """Raised when a primitive produces NaN or infinity."""


class Tensor:
    """A 2-D float64 value, optionally a trainable leaf."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad: bool = False):
        a = np.array(data, dtype=np.float64)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        elif a.ndim == 1:
            a = a.reshape(1, -1)
        elif a.ndim != 2:
            raise ValueError("Tensor holds 2-D data only")
        self.data = a
        self.requires_grad = requires_grad
        self.grad = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def item(self) -> float:
        if self.data.size != 1:
            raise ValueError("item() needs a 1 x 1 tensor")
        return float(self.data[0, 0])

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


def _as_tensor(a) -> Tensor:
    return a if isinstance(a, Tensor) else Tensor(a)


def _finite(name: str, a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name} produced a non-finite value")


class Tape:
    """Records primitives for one forward pass."""

    def __init__(self, record: bool = True):
        self.record = record
        self._ops: list[tuple[Tensor, tuple[Tensor, ...], object]] = []
        self._outputs: set[int] = set()

    def __len__(self):
        return len(self._ops)

    def _push(self, name, out_data, inputs, backward):
        _finite(name, out_data)
        out = Tensor(out_data, requires_grad=any(t.requires_grad for t in inputs))
        if self.record and out.requires_grad:
            self._ops.append((out, inputs, backward))
            self._outputs.add(id(out))
        return out

    # -- primitives ---------------------------------------------------

    def matmul(self, a, b) -> Tensor:
        a, b = _as_tensor(a), _as_tensor(b)
        if a.cols != b.rows:
            raise ValueError(f"matmul shape mismatch {a.shape} @ {b.shape}")

        def back(g):
            return g @ b.data.T, a.data.T @ g

        return self._push("matmul", a.data @ b.data, (a, b), back)

    def propagate(self, op, h) -> Tensor:
        """Left-multiply by a constant (dense or sparse) n x n operator."""
        h = _as_tensor(h)
        if op.shape[1] != h.rows:
            raise ValueError(f"operator shape {op.shape} does not fit {h.shape}")
        op_t = op.T.tocsr() if sp.issparse(op) else op.T

        def back(g):
            return (np.asarray(op_t @ g),)

        return self._push("propagate", np.asarray(op @ h.data), (h,), back)

    def add_row_bias(self, a, b) -> Tensor:
        a, b = _as_tensor(a), _as_tensor(b)
        if b.shape != (1, a.cols):
            raise ValueError(f"bias shape {b.shape} does not fit {a.shape}")

        def back(g):
            return g, g.sum(axis=0, keepdims=True)

        return self._push("add_row_bias", a.data + b.data, (a, b), back)

    def add(self, a, b) -> Tensor:
        a, b = _as_tensor(a), _as_tensor(b)
        if a.shape != b.shape:
            raise ValueError(f"add shape mismatch {a.shape} + {b.shape}")
        return self._push("add", a.data + b.data, (a, b), lambda g: (g, g))

    def scale(self, a, s: float) -> Tensor:
        a = _as_tensor(a)
        s = float(s)
        return self._push("scale", a.data * s, (a,), lambda g: (g * s,))

    def relu(self, a) -> Tensor:
        a = _as_tensor(a)
        on = a.data > 0
        return self._push("relu", np.where(on, a.data, 0.0), (a,), lambda g: (g * on,))

    def row_softmax(self, a) -> Tensor:
        a = _as_tensor(a)
        z = a.data - a.data.max(axis=1, keepdims=True)
        e = np.exp(z)
        s = e / e.sum(axis=1, keepdims=True)

        def back(g):
            return (s * (g - (g * s).sum(axis=1, keepdims=True)),)

        return self._push("row_softmax", s, (a,), back)

    def concat_cols(self, a, b) -> Tensor:
        a, b = _as_tensor(a), _as_tensor(b)
        if a.rows != b.rows:
            raise ValueError(f"concat row mismatch {a.shape} | {b.shape}")
        k = a.cols

        def back(g):
            return g[:, :k], g[:, k:]

        return self._push("concat_cols", np.hstack([a.data, b.data]), (a, b), back)

    def take_rows(self, a, rows) -> Tensor:
        a = _as_tensor(a)
        rows = np.asarray(rows, dtype=np.int64)

        def back(g):
            out = np.zeros_like(a.data)
            np.add.at(out, rows, g)
            return (out,)

        return self._push("take_rows", a.data[rows], (a,), back)

    def cross_entropy_mean(self, logits, targets) -> Tensor:
        """Mean of -log softmax(logits)[target] over rows."""
        logits = _as_tensor(logits)
        t = np.asarray(targets, dtype=np.int64).ravel()
        k, c = logits.shape
        if k == 0:
            raise ValueError("cross entropy of an empty batch")
        if t.shape[0] != k:
            raise ValueError("one target per row required")
        if t.min() < 0 or t.max() >= c:
            raise ValueError("target class out of range")
        z = logits.data - logits.data.max(axis=1, keepdims=True)
        lse = np.log(np.exp(z).sum(axis=1))
        nll = lse - z[np.arange(k), t]
        loss = np.array([[nll.mean()]])

        def back(g):
            p = np.exp(z - lse[:, None])
            p[np.arange(k), t] -= 1.0
            return (p * (g[0, 0] / k),)

        return self._push("cross_entropy_mean", loss, (logits,), back)

    # -- reverse pass -------------------------------------------------

    def backward(self, loss: Tensor, params, grad_output: float = 1.0) -> list[np.ndarray]:
        """Gradients of ``loss`` with respect to each tensor in ``params``."""
        if loss.data.shape != (1, 1):
            raise ValueError("backward needs a scalar (1 x 1) loss")
        if id(loss) not in self._outputs:
            raise ValueError("loss was not produced on this tape")
        grads: dict[int, np.ndarray] = {id(loss): np.full((1, 1), float(grad_output))}
        for out, inputs, back in reversed(self._ops):
            g = grads.pop(id(out), None)
            if g is None:
                continue
            for t, gi in zip(inputs, back(g)):
                if not t.requires_grad:
                    continue
                key = id(t)
                if key in grads:
                    grads[key] = grads[key] + gi
                else:
                    grads[key] = gi
        out = []
        for p in params:
            g = grads.get(id(p))
            out.append(np.zeros_like(p.data) if g is None else np.asarray(g))
        for p, g in zip(params, out):
            p.grad = g
        return out


def adam_step(params, grads, state: dict, lr: float, beta1: float = 0.9,
              beta2: float = 0.999, eps: float = 1e-8, weight_decay: float = 0.0) -> None:
    """One Adam update in place, with decoupled weight decay applied first.

    ``state`` maps ``id(param)`` to its moment estimates and step count and is
    filled on first use.
    """
    for p, g in zip(params, grads):
        g = np.asarray(g, dtype=np.float64)
        if g.shape != p.data.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter {p.data.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteError("non-finite gradient passed to adam_step")
        st = state.get(id(p))
        if st is None:
            st = state[id(p)] = {"t": 0, "m": np.zeros_like(p.data), "v": np.zeros_like(p.data)}
        st["t"] += 1
        t = st["t"]
        st["m"] = beta1 * st["m"] + (1.0 - beta1) * g
        st["v"] = beta2 * st["v"] + (1.0 - beta2) * g * g
        m_hat = st["m"] / (1.0 - beta1 ** t)
        v_hat = st["v"] / (1.0 - beta2 ** t)
        if weight_decay:
            p.data -= lr * weight_decay * p.data
        p.data -= lr * m_hat / (np.sqrt(v_hat) + eps)


class Adam:
    """Thin stateful wrapper around :func:`adam_step`."""

    def __init__(self, params, lr=1e-3, weight_decay=0.0, betas=(0.9, 0.999), eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.weight_decay = weight_decay
        self.betas = betas
        self.eps = eps
        self.state: dict = {}

    def step(self, grads) -> None:
        adam_step(self.params, grads, self.state, self.lr, self.betas[0], self.betas[1],
                  self.eps, self.weight_decay)
