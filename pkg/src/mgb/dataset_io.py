"""Three-file CSV dataset layout and the results table.

A dataset directory holds::

    edges.csv     src,dst            one undirected pair per line
    features.csv  f0,...,f{d-1}      empty cell (or NaN) = missing
    labels.csv    y                  integer class id

Floats are written with ``repr`` so a save/load cycle is bit-exact.
"""
from __future__ import annotations

import csv
import fcntl
import io
import math
import os
from pathlib import Path

import numpy as np

from .graph import Graph
from .masks import Mask
from .metrics import RunReport

__all__ = ["load_dataset", "save_dataset", "append_results", "read_results", "RESULTS_COLUMNS",
           "SchemaError"]

RESULTS_COLUMNS = (
    "dataset_id", "mechanism", "regime", "mu_train", "mu_test", "seed", "layer_kind", "layers",
    "imputation", "lr", "weight_decay", "test_macro_f1", "val_macro_f1", "realized_rate",
    "epochs", "seconds",
)

_MISSING = {"", "nan", "NaN", "NAN"}


class SchemaError(ValueError):
    """A results file whose header is not the expected column list."""


def _rows(path: Path, header: list[str]) -> list[list[str]]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows or [c.strip() for c in rows[0]] != header:
        got = rows[0] if rows else []
        raise ValueError(f"{path}: expected header {','.join(header)}, got {','.join(got)}")
    return rows[1:]


def load_dataset(dir_path, name: str | None = None) -> tuple[Graph, Mask]:
    """Graph plus the native mask (1 where a feature cell is empty).

    The class count is inferred as ``max(label) + 1`` (at least 2).
    """
    root = Path(dir_path)
    if not root.is_dir():
        raise FileNotFoundError(f"{root}: not a dataset directory")
    ftext = (root / "features.csv").read_text()
    freader = list(csv.reader(io.StringIO(ftext)))
    if not freader or not freader[0]:
        raise ValueError(f"{root / 'features.csv'}: empty file")
    header = [c.strip() for c in freader[0]]
    d = len(header)
    if header != [f"f{j}" for j in range(d)]:
        raise ValueError(f"{root / 'features.csv'}: header must be f0..f{d - 1}")
    body = freader[1:]
    n = len(body)
    x = np.zeros((n, d))
    absent = np.zeros((n, d), dtype=bool)
    for i, row in enumerate(body):
        if not row:
            # a blank line is one empty cell: a fully missing row when d == 1
            row = [""]
        if len(row) != d:
            raise ValueError(f"{root / 'features.csv'}: row {i} has {len(row)} cells, expected {d}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell in _MISSING:
                absent[i, j] = True
                continue
            try:
                v = float(cell)
            except ValueError:
                raise ValueError(f"{root / 'features.csv'}: row {i} col {j}: "
                                 f"not a number {cell!r}") from None
            if math.isnan(v):
                absent[i, j] = True
            else:
                x[i, j] = v

    labels = []
    for i, row in enumerate(_rows(root / "labels.csv", ["y"])):
        if len(row) != 1:
            raise ValueError(f"{root / 'labels.csv'}: row {i} is ragged")
        try:
            labels.append(int(row[0].strip()))
        except ValueError:
            raise ValueError(f"{root / 'labels.csv'}: row {i}: non-integer label "
                             f"{row[0]!r}") from None
    if len(labels) != n:
        raise ValueError(f"{root}: {n} feature rows but {len(labels)} labels")

    edges = []
    for i, row in enumerate(_rows(root / "edges.csv", ["src", "dst"])):
        if len(row) != 2:
            raise ValueError(f"{root / 'edges.csv'}: row {i} is ragged")
        try:
            edges.append((int(row[0]), int(row[1])))
        except ValueError:
            raise ValueError(f"{root / 'edges.csv'}: row {i}: non-integer endpoint") from None

    g = Graph(x, np.asarray(labels, dtype=np.int64),
              np.asarray(edges, dtype=np.int64).reshape(-1, 2), None, absent,
              name=name or root.name)
    return g, Mask(absent, "native", 0)


def _cell(v: float) -> str:
    return repr(float(v))


def save_dataset(g: Graph, mask: Mask | None, dir_path) -> None:
    """Write the three CSVs; masked cells (and absent ones) are left empty."""
    root = Path(dir_path)
    missing = g.absent.copy()
    if mask is not None:
        if mask.shape != g.features.shape:
            raise ValueError("mask shape does not match the features")
        missing |= mask.bits
    try:
        root.mkdir(parents=True, exist_ok=True)
        lines = [",".join(f"f{j}" for j in range(g.num_features))]
        for xi, mi in zip(g.features, missing):
            lines.append(",".join("" if m else _cell(v) for v, m in zip(xi, mi)))
        (root / "features.csv").write_text("\n".join(lines) + "\n")
        (root / "labels.csv").write_text("y\n" + "".join(f"{int(v)}\n" for v in g.labels))
        (root / "edges.csv").write_text(
            "src,dst\n" + "".join(f"{int(a)},{int(b)}\n" for a, b in g.edges))
    except OSError as exc:
        raise OSError(f"{root}: cannot write dataset: {exc.strerror or exc}") from exc


def _format(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def append_results(report: RunReport, path) -> None:
    """Append one row under an exclusive lock; write the header on a new file."""
    row = report.row()
    values = [_format(row[c]) for c in RESULTS_COLUMNS]
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(values)
    line = buf.getvalue()
    path = Path(path)
    fd = os.open(path, os.O_RDWR | os.O_CREAT | os.O_APPEND, 0o644)
    try:
        fcntl.flock(fd, fcntl.LOCK_EX)
        size = os.fstat(fd).st_size
        if size == 0:
            os.write(fd, (",".join(RESULTS_COLUMNS) + "\n" + line).encode())
        else:
            with open(path, "r", newline="") as fh:
                head = fh.readline().rstrip("\r\n")
            if head.split(",") != list(RESULTS_COLUMNS):
                raise SchemaError(f"{path}: results header {head!r} does not match the schema")
            os.write(fd, line.encode())
    finally:
        fcntl.flock(fd, fcntl.LOCK_UN)
        os.close(fd)


_INT_COLS = {"seed", "layers", "epochs"}
_FLOAT_COLS = {"mu_train", "mu_test", "lr", "weight_decay", "test_macro_f1", "val_macro_f1",
               "realized_rate", "seconds"}


def read_results(path) -> list[dict]:
    """Rows of a results CSV with numeric columns converted."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            head = next(reader)
        except StopIteration:
            return []
        if head != list(RESULTS_COLUMNS):
            raise SchemaError(f"{path}: results header does not match the schema")
        out = []
        for k, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RESULTS_COLUMNS):
                raise SchemaError(f"{path}: line {k} has {len(row)} fields")
            rec = dict(zip(RESULTS_COLUMNS, row))
            try:
                for c in _INT_COLS:
                    rec[c] = int(rec[c])
                for c in _FLOAT_COLS:
                    rec[c] = float(rec[c])
            except ValueError:
                raise SchemaError(f"{path}: line {k} has a malformed number") from None
            out.append(rec)
    return out
