import multiprocessing as mp

import numpy as np
import pytest

from mgb.dataset_io import (RESULTS_COLUMNS, SchemaError, append_results, load_dataset,
                            read_results, save_dataset)
from mgb.graph import Graph
from mgb.masks import Mask
from mgb.metrics import RunReport


def _write(root, features, labels="y\n0\n1\n", edges="src,dst\n0,1\n"):
    root.mkdir(parents=True, exist_ok=True)
    (root / "features.csv").write_text(features)
    (root / "labels.csv").write_text(labels)
    (root / "edges.csv").write_text(edges)
    return root


def _report(seed=0, f1=0.5):
    return RunReport("syn", "UMCAR", "R1", 0.1, 0.1, seed, "GCN", 2, "mim", 0.01, 1e-4, f1, f1,
                     0.1, 7, 0.0)


def test_empty_cell_is_missing(tmp_path):
    root = _write(tmp_path / "d", "f0,f1,f2\n1.5,,2.0\nNaN,3,nan\n")
    g, m = load_dataset(root)
    assert m.bits.astype(int).tolist() == [[0, 1, 0], [1, 0, 1]]
    assert g.features.tolist() == [[1.5, 0.0, 2.0], [0.0, 3.0, 0.0]]
    assert m.mechanism_tag == "native" and np.array_equal(g.absent, m.bits)


def test_duplicate_edges_collapse(tmp_path):
    root = _write(tmp_path / "d", "f0\n1\n2\n3\n", "y\n0\n1\n0\n",
                  "src,dst\n0,1\n1,0\n0,1\n1,2\n")
    g, _ = load_dataset(root)
    assert g.edges.tolist() == [[0, 1], [1, 2]]


def test_four_node_fixture_round_trip(tmp_path):
    text = "f0,f1\n0.1,-2.5\n,3.0\n1e-300,\n4.0,5.0\n"
    root = _write(tmp_path / "a", text, "y\n0\n1\n1\n0\n", "src,dst\n0,1\n1,2\n2,3\n")
    g, m = load_dataset(root)
    assert g.num_nodes == 4 and g.num_features == 2 and g.num_classes == 2
    save_dataset(g, m, tmp_path / "b")
    for name in ("features.csv", "labels.csv", "edges.csv"):
        assert (tmp_path / "b" / name).read_text() == (root / name).read_text()


def test_save_layout(tmp_path):
    g = Graph(np.arange(6.0).reshape(3, 2), [0, 1, 0], [(0, 1)])
    save_dataset(g, None, tmp_path / "a")
    text = (tmp_path / "a" / "features.csv").read_text()
    assert text.splitlines()[0] == "f0,f1" and ",," not in text and ",\n" not in text
    bits = np.zeros((3, 2), dtype=bool)
    bits[:, 1] = True
    save_dataset(g, Mask(bits), tmp_path / "b")
    rows = (tmp_path / "b" / "features.csv").read_text().splitlines()[1:]
    assert all(r.endswith(",") for r in rows)


def _random_fixture(rng):
    n, d = int(rng.integers(2, 12)), int(rng.integers(1, 5))
    c = int(rng.integers(2, 4))
    x = rng.normal(size=(n, d)) * 10.0 ** rng.integers(-300, 300, size=(n, d))
    y = rng.integers(0, c, n)
    y[0] = c - 1
    pairs = rng.integers(0, n, size=(int(rng.integers(0, 3 * n)), 2))
    g = Graph(x, y, pairs, c, rng.random((n, d)) < 0.2)
    return g, Mask(rng.random((n, d)) < 0.3)


def test_random_round_trips(tmp_path):
    rng = np.random.default_rng(0)
    for k in range(100):
        g, m = _random_fixture(rng)
        save_dataset(g, m, tmp_path / str(k))
        back, native = load_dataset(tmp_path / str(k))
        expect = g.with_absent(m.bits)
        assert back == expect
        assert back.features.tobytes() == expect.features.tobytes()
        assert np.array_equal(native.bits, expect.absent)


@pytest.mark.parametrize("features,labels,msg", [
    ("f0,f1\n1,2\n3\n", "y\n0\n1\n", "row 1 has 1 cells"),
    ("f0\n1\n2\n", "y\n0\n1.5\n", "non-integer label"),
    ("f0\n1\n2\n3\n", "y\n0\n1\n", "3 feature rows but 2 labels"),
    ("f0\n1\nabc\n", "y\n0\n1\n", "not a number"),
    ("a,b\n1,2\n", "y\n0\n", "header"),
])
def test_load_errors(tmp_path, features, labels, msg):
    root = _write(tmp_path / "d", features, labels, "src,dst\n")
    with pytest.raises(ValueError, match=msg):
        load_dataset(root)


def test_missing_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "nope")


def test_append_header_once(tmp_path):
    path = tmp_path / "r.csv"
    append_results(_report(0), path)
    append_results(_report(1, 0.75), path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(RESULTS_COLUMNS) and len(lines) == 3
    rows = read_results(path)
    assert [r["seed"] for r in rows] == [0, 1] and rows[1]["test_macro_f1"] == 0.75


def test_schema_drift(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text(",".join(reversed(RESULTS_COLUMNS)) + "\n")
    with pytest.raises(SchemaError):
        append_results(_report(), path)
    with pytest.raises(SchemaError):
        read_results(path)
    assert read_results_empty(tmp_path) == []


def read_results_empty(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    return read_results(p)


def _writer(args):
    path, seed = args
    append_results(_report(seed), path)


def test_concurrent_appends(tmp_path):
    path = str(tmp_path / "r.csv")
    with mp.get_context("fork").Pool(8) as pool:
        pool.map(_writer, [(path, s) for s in range(100)], chunksize=1)
    lines = open(path).read().splitlines()
    assert lines.count(",".join(RESULTS_COLUMNS)) == 1
    assert len(lines) == 101
    assert sorted(r["seed"] for r in read_results(path)) == list(range(100))


def test_single_column_fully_missing_row(tmp_path):
    g = Graph(np.array([[1.0], [2.0], [3.0]]), [0, 1, 0], [])
    m = Mask(np.array([[False], [True], [False]]))
    save_dataset(g, m, tmp_path / "d")
    back, native = load_dataset(tmp_path / "d")
    assert back.num_nodes == 3 and native.bits.ravel().tolist() == [False, True, False]
