import numpy as np
import pytest

from mgb.graph import feature_sparsity
from mgb.models import ModelConfig, evaluate, train
from mgb.masks import Mask
from mgb.synth import (LABELER_SEED, MAX_REDRAWS, barabasi_albert, generate_inductive, generate_scaled,
                       generate_synthetic, label_with_gcn)


def test_ba_smallest_tree():
    e = barabasi_albert(3, 1, seed=0)
    assert len(e) == 2
    assert set(np.unique(e)) == {0, 1, 2}


@pytest.mark.parametrize("n,m", [(10, 1), (50, 2), (200, 3), (30, 5)])
def test_ba_edge_count(n, m):
    e = barabasi_albert(n, m, seed=1)
    assert len(e) == m * (n - m) + m * (m - 1) // 2
    assert len({tuple(sorted(p)) for p in e.tolist()}) == len(e)
    assert (e[:, 0] != e[:, 1]).all()


def test_ba_heavy_tail():
    e = barabasi_albert(10_000, 2, seed=0)
    deg = np.bincount(e.ravel(), minlength=10_000)
    assert (deg == 2).mean() > (deg == 10).mean()
    assert deg.max() > 50


def test_ba_connected_and_deterministic():
    g = generate_synthetic(seed=3)
    assert len(np.unique(g.components())) == 1
    assert np.array_equal(barabasi_albert(100, 2, 4), barabasi_albert(100, 2, 4))
    assert not np.array_equal(barabasi_albert(100, 2, 4), barabasi_albert(100, 2, 5))


def test_ba_errors():
    for n, m in [(2, 2), (5, 0)]:
        with pytest.raises(ValueError):
            barabasi_albert(n, m)


def test_synthetic_shape_and_balance(synthetic):
    assert synthetic.features.shape == (1000, 5)
    assert feature_sparsity(synthetic) == 0.0
    share = synthetic.labels.mean()
    assert 0.3 <= share <= 0.7
    assert synthetic.num_classes == 2


def test_synthetic_deterministic():
    assert generate_synthetic(seed=2) == generate_synthetic(seed=2)
    assert generate_synthetic(seed=2) != generate_synthetic(seed=3)


def test_label_function_independent_of_data_seed():
    a = generate_synthetic(seed=5)
    b = generate_synthetic(seed=6)
    # the same labeler applied to each graph reproduces its labels
    for g in (a, b):
        ys = [label_with_gcn(g.features, g.edges, k) for k in range(MAX_REDRAWS)]
        assert any(np.array_equal(y, g.labels) for y in ys)
    assert LABELER_SEED != 0


def test_synthetic_errors():
    with pytest.raises(ValueError):
        generate_synthetic(n=5)
    with pytest.raises(ValueError):
        generate_scaled("s9")


@pytest.mark.parametrize("preset,shape", [("s2", (1000, 20)), ("s3", (1000, 50))])
def test_presets(preset, shape):
    g = generate_scaled(preset, seed=0)
    assert g.features.shape == shape and feature_sparsity(g) == 0.0


@pytest.mark.slow
def test_preset_s4():
    g = generate_scaled("S4", seed=0)
    assert g.features.shape == (50000, 5) and feature_sparsity(g) == 0.0


def test_inductive_structure():
    g, split = generate_inductive(seed=0)
    assert g.num_nodes == 1000
    assert split.test_ids.tolist() == list(range(800, 1000))
    assert len(split.train_ids) == 600 and len(split.val_ids) == 200
    crosses = (g.edges[:, 0] < 800) != (g.edges[:, 1] < 800)
    assert not crosses.any()
    split.check_inductive(g)
    attempts = [label_with_gcn(g.features, g.edges, k) for k in range(MAX_REDRAWS)]
    assert any(np.array_equal(y, g.labels) for y in attempts)


def test_inductive_clean_baseline():
    g, split = generate_inductive(seed=0)
    model = train(g, split, Mask.empty(g.features.shape), ModelConfig(seed=0))
    assert evaluate(model, g, Mask.empty(g.features.shape), split.test_ids) >= 0.90
