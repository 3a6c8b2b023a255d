import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mgb.metrics import RunReport, aggregate, confusion_matrix, macro_f1, mean_std


def _report(f1, seed=0, **kw):
    base = dict(dataset_id="syn", mechanism="UMCAR", regime="R1", mu_train=0.1, mu_test=0.1,
                seed=seed, layer_kind="GCN", layers=2, imputation="mim", lr=0.01,
                weight_decay=1e-4, test_macro_f1=f1, val_macro_f1=f1, realized_rate=0.1,
                epochs=10, seconds=0.0)
    base.update(kw)
    return RunReport(**base)


def test_hand_counted_example():
    assert macro_f1([0, 1, 1, 1], [0, 0, 1, 1], 2) == pytest.approx((2 / 3 + 0.8) / 2)
    assert round(macro_f1([0, 1, 1, 1], [0, 0, 1, 1], 2), 4) == 0.7333


def test_constant_predictor():
    assert macro_f1([1, 1, 1, 1], [0, 0, 1, 1], 2) == pytest.approx(1 / 3)


def test_perfect_and_absent_class():
    assert macro_f1([0, 1, 2], [0, 1, 2], 3) == 1.0
    # class 2 never occurs and is never predicted: counted as 0
    assert macro_f1([0, 1], [0, 1], 3) == pytest.approx(2 / 3)


def test_errors():
    with pytest.raises(ValueError):
        macro_f1([], [], 2)
    with pytest.raises(ValueError):
        macro_f1([0, 2], [0, 1], 2)
    with pytest.raises(ValueError):
        macro_f1([0], [0, 1], 2)


def test_confusion_layout():
    cm = confusion_matrix([0, 1, 1], [1, 1, 0], 2)
    assert cm.tolist() == [[0, 1], [1, 1]]


def _binary_oracle(p, t):
    scores = []
    for c in (0, 1):
        tp = sum(1 for a, b in zip(p, t) if a == c and b == c)
        fp = sum(1 for a, b in zip(p, t) if a == c and b != c)
        fn = sum(1 for a, b in zip(p, t) if a != c and b == c)
        scores.append(0.0 if tp + fp + fn == 0 else 2 * tp / (2 * tp + fp + fn))
    return sum(scores) / 2


def test_brute_force_binary_oracle():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(1, 30))
        p = rng.integers(0, 2, n).tolist()
        t = rng.integers(0, 2, n).tolist()
        assert macro_f1(p, t, 2) == pytest.approx(_binary_oracle(p, t), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=40),
       st.randoms(use_true_random=False))
def test_permutation_invariance(pairs, rnd):
    p, t = map(list, zip(*pairs))
    order = list(range(len(p)))
    rnd.shuffle(order)
    assert macro_f1(p, t, 4) == pytest.approx(
        macro_f1([p[i] for i in order], [t[i] for i in order], 4), abs=1e-15)


def test_aggregate_example():
    mean, std = aggregate([_report(0.8, 0), _report(0.9, 1)])
    assert mean == pytest.approx(0.85)
    assert round(std, 4) == 0.0707


def test_aggregate_single_and_mixed():
    assert aggregate([_report(0.7)]) == (0.7, 0.0)
    with pytest.raises(ValueError):
        aggregate([_report(0.8), _report(0.9, imputation="zero")])
    with pytest.raises(ValueError):
        aggregate([])
    with pytest.raises(ValueError):
        mean_std([])


def test_report_validation():
    with pytest.raises(ValueError):
        _report(1.2)
    with pytest.raises(ValueError):
        _report(0.5, realized_rate=-0.1)
    row = _report(0.5).row()
    assert "extra" not in row and row["test_macro_f1"] == 0.5
