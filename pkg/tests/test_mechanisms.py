import numpy as np
import pytest

from mgb import cart
from mgb.graph import Graph, make_split
from mgb.mechanisms import (KINDS, MechanismSpec, RegimeSpec, cd_informative, fd_column_rates,
                            gen_cdmnar, gen_fdmnar, gen_ldmcar, gen_smcar, gen_umcar, generate,
                            hi_lo_rates, ld_column_rates, realize_regime)


def _graph(n=1000, d=5, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d))
    y = (x[:, 0] + 0.5 * x[:, 1] > 0).astype(int)
    return Graph(x, y, [(i, i + 1) for i in range(n - 1)])


G = _graph()


@pytest.mark.parametrize("kind", KINDS)
def test_zero_rate_gives_empty_mask(kind):
    m = generate(MechanismSpec(kind, 0.0, seed=3), G)
    assert m.realized_rate == 0.0


def test_umcar_full_rate():
    assert gen_umcar(G, 1.0).bits.all()


def test_umcar_binomial_concentration():
    g = _graph(2000, 5)
    inside = sum(0.48 <= gen_umcar(g, 0.5, s).realized_rate <= 0.52 for s in range(1000))
    assert inside >= 990


def test_smcar_rows():
    g = _graph(10, 3)
    m = gen_smcar(g, 0.3, seed=1)
    rows = m.bits.all(axis=1)
    assert rows.sum() == 3
    assert (m.bits.any(axis=1) == rows).all()
    assert gen_smcar(g, 0.0).realized_rate == 0.0


def test_ld_solver_example():
    np.testing.assert_allclose(ld_column_rates([0.2, 0.4], 0.3), [0.2, 0.4], atol=1e-12)


def test_ld_solver_saturation():
    p = ld_column_rates([0.1, 1.0, 0.0], 0.5)
    assert p[1] == 1.0 and p.mean() == pytest.approx(0.5, abs=1e-12) and p[2] == 0.0
    p = ld_column_rates([0.1, 1.0, 0.0], 0.9)
    assert p.tolist() == [1.0, 1.0, 0.0]


def test_ld_falls_back_when_uninformative():
    g = Graph(np.ones((50, 3)), np.arange(50) % 2, [])
    m = gen_ldmcar(g, 0.4, seed=0)
    assert "fallback" in m.mechanism_tag and 0.3 < m.realized_rate < 0.5


def test_ld_equal_information_equal_rates():
    rng = np.random.default_rng(0)
    y = np.arange(4000) % 2
    col = y + rng.normal(scale=0.3, size=y.size)
    g = Graph(np.c_[col, col, col], y, [])
    rates = gen_ldmcar(g, 0.5, seed=1).bits.mean(axis=0)
    assert np.ptp(rates) < 0.05


def test_ld_ignores_values_within_column():
    x = G.features
    rates = np.mean([gen_ldmcar(G, 0.4, s).bits.mean(axis=0) for s in range(30)], axis=0)
    assert rates.mean() == pytest.approx(0.4, abs=0.02)
    m = gen_ldmcar(G, 0.4, 0).bits
    for j in range(x.shape[1]):
        high = x[:, j] > np.median(x[:, j])
        assert abs(m[high, j].mean() - m[~high, j].mean()) < 0.1


def test_hi_lo_example():
    lo, hi = hi_lo_rates(0.25, 0.25, 4.0)
    assert lo == pytest.approx(0.25 / 1.75) and hi == pytest.approx(4 * 0.25 / 1.75)
    assert 0.25 * hi + 0.75 * lo == pytest.approx(0.25)


def test_hi_lo_clamped():
    lo, hi = hi_lo_rates(0.6, 0.4, 4.0)
    assert hi == 1.0 and 0.4 * hi + 0.6 * lo == pytest.approx(0.6)


def test_fd_monte_carlo_expected_rate():
    col = np.random.default_rng(5).permutation(1_000_000).astype(float)
    rates, flat = fd_column_rates(col, 0.25, 0.75, 4.0)
    assert not flat
    above = col >= np.quantile(col, 0.75, method="inverted_cdf")
    assert rates[above][0] == pytest.approx(4 / 7, rel=1e-4)
    assert rates[~above][0] == pytest.approx(1 / 7, rel=1e-4)
    assert np.mean(rates) == pytest.approx(0.25, abs=1e-12)
    draws = np.random.default_rng(0).random(col.size) < rates
    assert abs(draws.mean() - 0.25) <= 1e-3


def test_fd_ratio_calibration():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(20000, 5))
    m = gen_fdmnar(x, 0.3, seed=2).bits
    q = np.quantile(x, 0.75, axis=0, method="inverted_cdf")
    above = x >= q
    ratio = m[above].mean() / m[~above].mean()
    assert abs(ratio / 4.0 - 1) <= 0.10
    assert abs(m.mean() - 0.3) <= 0.01


def test_fd_constant_column_flag():
    x = np.c_[np.ones(100), np.arange(100.0)]
    m = gen_fdmnar(x, 0.5, seed=0)
    assert "degenerate_cols=0" in m.mechanism_tag
    assert 0.35 < m.bits[:, 0].mean() < 0.65


def test_fd_rejects_missing_input():
    with pytest.raises(ValueError):
        gen_fdmnar(np.array([[np.nan, 1.0]]), 0.5)
    g = G.with_absent(np.eye(1000, 5, dtype=bool))
    for f in (gen_fdmnar, gen_cdmnar, gen_ldmcar):
        with pytest.raises(ValueError):
            f(g, 0.5)


def test_cd_single_separating_feature():
    rng = np.random.default_rng(3)
    x = np.c_[rng.normal(size=200), rng.normal(size=200)]
    x[np.abs(x[:, 0]) < 0.05, 0] += 0.2
    y = (x[:, 0] > 0).astype(int)
    inf = cd_informative(x, y, 2, depth=1, min_leaf=5)
    t1 = cart.fit(x, y, depth=1)
    (path,) = cart.positive_paths(t1)
    assert path[0][0] == 0 and path[0][1] == ">="
    thr = path[0][2]
    expect = np.zeros_like(inf)
    expect[:, 0] = (y == 1) & (x[:, 0] >= thr)
    t0 = cart.fit(x, (y == 0).astype(int), depth=1)
    for (j, op, t) in cart.positive_paths(t0)[0]:
        expect[:, j] |= (y == 0) & (x[:, j] < t if op == "<" else x[:, j] >= t)
    assert np.array_equal(inf, expect)
    assert not inf[:, 1].any()


def test_cd_ratio_calibration():
    g = _graph(20000, 5)
    inf = cd_informative(g.features, g.labels, 2)
    m = gen_cdmnar(g, 0.3, seed=1).bits
    ratio = m[inf].mean() / m[~inf].mean()
    assert abs(ratio / 4.0 - 1) <= 0.10


def test_cd_no_conditions_falls_back():
    g = Graph(np.ones((40, 2)), np.arange(40) % 2, [])
    m = gen_cdmnar(g, 0.5, seed=0)
    assert "fallback" in m.mechanism_tag


@pytest.mark.parametrize("kind", KINDS)
def test_rate_concentration(kind):
    g = _graph(2000, 5)
    mu = 0.4
    bound = 4 * np.sqrt(mu * (1 - mu) / g.features.size)
    hits = [abs(generate(MechanismSpec(kind, mu, seed=s), g).realized_rate - mu) <= bound
            for s in range(100)]
    # whole-row sampling is exact up to rounding; the rest are binomial
    assert np.mean(hits) >= 0.99


@pytest.mark.parametrize("kind", KINDS)
def test_deterministic_per_seed(kind):
    a = generate(MechanismSpec(kind, 0.5, seed=4), G)
    b = generate(MechanismSpec(kind, 0.5, seed=4), G)
    c = generate(MechanismSpec(kind, 0.5, seed=5), G)
    assert a == b and a != c


def test_spec_validation_and_round_trip():
    s = MechanismSpec("fd-mnar", 0.5, tau=0.8, hi_lo_ratio=3.0, seed=2)
    assert s.kind == "FDMNAR"
    assert MechanismSpec.from_dict(s.to_dict()) == s
    for bad in (dict(kind="xx", target_rate=0.1), dict(kind="UMCAR", target_rate=1.2),
                dict(kind="UMCAR", target_rate=0.1, tau=1.0),
                dict(kind="UMCAR", target_rate=0.1, hi_lo_ratio=1.0),
                dict(kind="UMCAR", target_rate=0.1, tree_depth=0)):
        with pytest.raises(ValueError):
            MechanismSpec(**bad)
    with pytest.raises(ValueError):
        MechanismSpec.from_dict({"kind": "UMCAR", "target_rate": 0.1, "extra": 1})


def test_regime_validation():
    a = MechanismSpec("UMCAR", 0.3)
    with pytest.raises(ValueError):
        RegimeSpec(a, MechanismSpec("UMCAR", 0.4), "R1")
    r = RegimeSpec(a, MechanismSpec("FDMNAR", 0.5), "R2")
    assert RegimeSpec.from_dict(r.to_dict()) == r


def test_regime_r1_collapses():
    split = make_split(G, seed=0)
    spec = MechanismSpec("UMCAR", 0.3, seed=2)
    m = realize_regime(G, split, RegimeSpec(spec, spec, "R1"))
    assert m == gen_umcar(G, 0.3, 2)


def test_regime_r2_zero_test_rate():
    split = make_split(G, seed=0)
    m = realize_regime(G, split, RegimeSpec(MechanismSpec("FDMNAR", 0.5, seed=1),
                                            MechanismSpec("UMCAR", 0.0, seed=1), "R2"))
    assert not m.bits[split.test_ids].any()
    assert m.rate_on(split.fit_ids) == pytest.approx(0.5, abs=0.03)


def test_regime_r2_rates():
    split = make_split(G, seed=0)
    tr, te = [], []
    for s in range(20):
        m = realize_regime(G, split, RegimeSpec(MechanismSpec("CDMNAR", 0.5, seed=s),
                                                MechanismSpec("UMCAR", 0.25, seed=s), "R2"))
        tr.append(m.rate_on(split.fit_ids))
        te.append(m.rate_on(split.test_ids))
    assert np.mean(te) == pytest.approx(0.25, abs=0.01)
    assert np.mean(tr) == pytest.approx(0.5, abs=0.02)
