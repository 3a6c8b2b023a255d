"""Command-line runner: ``mgb gen | sweep | shift | verify | plot-data``.

Option values resolve as: explicit flag, then the ``--config`` JSON file,
then built-in defaults. Errors end the process with status 1 (2 for usage
errors) and one stderr line of the form ``mgb: error: <Type>: <message>``.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
import warnings
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import synth
from .dataset_io import append_results, load_dataset, read_results, save_dataset
from .graph import Graph, feature_sparsity, make_split
from .masks import Mask
from .mechanisms import MechanismSpec, RegimeSpec, generate, normalize_kind, realize_regime
from .metrics import RunReport, mean_std
from .models import (DEFAULT_LAYER_COUNTS, DEFAULT_LRS, DEFAULT_WEIGHT_DECAYS, LAYER_KINDS,
                     evaluate, grid_search)
from .stats import (auc_f1_curve, label_dependent_table, random_mar_table, random_xy,
                    verify_theorem1, verify_theorem2)
from .stats.oracles import JointTable

__all__ = ["main", "build_parser", "DEFAULT_MUS"]

DEFAULT_MUS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
IMPUTATION_ORDER = ("zero", "mean", "median", "mim")

_MODEL = {
    "grid": "default",
    "layer_kinds": None,
    "layer_counts": None,
    "lrs": None,
    "weight_decays": None,
    "hidden_dim": 64,
    "max_epochs": 500,
    "patience": 50,
    "split_seed": 0,
    "split_mode": "transductive",
    "jobs": None,
    "timing": True,
}

DEFAULTS = {
    "gen": {"preset": "synthetic", "out": None, "seed": 0, "force": False},
    "sweep": {"data": None, "mechanism": "u-mcar", "mus": list(DEFAULT_MUS),
              "imputations": list(IMPUTATION_ORDER), "seeds": 5, "out": "results.csv", **_MODEL},
    "shift": {"data": None, "train_mech": "fd-mnar", "test_mech": "u-mcar", "mu_train": 0.5,
              "mu_tests": [0.0, 0.25, 0.5], "imputations": list(IMPUTATION_ORDER), "seeds": 5,
              "out": "results.csv", **_MODEL},
    "verify": {"theorem": 2, "trials": 200, "max_cells": 4, "seed": 0, "mu": None,
               "max_classes": 3},
    "plot-data": {"results": "results.csv", "out": "plot-data"},
}

# grid used when --grid none and no explicit values are given
_SINGLE = {"layer_kinds": ["GCN"], "layer_counts": [2], "lrs": [1e-2], "weight_decays": [1e-4]}


class CliError(Exception):
    """A user-facing failure; becomes the one-line error message."""


# -- option handling -----------------------------------------------------

def _floats(v) -> list[float]:
    if isinstance(v, str):
        return [float(s) for s in v.split(",") if s.strip()]
    if isinstance(v, (int, float)):
        return [float(v)]
    return [float(s) for s in v]


def _ints(v) -> list[int]:
    if isinstance(v, str):
        return [int(s) for s in v.split(",") if s.strip()]
    if isinstance(v, int):
        return [v]
    return [int(s) for s in v]


def _words(v) -> list[str]:
    if isinstance(v, str):
        return [s.strip() for s in v.split(",") if s.strip()]
    return [str(s) for s in v]


def _model_flags(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--imputations", default=S, help="comma list from zero,mean,median,mim")
    p.add_argument("--seeds", type=int, default=S, help="number of seeds; runs seeds 0..N-1")
    p.add_argument("--out", default=S, help="results CSV (appended)")
    p.add_argument("--grid", choices=("default", "none"), default=S,
                   help="'default' searches the full grid, 'none' trains one config")
    p.add_argument("--layer-kinds", default=S, help="comma list from GCN,SAGE,GIN")
    p.add_argument("--layer-counts", default=S, help="comma list of layer counts")
    p.add_argument("--lrs", default=S, help="comma list of learning rates")
    p.add_argument("--weight-decays", default=S, help="comma list of weight decays")
    p.add_argument("--hidden-dim", type=int, default=S)
    p.add_argument("--max-epochs", type=int, default=S)
    p.add_argument("--patience", type=int, default=S)
    p.add_argument("--split-seed", type=int, default=S, help="seed of the node split (fixed)")
    p.add_argument("--split-mode", choices=("transductive", "inductive"), default=S)
    p.add_argument("--jobs", type=int, default=S,
                   help="worker processes (default: $MGB_JOBS, else CPU count)")
    p.add_argument("--timing", action=argparse.BooleanOptionalAction, default=S,
                   help="record wall-clock seconds; --no-timing writes 0 for byte-stable output")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="mgb", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="JSON file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated dataset")
    g.add_argument("--preset", default=S, help="synthetic, s2, s3, s4 or inductive")
    g.add_argument("--out", default=S, help="output directory")
    g.add_argument("--seed", type=int, default=S)
    g.add_argument("--force", action="store_true", default=S, help="overwrite a non-empty --out")

    s = sub.add_parser("sweep", help="F1 across missingness rates for one mechanism")
    s.add_argument("--data", default=S, help="dataset directory")
    s.add_argument("--mechanism", default=S, help="u-mcar, s-mcar, ld-mcar, fd-mnar or cd-mnar")
    s.add_argument("--mus", default=S, help="comma list of target rates")
    _model_flags(s)

    h = sub.add_parser("shift", help="train under one mechanism, test under another")
    h.add_argument("--data", default=S)
    h.add_argument("--train-mech", default=S, help="fd-mnar or cd-mnar")
    h.add_argument("--test-mech", default=S)
    h.add_argument("--mu-train", type=float, default=S)
    h.add_argument("--mu-tests", default=S, help="comma list of test rates")
    _model_flags(h)

    v = sub.add_parser("verify", help="exhaustive checks of the two information results")
    v.add_argument("--theorem", type=int, choices=(1, 2), default=S)
    v.add_argument("--trials", type=int, default=S)
    v.add_argument("--max-cells", type=int, default=S, help="upper bound on n*d per table")
    v.add_argument("--max-classes", type=int, default=S)
    v.add_argument("--mu", type=float, default=S, help="fixed masking rate for theorem 2")
    v.add_argument("--seed", type=int, default=S)

    pd = sub.add_parser("plot-data", help="aggregate a results CSV into plottable tables")
    pd.add_argument("--results", default=S)
    pd.add_argument("--out", default=S)
    return parser


def resolve(ns: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS[ns.command])
    if ns.config:
        try:
            cfg = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {ns.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise CliError("config file must hold a JSON object")
        section = cfg.get(ns.command, cfg)
        unknown = set(section) - set(opts) - set(DEFAULTS)
        if unknown:
            raise CliError(f"unknown config keys for {ns.command}: {sorted(unknown)}")
        opts.update({k: v for k, v in section.items() if k in opts})
    opts.update({k: v for k, v in vars(ns).items() if k not in ("command", "config")})
    return opts


def _jobs(opts) -> int:
    if opts.get("jobs"):
        return max(1, int(opts["jobs"]))
    env = os.environ.get("MGB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"MGB_JOBS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _grid(opts) -> dict:
    single = opts["grid"] == "none"
    full = {"layer_kinds": list(LAYER_KINDS), "layer_counts": list(DEFAULT_LAYER_COUNTS),
            "lrs": list(DEFAULT_LRS), "weight_decays": list(DEFAULT_WEIGHT_DECAYS)}
    base = _SINGLE if single else full
    conv = {"layer_kinds": _words, "layer_counts": _ints, "lrs": _floats,
            "weight_decays": _floats}
    out = {}
    for k, f in conv.items():
        v = opts.get(k)
        out[k] = f(v) if v is not None else list(base[k])
    return out


# -- gen -----------------------------------------------------------------

def cmd_gen(opts) -> int:
    preset = str(opts["preset"]).lower()
    if opts["out"] is None:
        raise CliError("--out is required")
    out = Path(opts["out"])
    if out.exists() and any(out.iterdir()) and not opts["force"]:
        raise CliError(f"{out} exists and is not empty (use --force)")
    if preset == "inductive":
        g, _ = synth.generate_inductive(seed=int(opts["seed"]))
    elif preset in synth.PRESETS:
        g = synth.generate_scaled(preset, seed=int(opts["seed"]))
    else:
        raise CliError(f"unknown preset {preset!r}")
    save_dataset(g, None, out)
    print(f"n={g.num_nodes} d={g.num_features} classes={g.num_classes} "
          f"edges={len(g.edges)} sparsity={feature_sparsity(g):.4f}")
    return 0


# -- training cells -------------------------------------------------------

_CACHE: dict = {}


def _dataset(path: str):
    key = str(Path(path).resolve())
    if key not in _CACHE:
        _CACHE[key] = load_dataset(path)
    return _CACHE[key]


def _observed_graph(g: Graph) -> Graph:
    """The graph with its native missing entries read as observed zeros."""
    return Graph(g.features, g.labels, g.edges, g.num_classes, None, name=g.name)


def _mask_for(g: Graph, native: Mask, spec: MechanismSpec) -> Mask:
    if native.bits.any():
        if spec.kind not in ("UMCAR", "SMCAR") and spec.target_rate > 0:
            raise ValueError(f"{spec.kind} needs fully observed features; "
                             "this dataset has native missing values")
        m = generate(spec, _observed_graph(g))
        return Mask(m.bits | native.bits, m.mechanism_tag + "+native", m.seed)
    return generate(spec, g)


def _fit(g, split, mask, imputation, seed, opts, grid):
    extra = {"hidden_dim": int(opts["hidden_dim"]), "max_epochs": int(opts["max_epochs"]),
             "patience": int(opts["patience"])}
    return grid_search(g, split, mask, grid["layer_kinds"], grid["layer_counts"], grid["lrs"],
                       grid["weight_decays"], imputation=imputation, seed=seed, **extra)[1]


def _report(g, model, dataset_id, mechanism, regime, mu_tr, mu_te, seed, imputation, test_f1,
            rate, seconds):
    c = model.config
    return RunReport(dataset_id, mechanism, regime, mu_tr, mu_te, seed, c.layer_kind, c.num_layers,
                     imputation, c.lr, c.weight_decay, test_f1, model.best_val_f1, rate,
                     model.epochs_run, seconds)


def _sweep_cell(job):
    opts, grid, mu, imputation, seed = job
    t0 = time.perf_counter()
    try:
        g, native = _dataset(opts["data"])
        split = make_split(g, mode=opts["split_mode"], seed=int(opts["split_seed"]))
        spec = MechanismSpec(normalize_kind(opts["mechanism"]), mu, seed=seed)
        mask = _mask_for(g, native, spec)
        model = _fit(g, split, mask, imputation, seed, opts, grid)
        f1 = evaluate(model, g, mask, split.test_ids)
        secs = time.perf_counter() - t0 if opts["timing"] else 0.0
        rep = _report(g, model, g.name, spec.kind, "R1", mu, mu, seed, imputation, f1,
                      mask.rate_on(split.test_ids), secs)
        return [rep], None
    except Exception as exc:  # a failed cell is recorded, the sweep goes on
        return [], f"mu={mu} imputation={imputation} seed={seed}: {type(exc).__name__}: {exc}"


def _shift_cell(job):
    opts, grid, imputation, seed = job
    t0 = time.perf_counter()
    try:
        g, native = _dataset(opts["data"])
        split = make_split(g, mode=opts["split_mode"], seed=int(opts["split_seed"]))
        mu_tr = float(opts["mu_train"])
        tr_spec = MechanismSpec(normalize_kind(opts["train_mech"]), mu_tr, seed=seed)
        te_kind = normalize_kind(opts["test_mech"])
        train_mask = _mask_for(g, native, tr_spec)
        model = _fit(g, split, train_mask, imputation, seed, opts, grid)
        fit_secs = time.perf_counter() - t0
        reports = []
        # R1 reference: test rows keep the training mechanism at the training rate
        f1 = evaluate(model, g, train_mask, split.test_ids)
        secs = fit_secs if opts["timing"] else 0.0
        reports.append(_report(g, model, g.name, tr_spec.kind, "R1", mu_tr, mu_tr, seed,
                               imputation, f1, train_mask.rate_on(split.test_ids), secs))
        for mu_te in _floats(opts["mu_tests"]):
            te_spec = MechanismSpec(te_kind, mu_te, seed=seed)
            regime = RegimeSpec(tr_spec, te_spec, "R2")
            if native.bits.any():
                test_mask = _mask_for(g, native, te_spec)
                bits = train_mask.bits.copy()
                bits[split.test_ids] = test_mask.bits[split.test_ids]
                mask = Mask(bits, "R2+native", seed)
            else:
                mask = realize_regime(g, split, regime)
            t1 = time.perf_counter()
            f1 = evaluate(model, g, mask, split.test_ids)
            secs = fit_secs + time.perf_counter() - t1 if opts["timing"] else 0.0
            reports.append(_report(g, model, g.name, f"{tr_spec.kind}->{te_kind}", "R2", mu_tr,
                                   mu_te, seed, imputation, f1, mask.rate_on(split.test_ids),
                                   secs))
        return reports, None
    except Exception as exc:
        return [], f"imputation={imputation} seed={seed}: {type(exc).__name__}: {exc}"


def _run(cell_fn, jobs, n_jobs):
    if n_jobs <= 1 or len(jobs) <= 1:
        return [cell_fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(n_jobs, len(jobs))) as pool:
        return list(pool.map(cell_fn, jobs))


def _common(opts):
    if opts["data"] is None:
        raise CliError("--data is required")
    load_dataset(opts["data"])  # fail fast on a bad directory
    imps = [i.lower() for i in _words(opts["imputations"])]
    bad = [i for i in imps if i not in IMPUTATION_ORDER]
    if bad:
        raise CliError(f"unknown imputation(s) {bad}")
    n_seeds = int(opts["seeds"])
    if n_seeds < 1:
        raise CliError("--seeds must be at least 1")
    return imps, list(range(n_seeds)), _grid(opts)


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _side_path(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix + ".csv")


def _finish(results, out: Path) -> tuple[list[RunReport], list[str]]:
    reports, errors = [], []
    for reps, err in results:
        reports.extend(reps)
        if err:
            errors.append(err)
    for r in reports:
        append_results(r, out)
    for e in errors:
        print(f"mgb: cell-failed: {e}", file=sys.stderr)
    return reports, errors


def _fmt(v: float) -> str:
    return repr(float(v))


def cmd_sweep(opts) -> int:
    imps, seeds, grid = _common(opts)
    mus = sorted(set(_floats(opts["mus"])))
    if not mus or min(mus) < 0 or max(mus) > 1:
        raise CliError("--mus must be rates in [0, 1]")
    normalize_kind(opts["mechanism"])
    jobs = [(opts, grid, mu, imp, s) for mu in mus for imp in imps for s in seeds]
    out = Path(opts["out"])
    reports, errors = _finish(_run(_sweep_cell, jobs, _jobs(opts)), out)

    curve, auc = [], []
    mech = normalize_kind(opts["mechanism"])
    for imp in imps:
        pts = []
        for mu in mus:
            vals = [r.test_macro_f1 for r in reports if r.imputation == imp and r.mu_test == mu]
            if not vals:
                continue
            m, s = mean_std(vals)
            curve.append([mech, imp, _fmt(mu), _fmt(m), _fmt(s), len(vals)])
            pts.append((mu, m))
        if pts:
            a = pts[0][1] if len(pts) == 1 else auc_f1_curve(pts)
            auc.append([mech, imp, _fmt(a), len(pts)])
    _write_rows(_side_path(out, ".curve"), ["mechanism", "imputation", "mu", "mean_f1", "std_f1",
                                            "n"], curve)
    _write_rows(_side_path(out, ".auc"), ["mechanism", "imputation", "auc", "points"], auc)
    for row in auc:
        print(f"{row[0]} {row[1]}: AUC={float(row[2]):.4f} over {row[3]} rate(s)")
    print(f"{len(reports)} run(s) written to {out}; {len(errors)} failed")
    if errors:
        raise CliError(f"{len(errors)} of {len(jobs)} cells failed")
    return 0


def cmd_shift(opts) -> int:
    imps, seeds, grid = _common(opts)
    normalize_kind(opts["train_mech"])
    normalize_kind(opts["test_mech"])
    jobs = [(opts, grid, imp, s) for imp in imps for s in seeds]
    out = Path(opts["out"])
    reports, errors = _finish(_run(_shift_cell, jobs, _jobs(opts)), out)
    groups = defaultdict(list)
    for r in reports:
        groups[(r.imputation, r.regime, r.mu_test)].append(r.test_macro_f1)
    for (imp, regime, mu_te), vals in sorted(groups.items()):
        m, s = mean_std(vals)
        print(f"{imp} {regime} mu_test={mu_te:g}: F1={m:.4f} +/- {s:.4f} (n={len(vals)})")
    print(f"{len(reports)} row(s) written to {out}; {len(errors)} failed")
    if errors:
        raise CliError(f"{len(errors)} of {len(jobs)} cells failed")
    return 0


# -- verify --------------------------------------------------------------

def _shape(rng, max_cells, max_classes):
    pairs = [(n, d) for n in range(1, max_cells + 1) for d in range(1, max_cells + 1)
             if n * d <= max_cells]
    n, d = pairs[int(rng.integers(len(pairs)))]
    c = int(rng.integers(2, max_classes + 1))
    # keep the label space small enough to enumerate quickly
    while c > 2 and c ** n > 256:
        c -= 1
    return n, d, c


def cmd_verify(opts) -> int:
    trials = int(opts["trials"])
    max_cells = int(opts["max_cells"])
    if not 1 <= max_cells <= 6:
        raise CliError("--max-cells must lie in 1..6")
    max_classes = int(opts["max_classes"])
    if max_classes < 2:
        raise CliError("--max-classes must be at least 2")
    rng = np.random.default_rng(int(opts["seed"]))
    theorem = int(opts["theorem"])
    if trials <= 0:
        print("warning: 0 trials requested; vacuous pass", file=sys.stderr)
        print(f"theorem {theorem}: 0/0 hold")
        return 0
    t0 = time.perf_counter()
    if theorem == 2:
        fixed = opts["mu"]
        if fixed is not None and not 0.0 <= float(fixed) <= 1.0:
            raise CliError("--mu must lie in [0, 1]")
        grid = [round(0.1 * k, 1) for k in range(1, 10)]
        ok, slack, zero_ok = 0, np.inf, True
        for _ in range(trials):
            n, d, c = _shape(rng, max_cells, max_classes)
            alpha = float(rng.choice([0.1, 0.5, 1.0]))
            p = random_xy(n, d, c, rng, alpha)
            probs = np.zeros(p.shape + (p.shape[0],))
            probs[:, :, 0] = p  # own mask unused: the check masks internally
            table = JointTable(probs, n, d, c)
            mu = float(fixed) if fixed is not None else float(rng.choice(grid))
            r = verify_theorem2(table, mu)
            ok += r["holds"]
            slack = min(slack, -r["delta"], r["delta"] - r["lower_bound"])
            if mu == 0.0 and r["delta"] != 0.0:
                zero_ok = False
        print(f"theorem 2: {ok}/{trials} hold; worst slack {slack + 0.0:.3e} nats "
              f"({time.perf_counter() - t0:.2f}s)")
        if fixed is not None and float(fixed) == 0.0:
            print(f"mu=0: delta exactly 0 in every trial: {zero_ok}")
        if ok != trials or not zero_ok:
            raise CliError(f"theorem 2 failed in {trials - ok} of {trials} trials")
        return 0

    worst = 0.0
    for _ in range(trials):
        n, d, c = _shape(rng, max_cells, max_classes)
        worst = max(worst, verify_theorem1(random_mar_table(n, d, c, rng))["max_discrepancy"])
    control = verify_theorem1(label_dependent_table(1, 1, 2, rng, rates=(0.1, 0.9)))
    ok = worst <= 1e-10
    print(f"theorem 1: {trials if ok else 0}/{trials} within 1e-10; worst discrepancy "
          f"{worst:.3e} ({time.perf_counter() - t0:.2f}s)")
    print(f"negative control (label-dependent masking): discrepancy "
          f"{control['max_discrepancy']:.3e}")
    if not ok:
        raise CliError(f"theorem 1 discrepancy {worst:.3e} exceeds 1e-10")
    if control["max_discrepancy"] <= 1e-3:
        raise CliError("negative control was not detected")
    return 0


# -- plot-data -----------------------------------------------------------

def _safe(s: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in s)


def cmd_plot_data(opts) -> int:
    src = Path(opts["results"])
    if not src.exists():
        raise CliError(f"{src}: no such results file")
    rows = read_results(src)
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    if not rows:
        print("warning: results file has no rows; nothing written", file=sys.stderr)
        return 0

    curves = defaultdict(lambda: defaultdict(list))
    shifts = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r["regime"] == "R1":
            curves[(r["dataset_id"], r["mechanism"])][(r["imputation"], r["mu_test"])].append(
                r["test_macro_f1"])
        else:
            train_m, _, test_m = r["mechanism"].partition("->")
            key = (train_m, test_m or train_m, r["mu_train"], r["mu_test"], r["imputation"])
            shifts[r["dataset_id"]][key].append(r["test_macro_f1"])

    def imp_key(i):
        return (IMPUTATION_ORDER.index(i) if i in IMPUTATION_ORDER else len(IMPUTATION_ORDER), i)

    written = 0
    aucs = defaultdict(dict)
    for (ds, mech), cells in sorted(curves.items()):
        body = []
        by_imp = defaultdict(list)
        for (imp, mu), vals in sorted(cells.items(), key=lambda kv: (imp_key(kv[0][0]),
                                                                      kv[0][1])):
            m, s = mean_std(vals)
            body.append([_fmt(mu), imp, _fmt(m), _fmt(s), len(vals)])
            by_imp[imp].append((mu, m))
            written += len(vals)
        _write_rows(out / f"{_safe(ds)}__{_safe(mech)}.csv",
                    ["mu", "imputation", "mean_f1", "std_f1", "n"], body)
        for imp, pts in by_imp.items():
            aucs[ds][(imp, mech)] = pts[0][1] if len(pts) == 1 else auc_f1_curve(pts)
    for ds, table in aucs.items():
        mechs = sorted({m for _, m in table})
        imps = sorted({i for i, _ in table}, key=imp_key)
        body = [[i] + [_fmt(table[(i, m)]) if (i, m) in table else "" for m in mechs]
                for i in imps]
        _write_rows(out / f"{_safe(ds)}__auc.csv", ["imputation"] + mechs, body)
    for ds, cells in sorted(shifts.items()):
        body = []
        for key, vals in sorted(cells.items(), key=lambda kv: (kv[0][:4], imp_key(kv[0][4]))):
            m, s = mean_std(vals)
            body.append([key[0], key[1], _fmt(key[2]), _fmt(key[3]), key[4], _fmt(m), _fmt(s),
                         len(vals)])
            written += len(vals)
        _write_rows(out / f"{_safe(ds)}__shift.csv",
                    ["train_mechanism", "test_mechanism", "mu_train", "mu_test", "imputation",
                     "mean_f1", "std_f1", "n"], body)
    print(f"{written} of {len(rows)} row(s) grouped into {out}")
    return 0


COMMANDS = {"gen": cmd_gen, "sweep": cmd_sweep, "shift": cmd_shift, "verify": cmd_verify,
            "plot-data": cmd_plot_data}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        opts = resolve(ns)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return COMMANDS[ns.command](opts)
    except (CliError, ValueError, OSError, RuntimeError, KeyError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"mgb: error: {type(exc).__name__}: {msg}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
