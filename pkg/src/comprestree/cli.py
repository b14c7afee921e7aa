"""comprestree command line: generate networks, run method comparisons,
verify against the oracle suite.

Exit codes: 0 ok, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .algorithms import (cluster_greedy, dsc_lower_bound, greedy_treestar, ind_cost,
                         is_wcds, tree_from_wcds, unicast_arborescence, wcds_greedy)
from .ctree import UNICAST, WL, eval_cost, scheme_to_json
from .entropy import MatrixModel, RainfallModel, UniformModel, model_from_json
from .netgraph import gen_grid, gen_random, load_network, save_network, shortest_paths
from . import oracle as _oracle

CSV_COLUMNS = ["method", "seed", "sweep", "total", "nc", "ic", "normalized", "elapsed_ms"]
METHODS = ("ind", "cluster", "dsc", "treestar", "wcds", "unicast")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# --- gen -----------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.kind == "grid":
        net = gen_grid(args.rows, args.cols, spacing=args.spacing,
                       link_radius=args.radius, bs_corner=args.corner)
    else:
        net = gen_random(args.n, args.w, args.h, args.radius, args.seed,
                         max_retries=args.retries)
    save_network(net, args.out)
    print(f"wrote {args.out}: {len(net.nodes)} nodes, {len(net.edges())} edges, bs={net.bs}")
    return 0


# --- run -----------------------------------------------------------------------

def _build_network(spec, seed):
    if "file" in spec:
        return load_network(spec["file"])
    g = spec["generator"]
    if g["kind"] == "grid":
        return gen_grid(g["rows"], g["cols"], spacing=g.get("spacing", 1.0),
                        link_radius=g.get("radius"), bs_corner=g.get("corner", "sw"))
    if g["kind"] == "random":
        return gen_random(g["n"], g["w"], g["h"], g["radius"], seed,
                          max_retries=g.get("retries", 200))
    raise ValueError(f"unknown generator kind {g.get('kind')!r}")


def _sweep_model(entropy_spec, sweep_param, value, net):
    spec = dict(entropy_spec)
    if sweep_param is not None:
        spec[sweep_param] = value
    return model_from_json(spec, net)


def _run_method(method, net, model, cost_model, dtab, rx_cost):
    t0 = time.perf_counter()
    tree_json = None
    iters = None
    if method == "ind":
        total = ind_cost(net, model, dtab)
        if rx_cost:
            total += rx_cost * sum(model.entropy(i) * (len(dtab.path(i, net.bs)) - 1)
                                   for i in net.sensors)
        nc, ic = total, 0.0
    elif method == "dsc":
        total = dsc_lower_bound(net, model, dtab)
        nc, ic = total, 0.0
    elif method == "cluster":
        res = cluster_greedy(net, model, cost_model, dtab)
        total, nc, ic = res.cost.total, res.cost.nc, res.cost.ic
    elif method == "treestar":
        if cost_model != WL:
            raise ValueError("treestar runs under the WL cost model")
        run = greedy_treestar(net, model, cost_model, dtab=dtab)
        cb = eval_cost(run.scheme, run.tree, net, model, cost_model, dtab, rx_cost=rx_cost)
        total, nc, ic = cb.total, cb.nc, cb.ic
        tree_json = scheme_to_json(run.tree, run.scheme)
        iters = run.iterations
    elif method == "wcds":
        s = wcds_greedy(net)
        tr, sch = tree_from_wcds(net, s, model, dtab)
        cb = eval_cost(sch, tr, net, model, WL, dtab, rx_cost=rx_cost)
        total, nc, ic = cb.total, cb.nc, cb.ic
        tree_json = scheme_to_json(tr, sch)
    elif method == "unicast":
        tr, sch, _ = unicast_arborescence(net, model, dtab)
        cb = eval_cost(sch, tr, net, model, UNICAST, dtab, rx_cost=rx_cost)
        total, nc, ic = cb.total, cb.nc, cb.ic
        tree_json = scheme_to_json(tr, sch)
    else:
        raise ValueError(f"unknown method {method!r}")
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return {"total": total, "nc": nc, "ic": ic, "elapsed_ms": elapsed_ms,
            "tree": tree_json, "iters": iters}


def run_experiment(config: dict, rx_cost: float = 0.0):
    """Execute one ExperimentConfig dict; returns (rows, records).

    rows follow CSV_COLUMNS; records are the JSON-able per-run results.
    Tasks over (seed, sweep) may run in parallel (COMPRESTREE_THREADS caps
    the pool); row order is by declared key order, never completion order.
    """
    methods = config["methods"]
    for mname in methods:
        if mname not in METHODS:
            raise ValueError(f"unknown method {mname!r}")
    seeds = config.get("seeds", [0])
    sweep = config.get("sweep")
    sweep_param = sweep["param"] if sweep else None
    sweep_values = sweep["values"] if sweep else [None]
    if sweep:
        for v in sweep_values:
            if not np.isfinite(v) or (sweep_param in ("c", "h") and v <= 0):
                raise ValueError(f"sweep value {v!r} must be finite and positive")
    cost_model = config.get("cost_model", WL)
    rx = float(config.get("rx_cost", rx_cost))

    tasks = [(seed, value) for seed in seeds for value in sweep_values]

    def run_task(task):
        seed, value = task
        net = _build_network(config["network"], seed)
        dtab = shortest_paths(net)
        model = _sweep_model(config["entropy"], sweep_param, value, net)
        out = {}
        ind_total = ind_cost(net, model, dtab)
        for mname in methods:
            try:
                r = _run_method(mname, net, model, cost_model, dtab, rx)
                r["normalized"] = r["total"] / ind_total if ind_total > 0 else float("nan")
                out[mname] = r
            except Exception as exc:  # record the failure, keep running
                out[mname] = {"error": f"{type(exc).__name__}: {exc}"}
        return out

    max_workers = max(1, int(os.environ.get("COMPRESTREE_THREADS", "1")))
    if max_workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=min(max_workers, len(tasks))) as pool:
            results = list(pool.map(run_task, tasks))
    else:
        results = [run_task(t) for t in tasks]

    rows = []
    records = []
    by_task = dict(zip(tasks, results))
    for mname in methods:
        for seed in seeds:
            for value in sweep_values:
                r = by_task[(seed, value)][mname]
                sweep_str = "" if value is None else _fmt(value)
                if "error" in r:
                    rows.append([mname, seed, sweep_str, "nan", "nan", "nan", "nan", "0"])
                    records.append({"algo": mname, "seed": seed, "sweep": value,
                                    "error": r["error"]})
                    continue
                rows.append([mname, seed, sweep_str, _fmt(r["total"]), _fmt(r["nc"]),
                             _fmt(r["ic"]), _fmt(r["normalized"]),
                             str(int(round(r["elapsed_ms"])))])
                records.append({"algo": mname, "seed": seed, "sweep": value,
                                "cost": {"total": r["total"], "nc": r["nc"], "ic": r["ic"]},
                                "normalized": r["normalized"], "tree": r["tree"],
                                "iters": r["iters"], "elapsed_ms": r["elapsed_ms"]})
    return rows, records


def summarize_rows(rows):
    """Arithmetic mean of total and normalized per (method, sweep)."""
    groups: dict[tuple, list] = {}
    order = []
    for row in rows:
        key = (row[0], row[2])
        if key not in groups:
            groups[key] = []
            order.append(key)
        if row[3] != "nan":
            groups[key].append((float(row[3]), float(row[6])))
    out = []
    for key in order:
        vals = groups[key]
        if vals:
            mt = sum(v[0] for v in vals) / len(vals)
            mn = sum(v[1] for v in vals) / len(vals)
            out.append([key[0], key[1], _fmt(mt), _fmt(mn), str(len(vals))])
        else:
            out.append([key[0], key[1], "nan", "nan", "0"])
    return out


def cmd_run(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    rows, records = run_experiment(config, rx_cost=args.rx_cost)
    out_csv = args.out_csv or config.get("out_csv")
    out_json = args.out_json or config.get("out_json")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    text = buf.getvalue()
    if out_csv:
        with open(out_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        with open(out_csv + ".summary.csv", "w", encoding="utf-8", newline="") as fh:
            sw = csv.writer(fh, lineterminator="\n")
            sw.writerow(["method", "sweep", "mean_total", "mean_normalized", "n"])
            sw.writerows(summarize_rows(rows))
        print(f"wrote {out_csv} (+ summary)")
    else:
        sys.stdout.write(text)
    if out_json:
        with open(out_json, "w", encoding="utf-8") as fh:
            json.dump(records, fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(f"wrote {out_json}")
    return 0


# --- verify ----------------------------------------------------------------------

def _fixture_path() -> str:
    return os.path.join(os.path.dirname(__file__), "fixtures", "fig1.json")


def verify_fixture(path: str, log) -> bool:
    """Replay the shipped five-node fixture and compare every expected cost."""
    from .ctree import scheme_from_json
    from .algorithms import eval_clustering
    with open(path, "r", encoding="utf-8") as fh:
        fx = json.load(fh)
    from .netgraph import net_from_json
    net = net_from_json(fx["network"])
    dtab = shortest_paths(net)
    ok = True
    for eps_str, expected in fx["expected"].items():
        eps = float(eps_str)
        model = UniformModel(net.sensors, h=fx["h"], eps=eps)
        tree, scheme = scheme_from_json(fx["scheme"], net, WL)
        got = {
            "ind": ind_cost(net, model, dtab),
            "dsc": dsc_lower_bound(net, model, dtab),
        }
        cb = eval_cost(scheme, tree, net, model, WL, dtab)
        got["tree_total"], got["tree_nc"], got["tree_ic"] = cb.total, cb.nc, cb.ic
        wn = eval_cost(scheme, tree, net, model, UNICAST, dtab)
        got["wn_total"] = wn.total
        cl = eval_clustering(net, model, [tuple(c) for c in fx["clusters"]], dtab)
        got["cluster_total"], got["cluster_nc"], got["cluster_ic"] = \
            cl.cost.total, cl.cost.nc, cl.cost.ic
        for key, want in expected.items():
            if abs(got[key] - want) > 1e-9:
                log(f"  FAIL fixture eps={eps}: {key} = {got[key]!r}, expected {want!r}")
                ok = False
    return ok


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0
    t_start = time.perf_counter()

    def log(msg):
        print(msg)

    def check(name, ok, detail=""):
        nonlocal failures
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}{(' ' + detail) if detail else ''}")
        if not ok:
            failures += 1

    check("figure fixture exactness", verify_fixture(args.fixture or _fixture_path(), log))

    n_inst = 6 if args.quick else args.samples
    budget = _oracle.OracleBudget()

    # Mce-Treestar vs brute enumeration on random forest states
    from .algorithms.treestar import Forest, mce_treestar_wlsg
    mismatches = 0
    trials = 0
    for _ in range(n_inst * 4):
        net = _random_net(rng, n_max=min(10, args.n_max + 2))
        model = _random_model(rng, net)
        dtab = shortest_paths(net)
        forest = _random_forest(rng, net)
        if forest.component_count() < 2:
            continue
        trials += 1
        try:
            ts = mce_treestar_wlsg(forest, net, model, dtab)
        except Exception:
            continue
        ref = _oracle.brute_mce_treestar_wlsg(forest.components(), net, model, dtab)
        sel = tuple(sorted(v for _, v in ts.leaf_edges))
        ref_sel = tuple(sorted(v for _, v in ref[3]))
        if abs(ts.ceff - ref[0]) > 1e-9 or ts.center != ref[2] or sel != ref_sel:
            mismatches += 1
    check("mce-treestar equals brute enumeration", mismatches == 0,
          f"({trials} forest states)")

    # unicast arborescence vs brute restricted optimum
    bad = 0
    worst = 0.0
    for _ in range(n_inst):
        net = _random_net(rng, n_max=min(7, args.n_max))
        model = _random_model(rng, net)
        _, _, total = unicast_arborescence(net, model)
        ref = _oracle.brute_restricted_opt(net, model, UNICAST, "NS", budget)
        worst = max(worst, abs(total - ref.cost))
        if abs(total - ref.cost) > 1e-9:
            bad += 1
    check("unicast arborescence is the restricted optimum", bad == 0,
          f"(max |diff| = {worst:.2e})")

    # WL-SG greedy within the bound; restricted within 2x unrestricted
    from .entropy import beta as beta_fn
    violations = 0
    max_ratio = 0.0
    lemma_bad = 0
    for _ in range(n_inst):
        net = _random_net(rng, n_max=min(8, args.n_max + 1))
        model = _random_model(rng, net)
        run = greedy_treestar(net, model)
        ref = _oracle.brute_restricted_opt(net, model, WL, "SG", budget)
        b = beta_fn(model, net, "SG").value
        rep = _oracle.check_bound(run.cost, ref.cost, b, len(net.sensors))
        max_ratio = max(max_ratio, rep.ratio)
        if not rep.ok:
            violations += 1
        if len(net.sensors) <= 5:
            unr = _oracle.brute_unrestricted(net, model, WL, "SG", budget)
            if ref.cost > 2.0 * unr + 1e-9:
                lemma_bad += 1
    check("greedy treestar within 4*beta^2*H_n of restricted optimum",
          violations == 0, f"(max ratio {max_ratio:.3f})")
    check("restricted optimum within 2x unrestricted (WL-SG)", lemma_bad == 0)

    # WCDS validity
    bad = 0
    for _ in range(n_inst * 3):
        net = _random_net(rng, n_max=12)
        s = wcds_greedy(net)
        if not is_wcds(net, s):
            bad += 1
    check("greedy WCDS satisfies both conditions", bad == 0)

    # lower-bound dominance on everything the methods produce
    bad = 0
    for _ in range(n_inst):
        net = _random_net(rng, n_max=10)
        model = _random_model(rng, net)
        dtab = shortest_paths(net)
        floor = dsc_lower_bound(net, model, dtab)
        totals = [ind_cost(net, model, dtab), cluster_greedy(net, model, WL, dtab).cost.total,
                  greedy_treestar(net, model, dtab=dtab).cost,
                  unicast_arborescence(net, model, dtab)[2]]
        if any(t < floor - 1e-9 for t in totals):
            bad += 1
    check("every produced scheme dominates the DSC bound", bad == 0)

    print(f"verify finished in {time.perf_counter() - t_start:.1f}s: "
          f"{'all checks passed' if failures == 0 else f'{failures} check(s) FAILED'}")
    return 0 if failures == 0 else 1


def _random_net(rng, n_max=8):
    from .netgraph import gen_random, CannotConnect
    n = int(rng.integers(3, n_max + 1))
    for attempt in range(50):
        seed = int(rng.integers(0, 2 ** 31))
        try:
            net = gen_random(n, 60, 60, 35, seed)
        except CannotConnect:
            continue
        # keep instances whose sensor subgraph is connected
        from .algorithms.wcds import is_wcds
        if is_wcds(net, set(net.sensors)):
            return net
    raise RuntimeError("could not sample a usable network")


def _random_model(rng, net):
    kind = rng.integers(0, 3)
    ids = list(net.sensors)
    if kind == 0:
        return UniformModel(ids, h=1.0, eps=float(rng.uniform(0.01, 0.6)))
    if kind == 1:
        return RainfallModel.for_network(net, h=1.0, c=float(rng.uniform(20, 400)))
    n = len(ids)
    H = rng.uniform(0.8, 1.25, size=n)
    base = rng.uniform(0.1, 0.7, size=(n, n))
    base = (base + base.T) / 2
    skew = rng.uniform(0.85, 1.15, size=(n, n))
    M = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            if a != b:
                M[a, b] = min(base[a, b] * skew[a, b], H[a]) * min(H[a], H[b]) / max(H[a], H[b])
    return MatrixModel(ids, H, M)


def _random_forest(rng, net):
    from .algorithms.treestar import Forest
    forest = Forest(net.sensors)
    merges = int(rng.integers(0, max(1, len(net.sensors) - 2)))
    sensors = list(net.sensors)
    for _ in range(merges):
        a, b = rng.choice(sensors, size=2, replace=False)
        ra, rb = forest.find(int(a)), forest.find(int(b))
        if ra != rb:
            forest._parent[rb] = ra
    return forest


# --- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="comprestree",
        description="Compression trees for correlated sensor data: generators, "
                    "method comparisons, oracle verification.")
    ap.add_argument("--version", action="version", version=f"comprestree {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a network JSON file")
    gsub = gen.add_subparsers(dest="kind", required=True)
    gg = gsub.add_parser("grid", help="uniform sensor grid plus a corner base station")
    gg.add_argument("--rows", type=int, required=True)
    gg.add_argument("--cols", type=int, required=True)
    gg.add_argument("--spacing", type=float, default=1.0)
    gg.add_argument("--radius", type=float, default=None,
                    help="link radius (default: exactly the spacing)")
    gg.add_argument("--corner", choices=("sw", "se", "nw", "ne"), default="sw",
                    help="which corner the base station sits outside of")
    gg.add_argument("--out", required=True)
    gr = gsub.add_parser("random", help="random geometric network")
    gr.add_argument("--n", type=int, required=True)
    gr.add_argument("--w", type=float, required=True)
    gr.add_argument("--h", type=float, required=True)
    gr.add_argument("--radius", type=float, required=True)
    gr.add_argument("--seed", type=int, required=True)
    gr.add_argument("--retries", type=int, default=200)
    gr.add_argument("--out", required=True)
    gr.description = ("Node placement is uniform; the base station is the node nearest "
                      "the lower-left corner (a convention: the underlying experiments "
                      "never state where it sits).")

    run = sub.add_parser("run", help="run a method-comparison experiment")
    run.add_argument("--config", required=True, help="ExperimentConfig JSON")
    run.add_argument("--out-csv", default=None)
    run.add_argument("--out-json", default=None)
    run.add_argument("--rx-cost", type=float, default=0.0,
                     help="per-bit receive-cost multiplier (default 0: receiving is free)")

    ver = sub.add_parser("verify", help="run the oracle acceptance suite")
    ver.add_argument("--seed", type=int, default=7)
    ver.add_argument("--samples", type=int, default=12, help="instances per check")
    ver.add_argument("--n-max", type=int, default=7, help="max sensors for brute-force checks")
    ver.add_argument("--quick", action="store_true")
    ver.add_argument("--fixture", default=None, help="override the packaged figure fixture")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "run":
            return cmd_run(args)
        return cmd_verify(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
