"""Command-line surface: diag, exact, centrality, compare, bench.

Exit codes: 0 success, 2 input/validation problems, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from .baselines import BaselineConfig, bekas_diag
from .centrality import (electrical_closeness, kirchhoff_edge_centrality,
                         kirchhoff_index, nrwb, spanning_edge_resistance)
from .diag import ApproxParams, approx_diag, approx_diag_weighted, exact_diag_estimate
from .graph import load_edge_list
from .metrics import compare
from .records import dump_record, make_run_record
from .solver import SolverConvergenceError, dense_pseudoinverse, oracle_limit

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lapdiag",
        description="Approximate diag of the Laplacian pseudoinverse by spanning-tree "
                    "sampling, with electrical centrality measures on top.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_graph_args(p):
        p.add_argument("graph", help="edge-list file (u v [w] per line)")
        p.add_argument("--weighted", action="store_true",
                       help="parse the third column as positive edge weights")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("diag", help="approximate diag of pinv(L)")
    add_graph_args(p)
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--delta", type=float, default=None, help="default 1/n")
    p.add_argument("--kappa", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=None, help="default: all cores")
    p.add_argument("--pivot", default="auto", help="'auto' or a vertex id")
    p.add_argument("--aggregation", choices=["frequency", "paper-weighted"],
                   default="frequency")
    p.add_argument("--cg-tol-override", type=float, default=None)
    p.add_argument("--csv", default=None, help="also write 'vertex,diag' CSV here")
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("exact", help="dense-oracle diag (small graphs)")
    add_graph_args(p)
    p.add_argument("--oracle-limit", type=int, default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("centrality", help="electrical centrality measures")
    add_graph_args(p)
    p.add_argument("--measure", required=True,
                   choices=["closeness", "nrwb", "kirchhoff", "spanning-edge",
                            "kirchhoff-edge"])
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--theta", type=float, default=0.5, help="edge down-weighting factor")
    p.add_argument("--num-hutchinson", type=int, default=None)
    p.add_argument("--exact", action="store_true",
                   help="derive vertex measures from the dense oracle")
    p.add_argument("--oracle-mode", action="store_true",
                   help="kirchhoff-edge: exact numerator/denominator (testing)")
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("compare", help="error report between two diag JSON files")
    p.add_argument("estimate", help="JSON with the estimated diagonal")
    p.add_argument("reference", help="JSON with the reference diagonal")
    p.add_argument("--k", type=int, action="append", default=None,
                   help="top-k sizes (repeatable; default 10 and 100)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="sweep UST and baseline estimators over graphs")
    p.add_argument("graphs", help="file listing one edge-list path per line")
    p.add_argument("--ust-eps", type=float, action="append", default=None,
                   help="UST error bounds (default 0.3 and 0.9)")
    p.add_argument("--bekas-vectors", type=int, action="append", default=None,
                   help="random-probe counts (default sweep 50 100 200)")
    p.add_argument("--bekas-h-vectors", type=int, action="append", default=None,
                   help="Hadamard-row counts (opt-in sweep, e.g. 64 128 256)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None, help="directory for per-cell records")
    p.add_argument("--ndjson", default=None,
                   help="write all records line-delimited to this file instead")
    p.set_defaults(func=cmd_bench)
    return parser


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "wt", encoding="utf-8") as fh:
            yield fh


def _load_graph(args):
    path = Path(args.graph)
    if not path.exists():
        raise FileNotFoundError(f"graph file not found: {path}")
    return load_edge_list(path, weighted=args.weighted)


def _diag_params(args):
    pivot = None
    if args.pivot != "auto":
        pivot = int(args.pivot)
    return ApproxParams(eps=args.eps, delta=args.delta, kappa=args.kappa,
                        seed=args.seed, threads=args.threads, pivot=pivot,
                        aggregation=args.aggregation,
                        cg_tol_override=args.cg_tol_override)


def _estimate_record(args, est, wall):
    result = {
        "diag": est.diag.tolist(),
        "trace": est.trace,
        "pivot": est.pivot,
        "tau": est.tau,
        "ecc_pivot": est.ecc_pivot,
        "eta": est.eta,
        "walk_steps": est.walk_steps,
        "solver_iterations": est.solver_iterations,
        "solver_residual": est.solver_residual,
    }
    params = {
        "eps": est.eps, "delta": est.delta, "kappa": est.kappa, "seed": est.seed,
        "threads": est.threads, "pivot": args.pivot, "weighted": args.weighted,
        "aggregation": est.aggregation,
    }
    timings = dict(est.timings)
    timings["total"] = wall
    return make_run_record("diag", graph=args.graph, parameters=params,
                           result=result, timings=timings)


def cmd_diag(args):
    g = _load_graph(args)
    params = _diag_params(args)
    t0 = time.perf_counter()
    est = approx_diag_weighted(g, params) if g.weighted else approx_diag(g, params)
    record = _estimate_record(args, est, time.perf_counter() - t0)
    with _open_out(args.out) as fh:
        dump_record(record, fh)
    if args.csv:
        with open(args.csv, "wt", encoding="utf-8") as fh:
            fh.write("vertex,diag\n")
            for v, value in zip(g.vertex_labels, est.diag):
                fh.write(f"{v},{float(value)!r}\n")
    return EXIT_OK


def cmd_exact(args):
    g = _load_graph(args)
    limit = args.oracle_limit
    t0 = time.perf_counter()
    pinv = dense_pseudoinverse(g, limit=limit)
    wall = time.perf_counter() - t0
    record = make_run_record(
        "exact", graph=args.graph,
        parameters={"oracle_limit": limit if limit is not None else oracle_limit(),
                    "weighted": args.weighted},
        result={"diag": pinv.diag.tolist(), "trace": pinv.trace},
        timings={"total": wall})
    with _open_out(args.out) as fh:
        dump_record(record, fh)
    return EXIT_OK


def cmd_centrality(args):
    g = _load_graph(args)
    labels = g.vertex_labels

    def vertex_csv(fh, values):
        fh.write("vertex,score\n")
        for v, s in zip(labels, values):
            fh.write(f"{v},{float(s)!r}\n")

    def edge_csv(fh, values):
        fh.write("u,v,score\n")
        for (u, v), s in zip(g.edge_array, values):
            fh.write(f"{labels[u]},{labels[v]},{float(s)!r}\n")

    if args.measure in ("closeness", "nrwb", "kirchhoff"):
        if args.exact:
            est = exact_diag_estimate(g)
        else:
            params = ApproxParams(eps=args.eps, delta=args.delta, seed=args.seed,
                                  threads=args.threads)
            est = approx_diag_weighted(g, params) if g.weighted else approx_diag(g, params)
        with _open_out(args.out) as fh:
            if args.measure == "closeness":
                vertex_csv(fh, electrical_closeness(est).values)
            elif args.measure == "nrwb":
                vertex_csv(fh, nrwb(est).values)
            else:
                fh.write("kirchhoff_index\n")
                fh.write(f"{float(kirchhoff_index(est))!r}\n")
        return EXIT_OK

    if args.measure == "spanning-edge":
        scores = spanning_edge_resistance(g, eps=args.eps, delta=args.delta,
                                          seed=args.seed, threads=args.threads or 1)
    else:
        scores = kirchhoff_edge_centrality(
            g, theta=args.theta, eps=args.eps, delta=args.delta,
            num_hutchinson=args.num_hutchinson, seed=args.seed,
            oracle_mode=args.oracle_mode, threads=args.threads or 1)
    with _open_out(args.out) as fh:
        edge_csv(fh, scores.values)
    return EXIT_OK


def _read_diag_json(path):
    with open(path, "rt", encoding="utf-8") as fh:
        obj = json.load(fh)
    if isinstance(obj, list):
        return np.asarray(obj, dtype=np.float64)
    if isinstance(obj, dict) and "result" in obj and "diag" in obj["result"]:
        return np.asarray(obj["result"]["diag"], dtype=np.float64)
    raise ValueError(f"{path}: expected a diag list or a run record with result.diag")


def cmd_compare(args):
    est = _read_diag_json(args.estimate)
    ref = _read_diag_json(args.reference)
    if args.k:
        ks = args.k  # explicit sizes are validated by compare()
    else:
        ks = [k for k in (10, 100) if k <= len(ref)] or [len(ref)]
    report = compare(est, ref, ks=ks)
    with _open_out(args.out) as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def _bench_cell(g, method, param, seed, threads):
    t0 = time.perf_counter()
    if method == "ust":
        est = approx_diag(g, ApproxParams(eps=param, seed=seed, threads=threads))
        payload = {"diag": est.diag.tolist(), "tau": est.tau, "pivot": est.pivot}
        timings = dict(est.timings)
    else:
        cfg = BaselineConfig(method="random" if method == "bekas" else "hadamard",
                             num_vectors=param, seed=seed)
        diag = bekas_diag(g, cfg)
        payload = {"diag": diag.tolist(), "num_vectors": param}
        timings = {}
    wall = time.perf_counter() - t0
    timings["total"] = wall
    return payload, timings, wall


def cmd_bench(args):
    list_path = Path(args.graphs)
    if not list_path.exists():
        raise FileNotFoundError(f"graph list not found: {list_path}")
    graph_paths = [ln.strip() for ln in list_path.read_text().splitlines()
                   if ln.strip() and not ln.startswith("#")]
    if not graph_paths:
        print("bench: graph list is empty", file=sys.stderr)
        return EXIT_INPUT

    from .baselines import default_sweep_counts

    ust_eps = args.ust_eps or [0.3, 0.9]
    bekas_counts = args.bekas_vectors or list(default_sweep_counts("random"))
    bekas_h_counts = args.bekas_h_vectors or []
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    ndjson_fh = open(args.ndjson, "wt", encoding="utf-8") if args.ndjson else None

    summary = ["graph,method,param,time_ms,max_abs,inversions_pct"]
    records = []
    for gp in graph_paths:
        try:
            g = load_edge_list(gp)
        except (OSError, ValueError) as exc:
            rec = make_run_record("bench", graph=gp, parameters={},
                                  result={}, timings={})
            rec["error"] = str(exc)
            records.append(rec)
            summary.append(f"{gp},load-error,,,,")
            continue
        reference = None
        if g.n <= oracle_limit():
            reference = dense_pseudoinverse(g).diag
        cells = [("ust", e) for e in ust_eps]
        cells += [("bekas", s) for s in bekas_counts]
        cells += [("bekas-h", s) for s in bekas_h_counts]
        for method, param in cells:
            try:
                payload, timings, wall = _bench_cell(g, method, param,
                                                     args.seed, args.threads)
            except (ValueError, SolverConvergenceError) as exc:
                rec = make_run_record("bench", graph=gp,
                                      parameters={"method": method, "param": param},
                                      result={}, timings={})
                rec["error"] = str(exc)
                records.append(rec)
                summary.append(f"{gp},{method},{param},,,")
                continue
            max_abs = inv_pct = ""
            if reference is not None:
                rep = compare(np.asarray(payload["diag"]), reference,
                              ks=[min(10, g.n)])
                payload["max_abs"] = rep.max_abs
                payload["inverted_pairs_pct"] = rep.inverted_pairs_pct
                max_abs = f"{rep.max_abs:.6g}"
                inv_pct = f"{rep.inverted_pairs_pct:.4g}"
            rec = make_run_record(
                "bench", graph=gp,
                parameters={"method": method, "param": param, "seed": args.seed,
                            "threads": args.threads},
                result=payload, timings=timings)
            records.append(rec)
            summary.append(f"{gp},{method},{param},{wall * 1000:.3f},{max_abs},{inv_pct}")

    for i, rec in enumerate(records):
        if ndjson_fh:
            ndjson_fh.write(json.dumps(rec) + "\n")
        elif out_dir:
            with open(out_dir / f"record_{i:04d}.json", "wt", encoding="utf-8") as fh:
                dump_record(rec, fh)
    if ndjson_fh:
        ndjson_fh.close()
    summary_text = "\n".join(summary) + "\n"
    if out_dir:
        (out_dir / "summary.csv").write_text(summary_text)
    else:
        sys.stdout.write(summary_text)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SolverConvergenceError as exc:
        print(f"lapdiag: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ValueError) as exc:
        print(f"lapdiag: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
