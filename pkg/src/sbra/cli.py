"""Command-line front end: generate, run, sweep, tune, report.

Precedence for every option: explicit flag, then the --config JSON document
(keys mirror flag names, dashes or underscores), then the built-in default.
Exit codes: 0 success, 2 infeasible or invalid scenario (including oracle
refusals), 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .baselines import (OracleLimits, OracleRefusal, all_links_fixed,
                        exhaustive_oracle)
from .greedy import InfeasibleScheduleError, greedy_sbra
from .model import (ScenarioError, load_scenario, save_scenario,
                    scenario_digest, validate_scenario)
from .multistart import MultiStartParams, ms_greedy_sbra
from .routing import mbps_slots_str
from .scenarios import SWEEP_K_VALUES, TOPOLOGIES, load_fig2, make_scenario

ALGOS = ("greedy", "ms-greedy", "all-fixed", "oracle")
DEFAULT_WEIGHTS = [1.0] * 7
TUNE_GRID = (0.0, 0.33, 0.66, 1.0)
TUNE_WARN_COMBOS = 100_000


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip() != ""]


def _load_config(argv) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    with open(known.config) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("config file must hold a JSON object")
    return {str(k).replace("-", "_"): v for k, v in doc.items()}


def _merge(args: argparse.Namespace, config: dict, defaults: dict) -> argparse.Namespace:
    """Fill unset (None) options from config, then from defaults."""
    for key, dflt in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, config.get(key, dflt))
    return args


def _default_workers() -> int:
    env = os.environ.get("SBRA_WORKERS", "").strip()
    return max(1, int(env)) if env else 1


def _load(path: str):
    s = load_fig2() if path == "fig2" else load_scenario(path)
    problems = validate_scenario(s)
    if problems:
        raise ScenarioError(f"invalid scenario {path}: " + "; ".join(problems))
    return s


def cmd_generate(args, config) -> int:
    _merge(args, config, {
        "topology": "grid", "n": 3, "k": 19, "seed": 0, "theta": 10.0,
        "tau": 0.2, "jitter_sigma": None, "range_m": 300.0, "out": None,
    })
    s = make_scenario(args.topology, args.n, args.k, args.seed,
                      theta_deg=args.theta, slot_duration_s=args.tau,
                      jitter_sigma=args.jitter_sigma, range_m=args.range_m)
    digest = scenario_digest(s)
    if args.out:
        save_scenario(s, args.out)
        print(f"wrote {args.out}  nodes={s.node_count} links={len(s.initial_links)}"
              f"->{len(s.final_links)}  digest={digest}")
    else:
        print(f"digest={digest} (no --out given, nothing written)")
    return 0


def _oracle_run(s):
    # the shape caps guard programmatic misuse; from the command line the
    # search-size estimate is the gate that matters
    from .preprocess import possible_links
    limits = OracleLimits(max_nodes=s.node_count, max_ifaces=s.iface_count,
                          max_slots=s.slot_count,
                          max_candidates=len(possible_links(s)))
    return exhaustive_oracle(s, limits)


def _run_algo(s, algo: str, args):
    """Returns (result, iteration_log_or_None)."""
    if algo == "greedy":
        rng = (np.random.default_rng(np.random.SeedSequence([args.seed]))
               if args.xi > 1 else None)
        return greedy_sbra(s, args.weights, xi=args.xi, rng=rng), None
    if algo == "ms-greedy":
        p = MultiStartParams(omega=args.omega, iters=args.iters,
                             window=args.window, master_seed=args.seed,
                             workers=args.workers)
        return ms_greedy_sbra(s, p)
    if algo == "all-fixed":
        return all_links_fixed(s), None
    if algo == "oracle":
        return _oracle_run(s), None
    raise ValueError(f"unknown algo {algo!r} (want one of {ALGOS})")


def _write_iteration_log(path: str, log: list[dict]) -> None:
    fields = ["iter", "omega_index", "xi"] + [f"w{i}" for i in range(1, 8)] \
        + ["total_loss_bytes", "runtime_ms"]
    with open(path, "w", newline="") as fh:
        fh.write(f"# sbra {__version__} iteration log\n")
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(log)


def cmd_run(args, config) -> int:
    _merge(args, config, {
        "algo": "greedy", "weights": DEFAULT_WEIGHTS, "xi": 1, "seed": 0,
        "omega": 20, "iters": 10, "window": 10, "workers": _default_workers(),
        "out": None, "log": None,
    })
    if len(args.weights) != 7:
        raise ValueError("--weights needs exactly 7 values")
    s = _load(args.scenario)
    res, log = _run_algo(s, args.algo, args)
    if args.out:
        res.save(args.out)
    else:
        print(res.to_json())
    log_path = args.log or (args.out + ".iterations.csv" if args.out else None)
    if log is not None and log_path:
        _write_iteration_log(log_path, log)
    note = f" log={log_path}" if (log is not None and log_path) else ""
    print(f"{args.algo}: loss={res.total_loss_bytes} bytes "
          f"({mbps_slots_str(res.total_loss_kbps_slots)} Mbps-slots)"
          f"{f'  out={args.out}' if args.out else ''}{note}", file=sys.stderr)
    return 0


_SWEEP_FIELDS = ["topology", "n", "k", "algo", "seed", "loss_bytes",
                 "loss_mbps_slots", "runtime_ms", "status"]


def _sweep_cell(task: tuple) -> dict:
    topology, n, k, algo, seed, ms_opts = task
    row = {"topology": topology, "n": n, "k": k, "algo": algo, "seed": seed,
           "loss_bytes": "", "loss_mbps_slots": "", "runtime_ms": "",
           "status": "ok"}
    try:
        s = make_scenario(topology, n, k, seed)
        t0 = time.perf_counter()
        if algo == "greedy":
            res = greedy_sbra(s, DEFAULT_WEIGHTS, xi=1)
        elif algo == "ms-greedy":
            res, _ = ms_greedy_sbra(s, MultiStartParams(
                omega=ms_opts["omega"], iters=ms_opts["iters"],
                window=ms_opts["window"], master_seed=seed))
        elif algo == "all-fixed":
            res = all_links_fixed(s)
        elif algo == "oracle":
            res = _oracle_run(s)
        else:
            raise ValueError(f"unknown algo {algo!r}")
        row["loss_bytes"] = res.total_loss_bytes
        row["loss_mbps_slots"] = mbps_slots_str(res.total_loss_kbps_slots)
        row["runtime_ms"] = round((time.perf_counter() - t0) * 1e3, 3)
    except Exception as exc:  # record and continue: partial sweeps stay useful
        row["status"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_sweep(args, config) -> int:
    _merge(args, config, {
        "topology": "grid", "n": 3, "seeds": [0, 1, 2, 3, 4],
        "k_values": list(SWEEP_K_VALUES), "algos": ["greedy", "all-fixed"],
        "omega": 20, "iters": 10, "window": 10,
        "workers": _default_workers(), "out_dir": "sweep-out", "figures": False,
    })
    algos = args.algos if isinstance(args.algos, list) else args.algos.split(",")
    for a in algos:
        if a not in ALGOS:
            raise ValueError(f"unknown algo {a!r} (want one of {ALGOS})")
    ms_opts = {"omega": args.omega, "iters": args.iters, "window": args.window}
    tasks = [(args.topology, args.n, k, algo, seed, ms_opts)
             for k in args.k_values for algo in algos for seed in args.seeds]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_cell, tasks))
    else:
        rows = [_sweep_cell(t) for t in tasks]
    rows.sort(key=lambda r: (r["topology"], r["n"], r["k"],
                             r["algo"], r["seed"]))

    os.makedirs(args.out_dir, exist_ok=True)
    sweep_path = os.path.join(args.out_dir, "sweep.csv")
    with open(sweep_path, "w", newline="") as fh:
        fh.write(f"# sbra {__version__} sweep: topology={args.topology} "
                 f"n={args.n} seeds={args.seeds} k={args.k_values} "
                 f"algos={algos}\n")
        writer = csv.DictWriter(fh, fieldnames=_SWEEP_FIELDS)
        writer.writeheader()
        writer.writerows(rows)

    from .report import median_losses
    medians = median_losses([r for r in rows if r["status"] == "ok"])
    med_path = os.path.join(args.out_dir, "sweep_medians.csv")
    with open(med_path, "w", newline="") as fh:
        fh.write(f"# sbra {__version__} sweep medians\n")
        writer = csv.writer(fh)
        writer.writerow(["topology", "n", "algo", "k", "median_loss_bytes"])
        for (topo, n, algo), series in sorted(medians.items()):
            for k in sorted(series):
                writer.writerow([topo, n, algo, k, int(series[k])])

    failures = sum(1 for r in rows if r["status"] != "ok")
    print(f"wrote {sweep_path} ({len(rows)} rows, {failures} failed) and {med_path}")
    if args.figures:
        from .report import render_sweep_figures
        for p in render_sweep_figures(sweep_path, args.out_dir):
            print(f"wrote {p}")
    return 0


def _tune_cell(task: tuple) -> tuple:
    scenario_json, weights = task
    from .model import scenario_from_json
    s = scenario_from_json(scenario_json)
    res = greedy_sbra(s, list(weights), xi=1)
    return weights, res.total_loss_bytes, res.total_loss_kbps_slots


def cmd_tune(args, config) -> int:
    _merge(args, config, {
        "grid_values": list(TUNE_GRID), "sample": None, "sample_seed": 0,
        "workers": _default_workers(), "out": None,
    })
    s = _load(args.scenario)
    combos = list(itertools.product(args.grid_values, repeat=7))
    if len(combos) > TUNE_WARN_COMBOS and not args.sample:
        print(f"warning: {len(combos)} weight combinations; consider --sample",
              file=sys.stderr)
    if args.sample and args.sample < len(combos):
        rng = np.random.default_rng(np.random.SeedSequence([args.sample_seed]))
        idx = sorted(rng.choice(len(combos), size=args.sample, replace=False))
        combos = [combos[i] for i in idx]

    from .model import scenario_to_json
    sjson = scenario_to_json(s)
    tasks = [(sjson, w) for w in combos]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_tune_cell, tasks, chunksize=16))
    else:
        results = [_tune_cell(t) for t in tasks]

    best = min(results, key=lambda r: (r[2], r[0]))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(f"# sbra {__version__} tune: scenario={scenario_digest(s)} "
                     f"grid={args.grid_values} rows={len(results)}\n")
            writer = csv.writer(fh)
            writer.writerow([f"w{i}" for i in range(1, 8)]
                            + ["loss_bytes", "loss_mbps_slots"])
            for weights, loss_b, loss_ks in results:
                writer.writerow(list(weights) + [loss_b, mbps_slots_str(loss_ks)])
        print(f"wrote {args.out} ({len(results)} rows)")
    print("best weights: " + ",".join(str(w) for w in best[0])
          + f"  loss={best[1]} bytes")
    return 0


def cmd_report(args, config) -> int:
    _merge(args, config, {"out_dir": None})
    from .report import render_sweep_figures
    out_dir = args.out_dir or os.path.dirname(os.path.abspath(args.sweep))
    for p in render_sweep_figures(args.sweep, out_dir):
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbra",
        description="Backhaul reconfiguration: scenario generation, greedy "
                    "and multi-start schedulers, baselines, sweeps, figures.")
    parser.add_argument("--version", action="version",
                        version=f"sbra {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file with option defaults")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel workers (default: $SBRA_WORKERS or 1)")

    p = sub.add_parser("generate", help="write a scenario JSON file")
    p.add_argument("--topology", choices=TOPOLOGIES, default=None)
    p.add_argument("--n", type=int, default=None, help="interfaces per node")
    p.add_argument("--k", type=int, default=None, help="slot horizon K")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--theta", type=float, default=None, help="degrees per slot")
    p.add_argument("--tau", type=float, default=None, help="slot duration (s)")
    p.add_argument("--jitter-sigma", type=float, default=None,
                   help="grid position jitter sigma (default pitch/8; 0 = exact)")
    p.add_argument("--range-m", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", help="JSON file with option defaults")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="run one algorithm on a scenario file")
    p.add_argument("scenario", help="scenario JSON path, or 'fig2'")
    p.add_argument("--algo", choices=ALGOS, default=None)
    p.add_argument("--weights", type=float, nargs=7, default=None,
                   metavar=("W1", "W2", "W3", "W4", "W5", "W6", "W7"))
    p.add_argument("--xi", type=int, default=None,
                   help="selection window for one randomized greedy run")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (ms-greedy) or selection seed (xi > 1)")
    p.add_argument("--omega", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--out", default=None, help="result JSON path")
    p.add_argument("--log", default=None, help="ms-greedy iteration CSV path")
    add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="cross-product experiment grid to CSV")
    p.add_argument("--topology", choices=TOPOLOGIES, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seeds", type=_int_list, default=None)
    p.add_argument("--k-values", type=_int_list, default=None)
    p.add_argument("--algos", type=lambda t: t.split(","), default=None)
    p.add_argument("--omega", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--figures", action="store_const", const=True, default=None,
                   help="also render loss-vs-K figures")
    add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tune", help="weight grid search with xi=1")
    p.add_argument("scenario", help="scenario JSON path, or 'fig2'")
    p.add_argument("--grid-values", type=_float_list, default=None)
    p.add_argument("--sample", type=int, default=None,
                   help="evaluate only this many random combinations")
    p.add_argument("--sample-seed", type=int, default=None)
    p.add_argument("--out", default=None, help="grid CSV path")
    add_common(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("report", help="render figures from a sweep CSV")
    p.add_argument("--sweep", required=True, help="sweep.csv path")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--config", help="JSON file with option defaults")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = _load_config(argv)
        args = build_parser().parse_args(argv)
        return args.func(args, config)
    except (ScenarioError, InfeasibleScheduleError, OracleRefusal) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
