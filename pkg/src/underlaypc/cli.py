"""Command line front end.

Subcommands: `fcir` dumps the protection region document for one instance,
`jpac` and `throughput` run a single snapshot, `sweep` runs a Monte Carlo
sweep to CSV.  Exit codes: 0 on success, 2 on configuration problems,
1 on runtime failures.

Sweep axes take either explicit values (`--alpha 0.5 1 2`) or an inclusive
range with a step (`--alpha 0.2..2.0 step 0.2`).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .experiments import (ALGORITHMS, run_experiment, summarize,
                          write_rows_csv, write_summary_csv)
from .jpac import run_jpac, run_jpac_box
from .network import NetworkInstance, sinr_of
from .regions import baseline_itl, build_fcir, build_ftir
from .scenarios import ConfigError, ScenarioConfig, build_instance, load_config
from .throughput import run_algorithm2

BOUNDARY_SAMPLES = 101


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="underlaypc",
        description="Interference regions and power/admission control for "
                    "underlay secondary networks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument("--seed", type=int, default=None,
                       help="snapshot seed (default: config seed)")

    p = sub.add_parser("fcir", help="dump the protection region document")
    common(p)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--alpha", nargs="+", default=None, metavar="A",
                   help="box scalings to include (values or lo..hi step s)")
    p.set_defaults(func=_cmd_fcir)

    p = sub.add_parser("jpac", help="admission control on one snapshot")
    common(p)
    p.add_argument("--algorithm", choices=("jpac", "jpac-box"), default="jpac")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="box scaling for jpac-box")
    p.set_defaults(func=_cmd_jpac)

    p = sub.add_parser("throughput", help="SU throughput maximization on one "
                                          "snapshot")
    common(p)
    p.add_argument("--algorithm", choices=("gp-poly", "gp-box"),
                   default="gp-poly")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="box scaling for gp-box")
    p.add_argument("--out", default=None,
                   help="directory for the per-iteration trace CSV")
    p.set_defaults(func=_cmd_throughput)

    p = sub.add_parser("sweep", help="Monte Carlo sweep to CSV")
    common(p)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--snapshots", type=int, default=None,
                   help="override snapshot count")
    p.add_argument("--algorithm", nargs="+", choices=ALGORITHMS,
                   default=list(ALGORITHMS), metavar="ALG")
    p.add_argument("--alpha", nargs="+", default=None, metavar="A",
                   help="sweep the box scaling")
    p.add_argument("--d", nargs="+", default=None, metavar="D",
                   help="sweep the station separation")
    p.add_argument("--su-range", nargs="+", default=None, metavar="N",
                   help="sweep the secondary user count")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: all cores)")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock runtimes (breaks byte-for-byte "
                        "reproducibility)")
    p.set_defaults(func=_cmd_sweep)
    return parser


def parse_values(tokens, integer: bool = False) -> tuple:
    """Explicit values, or an inclusive `lo..hi step s` range."""
    if len(tokens) >= 1 and ".." in tokens[0]:
        lo_s, hi_s = tokens[0].split("..", 1)
        lo, hi = float(lo_s), float(hi_s)
        if len(tokens) == 3 and tokens[1] == "step":
            step = float(tokens[2])
        elif len(tokens) == 1:
            step = 1.0
        else:
            raise ConfigError(f"bad range syntax: {' '.join(tokens)}")
        if step <= 0 or hi < lo:
            raise ConfigError("range needs hi >= lo and a positive step")
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        vals = [lo + k * step for k in range(count)]
    else:
        vals = [float(t) for t in tokens]
    if integer:
        ints = [int(round(v)) for v in vals]
        if any(abs(i - v) > 1e-9 for i, v in zip(ints, vals)):
            raise ConfigError("expected integer sweep values")
        return tuple(ints)
    return tuple(vals)


def _load(args):
    cfg = load_config(args.config)
    if isinstance(cfg, ScenarioConfig) and args.seed is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _instance(cfg) -> NetworkInstance:
    seed = cfg.seed if isinstance(cfg, ScenarioConfig) else 0
    return build_instance(cfg, seed)


def _cmd_fcir(args) -> int:
    cfg = _load(args)
    net = _instance(cfg)
    fcir = build_fcir(net)
    if args.alpha is not None:
        alphas = parse_values(args.alpha)
    elif isinstance(cfg, ScenarioConfig):
        alphas = cfg.alphas
    else:
        alphas = (1.0,)
    itl0 = baseline_itl(fcir, 1.0)
    doc = fcir.as_dict()
    doc["titl"] = _clean(build_ftir(net))
    doc["itl0"] = _clean(itl0)
    doc["alphas"] = list(alphas)
    doc["boxes"] = {repr(float(a)): _clean(a * itl0) for a in alphas}
    if fcir.num_pbs == 2:
        doc["boundaries"] = _boundaries(fcir)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "fcir.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(path)
    return 0


def _clean(vec) -> list:
    return [None if not np.isfinite(v) else float(v) for v in vec]


def _boundaries(fcir) -> list:
    """Sampled face lines a_m @ (x, y) = c_m for two-station regions.

    A zero cross coefficient (the other cell is empty) makes the face
    parallel to that axis; such a line is sampled over the other faces'
    largest intercept, or its own when no face bounds that axis."""
    finite = np.isfinite(fcir.c)
    spans = np.zeros(2)
    for j in range(2):
        vals = [fcir.c[m] / fcir.a[m, j] for m in range(2)
                if finite[m] and fcir.a[m, j] > 0]
        spans[j] = max(vals) if vals else 0.0
    out = []
    for m in range(2):
        if not finite[m]:
            continue
        a, c = fcir.a[m], fcir.c[m]
        if a[0] > 0 and a[1] > 0:
            x = np.linspace(0.0, c / a[0], BOUNDARY_SAMPLES)
            y = (c - a[0] * x) / a[1]
        elif a[1] == 0.0:
            lim = c / a[0]
            x = np.full(BOUNDARY_SAMPLES, lim)
            y = np.linspace(0.0, spans[1] if spans[1] > 0 else lim,
                            BOUNDARY_SAMPLES)
        else:
            lim = c / a[1]
            y = np.full(BOUNDARY_SAMPLES, lim)
            x = np.linspace(0.0, spans[0] if spans[0] > 0 else lim,
                            BOUNDARY_SAMPLES)
        out.append({"station": m,
                    "points": [[float(px), float(py)] for px, py in zip(x, y)]})
    return out


def _cmd_jpac(args) -> int:
    cfg = _load(args)
    net = _instance(cfg)
    if args.algorithm == "jpac":
        out = run_jpac(net)
    else:
        fcir = build_fcir(net)
        out = run_jpac_box(net, baseline_itl(fcir, args.alpha), fcir=fcir)
    gamma = sinr_of(net, out.p_final)
    throughput = float(np.sum(np.log1p(gamma[net.su_indices])))
    print(f"algorithm={args.algorithm}")
    print(f"admitted={len(out.admitted)}")
    print(f"pu_outage={out.pu_outage_ratio!r}")
    print(f"su_outage={out.su_outage_ratio!r}")
    print(f"throughput_nats={throughput!r}")
    print("removals=" + ",".join(f"{i}:{case}" for i, case in out.removal_trace))
    return 0


def _cmd_throughput(args) -> int:
    cfg = _load(args)
    net = _instance(cfg)
    fcir = build_fcir(net)
    protection = fcir if args.algorithm == "gp-poly" \
        else baseline_itl(fcir, args.alpha)
    result = run_algorithm2(net, protection)
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "trace.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["outer_iteration", "objective_nats"])
            for k, it in enumerate(result.iterates):
                writer.writerow([k, repr(it.objective)])
        print(path)
    print(f"algorithm={args.algorithm}")
    print(f"objective_nats={result.objective!r}")
    print(f"outer_iterations={len(result.iterates)}")
    print(f"converged={result.converged}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    if not isinstance(cfg, ScenarioConfig):
        raise ConfigError("sweeps need a [scenario] config")
    axes = [name for name, val in
            (("alpha", args.alpha), ("bs_separation", args.d),
             ("su_count", args.su_range)) if val is not None]
    if len(axes) != 1:
        raise ConfigError("give exactly one of --alpha, --d, --su-range")
    axis = axes[0]
    if axis == "alpha":
        values = parse_values(args.alpha)
    elif axis == "bs_separation":
        values = parse_values(args.d)
    else:
        values = parse_values(args.su_range, integer=True)
    if args.snapshots is not None:
        from dataclasses import replace
        cfg = replace(cfg, snapshots=args.snapshots)
    rows = run_experiment(cfg, args.algorithm, axis, values, jobs=args.jobs,
                          record_runtime=args.timing)
    os.makedirs(args.out, exist_ok=True)
    sweep_path = os.path.join(args.out, "sweep.csv")
    summary_path = os.path.join(args.out, "summary.csv")
    write_rows_csv(rows, sweep_path)
    write_summary_csv(summarize(rows), summary_path)
    print(sweep_path)
    print(summary_path)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:           # anything else is a runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
