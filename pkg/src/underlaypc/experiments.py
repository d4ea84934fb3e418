"""Monte Carlo experiment harness.

Runs the admission-control and throughput algorithms over seeded snapshot
ensembles, sweeping one axis (secondary user count, station separation or
the box scaling alpha), and collects per-snapshot outage/throughput metrics
into CSV rows plus a per-group summary of means.

Snapshots are independent: each gets its own Generator seeded with
cfg.seed + snapshot index, and the work is spread over a process pool with
results kept in task order, so output files are reproducible byte for byte.
Wall-clock timings are only recorded on request because they would break
that reproducibility.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .jpac import run_jpac, run_jpac_box
from .network import NetworkInstance, sinr_of
from .regions import baseline_itl, build_fcir
from .scenarios import ScenarioConfig, generate_snapshot
from .throughput import run_algorithm2
from .tpc import SUPPORT_RTOL, run_tpc

CSV_COLUMNS = ("sweep_value", "snapshot", "algorithm", "alpha", "pu_outage",
               "su_outage", "admitted", "throughput_nats", "runtime_ms")
SUMMARY_COLUMNS = ("sweep_value", "algorithm", "alpha", "snapshots", "errors",
                   "mean_pu_outage", "mean_su_outage", "mean_admitted",
                   "mean_throughput_nats")
ALGORITHMS = ("jpac", "jpac-box", "gp-poly", "gp-box")
ALPHA_DEPENDENT = frozenset({"jpac-box", "gp-box"})
SWEEP_AXES = ("su_count", "bs_separation", "alpha")


@dataclass(frozen=True)
class SnapshotMetrics:
    pu_outage: float
    su_outage: float
    admitted: int
    throughput_nats: float
    runtime_ms: float | None = None


@dataclass(frozen=True)
class ResultRow:
    sweep_value: float
    snapshot: int
    algorithm: str
    alpha: float | None
    metrics: SnapshotMetrics | None
    error: str | None = None


def outage_ratio(net: NetworkInstance, p, tier: str,
                 support_rtol: float = SUPPORT_RTOL) -> float:
    """Fraction of the tier's users below target at power vector p; an empty
    tier has outage 0."""
    if tier not in ("pu", "su"):
        raise ValueError("tier must be 'pu' or 'su'")
    idx = net.pu_indices if tier == "pu" else net.su_indices
    if idx.size == 0:
        return 0.0
    gamma = sinr_of(net, p)
    bad = gamma[idx] < net.target_sinr[idx] * (1.0 - support_rtol)
    return float(np.sum(bad)) / idx.size


def _su_throughput(net: NetworkInstance, p) -> float:
    gamma = sinr_of(net, p)
    return float(np.sum(np.log1p(gamma[net.su_indices])))


def _gp_metrics(net: NetworkInstance, result) -> SnapshotMetrics:
    """Realized operating point: primaries respond to the optimized SU powers
    with capped power control, then everyone is measured."""
    p = np.zeros(net.num_users)
    p[net.num_pu:] = result.p_su
    res = run_tpc(net, p0=p, active=net.pu_indices, tol=0.0, rtol=1e-12)
    p_final = res.p_stationary
    supported_su = int(np.sum(res.supported[net.num_pu:]))
    return SnapshotMetrics(
        pu_outage=outage_ratio(net, p_final, "pu"),
        su_outage=outage_ratio(net, p_final, "su"),
        admitted=supported_su,
        throughput_nats=_su_throughput(net, p_final))


def run_algorithm_once(net: NetworkInstance, algorithm: str,
                       alpha: float | None = None, fcir=None) -> SnapshotMetrics:
    """One algorithm on one instance; box variants need alpha."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if fcir is None:
        fcir = build_fcir(net)
    if algorithm in ALPHA_DEPENDENT:
        if alpha is None:
            raise ValueError(f"{algorithm} needs alpha")
        itl = baseline_itl(fcir, alpha)
    if algorithm == "jpac":
        out = run_jpac(net, fcir=fcir)
        return SnapshotMetrics(pu_outage=out.pu_outage_ratio,
                               su_outage=out.su_outage_ratio,
                               admitted=len(out.admitted),
                               throughput_nats=_su_throughput(net, out.p_final))
    if algorithm == "jpac-box":
        out = run_jpac_box(net, itl, fcir=fcir)
        return SnapshotMetrics(pu_outage=out.pu_outage_ratio,
                               su_outage=out.su_outage_ratio,
                               admitted=len(out.admitted),
                               throughput_nats=_su_throughput(net, out.p_final))
    protection = fcir if algorithm == "gp-poly" else itl
    return _gp_metrics(net, run_algorithm2(net, protection))


def _measure(net, algorithm, alpha, fcir, record_runtime):
    if not record_runtime:
        return run_algorithm_once(net, algorithm, alpha, fcir)
    t0 = time.perf_counter()
    metrics = run_algorithm_once(net, algorithm, alpha, fcir)
    elapsed = (time.perf_counter() - t0) * 1e3
    return replace(metrics, runtime_ms=elapsed)


def _task_rows(cfg: ScenarioConfig, snapshot: int, algorithms, values,
               alpha_sweep: bool, record_runtime: bool) -> list[ResultRow]:
    seed = cfg.seed + snapshot
    try:
        net = generate_snapshot(cfg, seed)
        fcir = build_fcir(net)
        setup_error = None
    except Exception as exc:           # recorded per snapshot, never fatal
        net = fcir = None
        setup_error = f"{type(exc).__name__}: {exc}"
    rows: list[ResultRow] = []
    cache: dict[str, SnapshotMetrics | str] = {}
    for value in values:
        for algorithm in algorithms:
            dependent = algorithm in ALPHA_DEPENDENT
            alphas: tuple[float | None, ...]
            if alpha_sweep:
                alphas = (value,) if dependent else (None,)
            else:
                alphas = cfg.alphas if dependent else (None,)
            for alpha in alphas:
                if setup_error is not None:
                    rows.append(ResultRow(value, snapshot, algorithm, alpha,
                                          None, setup_error))
                    continue
                if not dependent and algorithm in cache:
                    got = cache[algorithm]
                else:
                    try:
                        got = _measure(net, algorithm, alpha, fcir,
                                       record_runtime)
                    except Exception as exc:
                        got = f"{type(exc).__name__}: {exc}"
                    if not dependent:
                        cache[algorithm] = got
                if isinstance(got, str):
                    rows.append(ResultRow(value, snapshot, algorithm, alpha,
                                          None, got))
                else:
                    rows.append(ResultRow(value, snapshot, algorithm, alpha,
                                          got))
    return rows


def _run_task(args) -> list[ResultRow]:
    return _task_rows(*args)


def run_experiment(cfg: ScenarioConfig, algorithms, sweep: str, values,
                   jobs: int | None = None,
                   record_runtime: bool = False) -> list[ResultRow]:
    """Sweep `values` along the given axis, cfg.snapshots drops per value.

    Returns rows ordered by sweep value, snapshot, algorithm (alpha sweeps
    order by snapshot first inside each task but emit per-value rows in
    value order, so the file order is deterministic either way).
    """
    algorithms = tuple(algorithms)
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    if sweep not in SWEEP_AXES:
        raise ValueError(f"sweep axis must be one of {SWEEP_AXES}")
    values = tuple(values)
    if not values:
        raise ValueError("no sweep values given")
    tasks = []
    if sweep == "alpha":
        for snapshot in range(cfg.snapshots):
            tasks.append((cfg, snapshot, algorithms, values, True,
                          record_runtime))
    else:
        for value in values:
            if sweep == "su_count":
                mod = replace(cfg, num_su=int(value))
            else:
                mod = replace(cfg, bs_separation=float(value))
            for snapshot in range(cfg.snapshots):
                tasks.append((mod, snapshot, algorithms, (value,), False,
                              record_runtime))
    if jobs == 1:
        chunks = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_task, tasks, chunksize=1))
    return [row for chunk in chunks for row in chunk]


def summarize(rows) -> list[dict]:
    """Per (sweep_value, algorithm, alpha) means over error-free snapshots."""
    groups: dict[tuple, list[ResultRow]] = {}
    order: list[tuple] = []
    for row in rows:
        key = (row.sweep_value, row.algorithm, row.alpha)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        bunch = groups[key]
        good = [r.metrics for r in bunch if r.metrics is not None]
        entry = {"sweep_value": key[0], "algorithm": key[1], "alpha": key[2],
                 "snapshots": len(bunch), "errors": len(bunch) - len(good)}
        if good:
            entry["mean_pu_outage"] = sum(m.pu_outage for m in good) / len(good)
            entry["mean_su_outage"] = sum(m.su_outage for m in good) / len(good)
            entry["mean_admitted"] = sum(m.admitted for m in good) / len(good)
            entry["mean_throughput_nats"] = \
                sum(m.throughput_nats for m in good) / len(good)
        else:
            entry.update({"mean_pu_outage": None, "mean_su_outage": None,
                          "mean_admitted": None, "mean_throughput_nats": None})
        out.append(entry)
    return out


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_rows_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            m = row.metrics
            writer.writerow([
                _cell(row.sweep_value), _cell(row.snapshot), row.algorithm,
                _cell(row.alpha),
                _cell(m.pu_outage if m else None),
                _cell(m.su_outage if m else None),
                _cell(m.admitted if m else None),
                _cell(m.throughput_nats if m else None),
                _cell(m.runtime_ms if m else None)])


def write_summary_csv(summary, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for entry in summary:
            writer.writerow([_cell(entry[col]) for col in SUMMARY_COLUMNS])
