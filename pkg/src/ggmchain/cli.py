"""Command-line entry point: ``ggmchain {ground-scan,quench,ggm,validate}``.

Data goes to files (or, for ``ggm``, JSON on stdout); progress and errors go
to stderr. Exit codes: 0 success, 1 configuration error, 2 partial failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .eigensolver import LanczosOpts
from .errors import GgmError
from .experiments import (
    DEFAULT_ALPHAS,
    DEFAULT_DELTAS,
    DEFAULT_TIMES,
    FM_QUENCH_SPREAD_CALIBRATED,
    FM_QUENCH_SPREAD_THRESHOLD,
    Regime,
    ScanGrid,
    Status,
    ground_scan,
    model_params,
    quench_scan,
    write_ground_csv,
    write_manifest,
    write_quench_csv,
)
from .hamiltonian import format_alpha, parse_alpha
from .propagator import PropagatorOpts
from .state import load_state
from .validation import run_checks

log = logging.getLogger("ggmchain")

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


class ConfigError(Exception):
    pass


def _as_list(value):
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _split(text: str):
    return [x.strip() for x in text.split(",") if x.strip()]


def load_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    if args.n is not None:
        cfg["n"] = args.n
    if args.alpha is not None:
        cfg["alpha"] = _split(args.alpha)
    if args.delta is not None:
        cfg["delta"] = [float(x) for x in _split(args.delta)]
    if args.regime is not None:
        cfg["regime"] = args.regime
    if args.out is not None:
        cfg["out"] = args.out
    return cfg


def _regime(cfg) -> Regime:
    if "regime" in cfg:
        return Regime.parse(cfg["regime"])
    jx, jy = cfg.get("jx"), cfg.get("jy")
    if jx is not None and jx == jy and abs(float(jx)) == 1.0:
        return Regime.FM if float(jx) < 0 else Regime.AFM
    raise ConfigError("config needs 'regime' (FM or AFM) or jx = jy = +-1")


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("GGM_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"GGM_WORKERS must be an integer, got {env!r}") from None
    return 1


def _out_paths(cfg, default_name):
    out = Path(cfg.get("out", default_name))
    if out.parent and not out.parent.exists():
        raise ConfigError(f"output directory {out.parent} does not exist")
    return out, out.with_suffix(".manifest.json")


def _alphas(cfg):
    return [parse_alpha(a) for a in _as_list(cfg.get("alpha", list(DEFAULT_ALPHAS)))]


def _json_alphas(alphas):
    return [format_alpha(a) if math.isinf(a) else a for a in alphas]


def _times(cfg):
    if "times" in cfg:
        return [float(t) for t in cfg["times"]]
    if "t_max" in cfg:
        dt = float(cfg.get("dt", 0.05))
        steps = int(round(float(cfg["t_max"]) / dt))
        return [round(k * dt, 12) for k in range(steps + 1)]
    return list(DEFAULT_TIMES)


def cmd_ground_scan(args) -> int:
    try:
        cfg = load_config(args)
        regime = _regime(cfg)
        n = int(cfg["n"]) if "n" in cfg else 12
        alphas = _alphas(cfg)
        deltas = [float(d) for d in _as_list(cfg.get("delta", list(DEFAULT_DELTAS)))]
        opts = LanczosOpts.from_json(cfg)
        grid = ScanGrid(n, regime, tuple(deltas), tuple(alphas), opts)
        for a, d in grid.points():
            model_params(regime, n, a, d)
        workers = _workers(args)
        csv_path, manifest_path = _out_paths(cfg, f"ground_{regime.value}_n{n}.csv")
    except (ConfigError, ValueError, TypeError, GgmError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    start = time.perf_counter()
    log.info("ground scan: %s N=%d, %d points, %d workers", regime.value, n, len(grid.points()), workers)
    records = ground_scan(grid, workers=workers)
    write_ground_csv(records, csv_path)
    failed = [r for r in records if r.status is Status.FAILED]
    for r in failed:
        log.warning("point alpha=%s delta=%g failed: %s", format_alpha(r.alpha), r.delta, r.message)
    resolved = {
        "command": "ground-scan", "regime": regime.value, "n": n,
        "alpha": _json_alphas(sorted(alphas)), "delta": sorted(deltas),
        "solver": {
            "tolerance": opts.tolerance, "max_krylov_dim": opts.max_krylov_dim,
            "seed": opts.seed, "reorthogonalize": opts.reorthogonalize,
            "degeneracy_tol": opts.degeneracy_tol,
        },
        "workers": workers, "out": str(csv_path),
    }
    write_manifest(
        manifest_path, resolved, {"lanczos": opts.seed, "gap_run": opts.seed + 1},
        time.perf_counter() - start,
        {"points": len(records), "failed": len(failed),
         "degenerate": sum(r.status is Status.DEGENERATE for r in records)},
    )
    log.info("wrote %s and %s", csv_path, manifest_path)
    return EXIT_PARTIAL if failed else EXIT_OK


def _quench_job(job):
    params, times, opts = job
    try:
        return quench_scan(params, times, opts), None
    except GgmError as exc:
        return None, str(exc)


def cmd_quench(args) -> int:
    try:
        cfg = load_config(args)
        regime = _regime(cfg)
        n = int(cfg["n"]) if "n" in cfg else 10
        alphas = _alphas(cfg)
        deltas = [float(d) for d in _as_list(cfg.get("delta", [0.5]))]
        times = _times(cfg)
        opts = PropagatorOpts.from_json(cfg)
        params = [model_params(regime, n, a, d) for a in sorted(alphas) for d in sorted(deltas)]
        if not times or times[0] != 0.0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("times must start at 0 and increase strictly")
        workers = _workers(args)
        csv_path, manifest_path = _out_paths(cfg, f"quench_{regime.value}_n{n}.csv")
    except (ConfigError, ValueError, TypeError, GgmError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    start = time.perf_counter()
    log.info("quench: %s N=%d, %d traces, %d time points", regime.value, n, len(params), len(times))
    jobs = [(p, times, opts) for p in params]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_quench_job, jobs))
    else:
        outcomes = [_quench_job(j) for j in jobs]
    traces, failed = [], []
    for p, (trace, error) in zip(params, outcomes):
        if error is None:
            traces.append((regime, p, trace))
        else:
            log.warning("trace alpha=%s delta=%g failed: %s", format_alpha(p.alpha), p.delta, error)
            failed.append({"alpha": format_alpha(p.alpha), "delta": p.delta, "error": error})
    write_quench_csv(traces, csv_path)
    resolved = {
        "command": "quench", "regime": regime.value, "n": n,
        "alpha": _json_alphas(sorted(alphas)), "delta": sorted(deltas), "times": times,
        "propagator": {
            "krylov_dim": opts.krylov_dim, "step_tolerance": opts.step_tolerance,
            "max_substeps": opts.max_substeps,
        },
        "initial_state": "product_plus", "workers": workers, "out": str(csv_path),
    }
    write_manifest(
        manifest_path, resolved, {}, time.perf_counter() - start,
        {"failed": failed,
         "fm_spread_threshold": FM_QUENCH_SPREAD_THRESHOLD,
         "fm_spread_calibrated": FM_QUENCH_SPREAD_CALIBRATED},
    )
    log.info("wrote %s and %s", csv_path, manifest_path)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_ggm(args) -> int:
    from .entanglement import ggm

    try:
        psi = load_state(args.state)
    except (OSError, ValueError, GgmError) as exc:
        print(f"cannot read state: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = ggm(psi)
    except GgmError as exc:
        print(f"ggm failed: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    print(json.dumps(result.to_json()))
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_checks(seed=args.seed, mutate=args.mutate)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return 1
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ggmchain", description=__doc__.splitlines()[0])
    parser.add_argument("-q", "--quiet", action="store_true", help="only warnings and errors on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def run_opts(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--n", type=int)
        p.add_argument("--alpha", help="comma-separated exponents; 'nn' for nearest neighbour only")
        p.add_argument("--delta", help="comma-separated anisotropies")
        p.add_argument("--regime", choices=["FM", "AFM", "fm", "afm"])
        p.add_argument("--out", help="CSV path; the manifest goes next to it")
        p.add_argument("--workers", type=int, help="job pool size (default $GGM_WORKERS or 1)")

    p = sub.add_parser("ground-scan", help="ground-state GGM over a (delta, alpha) grid")
    run_opts(p)
    p.set_defaults(func=cmd_ground_scan)

    p = sub.add_parser("quench", help="GGM growth after a quench from the all-plus state")
    run_opts(p)
    p.set_defaults(func=cmd_quench)

    p = sub.add_parser("ggm", help="GGM of a serialized state file, printed as JSON")
    p.add_argument("state")
    p.set_defaults(func=cmd_ggm)

    p = sub.add_parser("validate", help="run the oracle cross-check suite")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--mutate", choices=["coupling"], help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
