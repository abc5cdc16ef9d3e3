"""Command line entry point: ``factornorm run <config> [--out DIR] [--threads N] [--seed S]``.

Exit status is 0 when every row succeeds, 2 on a configuration error and 3
when at least one row failed or raised.  Each run writes ``<name>.csv`` (the
deterministic table), ``<name>.json`` (config echo, timing and environment)
and, for experiments with structured per-row output, ``<name>.jsonl``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from ._core import BACKEND
from .catalog import Catalog
from .config import ConfigError, load_config
from .experiments import BUILDERS

log = logging.getLogger("factornorm")

EXIT_OK, EXIT_CONFIG, EXIT_ROWS = 0, 2, 3


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else f"{v:.12g}"
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _run_task(task):
    try:
        out = task.run()
    except Exception as exc:  # isolate the row; the table continues
        log.warning("row %s failed: %s", task.ident, exc)
        return {**task.ident, "ok": False, "status": f"error: {type(exc).__name__}: {exc}"}
    return {**task.ident, **out}


def execute(cfg, out_dir, threads=1):
    """Run a parsed config, write the artifacts and return the exit status."""
    try:
        cat = Catalog(cfg.catalog)
        plan = BUILDERS[cfg.experiment](cfg, cat)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc).strip("'\"")) from None
    started = time.time()
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(_run_task, plan.tasks))
    for row in rows:
        row.update({k: v for k, v in plan.extra_columns.items() if k not in row})
    if plan.finalize is not None:
        plan.finalize(rows)
    for row in rows:
        row.setdefault("status", "ok" if row.get("ok") else "fail")
    failed = sum(1 for r in rows if r["status"] != "ok")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cols = plan.columns + ["status"]
    with open(out_dir / f"{cfg.name}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in cols])
    if plan.details:
        with open(out_dir / f"{cfg.name}.jsonl", "w") as fh:
            for r in rows:
                if "_detail" in r:
                    fh.write(json.dumps(_jsonable(r["_detail"]), sort_keys=True) + "\n")
    meta = {
        "config": _jsonable(cfg.raw),
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "tolerances": cfg.tolerances,
        "threads": threads,
        "rows": len(rows),
        "failed": failed,
        "started": datetime.fromtimestamp(started, timezone.utc).isoformat(),
        "elapsed_s": round(time.time() - started, 3),
        "version": __version__,
        "backend": BACKEND,
        "columns": cols,
    }
    with open(out_dir / f"{cfg.name}.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    print(f"{cfg.experiment}: {len(rows) - failed}/{len(rows)} rows ok -> "
          f"{out_dir / (cfg.name + '.csv')}")
    return EXIT_ROWS if failed else EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="factornorm",
                                 description="Factorization-norm experiments.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment config (TOML or JSON)")
    run.add_argument("config")
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.raw = {**cfg.raw, "seed": args.seed}
        return execute(cfg, args.out, args.threads)
    except ConfigError as exc:
        print(f"factornorm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
