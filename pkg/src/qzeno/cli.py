"""Command-line front end: ``qzeno run | sweep | fig4``.

Exit codes: 0 success, 2 config error, 3 simulation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import ScenarioSpec, load_document, parse_document
from .dynamics import IntegratorConfig
from .errors import ConfigInvalid, QZenoError
from .scenarios import CANONICAL_SWEEP, fig4_rows

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3

SERIES_FIXED = ("t",)
FIG4_COLUMNS = ("n", "simplified", "full", "no_measurement")


class SimulationFailed(Exception):
    def __init__(self, label, cause):
        super().__init__(label, str(cause))
        self.label = label

    def __str__(self):
        return f"scenario '{self.args[0]}': {self.args[1]}"


def fmt(v) -> str:
    """CSV cell: shortest round-trip repr for floats (at most 17 significant digits)."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False, allow_nan=False)
        fh.write("\n")


def series_columns(result) -> list[str]:
    levels = sorted(result.populations, key=lambda k: int(k[1:]))
    return ["t", *levels, "trace", "purity"]


def _run_spec(spec: ScenarioSpec):
    try:
        return spec.run()
    except QZenoError as exc:
        raise SimulationFailed(spec.kind, exc) from None


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _result_json(result) -> dict:
    out = result.to_dict()
    out["tool_version"] = __version__
    return out


def cmd_run(args):
    specs, sweep = parse_document(load_document(args.config), seed=args.seed, steps=args.steps)
    if sweep is not None:
        raise ConfigInvalid("sweep", "'run' takes a single scenario; use 'sweep' for swept documents")
    spec = specs[0]
    result = _run_spec(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format == "json":
        path = out / "result.json"
        write_json(path, _result_json(result))
        written.append(path)
    else:
        cols = series_columns(result)
        series = result.to_dict()["series"]
        path = out / "series.csv"
        write_csv(path, cols, zip(*(series[c] for c in cols)))
        written.append(path)
        path = out / "summary.csv"
        write_csv(path, ["scenario", *result.summary], [[result.scenario, *result.summary.values()]])
        written.append(path)
    return written, spec.echo()


def cmd_sweep(args):
    doc = load_document(args.config)
    specs, sweep = parse_document(doc, seed=args.seed, steps=args.steps)
    if sweep is None:
        raise ConfigInvalid("sweep", "a [sweep] table with 'parameter' and 'values' is required")
    name, values = sweep
    results = _map(_run_spec, specs, args.jobs)
    keys = list(results[0].summary)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep.csv"
    write_csv(path, [name, *keys], ([v, *(r.summary[k] for k in keys)] for v, r in zip(values, results)))
    echo = specs[0].echo()
    echo["sweep"] = {"parameter": name, "values": values}
    return [path], echo


def _fig4_row(n_and_steps):
    n, steps = n_and_steps
    try:
        integ = IntegratorConfig(steps) if steps else None
        return fig4_rows([n], integrator=integ)[0]
    except QZenoError as exc:
        raise SimulationFailed(f"fig4 n={n}", exc) from None


def cmd_fig4(args):
    rows = _map(_fig4_row, [(n, args.steps) for n in CANONICAL_SWEEP], args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "fig4.csv"
    write_csv(path, FIG4_COLUMNS, ([r[c] for c in FIG4_COLUMNS] for r in rows))
    echo = {"fig4": {"n_values": list(CANONICAL_SWEEP), "omega_rf": 1.0, "steps": args.steps or 5000}}
    return [path], echo


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qzeno", description="Quantum Zeno effect simulations.")
    p.add_argument("--version", action="version", version=f"qzeno {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override the seed of stochastic scenarios")
    common.add_argument("--steps", type=int, default=None, help="RK4 steps per drive interval")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run one scenario")
    r.add_argument("config")
    r.add_argument("--format", choices=("csv", "json"), default="json")
    s = sub.add_parser("sweep", parents=[common], help="run a parameter sweep")
    s.add_argument("config")
    sub.add_parser("fig4", parents=[common], help="transition probability versus pulse count")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.steps is not None and args.steps < 1:
        print("config error: --steps: must be a positive integer", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and args.seed < 0:
        print("config error: --seed: must be a non-negative integer", file=sys.stderr)
        return EXIT_CONFIG
    handler = {"run": cmd_run, "sweep": cmd_sweep, "fig4": cmd_fig4}[args.command]
    start = time.perf_counter()
    try:
        written, echo = handler(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationFailed as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    manifest = {
        "tool_version": __version__,
        "command": args.command,
        "config_echo": echo,
        "outputs": [str(p) for p in written],
        "wall_time": time.perf_counter() - start,
    }
    write_json(Path(args.out) / "manifest.json", manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
