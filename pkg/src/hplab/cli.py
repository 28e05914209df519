"""Command line front end.

Every experiment in :data:`hplab.experiments.EXPERIMENTS` is a subcommand
whose flags mirror its parameters.  ``run`` executes a TOML manifest and
``pin`` records a run's headline value in the pinned-regressions store.

Exit status: 0 on success, 1 on usage errors (unknown command, bad
parameter, violated precondition), 2 on assertion failures (a pinned
regression or an invariant of the run) and internal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import errors
from .experiments import EXPERIMENTS, Context, Outcome
from .manifest import ExperimentManifest, load_manifest
from .pins import DEFAULT_TOLERANCE, PinStore

SCHEMA = "hpl/1"
EXIT_OK, EXIT_USAGE, EXIT_ASSERT = 0, 1, 2

#: Errors that mean the request itself was wrong; everything else is exit 2.
USAGE_ERRORS = (
    errors.InvalidArgument,
    errors.OutOfRange,
    errors.PreconditionViolation,
    errors.MarkerRequired,
    errors.InvalidSystem,
    errors.UnsupportedSet,
    errors.Unsupported,
    errors.DegenerateMeasure,
    errors.ClassificationUnstable,
    errors.SelectionFailure,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: usage error: {message}\n")


def threads() -> int:
    raw = os.environ.get("HPL_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise errors.InvalidArgument(f"HPL_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise errors.InvalidArgument(f"HPL_THREADS must be a positive integer, got {raw!r}")
    return n


# ---------------------------------------------------------------------------
# output


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.12g" % float(v)
    return str(v)


def format_csv(outcome: Outcome) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(outcome.columns)
    for row in outcome.rows:
        w.writerow([_cell(row.get(c, "")) for c in outcome.columns])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def summary_json(entry: ExperimentManifest, outcome: Outcome, pin_checks, assertions) -> dict:
    return {
        "schema": SCHEMA,
        "experiment_id": entry.id,
        "command": entry.command,
        "parameters": _jsonable(entry.parameters),
        "value": outcome.value,
        "summary": _jsonable(outcome.summary),
        "checkpoints": _jsonable(outcome.rows),
        "pinned_regressions": [{"key": c.key, "passed": c.passed, "message": c.message} for c in pin_checks],
        "assertions": [{"name": n, "passed": bool(ok), "detail": d} for n, ok, d in assertions],
        "passed": all(c.passed for c in pin_checks) and all(ok for _, ok, _ in assertions),
    }


# ---------------------------------------------------------------------------
# running


def run_entry(entry: ExperimentManifest, ctx: Context, pins: Optional[PinStore], check_pins: bool, out=None):
    """Run one experiment, write its outputs and return ``(passed, outcome)``."""
    exp = EXPERIMENTS[entry.command]
    outcome = exp.run(entry.parameters, ctx)
    checks = []
    if check_pins and pins is not None:
        for key in sorted(pins.for_experiment(entry.id)):
            checks.append(pins.check(key, entry.command, entry.parameters, outcome.value))
    text = format_csv(outcome)
    if entry.outputs.get("csv"):
        Path(entry.outputs["csv"]).write_text(text)
    else:
        (out or sys.stdout).write(text)
    doc = summary_json(entry, outcome, checks, outcome.assertions)
    if entry.outputs.get("json"):
        Path(entry.outputs["json"]).write_text(json.dumps(doc, indent=2) + "\n")
    for name, ok, detail in outcome.assertions:
        print(f"[{entry.id}] {'PASS' if ok else 'FAIL'} {name}: {detail}", file=sys.stderr)
    for c in checks:
        print(f"[{entry.id}] {'PASS' if c.passed else 'FAIL'} pin {c.message}", file=sys.stderr)
    return doc["passed"], outcome


def _context(table: Optional[str], limit: Optional[int], pool) -> Context:
    if table is not None and not Path(table).exists():
        if limit is None:
            raise errors.InvalidArgument(f"sieve cache {table} does not exist and no limit was given")
        table = None
    return Context(table_path=table, limit=limit, map=pool.map)


def _pins(path: Optional[str], base: Path) -> PinStore:
    return PinStore(Path(path) if path else base / "pins.json")


def cmd_experiment(args) -> int:
    exp = EXPERIMENTS[args.command]
    raw = {p.name: getattr(args, p.name) for p in exp.params}
    params = exp.validate(raw)
    entry = ExperimentManifest(args.id or args.command, args.command, params, {"csv": args.csv, "json": args.json})
    with ThreadPoolExecutor(threads()) as pool:
        ctx = _context(args.table, args.sieve_limit, pool)
        pins = _pins(args.pins, Path.cwd())
        passed, outcome = run_entry(entry, ctx, pins, args.check_pins)
    if args.pin:
        pins.record(args.pin, entry.id, entry.command, params, outcome.value, args.tolerance)
        pins.save()
    return EXIT_OK if passed else EXIT_ASSERT


def cmd_run(args) -> int:
    manifest = load_manifest(args.manifest)
    base = Path(args.manifest).parent
    pins = _pins(args.pins, base)
    selected = [e for e in manifest.experiments if args.id is None or e.id == args.id]
    if not selected:
        raise errors.InvalidArgument(f"no experiment with id {args.id!r}")
    ok = True
    with ThreadPoolExecutor(threads()) as pool:
        ctx = _context(args.table or manifest.table, args.sieve_limit or manifest.limit, pool)
        for entry in selected:
            passed, _ = run_entry(entry, ctx, pins, args.check_pins)
            ok = ok and passed
    return EXIT_OK if ok else EXIT_ASSERT


def cmd_pin(args) -> int:
    manifest = load_manifest(args.manifest)
    base = Path(args.manifest).parent
    pins = _pins(args.pins, base)
    entries = manifest.experiments
    if args.id is not None:
        entries = tuple(e for e in entries if e.id == args.id)
    if len(entries) != 1:
        raise errors.InvalidArgument("pin needs exactly one experiment; use --id to choose")
    entry = entries[0]
    with ThreadPoolExecutor(threads()) as pool:
        ctx = _context(args.table or manifest.table, args.sieve_limit or manifest.limit, pool)
        passed, outcome = run_entry(entry, ctx, None, False)
    if not passed:
        print(f"[{entry.id}] not pinned: the run failed its assertions", file=sys.stderr)
        return EXIT_ASSERT
    pin = pins.record(args.key, entry.id, entry.command, entry.parameters, outcome.value, args.tolerance)
    pins.save()
    print(f"[{entry.id}] pinned {args.key} = {pin.value:.12g} (tol {pin.tolerance:g}, fingerprint {pin.fingerprint[:12]})", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", help="sieve cache file (HPL1)")
    p.add_argument("--sieve-limit", dest="sieve_limit", type=int, help="minimum sieve size when no cache is used")
    p.add_argument("--pins", help="pinned-regressions store (default pins.json)")
    p.add_argument("--assert", dest="check_pins", action="store_true", help="check pinned values for this experiment id")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hplab", description="Desk-scale experiments on Hardy sequences, primes and ergodic averages.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, exp in EXPERIMENTS.items():
        p = sub.add_parser(name, help=exp.help, description=exp.help)
        for prm in exp.params:
            flag = "--" + prm.name.replace("_", "-")
            extra = " (required)" if prm.required else ("" if prm.default is None else f" (default {prm.default})")
            p.add_argument(flag, dest=prm.name, help=prm.help + extra)
        p.add_argument("--id", help="experiment id used in JSON output and pins")
        p.add_argument("--csv", help="write CSV here instead of stdout")
        p.add_argument("--json", help="write the JSON summary here")
        p.add_argument("--pin", metavar="KEY", help="record the headline value under KEY")
        p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE, help="absolute tolerance for --pin")
        _common(p)
        p.set_defaults(handler=cmd_experiment)
    r = sub.add_parser("run", help="run a TOML manifest")
    r.add_argument("manifest")
    r.add_argument("--id", help="run only this experiment")
    _common(r)
    r.set_defaults(handler=cmd_run)
    q = sub.add_parser("pin", help="run one manifest experiment and pin its value")
    q.add_argument("manifest")
    q.add_argument("--key", required=True)
    q.add_argument("--id", help="experiment to pin when the manifest has several")
    q.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    _common(q)
    q.set_defaults(handler=cmd_pin)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except USAGE_ERRORS as exc:
        print(f"hplab: usage error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except errors.HPLError as exc:
        print(f"hplab: failure [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
