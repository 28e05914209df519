"""Experiment manifests in TOML.

A manifest holds one experiment at the top level or a list of them::

    table = "lambda.bin"          # optional sieve cache
    limit = 2000000               # optional minimum table size

    [[experiment]]
    id = "gaps"
    command = "compare"
    [experiment.parameters]
    fn = "t^1.5"
    system = "rot:sqrt2-1"
    w = [1, 2, 3]
    N = 100000
    [experiment.outputs]
    csv = "gaps.csv"
    json = "gaps.json"

Relative paths resolve against the manifest's directory.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import InvalidArgument
from .experiments import EXPERIMENTS


@dataclass(frozen=True)
class ExperimentManifest:
    id: str
    command: str
    parameters: dict
    outputs: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Manifest:
    experiments: tuple
    table: Optional[str] = None
    limit: Optional[int] = None


def _resolve(base: Path, p: Optional[str]) -> Optional[str]:
    if p is None:
        return None
    q = Path(p)
    return str(q if q.is_absolute() else base / q)


def _entry(raw: dict, base: Path, index: int) -> ExperimentManifest:
    allowed = {"id", "command", "parameters", "outputs"}
    extra = set(raw) - allowed
    if extra:
        raise InvalidArgument(f"experiment {index}: unknown keys {sorted(extra)}")
    command = raw.get("command")
    if command not in EXPERIMENTS:
        raise InvalidArgument(f"experiment {index}: unknown command {command!r}")
    exp_id = str(raw.get("id", f"{command}-{index}"))
    params = EXPERIMENTS[command].validate(dict(raw.get("parameters", {})))
    for key in ("out",):
        if params.get(key):
            params[key] = _resolve(base, params[key])
    outputs = {k: _resolve(base, v) for k, v in dict(raw.get("outputs", {})).items()}
    bad = set(outputs) - {"csv", "json"}
    if bad:
        raise InvalidArgument(f"experiment {exp_id}: unknown outputs {sorted(bad)}")
    return ExperimentManifest(exp_id, command, params, outputs)


def load_manifest(path) -> Manifest:
    """Parse and validate a manifest; every experiment's parameters are checked here.

    Raises:
        InvalidArgument: on malformed TOML, unknown commands, parameters or keys.
    """
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except OSError as exc:
        raise InvalidArgument(f"cannot read manifest {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise InvalidArgument(f"manifest {path} is not valid TOML: {exc}") from None
    base = path.parent
    top = {k: v for k, v in raw.items() if k not in ("table", "limit", "experiment")}
    if "experiment" in raw:
        if top:
            raise InvalidArgument("a manifest with [[experiment]] tables takes no top-level experiment keys")
        entries = [_entry(e, base, i) for i, e in enumerate(raw["experiment"])]
    else:
        entries = [_entry(top, base, 0)]
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise InvalidArgument(f"duplicate experiment ids in {path}")
    limit = raw.get("limit")
    return Manifest(tuple(entries), _resolve(base, raw.get("table")), None if limit is None else int(limit))
