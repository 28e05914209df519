"""Pinned regression values keyed by name, with parameter fingerprints.

A pin records the headline value of one experiment run together with a
SHA-256 fingerprint of its command and validated parameters.  Asserting a
pin against a new run fails when the fingerprint differs (the run is not
the one that was pinned) or when the value moved beyond the tolerance.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Union

DEFAULT_TOLERANCE = 1e-6


def canonical(obj):
    """JSON-ready form with tuples turned into lists and floats kept exact."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, float):
        return float.hex(obj) if not obj.is_integer() else int(obj)
    return obj


def fingerprint(command: str, params: dict) -> str:
    text = json.dumps({"command": command, "parameters": canonical(params)}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class Pin:
    experiment: str
    command: str
    value: float
    tolerance: float
    fingerprint: str


@dataclass(frozen=True)
class PinCheck:
    key: str
    passed: bool
    message: str


class PinStore:
    """A JSON file mapping keys to :class:`Pin` records."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.pins: dict[str, Pin] = {}
        if self.path.exists():
            raw = json.loads(self.path.read_text())
            self.pins = {k: Pin(**v) for k, v in raw.get("pins", {}).items()}

    def save(self) -> None:
        data = {"schema": "hpl/1", "pins": {k: asdict(v) for k, v in sorted(self.pins.items())}}
        self.path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")

    def record(self, key: str, experiment: str, command: str, params: dict, value: float, tolerance: float = DEFAULT_TOLERANCE) -> Pin:
        pin = Pin(experiment, command, float(value), float(tolerance), fingerprint(command, params))
        self.pins[key] = pin
        return pin

    def for_experiment(self, experiment: str) -> dict[str, Pin]:
        return {k: p for k, p in self.pins.items() if p.experiment == experiment}

    def check(self, key: str, command: str, params: dict, value: Optional[float]) -> PinCheck:
        pin = self.pins.get(key)
        if pin is None:
            return PinCheck(key, False, f"no pin named {key!r}")
        fp = fingerprint(command, params)
        if pin.command != command or pin.fingerprint != fp:
            return PinCheck(key, False, f"fingerprint mismatch for {key!r}: pinned {pin.fingerprint[:12]}, run {fp[:12]}")
        if value is None or not math.isfinite(value):
            return PinCheck(key, False, f"run produced no value for {key!r}")
        diff = abs(value - pin.value)
        ok = diff <= pin.tolerance
        return PinCheck(key, ok, f"{key}: {value:.12g} vs pinned {pin.value:.12g} (|diff| {diff:.3g}, tol {pin.tolerance:g})")
