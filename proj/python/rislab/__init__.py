"""Uplink rate analysis and phase-shift optimization for RIS-aided cell-free massive MIMO."""

from __future__ import annotations

import json
from pathlib import Path

from ._rislab import Deployment, baseline_json, dbm_to_watt, watt_to_dbm

__all__ = ["Deployment", "baseline", "dbm_to_watt", "from_dict", "load", "watt_to_dbm"]


def from_dict(config: dict) -> Deployment:
    """Builds a deployment from a scenario dict; missing keys keep the baseline values."""
    return Deployment(json.dumps(config))


def load(path: str | Path) -> Deployment:
    return Deployment(Path(path).read_text())


def baseline(**overrides) -> Deployment:
    """Baseline deployment with top-level scenario keys replaced."""
    config = json.loads(baseline_json())
    config.update(overrides)
    return from_dict(config)
