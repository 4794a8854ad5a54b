"""Session, cluster and conflict analysis of collaborative editing logs."""

import json

from ._core import (
    DataError,
    EditLog,
    UsageError,
    __version__,
    mean_ci,
    parse_canonical,
    render_svg,
    run_cli,
    segment,
    synth_fixture,
)
from . import _core


def load(path):
    """Read a canonical .jsonl file; raises DataError on malformed records."""
    with open(path, encoding="utf-8") as f:
        logs, report = parse_canonical(f.read())
    if report["errors"]:
        line, reason = report["errors"][0]
        raise DataError(f"{path}:{line}: {reason}")
    return logs


def sweep(logs, gaps=(), jobs=1):
    return json.loads(_core.sweep_json(list(logs), list(gaps), jobs))["sweep"]


def extdist(logs, gap="30s", recommend=False, threshold=0.5):
    return json.loads(_core.extdist_json(list(logs), gap, recommend, threshold))["extdist"]


def conflicts(logs, windows=(), gap="30s", strict_def3=False, jobs=1):
    return json.loads(_core.conflicts_json(list(logs), list(windows), gap, strict_def3, jobs))["conflicts"]


__all__ = [
    "DataError",
    "EditLog",
    "UsageError",
    "__version__",
    "conflicts",
    "extdist",
    "load",
    "mean_ci",
    "parse_canonical",
    "render_svg",
    "run_cli",
    "segment",
    "sweep",
    "synth_fixture",
]
