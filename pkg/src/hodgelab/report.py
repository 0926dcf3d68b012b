"""Structured experiment reports with atomic JSON and CSV output."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional


def _clean(value):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(value, float):
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        return _clean(value.item())
    return value


@dataclass
class CheckRecord:
    """One judged quantity: ``passed`` is exactly ``residual <= tolerance``."""

    name: str
    anchor: str
    lhs: Any
    rhs: Any
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "lhs": self.lhs, "rhs": self.rhs,
                "residual": self.residual, "tolerance": self.tolerance, "pass": self.passed}

    def verdict_line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: residual={self.residual:.3e} tolerance={self.tolerance:.1e}"


@dataclass
class ExperimentReport:
    config: dict
    records: List[CheckRecord] = field(default_factory=list)
    tables: Dict[str, List[dict]] = field(default_factory=dict)
    receipts: Dict[str, Any] = field(default_factory=dict)
    info: Dict[str, Any] = field(default_factory=dict)
    started: float = field(default_factory=time.time)

    def check(self, name: str, anchor: str, residual: float, tolerance: float, lhs=None, rhs=None) -> CheckRecord:
        rec = CheckRecord(name, anchor, lhs, rhs, float(residual), float(tolerance))
        self.records.append(rec)
        return rec

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        """Everything except ``timestamp`` is a function of the configuration."""
        return _clean({
            "config": self.config,
            "passed": self.passed,
            "records": [r.to_dict() for r in self.records],
            "receipts": self.receipts,
            "info": self.info,
            "tables": sorted(self.tables),
            "timestamp": {
                "started": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(self.started)),
                "elapsedSeconds": round(time.time() - self.started, 3),
            },
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def verdict_lines(self) -> List[str]:
        return [r.verdict_line() for r in self.records]

    def write(self, out_dir: os.PathLike) -> List[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = [atomic_write(out / "report.json", self.to_json())]
        for name, rows in sorted(self.tables.items()):
            paths.append(atomic_write(out / f"{name}.csv", table_csv(rows)))
        return paths


def table_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    keys: List[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_value(row.get(k)) for k in keys})
    return buf.getvalue()


def _csv_value(v):
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


def atomic_write(path: Path, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def strip_timestamp(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timestamp"}


def ensure_writable(out_dir: Optional[os.PathLike]) -> None:
    """Raise OSError when ``out_dir`` cannot be created or written."""
    if out_dir is None:
        return
    out = Path(out_dir)
    if out.exists() and not out.is_dir():
        raise OSError(f"{out} exists and is not a directory")
    probe_parent = out if out.exists() else next((p for p in out.parents if p.exists()), Path("."))
    if not os.access(probe_parent, os.W_OK):
        raise OSError(f"{probe_parent} is not writable")
