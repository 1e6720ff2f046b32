"""Ratio reports: one row per (function, level), CSV and JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["RatioRow", "RatioReport", "fmt"]

log = logging.getLogger(__name__)


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return repr(float(v))


@dataclass(frozen=True)
class RatioRow:
    theorem_id: str
    function_id: str
    resolution: int
    lhs: float
    rhs: float
    steps: int | None = None
    radius: float | None = None

    @property
    def degenerate(self) -> bool:
        return self.rhs == 0

    @property
    def ratio(self) -> float | None:
        return None if self.degenerate else self.lhs / self.rhs


@dataclass
class RatioReport:
    """Empirical constants of one inequality over a corpus.

    ``mode="drift"`` passes when every per-resolution max ratio is finite and
    grows by less than ``drift_factor`` between successive resolutions.
    ``mode="trend"`` groups rows by ``radius`` and passes when the max ratio
    does not increase (beyond ``slack``) as the radius shrinks.
    """

    theorem_id: str
    exponents: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    drift_factor: float = 1.25
    mode: str = "drift"
    slack: float = 0.10

    def add(self, function_id, resolution, lhs, rhs, steps=None, radius=None) -> RatioRow:
        row = RatioRow(self.theorem_id, function_id, int(resolution), float(lhs), float(rhs), steps, radius)
        if row.degenerate:
            log.info("%s: %s at resolution %s has zero denominator (lhs=%r); excluded", self.theorem_id, function_id, resolution, row.lhs)
        self.rows.append(row)
        return row

    def _grouped(self, key) -> list[tuple]:
        groups: dict = {}
        for r in self.rows:
            k = getattr(r, key)
            if r.ratio is not None:
                groups[k] = max(groups.get(k, -math.inf), r.ratio)
            else:
                groups.setdefault(k, -math.inf)
        return [(k, (v if v > -math.inf else None)) for k, v in groups.items()]

    @property
    def history(self) -> list[tuple]:
        return sorted(self._grouped("resolution"), key=lambda kv: kv[0])

    @property
    def radius_sweep(self) -> list[tuple]:
        return sorted(((k, v) for k, v in self._grouped("radius") if k is not None), key=lambda kv: -kv[0])

    @property
    def max_ratio(self) -> float | None:
        vals = [r.ratio for r in self.rows if r.ratio is not None]
        return max(vals) if vals else None

    @property
    def degenerate(self) -> list[str]:
        return [f"{r.function_id}@{r.resolution}" for r in self.rows if r.degenerate]

    def drifts(self) -> list[float]:
        h = [v for _, v in self.history]
        out = []
        for a, b in zip(h, h[1:]):
            if a is None or b is None:
                out.append(math.inf)
            elif a == 0:
                # an identically zero column does not drift
                out.append(1.0 if b == 0 else math.inf)
            else:
                out.append(b / a)
        return out

    def trend(self) -> list[float]:
        s = [v for _, v in self.radius_sweep]
        return [b / a if a else (0.0 if not b else math.inf) for a, b in zip(s, s[1:])]

    @property
    def passed(self) -> bool:
        if self.mode == "trend":
            sweep = [v for _, v in self.radius_sweep]
            if not sweep or any(v is None or not math.isfinite(v) for v in sweep):
                return False
            return all(b <= a * (1 + self.slack) for a, b in zip(sweep, sweep[1:]))
        hist = [v for _, v in self.history]
        if not hist or any(v is None or not math.isfinite(v) for v in hist):
            return False
        return all(d < self.drift_factor for d in self.drifts())

    # -- serialization --------------------------------------------------------

    def csv_text(self) -> str:
        keys = list(self.exponents)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theorem_id", "function_id", "resolution", "steps", "radius", "lhs", "rhs", "ratio", "degenerate"] + keys)
        for r in self.rows:
            w.writerow(
                [r.theorem_id, r.function_id, r.resolution, fmt(r.steps), fmt(r.radius), fmt(r.lhs), fmt(r.rhs), fmt(r.ratio), fmt(r.degenerate)]
                + [fmt(self.exponents[k]) for k in keys]
            )
        return buf.getvalue()

    def summary(self) -> dict:
        out = {
            "theorem_id": self.theorem_id,
            "max_ratio": self.max_ratio,
            "history": [{"resolution": k, "max_ratio": v} for k, v in self.history],
            "pass": self.passed,
            "mode": self.mode,
            "drift_factor": self.drift_factor,
            "degenerate": self.degenerate,
            "exponents": {k: float(v) for k, v in self.exponents.items()},
        }
        if self.mode == "trend":
            out["radius_sweep"] = [{"radius": k, "max_ratio": v} for k, v in self.radius_sweep]
            out["slack"] = self.slack
        return out

    def write(self, out_dir, stem: str | None = None) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = stem or self.theorem_id
        csv_path, json_path = out_dir / f"{stem}.csv", out_dir / f"{stem}.json"
        csv_path.write_text(self.csv_text())
        json_path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
        return [csv_path, json_path]
