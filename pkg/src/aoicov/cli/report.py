"""Plain-text summary of experiment CSVs."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import TextIO

from ..errors import AoicovError

# metric columns summarised per table, in display order
_METRICS = ["aoi_analytic", "aoi_sim", "rel_err", "violation_analytic", "violation_sim",
            "abs_err", "coverage_analytic", "energy_analytic", "energy_sim", "p_star",
            "pt_star_dbm", "energy_at_opt", "observed", "delta"]
_AXES = ["pt_dbm", "max_retx", "check"]


class ReportError(AoicovError):
    pass


def _num(text: str) -> float | None:
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        return None


def _read(path: Path) -> tuple[list[str], list[dict]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ReportError(f"{path}: empty file, no header row")
        return list(reader.fieldnames), list(reader)


def _axis(columns: list[str]) -> str:
    for a in _AXES:
        if a in columns:
            return a
    raise ReportError(f"missing sweep axis column; expected one of {', '.join(_AXES)}")


def summarize(path: str | Path, out: TextIO) -> None:
    path = Path(path)
    columns, rows = _read(path)
    axis = _axis(columns)
    metrics = [m for m in _METRICS if m in columns]
    if not metrics:
        raise ReportError(f"{path}: no known metric columns in header {columns}")
    out.write(f"== {path.name} ({len(rows)} rows)\n")
    if not rows:
        out.write("  no rows\n")
        return

    groups: dict[str, list[dict]] = {}
    for r in rows:
        groups.setdefault(r.get("series", "") or "all", []).append(r)

    for label, grp in groups.items():
        out.write(f"  series {label}:\n")
        for m in metrics:
            pts = [(v, r[axis]) for r in grp if (v := _num(r[m])) is not None and
                   not math.isnan(v)]
            if not pts:
                out.write(f"    {m}: no values\n")
                continue
            lo = min(pts, key=lambda t: t[0])
            hi = max(pts, key=lambda t: t[0])
            out.write(f"    {m}: min {lo[0]:.6g} at {axis}={lo[1]}, "
                      f"max {hi[0]:.6g} at {axis}={hi[1]}\n")
        if "feasible" in columns:
            feas = [r for r in grp if r["feasible"] == "true"]
            if not feas:
                out.write("    100% infeasible\n")
            else:
                best = min(feas, key=lambda r: float(r["energy_analytic"]))
                out.write(f"    energy-minimising P_t: {float(best['pt_dbm']):.4g} dBm "
                          f"(energy {float(best['energy_analytic']):.6g})\n")
        if "infeasible" in columns:
            bad = sum(r["infeasible"] == "true" for r in grp)
            if bad == len(grp):
                out.write("    100% infeasible\n")
            elif bad:
                out.write(f"    {bad} of {len(grp)} points infeasible\n")
        if "passed" in columns:
            failed = [r["check"] for r in grp if r["passed"] != "true"]
            out.write(f"    checks passed: {len(grp) - len(failed)}/{len(grp)}\n")
            for name in failed:
                out.write(f"    FAILED {name}\n")


def report_summary(paths: list[str | Path], out: TextIO) -> None:
    for p in paths:
        summarize(p, out)
