"""CSV result files and the JSON run manifest.

One CSV per metric family, bit-stable headers:
  attempts_vs_k0.csv  one row per dynamic run
  res_vs_st.csv       one row per observed contender count, bound attached
  dist_perf.csv       one row per distance bin
  bound.csv           analytic resolution bound, no simulation involved
Floats are written with 12 significant digits so rows parse back to the
same values.
"""

import csv
import json
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .config import format_config
from .metrics import MetricsTable
from .protocols import p_res_bound
from .simulator import SimParams

__all__ = [
    "ATTEMPTS_HEADER",
    "BOUND_HEADER",
    "DIST_HEADER",
    "RES_ST_HEADER",
    "RunRecord",
    "make_out_dir",
    "version_string",
    "write_results",
]

ATTEMPTS_HEADER = [
    "protocol", "interference", "K0", "avg_attempts_all",
    "avg_attempts_success", "fail_prob", "avg_contenders",
]
RES_ST_HEADER = ["protocol", "interference", "st", "p_res", "n_samples", "bound"]
DIST_HEADER = [
    "protocol", "interference", "bin_lo_m", "bin_hi_m", "avg_attempts",
    "fail_prob", "p_res", "avg_power_norm", "avg_energy_bw",
]
BOUND_HEADER = ["n", "p_res_bound"]


@dataclass(frozen=True)
class RunRecord:
    """One finished simulation plus the axis family it belongs to."""

    family: str  # 'k0', 'st' or 'distance'
    label: str
    params: SimParams
    table: MetricsTable

    def __post_init__(self):
        if self.family not in ("k0", "st", "distance"):
            raise ValueError(f"unknown result family {self.family!r}")


def _fmt(x) -> str:
    if isinstance(x, (int, bool)):
        return str(x)
    return "%.12g" % x


def _flag(interference: bool) -> str:
    return "true" if interference else "false"


def make_out_dir(root, command: str) -> Path:
    """Timestamped subdirectory of root; suffixed, never clobbered."""
    root = Path(root)
    stamp = time.strftime("%Y%m%d-%H%M%S", time.gmtime())
    base = f"{stamp}-{command}"
    for i in range(1000):
        cand = root / (base if i == 0 else f"{base}-{i + 1}")
        try:
            cand.mkdir(parents=True, exist_ok=False)
            return cand
        except FileExistsError:
            continue
    raise FileExistsError(f"cannot find a fresh directory under {root} for {base}")


def version_string() -> str:
    """git describe when available, package version otherwise."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True, text=True, timeout=10,
            cwd=Path(__file__).resolve().parent,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except OSError:
        pass
    return f"v{__version__}"


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_results(records, out_dir, *, seed: int, command: str,
                  bound_rows=None, wall_time_s=None) -> list[Path]:
    """Write the family CSVs for records plus manifest.json into out_dir.

    bound_rows, when given, is an iterable of n values for bound.csv.
    Returns the written paths; raises OSError with the path on I/O failure.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_family: dict[str, list[RunRecord]] = {}
    for rec in records:
        by_family.setdefault(rec.family, []).append(rec)

    written: list[Path] = []

    if "k0" in by_family:
        rows = []
        for rec in by_family["k0"]:
            t, p = rec.table, rec.params
            rows.append([
                p.protocol, _flag(p.interference), p.k0,
                _fmt(t.avg_attempts_all), _fmt(t.avg_attempts_success),
                _fmt(t.fail_prob), _fmt(t.avg_contenders),
            ])
        path = out_dir / "attempts_vs_k0.csv"
        _write_csv(path, ATTEMPTS_HEADER, rows)
        written.append(path)

    if "st" in by_family:
        rows = []
        for rec in by_family["st"]:
            p = rec.params
            for n, p_res, n_samples in rec.table.st_rows():
                rows.append([
                    p.protocol, _flag(p.interference), n,
                    _fmt(p_res), n_samples, _fmt(p_res_bound(n)),
                ])
        path = out_dir / "res_vs_st.csv"
        _write_csv(path, RES_ST_HEADER, rows)
        written.append(path)

    if "distance" in by_family:
        rows = []
        for rec in by_family["distance"]:
            p = rec.params
            for lo, hi, att, fail, p_res, pw, en in rec.table.bin_rows():
                rows.append([
                    p.protocol, _flag(p.interference), _fmt(lo), _fmt(hi),
                    _fmt(att), _fmt(fail), _fmt(p_res), _fmt(pw), _fmt(en),
                ])
        path = out_dir / "dist_perf.csv"
        _write_csv(path, DIST_HEADER, rows)
        written.append(path)

    if bound_rows is not None:
        rows = [[n, _fmt(p_res_bound(n))] for n in bound_rows]
        path = out_dir / "bound.csv"
        _write_csv(path, BOUND_HEADER, rows)
        written.append(path)

    manifest = {
        "command": command,
        "seed": seed,
        "version": version_string(),
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "wall_time_s": wall_time_s,
        "files": [p.name for p in written],
        "runs": [
            {"label": rec.label, "family": rec.family, "config": format_config(rec.params)}
            for rec in records
        ],
    }
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    written.append(path)
    return written
