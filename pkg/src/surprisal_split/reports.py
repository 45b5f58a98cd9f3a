"""Report containers and deterministic CSV/JSON serialization.

Every emitter here is bit-stable: fixed column order, floats at 6
significant digits, LF line endings, provenance echoed as '# key=value'
lines (CSV) or a "provenance" object (JSON).
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .decomposition import Decomposition
from .errors import SchemaError

Provenance = tuple[tuple[str, str], ...]

SWEEP_CSV_HEADER = ("lambda", "condition", "mean_A", "mean_B", "se_A", "se_B", "n")
DECOMP_CSV_HEADER = (
    "item_id", "condition", "surprisal_S", "heuristic_A", "discrepancy_B",
    "posterior_entropy", "veridical_posterior", "veridical_rank",
)
EFFECTS_CSV_HEADER = ("condition", "mean_A_diff", "mean_B_diff", "se_A", "se_B", "n")
COMPARISON_CSV_HEADER = ("condition", "n", "mean_cloze", "mean_surprisal")
FIT_CSV_HEADER = (
    "predictor", "response", "slope", "intercept", "std_error", "t_stat",
    "n", "dof", "standardized",
)


def fmt(x) -> str:
    """Fixed float formatting: 6 significant digits; None -> empty."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".6g")


def _jnum(x):
    """JSON value at the same 6-significant-digit precision as CSV."""
    if x is None:
        return None
    return float(fmt(x))


@dataclass(frozen=True)
class DecompositionReport:
    rows: tuple[Decomposition, ...]
    provenance: Provenance = ()

    def csv_table(self):
        return DECOMP_CSV_HEADER, [
            [
                d.item_id, d.condition, fmt(d.surprisal_S), fmt(d.heuristic_A),
                fmt(d.discrepancy_B), fmt(d.posterior_entropy),
                fmt(d.veridical_posterior),
                "" if d.veridical_rank is None else str(d.veridical_rank),
            ]
            for d in self.rows
        ]

    def json_obj(self):
        return {
            "provenance": dict(self.provenance),
            "rows": [
                {
                    "item_id": d.item_id,
                    "condition": d.condition,
                    "surprisal_S": _jnum(d.surprisal_S),
                    "heuristic_A": _jnum(d.heuristic_A),
                    "discrepancy_B": _jnum(d.discrepancy_B),
                    "posterior_entropy": _jnum(d.posterior_entropy),
                    "veridical_posterior": _jnum(d.veridical_posterior),
                    "veridical_rank": d.veridical_rank,
                }
                for d in self.rows
            ],
        }


@dataclass(frozen=True)
class SweepCell:
    condition: str
    mean_A: float
    mean_B: float
    se_A: float
    se_B: float
    n: int


@dataclass(frozen=True)
class SweepReport:
    """Condition-averaged A and B per lambda value."""

    lambdas: tuple[float, ...]
    cells: dict[float, tuple[SweepCell, ...]]
    provenance: Provenance = ()

    def csv_table(self):
        rows = []
        for lam in self.lambdas:
            for cell in self.cells[lam]:
                rows.append([
                    fmt(lam), cell.condition, fmt(cell.mean_A), fmt(cell.mean_B),
                    fmt(cell.se_A), fmt(cell.se_B), str(cell.n),
                ])
        return SWEEP_CSV_HEADER, rows

    def json_obj(self):
        return {
            "provenance": dict(self.provenance),
            "rows": {
                fmt(lam): {
                    cell.condition: {
                        "mean_A": _jnum(cell.mean_A),
                        "mean_B": _jnum(cell.mean_B),
                        "se_A": _jnum(cell.se_A),
                        "se_B": _jnum(cell.se_B),
                        "n": cell.n,
                    }
                    for cell in self.cells[lam]
                }
                for lam in self.lambdas
            },
        }


@dataclass(frozen=True)
class ConditionEffect:
    """Effect of one condition vs its control, with per-item differences."""

    condition: str
    mean_A_diff: float
    mean_B_diff: float
    se_A: float
    se_B: float
    n_items: int
    item_ids: tuple[str, ...]
    A_diffs: tuple[float, ...]
    B_diffs: tuple[float, ...]


@dataclass(frozen=True)
class EffectSizes:
    control: str
    effects: tuple[ConditionEffect, ...]
    provenance: Provenance = ()

    def csv_table(self):
        return EFFECTS_CSV_HEADER, [
            [
                e.condition, fmt(e.mean_A_diff), fmt(e.mean_B_diff),
                fmt(e.se_A), fmt(e.se_B), str(e.n_items),
            ]
            for e in self.effects
        ]

    def json_obj(self):
        return {
            "provenance": dict(self.provenance),
            "control": self.control,
            "effects": {
                e.condition: {
                    "mean_A_diff": _jnum(e.mean_A_diff),
                    "mean_B_diff": _jnum(e.mean_B_diff),
                    "se_A": _jnum(e.se_A),
                    "se_B": _jnum(e.se_B),
                    "n": e.n_items,
                    "item_ids": list(e.item_ids),
                    "A_diffs": [_jnum(v) for v in e.A_diffs],
                    "B_diffs": [_jnum(v) for v in e.B_diffs],
                }
                for e in self.effects
            },
        }


@dataclass(frozen=True)
class ComparisonRow:
    condition: str
    n: int
    mean_cloze: float | None
    mean_surprisal: float


@dataclass(frozen=True)
class ComparisonReport:
    """Per-condition mean human cloze (when given) and model surprisal."""

    rows: tuple[ComparisonRow, ...]
    provenance: Provenance = ()

    def csv_table(self):
        return COMPARISON_CSV_HEADER, [
            [r.condition, str(r.n), fmt(r.mean_cloze), fmt(r.mean_surprisal)]
            for r in self.rows
        ]

    def json_obj(self):
        return {
            "provenance": dict(self.provenance),
            "rows": {
                r.condition: {
                    "n": r.n,
                    "mean_cloze": _jnum(r.mean_cloze),
                    "mean_surprisal": _jnum(r.mean_surprisal),
                }
                for r in self.rows
            },
        }


@dataclass(frozen=True)
class FitReport:
    """Regression fits; statistics are OLS, not the mixed-effects original."""

    fits: tuple  # of analysis.RegressionFit
    provenance: Provenance = ()

    annotations = (
        "method=OLS simple linear regression (not a mixed-effects model)",
        "sign_convention=negative slope in the N400 range is the standard "
        "N400 effect; positive slope in the P600 range is the standard P600 effect",
    )

    def csv_table(self):
        return FIT_CSV_HEADER, [
            [
                f.predictor, f.response, fmt(f.slope), fmt(f.intercept),
                fmt(f.std_error), fmt(f.t_stat), str(f.n), str(f.dof),
                fmt(f.standardized),
            ]
            for f in self.fits
        ]

    def json_obj(self):
        return {
            "provenance": dict(self.provenance),
            "annotations": list(self.annotations),
            "fits": [
                {
                    "predictor": f.predictor,
                    "response": f.response,
                    "slope": _jnum(f.slope),
                    "intercept": _jnum(f.intercept),
                    "std_error": _jnum(f.std_error),
                    "t_stat": _jnum(f.t_stat),
                    "n": f.n,
                    "dof": f.dof,
                    "standardized": f.standardized,
                }
                for f in self.fits
            ],
        }


def render_report(report, format: str) -> str:
    if format == "json":
        return json.dumps(report.json_obj(), sort_keys=True, indent=2) + "\n"
    if format != "csv":
        raise ValueError(f"unknown report format {format!r}")
    buf = io.StringIO()
    for key, value in report.provenance:
        buf.write(f"# {key}={value}\n")
    if isinstance(report, FitReport):
        for note in report.annotations:
            buf.write(f"# {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    header, rows = report.csv_table()
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def emit_report(report, format: str, path) -> None:
    """Write a report; '-' writes to stdout. Output is bit-stable."""
    text = render_report(report, format)
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _split_csv(text: str):
    provenance = []
    data_lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            if sep:
                provenance.append((key, value))
        elif line.strip():
            data_lines.append(line)
    rows = list(csv.reader(data_lines))
    if not rows:
        raise SchemaError("report file has no header row")
    return tuple(provenance), rows[0], rows[1:]


def load_sweep_report(path) -> SweepReport:
    """Read back an emitted sweep report (CSV or JSON)."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        provenance = tuple(sorted(obj.get("provenance", {}).items()))
        cells: dict[float, tuple[SweepCell, ...]] = {}
        for lam_key, conds in obj["rows"].items():
            lam = float(lam_key)
            cells[lam] = tuple(
                SweepCell(cond, v["mean_A"], v["mean_B"], v["se_A"], v["se_B"], v["n"])
                for cond, v in sorted(conds.items())
            )
        return SweepReport(tuple(sorted(cells)), cells, provenance)
    provenance, header, rows = _split_csv(text)
    if tuple(header) != SWEEP_CSV_HEADER:
        raise SchemaError(f"unexpected sweep header {header}")
    cells = {}
    for row in rows:
        lam = float(row[0])
        cell = SweepCell(row[1], float(row[2]), float(row[3]), float(row[4]),
                         float(row[5]), int(row[6]))
        cells.setdefault(lam, []).append(cell)
    return SweepReport(
        tuple(sorted(cells)),
        {lam: tuple(v) for lam, v in cells.items()},
        provenance,
    )


def load_decompositions(path) -> DecompositionReport:
    """Read back an emitted decomposition report (CSV or JSON)."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        rows = tuple(
            Decomposition(
                r["item_id"], r["condition"], r["surprisal_S"], r["heuristic_A"],
                r["discrepancy_B"], r["posterior_entropy"], r["veridical_posterior"],
                r["veridical_rank"],
            )
            for r in obj["rows"]
        )
        return DecompositionReport(rows, tuple(sorted(obj.get("provenance", {}).items())))
    provenance, header, rows = _split_csv(text)
    if tuple(header) != DECOMP_CSV_HEADER:
        raise SchemaError(f"unexpected decomposition header {header}")
    parsed = tuple(
        Decomposition(
            row[0], row[1], float(row[2]), float(row[3]), float(row[4]),
            float(row[5]), float(row[6]), int(row[7]) if row[7] else None,
        )
        for row in rows
    )
    return DecompositionReport(parsed, provenance)
