"""Relate predictors (A, B, S) to per-trial ERP amplitudes via OLS.

Deliberately simple: closed-form simple linear regression on trial rows,
a desk-scale stand-in for a maximal mixed-effects analysis. Reports label
their statistics accordingly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .decomposition import Decomposition
from .errors import DataError, DegeneratePredictorError, EmptyJoinError, SchemaError

AMPLITUDE_COLUMNS = ("item_id", "subject_id", "condition", "n400_amp", "p600_amp")

PREDICTORS = ("A", "B", "S")
RESPONSES = ("n400", "p600")


@dataclass(frozen=True)
class AmplitudeRecord:
    item_id: str
    subject_id: str
    condition: str
    n400_amp: float
    p600_amp: float


@dataclass(frozen=True)
class RegressionFit:
    predictor: str
    response: str
    slope: float
    intercept: float
    std_error: float
    t_stat: float
    n: int
    dof: int
    standardized: bool


@dataclass(frozen=True)
class PredictorJoin:
    pairs: tuple[tuple[float, float], ...]
    n_matched: int
    n_unmatched: int


def load_amplitudes(path) -> list[AmplitudeRecord]:
    """Parse an amplitudes CSV: item_id,subject_id,condition,n400_amp,p600_amp."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a header row") from None
        if tuple(header) != AMPLITUDE_COLUMNS:
            missing = [c for c in AMPLITUDE_COLUMNS if c not in header]
            raise SchemaError(
                f"{path}: bad header {header}"
                + (f" (missing column: {', '.join(missing)})" if missing else "")
            )
        records: list[AmplitudeRecord] = []
        seen: set[tuple[str, str, str]] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise SchemaError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
            key = (row[0].strip(), row[1].strip(), row[2].strip())
            if key in seen:
                raise DataError(
                    f"{path}:{lineno}: duplicate (item_id, subject_id, condition) {key}"
                )
            seen.add(key)
            try:
                n400, p600 = float(row[3]), float(row[4])
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: non-numeric amplitude") from None
            records.append(AmplitudeRecord(*key, n400, p600))
    return records


def fit_ols(
    pairs: Sequence[tuple[float, float]],
    standardize: bool = False,
    predictor: str = "x",
    response: str = "y",
) -> RegressionFit:
    """Closed-form simple linear regression with slope t-statistic.

    With ``standardize``, both variables are z-scored (sample std) first,
    so the slope is a standardized coefficient.
    """
    n = len(pairs)
    if n < 3:
        raise DataError(f"need at least 3 pairs to fit, got {n}")
    x = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    if standardize:
        sx, sy = x.std(ddof=1), y.std(ddof=1)
        if sx == 0.0:
            raise DegeneratePredictorError(f"predictor {predictor!r} has zero variance")
        x = (x - x.mean()) / sx
        y = (y - y.mean()) / sy if sy > 0 else y - y.mean()
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise DegeneratePredictorError(f"predictor {predictor!r} has zero variance")
    sxy = float(np.sum((x - x.mean()) * (y - y.mean())))
    slope = sxy / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    residuals = y - (intercept + slope * x)
    dof = n - 2
    sigma2 = float(np.sum(residuals**2)) / dof
    std_error = float(np.sqrt(sigma2 / sxx))
    if std_error > 0:
        t_stat = slope / std_error
    else:
        t_stat = 0.0 if slope == 0 else math.copysign(float("inf"), slope)
    return RegressionFit(
        predictor, response, slope, intercept, std_error, t_stat, n, dof,
        bool(standardize),
    )


def predictor_join(
    decompositions: Sequence[Decomposition],
    amplitudes: Sequence[AmplitudeRecord],
    response: str,
    predictor: str,
) -> PredictorJoin:
    """Pair predictor values with amplitudes on (item_id, condition).

    One pair per amplitude record whose cell has a decomposition;
    unmatched records are counted, not dropped silently.
    """
    if predictor not in PREDICTORS:
        raise DataError(f"unknown predictor {predictor!r}, expected one of {PREDICTORS}")
    if response not in RESPONSES:
        raise DataError(f"unknown response {response!r}, expected one of {RESPONSES}")
    field = {"A": "heuristic_A", "B": "discrepancy_B", "S": "surprisal_S"}[predictor]
    by_cell: dict[tuple[str, str], Decomposition] = {}
    for d in decompositions:
        key = (d.item_id, d.condition)
        if key in by_cell:
            raise DataError(f"duplicate decomposition for (item_id, condition) {key}")
        by_cell[key] = d
    pairs = []
    unmatched = 0
    for rec in amplitudes:
        dec = by_cell.get((rec.item_id, rec.condition))
        if dec is None:
            unmatched += 1
            continue
        amp = rec.n400_amp if response == "n400" else rec.p600_amp
        pairs.append((getattr(dec, field), amp))
    if not pairs:
        raise EmptyJoinError(
            "no overlap between decompositions and amplitude records "
            f"({len(amplitudes)} records, {len(by_cell)} decomposed cells)"
        )
    return PredictorJoin(tuple(pairs), len(pairs), unmatched)


def fit_erp_table(
    decompositions: Sequence[Decomposition],
    amplitudes: Sequence[AmplitudeRecord],
    standardize: bool = True,
) -> list[RegressionFit]:
    """The four predictor/response cells: A->N400, S->N400, B->P600, S->P600."""
    fits = []
    for predictor, response in (("A", "n400"), ("S", "n400"), ("B", "p600"), ("S", "p600")):
        join = predictor_join(decompositions, amplitudes, response, predictor)
        fits.append(fit_ols(join.pairs, standardize, predictor, response))
    return fits
