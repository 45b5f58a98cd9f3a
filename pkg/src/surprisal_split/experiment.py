"""Stimuli ingestion, condition effect sizes, and the lambda grid sweep."""

from __future__ import annotations

import csv
import math
import statistics
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

from .decomposition import Decomposition, StimulusProfile, build_profile, decompose_profile
from .errors import ConfigError, DataError, MissingControlError, SchemaError, SurprisalSplitError
from .noisy_channel import NoiseParams
from .reports import (
    ComparisonReport,
    ComparisonRow,
    ConditionEffect,
    EffectSizes,
    Provenance,
    SweepCell,
    SweepReport,
    emit_report,  # noqa: F401  (re-exported: reports are emitted from here)
    load_sweep_report,  # noqa: F401
)
from .scorer import Scorer, ScorerDescriptor
from .textnorm import normalize_word, tokenize

STIMULI_COLUMNS = ("item_id", "condition", "sentence", "target_index")
CLOZE_COLUMN = "human_cloze"

# Above this, the noise penalty has underflowed to a point mass on the
# veridical word and B must vanish (the operational lambda -> inf limit).
CONCENTRATION_LAMBDA = 1e5


@dataclass(frozen=True)
class Stimulus:
    """One sentence with a marked target word (zero-based index)."""

    item_id: str
    condition: str
    sentence: str
    target_index: int
    human_cloze: float | None = None

    @property
    def tokens(self) -> list[str]:
        return tokenize(self.sentence)


def load_stimuli(path) -> list[Stimulus]:
    """Parse a stimuli CSV: item_id,condition,sentence,target_index[,human_cloze]."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        if tuple(header[:4]) != STIMULI_COLUMNS or (
            len(header) > 4 and (len(header) != 5 or header[4] != CLOZE_COLUMN)
        ):
            missing = [c for c in STIMULI_COLUMNS if c not in header]
            raise SchemaError(
                f"{path}: bad header {header}; expected {','.join(STIMULI_COLUMNS)}"
                f"[,{CLOZE_COLUMN}]" + (f" (missing: {', '.join(missing)})" if missing else "")
            )
        has_cloze = len(header) == 5
        stimuli: list[Stimulus] = []
        seen: set[tuple[str, str]] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise SchemaError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            item_id, condition, sentence = row[0].strip(), row[1].strip(), row[2]
            try:
                target_index = int(row[3])
            except ValueError:
                raise SchemaError(
                    f"{path}:{lineno}: target_index {row[3]!r} is not an integer"
                ) from None
            cloze = None
            if has_cloze and row[4].strip():
                try:
                    cloze = float(row[4])
                except ValueError:
                    raise SchemaError(
                        f"{path}:{lineno}: human_cloze {row[4]!r} is not a number"
                    ) from None
                if not 0.0 <= cloze <= 1.0:
                    raise SchemaError(
                        f"{path}:{lineno}: human_cloze {cloze} outside [0, 1]"
                    )
            key = (item_id, condition)
            if key in seen:
                raise DataError(f"{path}:{lineno}: duplicate (item_id, condition) {key}")
            seen.add(key)
            stim = Stimulus(item_id, condition, sentence, target_index, cloze)
            n_tokens = len(stim.tokens)
            if not 0 <= target_index < n_tokens:
                raise DataError(
                    f"item {item_id}: target_index {target_index} out of range "
                    f"for {n_tokens}-token sentence"
                )
            stimuli.append(stim)
    if not stimuli:
        raise DataError(f"{path}: no stimuli rows")
    _warn_on_mismatched_items(stimuli)
    return stimuli


def _warn_on_mismatched_items(stimuli: Sequence[Stimulus]) -> None:
    # Items are expected to differ only at/near the target word.
    by_item: dict[str, list[Stimulus]] = {}
    for s in stimuli:
        by_item.setdefault(s.item_id, []).append(s)
    for item_id, rows in by_item.items():
        first = rows[0]
        for other in rows[1:]:
            a, b = first.tokens, other.tokens
            if abs(len(a) - len(b)) > 1:
                warnings.warn(
                    f"item {item_id}: conditions {first.condition!r} and "
                    f"{other.condition!r} differ in length by more than one word"
                )
                break
            if len(a) == len(b):
                skip = {first.target_index, other.target_index}
                if any(x != y for i, (x, y) in enumerate(zip(a, b)) if i not in skip):
                    warnings.warn(
                        f"item {item_id}: conditions {first.condition!r} and "
                        f"{other.condition!r} differ away from the target position"
                    )
                    break


def _map_jobs(fn: Callable, items: Sequence, jobs: int) -> list:
    # Order-preserving so aggregation is independent of worker count.
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _mean_se(values: Sequence[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    if len(values) < 2:
        return mean, 0.0
    return mean, statistics.stdev(values) / math.sqrt(len(values))


def base_provenance(descriptor: ScorerDescriptor, params: NoiseParams,
                    extra: dict[str, str] | None = None) -> Provenance:
    pairs = [
        ("scorer_kind", descriptor.kind),
        ("scorer_identity", descriptor.identity),
        ("vocabulary_size", str(descriptor.vocabulary_size)),
        ("distance_mode", params.distance_mode),
        ("top_k", str(params.top_k)),
        ("force_include_veridical", str(params.force_include_veridical).lower()),
    ]
    if extra:
        pairs.extend(sorted(extra.items()))
    return tuple(pairs)


def build_profiles(stimuli: Sequence[Stimulus], scorer: Scorer, params: NoiseParams,
                   jobs: int = 1) -> list[StimulusProfile]:
    def one(stim: Stimulus) -> StimulusProfile:
        try:
            return build_profile(stim.tokens, stim.target_index, scorer, params)
        except SurprisalSplitError as exc:
            raise type(exc)(f"item {stim.item_id}: {exc}") from exc

    return _map_jobs(one, stimuli, jobs)


def decompose_stimuli(stimuli: Sequence[Stimulus], scorer: Scorer, params: NoiseParams,
                      jobs: int = 1) -> list[Decomposition]:
    profiles = build_profiles(stimuli, scorer, params, jobs)
    return [
        decompose_profile(prof, params, stim.item_id, stim.condition)
        for stim, prof in zip(stimuli, profiles)
    ]


def run_condition_experiment(
    stimuli: Sequence[Stimulus],
    scorer: Scorer,
    params: NoiseParams,
    jobs: int = 1,
    control: str = "Control",
) -> EffectSizes:
    """Per-condition mean A/B differences against each item's control row."""
    by_key: dict[tuple[str, str], Stimulus] = {}
    for s in stimuli:
        key = (s.item_id, s.condition)
        if key in by_key:
            raise DataError(f"duplicate (item_id, condition) {key}")
        by_key[key] = s
    missing = sorted(
        {s.item_id for s in stimuli if s.condition != control}
        - {s.item_id for s in stimuli if s.condition == control}
    )
    if missing:
        raise MissingControlError(
            f"no {control!r} row for item(s): {', '.join(missing)}"
        )
    decs = decompose_stimuli(stimuli, scorer, params, jobs)
    by_dec = {(d.item_id, d.condition): d for d in decs}
    conditions = sorted({s.condition for s in stimuli if s.condition != control})
    effects = []
    for cond in conditions:
        item_ids = sorted(i for i, c in by_dec if c == cond)
        a_diffs, b_diffs = [], []
        for item in item_ids:
            exp, ctl = by_dec[(item, cond)], by_dec[(item, control)]
            a_diffs.append(exp.heuristic_A - ctl.heuristic_A)
            b_diffs.append(exp.discrepancy_B - ctl.discrepancy_B)
        mean_a, se_a = _mean_se(a_diffs)
        mean_b, se_b = _mean_se(b_diffs)
        effects.append(ConditionEffect(
            cond, mean_a, mean_b, se_a, se_b, len(item_ids),
            tuple(item_ids), tuple(a_diffs), tuple(b_diffs),
        ))
    return EffectSizes(control, tuple(effects),
                       base_provenance(scorer.descriptor, params))


def run_lambda_sweep(
    stimuli: Sequence[Stimulus],
    scorer: Scorer,
    lambdas: Sequence[float],
    params: NoiseParams,
    jobs: int = 1,
) -> SweepReport:
    """One condition-averaged A/B row per lambda; candidates scored once."""
    if not lambdas:
        raise ConfigError("lambda grid is empty")
    for lam in lambdas:
        if lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {lam}")
    grid = tuple(sorted(set(float(l) for l in lambdas)))
    profiles = build_profiles(stimuli, scorer, params, jobs)
    conditions = sorted({s.condition for s in stimuli})
    cells: dict[float, tuple[SweepCell, ...]] = {}
    for lam in grid:
        lam_params = replace(params, lam=lam)
        decs = []
        for stim, prof in zip(stimuli, profiles):
            dec = decompose_profile(prof, lam_params, stim.item_id, stim.condition)
            if abs(dec.heuristic_A + dec.discrepancy_B - dec.surprisal_S) > 1e-9:
                raise RuntimeError(
                    f"identity violated at item {stim.item_id}, lambda {lam}"
                )
            if (lam >= CONCENTRATION_LAMBDA and params.force_include_veridical
                    and abs(dec.discrepancy_B) > 1e-6):
                raise RuntimeError(
                    f"discrepancy did not vanish at item {stim.item_id}, lambda {lam}"
                )
            decs.append(dec)
        row = []
        for cond in conditions:
            cond_decs = [d for d in decs if d.condition == cond]
            mean_a, se_a = _mean_se([d.heuristic_A for d in cond_decs])
            mean_b, se_b = _mean_se([d.discrepancy_B for d in cond_decs])
            row.append(SweepCell(cond, mean_a, mean_b, se_a, se_b, len(cond_decs)))
        cells[lam] = tuple(row)
    return SweepReport(grid, cells, base_provenance(scorer.descriptor, params))


def sweep_trend_lines(report: SweepReport, tolerance: float = 0.1) -> list[str]:
    """Pass/fail summary of the expected grid trend per condition.

    As the penalty grows, corrections get harder: mean A should be
    non-decreasing and mean B non-increasing across the grid, allowing at
    most one small reversal for model noise.
    """
    lines = []
    conditions = [c.condition for c in report.cells[report.lambdas[0]]]
    for cond in conditions:
        a_series = [
            next(c.mean_A for c in report.cells[lam] if c.condition == cond)
            for lam in report.lambdas
        ]
        b_series = [
            next(c.mean_B for c in report.cells[lam] if c.condition == cond)
            for lam in report.lambdas
        ]
        a_rev = [max(0.0, x - y) for x, y in zip(a_series, a_series[1:])]
        b_rev = [max(0.0, y - x) for x, y in zip(b_series, b_series[1:])]
        a_ok = sum(1 for r in a_rev if r > 0) <= 1 and all(r <= tolerance for r in a_rev)
        b_ok = sum(1 for r in b_rev if r > 0) <= 1 and all(r <= tolerance for r in b_rev)
        status = "PASS" if (a_ok and b_ok) else "FAIL"
        lines.append(
            f"{status} trend[{cond}]: A non-decreasing {'yes' if a_ok else 'no'}, "
            f"B non-increasing {'yes' if b_ok else 'no'}"
        )
    return lines


def surprisal_comparison(stimuli: Sequence[Stimulus], scorer: Scorer,
                         jobs: int = 1) -> ComparisonReport:
    """Per-condition mean human cloze (pass-through) and model surprisal."""

    def surprisal(stim: Stimulus) -> float:
        tokens = stim.tokens
        target = normalize_word(tokens[stim.target_index])
        return -scorer.conditional_logprob(tokens[:stim.target_index], target)

    values = _map_jobs(surprisal, stimuli, jobs)
    rows = []
    for cond in sorted({s.condition for s in stimuli}):
        cond_idx = [i for i, s in enumerate(stimuli) if s.condition == cond]
        clozes = [stimuli[i].human_cloze for i in cond_idx
                  if stimuli[i].human_cloze is not None]
        rows.append(ComparisonRow(
            cond,
            len(cond_idx),
            statistics.fmean(clozes) if clozes else None,
            statistics.fmean([values[i] for i in cond_idx]),
        ))
    return ComparisonReport(tuple(rows))
