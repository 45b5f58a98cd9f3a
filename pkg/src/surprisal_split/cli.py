"""Command-line front door: decompose, sweep, and fit subcommands.

Exit codes distinguish failure classes: 2 = configuration, 3 = input
data / I/O, 4 = scoring service unavailable.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .analysis import fit_erp_table, load_amplitudes
from .decomposition import Decomposition, decompose
from .errors import ConfigError, DataError, ScorerUnavailableError
from .experiment import (
    _map_jobs,
    base_provenance,
    load_stimuli,
    run_lambda_sweep,
    sweep_trend_lines,
)
from .noisy_channel import DISTANCE_MODES, NoiseParams
from .reports import (
    DecompositionReport,
    FitReport,
    emit_report,
    fmt,
    load_decompositions,
)
from .scorer import RemoteScorer, Scorer, train_ngram

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_SCORER = 4

ENDPOINT_LAMBDA = 1e6  # operational lambda -> inf row for --with-endpoints


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surprisal-split",
        description=(
            "Decompose word surprisal into heuristic surprise (N400 predictor) "
            "and discrepancy signal (P600 predictor) under a noisy-channel "
            "correction model, sweep the noise penalty, and fit predictors to "
            "ERP amplitudes."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scorer_flags = argparse.ArgumentParser(add_help=False)
    group = scorer_flags.add_argument_group("scorer")
    group.add_argument("--scorer", choices=("ngram", "remote"), required=True,
                       help="language model backend")
    group.add_argument("--corpus", help="training corpus for the ngram scorer "
                                        "(one sentence per line)")
    group.add_argument("--order", type=int, default=2, help="ngram order")
    group.add_argument("--alpha", type=float, default=0.1,
                       help="ngram add-alpha smoothing constant")
    group.add_argument("--endpoint",
                       help="LM service base URL (default: $SURPRISAL_SPLIT_LM_URL)")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--top-k", type=int, default=100,
                        help="masked-fill candidates per target")
    common.add_argument("--distance-mode", choices=DISTANCE_MODES,
                        default="normalized", help="edit-distance scale in the noise model")
    common.add_argument("--no-force-veridical", action="store_true",
                        help="do not force the observed word into the candidate set")
    common.add_argument("--jobs", type=int, default=1,
                        help="concurrent items (results independent of this)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for any synthetic-data generation")
    common.add_argument("--out", default="-", help="output path ('-' = stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="report format")

    p_dec = sub.add_parser("decompose", parents=[scorer_flags, common],
                           help="per-item S/A/B decomposition at one lambda")
    p_dec.add_argument("--stimuli", required=True, help="stimuli CSV path")
    p_dec.add_argument("--lambda", dest="lam", type=float, required=True,
                       help="noise penalty rate")
    p_dec.set_defaults(func=cmd_decompose)

    p_sweep = sub.add_parser("sweep", parents=[scorer_flags, common],
                             help="condition-averaged A/B over a lambda grid")
    p_sweep.add_argument("--stimuli", required=True, help="stimuli CSV path")
    p_sweep.add_argument("--lambdas", required=True,
                         help="comma-separated lambda grid, e.g. 0,1,2,4,8")
    p_sweep.add_argument("--with-endpoints", action="store_true",
                         help=f"also evaluate lambda=0 and lambda={ENDPOINT_LAMBDA:g}")
    p_sweep.set_defaults(func=cmd_sweep)

    p_fit = sub.add_parser("fit", parents=[common],
                           help="OLS fits of A/B/S against ERP amplitudes")
    p_fit.add_argument("--decompositions", required=True,
                       help="decomposition report (csv or json) from 'decompose'")
    p_fit.add_argument("--amplitudes", required=True, help="amplitudes CSV path")
    p_fit.add_argument("--no-standardize", action="store_true",
                       help="fit on raw scales instead of z-scored variables")
    p_fit.set_defaults(func=cmd_fit)
    return parser


def make_scorer(args) -> Scorer:
    if args.scorer == "ngram":
        if not args.corpus:
            raise ConfigError("--corpus is required with --scorer ngram")
        with open(args.corpus, encoding="utf-8") as fh:
            sentences = [line for line in fh if line.strip()]
        return train_ngram(sentences, args.order, args.alpha)
    return RemoteScorer(args.endpoint)


def make_params(args, lam: float) -> NoiseParams:
    return NoiseParams(
        lam=lam,
        distance_mode=args.distance_mode,
        top_k=args.top_k,
        force_include_veridical=not args.no_force_veridical,
    )


def config_echo(args, **extra: str) -> dict[str, str]:
    # --jobs and --out are execution details: reports must be byte-identical
    # across worker counts and output locations.
    echo = {"command": args.command, "seed": str(args.seed), "format": args.format}
    if getattr(args, "stimuli", None):
        echo["stimuli"] = args.stimuli
    if getattr(args, "scorer", None) == "ngram":
        echo.update(scorer="ngram", corpus=args.corpus or "",
                    order=str(args.order), alpha=fmt(args.alpha))
    elif getattr(args, "scorer", None) == "remote":
        echo.update(scorer="remote", endpoint=args.endpoint or "$SURPRISAL_SPLIT_LM_URL")
    echo.update(extra)
    return echo


def cmd_decompose(args) -> int:
    params = make_params(args, args.lam)
    stimuli = load_stimuli(args.stimuli)
    scorer = make_scorer(args)

    def one(stim):
        try:
            return decompose(stim.tokens, stim.target_index, scorer, params,
                             stim.item_id, stim.condition)
        except (DataError, ScorerUnavailableError) as exc:
            return exc

    results = _map_jobs(one, stimuli, args.jobs)
    rows = [r for r in results if isinstance(r, Decomposition)]
    failures = [r for r in results if not isinstance(r, Decomposition)]
    if failures:
        for exc in failures:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCORER if any(
            isinstance(e, ScorerUnavailableError) for e in failures
        ) else EXIT_DATA
    provenance = base_provenance(scorer.descriptor, params,
                                 config_echo(args, **{"lambda": fmt(args.lam)}))
    emit_report(DecompositionReport(tuple(rows), provenance), args.format, args.out)
    return 0


def _parse_lambda_grid(spec: str, with_endpoints: bool) -> list[float]:
    try:
        grid = [float(part) for part in spec.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"bad --lambdas value {spec!r}") from None
    if not grid:
        raise ConfigError("--lambdas is empty")
    if with_endpoints:
        grid.extend((0.0, ENDPOINT_LAMBDA))
    return grid


def cmd_sweep(args) -> int:
    grid = _parse_lambda_grid(args.lambdas, args.with_endpoints)
    params = make_params(args, grid[0])
    stimuli = load_stimuli(args.stimuli)
    scorer = make_scorer(args)
    report = run_lambda_sweep(stimuli, scorer, grid, params, jobs=args.jobs)
    echo = config_echo(args, lambdas=",".join(fmt(l) for l in report.lambdas))
    report = type(report)(report.lambdas, report.cells,
                          base_provenance(scorer.descriptor, params, echo))
    emit_report(report, args.format, args.out)
    for line in sweep_trend_lines(report):
        print(line, file=sys.stderr)
    return 0


def cmd_fit(args) -> int:
    decs = load_decompositions(args.decompositions).rows
    amps = load_amplitudes(args.amplitudes)
    fits = fit_erp_table(decs, amps, standardize=not args.no_standardize)
    echo = config_echo(args, decompositions=args.decompositions,
                       amplitudes=args.amplitudes,
                       standardize=str(not args.no_standardize).lower())
    report = FitReport(tuple(fits), tuple(sorted(echo.items())))
    emit_report(report, args.format, args.out)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScorerUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCORER
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
