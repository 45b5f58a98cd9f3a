"""Noisy-channel decomposition of word surprisal.

A word's surprisal S splits into heuristic surprise A (the expected
surprisal of inferred corrections; N400 predictor) and a discrepancy
signal B = S - A (the cost of reconciling the input with the inferred
words; P600 predictor). Corrections come from a Bayesian posterior that
combines a masked-LM prior with an exponential edit-distance noise model.
"""

from .analysis import (
    AmplitudeRecord,
    PredictorJoin,
    RegressionFit,
    fit_erp_table,
    fit_ols,
    load_amplitudes,
    predictor_join,
)
from .decomposition import (
    Decomposition,
    StimulusProfile,
    build_profile,
    decompose,
    decompose_profile,
    discrepancy_bracket,
)
from .errors import (
    ConfigError,
    DataError,
    DegeneratePredictorError,
    EmptyCorpusError,
    EmptyJoinError,
    MissingControlError,
    SchemaError,
    ScorerUnavailableError,
    SurprisalSplitError,
)
from .experiment import (
    Stimulus,
    decompose_stimuli,
    load_stimuli,
    run_condition_experiment,
    run_lambda_sweep,
    surprisal_comparison,
    sweep_trend_lines,
)
from .lexdist import EditDistance, levenshtein
from .noisy_channel import Candidate, NoiseParams, Posterior, generate_candidates, posterior
from .reports import (
    ComparisonReport,
    ConditionEffect,
    DecompositionReport,
    EffectSizes,
    FitReport,
    SweepCell,
    SweepReport,
    emit_report,
    load_decompositions,
    load_sweep_report,
)
from .scorer import (
    LOGPROB_FLOOR,
    NgramScorer,
    RemoteScorer,
    ScoredWord,
    Scorer,
    ScorerDescriptor,
    train_ngram,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeRecord",
    "Candidate",
    "ComparisonReport",
    "ConditionEffect",
    "ConfigError",
    "DataError",
    "Decomposition",
    "DecompositionReport",
    "DegeneratePredictorError",
    "EditDistance",
    "EffectSizes",
    "EmptyCorpusError",
    "EmptyJoinError",
    "FitReport",
    "LOGPROB_FLOOR",
    "MissingControlError",
    "NgramScorer",
    "NoiseParams",
    "Posterior",
    "PredictorJoin",
    "RegressionFit",
    "RemoteScorer",
    "SchemaError",
    "ScoredWord",
    "Scorer",
    "ScorerDescriptor",
    "ScorerUnavailableError",
    "StimulusProfile",
    "Stimulus",
    "SurprisalSplitError",
    "SweepCell",
    "SweepReport",
    "build_profile",
    "decompose",
    "decompose_profile",
    "decompose_stimuli",
    "discrepancy_bracket",
    "emit_report",
    "fit_erp_table",
    "fit_ols",
    "generate_candidates",
    "levenshtein",
    "load_amplitudes",
    "load_decompositions",
    "load_stimuli",
    "load_sweep_report",
    "posterior",
    "predictor_join",
    "run_condition_experiment",
    "run_lambda_sweep",
    "surprisal_comparison",
    "sweep_trend_lines",
    "train_ngram",
]
