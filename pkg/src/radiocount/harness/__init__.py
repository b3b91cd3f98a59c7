"""Monte Carlo experiment harness: runner, statistics, oracles, and the
statistical channel tests."""

from .experiment import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    load_records,
    parse_topology,
    record_from_json,
    record_to_json,
    run_experiment,
    run_trial,
    write_summary_csv,
)
from .oracles import p_exactly_one, p_noise, p_silence
from .predicates import REGISTRY as PREDICATE_REGISTRY
from .predicates import Predicate, get_predicate
from .stats import ExperimentStats, SlotSummary, StatsAccumulator
from .stattest import (
    InsufficientSamples,
    SlotFilter,
    StatTestResult,
    channel_stat_test,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "ExperimentStats",
    "InsufficientSamples",
    "PREDICATE_REGISTRY",
    "Predicate",
    "SlotFilter",
    "SlotSummary",
    "StatTestResult",
    "StatsAccumulator",
    "channel_stat_test",
    "get_predicate",
    "load_records",
    "p_exactly_one",
    "p_noise",
    "p_silence",
    "parse_topology",
    "record_from_json",
    "record_to_json",
    "run_experiment",
    "run_trial",
    "write_summary_csv",
]
