"""Experiment protocols, journaled execution and reporting."""

from .config import ConfigError, ExperimentSpec, load_config, parse_config
from .protocols import ROW_COLUMNS, IngestError, Job, dataset_paths, job_seed, plan_jobs, read_sample_file, run_job
from .report import SUMMARY_COLUMNS, SetSummary, load_rows_csv, summarize, write_report
from .runner import JOURNAL, JournalMismatch, journal_rows, read_journal, run_experiment


def run_and_report(spec: ExperimentSpec, workers: int | None = None) -> list[SetSummary]:
    """Run (or resume) an experiment and write every output file into its directory."""
    rows = run_experiment(spec, workers)
    summaries = summarize(rows)
    write_report(rows, summaries, spec.output_dir)
    return summaries


def run_cop_experiment(spec: ExperimentSpec, workers: int | None = None) -> list[SetSummary]:
    if spec.protocol != "cop":
        raise ConfigError("spec is not a cop experiment")
    return run_and_report(spec, workers)


def run_phase_experiment(spec: ExperimentSpec, workers: int | None = None) -> list[SetSummary]:
    if spec.protocol != "phase":
        raise ConfigError("spec is not a phase experiment")
    return run_and_report(spec, workers)


def run_ingest_experiment(spec: ExperimentSpec, workers: int | None = None) -> list[dict]:
    """Per-formula rows with MLP and decision-tree accuracies."""
    if spec.protocol != "ingest":
        raise ConfigError("spec is not an ingest experiment")
    rows = run_experiment(spec, workers)
    write_report(rows, None, spec.output_dir)
    return rows


__all__ = [
    "ConfigError", "ExperimentSpec", "IngestError", "JOURNAL", "Job", "JournalMismatch", "ROW_COLUMNS",
    "SUMMARY_COLUMNS", "SetSummary", "dataset_paths", "job_seed", "journal_rows", "load_config", "load_rows_csv",
    "parse_config", "plan_jobs", "read_journal", "read_sample_file", "run_and_report", "run_cop_experiment",
    "run_experiment", "run_ingest_experiment", "run_job", "run_phase_experiment", "summarize",
    "write_report",
]
