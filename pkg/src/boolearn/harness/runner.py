"""Job execution with an append-only journal and an optional worker pool."""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

from .config import ExperimentSpec
from .protocols import Job, plan_jobs, run_job

log = logging.getLogger(__name__)

JOURNAL = "journal.log"


class JournalMismatch(RuntimeError):
    pass


def read_journal(path: Path) -> tuple[str | None, dict[str, list[dict]]]:
    """(spec fingerprint, rows per job key) from a journal; torn records are dropped.

    Keys come back in plan order, whatever order the jobs finished in.
    """
    if not path.exists():
        return None, {}
    fingerprint = None
    done: dict[str, tuple[int, list[dict]]] = {}
    with open(path, "rb") as fh:
        data = fh.read()
    for raw in data.split(b"\n"):
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError:
            log.warning("ignoring torn journal record")
            continue
        if "spec" in rec:
            fingerprint = rec["spec"]
        else:
            done[rec["job"]] = (rec["order"], rec["rows"])
    ordered = sorted(done.items(), key=lambda kv: kv[1][0])
    return fingerprint, {k: rows for k, (_, rows) in ordered}


class Journal:
    """Single writer; each completed job becomes one flushed JSON line."""

    def __init__(self, path: Path, fingerprint: str):
        self.path = path
        old, self.done = read_journal(path)
        if old is not None and old != fingerprint:
            raise JournalMismatch(f"{path} was written by a different experiment spec")
        self._trim_torn_tail()
        self.fh = open(path, "a")
        if old is None:
            self._write({"spec": fingerprint})

    def _trim_torn_tail(self) -> None:
        if not self.path.exists():
            return
        data = self.path.read_bytes()
        if data and not data.endswith(b"\n"):
            cut = data.rfind(b"\n") + 1
            with open(self.path, "r+b") as fh:
                fh.truncate(cut)

    def _write(self, rec: dict) -> None:
        self.fh.write(json.dumps(rec, sort_keys=True) + "\n")
        self.fh.flush()
        os.fsync(self.fh.fileno())

    def record(self, job: Job, order: int, rows: list[dict]) -> None:
        self.done[job.key] = rows
        self._write({"job": job.key, "order": order, "rows": rows})

    def close(self) -> None:
        self.fh.close()


def _worker(args):
    spec, job = args
    return job.key, run_job(spec, job)


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> list[dict]:
    """Run every job not yet journaled; returns all rows in plan order.

    Rerunning with the same spec and output directory resumes: journaled jobs
    are not recomputed. Rows do not depend on the worker count.
    """
    workers = workers or spec.workers or os.cpu_count() or 1
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = plan_jobs(spec)
    journal = Journal(out / JOURNAL, spec.fingerprint())
    try:
        order = {j.key: i for i, j in enumerate(jobs)}
        pending = [j for j in jobs if j.key not in journal.done]
        log.info("%d jobs, %d already journaled, %d workers", len(jobs), len(jobs) - len(pending), workers)
        by_key = {j.key: j for j in pending}
        if workers > 1 and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futs = [pool.submit(_worker, (spec, j)) for j in pending]
                for fut in as_completed(futs):
                    key, rows = fut.result()
                    journal.record(by_key[key], order[key], rows)
                    log.info("done %s", key)
        else:
            for j in pending:
                journal.record(j, order[j.key], run_job(spec, j))
                log.info("done %s", j.key)
        done = journal.done
    finally:
        journal.close()
    return [row for j in jobs for row in done[j.key]]


def journal_rows(outdir) -> list[dict]:
    """All journaled rows of an output directory, in plan order."""
    path = Path(outdir) / JOURNAL
    if not path.exists():
        raise FileNotFoundError(f"no journal at {path}")
    _, done = read_journal(path)
    return [row for rows in done.values() for row in rows]
