"""
Run table for background commands submitted through the HTTP service.

A run moves started -> running -> completed | failed. Completed runs keep
their report records so /run_status can return them.
"""
import asyncio
from collections import Counter
from typing import Any, Dict, List, Optional
from datetime import datetime, timedelta, timezone
from enum import Enum
import logging

logger = logging.getLogger(__name__)

Records = List[Dict[str, Any]]


def _now() -> datetime:
    return datetime.now(timezone.utc)


class JobStatus(str, Enum):
    """Lifecycle state of a background run."""
    STARTED = "started"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class JobInfo:
    """One background run of an ofke command."""

    def __init__(self, run_id: str, command: str):
        self.run_id = run_id
        self.command = command
        self.status = JobStatus.STARTED
        self.error_message = ""
        self.results: Optional[Records] = None
        self.start_time = _now()
        self.end_time: Optional[datetime] = None

    @property
    def finished(self) -> bool:
        return self.status in (JobStatus.COMPLETED, JobStatus.FAILED)

    @property
    def duration_seconds(self) -> Optional[float]:
        if self.end_time is None:
            return None
        return (self.end_time - self.start_time).total_seconds()

    def mark_running(self):
        self.status = JobStatus.RUNNING

    def mark_completed(self, results: Records):
        self.results = results
        self.status = JobStatus.COMPLETED
        self.end_time = _now()

    def mark_failed(self, error_message: str):
        self.error_message = error_message
        self.status = JobStatus.FAILED
        self.end_time = _now()

    def to_dict(self) -> Dict[str, Any]:
        """Status payload for /run_status."""
        return {
            "run_id": self.run_id,
            "command": self.command,
            "status": self.status.value,
            "error_message": self.error_message,
            "results": self.results,
            "start_time": self.start_time.isoformat(),
            "end_time": self.end_time.isoformat() if self.end_time else None,
            "duration_seconds": self.duration_seconds,
        }


class JobTracker:
    """
    Background runs keyed by run_id.

    Every access to the table happens under one asyncio lock.
    """

    def __init__(self):
        self.jobs: Dict[str, JobInfo] = {}
        self.lock = asyncio.Lock()

    async def create_job(self, run_id: str, command: str) -> JobInfo:
        """
        Register a new run in the started state.

        Raises:
            ValueError: If ``run_id`` is already tracked
        """
        async with self.lock:
            if run_id in self.jobs:
                raise ValueError(f"Run {run_id} is already tracked")
            job = JobInfo(run_id, command)
            self.jobs[run_id] = job
        logger.info(f"Tracking run {run_id} ({command})")
        return job

    async def get_job(self, run_id: str) -> Optional[JobInfo]:
        async with self.lock:
            return self.jobs.get(run_id)

    async def _update(self, run_id: str, action: str, *args) -> bool:
        async with self.lock:
            job = self.jobs.get(run_id)
            if job is None:
                logger.warning(f"Ignoring {action} for unknown run {run_id}")
                return False
            getattr(job, action)(*args)
            return True

    async def mark_job_running(self, run_id: str):
        if await self._update(run_id, "mark_running"):
            logger.debug(f"Run {run_id} running")

    async def mark_job_completed(self, run_id: str, results: Records):
        if await self._update(run_id, "mark_completed", results):
            logger.info(f"Run {run_id} completed with {len(results)} result(s)")

    async def mark_job_failed(self, run_id: str, error_message: str):
        if await self._update(run_id, "mark_failed", error_message):
            logger.error(f"Run {run_id} failed: {error_message}")

    async def status_counts(self) -> Dict[str, int]:
        """Number of tracked runs per status."""
        async with self.lock:
            counts = Counter(job.status.value for job in self.jobs.values())
        return {status.value: counts.get(status.value, 0) for status in JobStatus}

    async def cleanup_old_jobs(self, max_age_hours: int = 24) -> int:
        """
        Drop finished runs that ended more than ``max_age_hours`` ago.

        Returns:
            Number of runs removed
        """
        cutoff = _now() - timedelta(hours=max_age_hours)
        async with self.lock:
            stale = [
                run_id for run_id, job in self.jobs.items()
                if job.finished and job.end_time < cutoff
            ]
            for run_id in stale:
                del self.jobs[run_id]
        if stale:
            logger.info(f"Dropped {len(stale)} finished run(s) older than {max_age_hours}h")
        return len(stale)


job_tracker = JobTracker()
