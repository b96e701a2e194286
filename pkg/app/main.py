from fastapi import FastAPI, HTTPException, BackgroundTasks
from pydantic import BaseModel, Field
from typing import Dict, Any, List, Optional
from uuid import uuid4
import asyncio
import logging

from app.commands import create_registry, execute
from ofke import __version__
from ofke.config import RunConfig
from ofke.errors import ConvergenceError, OfkeError
from ofke.job_tracker import job_tracker

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="ofke",
    description="Orbital-free kinetic-energy functionals, bounds and fits",
    version=__version__
)

registry = create_registry()
JOB_RETENTION_HOURS = 24
completed_run_count = 0


class RunResponse(BaseModel):
    run_id: str
    header: Dict[str, Any]
    results: List[Dict[str, Any]]
    status: str


class RunAsyncResponse(BaseModel):
    run_id: str
    status: str


class JobStatusResponse(BaseModel):
    run_id: str
    command: str
    status: str
    error_message: str = ""
    results: Optional[List[Dict[str, Any]]] = Field(default=None, description="Present once completed")
    start_time: str
    end_time: Optional[str] = None
    duration_seconds: Optional[float] = None


def _run_blocking(config: RunConfig):
    return execute(config, registry)


def _count_completed():
    global completed_run_count
    completed_run_count += 1


@app.get("/")
async def root():
    return {
        "status": "running",
        "service": "ofke",
        "version": __version__,
        "completed_runs": completed_run_count,
        "background_runs": await job_tracker.status_counts()
    }


@app.get("/systems")
async def list_systems():
    return {
        "systems": registry.list_systems(),
        "commands": registry.list_commands()
    }


@app.post("/run", response_model=RunResponse)
async def run(config: RunConfig):
    run_id = str(uuid4())
    logger.info(f"Starting run_id={run_id} command={config.command}")
    try:
        loop = asyncio.get_running_loop()
        header, results = await loop.run_in_executor(None, _run_blocking, config)
    except ConvergenceError as e:
        logger.error(f"Run {run_id} did not converge: {e}")
        raise HTTPException(status_code=422, detail=f"Numerical failure: {e}")
    except (OfkeError, ValueError, OSError) as e:
        logger.error(f"Run {run_id} rejected: {e}")
        raise HTTPException(status_code=400, detail=f"Run failed: {e}")
    except Exception as e:
        logger.error(f"Run {run_id} crashed: {e}")
        raise HTTPException(status_code=500, detail=f"Execution failed: {e}")

    _count_completed()
    logger.info(f"Completed run_id={run_id} with {len(results)} result(s)")
    return RunResponse(run_id=run_id, header=header, results=results, status="completed")


async def _run_in_background(run_id: str, config: RunConfig):
    await job_tracker.mark_job_running(run_id)
    try:
        loop = asyncio.get_running_loop()
        _, results = await loop.run_in_executor(None, _run_blocking, config)
    except Exception as e:
        await job_tracker.mark_job_failed(run_id, str(e))
    else:
        _count_completed()
        await job_tracker.mark_job_completed(run_id, results)
    await job_tracker.cleanup_old_jobs(max_age_hours=JOB_RETENTION_HOURS)


@app.post("/run_async", response_model=RunAsyncResponse)
async def run_async(config: RunConfig, background_tasks: BackgroundTasks):
    run_id = str(uuid4())
    await job_tracker.create_job(run_id, config.command)
    background_tasks.add_task(_run_in_background, run_id, config)
    logger.info(f"Started async run {run_id} for command {config.command}")
    return RunAsyncResponse(run_id=run_id, status="started")


@app.get("/run_status/{run_id}", response_model=JobStatusResponse)
async def get_run_status(run_id: str):
    job = await job_tracker.get_job(run_id)

    if not job:
        raise HTTPException(
            status_code=404,
            detail=f"Run {run_id} not found"
        )

    return JobStatusResponse(**job.to_dict())

