"""Stateless HTTP facade over the allocation, lottery and backtest operations.

All share and probability values are serialized as decimal strings (the
shortest representation that round-trips to the same float), so clients
can echo numbers back without drift. Identical request bodies, seeds
included, produce byte-identical responses.

Environment variables:

* ``FUNDALLOC_BIND``         host:port used by ``python -m fundalloc.service``
* ``FUNDALLOC_WORKERS``      worker threads for queued backtests (default 2)
* ``FUNDALLOC_QUEUE``        max queued backtest jobs before 429 (default 8)
* ``FUNDALLOC_COHORT_STORE`` directory for uploaded cohorts (default temp dir)
* ``FUNDALLOC_CORS_ORIGIN``  allowed CORS origin for the web UI (default *)

Synchronous backtests are capped at 10,000 grid-point-draws; larger
requests return 202 with a poll token for GET /v1/backtest/jobs/{token}.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import backtest as bt
from . import deterministic as det
from . import lottery as lot
from .cohort import Cohort, CohortMember
from .formats import read_cohort_csv
from .rng import fresh_seed

# Closed set of machine-readable error codes.
ERROR_CODES = frozenset(
    {
        "invalid_request",
        "invalid_parameter",
        "infeasible_bounds",
        "pure_exploit_limit",
        "unknown_cohort",
        "invalid_grid",
        "queue_full",
        "unknown_job",
    }
)

SYNC_LIMIT = 10_000


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field: str | None = None):
        assert code in ERROR_CODES
        self.status = status
        self.code = code
        self.message = message
        self.field = field
        super().__init__(message)

    def body(self) -> dict:
        payload = {"code": self.code, "message": self.message}
        if self.field is not None:
            payload["field"] = self.field
        return payload


def _fmt(x) -> str:
    return repr(float(x))


class Bounds(BaseModel):
    lower: float
    upper: float


class AllocateRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    scores: Optional[list[float]] = None
    cohort_id: Optional[str] = None
    budget: float = Field(default=1.0, alias="B")
    alpha: float = 0.0
    lam: float = Field(default=0.0, alias="lambda")
    gamma: float = 1.0
    bounds: Optional[Bounds] = None


class ProbabilitiesRequest(BaseModel):
    scores: list[float]
    alpha: float
    tau: float


class DrawParams(BaseModel):
    alpha: float
    tau: float = 0.1
    k: int = 1
    seed_grant: float = 0.0
    gamma_cond: float = 1.0


class DrawRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    scores: list[float]
    params: DrawParams
    budget: float = Field(default=1.0, alias="B")
    rng_seed: Optional[int] = None


class GridBody(BaseModel):
    alpha: Optional[list[float]] = None
    lam: Optional[list[float]] = Field(default=None, alias="lambda")
    gamma: Optional[list[float]] = None
    tau: Optional[list[float]] = None
    k: Optional[list[int]] = None
    seed_grant: Optional[list[float]] = None
    gamma_cond: Optional[list[float]] = None

    model_config = ConfigDict(populate_by_name=True)


class InlineCohort(BaseModel):
    ids: Optional[list[str]] = None
    s: list[float]
    o: list[float]


class BacktestRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    cohort_id: Optional[str] = None
    cohort: Optional[InlineCohort] = None
    mechanism: Literal["det", "stoch"]
    grid: GridBody = GridBody()
    budget: float = Field(default=1.0, alias="B")
    n_draws: Optional[int] = None
    root_seed: Optional[int] = None


class CohortStore:
    """Content-addressed store for uploaded cohort CSVs.

    Uploads are idempotent: the id is a digest of the file bytes, so the
    same cohort always maps to the same id. Writes per id are serialized;
    concurrent reads are safe because content under an id never changes.
    """

    def __init__(self, directory: str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def put(self, data: bytes) -> str:
        cohort_id = hashlib.sha256(data).hexdigest()[:16]
        path = self.directory / f"{cohort_id}.csv"
        with self._lock:
            if not path.exists():
                tmp = path.with_suffix(".tmp")
                tmp.write_bytes(data)
                tmp.replace(path)
        return cohort_id

    def get(self, cohort_id: str) -> Cohort:
        path = self.directory / f"{cohort_id}.csv"
        if not path.exists():
            raise ApiError(404, "unknown_cohort", f"no cohort with id {cohort_id!r}", field="cohort_id")
        return read_cohort_csv(path)


def _resolve_cohort(store: CohortStore, body) -> Cohort:
    if body.cohort_id is not None:
        return store.get(body.cohort_id)
    if body.cohort is not None:
        ids = body.cohort.ids or [str(i) for i in range(len(body.cohort.s))]
        if not (len(ids) == len(body.cohort.s) == len(body.cohort.o)):
            raise ApiError(400, "invalid_request", "ids, s and o must have equal length", field="cohort")
        members = tuple(CohortMember(i, s, o) for i, s, o in zip(ids, body.cohort.s, body.cohort.o))
        try:
            return Cohort("inline", members)
        except ValueError as exc:
            raise ApiError(400, "invalid_request", str(exc), field="cohort") from exc
    raise ApiError(400, "invalid_request", "provide cohort_id or an inline cohort", field="cohort")


def _grid_from_body(body: BacktestRequest) -> bt.GridSpec:
    g = body.grid
    try:
        if body.mechanism == "det":
            default = bt.GridSpec.default_det()
            return bt.GridSpec(
                alpha=tuple(g.alpha) if g.alpha else default.alpha,
                lam=tuple(g.lam) if g.lam else default.lam,
                gamma=tuple(g.gamma) if g.gamma else default.gamma,
            )
        default = bt.GridSpec.default_stoch(body.budget)
        return bt.GridSpec(
            alpha=tuple(g.alpha) if g.alpha else default.alpha,
            tau=tuple(g.tau) if g.tau else default.tau,
            k=tuple(g.k) if g.k else default.k,
            seed_grant=tuple(g.seed_grant) if g.seed_grant else default.seed_grant,
            gamma_cond=tuple(g.gamma_cond) if g.gamma_cond else default.gamma_cond,
        )
    except ValueError as exc:
        raise ApiError(400, "invalid_grid", str(exc), field="grid") from exc


def _grid_size(grid: bt.GridSpec, mechanism: str, n_draws: int) -> int:
    if mechanism == "det":
        return len(grid.alpha) * len(grid.lam) * len(grid.gamma)
    points = len(grid.alpha) * len(grid.tau) * len(grid.k) * len(grid.seed_grant) * len(grid.gamma_cond)
    return points * n_draws


def _run_backtest(body: BacktestRequest, cohort: Cohort, grid: bt.GridSpec) -> dict:
    warning = None
    if body.mechanism == "det":
        if body.n_draws is not None:
            warning = "n_draws is ignored by the deterministic mechanism"
        result = bt.grid_search_det(cohort, body.budget, grid)
    else:
        n_draws = body.n_draws or bt.DEFAULT_N_DRAWS
        root_seed = body.root_seed if body.root_seed is not None else fresh_seed()
        try:
            result = bt.optimize_stoch(cohort, body.budget, grid, n_draws=n_draws, root_seed=root_seed)
        except ValueError as exc:
            raise ApiError(400, "invalid_grid", str(exc), field="grid") from exc
    payload = {
        "mechanism": body.mechanism,
        "table": [
            {"params": row.params, "utility": row.utility, "stderr": row.stderr}
            for row in result.table
        ],
        "best": {"params": result.best.params, "utility": result.best.utility},
        "n_draws": result.n_draws,
        "root_seed": result.root_seed,
    }
    if warning:
        payload["warning"] = warning
    return payload


class JobRegistry:
    """Bounded pool of queued backtest jobs with poll tokens."""

    def __init__(self, max_workers: int, queue_limit: int):
        self.executor = ThreadPoolExecutor(max_workers=max_workers)
        self.queue_limit = queue_limit
        self.jobs: dict[str, dict] = {}
        self._lock = threading.Lock()

    def submit(self, fn) -> str:
        with self._lock:
            pending = sum(1 for j in self.jobs.values() if j["status"] == "running")
            if pending >= self.queue_limit:
                raise ApiError(429, "queue_full", "too many queued backtests, retry later")
            token = uuid.uuid4().hex
            self.jobs[token] = {"status": "running", "result": None, "error": None}

        def run():
            try:
                result = fn()
                with self._lock:
                    self.jobs[token] = {"status": "done", "result": result, "error": None}
            except ApiError as exc:
                with self._lock:
                    self.jobs[token] = {"status": "error", "result": None, "error": exc}
            except Exception as exc:  # noqa: BLE001 - surfaced via the job status
                err = ApiError(400, "invalid_request", str(exc))
                with self._lock:
                    self.jobs[token] = {"status": "error", "result": None, "error": err}

        self.executor.submit(run)
        return token

    def status(self, token: str) -> dict:
        with self._lock:
            if token not in self.jobs:
                raise ApiError(404, "unknown_job", f"no job with token {token!r}")
            return self.jobs[token]


def create_app(
    store_path: str | None = None,
    max_workers: int | None = None,
    queue_limit: int | None = None,
) -> FastAPI:
    store_path = store_path or os.environ.get("FUNDALLOC_COHORT_STORE") or tempfile.mkdtemp(prefix="fundalloc-cohorts-")
    max_workers = max_workers or int(os.environ.get("FUNDALLOC_WORKERS", "2"))
    queue_limit = queue_limit or int(os.environ.get("FUNDALLOC_QUEUE", "8"))
    cors_origin = os.environ.get("FUNDALLOC_CORS_ORIGIN", "*")

    app = FastAPI(title="fundalloc", version="0.1.0", description=__doc__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = CohortStore(store_path)
    jobs = JobRegistry(max_workers, queue_limit)

    @app.exception_handler(ApiError)
    async def api_error_handler(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", []) if p != "body") or None
        return JSONResponse(
            status_code=400,
            content={"code": "invalid_request", "message": first.get("msg", "invalid request"), "field": field},
        )

    @app.exception_handler(det.InfeasibleBoundsError)
    async def bounds_handler(_req: Request, exc: det.InfeasibleBoundsError):
        return JSONResponse(status_code=422, content={"code": "infeasible_bounds", "message": str(exc)})

    @app.exception_handler(lot.PureExploitLimitError)
    async def exploit_handler(_req: Request, exc: lot.PureExploitLimitError):
        return JSONResponse(
            status_code=409,
            content={"code": "pure_exploit_limit", "message": "alpha = 0: use /v1/lottery/draw with the exploit limit"},
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(_req: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"code": "invalid_parameter", "message": str(exc)})

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/cohorts")
    async def upload_cohort(file: UploadFile):
        data = await file.read()
        cohort_id = store.put(data)
        try:
            cohort = store.get(cohort_id)
        except ValueError as exc:
            raise ApiError(400, "invalid_request", f"not a cohort CSV: {exc}", field="file") from exc
        return {"cohort_id": cohort_id, "size": len(cohort)}

    @app.post("/v1/allocate/deterministic")
    def allocate_deterministic(body: AllocateRequest):
        if body.scores is not None:
            scores = body.scores
        elif body.cohort_id is not None:
            scores = store.get(body.cohort_id).scores
        else:
            raise ApiError(400, "invalid_request", "provide scores or cohort_id", field="scores")
        params = det.DetParams(
            alpha=body.alpha,
            lam=body.lam,
            gamma=body.gamma,
            lower_bound=body.bounds.lower if body.bounds else None,
            upper_bound=body.bounds.upper if body.bounds else None,
        )
        alloc = det.allocate(scores, body.budget, params)
        return {
            "shares": [_fmt(s) for s in alloc.shares],
            "diagnostics": {
                "gini": det.gini(alloc.shares),
                "top_decile_share": det.top_decile_share(alloc.shares),
            },
        }

    @app.post("/v1/lottery/probabilities")
    def lottery_probabilities(body: ProbabilitiesRequest):
        policy = lot.selection_probabilities(body.scores, body.alpha, body.tau)
        return {"p": [_fmt(p) for p in policy.probabilities]}

    @app.post("/v1/lottery/draw")
    def lottery_draw(body: DrawRequest):
        params = lot.StochParams(
            alpha=body.params.alpha,
            tau=body.params.tau,
            k=body.params.k,
            seed_grant=body.params.seed_grant,
            gamma_cond=body.params.gamma_cond,
        )
        seed = body.rng_seed if body.rng_seed is not None else fresh_seed()
        result = lot.run_lottery(body.scores, body.budget, params, rng_seed=seed)
        return {
            "rng_seed": result.rng_seed,
            "params": {
                "alpha": params.alpha,
                "tau": params.tau,
                "k": params.k,
                "seed_grant": params.seed_grant,
                "gamma_cond": params.gamma_cond,
            },
            "selected": list(result.selected),
            "allocation": [
                {"researcher_id": str(idx), "amount": _fmt(result.allocation.shares[j])}
                for j, idx in enumerate(result.selected)
            ],
        }

    @app.post("/v1/backtest/grid")
    def backtest_grid(body: BacktestRequest):
        cohort = _resolve_cohort(store, body)
        grid = _grid_from_body(body)
        n_draws = body.n_draws or bt.DEFAULT_N_DRAWS
        # Stochastic bodies without a seed get one up front so queued and
        # synchronous runs are equally reproducible from the response.
        if body.mechanism == "stoch" and body.root_seed is None:
            body.root_seed = fresh_seed()
        if _grid_size(grid, body.mechanism, n_draws) <= SYNC_LIMIT:
            return _run_backtest(body, cohort, grid)
        token = jobs.submit(lambda: _run_backtest(body, cohort, grid))
        return JSONResponse(status_code=202, content={"job_id": token, "status": "running"})

    @app.get("/v1/backtest/jobs/{token}")
    def backtest_job(token: str):
        job = jobs.status(token)
        if job["status"] == "running":
            return JSONResponse(status_code=202, content={"status": "running"})
        if job["status"] == "error":
            err: ApiError = job["error"]
            return JSONResponse(status_code=err.status, content=err.body())
        return job["result"]

    return app


app = create_app()


if __name__ == "__main__":
    import uvicorn

    bind = os.environ.get("FUNDALLOC_BIND", "127.0.0.1:8000")
    host, _, port = bind.partition(":")
    uvicorn.run(app, host=host, port=int(port or 8000))
