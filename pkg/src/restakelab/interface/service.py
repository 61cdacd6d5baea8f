"""HTTP JSON service backing the explorer UI.

Stateless between requests: the loaded graph fixture and the default
scenario are immutable, every computation is a pure function of the request
body, and concurrent what-if exploration cannot interfere.  Errors surface
as `{"code", "message", "detail"}` objects with stable codes and never leak
tracebacks.  Heavy computations (forest fits) run on a bounded worker pool
with a request timeout.
"""

from __future__ import annotations

import asyncio
import datetime as dt
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .. import __version__
from .._paths import repo_root, schemas_dir
from ..econometrics import granger_scan
from ..errors import RestakelabError
from ..flowgraph import FlowGraph, graph_metrics
from ..forest import ForestConfig, MaxFeaturesRule
from ..pipeline import Panel, engineer_features
from ..stress import ScenarioConfig, run_scenario
from . import ops

CODE_BAD_REQUEST = "BadRequest"
CODE_NOT_FOUND = "NotFound"
CODE_ENGINE_ERROR = "EngineError"


@dataclass(frozen=True)
class ApiError:
    code: str
    message: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


class ApiException(Exception):
    def __init__(self, status: int, error: ApiError):
        self.status = status
        self.error = error
        super().__init__(error.message)


def _bad_request(message: str, detail: str = "") -> ApiException:
    return ApiException(400, ApiError(CODE_BAD_REQUEST, message, detail))


def _panel_from_payload(doc: dict) -> Panel:
    if not isinstance(doc, dict):
        raise _bad_request("panel payload must be an object")
    try:
        dates = tuple(dt.date.fromisoformat(d) for d in doc["dates"])
        columns = {
            str(name): np.asarray(values, dtype=float)
            for name, values in doc["columns"].items()
        }
    except KeyError as exc:
        raise _bad_request(f"panel payload missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise _bad_request("panel payload malformed", str(exc)) from None
    n = len(dates)
    for name, values in columns.items():
        if values.shape != (n,):
            raise _bad_request(
                f"panel column {name!r} has {values.size} values for {n} dates"
            )
    return Panel(dates=dates, columns=columns)


async def _json_body(request: Request) -> dict:
    try:
        doc = await request.json()
    except Exception:
        raise _bad_request("request body must be JSON") from None
    if not isinstance(doc, dict):
        raise _bad_request("request body must be a JSON object")
    return doc


def create_app(
    graph: FlowGraph,
    scenario_defaults: ScenarioConfig,
    ui_dir: str | Path | None = None,
    heavy_timeout: float = 120.0,
    workers: int = 4,
) -> FastAPI:
    app = FastAPI(title="restakelab", version=__version__, docs_url=None, redoc_url=None)
    pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="engine")

    async def run_heavy(fn, /, *args, **kwargs):
        loop = asyncio.get_running_loop()
        try:
            return await asyncio.wait_for(
                loop.run_in_executor(pool, partial(fn, *args, **kwargs)),
                timeout=heavy_timeout,
            )
        except asyncio.TimeoutError:
            raise ApiException(
                500, ApiError(CODE_ENGINE_ERROR, "computation timed out")
            ) from None

    @app.exception_handler(ApiException)
    async def _api_exception(request: Request, exc: ApiException):
        return JSONResponse(status_code=exc.status, content=exc.error.to_dict())

    @app.exception_handler(RestakelabError)
    async def _engine_exception(request: Request, exc: RestakelabError):
        return JSONResponse(
            status_code=400, content=ApiError(CODE_BAD_REQUEST, str(exc)).to_dict()
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_exception(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=ApiError(CODE_BAD_REQUEST, "invalid request parameters").to_dict(),
        )

    @app.exception_handler(StarletteHTTPException)
    async def _http_exception(request: Request, exc: StarletteHTTPException):
        code = CODE_NOT_FOUND if exc.status_code == 404 else CODE_BAD_REQUEST
        if exc.status_code >= 500:
            code = CODE_ENGINE_ERROR
        return JSONResponse(
            status_code=exc.status_code,
            content=ApiError(code, str(exc.detail)).to_dict(),
        )

    @app.exception_handler(Exception)
    async def _unexpected_exception(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content=ApiError(CODE_ENGINE_ERROR, "internal engine failure").to_dict(),
        )

    # -- endpoints ---------------------------------------------------------

    @app.get("/api/health")
    async def health():
        return {"status": "ok"}

    @app.get("/api/graph")
    async def get_graph():
        return graph.to_dict()

    @app.get("/api/graph/metrics")
    async def get_metrics():
        return {
            "metrics": graph_metrics(graph),
            "scenario_defaults": scenario_defaults.to_dict(),
        }

    @app.post("/api/stress/run")
    async def stress_run(request: Request):
        body = await _json_body(request)
        config = ScenarioConfig.from_dict(body)
        result = run_scenario(graph, config)
        return {"config": config.to_dict(), "result": result.to_dict()}

    @app.get("/api/stress/sweep")
    async def stress_sweep(
        from_depeg: float = Query(0.0, alias="from"),
        to_depeg: float = Query(0.10, alias="to"),
        steps: int = Query(21),
        ltv: float | None = None,
        lt: float | None = None,
        collateral: float | None = None,
        local_dex_liquidity: float | None = None,
        mainnet_liquidity: float | None = None,
        lsp_stake: float | None = None,
    ):
        base = scenario_defaults.to_dict()
        for key, value in (
            ("ltv", ltv),
            ("lt", lt),
            ("collateral", collateral),
            ("local_dex_liquidity", local_dex_liquidity),
            ("mainnet_liquidity", mainnet_liquidity),
            ("lsp_stake", lsp_stake),
        ):
            if value is not None:
                base[key] = value
        base["depeg"] = 0.0
        config = ScenarioConfig.from_dict(base)
        points = ops.sweep(config, from_depeg, to_depeg, steps, graph=graph)
        return {
            "config": config.to_dict(),
            "points": [
                {"depeg": delta, "result": result.to_dict()} for delta, result in points
            ],
        }

    @app.post("/api/regress")
    async def regress(request: Request):
        body = await _json_body(request)
        panel = _panel_from_payload(body.get("panel"))
        models = tuple(body.get("models", (1, 2, 3)))
        cov = "HC3" if str(body.get("cov", "classical")).lower() == "hc3" else "Classical"
        robust = bool(body.get("robust", False))

        def work():
            frame = engineer_features(panel)
            fits = ops.regress_models(frame, models, cov=cov, robust=robust)
            return {"fits": ops.model_tables_payload(fits)}

        return await run_heavy(work)

    @app.post("/api/granger")
    async def granger(request: Request):
        body = await _json_body(request)
        panel = _panel_from_payload(body.get("panel"))
        cause = body.get("cause")
        effect = body.get("effect", "Revenue")
        max_lag = int(body.get("max_lag", 5))

        def work():
            frame = engineer_features(panel)
            X = frame.design
            series = {X.y_name: X.y, **X.columns}
            if cause not in series or effect not in series:
                raise _bad_request(
                    f"unknown column; available: {sorted(series)}"
                )
            results = granger_scan(series[cause], series[effect], max_lag=max_lag)
            selected = next(r for r in results if r.selected)
            return {
                "cause": cause,
                "effect": effect,
                "results": [r.to_dict() for r in results],
                "selected_lag": selected.lag,
            }

        return await run_heavy(work)

    @app.post("/api/importance")
    async def importance(request: Request):
        body = await _json_body(request)
        panel = _panel_from_payload(body.get("panel"))
        config = ForestConfig(
            n_trees=int(body.get("trees", 100)),
            max_features=MaxFeaturesRule(body.get("max_features", "AllOverThree")),
            min_leaf=int(body.get("min_leaf", 5)),
            seed=int(body.get("seed", 0)),
        )
        repeats = int(body.get("repeats", 5))
        include_events = bool(body.get("include_events", False))
        holdout = body.get("holdout")

        def work():
            frame = engineer_features(panel)
            report = ops.forest_importance(
                frame,
                config,
                repeats=repeats,
                include_events=include_events,
                holdout=None if holdout is None else float(holdout),
            )
            return {"report": report.to_dict()}

        return await run_heavy(work)

    # -- static assets -------------------------------------------------------

    schemas = schemas_dir()
    if schemas.is_dir():
        app.mount("/schemas", StaticFiles(directory=schemas), name="schemas")

    if ui_dir is None:
        candidate = repo_root() / "frontend" / "dist"
        ui_dir = candidate if candidate.is_dir() else None
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
