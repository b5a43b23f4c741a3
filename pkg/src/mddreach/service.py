"""HTTP service wrapping the engine: one stateless request per run.

Handlers are plain functions over the pydantic models so the CLI can call
them in-process; the FastAPI routes only translate ServiceError into an
error payload.  Counts travel as decimal strings since symbolic state
counts overflow machine words by design.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .distsim import ConfigError, SimConfig, run_scenario
from .explicit import StateCapExceeded, explicit_generate
from .mdd import NodeCapExceeded
from .model import ParseError, parse_model
from .queries import QueryError, eval_query, parse_query
from .symbolic import SymbolicEngine, bfs_generate, chained_saturate, saturate

STRATEGIES = ("explicit", "bfs", "saturation", "saturation-chained")


class ServiceError(Exception):
    """Domain failure with a stable machine-readable code."""

    def __init__(self, code, message, status=400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


class GenerateRequest(BaseModel):
    net_text: str
    strategy: Literal["explicit", "bfs", "saturation", "saturation-chained"] = "saturation"
    node_cap: Optional[int] = None
    state_cap: Optional[int] = None
    include_timings: bool = False


class GenerateResponse(BaseModel):
    state_count: str
    metrics: dict


class DistsimRequest(BaseModel):
    net_text: str
    mode: Literal["explicit", "vertical", "horizontal"]
    n: int = Field(default=1, alias="N", ge=1)
    partition: dict = Field(default_factory=dict)
    buffer_size: int = Field(default=64, alias="B", ge=1)
    caps: dict = Field(default_factory=dict)
    delay_seed: Optional[int] = None
    verify: bool = False
    include_timings: bool = False

    model_config = {"populate_by_name": True}


class DistsimResponse(BaseModel):
    state_count: str
    metrics: dict
    table: str
    verified: Optional[str] = None


class CtlRequest(BaseModel):
    net_text: str
    query: str
    node_cap: Optional[int] = None
    limit: int = Field(default=0, ge=0)  # states to enumerate in the reply


class CtlResponse(BaseModel):
    satisfying: str
    reachable: str
    states: Optional[list] = None


class DumpRequest(BaseModel):
    net_text: str
    what: Literal["states", "forest"] = "states"
    limit: int = Field(default=100_000, ge=1)


class DumpResponse(BaseModel):
    lines: list


def _parse(net_text):
    try:
        return parse_model(net_text)
    except ParseError as exc:
        raise ServiceError("parse_error", str(exc)) from exc


def run_generate(req: GenerateRequest) -> GenerateResponse:
    model = _parse(req.net_text)
    try:
        if req.strategy == "explicit":
            _, metrics = explicit_generate(model, state_cap=req.state_cap)
        elif req.strategy == "bfs":
            _, metrics = bfs_generate(model, node_cap=req.node_cap)
        elif req.strategy == "saturation":
            _, metrics = saturate(model, node_cap=req.node_cap)
        else:
            _, metrics = chained_saturate(model, node_cap=req.node_cap)
    except (NodeCapExceeded, StateCapExceeded) as exc:
        raise ServiceError("cap_exceeded", str(exc)) from exc
    return GenerateResponse(
        state_count=metrics.state_count,
        metrics=metrics.to_dict(include_timings=req.include_timings))


def run_distsim(req: DistsimRequest) -> DistsimResponse:
    model = _parse(req.net_text)
    try:
        config = SimConfig(
            mode=req.mode, n_workers=req.n, partition=req.partition,
            buffer_size=req.buffer_size,
            node_cap=req.caps.get("node_cap"),
            state_cap=req.caps.get("state_cap"),
            delay_seed=req.delay_seed)
        metrics, payload = run_scenario(model, config)
    except (NodeCapExceeded, StateCapExceeded) as exc:
        raise ServiceError("cap_exceeded", str(exc)) from exc
    except (ConfigError, ValueError) as exc:
        raise ServiceError("invalid_config", str(exc)) from exc

    verified = None
    if req.verify:
        verified = _verify_scenario(req, model, metrics, payload)
    return DistsimResponse(
        state_count=metrics.state_count,
        metrics=metrics.to_dict(include_timings=req.include_timings),
        table=metrics.to_table(),
        verified=verified)


def _verify_scenario(req, model, metrics, payload):
    """Compare the distributed result against the sequential strategy."""
    fresh = _parse(req.net_text)
    if req.mode == "explicit":
        store, _ = explicit_generate(fresh, state_cap=req.caps.get("state_cap"))
        combined = set().union(*(s.visited for s in payload["stores"]))
        if combined != store.visited:
            raise ServiceError(
                "verify_mismatch",
                f"distributed found {len(combined)} states, "
                f"sequential {len(store.visited)}", status=409)
        return f"ok (explicit state sets equal, {len(combined)} states)"
    if req.mode == "vertical":
        # run bfs inside the simulation's forest: equal sets share one root
        union = payload["union"]
        result, _ = bfs_generate(fresh, forest=union.forest)
        if result.root != union.root:
            raise ServiceError(
                "verify_mismatch",
                f"distributed union {metrics.state_count} differs from "
                f"sequential bfs {result.count()}", status=409)
        return f"ok (vertical union equals sequential bfs, {metrics.state_count} states)"
    # horizontal
    result, seq_metrics = saturate(fresh, node_cap=req.caps.get("node_cap"))
    node_sum = sum(stats.nodes for stats in metrics.per_worker)
    if metrics.state_count != seq_metrics.state_count:
        raise ServiceError(
            "verify_mismatch",
            f"distributed count {metrics.state_count} differs from "
            f"sequential {seq_metrics.state_count}", status=409)
    if node_sum != seq_metrics.final_nodes:
        raise ServiceError(
            "verify_mismatch",
            f"resident-node sum {node_sum} differs from sequential "
            f"final nodes {seq_metrics.final_nodes}", status=409)
    return (f"ok (resident-node sum {node_sum} == sequential {seq_metrics.final_nodes}, "
            f"{metrics.state_count} states)")


def run_ctl(req: CtlRequest) -> CtlResponse:
    model = _parse(req.net_text)
    try:
        query = parse_query(req.query)
        engine = SymbolicEngine(model, node_cap=req.node_cap)
        reachable, _ = engine.saturate()
        satisfying = eval_query(engine, query, reachable)
    except QueryError as exc:
        raise ServiceError("query_error", str(exc)) from exc
    except NodeCapExceeded as exc:
        raise ServiceError("cap_exceeded", str(exc)) from exc
    states = None
    if req.limit:
        shown = engine.forest.first_tuples(satisfying.root, req.limit)
        states = [list(s) for s in shown]
    return CtlResponse(
        satisfying=str(satisfying.count()),
        reachable=str(reachable.count()),
        states=states)


def run_dump(req: DumpRequest) -> DumpResponse:
    model = _parse(req.net_text)
    try:
        result, _ = saturate(model)
        if req.what == "forest":
            lines = result.forest.dump_lines(result.root)
        else:
            lines = [" ".join(str(c) for c in s)
                     for s in result.tuples(limit=req.limit)]
    except NodeCapExceeded as exc:
        raise ServiceError("cap_exceeded", str(exc)) from exc
    except ValueError as exc:
        raise ServiceError("cap_exceeded", str(exc)) from exc
    return DumpResponse(lines=lines)


app = FastAPI(title="mddreach", version="0.1.0")


@app.exception_handler(ServiceError)
async def _service_error(request, exc):
    return JSONResponse(status_code=exc.status,
                        content={"code": exc.code, "message": exc.message})


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/generate", response_model=GenerateResponse)
def generate_endpoint(req: GenerateRequest):
    return run_generate(req)


@app.post("/distsim", response_model=DistsimResponse)
def distsim_endpoint(req: DistsimRequest):
    return run_distsim(req)


@app.post("/ctl", response_model=CtlResponse)
def ctl_endpoint(req: CtlRequest):
    return run_ctl(req)


@app.post("/dump", response_model=DumpResponse)
def dump_endpoint(req: DumpRequest):
    return run_dump(req)
