"""HTTP service: one graph per process, layout jobs, filtering, live progress.

A thin adapter over the library — every response is derived from
graph_model / layout_engine / graph_ops outputs, and the handlers only
translate between HTTP and those calls. One layout job may run at a
time; its progress fans out to any number of server-sent-event
subscribers as JSON payloads, with position snapshots every
SNAPSHOT_EVERY iterations rounded to 6 significant digits in transit.

Routes (all JSON, errors shaped {"error": {"code", "message"}}):

    GET  /api/graph                  the loaded graph document
    POST /api/layout                 start a job (409 if one is active)
    GET  /api/layout/{id}            job status
    GET  /api/layout/{id}/events     SSE progress stream
    POST /api/layout/{id}/stop       cooperative stop, keeps latest result
    POST /api/filter                 apply a filter spec to the session
    GET  /api/node/{id}              node details and neighbor list
    GET  /                           the bundled web viewer
"""

from __future__ import annotations

import json
import logging
import queue
import threading
from importlib import resources

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles

from .errors import InputError, TGForgeError
from .graph_model import TheoryGraph, serialize_graph
from .graph_ops import apply_filter_spec, filter_spec_from_json
from .layout_engine import (
    Layout,
    LayoutParams,
    LayoutProgress,
    layout_to_json_dict,
    params_from_json_dict,
    params_to_json_dict,
    run_layout,
)

log = logging.getLogger(__name__)

SNAPSHOT_EVERY = 5

PENDING, RUNNING, CONVERGED, STOPPED, FAILED = (
    "pending", "running", "converged", "stopped", "failed")
TERMINAL = (CONVERGED, STOPPED, FAILED)


def _round6(value: float) -> float:
    return float(f"{value:.6g}")


def _round_positions(positions) -> dict:
    return {nid: [_round6(p[0]), _round6(p[1]), _round6(p[2])]
            for nid, p in positions.items()}


class LayoutJob:
    """One background layout run and its event fan-out."""

    def __init__(self, job_id: str, params: LayoutParams):
        self.id = job_id
        self.params = params
        self.state = PENDING
        self.latest: LayoutProgress | None = None
        self.result: Layout | None = None
        self.error: str | None = None
        self._stop = threading.Event()
        self._lock = threading.Lock()
        self._subscribers: list[queue.Queue] = []
        self._terminal_event: dict | None = None

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            if self._terminal_event is not None:
                q.put(self._terminal_event)
            else:
                self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue):
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def publish(self, event: dict, terminal: bool = False):
        with self._lock:
            if self._terminal_event is not None:
                return  # never emit past a terminal event
            if terminal:
                self._terminal_event = event
            for q in self._subscribers:
                q.put(event)
            if terminal:
                self._subscribers.clear()

    def request_stop(self):
        self._stop.set()

    def stop_requested(self) -> bool:
        return self._stop.is_set()

    def status_dict(self) -> dict:
        doc = {"id": self.id, "state": self.state}
        if self.latest is not None:
            doc["iteration"] = self.latest.iteration
            doc["maxDisplacement"] = self.latest.max_displacement
            doc["meanEdgeLength"] = self.latest.mean_edge_length
        if self.result is not None:
            doc["converged"] = self.result.converged
            doc["iterations"] = self.result.iterations_run
        if self.error is not None:
            doc["error"] = self.error
        return doc


class Session:
    """Per-process state: the graph, the active filter, the last layout
    (from the most recent finished job, or preloaded from a file)."""

    def __init__(self, graph: TheoryGraph, initial_layout: Layout | None = None):
        self.graph = graph
        self.filter_spec = None
        self.layout: Layout | None = initial_layout
        self.jobs: dict[str, LayoutJob] = {}
        self.active: LayoutJob | None = None
        self.lock = threading.Lock()
        self._counter = 0

    def new_job(self, params: LayoutParams) -> LayoutJob:
        with self.lock:
            if self.active is not None and self.active.state in (PENDING, RUNNING):
                raise JobConflict(self.active.id)
            self._counter += 1
            job = LayoutJob(f"job-{self._counter}", params)
            self.jobs[job.id] = job
            self.active = job
            return job


class JobConflict(Exception):
    def __init__(self, job_id: str):
        super().__init__(f"layout job {job_id} is already running")
        self.job_id = job_id


def _run_job(session: Session, job: LayoutJob):
    job.state = RUNNING

    def on_progress(progress: LayoutProgress):
        job.latest = progress
        if progress.iteration % SNAPSHOT_EVERY == 0 and progress.snapshot is not None:
            job.publish({
                "jobId": job.id,
                "state": RUNNING,
                "iteration": progress.iteration,
                "maxDisplacement": progress.max_displacement,
                "meanEdgeLength": progress.mean_edge_length,
                "positions": _round_positions(progress.snapshot.positions),
            })

    try:
        layout = run_layout(session.graph, job.params, on_progress,
                            snapshot_every=SNAPSHOT_EVERY,
                            should_stop=job.stop_requested)
    except Exception as exc:  # surfaced to pollers and subscribers
        log.exception("layout job %s failed", job.id)
        job.error = str(exc)
        job.state = FAILED
        job.publish({"jobId": job.id, "state": FAILED, "error": job.error},
                    terminal=True)
        return

    job.result = layout
    with session.lock:
        session.layout = layout
    if job.stop_requested() or not layout.converged:
        job.state = STOPPED  # stopped by the user or by the iteration cap
    else:
        job.state = CONVERGED
    job.publish({
        "jobId": job.id,
        "state": job.state,
        "converged": layout.converged,
        "iterations": layout.iterations_run,
        "maxDisplacement": layout.final_max_displacement,
        "positions": _round_positions(layout.positions),
    }, terminal=True)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"error": {"code": code, "message": message}},
                        status_code=status)


def default_static_dir():
    path = resources.files("tgforge").joinpath("static")
    return str(path) if path.is_dir() else None


def create_app(graph: TheoryGraph, static_dir: str | None = None,
               initial_layout: Layout | None = None) -> FastAPI:
    app = FastAPI(title="tgforge", docs_url=None, redoc_url=None)
    session = Session(graph, initial_layout)
    app.state.session = session
    graph_document = serialize_graph(graph)

    @app.exception_handler(InputError)
    async def on_input_error(request: Request, exc: InputError):
        return _error(400, exc.code, str(exc))

    @app.exception_handler(TGForgeError)
    async def on_domain_error(request: Request, exc: TGForgeError):
        return _error(400, exc.code, str(exc))

    @app.get("/api/graph")
    def get_graph():
        return Response(graph_document,
                        media_type="application/json; charset=utf-8")

    @app.post("/api/layout", status_code=202)
    async def start_layout(request: Request):
        body = await request.body()
        try:
            doc = json.loads(body) if body else {}
        except json.JSONDecodeError as exc:
            return _error(400, "parse", f"invalid JSON body: {exc.msg}")
        if not isinstance(doc, dict):
            return _error(400, "input", "layout parameters must be an object")
        params = params_from_json_dict(doc)  # InputError -> 400, names the field
        try:
            job = session.new_job(params)
        except JobConflict as exc:
            return _error(409, "busy", str(exc))
        thread = threading.Thread(target=_run_job, args=(session, job),
                                  name=job.id, daemon=True)
        thread.start()
        return {"id": job.id, "params": params_to_json_dict(params)}

    def _job_or_none(job_id: str) -> LayoutJob | None:
        return session.jobs.get(job_id)

    @app.get("/api/layout/{job_id}")
    def job_status(job_id: str):
        job = _job_or_none(job_id)
        if job is None:
            return _error(404, "not-found", f"unknown job {job_id!r}")
        doc = job.status_dict()
        if job.result is not None:
            doc["layout"] = layout_to_json_dict(job.result, job.params)
        return doc

    @app.post("/api/layout/{job_id}/stop")
    def stop_job(job_id: str):
        job = _job_or_none(job_id)
        if job is None:
            return _error(404, "not-found", f"unknown job {job_id!r}")
        job.request_stop()
        return job.status_dict()

    @app.get("/api/layout/{job_id}/events")
    def job_events(job_id: str):
        job = _job_or_none(job_id)
        if job is None:
            return _error(404, "not-found", f"unknown job {job_id!r}")

        def stream():
            q = job.subscribe()
            try:
                while True:
                    try:
                        event = q.get(timeout=10.0)
                    except queue.Empty:
                        yield ": keep-alive\n\n"
                        continue
                    yield f"data: {json.dumps(event)}\n\n"
                    if event.get("state") in TERMINAL:
                        return
            finally:
                job.unsubscribe(q)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.post("/api/filter")
    async def apply_filter(request: Request):
        body = await request.body()
        try:
            doc = json.loads(body) if body else {}
        except json.JSONDecodeError as exc:
            return _error(400, "parse", f"invalid JSON body: {exc.msg}")
        spec = filter_spec_from_json(doc, session.graph)
        with session.lock:
            layout = session.layout
        visible = apply_filter_spec(session.graph, spec, layout)
        with session.lock:
            session.filter_spec = spec
        return visible.to_json_dict()

    @app.get("/api/node/{node_id}")
    def node_details(node_id: str):
        if not session.graph.has_node(node_id):
            return _error(404, "not-found", f"unknown node {node_id!r}")
        node = session.graph.node(node_id)
        neighbors = []
        for e in session.graph.edges:
            if e.source == node_id:
                neighbors.append({"nodeId": e.target, "edgeKind": e.kind,
                                  "direction": "outgoing", "edgeId": e.id})
            elif e.target == node_id:
                neighbors.append({"nodeId": e.source, "edgeKind": e.kind,
                                  "direction": "incoming", "edgeId": e.id})
        return {
            "id": node.id,
            "label": node.label,
            "uri": node.uri,
            "detailsUrl": node.details_url,
            "neighbors": neighbors,
        }

    static = static_dir if static_dir is not None else default_static_dir()
    if static is not None:
        app.mount("/", StaticFiles(directory=static, html=True), name="viewer")
    else:  # pragma: no cover - packaged builds always ship static assets
        @app.get("/")
        def index_placeholder():
            return Response("tgforge service is running; no viewer assets bundled.",
                            media_type="text/plain")

    return app
