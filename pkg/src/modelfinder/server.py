"""HTTP service for interactive use: sessions, configurations, finder jobs.

Sessions live in memory. Each session serializes its mutations behind a lock
and runs at most one finder job at a time; further submissions queue. Config
writes are validated before anything runs and failures come back as 422 with
per-key errors, which is what drives field-level highlighting in the UI.
"""

from __future__ import annotations

import argparse
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .analyzer import analyze
from .config import (ConfigFile, _apply_key, clone_config, default_config,
                     delete_config, parse_config_file, rename_config,
                     serialize_config_file, validate)
from .diagnostics import NOWHERE, InputError, SourceLocation
from .finder import FinderProblem, find
from .model import Model, check_well_formed
from .parsing import parse_model, parse_state_commands
from .state import EMPTY_STATE, export_dot, export_json, state_to_obj
from .tasks import check_consistency, check_independence


@dataclass
class Job:
    id: str
    kind: str  # validate | consistency | independence
    state: str = "queued"  # queued | running | done | cancelled
    result: Optional[dict] = None
    witness: object = None
    cancel: threading.Event = field(default_factory=threading.Event)


@dataclass
class Session:
    id: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    model: Optional[Model] = None
    model_filename: str = "<model>"
    config_file: Optional[ConfigFile] = None
    jobs: dict = field(default_factory=dict)
    worker: Optional[threading.Thread] = None
    queue: list = field(default_factory=list)


def _loc_obj(loc: SourceLocation) -> Optional[dict]:
    if loc is NOWHERE:
        return None
    return {"file": loc.file, "line": loc.line, "column": loc.column}


def _error_payload(diags) -> dict:
    return {"errors": [
        {"key": getattr(d, "key", getattr(d, "code", "")),
         "message": d.message,
         "location": _loc_obj(d.location)}
        for d in diags
    ]}


def _config_values(cfg) -> dict:
    """Flat key -> value-string view of a configuration, the same keys the
    file format uses."""
    text = serialize_config_file(ConfigFile("", {"x": cfg}))
    values = {}
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _config_from_values(values: dict, model: Model):
    """Build a configuration from a key -> string mapping; returns
    (config, errors)."""
    cfg = default_config(model)
    errors = []
    for key, value in values.items():
        e = _apply_key(cfg, str(key), str(value), model, NOWHERE)
        if e is not None:
            errors.append(e)
    return cfg, errors


def create_app(static_dir: str = None) -> FastAPI:
    app = FastAPI(title="modelfinder", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    jobs_index: dict[str, tuple[Session, Job]] = {}

    def session_of(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"unknown session '{sid}'")
        return s

    def require_model(s: Session) -> Model:
        if s.model is None:
            raise HTTPException(409, "no model loaded in this session")
        return s.model

    def config_of(s: Session, name: str):
        if s.config_file is None or name not in s.config_file.configs:
            raise HTTPException(404, f"unknown configuration '{name}'")
        return s.config_file.configs[name]

    # -- sessions -------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session():
        sid = uuid.uuid4().hex[:12]
        sessions[sid] = Session(id=sid)
        return {"id": sid}

    @app.post("/sessions/{sid}/model")
    def load_model(sid: str, body: dict):
        s = session_of(sid)
        text = body.get("text")
        if not isinstance(text, str):
            raise HTTPException(422, "body must carry a 'text' field")
        filename = body.get("filename", "<model>")
        try:
            model = parse_model(text, filename)
        except InputError as e:
            return JSONResponse(status_code=422, content=_error_payload(e.diagnostics))
        errors = check_well_formed(model)
        if errors:
            return JSONResponse(status_code=422, content=_error_payload(errors))

        cfile = None
        sidecar = None
        if filename != "<model>":
            candidate = Path(filename).with_suffix(".properties")
            if candidate.exists():
                try:
                    cfile = parse_config_file(candidate.read_text(encoding="utf-8"),
                                              model, str(candidate))
                    sidecar = str(candidate)
                except InputError:
                    cfile = None
        if cfile is None:
            cfile = ConfigFile("", {"default": default_config(model)})
        with s.lock:
            s.model = model
            s.model_filename = filename
            s.config_file = cfile
        return {
            "model": {
                "name": model.name,
                "classes": [{
                    "name": c.name,
                    "abstract": c.is_abstract,
                    "parents": list(c.parents),
                    "attributes": [{"name": a.name, "type": str(a.type)}
                                   for a in model.all_attributes(c.name)],
                } for c in model.classes],
                "associations": [{
                    "name": a.name,
                    "ends": [{"class": e.cls, "role": e.role,
                              "multiplicity": str(e.multiplicity)} for e in a.ends],
                } for a in model.associations],
                "invariants": [{"name": inv.qualified_name,
                                "expression": inv.body.source_text()}
                               for inv in model.invariants],
            },
            "configs": list(cfile.configs),
            "sidecar": sidecar,
            "warnings": [w.message for w in analyze(model)],
        }

    # -- configurations -------------------------------------------------

    @app.get("/sessions/{sid}/configs")
    def list_configs(sid: str):
        s = session_of(sid)
        require_model(s)
        return {"configs": list(s.config_file.configs)}

    @app.get("/sessions/{sid}/configs/{name}")
    def read_config(sid: str, name: str):
        s = session_of(sid)
        require_model(s)
        cfg = config_of(s, name)
        return {"name": name, "values": _config_values(cfg)}

    @app.put("/sessions/{sid}/configs/{name}")
    def write_config(sid: str, name: str, body: dict):
        s = session_of(sid)
        model = require_model(s)
        values = body.get("values")
        if not isinstance(values, dict):
            raise HTTPException(422, "body must carry a 'values' mapping")
        cfg, errors = _config_from_values(values, model)
        errors += validate(cfg, model)
        if errors:
            return JSONResponse(status_code=422, content=_error_payload(errors))
        with s.lock:
            s.config_file.configs[name] = cfg
        return {"name": name, "values": _config_values(cfg)}

    @app.post("/sessions/{sid}/configs/{name}/clone")
    def clone(sid: str, name: str, body: dict = None):
        s = session_of(sid)
        require_model(s)
        new_name = (body or {}).get("name")
        with s.lock:
            try:
                s.config_file = clone_config(s.config_file, name, new_name)
            except InputError as e:
                code = 409 if "already exists" in e.diagnostics[0].message else 404
                raise HTTPException(code, e.diagnostics[0].message)
        return {"configs": list(s.config_file.configs)}

    @app.post("/sessions/{sid}/configs/{name}/rename")
    def rename(sid: str, name: str, body: dict):
        s = session_of(sid)
        require_model(s)
        new_name = body.get("name")
        if not isinstance(new_name, str):
            raise HTTPException(422, "body must carry a 'name' field")
        with s.lock:
            try:
                s.config_file = rename_config(s.config_file, name, new_name)
            except InputError as e:
                code = 409 if "already exists" in e.diagnostics[0].message else 404
                raise HTTPException(code, e.diagnostics[0].message)
        return {"configs": list(s.config_file.configs)}

    @app.post("/sessions/{sid}/configs/{name}/delete")
    def delete(sid: str, name: str):
        s = session_of(sid)
        require_model(s)
        with s.lock:
            try:
                s.config_file = delete_config(s.config_file, name)
            except InputError as e:
                raise HTTPException(404, e.diagnostics[0].message)
        return {"configs": list(s.config_file.configs)}

    # -- warnings -------------------------------------------------------

    @app.get("/sessions/{sid}/warnings")
    def warnings(sid: str, config: str = None):
        s = session_of(sid)
        model = require_model(s)
        cfg = config_of(s, config) if config is not None else None
        return {"warnings": [{
            "kind": w.kind,
            "message": w.message,
            "location": _loc_obj(w.location),
            "expression": w.expression_text,
        } for w in analyze(model, cfg)]}

    # -- jobs -----------------------------------------------------------

    def run_job(s: Session, job: Job, model: Model, cfg, base, kind, invariant, limit):
        with s.lock:
            if job.state == "cancelled":
                return
            job.state = "running"
        try:
            if kind == "validate":
                res = find(FinderProblem(model, cfg, base), cancel=job.cancel)
                result = {"verdict": res.verdict,
                          "stats": {"decisions": res.stats.decisions,
                                    "elapsed": res.stats.elapsed},
                          "log": list(res.log)}
                if res.state is not None:
                    result["state"] = state_to_obj(res.state)
                    job.witness = res.state
            else:
                check = check_consistency if kind == "consistency" else \
                    lambda m, c, **kw: check_independence(m, c, invariant, **kw)
                rep = check(model, cfg, base=base, cancel=job.cancel)
                result = rep.to_obj()
                if rep.witness is not None:
                    job.witness = rep.witness
        except Exception as e:  # surfaced to the client, not the server log
            result = {"verdict": "ERROR", "message": str(e)}
        with s.lock:
            job.state = "cancelled" if job.cancel.is_set() else "done"
            job.result = result
            s.worker = None
            if s.queue:
                start_next(s)

    def start_next(s: Session):
        # caller holds s.lock
        args = s.queue.pop(0)
        t = threading.Thread(target=run_job, args=args, daemon=True)
        s.worker = t
        t.start()

    @app.post("/sessions/{sid}/jobs", status_code=202)
    def submit_job(sid: str, body: dict):
        s = session_of(sid)
        model = require_model(s)
        kind = body.get("kind")
        if kind not in ("validate", "consistency", "independence"):
            raise HTTPException(422, "kind must be validate, consistency or independence")
        cfg = config_of(s, body.get("configName", ""))
        errors = validate(cfg, model)
        if errors:
            return JSONResponse(status_code=422, content=_error_payload(errors))
        invariant = body.get("invariant")
        if kind == "independence":
            if not invariant or model.get_invariant(invariant) is None:
                raise HTTPException(422, f"unknown invariant '{invariant}'")
        base = EMPTY_STATE
        if body.get("baseState"):
            try:
                base = parse_state_commands(body["baseState"], model)
            except InputError as e:
                return JSONResponse(status_code=422, content=_error_payload(e.diagnostics))
        job = Job(id=uuid.uuid4().hex[:12], kind=kind)
        with s.lock:
            s.jobs[job.id] = job
            jobs_index[job.id] = (s, job)
            s.queue.append((s, job, model, cfg.clone(), base, kind, invariant,
                            body.get("limit")))
            if s.worker is None:
                start_next(s)
        return {"id": job.id, "state": job.state}

    def job_of(jid: str) -> tuple[Session, Job]:
        entry = jobs_index.get(jid)
        if entry is None:
            raise HTTPException(404, f"unknown job '{jid}'")
        return entry

    @app.get("/jobs/{jid}")
    def job_status(jid: str):
        _, job = job_of(jid)
        return {"id": job.id, "kind": job.kind, "state": job.state,
                "result": job.result}

    @app.post("/jobs/{jid}/cancel")
    def cancel_job(jid: str):
        s, job = job_of(jid)
        with s.lock:
            if job.state in ("queued", "running"):
                job.cancel.set()
                if job.state == "queued":
                    job.state = "cancelled"
                    s.queue = [q for q in s.queue if q[1] is not job]
        return {"id": job.id, "state": job.state}

    @app.get("/jobs/{jid}/state.json")
    def job_state_json(jid: str):
        _, job = job_of(jid)
        if job.witness is None:
            raise HTTPException(404, "job has no state to export")
        return PlainTextResponse(export_json(job.witness), media_type="application/json")

    @app.get("/jobs/{jid}/state.dot")
    def job_state_dot(jid: str):
        _, job = job_of(jid)
        if job.witness is None:
            raise HTTPException(404, "job has no state to export")
        return PlainTextResponse(export_dot(job.witness), media_type="text/vnd.graphviz")

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def main(argv=None) -> int:
    import uvicorn

    p = argparse.ArgumentParser(prog="modelfinder-server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", help="directory of built UI assets to serve at /")
    args = p.parse_args(argv)
    uvicorn.run(create_app(args.static), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    main()
