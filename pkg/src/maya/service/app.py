"""HTTP surface: sessions, commands, event streams, prediction, statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from .. import __version__
from ..checkpoint import checkpoint_hash, load_checkpoint
from ..errors import (
    CapacityError,
    ConfigError,
    DuplicateRecordError,
    MayaError,
    PhaseError,
    RangeError,
    StatsError,
)
from ..fer import FerModel, predict as fer_predict
from ..gallery import IdentityGallery
from ..landmarks import EmotionLabel, LandmarkSet
from ..stats import (
    CATEGORY_ORDER,
    QUESTION_TEXTS,
    UTAUTResponse,
    compare_groups,
    compare_questions,
    pain_report,
    render_pain_report,
    render_utaut_report,
)
from ..stats.utaut import CATEGORY_TITLES, CategoryMap
from .store import SessionStore

COMMANDS = (
    "roll", "resolve_expression", "robot_roll", "override", "teach_word",
    "record_pain", "utaut_answer", "robot_action", "finish",
)


@dataclass
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    model_path: Optional[str] = None
    data_dir: str = "maya-data"
    gallery_path: Optional[str] = None
    max_sessions: int = 64
    console_dir: Optional[str] = None  # defaults to the repo's frontend/ if built


class CreateSessionBody(BaseModel):
    kind: Literal["game", "pain", "utaut"]
    config: dict = Field(default_factory=dict)


class CommandBody(BaseModel):
    command: str
    payload: dict = Field(default_factory=dict)


class PredictBody(BaseModel):
    points: list[list[float]]
    subject: str = "api"


class PainRecordsBody(BaseModel):
    records: list[dict]


class UtautStatsBody(BaseModel):
    responses: list[dict]
    pairing: Literal["independent", "by_dyad"] = "independent"
    questions: Optional[list[int]] = None


def _http_error(exc: MayaError) -> HTTPException:
    status = 422
    if isinstance(exc, PhaseError):
        status = 409
    elif isinstance(exc, CapacityError):
        status = 409
    elif isinstance(exc, ConfigError):
        status = 400
    elif isinstance(exc, (DuplicateRecordError,)):
        status = 422
    return HTTPException(status_code=status, detail={"code": exc.code, "message": str(exc)})


def _parse_prediction(doc: dict):
    class _P:
        pass

    p = _P()
    try:
        p.top = int(doc["top"]) if not isinstance(doc["top"], str) \
            else int(EmotionLabel.from_name(doc["top"]))
        probs = [float(v) for v in doc["probs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise StatsError(f"invalid prediction payload: {exc}")
    if len(probs) != 7:
        raise StatsError(f"prediction needs 7 probabilities, got {len(probs)}")
    p.probs = probs
    return p


def create_app(config: ApiConfig) -> FastAPI:
    app = FastAPI(title="maya", version=__version__)
    store = SessionStore(config.data_dir, max_sessions=config.max_sessions)
    app.state.store = store
    app.state.config = config

    model: Optional[FerModel] = None
    model_hash: Optional[str] = None
    if config.model_path and Path(config.model_path).exists():
        network, meta = load_checkpoint(config.model_path)
        model = FerModel(network=network, meta=meta)
        model_hash = checkpoint_hash(config.model_path)
    app.state.model = model

    gallery: Optional[IdentityGallery] = None
    if config.gallery_path:
        path = Path(config.gallery_path)
        gallery = IdentityGallery.load(path) if path.exists() else IdentityGallery()
    app.state.gallery = gallery

    def save_gallery():
        if gallery is not None and config.gallery_path:
            gallery.save(config.gallery_path)

    # -- health -----------------------------------------------------------

    @app.get("/v1/healthz")
    def healthz():
        return {
            "v": 1,
            "build": __version__,
            "model_checkpoint": model_hash,
            "active_sessions": store.active_count(),
        }

    # -- sessions -----------------------------------------------------------

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            rt = store.create_session(body.kind, body.config)
        except MayaError as exc:
            raise _http_error(exc)
        return {"session_id": rt.session_id}

    @app.get("/v1/sessions")
    def list_sessions():
        return {"sessions": [rt.resource() for rt in store.runtimes.values()]}

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return store.get(session_id).resource()
        except KeyError:
            raise HTTPException(404, detail={"code": "not-found", "message": session_id})

    @app.post("/v1/sessions/{session_id}/commands")
    async def run_command(session_id: str, body: CommandBody):
        try:
            rt = store.get(session_id)
        except KeyError:
            raise HTTPException(404, detail={"code": "not-found", "message": session_id})
        if body.command not in COMMANDS:
            raise HTTPException(422, detail={
                "code": "unknown-command",
                "message": f"command must be one of {COMMANDS}",
            })
        try:
            fn = _command_fn(rt.kind, body.command, body.payload, model, gallery)
        except MayaError as exc:
            raise _http_error(exc)
        try:
            events, result = await store.execute(session_id, fn)
        except MayaError as exc:
            raise _http_error(exc)
        if body.command == "resolve_expression" and isinstance(result, dict) \
                and result.get("enroll_embedding") is not None:
            emb = result.pop("enroll_embedding")
            name = result.pop("enroll_name", "")
            if gallery is not None:
                match = gallery.identify(np.array(emb))
                if match is None:
                    result["person_id"] = gallery.enroll(name or session_id, np.array(emb))
                    result["recognized"] = False
                else:
                    result["person_id"] = match.person_id
                    result["recognized"] = True
                save_gallery()
        return {
            "seq": len(rt.events),
            "result": result,
            "events": [json.loads(e.to_json()) for e in events],
            "state": rt.engine.state.snapshot(),
            "status": rt.status,
        }

    @app.get("/v1/sessions/{session_id}/stream")
    async def stream(session_id: str, request: Request,
                     from_seq: int = Query(1, alias="from")):
        try:
            store.get(session_id)
        except KeyError:
            raise HTTPException(404, detail={"code": "not-found", "message": session_id})

        async def event_source():
            async for event in store.subscribe(session_id, from_seq):
                yield f"id: {event.seq}\ndata: {event.to_json()}\n\n"
                if await request.is_disconnected():
                    return
            yield "event: end\ndata: {}\n\n"

        return StreamingResponse(event_source(), media_type="text/event-stream")

    # -- prediction -----------------------------------------------------------

    @app.post("/v1/fer/predict")
    def predict_endpoint(body: PredictBody):
        if model is None:
            raise HTTPException(503, detail={"code": "model-not-loaded",
                                             "message": "no checkpoint configured"})
        return _run_predict(model, body.points, body.subject)

    # -- statistics -----------------------------------------------------------

    @app.post("/v1/stats/pain")
    def stats_pain(body: PainRecordsBody):
        try:
            triples = [
                (str(r["participant_id"]), str(r["mode"]), int(r["score"]))
                for r in body.records
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, detail={"code": "stats", "message": f"bad record: {exc}"})
        try:
            report = pain_report(triples)
        except MayaError as exc:
            raise _http_error(exc)
        return {
            "n": report.n,
            "mean_a": report.mean_a,
            "sd_a": report.sd_a,
            "mean_b": report.mean_b,
            "sd_b": report.sd_b,
            "t_test": None if report.ttest is None else vars(report.ttest),
            "error": report.error,
            "chart": report.chart,
            "text": render_pain_report(report),
        }

    @app.post("/v1/stats/utaut")
    def stats_utaut(body: UtautStatsBody):
        try:
            responses = [
                UTAUTResponse(
                    respondent_id=str(r["respondent_id"]),
                    group=r["group"],
                    answers=tuple(int(a) for a in r["answers"]),
                    dyad_id=r.get("dyad_id"),
                )
                for r in body.responses
            ]
        except MayaError as exc:
            raise _http_error(exc)
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, detail={"code": "stats", "message": f"bad response: {exc}"})
        children = [r for r in responses if r.group == "child"]
        parents = [r for r in responses if r.group == "parent"]
        try:
            rows = compare_groups(children, parents, pairing=body.pairing)
            extra = (compare_questions(children, parents, body.questions, pairing=body.pairing)
                     if body.questions else [])
        except MayaError as exc:
            raise _http_error(exc)
        return {
            "pairing": body.pairing,
            "categories": [dict(item=row.item, **vars(row.result)) for row in rows],
            "questions": [dict(item=row.item, **vars(row.result)) for row in extra],
            "text": render_utaut_report(rows),
        }

    @app.get("/v1/utaut/schema")
    def utaut_schema():
        cmap = CategoryMap.default()
        return {
            "categories": [
                {
                    "code": cat,
                    "title": CATEGORY_TITLES[cat],
                    "questions": [
                        {"index": q, "text": QUESTION_TEXTS[q - 1]}
                        for q in cmap.categories[cat]
                    ],
                }
                for cat in CATEGORY_ORDER
            ],
            "scale": [
                {"value": 1, "label": "strongly disagree"},
                {"value": 2, "label": "disagree"},
                {"value": 3, "label": "neither agree nor disagree"},
                {"value": 4, "label": "agree"},
                {"value": 5, "label": "strongly agree"},
            ],
        }

    # serve the operator console when its build output is present; mounted
    # last so /v1 routes keep precedence
    console_dir = Path(config.console_dir) if config.console_dir else \
        Path(__file__).resolve().parents[3] / "frontend"
    if (console_dir / "index.html").exists() and (console_dir / "dist").exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")

    return app


def _run_predict(model: FerModel, points: list, subject: str) -> dict:
    try:
        ls = LandmarkSet(points=np.array(points, dtype=np.float64),
                         subject_id=subject).validate()
    except MayaError as exc:
        raise _http_error(exc)
    except ValueError as exc:
        raise HTTPException(422, detail={"code": "landmark-format", "message": str(exc)})
    prediction = fer_predict(model, ls)
    return {
        "probs": [float(p) for p in prediction.probs],
        "top": prediction.top.display_name,
        "embedding": [float(v) for v in prediction.embedding],
        "latency_ms": prediction.latency_ms,
    }


def _command_fn(kind: str, command: str, payload: dict, model: Optional[FerModel],
                gallery: Optional[IdentityGallery]):
    """Translate an HTTP command into an engine call; validates the payload."""

    def run_then(method, out, *args, **kwargs):
        def fn(engine):
            getattr(engine, method)(*args, **kwargs)
            return out
        return fn

    if kind == "game":
        if command == "roll":
            return lambda engine: {"roll": engine.roll_dice()[0]}
        if command == "robot_roll":
            return lambda engine: {"roll": engine.robot_roll()[0]}
        if command == "override":
            return run_then("override_expression", {"overridden": True})
        if command == "teach_word":
            return run_then("teach_word", {"taught": True})
        if command == "resolve_expression":
            if "points" in payload:
                if model is None:
                    raise StatsError("no model loaded for landmark-based resolution")
                pts = np.array(payload["points"], dtype=np.float64)
                ls = LandmarkSet(points=pts, subject_id="console").validate()
                prediction = fer_predict(model, ls)
            elif "prediction" in payload:
                prediction = _parse_prediction(payload["prediction"])
            else:
                raise StatsError("resolve_expression needs points or prediction")
            threshold = payload.get("pass_threshold")

            def fn(engine):
                calibration = engine.state.phase == "awaiting_neutral_calibration"
                passed, _ = engine.resolve_expression(prediction, pass_threshold=threshold)
                out = {"passed": passed, "retry_count": engine.state.retry_count}
                if calibration and passed and gallery is not None \
                        and hasattr(prediction, "embedding"):
                    out["enroll_embedding"] = [float(v) for v in prediction.embedding]
                    out["enroll_name"] = engine.state.child_name
                return out

            return fn
        if command == "robot_action":
            action_kind = payload.get("kind", "")
            params = payload.get("params", {})
            return run_then("robot_action", {"ok": True}, action_kind, **params)
        if command == "finish":
            return run_then("abort", {"status": "aborted"})
        raise PhaseError(f"command {command!r} not valid for game sessions")

    if kind == "pain":
        if command == "record_pain":
            try:
                participant = str(payload["participant_id"])
                mode = str(payload["mode"])
                score = payload["score"]
            except KeyError as exc:
                raise StatsError(f"record_pain payload missing {exc}")
            if not isinstance(score, int) or isinstance(score, bool):
                raise RangeError(f"pain score must be an integer, got {score!r}")
            return run_then("record_pain", {"ok": True}, participant, mode, score)
        if command == "robot_action":
            action_kind = payload.get("kind", "")
            params = payload.get("params", {})
            return run_then("robot_action", {"ok": True}, action_kind, **params)
        if command == "finish":
            return run_then("abort", {"status": "aborted"})
        raise PhaseError(f"command {command!r} not valid for pain sessions")

    if kind == "utaut":
        if command == "utaut_answer":
            try:
                rid = str(payload["respondent_id"])
                group = str(payload["group"])
                question = payload["question"]
                answer = payload["answer"]
            except KeyError as exc:
                raise StatsError(f"utaut_answer payload missing {exc}")
            dyad = payload.get("dyad_id")

            def fn(engine):
                engine.record_answer(rid, group, question, answer, dyad)
                return {"ok": True, "missing": engine.state.missing(rid)}

            return fn
        if command == "finish":
            return run_then("abort", {"status": "aborted"})
        raise PhaseError(f"command {command!r} not valid for utaut sessions")

    raise ConfigError(f"unknown session kind {kind!r}")
