"""HTTP+JSON boundary (versioned under /v1).

Auth is workspace-invite: users are provisioned out of band, then exchange
their user id for an opaque session token.  Every write funnels through the
workspace's single-writer append; reads recompute from state.  Errors are
always ``{"code": ..., "message": ...}``.
"""

from __future__ import annotations

import secrets
import time
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from fastapi import Depends, FastAPI, Header, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import analytics, exports, model
from .engine import Thresholds
from .errors import CredenceError, UnknownEntityError, ValidationError
from .events import format_utc
from .model import Role, VoteDirection
from .workspace import HypothesisAggregate, Workspace

DEFAULT_SESSION_TTL = timedelta(hours=24)
DEFAULT_WRITE_LIMIT = 10
DEFAULT_WRITE_WINDOW_SECONDS = 10.0

_STATUS_BY_CODE = {
    "invalid-session": 401,
    "forbidden": 403,
    "rate-limited": 429,
}


class ApiError(CredenceError):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message, code=code)
        self.status = status


def _status_for(error: CredenceError) -> int:
    if isinstance(error, ApiError):
        return error.status
    if isinstance(error, UnknownEntityError) or error.code.startswith("unknown-"):
        return 404
    return _STATUS_BY_CODE.get(error.code, 422)


@dataclass
class Session:
    token: str
    user_id: str
    issued_at: datetime
    expires_at: datetime


@dataclass
class ModerationAudit:
    at: str
    moderator: str
    action: str
    subject: str


@dataclass
class ApiService:
    """Mutable service state living alongside the workspace."""

    workspace: Workspace
    session_ttl: timedelta = DEFAULT_SESSION_TTL
    write_limit: int = DEFAULT_WRITE_LIMIT
    write_window_seconds: float = DEFAULT_WRITE_WINDOW_SECONDS
    detector_params: analytics.DetectorParams = field(default_factory=analytics.DetectorParams)
    sessions: dict[str, Session] = field(default_factory=dict)
    dismissed_flags: set[str] = field(default_factory=set)
    audit_log: list[ModerationAudit] = field(default_factory=list)
    saved_thresholds: dict[str, Thresholds] = field(default_factory=dict)
    _write_times: dict[str, deque] = field(default_factory=dict)

    def open_session(self, user_id: str) -> Session:
        if user_id not in self.workspace.state.users:
            raise ApiError(404, "unknown-user", f"unknown user: {user_id}")
        now = model.utc_now()
        session = Session(
            token=secrets.token_hex(16),
            user_id=user_id,
            issued_at=now,
            expires_at=now + self.session_ttl,
        )
        self.sessions[session.token] = session
        return session

    def authenticate(self, token: str | None):
        if not token:
            raise ApiError(401, "invalid-session", "missing bearer token")
        session = self.sessions.get(token)
        if session is None or model.utc_now() >= session.expires_at:
            raise ApiError(401, "invalid-session", "session missing or expired")
        user = self.workspace.state.users.get(session.user_id)
        if user is None:
            raise ApiError(401, "invalid-session", "session user no longer exists")
        return session, user

    def check_write_rate(self, user_id: str) -> None:
        now = time.monotonic()
        times = self._write_times.setdefault(user_id, deque())
        while times and now - times[0] > self.write_window_seconds:
            times.popleft()
        if len(times) >= self.write_limit:
            raise ApiError(
                429,
                "rate-limited",
                f"more than {self.write_limit} writes in {self.write_window_seconds:.0f}s",
            )
        times.append(now)

    def thresholds_for(self, user_id: str) -> Thresholds:
        return self.saved_thresholds.get(user_id, Thresholds())


class SessionBody(BaseModel):
    user_id: str


class HypothesisBody(BaseModel):
    title: str
    description: str = ""
    tag: str


class VoteBody(BaseModel):
    direction: str


class EvidenceBody(BaseModel):
    url: str
    argument_text: str
    argument_kind: str
    polarity: str
    tier: int


class RatingBody(BaseModel):
    tier: int


class ThresholdsBody(BaseModel):
    theta_belief: float
    theta_evidence: float


def _parse_thresholds(theta_b: float, theta_e: float) -> Thresholds:
    try:
        return Thresholds(theta_belief=theta_b, theta_evidence=theta_e)
    except ValidationError as exc:
        raise ApiError(422, "threshold-out-of-range", str(exc)) from exc


def _direction(value: str) -> VoteDirection:
    try:
        return VoteDirection(value)
    except ValueError:
        raise ApiError(422, "bad-direction", f"direction must be 'up' or 'down', got {value!r}")


def _hypothesis_json(
    service: ApiService, agg: HypothesisAggregate, thresholds: Thresholds, viewer_id: str | None
) -> dict:
    ws = service.workspace
    h = agg.hypothesis
    viewer_vote = None
    if viewer_id is not None:
        vote = ws.state.votes.get((h.hypothesis_id, viewer_id))
        viewer_vote = vote.direction.value if vote else None
    n_refuting = sum(1 for e in ws.state.hypothesis_evidence(h.hypothesis_id) if e.polarity.value == "refutes")
    return {
        "hypothesis_id": h.hypothesis_id,
        "title": h.title,
        "description": h.description,
        "tag": h.tag,
        "author_display": exports._author_display(ws.state, h.author, redact=False),
        "added_on": format_utc(h.added_on),
        "up_votes": agg.up_votes,
        "down_votes": agg.down_votes,
        "dob": agg.dob.to_dict(),
        "woe": agg.woe.to_dict(),
        "horse": ws.horse_color(agg, thresholds.theta_evidence).value,
        "n_refuting": n_refuting,
        "viewer_vote": viewer_vote,
    }


def create_app(service: ApiService) -> FastAPI:
    app = FastAPI(title="credence", version="1")
    ws = service.workspace

    @app.exception_handler(CredenceError)
    async def _credence_error(_request: Request, exc: CredenceError):
        return JSONResponse(status_code=_status_for(exc), content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422, content={"code": "validation-failure", "message": str(exc.errors())})

    def bearer(authorization: str | None = Header(default=None)) -> str | None:
        if authorization and authorization.lower().startswith("bearer "):
            return authorization[7:]
        return authorization

    def authed(token: str | None = Depends(bearer)):
        return service.authenticate(token)

    def require_role(user, *roles: Role):
        if user.role not in roles:
            raise ApiError(403, "forbidden", f"requires role in {[r.value for r in roles]}")

    @app.post("/v1/sessions")
    def open_session(body: SessionBody):
        session = service.open_session(body.user_id)
        return {
            "token": session.token,
            "user_id": session.user_id,
            "expires_at": format_utc(session.expires_at),
        }

    @app.get("/v1/hypotheses")
    def list_hypotheses(
        auth=Depends(authed),
        q: str | None = Query(default=None),
        sort: str = Query(default="recency"),
        descending: bool = Query(default=True),
    ):
        session, user = auth
        thresholds = service.thresholds_for(session.user_id)
        entries = ws.dashboard(thresholds, q, sort, descending)
        return {
            "hypotheses": [
                _hypothesis_json(service, agg, thresholds, session.user_id) for agg, _horse, _quad in entries
            ]
        }

    @app.post("/v1/hypotheses", status_code=201)
    def create_hypothesis(body: HypothesisBody, auth=Depends(authed)):
        session, _user = auth
        service.check_write_rate(session.user_id)
        hypothesis, report = ws.create_hypothesis(body.title, body.description, body.tag, session.user_id)
        agg = ws.aggregate(hypothesis.hypothesis_id)
        thresholds = service.thresholds_for(session.user_id)
        return {
            "hypothesis": _hypothesis_json(service, agg, thresholds, session.user_id),
            "lint": report.to_dict(),
        }

    @app.post("/v1/hypotheses/{hypothesis_id}/votes")
    def cast_vote(hypothesis_id: str, body: VoteBody, auth=Depends(authed)):
        session, _user = auth
        direction = _direction(body.direction)
        service.check_write_rate(session.user_id)
        ws.cast_vote(hypothesis_id, session.user_id, direction)
        agg = ws.aggregate(hypothesis_id)
        thresholds = service.thresholds_for(session.user_id)
        return {
            "dob": agg.dob.to_dict(),
            "horse": ws.horse_color(agg, thresholds.theta_evidence).value,
            "up_votes": agg.up_votes,
            "down_votes": agg.down_votes,
        }

    @app.delete("/v1/hypotheses/{hypothesis_id}/votes")
    def retract_vote(hypothesis_id: str, auth=Depends(authed)):
        session, _user = auth
        service.check_write_rate(session.user_id)
        removed = ws.retract_vote(hypothesis_id, session.user_id)
        agg = ws.aggregate(hypothesis_id)
        return {"retracted": removed, "up_votes": agg.up_votes, "down_votes": agg.down_votes}

    @app.post("/v1/hypotheses/{hypothesis_id}/evidence", status_code=201)
    def add_evidence(hypothesis_id: str, body: EvidenceBody, auth=Depends(authed)):
        session, _user = auth
        service.check_write_rate(session.user_id)
        item, rating = ws.add_evidence(
            hypothesis_id=hypothesis_id,
            url=body.url,
            argument_text=body.argument_text,
            argument_kind=body.argument_kind,
            polarity=body.polarity,
            initial_tier=body.tier,
            author=session.user_id,
        )
        agg = ws.aggregate(hypothesis_id)
        return {
            "evidence_id": item.evidence_id,
            "polarity": item.polarity.value,
            "initial_rating": rating.numeric_value,
            "woe": agg.woe.to_dict(),
        }

    @app.post("/v1/evidence/{evidence_id}/ratings")
    def rate_evidence(evidence_id: str, body: RatingBody, auth=Depends(authed)):
        session, _user = auth
        service.check_write_rate(session.user_id)
        rating = ws.rate_evidence(evidence_id, session.user_id, body.tier)
        item = ws.state.evidence[evidence_id]
        agg = ws.aggregate(item.hypothesis_id)
        return {
            "evidence_id": evidence_id,
            "numeric_value": rating.numeric_value,
            "woe": agg.woe.to_dict(),
        }

    @app.get("/v1/hypotheses/{hypothesis_id}/timeline")
    def timeline(hypothesis_id: str, auth=Depends(authed)):
        points = ws.timeline(hypothesis_id)
        return {
            "points": [
                {"seq": p.seq, "at": format_utc(p.at), "dob": p.dob.to_dict(), "woe": p.woe.to_dict()}
                for p in points
            ]
        }

    @app.get("/v1/dashboard")
    def dashboard(
        auth=Depends(authed),
        theta_b: float = Query(default=0.7),
        theta_e: float = Query(default=5.0),
        sort: str = Query(default="recency"),
        q: str | None = Query(default=None),
    ):
        session, _user = auth
        thresholds = _parse_thresholds(theta_b, theta_e)
        entries = ws.dashboard(thresholds, q, sort)
        return {
            "thresholds": {"theta_belief": thresholds.theta_belief, "theta_evidence": thresholds.theta_evidence},
            "entries": [
                {
                    "hypothesis": _hypothesis_json(service, agg, thresholds, session.user_id),
                    "dob": agg.dob.to_dict(),
                    "woe": agg.woe.to_dict(),
                    "horse": horse.value,
                    "quadrant": quadrant.value,
                }
                for agg, horse, quadrant in entries
            ],
        }

    @app.get("/v1/thresholds")
    def get_thresholds(auth=Depends(authed)):
        session, _user = auth
        t = service.thresholds_for(session.user_id)
        return {"theta_belief": t.theta_belief, "theta_evidence": t.theta_evidence}

    @app.put("/v1/thresholds")
    def put_thresholds(body: ThresholdsBody, auth=Depends(authed)):
        session, user = auth
        require_role(user, Role.DECISION_MAKER)
        t = _parse_thresholds(body.theta_belief, body.theta_evidence)
        service.saved_thresholds[session.user_id] = t
        return {"theta_belief": t.theta_belief, "theta_evidence": t.theta_evidence}

    @app.get("/v1/export.csv")
    def export_csv(auth=Depends(authed), redact: bool = Query(default=False)):
        _session, user = auth
        require_role(user, Role.DECISION_MAKER, Role.MODERATOR)
        data = exports.export_csv(ws, redact_authors=redact)
        return Response(content=data, media_type="text/csv")

    @app.get("/v1/export.json")
    def export_json(auth=Depends(authed), redact: bool = Query(default=False)):
        _session, user = auth
        require_role(user, Role.DECISION_MAKER, Role.MODERATOR)
        flags = analytics.scan(ws.log.events(), service.detector_params)
        data = exports.export_json(ws, redact_authors=redact, flags=flags)
        return Response(content=data, media_type="application/json")

    @app.get("/v1/users/{user_id}/data")
    def user_data(user_id: str, auth=Depends(authed)):
        session, user = auth
        if session.user_id != user_id and user.role is not Role.MODERATOR:
            raise ApiError(403, "forbidden", "only the user or a moderator may export user data")
        return exports.export_user_data(ws, user_id)

    @app.delete("/v1/users/{user_id}")
    def erase_user(user_id: str, auth=Depends(authed)):
        session, user = auth
        if session.user_id != user_id and user.role is not Role.MODERATOR:
            raise ApiError(403, "forbidden", "only the user or a moderator may erase a user")
        summary = ws.erase_user(user_id, actor=session.user_id)
        if user.role is Role.MODERATOR and session.user_id != user_id:
            service.audit_log.append(
                ModerationAudit(
                    at=format_utc(model.utc_now()),
                    moderator=session.user_id,
                    action="remove_user",
                    subject=user_id,
                )
            )
        return {
            "user_id": summary.user_id,
            "erased": summary.erased,
            "already_erased": summary.already_erased,
            "votes_removed": summary.votes_removed,
            "ratings_removed": summary.ratings_removed,
        }

    @app.get("/v1/moderation/flags")
    def list_flags(auth=Depends(authed)):
        _session, user = auth
        require_role(user, Role.MODERATOR)
        flags = analytics.scan(ws.log.events(), service.detector_params)
        return {
            "flags": [
                {**exports.flag_to_dict(f), "flag_id": f.flag_id, "dismissed": f.flag_id in service.dismissed_flags}
                for f in flags
            ]
        }

    @app.post("/v1/moderation/flags/{flag_id}/dismiss")
    def dismiss_flag(flag_id: str, auth=Depends(authed)):
        session, user = auth
        require_role(user, Role.MODERATOR)
        flags = {f.flag_id for f in analytics.scan(ws.log.events(), service.detector_params)}
        if flag_id not in flags:
            raise ApiError(404, "unknown-flag", f"unknown flag: {flag_id}")
        service.dismissed_flags.add(flag_id)
        service.audit_log.append(
            ModerationAudit(
                at=format_utc(model.utc_now()),
                moderator=session.user_id,
                action="dismiss_flag",
                subject=flag_id,
            )
        )
        return {"flag_id": flag_id, "dismissed": True}

    return app


def build_app(workspace: Workspace, **kwargs) -> FastAPI:
    return create_app(ApiService(workspace=workspace, **kwargs))
