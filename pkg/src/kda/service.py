"""HTTP surface for enrollment and verification.

One app instance owns a model store directory and an in-memory buffer
of pending enrollment samples per account. Clients post typed password
entries as event lists; after ``enroll_samples`` entries the account's
model is trained and persisted, and further /verify calls score against
it.

The API is deliberately small so a static capture page can drive it
with three fetch calls: POST /enroll, POST /verify, GET /health.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from kda.config import AppConfig
from kda.core import KeystrokeSample, validate_sample
from kda.pipeline import (
    EnrollmentError,
    ModelStore,
    UnknownAccountError,
    VerifyError,
    enroll,
    require_account_id,
    sample_from_events,
    verify,
)


class CapturedEvent(BaseModel):
    key: str | None = None  # identity is optional; only timing matters
    press_ms: int
    release_ms: int


class EntryRequest(BaseModel):
    account_id: str
    events: list[CapturedEvent]


class EnrollResponse(BaseModel):
    account_id: str
    status: str  # "collecting" | "enrolled"
    samples_so_far: int
    samples_needed: int


class VerifyResponse(BaseModel):
    account_id: str
    accepted: bool
    score: float
    threshold: float


class HealthResponse(BaseModel):
    status: str
    accounts: int


def _to_sample(req: EntryRequest, label: str, error: type[ValueError]) -> KeystrokeSample:
    if not req.events:
        raise error("at least one keystroke event required")
    sample = sample_from_events(
        [(e.press_ms, e.release_ms) for e in req.events], label=label
    )
    violations = validate_sample(sample)
    if violations:
        raise error("; ".join(violations))
    return sample


def create_app(config: AppConfig | None = None, store: ModelStore | None = None) -> FastAPI:
    config = config or AppConfig()
    store = store or ModelStore(config.model_dir)
    app = FastAPI(title="keystroke dynamics service")

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    buffers: dict[str, list[KeystrokeSample]] = {}
    lock = threading.Lock()
    app.state.store = store
    app.state.config = config

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        # field-level detail, but as a client error rather than a 422
        detail = [
            {"field": ".".join(str(p) for p in err["loc"]), "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.exception_handler(EnrollmentError)
    @app.exception_handler(VerifyError)
    async def on_domain_error(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(UnknownAccountError)
    async def on_unknown_account(request: Request, exc: UnknownAccountError) -> JSONResponse:
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", accounts=len(store.account_ids()))

    @app.post("/enroll", response_model=EnrollResponse)
    async def enroll_entry(req: EntryRequest) -> EnrollResponse:
        require_account_id(req.account_id)
        sample = _to_sample(req, label="training", error=EnrollmentError)
        with lock:
            pending = buffers.setdefault(req.account_id, [])
            if pending and pending[0].key_count != sample.key_count:
                raise EnrollmentError(
                    f"inconsistent password length: expected {pending[0].key_count} "
                    f"keys, got {sample.key_count}"
                )
            pending.append(sample)
            if len(pending) < config.enroll_samples:
                return EnrollResponse(
                    account_id=req.account_id,
                    status="collecting",
                    samples_so_far=len(pending),
                    samples_needed=config.enroll_samples,
                )
            samples = buffers.pop(req.account_id)
        enroll(req.account_id, samples, config, store)
        return EnrollResponse(
            account_id=req.account_id,
            status="enrolled",
            samples_so_far=len(samples),
            samples_needed=config.enroll_samples,
        )

    @app.post("/verify", response_model=VerifyResponse)
    async def verify_entry(req: EntryRequest) -> VerifyResponse:
        sample = _to_sample(req, label="unlabeled", error=VerifyError)
        result = verify(req.account_id, sample, config, store)
        return VerifyResponse(
            account_id=result.account_id,
            accepted=result.accepted,
            score=result.score,
            threshold=result.threshold,
        )

    if config.static_dir:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="page")

    return app
