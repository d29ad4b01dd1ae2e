"""HTTP API over the prediction pipeline: registration, login, dataset
upload, training, singular prediction, bulk evaluation, verification, and
history.

The service layer is a thin adapter: every label in a response comes from
the evaluation module, every discretization from the preprocess module,
and every durable effect from the persistence module. Errors map to status
codes uniformly: 400 domain or validation, 401 authentication, 403
ownership, 404 unknown id, 409 duplicate email, 413 oversized upload.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import Body, Depends, FastAPI, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import evaluation
from .config import AppConfig
from .dataset import Dataset, parse_csv
from .errors import (
    AuthRequired,
    BadCredentials,
    DomainViolation,
    DuplicateEmail,
    Forbidden,
    GradeGaugeError,
    NotFound,
    UploadTooLarge,
)
from .induction import TrainConfig, TrainedModel, train_c45, train_id3
from .persistence import HistoryEntry, Store
from .preprocess import (
    ProcessedStudentRecord,
    discretize_merit,
    discretize_percent,
    normalize_admission_type,
    preprocess,
    raw_student_schema,
    sniff_student_schema,
)

_STATUS_CODES = (
    (AuthRequired, 401),
    (BadCredentials, 401),
    (Forbidden, 403),
    (NotFound, 404),
    (DuplicateEmail, 409),
    (UploadTooLarge, 413),
)


def _status_for(exc: GradeGaugeError) -> int:
    for cls, code in _STATUS_CODES:
        if isinstance(exc, cls):
            return code
    return 400


def normalize_algorithm(name: str) -> str:
    """Accept ID3/C45 in assorted spellings (id3, C4.5, ...)."""
    cleaned = name.strip().upper().replace(".", "")
    if cleaned not in ("ID3", "C45"):
        raise DomainViolation(f"unknown algorithm {name!r}")
    return cleaned


def _require(body: dict, *keys: str) -> None:
    missing = [k for k in keys if body.get(k) is None]
    if missing:
        raise DomainViolation(f"missing fields: {', '.join(missing)}")


def _as_float(body: dict, key: str) -> float:
    value = body[key]
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise DomainViolation(f"{key} must be numeric")
    try:
        return float(value)
    except ValueError as exc:
        raise DomainViolation(f"{key} must be numeric, got {value!r}") from exc


def create_app(config: AppConfig = AppConfig(),
               store: Store | None = None) -> FastAPI:
    owns_store = store is None
    if store is None:
        store = Store(config.store_path)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if owns_store:
            store.close()

    app = FastAPI(title="gradegauge", lifespan=lifespan)
    app.state.store = store
    app.state.config = config

    @app.exception_handler(GradeGaugeError)
    async def domain_error(request: Request, exc: GradeGaugeError):
        return JSONResponse({"error": type(exc).__name__, "detail": str(exc)},
                            status_code=_status_for(exc))

    @app.exception_handler(RequestValidationError)
    async def body_shape_error(request: Request, exc: RequestValidationError):
        return JSONResponse({"error": "ValidationError", "detail": str(exc)},
                            status_code=400)

    def account_id(request: Request) -> str:
        header = request.headers.get("authorization", "")
        scheme, _, token = header.partition(" ")
        if scheme.lower() != "bearer" or not token:
            raise AuthRequired("expected an Authorization: Bearer token")
        return store.session_account(token.strip())

    def resolve_model(body: dict) -> tuple[str, TrainedModel]:
        if body.get("model_id"):
            ref = str(body["model_id"])
            return ref, store.load_model(ref)
        if body.get("algorithm"):
            return store.latest_model(normalize_algorithm(body["algorithm"]))
        raise DomainViolation("provide model_id or algorithm")

    def parse_stored_dataset(dataset_id: str, owner: str) -> Dataset:
        stored = store.load_dataset(dataset_id, owner)
        return parse_csv(stored.content, sniff_student_schema(stored.content))

    # ------------------------------------------------------------- routes

    @app.post("/api/register")
    def register(body: dict = Body()):
        _require(body, "name", "gender", "branch", "email", "password")
        acct = store.register(str(body["name"]), str(body["gender"]),
                              str(body["branch"]), str(body["email"]),
                              str(body["password"]))
        return {"account_id": acct}

    @app.post("/api/login")
    def login(body: dict = Body()):
        _require(body, "email", "password")
        token = store.authenticate(str(body["email"]), str(body["password"]),
                                   config.session_ttl_seconds)
        return {"token": token}

    @app.post("/api/datasets")
    def upload_dataset(request: Request, file: UploadFile,
                       owner: str = Depends(account_id)):
        declared = request.headers.get("content-length")
        # reject oversized bodies before the multipart parse sees them
        if declared and declared.isdigit() \
                and int(declared) > config.max_upload_bytes + 8192:
            raise UploadTooLarge(
                f"upload exceeds {config.max_upload_bytes} bytes")
        content = file.file.read(config.max_upload_bytes + 1)
        if len(content) > config.max_upload_bytes:
            raise UploadTooLarge(
                f"upload exceeds {config.max_upload_bytes} bytes")
        text = content.decode("utf-8", errors="replace")
        d = parse_csv(text, sniff_student_schema(text))
        dataset_id = store.save_dataset(owner, file.filename or "dataset.csv",
                                        text)
        return {"dataset_id": dataset_id, "rows": len(d)}

    @app.post("/api/models")
    def train(body: dict = Body(), owner: str = Depends(account_id)):
        _require(body, "dataset_id", "algorithm")
        algorithm = normalize_algorithm(str(body["algorithm"]))
        d = parse_stored_dataset(str(body["dataset_id"]), owner)
        dropped: list[int] = []
        if set(d.schema.names) == set(raw_student_schema().names):
            d, dropped = preprocess(d, config.thresholds)
        overrides = body.get("config") or {}
        if not isinstance(overrides, dict):
            raise DomainViolation("config must be an object")
        try:
            train_config = TrainConfig(
                overrides.get("min_leaf_size", config.train.min_leaf_size),
                overrides.get("prune", config.train.prune),
                overrides.get("confidence_factor",
                              config.train.confidence_factor))
        except (TypeError, ValueError) as exc:
            raise DomainViolation(str(exc)) from exc
        trainer = train_id3 if algorithm == "ID3" else train_c45
        model = trainer(d, list(d.schema.feature_names), train_config)
        model_id = store.save_model(model)
        return {"model_id": model_id, "algorithm": model.algorithm,
                "dropped_rows": len(dropped),
                "stats": {"training_rows": model.stats.training_rows,
                          "node_count": model.stats.node_count,
                          "leaf_count": model.stats.leaf_count}}

    @app.post("/api/predict")
    def predict(body: dict = Body(), owner: str = Depends(account_id)):
        _require(body, "name", "app_id", "gender", "percent", "merit", "type")
        percent = _as_float(body, "percent")
        merit = _as_float(body, "merit")
        model_ref, model = resolve_model(body)
        try:
            record = ProcessedStudentRecord(
                merit=discretize_merit(merit, config.thresholds),
                gender=str(body["gender"]),
                percent=discretize_percent(percent, config.thresholds),
                type=normalize_admission_type(str(body["type"])))
        except ValueError as exc:
            raise DomainViolation(str(exc)) from exc
        prediction = evaluation.predict_single(model, record,
                                               record_ref=str(body["app_id"]),
                                               model_ref=model_ref)
        entry = store.history_append(
            owner, str(body["app_id"]), str(body["name"]), str(body["gender"]),
            percent, merit, str(body["type"]).strip(), model.algorithm,
            prediction.predicted)
        return {"predicted": prediction.predicted,
                "algorithm": model.algorithm, "model_id": model_ref,
                "entry_id": entry.entry_id}

    @app.post("/api/evaluate")
    def evaluate(body: dict = Body(), owner: str = Depends(account_id)):
        _require(body, "dataset_id")
        model_ref, model = resolve_model(body)
        d = parse_stored_dataset(str(body["dataset_id"]), owner)
        predictions, wall_ms = evaluation.evaluate_bulk(
            model, d, model_ref, config.thresholds)
        return {"model_id": model_ref, "algorithm": model.algorithm,
                "wall_time_ms": wall_ms,
                "predictions": [{"ref": p.record_ref, "inputs": p.inputs,
                                 "predicted": p.predicted}
                                for p in predictions]}

    @app.post("/api/verify")
    def verify(body: dict = Body(), owner: str = Depends(account_id)):
        _require(body, "dataset_id")
        model_ref, model = resolve_model(body)
        d = parse_stored_dataset(str(body["dataset_id"]), owner)
        report = evaluation.verify(model, d, model_ref, config.thresholds)
        return {"model_id": model_ref, "algorithm": model.algorithm,
                "total": report.total, "correct": report.correct,
                "accuracy": report.accuracy_percent,
                "wall_time_ms": report.wall_time_ms,
                "mismatches": [{"ref": m.record_ref, "inputs": m.inputs,
                                "actual": m.actual, "predicted": m.predicted}
                               for m in report.mismatches]}

    def history_json(entry: HistoryEntry) -> dict:
        return {"entry_id": entry.entry_id, "app_id": entry.app_id,
                "name": entry.name, "gender": entry.gender,
                "percent": entry.percent_raw, "merit": entry.merit_raw,
                "type": entry.admission_type_raw,
                "algorithm": entry.algorithm, "predicted": entry.predicted,
                "created_at": entry.created_at}

    @app.get("/api/history")
    def history(owner: str = Depends(account_id)):
        return {"entries": [history_json(e) for e in store.history_list(owner)]}

    @app.delete("/api/history/{entry_id}")
    def history_delete(entry_id: str, owner: str = Depends(account_id)):
        store.history_delete(owner, entry_id)
        return {"deleted": entry_id}

    return app


def serve(config: AppConfig) -> None:
    """Blocking entry point used by the CLI's serve subcommand."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port,
                log_level=config.log_level)
