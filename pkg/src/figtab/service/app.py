"""HTTP API for the review workflow.

Endpoints mirror what the browser UI needs: create a session, upload
PDFs, browse detected figures, extract tables, edit cells, export. API
keys stay server-side; the UI only ever names a configured backend.
Errors come back as ``{"error": <kind>, "detail": <message>}``.
"""

from __future__ import annotations

import datetime
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..pdf import EncryptedPdf, MalformedPdf
from ..tables import (
    CellEdit,
    DataTable,
    EmptyTable,
    IndexOutOfBounds,
    Provenance,
    apply_edit,
    numeric_matrix,
    parse_reply,
    to_json_dict,
)
from ..vlm import (
    AuthError,
    BackendConfig,
    PromptProfile,
    ProviderError,
    RateLimited,
    Timeout,
    VlmClient,
)
from .store import (
    NothingToExport,
    SessionStore,
    StorageFull,
    UnknownFigure,
    UnknownSession,
)

GC_INTERVAL_SECONDS = 3600.0


class EditBody(BaseModel):
    row_index: int
    col_index: int
    new_raw: str


class ExtractBody(BaseModel):
    backend: Optional[str] = None
    prompt: str = "simple"


def _error(status: int, kind: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": kind, "detail": detail})


def _table_payload(ref: str, table: DataTable) -> dict:
    payload = to_json_dict(table)
    payload["figure"] = ref
    payload["numeric"] = numeric_matrix(table)
    payload["provenance"] = table.provenance.as_dict()
    payload["warnings"] = list(table.warnings)
    return payload


def create_app(
    store: SessionStore,
    backends: dict[str, BackendConfig],
    default_backend: str,
    ui_dir: Optional[str | Path] = None,
    start_gc_thread: bool = False,
) -> FastAPI:
    app = FastAPI(title="figtab service")

    store.gc()
    if start_gc_thread:
        stop = threading.Event()

        def sweeper() -> None:
            while not stop.wait(GC_INTERVAL_SECONDS):
                store.gc()

        threading.Thread(target=sweeper, daemon=True, name="session-gc").start()
        app.state.gc_stop = stop

    app.state.store = store
    app.state.backends = backends
    app.state.default_backend = default_backend

    @app.exception_handler(UnknownSession)
    async def _unknown_session(request: Request, exc: UnknownSession):
        return _error(404, "UnknownSession", str(exc))

    @app.exception_handler(UnknownFigure)
    async def _unknown_figure(request: Request, exc: UnknownFigure):
        return _error(404, "UnknownFigure", str(exc))

    @app.exception_handler(NothingToExport)
    async def _nothing(request: Request, exc: NothingToExport):
        return _error(409, "NothingToExport", str(exc))

    @app.exception_handler(StorageFull)
    async def _storage(request: Request, exc: StorageFull):
        return _error(507, "StorageFull", str(exc))

    @app.post("/sessions", status_code=201)
    def create_session():
        return {"session_id": store.create_session()}

    @app.get("/sessions/{session_id}/figures")
    def list_figures(session_id: str):
        return {"figures": store.list_figures(session_id)}

    @app.post("/sessions/{session_id}/documents")
    async def upload_document(session_id: str, request: Request):
        store.load(session_id)  # 404 before reading the body
        filename = "upload.pdf"
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/"):
            form = await request.form()
            upload = form.get("file") or next(iter(form.values()), None)
            if upload is None or isinstance(upload, str):
                return _error(400, "MalformedPdf", "multipart body carries no file")
            pdf_bytes = await upload.read()
            filename = upload.filename or filename
        else:
            pdf_bytes = await request.body()
        try:
            with store.lock(session_id):
                descriptors = store.add_document(session_id, filename, pdf_bytes)
        except EncryptedPdf as exc:
            return _error(400, "EncryptedPdf", str(exc))
        except MalformedPdf as exc:
            return _error(400, "MalformedPdf", str(exc))
        return {"figures": descriptors}

    @app.get("/figures/{ref}/image")
    def figure_image(ref: str):
        path = store.figure_image_path(ref)
        return FileResponse(path, media_type="image/png")

    @app.post("/figures/{ref}/extract")
    def extract_figure(ref: str, body: ExtractBody):
        _, descriptor = store.get_figure(ref)
        name = body.backend or default_backend
        backend = backends.get(name)
        if backend is None:
            return _error(400, "UnknownBackend", f"no backend named {name!r}")
        try:
            profile = PromptProfile.named(body.prompt)
        except ValueError as exc:
            return _error(400, "UnknownPrompt", str(exc))

        png = store.figure_image_path(ref).read_bytes()
        client = VlmClient(backend)
        try:
            extraction = client.extract(png, profile)  # outside the session lock
        except AuthError as exc:
            return _error(502, "AuthError", str(exc))
        except RateLimited as exc:
            return _error(503, "RateLimited", str(exc))
        except Timeout as exc:
            return _error(504, "Timeout", str(exc))
        except ProviderError as exc:
            return _error(502, "ProviderError", str(exc))
        try:
            table = parse_reply(extraction.response_text)
        except EmptyTable as exc:
            return _error(422, "EmptyTable", str(exc))
        table.source_figure = descriptor["label"]
        table.provenance = Provenance(
            backend=name,
            prompt_kind=profile.kind,
            timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        )
        session_id, _, _ = store.split_ref(ref)
        with store.lock(session_id):
            store.set_table(ref, table)
        return _table_payload(ref, table)

    @app.get("/figures/{ref}/table")
    def get_table(ref: str):
        table = store.get_table(ref)
        if table is None:
            return _error(404, "NoTable", f"figure {ref!r} has no extracted table")
        return _table_payload(ref, table)

    @app.patch("/figures/{ref}/table")
    def patch_table(ref: str, body: EditBody):
        session_id, _, _ = store.split_ref(ref)
        with store.lock(session_id):
            table = store.get_table(ref)
            if table is None:
                return _error(404, "NoTable", f"figure {ref!r} has no extracted table")
            try:
                edited = apply_edit(
                    table, CellEdit(body.row_index, body.col_index, body.new_raw)
                )
            except IndexOutOfBounds as exc:
                return _error(422, "IndexOutOfBounds", str(exc))
            store.set_table(ref, edited)
        return _table_payload(ref, edited)

    @app.get("/sessions/{session_id}/export")
    def export_session(session_id: str, format: str = "csv"):
        try:
            data = store.export_session(session_id, format)
        except ValueError as exc:
            if isinstance(exc, NothingToExport):
                raise
            return _error(400, "UnknownFormat", str(exc))
        return Response(
            content=data,
            media_type="application/zip",
            headers={
                "Content-Disposition": f'attachment; filename="session-{format}.zip"'
            },
        )

    @app.get("/backends")
    def list_backends():
        return {
            "backends": sorted(backends),
            "default": default_backend,
            "prompts": ["simple", "detailed"],
        }

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
