"""Session persistence for the review service.

One directory per session holding a JSON snapshot plus the rendered
figure PNGs. Snapshots are written to a temp file and renamed, so a
crash can never leave a half-written session behind; reloading the
snapshot reproduces the session exactly (images live beside it).
Sessions idle past the TTL are swept by gc().
"""

from __future__ import annotations

import io
import json
import os
import re
import secrets
import shutil
import tempfile
import threading
import time
import zipfile
from pathlib import Path
from typing import Callable, Optional

from ..exporters import ExportOptions, ExportRequest, FORMATS, export
from ..pdf import detect_figures
from ..tables import DataTable, Provenance, from_json_dict, to_json_dict

DEFAULT_TTL_SECONDS = 24 * 3600

_EXTENSIONS = {"csv": "csv", "tsv": "tsv", "json": "json", "latex": "tex", "r": "R", "xlsx": "xlsx"}


class UnknownSession(KeyError):
    pass


class UnknownFigure(KeyError):
    pass


class NothingToExport(ValueError):
    pass


class StorageFull(OSError):
    pass


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-") or "figure"


class SessionStore:
    def __init__(
        self,
        root: str | Path,
        ttl_seconds: float = DEFAULT_TTL_SECONDS,
        clock: Callable[[], float] = time.time,
    ) -> None:
        self.root = Path(root)
        self.ttl = ttl_seconds
        self._clock = clock
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFull(f"cannot create storage root: {exc}") from exc

    # -- locking ---------------------------------------------------------

    def lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    # -- snapshot io -------------------------------------------------------

    def _dir(self, session_id: str) -> Path:
        return self.root / session_id

    def _snapshot_path(self, session_id: str) -> Path:
        return self._dir(session_id) / "session.json"

    def load(self, session_id: str) -> dict:
        path = self._snapshot_path(session_id)
        if not path.is_file():
            raise UnknownSession(session_id)
        return json.loads(path.read_text())

    def _save(self, snapshot: dict) -> None:
        snapshot["updated"] = self._clock()
        directory = self._dir(snapshot["session_id"])
        try:
            fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                json.dump(snapshot, fh)
            os.replace(tmp, directory / "session.json")
        except OSError as exc:
            raise StorageFull(f"cannot persist session: {exc}") from exc

    # -- operations --------------------------------------------------------

    def create_session(self) -> str:
        session_id = secrets.token_urlsafe(16)  # 128 bits
        directory = self._dir(session_id)
        try:
            directory.mkdir(parents=True, exist_ok=False)
        except OSError as exc:
            raise StorageFull(f"cannot create session dir: {exc}") from exc
        snapshot = {
            "session_id": session_id,
            "created": self._clock(),
            "updated": self._clock(),
            "documents": [],
            "tables": {},
        }
        self._save(snapshot)
        return session_id

    def add_document(self, session_id: str, filename: str, pdf_bytes: bytes) -> list[dict]:
        """Run figure detection and append the document. Caller holds the lock."""
        snapshot = self.load(session_id)
        figures = detect_figures(pdf_bytes)
        doc_id = f"d{len(snapshot['documents']) + 1}"
        descriptors = []
        directory = self._dir(session_id)
        for i, figure in enumerate(figures):
            ref = f"{session_id}.{doc_id}.{i}"
            image_file = f"{doc_id}-fig{i}.png"
            figure.image.save(directory / image_file)
            descriptors.append(
                {
                    "ref": ref,
                    "label": figure.caption.label,
                    "page": figure.page_index,
                    "crop": figure.crop.as_list(),
                    "caption": figure.caption.caption_text,
                    "image_file": image_file,
                    "image_url": f"/figures/{ref}/image",
                }
            )
        snapshot["documents"].append(
            {"doc_id": doc_id, "filename": filename, "figures": descriptors}
        )
        self._save(snapshot)
        return descriptors

    def list_figures(self, session_id: str) -> list[dict]:
        snapshot = self.load(session_id)
        out = []
        for document in snapshot["documents"]:
            for descriptor in document["figures"]:
                entry = dict(descriptor)
                entry["filename"] = document["filename"]
                entry["has_table"] = descriptor["ref"] in snapshot["tables"]
                out.append(entry)
        return out

    def split_ref(self, ref: str) -> tuple[str, str, int]:
        parts = ref.split(".")
        if len(parts) != 3:
            raise UnknownFigure(ref)
        try:
            return parts[0], parts[1], int(parts[2])
        except ValueError as exc:
            raise UnknownFigure(ref) from exc

    def get_figure(self, ref: str) -> tuple[str, dict]:
        session_id, doc_id, index = self.split_ref(ref)
        try:
            snapshot = self.load(session_id)
        except UnknownSession as exc:
            raise UnknownFigure(ref) from exc
        for document in snapshot["documents"]:
            if document["doc_id"] == doc_id:
                for descriptor in document["figures"]:
                    if descriptor["ref"] == ref:
                        return session_id, descriptor
        raise UnknownFigure(ref)

    def figure_image_path(self, ref: str) -> Path:
        session_id, descriptor = self.get_figure(ref)
        return self._dir(session_id) / descriptor["image_file"]

    def set_table(self, ref: str, table: DataTable) -> None:
        session_id, _ = self.get_figure(ref)
        snapshot = self.load(session_id)
        payload = to_json_dict(table)
        payload["source_figure"] = table.source_figure
        payload["provenance"] = table.provenance.as_dict()
        snapshot["tables"][ref] = payload
        self._save(snapshot)

    def get_table(self, ref: str) -> Optional[DataTable]:
        session_id, _ = self.get_figure(ref)
        snapshot = self.load(session_id)
        payload = snapshot["tables"].get(ref)
        if payload is None:
            return None
        table = from_json_dict(payload)
        table.source_figure = payload.get("source_figure")
        prov = payload.get("provenance") or {}
        table.provenance = Provenance(
            backend=prov.get("backend"),
            prompt_kind=prov.get("prompt_kind"),
            timestamp=prov.get("timestamp"),
        )
        return table

    def export_session(self, session_id: str, fmt: str) -> bytes:
        if fmt not in FORMATS:
            raise ValueError(f"unknown export format: {fmt!r}")
        snapshot = self.load(session_id)
        if not snapshot["tables"]:
            raise NothingToExport("no extracted tables in this session")

        label_by_ref = {}
        doc_by_ref = {}
        for document in snapshot["documents"]:
            for descriptor in document["figures"]:
                label_by_ref[descriptor["ref"]] = descriptor["label"]
                doc_by_ref[descriptor["ref"]] = document["doc_id"]

        names: dict[str, list[str]] = {}
        for ref in snapshot["tables"]:
            names.setdefault(_slug(label_by_ref.get(ref, "figure")), []).append(ref)

        ext = _EXTENSIONS[fmt]
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
            for base, refs in sorted(names.items()):
                for ref in refs:
                    # same label across documents: suffix with the doc id
                    name = base if len(refs) == 1 else f"{base}-{doc_by_ref[ref]}"
                    table = self.get_table(ref)
                    assert table is not None
                    r_name = re.sub(r"[^A-Za-z0-9_]", "_", name)
                    if not r_name[:1].isalpha():
                        r_name = "fig_" + r_name
                    data = export(
                        ExportRequest(table, fmt, ExportOptions(table_name=r_name))
                    )
                    zf.writestr(f"{name}.{ext}", data)
        return buf.getvalue()

    # -- housekeeping -------------------------------------------------------

    def gc(self) -> int:
        """Delete sessions idle past the TTL. Returns how many were removed."""
        removed = 0
        now = self._clock()
        if not self.root.is_dir():
            return 0
        for entry in self.root.iterdir():
            snapshot_file = entry / "session.json"
            if not snapshot_file.is_file():
                continue
            try:
                snapshot = json.loads(snapshot_file.read_text())
                updated = float(snapshot.get("updated", 0))
            except (ValueError, OSError):
                updated = 0.0
            if now - updated > self.ttl:
                with self.lock(entry.name):
                    shutil.rmtree(entry, ignore_errors=True)
                removed += 1
        return removed
