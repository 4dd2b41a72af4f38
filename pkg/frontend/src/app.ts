// Application wiring: one session per browser tab, server-authoritative
// rendering throughout.

import { ApiClient, ApiError } from "./api.js";
import { renderGallery } from "./gallery.js";
import { renderGrid } from "./grid.js";
import {
  UiState,
  applyFigures,
  applyTable,
  beginEdit,
  canExport,
  clearPending,
  extractionIsDestructive,
  hasUnsavedEdit,
  initialState,
  selectFigure,
  selectedFigure,
} from "./state.js";
import { showToast } from "./toast.js";

const api = new ApiClient("");
let state: UiState = initialState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setState(next: UiState): void {
  state = next;
  render();
}

function render(): void {
  renderGallery(el("gallery"), state.figures, state.selectedRef, api, onSelect);

  const figure = selectedFigure(state);
  const preview = el<HTMLImageElement>("preview");
  const detail = el("detail");
  detail.classList.toggle("hidden", figure === null);
  if (figure) {
    preview.src = api.imageUrl(figure);
    el("detail-title").textContent = `${figure.label} (page ${figure.page + 1})`;
    el("detail-caption").textContent = figure.caption;
  }

  renderGrid(el("grid"), state.table, {
    onDirty: (row, col, value) => {
      state = beginEdit(state, { row, col, value });
      updatePendingBadge();
    },
    onCommit: onCommitEdit,
  });

  const backendSelect = el<HTMLSelectElement>("backend-select");
  if (backendSelect.options.length !== state.backends.length) {
    backendSelect.replaceChildren(
      ...state.backends.map((name) => new Option(name, name)),
    );
    if (state.defaultBackend) backendSelect.value = state.defaultBackend;
  }

  el<HTMLButtonElement>("extract-btn").disabled = state.busy || figure === null;
  el<HTMLButtonElement>("export-btn").disabled = state.busy || !canExport(state);
  updatePendingBadge();
}

function updatePendingBadge(): void {
  el("pending").classList.toggle("hidden", !hasUnsavedEdit(state));
}

function onSelect(ref: string): void {
  setState(selectFigure(state, ref));
  void loadTable(ref);
}

async function loadTable(ref: string): Promise<void> {
  try {
    const table = await api.getTable(ref);
    setState(applyTable(state, table));
  } catch (error) {
    if (error instanceof ApiError && error.status === 404) return; // not extracted yet
    report(error);
  }
}

async function onUploadFiles(files: FileList | null): Promise<void> {
  if (!files || files.length === 0 || !state.sessionId) return;
  setState({ ...state, busy: true });
  try {
    for (const file of Array.from(files)) {
      try {
        const figures = await api.uploadPdf(state.sessionId, file, file.name);
        setState(applyFigures(state, figures));
        if (figures.length === 0) {
          showToast(`${file.name}: no captioned figures found`);
        }
      } catch (error) {
        report(error, `${file.name}: `);
      }
    }
  } finally {
    setState({ ...state, busy: false });
  }
}

async function onExtract(): Promise<void> {
  const figure = selectedFigure(state);
  if (!figure || !state.sessionId) return;
  if (extractionIsDestructive(state)) {
    const ok = window.confirm(
      "Re-extracting replaces the stored table and any edits. Continue?",
    );
    if (!ok) return;
  }
  const backend = el<HTMLSelectElement>("backend-select").value || null;
  const prompt = el<HTMLSelectElement>("prompt-select").value || "simple";
  setState({ ...state, busy: true });
  try {
    const table = await api.extract(figure.ref, backend, prompt);
    setState(applyTable({ ...state, busy: false }, table));
  } catch (error) {
    setState({ ...state, busy: false });
    report(error);
  }
}

async function onCommitEdit(row: number, col: number, value: string): Promise<void> {
  const figure = selectedFigure(state);
  if (!figure) return;
  try {
    const table = await api.patchCell(figure.ref, row, col, value);
    setState(applyTable(state, table));
  } catch (error) {
    setState(clearPending(state));
    report(error);
    // the grid may be stale (e.g. re-extraction shrank it); re-sync
    void loadTable(figure.ref);
  }
}

async function onExport(): Promise<void> {
  if (!state.sessionId) return;
  const format = el<HTMLSelectElement>("format-select").value;
  try {
    const blob = await api.exportZip(state.sessionId, format);
    const url = URL.createObjectURL(blob);
    const link = document.createElement("a");
    link.href = url;
    link.download = `figtab-${format}.zip`;
    link.click();
    URL.revokeObjectURL(url);
  } catch (error) {
    report(error);
  }
}

function report(error: unknown, prefix = ""): void {
  if (error instanceof ApiError) {
    showToast(`${prefix}${error.kind}: ${error.detail}`, "error");
  } else {
    showToast(`${prefix}${String(error)}`, "error");
    console.error(error);
  }
}

async function bootstrap(): Promise<void> {
  let sessionId = sessionStorage.getItem("figtab-session");
  if (sessionId) {
    try {
      const figures = await api.listFigures(sessionId);
      state = applyFigures({ ...state, sessionId }, figures);
    } catch {
      sessionId = null; // expired or swept; start fresh
    }
  }
  if (!sessionId) {
    sessionId = await api.createSession();
    sessionStorage.setItem("figtab-session", sessionId);
    state = { ...state, sessionId };
  }
  try {
    const info = await api.getBackends();
    state = {
      ...state,
      backends: info.backends,
      defaultBackend: info.default,
      prompts: info.prompts,
    };
  } catch (error) {
    report(error);
  }

  el<HTMLInputElement>("file-input").addEventListener("change", (event) => {
    void onUploadFiles((event.target as HTMLInputElement).files);
    (event.target as HTMLInputElement).value = "";
  });
  el("extract-btn").addEventListener("click", () => void onExtract());
  el("export-btn").addEventListener("click", () => void onExport());
  render();
}

void bootstrap();
