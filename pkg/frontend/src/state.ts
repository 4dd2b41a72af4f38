// UI state and the pure transitions the views render from.
//
// The grid is server-authoritative: the only way table data enters the
// state is applyTable() with a payload the service returned. Edits are
// sent as PATCHes and the grid re-renders from the response, so what
// the user sees is always what the server parsed.

import type { FigureInfo, TablePayload } from "./api.js";

export const LOW_CONFIDENCE_THRESHOLD = 0.7;

export interface PendingEdit {
  row: number;
  col: number;
  value: string;
}

export interface UiState {
  sessionId: string | null;
  figures: FigureInfo[];
  selectedRef: string | null;
  table: TablePayload | null;
  pendingEdit: PendingEdit | null;
  busy: boolean;
  backends: string[];
  defaultBackend: string | null;
  prompts: string[];
  chosenBackend: string | null;
  chosenPrompt: string;
}

export function initialState(): UiState {
  return {
    sessionId: null,
    figures: [],
    selectedRef: null,
    table: null,
    pendingEdit: null,
    busy: false,
    backends: [],
    defaultBackend: null,
    prompts: ["simple", "detailed"],
    chosenBackend: null,
    chosenPrompt: "simple",
  };
}

/** Merge newly reported figures into the gallery (cumulative across uploads). */
export function applyFigures(state: UiState, figures: FigureInfo[]): UiState {
  const known = new Map(state.figures.map((f) => [f.ref, f]));
  for (const figure of figures) {
    known.set(figure.ref, { ...known.get(figure.ref), ...figure });
  }
  return { ...state, figures: [...known.values()] };
}

export function selectFigure(state: UiState, ref: string | null): UiState {
  if (ref === state.selectedRef) return state;
  return { ...state, selectedRef: ref, table: null, pendingEdit: null };
}

/** Install a table exactly as the server returned it. */
export function applyTable(state: UiState, table: TablePayload): UiState {
  const figures = state.figures.map((f) =>
    f.ref === table.figure ? { ...f, has_table: true } : f,
  );
  if (state.selectedRef !== null && table.figure !== state.selectedRef) {
    // stale response for a figure the user has already left
    return { ...state, figures };
  }
  return { ...state, figures, table, pendingEdit: null };
}

export function beginEdit(state: UiState, edit: PendingEdit): UiState {
  return { ...state, pendingEdit: edit };
}

export function clearPending(state: UiState): UiState {
  return state.pendingEdit === null ? state : { ...state, pendingEdit: null };
}

export function hasUnsavedEdit(state: UiState): boolean {
  return state.pendingEdit !== null;
}

export function isLowConfidence(value: number): boolean {
  return value < LOW_CONFIDENCE_THRESHOLD;
}

export function canExport(state: UiState): boolean {
  return state.figures.some((f) => f.has_table) || state.table !== null;
}

/** True when extraction would overwrite an existing table (confirm first). */
export function extractionIsDestructive(state: UiState): boolean {
  if (state.table !== null) return true;
  const selected = state.figures.find((f) => f.ref === state.selectedRef);
  return Boolean(selected?.has_table);
}

export function selectedFigure(state: UiState): FigureInfo | null {
  return state.figures.find((f) => f.ref === state.selectedRef) ?? null;
}
