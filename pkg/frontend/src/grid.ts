// Editable table grid. Inputs show exactly what the server parsed; a
// commit (Enter or blur after a change) PATCHes the cell and the whole
// grid re-renders from the response. Rows under the confidence
// threshold get a badge and a tint.

import type { TablePayload } from "./api.js";
import { isLowConfidence } from "./state.js";

export interface GridCallbacks {
  onCommit(row: number, col: number, value: string): void;
  onDirty(row: number, col: number, value: string): void;
}

export function renderGrid(
  root: HTMLElement,
  table: TablePayload | null,
  callbacks: GridCallbacks,
): void {
  root.replaceChildren();
  if (table === null) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No table extracted yet.";
    root.appendChild(empty);
    return;
  }

  const element = document.createElement("table");
  element.className = "data-grid";

  const head = document.createElement("thead");
  const headRow = document.createElement("tr");
  for (const name of [...table.header, "confidence"]) {
    const th = document.createElement("th");
    th.textContent = name;
    headRow.appendChild(th);
  }
  head.appendChild(headRow);
  element.appendChild(head);

  const body = document.createElement("tbody");
  table.rows.forEach((row, r) => {
    const confidence = table.confidence[r] ?? 1;
    const tr = document.createElement("tr");
    if (isLowConfidence(confidence)) tr.className = "low-confidence";
    row.forEach((raw, c) => {
      const td = document.createElement("td");
      const input = document.createElement("input");
      input.value = raw;
      input.dataset.row = String(r);
      input.dataset.col = String(c);
      input.addEventListener("input", () => {
        const dirty = input.value !== raw;
        input.classList.toggle("dirty", dirty);
        if (dirty) callbacks.onDirty(r, c, input.value);
      });
      const commit = () => {
        if (input.value !== raw) callbacks.onCommit(r, c, input.value);
      };
      input.addEventListener("change", commit);
      input.addEventListener("keydown", (event) => {
        if (event.key === "Enter") (event.target as HTMLInputElement).blur();
      });
      td.appendChild(input);
      tr.appendChild(td);
    });
    const badge = document.createElement("td");
    badge.className = "confidence-badge";
    badge.textContent = `${Math.round(confidence * 100)}%`;
    tr.appendChild(badge);
    body.appendChild(tr);
  });
  element.appendChild(body);
  root.appendChild(element);

  if (table.warnings.length > 0) {
    const note = document.createElement("p");
    note.className = "warnings";
    note.textContent = table.warnings.join("; ");
    root.appendChild(note);
  }
}
