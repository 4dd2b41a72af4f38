// Figure gallery: one card per detected figure, cumulative over uploads.

import type { ApiClient, FigureInfo } from "./api.js";

export function renderGallery(
  root: HTMLElement,
  figures: FigureInfo[],
  selectedRef: string | null,
  api: ApiClient,
  onSelect: (ref: string) => void,
): void {
  root.replaceChildren();
  if (figures.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No figures yet. Upload a PDF to get started.";
    root.appendChild(empty);
    return;
  }
  for (const figure of figures) {
    const card = document.createElement("button");
    card.type = "button";
    card.className = "figure-card" + (figure.ref === selectedRef ? " selected" : "");
    card.dataset.ref = figure.ref;

    const thumb = document.createElement("img");
    thumb.src = api.imageUrl(figure);
    thumb.alt = figure.label;
    thumb.loading = "lazy";

    const title = document.createElement("div");
    title.className = "figure-title";
    title.textContent = figure.label + (figure.has_table ? " ✓" : "");

    const caption = document.createElement("div");
    caption.className = "figure-caption";
    caption.textContent = figure.caption;

    card.append(thumb, title, caption);
    card.addEventListener("click", () => onSelect(figure.ref));
    root.appendChild(card);
  }
}
