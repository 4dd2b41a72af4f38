// Typed client for the figtab review service. All state lives on the
// server; this module only moves JSON back and forth.

export interface FigureInfo {
  ref: string;
  label: string;
  page: number;
  crop: number[];
  caption: string;
  image_url: string;
  filename?: string;
  has_table?: boolean;
}

export interface Provenance {
  backend: string | null;
  prompt_kind: string | null;
  timestamp: string | null;
}

export interface TablePayload {
  figure: string;
  header: string[];
  rows: string[][];
  confidence: number[];
  numeric: (number | null)[][];
  provenance: Provenance;
  warnings: string[];
}

export interface BackendsInfo {
  backends: string[];
  default: string;
  prompts: string[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public kind: string,
    public detail: string,
  ) {
    super(`${kind}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function raiseForStatus(response: Response): Promise<Response> {
  if (response.ok) return response;
  let kind = `HTTP${response.status}`;
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body === "object") {
      kind = body.error ?? kind;
      detail = body.detail ?? detail;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, kind, detail);
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.url(path), init);
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  async createSession(): Promise<string> {
    const body = await this.json<{ session_id: string }>("/sessions", {
      method: "POST",
    });
    return body.session_id;
  }

  async listFigures(sessionId: string): Promise<FigureInfo[]> {
    const body = await this.json<{ figures: FigureInfo[] }>(
      `/sessions/${sessionId}/figures`,
    );
    return body.figures;
  }

  async uploadPdf(sessionId: string, file: Blob, name = "upload.pdf"): Promise<FigureInfo[]> {
    const form = new FormData();
    form.append("file", file, name);
    const body = await this.json<{ figures: FigureInfo[] }>(
      `/sessions/${sessionId}/documents`,
      { method: "POST", body: form },
    );
    return body.figures;
  }

  async getBackends(): Promise<BackendsInfo> {
    return this.json<BackendsInfo>("/backends");
  }

  async extract(ref: string, backend: string | null, prompt: string): Promise<TablePayload> {
    return this.json<TablePayload>(`/figures/${ref}/extract`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ backend, prompt }),
    });
  }

  async getTable(ref: string): Promise<TablePayload> {
    return this.json<TablePayload>(`/figures/${ref}/table`);
  }

  async patchCell(
    ref: string,
    rowIndex: number,
    colIndex: number,
    newRaw: string,
  ): Promise<TablePayload> {
    return this.json<TablePayload>(`/figures/${ref}/table`, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        row_index: rowIndex,
        col_index: colIndex,
        new_raw: newRaw,
      }),
    });
  }

  exportUrl(sessionId: string, format: string): string {
    return this.url(`/sessions/${sessionId}/export?format=${encodeURIComponent(format)}`);
  }

  async exportZip(sessionId: string, format: string): Promise<Blob> {
    const response = await this.fetchFn(this.exportUrl(sessionId, format));
    await raiseForStatus(response);
    return response.blob();
  }

  imageUrl(figure: FigureInfo): string {
    return this.url(figure.image_url);
  }
}
