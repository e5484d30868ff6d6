/** Thin typed client for the authoring service.
 *
 * Every method maps to exactly one HTTP call; the client never computes
 * cascade, validation, or linearization results itself. The fetch
 * implementation is injectable so tests can run against recorded fixtures.
 */

import type {
  DiagnosticPayload,
  DocumentState,
  DocumentSummary,
  HierarchyLevelKey,
  LibraryPayload,
  LibrarySummary,
  SequencePayload,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

interface RequestOptions {
  body?: unknown;
  rawBody?: string;
  etag?: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, options: RequestOptions = {}): Promise<T> {
    const headers: Record<string, string> = {};
    let body: string | undefined;
    if (options.rawBody !== undefined) {
      headers["Content-Type"] = "application/json";
      body = options.rawBody;
    } else if (options.body !== undefined) {
      headers["Content-Type"] = "application/json";
      body = JSON.stringify(options.body);
    }
    if (options.etag !== undefined) {
      headers["If-Match"] = options.etag;
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, { method, headers, body });
    if (response.status === 204) {
      return undefined as T;
    }
    const text = await response.text();
    if (!response.ok) {
      let code = "HttpError";
      let message = text;
      try {
        const payload = JSON.parse(text);
        code = payload.code ?? code;
        message = payload.message ?? message;
      } catch {
        // non-JSON error body; keep raw text
      }
      throw new ApiError(response.status, code, message);
    }
    return JSON.parse(text) as T;
  }

  listDocuments(): Promise<{ documents: DocumentSummary[] }> {
    return this.request("GET", "/documents");
  }

  createDocument(init: { title?: string; mode?: string } = {}): Promise<DocumentState> {
    return this.request("POST", "/documents", { body: init });
  }

  /** Uploads lesson-file bytes untouched, as downloaded. */
  uploadLesson(rawLesson: string): Promise<DocumentState> {
    return this.request("POST", "/documents", { rawBody: rawLesson });
  }

  getDocument(documentId: string): Promise<DocumentState> {
    return this.request("GET", `/documents/${documentId}`);
  }

  deleteDocument(documentId: string, etag: string): Promise<void> {
    return this.request("DELETE", `/documents/${documentId}`, { etag });
  }

  setOutcomes(documentId: string, etag: string, text: string): Promise<DocumentState> {
    return this.request("PUT", `/documents/${documentId}/outcomes`, { body: { text }, etag });
  }

  generate(documentId: string, etag: string, level: HierarchyLevelKey, generator = "deterministic"): Promise<DocumentState> {
    return this.request("POST", `/documents/${documentId}/generate`, {
      body: { level, generator },
      etag,
    });
  }

  addItem(documentId: string, etag: string, level: HierarchyLevelKey, text: string, link?: string | null): Promise<DocumentState> {
    return this.request("POST", `/documents/${documentId}/items/${level}`, {
      body: link == null ? { text } : { text, link },
      etag,
    });
  }

  editItem(documentId: string, etag: string, level: HierarchyLevelKey, itemId: string, text: string): Promise<DocumentState> {
    return this.request("PATCH", `/documents/${documentId}/items/${level}/${itemId}`, {
      body: { text },
      etag,
    });
  }

  deleteItem(documentId: string, etag: string, level: HierarchyLevelKey, itemId: string): Promise<DocumentState> {
    return this.request("DELETE", `/documents/${documentId}/items/${level}/${itemId}`, { etag });
  }

  undoItem(documentId: string, etag: string, level: HierarchyLevelKey, itemId: string): Promise<DocumentState> {
    return this.request("POST", `/documents/${documentId}/items/${level}/${itemId}/undo`, { etag });
  }

  deleteLevel(documentId: string, etag: string, level: string): Promise<DocumentState> {
    return this.request("DELETE", `/documents/${documentId}/levels/${level}`, { etag });
  }

  undo(documentId: string, etag: string): Promise<DocumentState> {
    return this.request("POST", `/documents/${documentId}/undo`, { etag });
  }

  redo(documentId: string, etag: string): Promise<DocumentState> {
    return this.request("POST", `/documents/${documentId}/redo`, { etag });
  }

  addNode(documentId: string, etag: string, activityId: string, position?: { x: number; y: number }): Promise<DocumentState> {
    return this.request("POST", `/documents/${documentId}/graph/nodes`, {
      body: position ? { activityId, position } : { activityId },
      etag,
    });
  }

  patchNode(
    documentId: string,
    etag: string,
    nodeId: string,
    patch: { properties?: Partial<import("./types.js").NodePropertiesPayload>; position?: { x: number; y: number } },
  ): Promise<DocumentState> {
    return this.request("PATCH", `/documents/${documentId}/graph/nodes/${nodeId}`, {
      body: patch,
      etag,
    });
  }

  removeNode(documentId: string, etag: string, nodeId: string): Promise<DocumentState> {
    return this.request("DELETE", `/documents/${documentId}/graph/nodes/${nodeId}`, { etag });
  }

  addEdge(documentId: string, etag: string, from: string, to: string): Promise<DocumentState> {
    return this.request("POST", `/documents/${documentId}/graph/edges`, {
      body: { from, to },
      etag,
    });
  }

  removeEdge(documentId: string, etag: string, edgeId: string): Promise<DocumentState> {
    return this.request("DELETE", `/documents/${documentId}/graph/edges/${edgeId}`, { etag });
  }

  buildLessonGraph(documentId: string, etag: string): Promise<DocumentState> {
    return this.request("POST", `/documents/${documentId}/graph/lessongraph`, { etag });
  }

  clearGraph(documentId: string, etag: string): Promise<DocumentState> {
    return this.request("DELETE", `/documents/${documentId}/graph`, { etag });
  }

  setMode(documentId: string, etag: string, mode: string): Promise<DocumentState> {
    return this.request("PUT", `/documents/${documentId}/mode`, { body: { mode }, etag });
  }

  validateDocument(documentId: string): Promise<{ diagnostics: DiagnosticPayload[] }> {
    return this.request("GET", `/documents/${documentId}/validate`);
  }

  getSequence(documentId: string): Promise<SequencePayload> {
    return this.request("GET", `/documents/${documentId}/sequence`);
  }

  async downloadLesson(documentId: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/documents/${documentId}/download`);
    const text = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, "DownloadFailed", text);
    }
    return text;
  }

  listLibraries(): Promise<{ libraries: LibrarySummary[] }> {
    return this.request("GET", "/libraries");
  }

  getLibrary(libraryId: string): Promise<LibraryPayload> {
    return this.request("GET", `/libraries/${libraryId}`);
  }
}
