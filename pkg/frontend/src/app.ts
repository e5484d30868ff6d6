/** Editor application: wires every control to exactly one service call and
 * re-renders from the response. Derived views (diagnostics, runtime
 * sequence) are refreshed with read-only GETs after each mutation.
 */

import { ApiClient, ApiError } from "./api.js";
import { initialViewState, reconcileSelection, type ViewState } from "./state.js";
import { renderApp } from "./render/layout.js";
import type { DocumentState, HierarchyLevelKey } from "./types.js";

export interface DownloadSink {
  (filename: string, text: string): void;
}

function browserDownload(filename: string, text: string): void {
  const blob = new Blob([text], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export class App {
  readonly state: ViewState = initialViewState();
  lastDownloadText: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    readonly client: ApiClient,
    private readonly downloadSink: DownloadSink = browserDownload,
  ) {}

  async boot(): Promise<void> {
    const listing = await this.client.listDocuments();
    const document = listing.documents.length
      ? await this.client.getDocument(listing.documents[0].documentId)
      : await this.client.createDocument({ mode: "welding", title: "Untitled lesson" });
    await this.installDocument(document);
  }

  private async installDocument(document: DocumentState): Promise<void> {
    this.state.document = document;
    if (!this.state.library || this.state.library.libraryId !== document.mode) {
      this.state.library = await this.client.getLibrary(document.mode);
    }
    reconcileSelection(this.state);
    await this.refreshDerived();
    this.render();
  }

  /** Read-only refresh of validation badges and the preview pane. */
  private async refreshDerived(): Promise<void> {
    const doc = this.state.document;
    if (!doc) {
      return;
    }
    const validation = await this.client.validateDocument(doc.documentId);
    this.state.diagnostics = validation.diagnostics;
    try {
      const sequence = await this.client.getSequence(doc.documentId);
      this.state.sequence = sequence.entries;
      this.state.sequenceWarnings = sequence.warnings;
      this.state.sequenceError = null;
      if (this.state.previewCursor !== null
          && this.state.previewCursor >= sequence.entries.length) {
        this.state.previewCursor = null;
      }
    } catch (error) {
      if (error instanceof ApiError) {
        this.state.sequence = null;
        this.state.sequenceWarnings = [];
        this.state.sequenceError = error.code;
        this.state.previewCursor = null;
      } else {
        throw error;
      }
    }
  }

  render(): void {
    renderApp(this.root, this.state, this);
  }

  private etag(): string {
    const doc = this.state.document;
    if (!doc) {
      throw new Error("no document loaded");
    }
    return doc.etag;
  }

  private docId(): string {
    const doc = this.state.document;
    if (!doc) {
      throw new Error("no document loaded");
    }
    return doc.documentId;
  }

  /** Runs one mutation, re-rendering from its response; 412 prompts a reload. */
  async mutate(call: (documentId: string, etag: string) => Promise<DocumentState>): Promise<void> {
    try {
      const next = await call(this.docId(), this.etag());
      this.state.banner = null;
      await this.installDocument(next);
    } catch (error) {
      if (error instanceof ApiError && error.status === 412) {
        this.state.banner = {
          kind: "conflict",
          text: "This lesson changed elsewhere. Reload to continue editing.",
        };
      } else if (error instanceof ApiError) {
        this.state.banner = { kind: "error", text: `${error.code}: ${error.message}` };
      } else {
        throw error;
      }
      this.render();
    }
  }

  async reloadDocument(): Promise<void> {
    const document = await this.client.getDocument(this.docId());
    this.state.banner = null;
    await this.installDocument(document);
  }

  // ---------------------------------------------------------------- plan

  async saveOutcomes(text: string): Promise<void> {
    await this.mutate((id, etag) => this.client.setOutcomes(id, etag, text));
  }

  async generateLevel(level: HierarchyLevelKey): Promise<void> {
    await this.mutate((id, etag) => this.client.generate(id, etag, level));
  }

  async deleteLevel(level: string): Promise<void> {
    await this.mutate((id, etag) => this.client.deleteLevel(id, etag, level));
  }

  async addItem(level: HierarchyLevelKey, text: string): Promise<void> {
    if (!text.trim()) {
      return;
    }
    await this.mutate((id, etag) => this.client.addItem(id, etag, level, text));
  }

  startItemEdit(level: string, itemId: string): void {
    this.state.editingItem = { level, itemId };
    this.render();
  }

  cancelItemEdit(): void {
    this.state.editingItem = null;
    this.render();
  }

  async saveItemEdit(level: HierarchyLevelKey, itemId: string, text: string): Promise<void> {
    this.state.editingItem = null;
    await this.mutate((id, etag) => this.client.editItem(id, etag, level, itemId, text));
  }

  async undoItem(level: HierarchyLevelKey, itemId: string): Promise<void> {
    await this.mutate((id, etag) => this.client.undoItem(id, etag, level, itemId));
  }

  async deleteItem(level: HierarchyLevelKey, itemId: string): Promise<void> {
    await this.mutate((id, etag) => this.client.deleteItem(id, etag, level, itemId));
  }

  async addActivityEntry(activityId: string): Promise<void> {
    await this.mutate((id, etag) => this.client.addItem(id, etag, "activities", activityId));
  }

  async removeActivityEntry(instanceId: string): Promise<void> {
    await this.mutate((id, etag) => this.client.deleteItem(id, etag, "activities", instanceId));
  }

  async undoDocument(): Promise<void> {
    await this.mutate((id, etag) => this.client.undo(id, etag));
  }

  async redoDocument(): Promise<void> {
    await this.mutate((id, etag) => this.client.redo(id, etag));
  }

  async generateLessonGraph(): Promise<void> {
    await this.mutate((id, etag) => this.client.buildLessonGraph(id, etag));
  }

  async switchMode(mode: string): Promise<void> {
    await this.mutate((id, etag) => this.client.setMode(id, etag, mode));
  }

  // ---------------------------------------------------------------- graph

  toggleLibrary(): void {
    this.state.libraryOpen = !this.state.libraryOpen;
    this.render();
  }

  setPhaseTab(phase: string): void {
    this.state.activePhaseTab = phase;
    this.render();
  }

  async placeActivity(activityId: string): Promise<void> {
    const count = this.state.document?.graph.nodes.length ?? 0;
    const position = {
      x: 60 + (count % 5) * 230,
      y: 60 + Math.floor(count / 5) * 170,
    };
    await this.mutate((id, etag) => this.client.addNode(id, etag, activityId, position));
  }

  toggleConnectMode(): void {
    this.state.connectMode = !this.state.connectMode;
    this.state.connectSource = null;
    this.render();
  }

  /** Click-source-then-click-target edge drawing; plain click selects. */
  async nodeClicked(nodeId: string): Promise<void> {
    if (this.state.connectMode) {
      if (this.state.connectSource === null) {
        this.state.connectSource = nodeId;
        this.render();
        return;
      }
      const source = this.state.connectSource;
      this.state.connectSource = null;
      this.state.connectMode = false;
      await this.mutate((id, etag) => this.client.addEdge(id, etag, source, nodeId));
      return;
    }
    this.state.selectedNodeId = nodeId;
    this.state.selectedEdgeId = null;
    this.render();
  }

  edgeClicked(edgeId: string): void {
    this.state.selectedEdgeId = edgeId;
    this.state.selectedNodeId = null;
    this.render();
  }

  async removeSelectedNode(): Promise<void> {
    const nodeId = this.state.selectedNodeId;
    if (!nodeId) {
      return;
    }
    await this.mutate((id, etag) => this.client.removeNode(id, etag, nodeId));
  }

  async removeSelectedEdge(): Promise<void> {
    const edgeId = this.state.selectedEdgeId;
    if (!edgeId) {
      return;
    }
    await this.mutate((id, etag) => this.client.removeEdge(id, etag, edgeId));
  }

  async moveNode(nodeId: string, x: number, y: number): Promise<void> {
    await this.mutate((id, etag) => this.client.patchNode(id, etag, nodeId, { position: { x, y } }));
  }

  openNodeDetails(): void {
    if (this.state.selectedNodeId) {
      this.state.openModal = "node-details";
      this.render();
    }
  }

  async applyNodeProperties(patch: {
    timingSeconds?: number;
    message?: string;
    hintAudio?: boolean;
    hintVisual?: boolean;
  }): Promise<void> {
    const nodeId = this.state.selectedNodeId;
    if (!nodeId) {
      return;
    }
    this.state.openModal = null;
    await this.mutate((id, etag) => this.client.patchNode(id, etag, nodeId, { properties: patch }));
  }

  openModal(kind: "controls" | "definitions"): void {
    this.state.openModal = kind;
    this.render();
  }

  closeModal(): void {
    this.state.openModal = null;
    this.render();
  }

  toggleSection(key: string, open: boolean): void {
    this.state.collapsed[key] = !open;
  }

  // ---------------------------------------------------------------- files

  async saveLesson(): Promise<void> {
    // The service persists every accepted mutation; Save re-reads the
    // authoritative state and confirms it.
    await this.reloadDocument();
    this.state.banner = { kind: "info", text: "Lesson saved on the server." };
    this.render();
  }

  async downloadLesson(): Promise<void> {
    const text = await this.client.downloadLesson(this.docId());
    this.lastDownloadText = text;
    this.downloadSink(`${this.docId()}.lesson.json`, text);
  }

  async uploadLesson(rawLesson: string): Promise<void> {
    try {
      const document = await this.client.uploadLesson(rawLesson);
      this.state.banner = null;
      await this.installDocument(document);
    } catch (error) {
      if (error instanceof ApiError) {
        this.state.banner = { kind: "error", text: `${error.code}: ${error.message}` };
        this.render();
      } else {
        throw error;
      }
    }
  }

  async clearLesson(): Promise<void> {
    await this.mutate((id, etag) => this.client.clearGraph(id, etag));
  }

  // ---------------------------------------------------------------- preview

  previewJump(index: number): void {
    this.state.previewCursor = index;
    this.render();
  }
}

/** Selecting a node and pressing "Y" opens the node-details dialog. */
export function attachKeyBindings(app: App, target: Document): void {
  target.addEventListener("keydown", (event: KeyboardEvent) => {
    if ((event.key === "y" || event.key === "Y") && app.state.selectedNodeId) {
      app.openNodeDetails();
    }
  });
}

export async function bootApp(root: HTMLElement, baseUrl: string): Promise<App> {
  const app = new App(root, new ApiClient(baseUrl));
  await app.boot();
  attachKeyBindings(app, root.ownerDocument);
  return app;
}
