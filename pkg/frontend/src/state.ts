/** View state for the editor.
 *
 * Holds exactly what the service returned plus purely visual concerns
 * (selection, collapse, modals). No document content is ever derived or
 * recomputed on the client: plan lists, diagnostics, and the runtime
 * sequence are rendered verbatim from server responses.
 */

import type {
  DiagnosticPayload,
  DocumentState,
  LibraryPayload,
  SequenceEntryPayload,
} from "./types.js";

export type ModalKind = "controls" | "definitions" | "node-details" | null;

export interface Banner {
  kind: "error" | "conflict" | "info";
  text: string;
}

export interface ViewState {
  document: DocumentState | null;
  library: LibraryPayload | null;
  diagnostics: DiagnosticPayload[];
  sequence: SequenceEntryPayload[] | null;
  sequenceWarnings: DiagnosticPayload[];
  sequenceError: string | null;
  selectedNodeId: string | null;
  selectedEdgeId: string | null;
  connectMode: boolean;
  connectSource: string | null;
  libraryOpen: boolean;
  activePhaseTab: string;
  openModal: ModalKind;
  collapsed: Record<string, boolean>;
  editingItem: { level: string; itemId: string } | null;
  previewCursor: number | null;
  banner: Banner | null;
}

export function initialViewState(): ViewState {
  return {
    document: null,
    library: null,
    diagnostics: [],
    sequence: null,
    sequenceWarnings: [],
    sequenceError: null,
    selectedNodeId: null,
    selectedEdgeId: null,
    connectMode: false,
    connectSource: null,
    libraryOpen: false,
    activePhaseTab: "introduction",
    openModal: null,
    collapsed: {},
    editingItem: null,
    previewCursor: null,
    banner: null,
  };
}

/** Drops view references to nodes/edges that no longer exist after a refresh. */
export function reconcileSelection(state: ViewState): void {
  const doc = state.document;
  if (!doc) {
    state.selectedNodeId = null;
    state.selectedEdgeId = null;
    state.connectSource = null;
    return;
  }
  const nodeIds = new Set(doc.graph.nodes.map((node) => node.nodeId));
  if (state.selectedNodeId && !nodeIds.has(state.selectedNodeId)) {
    state.selectedNodeId = null;
  }
  if (state.connectSource && !nodeIds.has(state.connectSource)) {
    state.connectSource = null;
  }
  const edgeIds = new Set(doc.graph.edges.map((edge) => edge.edgeId));
  if (state.selectedEdgeId && !edgeIds.has(state.selectedEdgeId)) {
    state.selectedEdgeId = null;
  }
}

export function phaseColor(state: ViewState, phase: string): string {
  const info = state.library?.phases.find((entry) => entry.phase === phase);
  return info ? info.color : "#9aa0a6";
}
