/** Wire types mirroring the authoring service's canonical JSON payloads. */

export interface ItemPayload {
  id: string;
  link: string | null;
  provenance: string;
  revision: number;
  text: string;
}

export interface ActivityRefPayload {
  activityId: string;
  instanceId: string;
}

export interface PlanPayload {
  activitySequence: ActivityRefPayload[];
  criteria: ItemPayload[];
  documentRevision: number;
  idCounter: number;
  mode: string;
  objectives: ItemPayload[];
  outcomes: string;
  skills: ItemPayload[];
  staleLevels: string[];
}

export interface NodePropertiesPayload {
  hintAudio: boolean;
  hintVisual: boolean;
  message: string;
  timingSeconds: number;
}

export interface NodePayload {
  activityId: string;
  label: string;
  nodeId: string;
  phase: string;
  position: { x: number; y: number };
  properties: NodePropertiesPayload;
}

export interface EdgePayload {
  edgeId: string;
  from: string;
  insertionIndex: number;
  to: string;
}

export interface GraphPayload {
  edgeCounter: number;
  edgeIndexCounter: number;
  edges: EdgePayload[];
  nodeCounter: number;
  nodes: NodePayload[];
}

export interface DocumentState {
  documentId: string;
  etag: string;
  lastModified: string;
  mode: string;
  title: string;
  canUndo: boolean;
  canRedo: boolean;
  plan: PlanPayload;
  graph: GraphPayload;
  node?: NodePayload;
  edge?: EdgePayload;
}

export interface DocumentSummary {
  documentId: string;
  etag: string;
  lastModified: string;
  mode: string;
  title: string;
}

export interface DiagnosticPayload {
  category: string;
  locus: string[];
  message: string;
  severity: string;
}

export interface SequenceEntryPayload {
  activityId: string;
  hintAudio: boolean;
  hintVisual: boolean;
  label: string;
  message: string;
  nodeId: string;
  timingSeconds: number;
}

export interface SequencePayload {
  entries: SequenceEntryPayload[];
  warnings: DiagnosticPayload[];
}

export interface DescriptorPayload {
  activityId: string;
  defaultProperties: NodePropertiesPayload;
  description: string;
  editableProperties: string[];
  keywords: string[];
  name: string;
  phase: string;
}

export interface PhaseInfo {
  color: string;
  phase: string;
}

export interface LibraryPayload {
  descriptors: DescriptorPayload[];
  libraryId: string;
  schemaVersion: number;
  version: string;
  phases: PhaseInfo[];
}

export interface LibrarySummary {
  descriptorCount: number;
  libraryId: string;
  version: string;
}

export type HierarchyLevelKey = "objectives" | "skills" | "assessment" | "activities";

export const ITEM_LEVEL_KEYS: HierarchyLevelKey[] = ["objectives", "skills", "assessment"];

export const PHASE_ORDER = ["introduction", "presentation", "practice", "application"];
