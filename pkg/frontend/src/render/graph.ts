/** Graph editor: color-coded draggable nodes, click-to-connect edges,
 * a four-tab library palette, file actions, and validation badges.
 */

import type { App } from "../app.js";
import { phaseColor, type ViewState } from "../state.js";
import { PHASE_ORDER } from "../types.js";
import { el } from "./layout.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_WIDTH = 180;
const NODE_HEIGHT = 56;

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

function renderToolbar(state: ViewState, app: App): HTMLElement {
  const library = el("button", { "data-testid": "library-toggle" }, ["Library"]);
  library.addEventListener("click", () => app.toggleLibrary());

  const connect = el("button", {
    "data-testid": "connect-toggle",
    class: state.connectMode ? "active" : "",
    title: "Draw an edge: click the source node, then the target node",
  }, [state.connectMode ? "Click source, then target…" : "Draw edge"]);
  connect.addEventListener("click", () => app.toggleConnectMode());

  const deleteNode = el("button", { "data-testid": "node-delete" }, ["Delete node"]);
  deleteNode.addEventListener("click", () => void app.removeSelectedNode());
  if (!state.selectedNodeId) {
    deleteNode.setAttribute("disabled", "");
  }
  const deleteEdge = el("button", { "data-testid": "edge-delete" }, ["Delete edge"]);
  deleteEdge.addEventListener("click", () => void app.removeSelectedEdge());
  if (!state.selectedEdgeId) {
    deleteEdge.setAttribute("disabled", "");
  }

  const details = el("button", {
    "data-testid": "node-details-open",
    title: "Node details (or select a node and press Y)",
  }, ["Details (Y)"]);
  details.addEventListener("click", () => app.openNodeDetails());
  if (!state.selectedNodeId) {
    details.setAttribute("disabled", "");
  }

  const save = el("button", { "data-testid": "btn-save", title: "Save" }, ["Save"]);
  save.addEventListener("click", () => void app.saveLesson());
  const wipe = el("button", { "data-testid": "btn-delete",
                              title: "Delete the whole lesson graph" }, ["Delete"]);
  wipe.addEventListener("click", () => void app.clearLesson());
  const upload = el("button", { "data-testid": "btn-upload", title: "Upload" }, ["Upload"]);
  const fileInput = el("input", {
    type: "file",
    accept: "application/json",
    "data-testid": "upload-input",
    style: "display: none",
  }) as HTMLInputElement;
  upload.addEventListener("click", () => fileInput.click());
  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (file) {
      void file.text().then((text) => app.uploadLesson(text));
    }
  });
  const download = el("button", { "data-testid": "btn-download",
                                  title: "Download" }, ["Download"]);
  download.addEventListener("click", () => void app.downloadLesson());

  return el("div", { class: "graph-toolbar" },
            [library, connect, deleteNode, deleteEdge, details,
             save, wipe, upload, fileInput, download]);
}

function renderPalette(state: ViewState, app: App): HTMLElement | null {
  if (!state.libraryOpen) {
    return null;
  }
  const palette = el("div", { class: "palette", "data-testid": "library-palette" });
  const tabs = el("div", { class: "phase-tabs" });
  for (const phase of PHASE_ORDER) {
    const tab = el("button", {
      "data-testid": `phase-tab-${phase}`,
      class: state.activePhaseTab === phase ? "active" : "",
    }, [phase]);
    tab.style.borderBottomColor = phaseColor(state, phase);
    tab.addEventListener("click", () => app.setPhaseTab(phase));
    tabs.append(tab);
  }
  palette.append(tabs);
  const list = el("ul", { class: "palette-list" });
  for (const descriptor of state.library?.descriptors ?? []) {
    if (descriptor.phase !== state.activePhaseTab) {
      continue;
    }
    const row = el("li", {});
    const place = el("button", {
      "data-testid": `palette-activity-${descriptor.activityId}`,
      title: descriptor.description,
    }, [descriptor.name]);
    place.style.borderLeft = `6px solid ${phaseColor(state, descriptor.phase)}`;
    place.addEventListener("click", () => void app.placeActivity(descriptor.activityId));
    row.append(place);
    list.append(row);
  }
  palette.append(list);
  return palette;
}

function renderDiagnostics(state: ViewState): HTMLElement {
  const box = el("div", { class: "diagnostics", "data-testid": "diagnostics" });
  if (!state.diagnostics.length) {
    box.append(el("span", { class: "badge badge-ok" }, ["No findings"]));
    return box;
  }
  for (const diagnostic of state.diagnostics) {
    box.append(el("span", {
      class: `badge badge-${diagnostic.severity}`,
      "data-testid": `diagnostic-${diagnostic.category}`,
      title: diagnostic.message,
    }, [`${diagnostic.category} @ ${diagnostic.locus.join(",")}`]));
  }
  return box;
}

function renderCanvas(state: ViewState, app: App): SVGElement {
  const doc = state.document!;
  const nodes = doc.graph.nodes;
  const width = Math.max(720, ...nodes.map((n) => n.position.x + NODE_WIDTH + 60));
  const height = Math.max(420, ...nodes.map((n) => n.position.y + NODE_HEIGHT + 60));
  const svg = svgEl("svg", {
    class: "graph-canvas",
    "data-testid": "graph-canvas",
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
  });
  const defs = svgEl("defs", {});
  const marker = svgEl("marker", {
    id: "arrow",
    markerWidth: "10",
    markerHeight: "8",
    refX: "9",
    refY: "4",
    orient: "auto",
  });
  marker.append(svgEl("path", { d: "M0,0 L10,4 L0,8 z", fill: "#555" }));
  defs.append(marker);
  svg.append(defs);

  const centers = new Map(nodes.map((n) => [n.nodeId, {
    x: n.position.x + NODE_WIDTH / 2,
    y: n.position.y + NODE_HEIGHT / 2,
  }]));
  for (const edge of doc.graph.edges) {
    const from = centers.get(edge.from);
    const to = centers.get(edge.to);
    if (!from || !to) {
      continue;
    }
    const line = svgEl("line", {
      x1: String(from.x),
      y1: String(from.y),
      x2: String(to.x),
      y2: String(to.y),
      class: state.selectedEdgeId === edge.edgeId ? "edge selected" : "edge",
      "data-testid": `edge-${edge.edgeId}`,
      "marker-end": "url(#arrow)",
    });
    line.addEventListener("click", () => app.edgeClicked(edge.edgeId));
    svg.append(line);
  }

  for (const node of nodes) {
    const group = svgEl("g", {
      class: "node",
      "data-testid": `node-${node.nodeId}`,
      transform: `translate(${node.position.x}, ${node.position.y})`,
    });
    const isSelected = state.selectedNodeId === node.nodeId;
    const isConnectSource = state.connectSource === node.nodeId;
    const rect = svgEl("rect", {
      width: String(NODE_WIDTH),
      height: String(NODE_HEIGHT),
      rx: "10",
      fill: phaseColor(state, node.phase),
      stroke: isSelected || isConnectSource ? "#111" : "#ffffff",
      "stroke-width": isSelected || isConnectSource ? "3" : "1",
    });
    const label = svgEl("text", { x: "10", y: "24", class: "node-label" });
    label.textContent = node.label;
    const timing = svgEl("text", { x: "10", y: "44", class: "node-sub" });
    timing.textContent = `${node.properties.timingSeconds}s · ${node.phase}`;
    group.append(rect, label, timing);
    group.addEventListener("click", () => void app.nodeClicked(node.nodeId));

    // drag to reposition; one PATCH on drop
    let dragging: { startX: number; startY: number; x: number; y: number } | null = null;
    group.addEventListener("pointerdown", (event) => {
      dragging = {
        startX: (event as PointerEvent).clientX,
        startY: (event as PointerEvent).clientY,
        x: node.position.x,
        y: node.position.y,
      };
    });
    group.addEventListener("pointermove", (event) => {
      if (!dragging) {
        return;
      }
      const dx = (event as PointerEvent).clientX - dragging.startX;
      const dy = (event as PointerEvent).clientY - dragging.startY;
      group.setAttribute("transform",
                         `translate(${dragging.x + dx}, ${dragging.y + dy})`);
    });
    group.addEventListener("pointerup", (event) => {
      if (!dragging) {
        return;
      }
      const dx = (event as PointerEvent).clientX - dragging.startX;
      const dy = (event as PointerEvent).clientY - dragging.startY;
      const moved = Math.abs(dx) > 2 || Math.abs(dy) > 2;
      const target = { x: dragging.x + dx, y: dragging.y + dy };
      dragging = null;
      if (moved) {
        void app.moveNode(node.nodeId, target.x, target.y);
      }
    });
    svg.append(group);
  }
  return svg;
}

export function renderGraphPanel(state: ViewState, app: App): HTMLElement {
  const panel = el("div", { class: "graph-panel", "data-testid": "graph-panel" });
  if (!state.document) {
    return panel;
  }
  panel.append(renderToolbar(state, app));
  const palette = renderPalette(state, app);
  if (palette) {
    panel.append(palette);
  }
  panel.append(renderDiagnostics(state));
  panel.append(renderCanvas(state, app) as unknown as HTMLElement);
  return panel;
}
