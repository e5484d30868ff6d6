/** Top-level two-pane layout: guided plan panel left, graph editor right. */

import type { App } from "../app.js";
import type { ViewState } from "../state.js";
import { renderLeftPanel } from "./left.js";
import { renderGraphPanel } from "./graph.js";
import { renderPreviewPane } from "./preview.js";
import { renderModals } from "./modals.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

function renderBanner(state: ViewState, app: App): HTMLElement | null {
  if (!state.banner) {
    return null;
  }
  const banner = el("div", {
    class: `banner banner-${state.banner.kind}`,
    "data-testid": "banner",
  }, [state.banner.text]);
  if (state.banner.kind === "conflict") {
    const reload = el("button", { "data-testid": "banner-reload" }, ["Reload"]);
    reload.addEventListener("click", () => void app.reloadDocument());
    banner.append(reload);
  }
  return banner;
}

function renderHeader(state: ViewState, app: App): HTMLElement {
  const doc = state.document;
  const title = el("span", { class: "doc-title" }, [doc ? doc.title : "loading"]);

  const modeToggle = el("button", {
    class: "mode-toggle",
    "data-testid": "mode-toggle",
    title: "Switch between Demo and Welding",
  }, [doc?.mode === "demo" ? "Mode: Demo" : "Mode: Welding"]);
  modeToggle.addEventListener("click", () => {
    void app.switchMode(doc?.mode === "demo" ? "welding" : "demo");
  });

  const undo = el("button", { "data-testid": "undo-doc" }, ["Undo"]);
  undo.addEventListener("click", () => void app.undoDocument());
  const redo = el("button", { "data-testid": "redo-doc" }, ["Redo"]);
  redo.addEventListener("click", () => void app.redoDocument());
  if (doc && !doc.canUndo) {
    undo.setAttribute("disabled", "");
  }
  if (doc && !doc.canRedo) {
    redo.setAttribute("disabled", "");
  }

  const controls = el("button", { "data-testid": "controls-open" }, ["Controls"]);
  controls.addEventListener("click", () => app.openModal("controls"));
  const definitions = el("button", { "data-testid": "definitions-open" }, ["Definitions"]);
  definitions.addEventListener("click", () => app.openModal("definitions"));

  return el("header", { class: "topbar" }, [
    title, modeToggle, undo, redo, controls, definitions,
  ]);
}

export function renderApp(root: HTMLElement, state: ViewState, app: App): void {
  root.innerHTML = "";
  root.append(renderHeader(state, app));
  const banner = renderBanner(state, app);
  if (banner) {
    root.append(banner);
  }
  const main = el("main", { class: "panes" });
  main.append(renderLeftPanel(state, app));
  const right = el("section", { class: "right-pane" });
  right.append(renderGraphPanel(state, app));
  right.append(renderPreviewPane(state, app));
  main.append(right);
  root.append(main);
  const modal = renderModals(state, app);
  if (modal) {
    root.append(modal);
  }
}
