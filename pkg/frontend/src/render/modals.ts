/** Modal dialogs: controls/instructions, terminology definitions, and the
 * node-details form limited to the activity's editable properties.
 */

import type { App } from "../app.js";
import type { ViewState } from "../state.js";
import { el } from "./layout.js";

const CONTROLS_HELP = [
  "Enter learning outcomes on the left and press Generate plan.",
  "Update on a level regenerates that level and everything below it.",
  "Edit, Undo, and Delete act on a single objective, skill, or criterion.",
  "Generate Lesson graph renders the activity sequence as a chain of nodes.",
  "Open the Library and click an activity to place it as a node.",
  "Draw edge: click the source node, then the target node.",
  "Select a node and press Y to edit its timing, message, and hints.",
  "Save persists on the server; Download/Upload exchange lesson files.",
];

const DEFINITIONS: [string, string][] = [
  ["Learning outcomes", "What learners should know and be able to do after the unit."],
  ["Learning objectives", "Measurable sub-goals that target specific knowledge and skills."],
  ["Skills", "The concrete abilities learners practice to reach the objectives."],
  ["Assessment criteria", "How each skill is measured during the unit."],
  ["Learning activity", "A pre-built interactive unit selected from the library."],
  ["Lesson graph", "The directed sequence of activities the runtime will play."],
  ["Instructional phases", "Introduction, Presentation, Practice, and Application."],
];

function modalShell(testId: string, title: string, app: App,
                    body: HTMLElement): HTMLElement {
  const close = el("button", { class: "modal-close", "data-testid": "modal-close" },
                   ["Close"]);
  close.addEventListener("click", () => app.closeModal());
  const box = el("div", { class: "modal", "data-testid": testId }, [
    el("h3", {}, [title]),
    body,
    close,
  ]);
  return el("div", { class: "modal-backdrop" }, [box]);
}

function nodeDetails(state: ViewState, app: App): HTMLElement | null {
  const doc = state.document;
  const node = doc?.graph.nodes.find((n) => n.nodeId === state.selectedNodeId);
  if (!doc || !node) {
    return null;
  }
  const descriptor = state.library?.descriptors.find(
    (d) => d.activityId === node.activityId);
  const editable = descriptor?.editableProperties ?? ["timing", "message", "hint"];
  const body = el("div", { class: "node-details" });
  body.append(el("p", { class: "node-details-name" },
                 [descriptor ? descriptor.name : node.label]));
  if (descriptor?.description) {
    body.append(el("p", { class: "node-details-desc" }, [descriptor.description]));
  }

  const timing = el("input", { type: "number", min: "1",
                               "data-testid": "prop-timing" }) as HTMLInputElement;
  timing.value = String(node.properties.timingSeconds);
  const message = el("input", { "data-testid": "prop-message" }) as HTMLInputElement;
  message.value = node.properties.message;
  const hintAudio = el("input", { type: "checkbox",
                                  "data-testid": "prop-hint-audio" }) as HTMLInputElement;
  hintAudio.checked = node.properties.hintAudio;
  const hintVisual = el("input", { type: "checkbox",
                                   "data-testid": "prop-hint-visual" }) as HTMLInputElement;
  hintVisual.checked = node.properties.hintVisual;

  if (editable.includes("timing")) {
    body.append(el("label", {}, ["Timing (seconds) ", timing]));
  }
  if (editable.includes("message")) {
    body.append(el("label", {}, ["Message ", message]));
  }
  if (editable.includes("hint")) {
    body.append(el("label", {}, ["Audio hint ", hintAudio]));
    body.append(el("label", {}, ["Visual hint ", hintVisual]));
  }

  const apply = el("button", { class: "primary", "data-testid": "props-apply" },
                   ["Apply"]);
  apply.addEventListener("click", () => {
    const patch: { timingSeconds?: number; message?: string;
                   hintAudio?: boolean; hintVisual?: boolean } = {};
    if (editable.includes("timing")) {
      patch.timingSeconds = Number(timing.value);
    }
    if (editable.includes("message")) {
      patch.message = message.value;
    }
    if (editable.includes("hint")) {
      patch.hintAudio = hintAudio.checked;
      patch.hintVisual = hintVisual.checked;
    }
    void app.applyNodeProperties(patch);
  });
  body.append(apply);
  return body;
}

export function renderModals(state: ViewState, app: App): HTMLElement | null {
  if (state.openModal === "controls") {
    const list = el("ul", {});
    for (const line of CONTROLS_HELP) {
      list.append(el("li", {}, [line]));
    }
    return modalShell("modal-controls", "Controls", app, list);
  }
  if (state.openModal === "definitions") {
    const list = el("dl", {});
    for (const [term, definition] of DEFINITIONS) {
      list.append(el("dt", {}, [term]));
      list.append(el("dd", {}, [definition]));
    }
    return modalShell("modal-definitions", "Definitions", app, list);
  }
  if (state.openModal === "node-details") {
    const body = nodeDetails(state, app);
    if (body) {
      return modalShell("modal-node-details", "Node details", app, body);
    }
  }
  return null;
}
