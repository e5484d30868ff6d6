/** Instruction-screen preview: the /sequence result as an ordered button
 * list with jump-to highlighting. Button order is exactly the server's.
 */

import type { App } from "../app.js";
import type { ViewState } from "../state.js";
import { el } from "./layout.js";

export function renderPreviewPane(state: ViewState, app: App): HTMLElement {
  const pane = el("div", { class: "preview-pane", "data-testid": "preview-pane" });
  pane.append(el("h3", {}, ["Instruction screen preview"]));

  if (state.sequenceError && state.sequenceError !== "EmptyGraph") {
    pane.append(el("div", {
      class: "banner banner-error",
      "data-testid": "preview-error",
    }, [`${state.sequenceError}: fix the graph to preview the sequence`]));
    return pane;
  }
  if (!state.sequence || !state.sequence.length) {
    pane.append(el("p", { class: "preview-empty" }, ["No activities in the sequence yet."]));
    return pane;
  }

  const list = el("ol", { class: "preview-list" });
  state.sequence.forEach((entry, index) => {
    const button = el("button", {
      class: state.previewCursor === index ? "preview-button current" : "preview-button",
      "data-testid": `preview-button-${index}`,
      "data-node-id": entry.nodeId,
      title: entry.message,
    }, [entry.label]);
    button.addEventListener("click", () => app.previewJump(index));
    list.append(el("li", {}, [button]));
  });
  pane.append(list);

  if (state.previewCursor !== null) {
    const entry = state.sequence[state.previewCursor];
    pane.append(el("div", { class: "preview-detail", "data-testid": "preview-detail" }, [
      `${entry.label} — ${entry.timingSeconds}s — ${entry.message} ` +
      `(audio ${entry.hintAudio ? "on" : "off"}, visual ${entry.hintVisual ? "on" : "off"})`,
    ]));
  }
  return pane;
}
