/** Every interaction affordance of the editor exists and is reachable:
 * outcomes entry with edit/undo/delete, per-item and global plan controls,
 * lesson-graph generation, the four-tab library palette, node/edge editing
 * with the "Y" details dialog, file actions, both help modals, and the
 * Demo/Welding mode toggle.
 */

import { describe, expect, it } from "vitest";

import { bootFromFixture, byTestId, drive, hasTestId } from "./helpers.js";
import { PHASE_ORDER } from "../src/types.js";

describe("editor affordances", () => {
  it("presents the full guided-flow and graph-editor control set", async () => {
    const harness = await bootFromFixture("scenario_main");
    await drive(harness, "lessongraph");
    const { app, root } = harness;

    // outcomes entry with edit/undo/delete and plan generation
    for (const id of ["outcomes-input", "outcomes-save", "outcomes-undo",
                      "outcomes-delete", "generate-plan"]) {
      expect(hasTestId(root, id), id).toBe(true);
    }

    // one collapsible section per level with add/update/delete-all controls
    for (const level of ["objectives", "skills", "assessment", "activities"]) {
      expect(hasTestId(root, `section-${level}`), level).toBe(true);
      expect(hasTestId(root, `update-level-${level}`), level).toBe(true);
      expect(hasTestId(root, `delete-level-${level}`), level).toBe(true);
      expect(hasTestId(root, `add-item-${level}`), level).toBe(true);
    }

    // per-item edit/undo/delete on every objective, skill, and criterion
    const plan = app.state.document!.plan;
    for (const item of [...plan.objectives, ...plan.skills, ...plan.criteria]) {
      expect(hasTestId(root, `item-edit-${item.id}`)).toBe(true);
      expect(hasTestId(root, `item-undo-${item.id}`)).toBe(true);
      expect(hasTestId(root, `item-delete-${item.id}`)).toBe(true);
    }

    expect(hasTestId(root, "generate-lessongraph")).toBe(true);

    // library palette with the four phase tabs
    byTestId(root, "library-toggle").click();
    app.render();
    for (const phase of PHASE_ORDER) {
      expect(hasTestId(root, `phase-tab-${phase}`), phase).toBe(true);
    }
    byTestId(root, "phase-tab-application").click();
    app.render();
    expect(hasTestId(root, "palette-activity-weld-quality-check")).toBe(true);

    // graph editing controls and file actions
    for (const id of ["connect-toggle", "node-delete", "edge-delete",
                      "btn-save", "btn-delete", "btn-upload", "btn-download",
                      "undo-doc", "redo-doc", "mode-toggle"]) {
      expect(hasTestId(root, id), id).toBe(true);
    }

    // rendered graph with one element per node and edge
    const doc = app.state.document!;
    for (const node of doc.graph.nodes) {
      expect(hasTestId(root, `node-${node.nodeId}`)).toBe(true);
    }
    for (const edge of doc.graph.edges) {
      expect(hasTestId(root, `edge-${edge.edgeId}`)).toBe(true);
    }

    // help modals
    byTestId(root, "controls-open").click();
    expect(hasTestId(root, "modal-controls")).toBe(true);
    app.closeModal();
    byTestId(root, "definitions-open").click();
    expect(hasTestId(root, "modal-definitions")).toBe(true);
    app.closeModal();

    // preview pane renders the sequence as buttons
    expect(hasTestId(root, "preview-pane")).toBe(true);
    expect(hasTestId(root, "preview-button-0")).toBe(true);
  });

  it("opens node details with the Y key, showing only editable properties", async () => {
    const harness = await bootFromFixture("scenario_main");
    await drive(harness, "lessongraph");
    const { app, root } = harness;
    const firstNode = app.state.document!.graph.nodes[0];

    await app.nodeClicked(firstNode.nodeId);
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "Y", bubbles: true }));
    expect(app.state.openModal).toBe("node-details");
    app.render();

    expect(hasTestId(root, "modal-node-details")).toBe(true);
    expect(hasTestId(root, "prop-timing")).toBe(true);
    expect(hasTestId(root, "prop-message")).toBe(true);
    expect(hasTestId(root, "prop-hint-audio")).toBe(true);
    expect(hasTestId(root, "prop-hint-visual")).toBe(true);
    expect(hasTestId(root, "props-apply")).toBe(true);
    // the form exposes timing, message, and hints: nothing else is editable
    const inputs = byTestId(root, "modal-node-details").querySelectorAll("input");
    expect(inputs.length).toBe(4);
  });

  it("node colors come from the service's phase color tokens", async () => {
    const harness = await bootFromFixture("scenario_main");
    await drive(harness, "lessongraph");
    const { app, root } = harness;
    const colorByPhase = new Map(
      app.state.library!.phases.map((entry) => [entry.phase, entry.color]));
    expect(colorByPhase.size).toBe(4);
    for (const node of app.state.document!.graph.nodes) {
      const rect = byTestId(root, `node-${node.nodeId}`).querySelector("rect")!;
      expect(rect.getAttribute("fill")).toBe(colorByPhase.get(node.phase));
    }
  });
});
