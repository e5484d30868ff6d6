/** Preview pane behavior: jump-to highlighting and the cyclic-graph banner. */

import { describe, expect, it } from "vitest";

import { bootFromFixture, byTestId, drive, hasTestId } from "./helpers.js";

describe("instruction-screen preview", () => {
  it("clicking a button moves the highlight to that entry", async () => {
    const harness = await bootFromFixture("scenario_main");
    const { app, root } = harness;
    await drive(harness, "lessongraph");

    expect(app.state.previewCursor).toBeNull();
    byTestId(root, "preview-button-2").click();
    app.render();
    expect(app.state.previewCursor).toBe(2);
    expect(byTestId(root, "preview-button-2").classList.contains("current")).toBe(true);
    expect(hasTestId(root, "preview-detail")).toBe(true);

    byTestId(root, "preview-button-0").click();
    app.render();
    expect(byTestId(root, "preview-button-0").classList.contains("current")).toBe(true);
    expect(byTestId(root, "preview-button-2").classList.contains("current")).toBe(false);
  });

  it("a cyclic lesson shows an error banner and no buttons", async () => {
    const harness = await bootFromFixture("scenario_cyclic");
    const { app, root } = harness;

    expect(app.state.sequenceError).toBe("CyclicGraph");
    expect(hasTestId(root, "preview-error")).toBe(true);
    expect(byTestId(root, "preview-error").textContent).toContain("CyclicGraph");
    expect(root.querySelectorAll(".preview-button").length).toBe(0);
    // the validation badges carry the CycleDetected finding from the service
    expect(hasTestId(root, "diagnostic-CycleDetected")).toBe(true);
  });
});
