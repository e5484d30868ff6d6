/** Shared test scaffolding: boot the app against a recorded fixture and
 * drive the canonical scenario steps in the same order the recorder used.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import { ApiClient } from "../src/api.js";
import { App, attachKeyBindings } from "../src/app.js";
import { FakeService, type Fixture } from "./fake_fetch.js";

export const OUTCOMES_TEXT = "Teach Tee joint welding technique";
export const SKILL_EDIT_TEXT = "Maintain correct travel speed";
export const NEW_NODE_ACTIVITY = "weld-quality-check";

export interface Harness {
  app: App;
  fake: FakeService;
  fixture: Fixture;
  root: HTMLElement;
}

export function loadFixture(name: string): Fixture {
  const path = join(process.cwd(), "tests", "fixtures", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf-8")) as Fixture;
}

export async function bootFromFixture(name: string): Promise<Harness> {
  const fixture = loadFixture(name);
  const fake = new FakeService(fixture);
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.append(root);
  const app = new App(root, new ApiClient("", fake.fetch), () => undefined);
  await app.boot();
  attachKeyBindings(app, document);
  return { app, fake, fixture, root };
}

type Step = (app: App, meta: Record<string, string>) => Promise<void>;

const STEPS: [string, Step][] = [
  ["outcomes", (app) => app.saveOutcomes(OUTCOMES_TEXT)],
  ["generate", (app) => app.generateLevel("objectives")],
  ["lessongraph", (app) => app.generateLessonGraph()],
  ["editSkill", async (app, meta) => {
    app.startItemEdit("skills", meta.skillId);
    await app.saveItemEdit("skills", meta.skillId, SKILL_EDIT_TEXT);
  }],
  ["undoSkill", (app, meta) => app.undoItem("skills", meta.skillId)],
  ["placeNode", (app) => app.placeActivity(NEW_NODE_ACTIVITY)],
  ["connect", async (app, meta) => {
    app.toggleConnectMode();
    await app.nodeClicked(meta.chainTailId);
    await app.nodeClicked(meta.newNodeId);
  }],
  ["patchProps", async (app, meta) => {
    app.state.selectedNodeId = meta.newNodeId;
    await app.applyNodeProperties({
      timingSeconds: 300,
      message: "Final check",
      hintAudio: true,
      hintVisual: false,
    });
  }],
];

/** Replays scenario steps up to and including `through`. */
export async function drive(harness: Harness, through: string): Promise<void> {
  for (const [name, step] of STEPS) {
    await step(harness.app, harness.fixture.meta);
    if (name === through) {
      return;
    }
  }
  throw new Error(`unknown step ${through}`);
}

export function byTestId(root: ParentNode, id: string): HTMLElement {
  const node = root.querySelector(`[data-testid="${id}"]`);
  if (!node) {
    throw new Error(`missing element [data-testid=${id}]`);
  }
  return node as HTMLElement;
}

export function hasTestId(root: ParentNode, id: string): boolean {
  return root.querySelector(`[data-testid="${id}"]`) !== null;
}

export function nthQueueBody<T>(fixture: Fixture, key: string, index: number): T {
  const queue = fixture.queues[key];
  if (!queue || index >= queue.length) {
    throw new Error(`fixture queue ${key} has no entry ${index}`);
  }
  return JSON.parse(queue[index].body) as T;
}
