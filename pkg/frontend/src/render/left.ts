/** Guided Backward-design panel: outcomes entry plus one section per level,
 * each with per-item edit/undo/delete and global add/update/delete controls.
 * Item lists are rendered verbatim from the server's plan payload.
 */

import type { App } from "../app.js";
import type { ViewState } from "../state.js";
import type { HierarchyLevelKey, ItemPayload } from "../types.js";
import { el } from "./layout.js";

const LEVEL_TITLES: Record<string, string> = {
  objectives: "Learning objectives",
  skills: "Skills",
  assessment: "Assessment criteria",
  activities: "Learning activities",
};

function staleBadge(state: ViewState, level: string): HTMLElement | null {
  if (!state.document?.plan.staleLevels.includes(level)) {
    return null;
  }
  return el("span", {
    class: "badge badge-stale",
    "data-testid": `stale-badge-${level}`,
    title: "This level predates an edit made above it",
  }, ["stale"]);
}

function itemRow(state: ViewState, app: App, level: HierarchyLevelKey,
                 item: ItemPayload): HTMLElement {
  const row = el("li", { class: "item-row", "data-testid": `item-${item.id}` });
  const editing = state.editingItem
    && state.editingItem.level === level
    && state.editingItem.itemId === item.id;
  if (editing) {
    const input = el("input", {
      value: item.text,
      class: "item-edit-input",
      "data-testid": `item-edit-input-${item.id}`,
    });
    input.value = item.text;
    const save = el("button", { "data-testid": `item-save-${item.id}` }, ["Save"]);
    save.addEventListener("click", () => void app.saveItemEdit(level, item.id, input.value));
    const cancel = el("button", {}, ["Cancel"]);
    cancel.addEventListener("click", () => app.cancelItemEdit());
    row.append(input, save, cancel);
    return row;
  }
  const text = el("span", { class: "item-text" }, [item.text]);
  if (item.provenance === "manual") {
    text.classList.add("item-manual");
  }
  const edit = el("button", { class: "icon", "data-testid": `item-edit-${item.id}`,
                              title: "Edit" }, ["Edit"]);
  edit.addEventListener("click", () => app.startItemEdit(level, item.id));
  const undo = el("button", { class: "icon", "data-testid": `item-undo-${item.id}`,
                              title: "Undo last edit of this item" }, ["Undo"]);
  undo.addEventListener("click", () => void app.undoItem(level, item.id));
  const remove = el("button", { class: "icon", "data-testid": `item-delete-${item.id}`,
                                title: "Delete" }, ["Delete"]);
  remove.addEventListener("click", () => void app.deleteItem(level, item.id));
  row.append(text, edit, undo, remove);
  return row;
}

function levelSection(state: ViewState, app: App, level: HierarchyLevelKey,
                      items: ItemPayload[]): HTMLElement {
  const section = el("details", {
    class: "level-section",
    "data-testid": `section-${level}`,
  }) as HTMLDetailsElement;
  section.open = !state.collapsed[level];
  section.addEventListener("toggle", () => app.toggleSection(level, section.open));

  const summary = el("summary", {}, [LEVEL_TITLES[level]]);
  const stale = staleBadge(state, level);
  if (stale) {
    summary.append(" ", stale);
  }
  section.append(summary);

  const list = el("ul", { class: "item-list" });
  for (const item of items) {
    list.append(itemRow(state, app, level, item));
  }
  section.append(list);

  const addInput = el("input", {
    placeholder: `Add ${LEVEL_TITLES[level].toLowerCase()}…`,
    "data-testid": `add-item-input-${level}`,
  });
  const addButton = el("button", { "data-testid": `add-item-${level}` }, ["Add"]);
  addButton.addEventListener("click", () => {
    void app.addItem(level, addInput.value);
    addInput.value = "";
  });

  const update = el("button", {
    "data-testid": `update-level-${level}`,
    title: "Regenerate this level and everything below it",
  }, ["Update"]);
  update.addEventListener("click", () => void app.generateLevel(level));

  const wipe = el("button", { "data-testid": `delete-level-${level}` }, ["Delete all"]);
  wipe.addEventListener("click", () => void app.deleteLevel(level));

  section.append(el("div", { class: "level-actions" },
                    [addInput, addButton, update, wipe]));
  return section;
}

function activitySection(state: ViewState, app: App): HTMLElement {
  const doc = state.document!;
  const section = el("details", {
    class: "level-section",
    "data-testid": "section-activities",
  }) as HTMLDetailsElement;
  section.open = !state.collapsed["activities"];
  section.addEventListener("toggle", () => app.toggleSection("activities", section.open));
  const summary = el("summary", {}, [LEVEL_TITLES["activities"]]);
  const stale = staleBadge(state, "activities");
  if (stale) {
    summary.append(" ", stale);
  }
  section.append(summary);

  const names = new Map(state.library?.descriptors.map((d) => [d.activityId, d.name]));
  const list = el("ol", { class: "item-list" });
  for (const ref of doc.plan.activitySequence) {
    const row = el("li", { class: "item-row", "data-testid": `entry-${ref.instanceId}` });
    row.append(el("span", { class: "item-text" },
                  [names.get(ref.activityId) ?? ref.activityId]));
    const remove = el("button", {
      class: "icon",
      "data-testid": `entry-delete-${ref.instanceId}`,
    }, ["Delete"]);
    remove.addEventListener("click", () => void app.removeActivityEntry(ref.instanceId));
    row.append(remove);
    list.append(row);
  }
  section.append(list);

  const picker = el("select", { "data-testid": "activity-picker" }) as HTMLSelectElement;
  for (const descriptor of state.library?.descriptors ?? []) {
    picker.append(el("option", { value: descriptor.activityId }, [descriptor.name]));
  }
  const add = el("button", { "data-testid": "add-item-activities" }, ["Add activity"]);
  add.addEventListener("click", () => void app.addActivityEntry(picker.value));
  const update = el("button", { "data-testid": "update-level-activities" }, ["Update"]);
  update.addEventListener("click", () => void app.generateLevel("activities"));
  const wipe = el("button", { "data-testid": "delete-level-activities" }, ["Delete all"]);
  wipe.addEventListener("click", () => void app.deleteLevel("activities"));
  section.append(el("div", { class: "level-actions" }, [picker, add, update, wipe]));
  return section;
}

function outcomesSection(state: ViewState, app: App): HTMLElement {
  const doc = state.document!;
  const section = el("div", { class: "outcomes-section" });
  section.append(el("h2", {}, ["Learning outcomes"]));
  const input = el("textarea", {
    "data-testid": "outcomes-input",
    placeholder: "What should learners be able to do after this unit?",
  }) as HTMLTextAreaElement;
  input.value = doc.plan.outcomes;
  const save = el("button", { "data-testid": "outcomes-save", title: "Edit" }, ["Save"]);
  save.addEventListener("click", () => void app.saveOutcomes(input.value));
  const undo = el("button", { "data-testid": "outcomes-undo", title: "Undo" }, ["Undo"]);
  undo.addEventListener("click", () => void app.undoDocument());
  const wipe = el("button", { "data-testid": "outcomes-delete", title: "Delete" }, ["Delete"]);
  wipe.addEventListener("click", () => void app.deleteLevel("outcomes"));
  const generate = el("button", {
    "data-testid": "generate-plan",
    class: "primary",
    title: "Generate objectives, skills, criteria, and activities",
  }, ["Generate plan"]);
  generate.addEventListener("click", () => void app.generateLevel("objectives"));
  section.append(input, el("div", { class: "level-actions" },
                           [save, undo, wipe, generate]));
  return section;
}

export function renderLeftPanel(state: ViewState, app: App): HTMLElement {
  const panel = el("section", { class: "left-pane", "data-testid": "left-panel" });
  const doc = state.document;
  if (!doc) {
    panel.append(el("p", {}, ["Loading document…"]));
    return panel;
  }
  panel.append(outcomesSection(state, app));
  panel.append(levelSection(state, app, "objectives", doc.plan.objectives));
  panel.append(levelSection(state, app, "skills", doc.plan.skills));
  panel.append(levelSection(state, app, "assessment", doc.plan.criteria));
  panel.append(activitySection(state, app));

  const generateGraph = el("button", {
    class: "primary",
    "data-testid": "generate-lessongraph",
  }, ["Generate Lesson graph"]);
  generateGraph.addEventListener("click", () => void app.generateLessonGraph());
  panel.append(generateGraph);
  return panel;
}
