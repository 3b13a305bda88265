// DOM layer: renders the session tree and forwards every user action to
// exactly one backend call. All legality checks live server-side; this file
// only draws what the server said and surfaces its errors inline.

import { api } from "./api.js";
import {
  RevisionGate,
  classesForRequirement,
  pathKey,
  searchSegments,
  violatingRequirements,
  violationsAt,
  widgetFor,
} from "./model.js";
import type {
  ApiError,
  RegistryInfo,
  RequirementInfo,
  SessionState,
  TreeNodeInfo,
  TreePath,
  ViolationInfo,
} from "./types.js";

let registry: RegistryInfo = { descriptors: [], missing: {} };
let state: SessionState | null = null;
let searchQuery = "";
let matchedKeys = new Set<string>();
let inFlight = false;
let fieldError: { key: string; arg: string; detail: string } | null = null;
const gate = new RevisionGate();
const collapsed = new Set<string>();

const $ = (id: string) => document.getElementById(id)!;

function el(tag: string, className = "", text = ""): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function highlightInto(parent: HTMLElement, text: string): void {
  for (const segment of searchSegments(text, searchQuery)) {
    if (segment.highlight) {
      parent.appendChild(el("mark", "", segment.text));
    } else {
      parent.appendChild(document.createTextNode(segment.text));
    }
  }
}

function flash(message: string, isError = true): void {
  const bar = $("statusbar");
  bar.textContent = message;
  bar.className = isError ? "status error" : "status ok";
  if (!isError) setTimeout(() => (bar.textContent = ""), 2500);
}

async function mutate(
  call: (revision: number) => Promise<SessionState>,
  errContext?: { key: string; arg: string },
): Promise<void> {
  if (inFlight || !state) return; // at most one in-flight mutation
  inFlight = true;
  try {
    fieldError = null;
    applyState(await call(state.revision));
    flash("", false);
  } catch (err) {
    const e = err as ApiError;
    if (e.status === 422 && errContext) {
      // pin value errors to the offending field
      fieldError = { ...errContext, detail: e.detail };
      render();
    }
    flash(`${e.status ?? ""} ${e.detail ?? err}`.trim());
    if (e.status === 409) applyState(await api.tree()); // stale; resync
  } finally {
    inFlight = false;
  }
}

function applyState(next: SessionState): void {
  if (!gate.accept(next.revision)) return; // never render an older revision
  state = next;
  render();
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

function render(): void {
  if (!state) return;
  $("revision").textContent = `revision ${state.revision}`;
  renderViolationList(state.violations);
  const host = $("tree");
  host.textContent = "";
  if (state.root === null) {
    host.appendChild(renderEmptyEntry());
  } else {
    host.appendChild(renderNode(state.root, []));
  }
}

function renderViolationList(violations: ViolationInfo[]): void {
  const list = $("violations");
  list.textContent = "";
  if (violations.length === 0) {
    list.appendChild(el("li", "all-good", "no violations - tree is runnable"));
    return;
  }
  for (const violation of violations) {
    const item = el("li", "violation");
    item.appendChild(el("code", "", violation.code));
    const where = pathKey(violation.path);
    item.appendChild(
      document.createTextNode(` at ${where || "<root>"}: ${violation.detail}`),
    );
    list.appendChild(item);
  }
}

function renderEmptyEntry(): HTMLElement {
  const wrapper = el("div", "node");
  const row = el("div", "req-row badge-red");
  row.appendChild(el("span", "req-key", state!.entry_req));
  row.appendChild(el("span", "req-count", "(1..1)"));
  const entryReq: RequirementInfo = {
    key: state!.entry_req,
    kind: state!.entry_kind,
    tags: {},
    count_min: 1,
    count_max: 1,
  };
  row.appendChild(addDropdown(entryReq, []));
  wrapper.appendChild(row);
  return wrapper;
}

function addDropdown(req: RequirementInfo, path: TreePath): HTMLElement {
  const select = document.createElement("select");
  select.className = "add-select";
  select.appendChild(new Option("+ add", ""));
  for (const descriptor of classesForRequirement(registry.descriptors, req)) {
    const option = new Option(descriptor.name, descriptor.name);
    option.title = `${descriptor.help}\n(${descriptor.source})`;
    select.appendChild(option);
  }
  select.onchange = () => {
    const chosen = select.value;
    select.value = "";
    if (chosen) void mutate((rev) => api.addChild(path, req.key, chosen, rev));
  };
  return select;
}

function renderNode(node: TreeNodeInfo, path: TreePath): HTMLElement {
  const key = pathKey(path);
  const box = el("div", "node");
  const header = el("div", "node-header");
  if (matchedKeys.has(key)) header.classList.add("search-hit");

  const toggle = el("button", "toggle", collapsed.has(key) ? "+" : "-");
  toggle.onclick = () => {
    collapsed.has(key) ? collapsed.delete(key) : collapsed.add(key);
    render();
  };
  header.appendChild(toggle);

  const title = el("span", "node-name");
  highlightInto(title, node.name);
  title.title = `${node.req_key}#${node.index} (${node.kind})`;
  header.appendChild(title);

  const remove = el("button", "remove", "x");
  remove.title = "remove this node";
  remove.onclick = () => void mutate((rev) => api.removeChild(path, rev));
  header.appendChild(remove);
  box.appendChild(header);

  if (collapsed.has(key)) return box;

  const body = el("div", "node-body");
  for (const violation of violationsAt(state!.violations, path)) {
    if (violation.code !== "CountViolation") {
      body.appendChild(el("div", "inline-violation", `${violation.code}: ${violation.detail}`));
    }
  }
  body.appendChild(renderArgs(node, path));
  const flagged = violatingRequirements(state!.violations);
  for (const req of node.requirements) {
    const row = el("div", "req-row");
    if (flagged.has(`${key}::${req.key}`)) row.classList.add("badge-red");
    const label = el("span", "req-key");
    highlightInto(label, req.key);
    row.appendChild(label);
    row.appendChild(
      el("span", "req-count", `(${req.count_min}..${req.count_max ?? "*"}) ${req.kind}`),
    );
    row.appendChild(addDropdown(req, path));
    body.appendChild(row);
    for (const child of node.children[req.key] ?? []) {
      body.appendChild(renderNode(child, [...path, [req.key, child.index]]));
    }
  }
  box.appendChild(body);
  return box;
}

function renderArgs(node: TreeNodeInfo, path: TreePath): HTMLElement {
  const table = el("div", "args");
  const descriptor = registry.descriptors.find((d) => d.name === node.name);
  const key = pathKey(path);
  for (const arg of descriptor?.arguments ?? []) {
    const row = el("label", "arg-row");
    const name = el("span", "arg-name");
    highlightInto(name, arg.name);
    name.title = arg.help;
    row.appendChild(name);

    const context = { key, arg: arg.name };
    const widget = widgetFor(arg);
    const current = node.values[arg.name];
    if (widget === "checkbox") {
      const input = document.createElement("input");
      input.type = "checkbox";
      input.checked = current === true;
      input.onchange = () =>
        void mutate((rev) => api.setArg(path, arg.name, input.checked, rev), context);
      row.appendChild(input);
    } else if (widget === "select") {
      const select = document.createElement("select");
      for (const choice of arg.choices) {
        select.appendChild(new Option(choice, choice, false, choice === current));
      }
      select.onchange = () =>
        void mutate((rev) => api.setArg(path, arg.name, select.value, rev), context);
      row.appendChild(select);
    } else {
      const input = document.createElement("input");
      input.type = "text";
      input.value = String(current ?? "");
      input.onchange = () =>
        void mutate((rev) => api.setArg(path, arg.name, input.value, rev), context);
      if (searchQuery && String(current ?? "").toLowerCase().includes(searchQuery.toLowerCase())) {
        input.classList.add("search-hit");
      }
      row.appendChild(input);
    }
    table.appendChild(row);
    if (fieldError && fieldError.key === key && fieldError.arg === arg.name) {
      table.appendChild(el("div", "field-error", fieldError.detail));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// toolbar actions
// ---------------------------------------------------------------------------

function showPanel(title: string, content: string): void {
  $("panel-title").textContent = title;
  ($("panel-text") as HTMLTextAreaElement).value = content;
  $("panel").classList.remove("hidden");
}

function wireToolbar(): void {
  $("btn-validate").onclick = () => void mutate(() => api.validate());

  ($("search") as HTMLInputElement).oninput = async (event) => {
    searchQuery = (event.target as HTMLInputElement).value;
    matchedKeys = searchQuery
      ? new Set((await api.search(searchQuery)).map((m) => pathKey(m.node_path)))
      : new Set();
    render();
  };

  $("btn-save").onclick = async () => {
    try {
      const { config } = await api.save(null);
      showPanel("saved config (copy it somewhere)", JSON.stringify(config, null, 2));
    } catch (err) {
      flash((err as ApiError).detail);
    }
  };

  $("btn-generate").onclick = async () => {
    try {
      const { config } = await api.generate();
      showPanel("canonical config", JSON.stringify(config, null, 2));
    } catch (err) {
      flash((err as ApiError).detail);
    }
  };

  $("btn-load").onclick = () => {
    showPanel("paste a config, then press Load", "");
    $("panel-load").classList.remove("hidden");
  };

  $("panel-load").onclick = async () => {
    try {
      const config = JSON.parse(($("panel-text") as HTMLTextAreaElement).value);
      await mutate((rev) => api.load(config, null, rev));
      $("panel").classList.add("hidden");
    } catch (err) {
      flash(`load failed: ${(err as ApiError).detail ?? err}`);
    }
  };

  $("btn-dot").onclick = async () => showPanel("graphviz source", await api.dot());

  $("btn-reset").onclick = () => void mutate((rev) => api.reset(rev));

  $("btn-run").onclick = async () => {
    const consoleBox = $("console");
    consoleBox.textContent = "";
    $("console-wrap").classList.remove("hidden");
    try {
      await api.run((event) => {
        if (event.event === "log") {
          consoleBox.appendChild(el("div", "log-line", event.line));
        } else if (event.event === "report") {
          consoleBox.appendChild(
            el(
              "div",
              "log-line report",
              `done: ${event.epochs_run} epoch(s), final loss ${event.final_loss}`,
            ),
          );
        } else {
          consoleBox.appendChild(el("div", "log-line error", event.detail));
        }
        consoleBox.scrollTop = consoleBox.scrollHeight;
      });
    } catch (err) {
      flash((err as ApiError).detail);
    }
  };

  $("panel-close").onclick = () => {
    $("panel").classList.add("hidden");
    $("panel-load").classList.add("hidden");
  };
}

async function boot(): Promise<void> {
  registry = await api.registry();
  const missing = Object.entries(registry.missing);
  if (missing.length > 0) {
    $("missing").textContent = missing
      .map(([name, reason]) => `${name}: ${reason}`)
      .join("; ");
  }
  wireToolbar();
  applyState(await api.tree());
}

void boot();
