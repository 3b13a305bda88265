import { describe, expect, it } from "vitest";

import {
  RevisionGate,
  classesForRequirement,
  flattenTree,
  matchedPathKeys,
  pathKey,
  searchSegments,
  valueForPatch,
  violatingRequirements,
  violationsAt,
  widgetFor,
} from "../src/model.js";
import type { DescriptorInfo, TreeNodeInfo, ViolationInfo } from "../src/types.js";

const arg = (kind: "string" | "integer" | "real" | "boolean", choices: string[] = []) => ({
  kind,
  choices,
});

describe("widgetFor", () => {
  it("renders booleans as checkboxes", () => {
    expect(widgetFor(arg("boolean"))).toBe("checkbox");
  });

  it("renders constrained choices as dropdowns", () => {
    expect(widgetFor(arg("string", ["cpu", "none"]))).toBe("select");
  });

  it("renders everything else as text fields", () => {
    expect(widgetFor(arg("string"))).toBe("text");
    expect(widgetFor(arg("integer"))).toBe("text");
    expect(widgetFor(arg("real"))).toBe("text");
  });
});

describe("pathKey", () => {
  it("is empty for the root and slash-joined below", () => {
    expect(pathKey([])).toBe("");
    expect(pathKey([["cls_trainer", 0], ["cls_callbacks", 1]])).toBe(
      "cls_trainer#0/cls_callbacks#1",
    );
  });
});

describe("violatingRequirements", () => {
  it("flags the requirement row for a missing-child count violation", () => {
    const violations: ViolationInfo[] = [
      { code: "CountViolation", path: [], detail: "cls_device requires exactly 1, found 0" },
    ];
    expect(violatingRequirements(violations)).toEqual(new Set(["::cls_device"]));
  });

  it("maps kind and tag mismatches onto the parent requirement row", () => {
    const violations: ViolationInfo[] = [
      {
        code: "KindMismatch",
        path: [["cls_trainer", 0], ["cls_callbacks", 0]],
        detail: "'CpuDevicesManager' has kind 'device', cls_callbacks needs 'callback'",
      },
    ];
    expect(violatingRequirements(violations)).toEqual(
      new Set(["cls_trainer#0::cls_callbacks"]),
    );
  });

  it("ignores non-structural violations", () => {
    const violations: ViolationInfo[] = [
      { code: "CoercionError", path: [], detail: "argument 'seed' holds 'x'" },
    ];
    expect(violatingRequirements(violations).size).toBe(0);
  });
});

describe("violationsAt", () => {
  it("returns only violations pinned to the given node", () => {
    const violations: ViolationInfo[] = [
      { code: "CountViolation", path: [], detail: "cls_device requires exactly 1, found 0" },
      { code: "CoercionError", path: [["cls_trainer", 0]], detail: "bad max_epochs" },
    ];
    expect(violationsAt(violations, [["cls_trainer", 0]])).toHaveLength(1);
    expect(violationsAt(violations, [])).toHaveLength(1);
  });
});

describe("searchSegments", () => {
  it("highlights the occurrence inside a module name", () => {
    const segments = searchSegments("SingleSearchTask", "as");
    expect(segments).toEqual([
      { text: "SingleSearchT", highlight: false },
      { text: "as", highlight: true },
      { text: "k", highlight: false },
    ]);
    expect(segments.map((s) => s.text).join("")).toBe("SingleSearchTask");
  });

  it("highlights repeated occurrences", () => {
    const hits = searchSegments("alias astray", "as").filter((s) => s.highlight);
    expect(hits).toHaveLength(2);
  });

  it("matches the requirement-key example", () => {
    const hits = searchSegments("cls_task", "as").filter((s) => s.highlight);
    expect(hits).toEqual([{ text: "as", highlight: true }]);
  });

  it("is case-insensitive and preserves original casing", () => {
    const segments = searchSegments("Save_DIR and save_dir", "SAVE");
    expect(segments.filter((s) => s.highlight).map((s) => s.text)).toEqual([
      "Save",
      "save",
    ]);
  });

  it("returns one plain segment when there is no query or no match", () => {
    expect(searchSegments("plain", "")).toEqual([{ text: "plain", highlight: false }]);
    expect(searchSegments("plain", "zz")).toEqual([{ text: "plain", highlight: false }]);
  });
});

describe("classesForRequirement", () => {
  const descriptors = [
    { name: "B", kind: "method", tags: { search: true } },
    { name: "A", kind: "method", tags: { search: true } },
    { name: "NoTag", kind: "method", tags: {} },
    { name: "Other", kind: "device", tags: { search: true } },
  ] as unknown as DescriptorInfo[];

  it("filters by kind and every tag pair, sorted by name", () => {
    const req = { key: "cls_method", kind: "method", tags: { search: true }, count_min: 0, count_max: 1 };
    expect(classesForRequirement(descriptors, req).map((d) => d.name)).toEqual(["A", "B"]);
  });

  it("empty tag filter accepts the whole kind", () => {
    const req = { key: "cls_method", kind: "method", tags: {}, count_min: 0, count_max: null };
    expect(classesForRequirement(descriptors, req).map((d) => d.name)).toEqual([
      "A",
      "B",
      "NoTag",
    ]);
  });
});

describe("RevisionGate", () => {
  it("accepts increasing revisions and rejects stale ones", () => {
    const gate = new RevisionGate();
    expect(gate.accept(0)).toBe(true);
    expect(gate.accept(3)).toBe(true);
    expect(gate.accept(2)).toBe(false); // slow response from the past
    expect(gate.accept(3)).toBe(true); // equal is a legal re-render
    expect(gate.accept(4)).toBe(true);
  });
});

describe("valueForPatch", () => {
  it("checkboxes send booleans, everything else strings", () => {
    expect(valueForPatch("checkbox", { checked: true })).toBe(true);
    expect(valueForPatch("text", { value: "3" })).toBe("3");
    expect(valueForPatch("select", { value: "cpu" })).toBe("cpu");
  });
});

describe("flattenTree", () => {
  const node = (name: string, children: Record<string, TreeNodeInfo[]> = {}): TreeNodeInfo => ({
    name,
    kind: "x",
    req_key: "cls_x",
    index: 0,
    values: {},
    requirements: Object.keys(children).map((key) => ({
      key,
      kind: "x",
      tags: {},
      count_min: 0,
      count_max: null,
    })),
    children,
  });

  it("walks depth-first in declaration order", () => {
    const tree = node("root", {
      cls_a: [node("a0"), { ...node("a1"), index: 1 }],
      cls_b: [node("b0")],
    });
    const rows = flattenTree(tree);
    expect(rows.map((r) => r.node.name)).toEqual(["root", "a0", "a1", "b0"]);
    expect(rows.map((r) => pathKey(r.path))).toEqual([
      "",
      "cls_a#0",
      "cls_a#1",
      "cls_b#0",
    ]);
  });

  it("is empty for a missing root", () => {
    expect(flattenTree(null)).toEqual([]);
  });
});

describe("matchedPathKeys", () => {
  it("collects the node paths that hold matches", () => {
    const keys = matchedPathKeys([
      { node_path: [], field: "module_name", matched_text: "SingleSearchTask" },
      { node_path: [["cls_trainer", 0]], field: "arg_name", matched_text: "max_epochs" },
    ]);
    expect(keys).toEqual(new Set(["", "cls_trainer#0"]));
  });
});
