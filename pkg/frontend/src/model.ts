// Pure view-model logic: widget selection, violation badges, search
// highlighting, revision ordering. No DOM, no fetch; everything here is
// derived from server responses (the server stays the single source of
// truth for schema legality).

import type {
  ArgumentInfo,
  DescriptorInfo,
  RequirementInfo,
  Scalar,
  SearchMatchInfo,
  TreeNodeInfo,
  TreePath,
  ViolationInfo,
} from "./types.js";

export type WidgetKind = "checkbox" | "select" | "text";

/** Boolean args get checkboxes, constrained choices a dropdown, the rest text. */
export function widgetFor(arg: Pick<ArgumentInfo, "kind" | "choices">): WidgetKind {
  if (arg.kind === "boolean") return "checkbox";
  if (arg.choices.length > 0) return "select";
  return "text";
}

/** Canonical string form of a node path, usable as a map key. */
export function pathKey(path: TreePath): string {
  return path.map(([req, index]) => `${req}#${index}`).join("/");
}

/** Registry classes eligible for a requirement (kind plus every tag pair). */
export function classesForRequirement(
  descriptors: DescriptorInfo[],
  req: RequirementInfo,
): DescriptorInfo[] {
  return descriptors
    .filter(
      (d) =>
        d.kind === req.kind &&
        Object.entries(req.tags).every(([tag, value]) => d.tags[tag] === value),
    )
    .sort((a, b) => a.name.localeCompare(b.name));
}

/**
 * Requirement rows that must render a red badge, as "nodePath::reqKey".
 *
 * Count breaches carry the owning node's path and start their detail with
 * the requirement key; kind/tag breaches carry the child's path, whose last
 * step names the requirement.
 */
export function violatingRequirements(violations: ViolationInfo[]): Set<string> {
  const flagged = new Set<string>();
  for (const violation of violations) {
    if (violation.code === "CountViolation") {
      const req = violation.detail.split(" ", 1)[0];
      flagged.add(`${pathKey(violation.path)}::${req}`);
    } else if (
      (violation.code === "KindMismatch" || violation.code === "TagMismatch") &&
      violation.path.length > 0
    ) {
      const parent = violation.path.slice(0, -1);
      const req = violation.path[violation.path.length - 1][0];
      flagged.add(`${pathKey(parent)}::${req}`);
    }
  }
  return flagged;
}

/** Violations pinned to one node (for inline display next to it). */
export function violationsAt(violations: ViolationInfo[], path: TreePath): ViolationInfo[] {
  const key = pathKey(path);
  return violations.filter((v) => pathKey(v.path) === key);
}

export interface MatchSegment {
  text: string;
  highlight: boolean;
}

/** Split text into plain/highlighted segments for a case-insensitive query. */
export function searchSegments(text: string, query: string): MatchSegment[] {
  if (!query) return [{ text, highlight: false }];
  const segments: MatchSegment[] = [];
  const lower = text.toLowerCase();
  const needle = query.toLowerCase();
  let from = 0;
  while (true) {
    const hit = lower.indexOf(needle, from);
    if (hit < 0) break;
    if (hit > from) segments.push({ text: text.slice(from, hit), highlight: false });
    segments.push({ text: text.slice(hit, hit + needle.length), highlight: true });
    from = hit + needle.length;
  }
  if (from < text.length || segments.length === 0) {
    segments.push({ text: text.slice(from), highlight: false });
  }
  return segments;
}

/** Node-path keys that hold at least one search match, for tree highlighting. */
export function matchedPathKeys(matches: SearchMatchInfo[]): Set<string> {
  return new Set(matches.map((m) => pathKey(m.node_path)));
}

/**
 * Monotonic revision gate: accept a state only if it is not older than the
 * newest one already rendered, so a slow response can never roll the UI back.
 */
export class RevisionGate {
  private newest = -1;

  accept(revision: number): boolean {
    if (revision < this.newest) return false;
    this.newest = revision;
    return true;
  }
}

/** Raw input for PATCH; checkboxes send booleans, everything else strings. */
export function valueForPatch(widget: WidgetKind, element: { checked?: boolean; value?: string }): Scalar {
  if (widget === "checkbox") return Boolean(element.checked);
  return element.value ?? "";
}

/** Flatten the tree into (path, node) rows in render order. */
export function flattenTree(
  root: TreeNodeInfo | null,
): { path: TreePath; node: TreeNodeInfo }[] {
  const rows: { path: TreePath; node: TreeNodeInfo }[] = [];
  const walk = (node: TreeNodeInfo, path: TreePath) => {
    rows.push({ path, node });
    for (const req of node.requirements) {
      for (const child of node.children[req.key] ?? []) {
        walk(child, [...path, [req.key, child.index]]);
      }
    }
  };
  if (root) walk(root, []);
  return rows;
}
