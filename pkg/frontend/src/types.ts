// Wire types mirroring the backend's /api/v1 JSON payloads.

export type Scalar = boolean | number | string;
export type TreePath = [string, number][];

export interface ArgumentInfo {
  name: string;
  kind: "string" | "integer" | "real" | "boolean";
  default: Scalar;
  help: string;
  choices: string[];
}

export interface RequirementInfo {
  key: string;
  kind: string;
  tags: Record<string, boolean | string>;
  count_min: number;
  count_max: number | null; // null: unbounded
}

export interface DescriptorInfo {
  name: string;
  kind: string;
  tags: Record<string, boolean | string>;
  help: string;
  source: string;
  arguments: ArgumentInfo[];
  child_requirements: RequirementInfo[];
}

export interface RegistryInfo {
  descriptors: DescriptorInfo[];
  missing: Record<string, string>;
}

export interface ViolationInfo {
  code: string;
  path: TreePath;
  detail: string;
}

export interface TreeNodeInfo {
  name: string;
  kind: string;
  req_key: string;
  index: number;
  values: Record<string, Scalar>;
  requirements: RequirementInfo[];
  children: Record<string, TreeNodeInfo[]>;
}

export interface SessionState {
  revision: number;
  entry_req: string;
  entry_kind: string;
  root: TreeNodeInfo | null;
  violations: ViolationInfo[];
}

export interface SearchMatchInfo {
  node_path: TreePath;
  field: "module_name" | "arg_name" | "arg_value";
  matched_text: string;
}

export type RunEvent =
  | { event: "log"; line: string }
  | {
      event: "report";
      epochs_run: number;
      final_loss: number;
      checkpoint_path: string;
      structure_overview: string;
    }
  | { event: "error"; detail: string };

export interface ApiError {
  status: number;
  detail: string;
  violations: ViolationInfo[];
}
