// Thin typed client for the backend. Every mutation carries the revision
// the caller last saw; the server answers 409 when it is stale.

import type {
  ApiError,
  RegistryInfo,
  RunEvent,
  Scalar,
  SearchMatchInfo,
  SessionState,
  TreePath,
} from "./types.js";

const BASE = "/api/v1";

async function request<T>(method: string, url: string, body?: unknown): Promise<T> {
  const response = await fetch(BASE + url, {
    method,
    headers: body === undefined ? undefined : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  if (!response.ok) {
    let detail = response.statusText;
    let violations = [];
    try {
      const data = await response.json();
      detail = data.detail ?? detail;
      violations = data.violations ?? [];
    } catch {
      // non-JSON error body; keep the status text
    }
    throw { status: response.status, detail, violations } satisfies ApiError;
  }
  return (await response.json()) as T;
}

export const api = {
  registry: () => request<RegistryInfo>("GET", "/registry"),
  tree: () => request<SessionState>("GET", "/tree"),
  validate: () => request<SessionState>("POST", "/validate"),

  addChild: (path: TreePath, reqKey: string, className: string, revision: number) =>
    request<SessionState>("POST", "/tree/children", {
      path,
      req_key: reqKey,
      class_name: className,
      revision,
    }),

  removeChild: (path: TreePath, revision: number) =>
    request<SessionState>("DELETE", "/tree/children", { path, revision }),

  setArg: (path: TreePath, argName: string, value: Scalar, revision: number) =>
    request<SessionState>("PATCH", "/tree/args", {
      path,
      arg_name: argName,
      value,
      revision,
    }),

  reset: (revision: number) => request<SessionState>("POST", "/reset", { revision }),

  search: async (q: string) => {
    const response = await fetch(`${BASE}/search?q=${encodeURIComponent(q)}`);
    const data = await response.json();
    return data.matches as SearchMatchInfo[];
  },

  save: (scopePath: TreePath | null) =>
    request<{ config: Record<string, Scalar> }>("POST", "/save", {
      scope_path: scopePath,
    }),

  load: (config: Record<string, Scalar>, graftPath: TreePath | null, revision: number) =>
    request<SessionState>("POST", "/load", {
      config,
      graft_path: graftPath,
      revision,
    }),

  generate: () => request<{ config: Record<string, Scalar> }>("POST", "/generate"),

  dot: async () => (await fetch(`${BASE}/dot`)).text(),

  /** POST /run, feeding each NDJSON event to the callback as it arrives. */
  run: async (onEvent: (event: RunEvent) => void): Promise<void> => {
    const response = await fetch(`${BASE}/run`, { method: "POST" });
    if (!response.ok) {
      const data = await response.json();
      throw {
        status: response.status,
        detail: data.detail ?? "run refused",
        violations: data.violations ?? [],
      } satisfies ApiError;
    }
    const reader = response.body!.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    while (true) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let newline;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline).trim();
        buffer = buffer.slice(newline + 1);
        if (line) onEvent(JSON.parse(line) as RunEvent);
      }
    }
    if (buffer.trim()) onEvent(JSON.parse(buffer) as RunEvent);
  },
};
