/** Thin fetch client for the session service; all state lives server-side. */

import type {
  CooccurrencePayload,
  EditOpJson,
  EditResponse,
  ErrorEnvelope,
  InferResponse,
  SchemaPayload,
  SessionCreated,
  StatsPayload,
  TargetSpecJson,
  ValidationPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly envelope: ErrorEnvelope,
  ) {
    super(envelope.message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let envelope: ErrorEnvelope;
    try {
      envelope = (await response.json()) as ErrorEnvelope;
    } catch {
      envelope = { code: "unknown", message: response.statusText };
    }
    throw new ApiError(response.status, envelope);
  }
  return (await response.json()) as T;
}

export class SessionClient {
  constructor(
    readonly base: string = "",
    public sessionId: string | null = null,
  ) {}

  private path(suffix: string): string {
    if (!this.sessionId) throw new Error("no active session");
    return `${this.base}/sessions/${this.sessionId}${suffix}`;
  }

  async createSession(body: {
    graph_path?: string;
    graph_content?: string;
    graph_format?: string;
    document?: unknown;
  }): Promise<SessionCreated> {
    const created = await request<SessionCreated>(`${this.base}/sessions`, {
      method: "POST",
      body: JSON.stringify(body),
    });
    this.sessionId = created.session_id;
    return created;
  }

  schema(): Promise<SchemaPayload> {
    return request(this.path("/schema"));
  }

  applyEdit(op: EditOpJson): Promise<EditResponse> {
    return request(this.path("/edits"), { method: "POST", body: JSON.stringify(op) });
  }

  infer(body: {
    label: string;
    mode?: string;
    target: TargetSpecJson;
    pattern?: string;
    config?: { error_rate?: string; neighbour_error_rate?: string };
  }): Promise<InferResponse> {
    return request(this.path("/infer"), { method: "POST", body: JSON.stringify(body) });
  }

  validation(): Promise<ValidationPayload> {
    return request(this.path("/validation"));
  }

  stats(label: string, predicate?: string): Promise<StatsPayload> {
    const query = predicate ? `?predicate=${encodeURIComponent(predicate)}` : "";
    return request(this.path(`/stats/${encodeURIComponent(label)}${query}`));
  }

  cooccurrence(label: string): Promise<CooccurrencePayload> {
    return request(this.path(`/stats/${encodeURIComponent(label)}/cooccurrence`));
  }

  async exportText(format: "shex" | "shacl", choice: "xone" | "or" = "xone"): Promise<string> {
    const response = await fetch(
      this.path(`/export?format=${format}&choice=${choice}`),
    );
    if (!response.ok) {
      throw new ApiError(response.status, (await response.json()) as ErrorEnvelope);
    }
    return response.text();
  }

  save(): Promise<unknown> {
    return request(this.path(""), { method: "PUT" });
  }
}
