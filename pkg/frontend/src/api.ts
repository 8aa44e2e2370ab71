import { DiffReportJson, LlmExchange, SchemaEnvelope } from "./types.js";

// Thin client for the schema service; the UI never mutates schemata
// locally, every change round-trips through these calls.

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`HTTP ${status}: ${JSON.stringify(detail)}`);
  }
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = await response.json().catch(() => null);
    if (!response.ok) throw new ApiError(response.status, data?.detail ?? data);
    return data as T;
  }

  uploadYaml(yaml: string): Promise<SchemaEnvelope> {
    return this.request("POST", "/api/schema", { yaml });
  }

  fetchSchema(id: string): Promise<SchemaEnvelope> {
    return this.request("GET", `/api/schema/${id}`);
  }

  applyOps(
    id: string,
    version: number,
    ops: { kind: string; params: Record<string, unknown> }[],
  ): Promise<SchemaEnvelope> {
    return this.request("POST", `/api/schema/${id}/ops`, { version, ops });
  }

  llmStep(id: string, version: number, step: string, statement?: string): Promise<LlmExchange> {
    return this.request("POST", `/api/schema/${id}/llm/step`, { version, step, statement });
  }

  llmFix(id: string, version: number, fixText: string): Promise<LlmExchange> {
    return this.request("POST", `/api/schema/${id}/llm/fix`, { version, fix_text: fixText });
  }

  llmAccept(id: string, version: number): Promise<SchemaEnvelope> {
    return this.request("POST", `/api/schema/${id}/llm/accept`, { version });
  }

  diff(candidateId: string, truthId: string): Promise<{ report: DiffReportJson }> {
    return this.request("GET", `/api/diff?c=${candidateId}&t=${truthId}`);
  }

  transcript(id: string): Promise<{ records: Record<string, unknown>[] }> {
    return this.request("GET", `/api/session/${id}/transcript`);
  }
}
