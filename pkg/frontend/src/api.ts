/** Typed client for the /api/v1 service. Pure transport: every method maps
 * 1:1 to an endpoint and the UI waits for the server record before updating
 * anything (no optimistic state). */

import type {
  CreateSessionResponse,
  FixturesResponse,
  MutationResponse,
  StatePayload,
  WhatIfResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function parseError(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
    else if (body.detail !== undefined) detail = JSON.stringify(body.detail);
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, init);
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  listFixtures(): Promise<FixturesResponse> {
    return this.request<FixturesResponse>("/fixtures");
  }

  createSession(req: {
    fixture?: string;
    case_text?: string;
    seed?: number;
  }): Promise<CreateSessionResponse> {
    return this.post<CreateSessionResponse>("/sessions", req);
  }

  getState(sessionId: string): Promise<StatePayload> {
    return this.request<StatePayload>(`/sessions/${sessionId}/state`);
  }

  applyOutage(sessionId: string, branch: string): Promise<MutationResponse> {
    return this.post<MutationResponse>(`/sessions/${sessionId}/events`, {
      outage: branch,
    });
  }

  whatIf(sessionId: string, branch: string): Promise<WhatIfResponse> {
    return this.post<WhatIfResponse>(`/sessions/${sessionId}/what-if`, {
      outage: branch,
    });
  }

  remedial(
    sessionId: string,
    cut: string[],
    reduceByMw: number,
  ): Promise<MutationResponse> {
    return this.post<MutationResponse>(`/sessions/${sessionId}/remedial`, {
      cut,
      reduce_by_mw: reduceByMw,
    });
  }

  undo(sessionId: string): Promise<MutationResponse> {
    return this.post<MutationResponse>(`/sessions/${sessionId}/undo`);
  }
}
