// Thin typed client for the kda service.

import type { CaptureEvent } from "./capture.js";

export interface EnrollResponse {
  account_id: string;
  status: "collecting" | "enrolled";
  samples_so_far: number;
  samples_needed: number;
}

export interface VerifyResponse {
  account_id: string;
  accepted: boolean;
  score: number;
  threshold: number;
}

export interface HealthResponse {
  status: string;
  accounts: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

// FastAPI sends detail either as a plain string or as a list of
// {field, message} objects for body validation failures
function describeDetail(detail: unknown): string {
  if (typeof detail === "string") return detail;
  if (Array.isArray(detail)) {
    return detail
      .map((d) => {
        if (d && typeof d === "object" && "field" in d && "message" in d) {
          return `${(d as { field: unknown }).field}: ${(d as { message: unknown }).message}`;
        }
        return JSON.stringify(d);
      })
      .join("; ");
  }
  return JSON.stringify(detail);
}

async function postJson<T>(url: string, body: unknown): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch {
    throw new ApiError(0, `service unreachable at ${url}`);
  }
  if (!response.ok) {
    let message = `${response.status} ${response.statusText}`;
    try {
      const payload = (await response.json()) as { detail?: unknown };
      if (payload.detail !== undefined) message = describeDetail(payload.detail);
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(response.status, message);
  }
  return (await response.json()) as T;
}

function entryBody(accountId: string, events: CaptureEvent[]) {
  return {
    account_id: accountId,
    events: events.map((e) => ({
      key: e.key,
      press_ms: e.press_ms,
      release_ms: e.release_ms,
    })),
  };
}

export function enrollEntry(
  base: string,
  accountId: string,
  events: CaptureEvent[],
): Promise<EnrollResponse> {
  return postJson<EnrollResponse>(`${base}/enroll`, entryBody(accountId, events));
}

export function verifyEntry(
  base: string,
  accountId: string,
  events: CaptureEvent[],
): Promise<VerifyResponse> {
  return postJson<VerifyResponse>(`${base}/verify`, entryBody(accountId, events));
}

export async function health(base: string): Promise<HealthResponse> {
  let response: Response;
  try {
    response = await fetch(`${base}/health`);
  } catch {
    throw new ApiError(0, `service unreachable at ${base}/health`);
  }
  if (!response.ok) throw new ApiError(response.status, response.statusText);
  return (await response.json()) as HealthResponse;
}
