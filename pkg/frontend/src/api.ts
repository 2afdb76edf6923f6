import type {
  BufferResponse,
  FeedbackResponse,
  SessionInfo,
  Sensitivity,
  Verdict,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  if (!res.ok) {
    let detail = `${res.status}`;
    try {
      const body = await res.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

function post<T>(url: string, body: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

/** Thin typed client for the recommendation service; no decision logic here. */
export class RecommendClient {
  constructor(private readonly baseUrl: string) {}

  health(): Promise<{ status: string; presets: string[] }> {
    return request(`${this.baseUrl}/health`);
  }

  createSession(sensitivity: Sensitivity): Promise<SessionInfo> {
    return post(`${this.baseUrl}/sessions`, { sensitivity });
  }

  submitBuffer(sessionId: string, text: string): Promise<BufferResponse> {
    return post(`${this.baseUrl}/sessions/${sessionId}/buffer`, { text });
  }

  setSensitivity(sessionId: string, level: Sensitivity): Promise<SessionInfo> {
    return post(`${this.baseUrl}/sessions/${sessionId}/sensitivity`, { level });
  }

  sendFeedback(
    sessionId: string,
    recommendationId: string,
    verdict: Verdict
  ): Promise<FeedbackResponse> {
    return post(`${this.baseUrl}/sessions/${sessionId}/feedback`, {
      recommendation_id: recommendationId,
      verdict,
    });
  }
}
