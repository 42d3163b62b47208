// Typed client for the analysis service. All state shown in the UI comes
// from these endpoints; nothing is computed client-side.

import type {
  AnalysisOutcome,
  AnalysisResponse,
  AnalysisSummary,
  ApiErrorBody,
  HistogramResponse,
  JobAccepted,
  LineageEntry,
  RescoreResponse,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: unknown;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.detail = body.detail;
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl: FetchLike = fetch) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    return this.decode<T>(response);
  }

  private async decode<T>(response: Response): Promise<T> {
    if (!response.ok && response.status !== 202) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { code: "Internal", message: `HTTP ${response.status}` };
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  async analyzeText(title: string, text: string): Promise<AnalysisOutcome> {
    const response = await this.fetchImpl(`${this.baseUrl}/analyses`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ title, text }),
    });
    if (response.status === 202) {
      return { kind: "accepted", job: (await response.json()) as JobAccepted };
    }
    return { kind: "done", result: await this.decode<AnalysisResponse>(response) };
  }

  async analyzeFile(filename: string, data: Blob, title?: string): Promise<AnalysisOutcome> {
    const form = new FormData();
    form.append("file", data, filename);
    if (title) form.append("title", title);
    const response = await this.fetchImpl(`${this.baseUrl}/analyses`, {
      method: "POST",
      body: form,
    });
    if (response.status === 202) {
      return { kind: "accepted", job: (await response.json()) as JobAccepted };
    }
    return { kind: "done", result: await this.decode<AnalysisResponse>(response) };
  }

  async pollJob(
    job: JobAccepted,
    options: { intervalMs?: number; timeoutMs?: number } = {},
  ): Promise<AnalysisResponse> {
    const interval = options.intervalMs ?? 500;
    const deadline = Date.now() + (options.timeoutMs ?? 120_000);
    for (;;) {
      const response = await this.fetchImpl(`${this.baseUrl}${job.poll_url}`);
      if (response.status === 200) {
        return (await response.json()) as AnalysisResponse;
      }
      if (response.status !== 202) {
        return this.decode<AnalysisResponse>(response);
      }
      if (Date.now() > deadline) {
        throw new ApiError(408, { code: "Internal", message: "analysis job timed out" });
      }
      await new Promise((resolve) => setTimeout(resolve, interval));
    }
  }

  getAnalysis(id: string): Promise<AnalysisResponse> {
    return this.request(`/analyses/${encodeURIComponent(id)}`);
  }

  async listAnalyses(): Promise<AnalysisSummary[]> {
    const body = await this.request<{ analyses: AnalysisSummary[] }>("/analyses");
    return body.analyses;
  }

  async getLineage(id: string): Promise<LineageEntry[]> {
    const body = await this.request<{ chain: LineageEntry[] }>(
      `/analyses/${encodeURIComponent(id)}/lineage`,
    );
    return body.chain;
  }

  rescore(id: string, questionIndex: number, newText: string): Promise<RescoreResponse> {
    return this.request(`/analyses/${encodeURIComponent(id)}/rescore`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ question_index: questionIndex, new_text: newText }),
    });
  }

  histogram(): Promise<HistogramResponse> {
    return this.request("/corpus/histogram");
  }
}
