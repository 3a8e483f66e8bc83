/**
 * Thin client for the collection service HTTP API. The annotator token is
 * entered once and sent as a header on every call; the server derives the
 * annotator identity from it.
 */

import { PublicTask, RatingRecordBody } from "./types.js";

export type SubmitOutcome = "recorded" | "conflict";

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = { "X-Annotator-Token": this.token };
    if (json) {
      headers["Content-Type"] = "application/json";
    }
    return headers;
  }

  /** Next task for this annotator, or null when every task is done. */
  async nextTask(): Promise<PublicTask | null> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/tasks/next`, {
      headers: this.headers(),
    });
    if (response.status === 204) {
      return null;
    }
    if (!response.ok) {
      throw new ApiError(await errorText(response), response.status);
    }
    return (await response.json()) as PublicTask;
  }

  /**
   * Submit one finished record. A 409 (lost lease or already submitted,
   * e.g. from another tab) is reported as "conflict" so the caller can
   * notify and re-fetch; validation problems throw.
   */
  async submit(record: RatingRecordBody): Promise<SubmitOutcome> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/ratings`, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(record),
    });
    if (response.status === 201) {
      return "recorded";
    }
    if (response.status === 409) {
      return "conflict";
    }
    throw new ApiError(await errorText(response), response.status);
  }

  async report(): Promise<unknown> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/report`, {
      headers: this.headers(),
    });
    if (!response.ok) {
      throw new ApiError(await errorText(response), response.status);
    }
    return response.json();
  }
}

async function errorText(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { error?: string };
    return body.error ?? `request failed with ${response.status}`;
  } catch {
    return `request failed with ${response.status}`;
  }
}
