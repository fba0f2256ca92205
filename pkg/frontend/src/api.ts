/** Thin typed client over the server API. */

import type {
  AutocompleteResponse,
  CandidateListResponse,
  DetailResponse,
  JobsResponse,
} from "./types.js";
import type { ViewState } from "./state.js";

export class ApiRequestError extends Error {
  constructor(public code: string, message: string, public status: number) {
    super(message);
  }
}

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  const body = await response.json();
  if (!response.ok) {
    throw new ApiRequestError(body.code ?? "error", body.message ?? "request failed", response.status);
  }
  return body as T;
}

export function candidatesQuery(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("job", state.jobId ?? "");
  if (state.minYears.trim() !== "") params.set("min_years", state.minYears.trim());
  if (state.degrees.size > 0) params.set("degrees", [...state.degrees].sort().join(","));
  params.set("sort", state.sort);
  return `/api/candidates?${params.toString()}`;
}

export function fetchCandidates(state: ViewState): Promise<CandidateListResponse> {
  return getJson<CandidateListResponse>(candidatesQuery(state));
}

export function fetchDetail(candidateId: string, jobId: string): Promise<DetailResponse> {
  const params = new URLSearchParams({ job: jobId });
  return getJson<DetailResponse>(`/api/candidates/${encodeURIComponent(candidateId)}?${params}`);
}

export function fetchJobs(): Promise<JobsResponse> {
  return getJson<JobsResponse>("/api/jobs");
}

export function fetchAutocomplete(prefix: string, k = 8): Promise<AutocompleteResponse> {
  const params = new URLSearchParams({ q: prefix, k: String(k) });
  return getJson<AutocompleteResponse>(`/api/skills/autocomplete?${params}`);
}

export async function putBookmark(candidateId: string, bookmarked: boolean): Promise<boolean> {
  const response = await fetch(`/api/candidates/${encodeURIComponent(candidateId)}/bookmark`, {
    method: "PUT",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ bookmarked }),
  });
  const body = await response.json();
  if (!response.ok) {
    throw new ApiRequestError(body.code ?? "error", body.message ?? "request failed", response.status);
  }
  return body.bookmarked as boolean;
}
