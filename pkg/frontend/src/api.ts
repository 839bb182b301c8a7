// Thin typed client over the /v1 endpoints. All writes await server
// acknowledgment; callers reconcile local state from the response.

import type {
  ApiErrorBody,
  DashboardResponse,
  EvidenceResponse,
  HypothesesResponse,
  SessionResponse,
  VoteDirection,
  VoteResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let parsed: ApiErrorBody = { code: 'error', message: resp.statusText };
      try {
        parsed = (await resp.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, parsed.code, parsed.message);
    }
    return (await resp.json()) as T;
  }

  async openSession(userId: string): Promise<SessionResponse> {
    const session = await this.request<SessionResponse>('POST', '/v1/sessions', { user_id: userId });
    this.token = session.token;
    return session;
  }

  listHypotheses(params: { q?: string; sort?: string } = {}): Promise<HypothesesResponse> {
    const query = new URLSearchParams();
    if (params.q) query.set('q', params.q);
    if (params.sort) query.set('sort', params.sort);
    const suffix = query.toString() ? `?${query}` : '';
    return this.request('GET', `/v1/hypotheses${suffix}`);
  }

  castVote(hypothesisId: string, direction: VoteDirection): Promise<VoteResponse> {
    return this.request('POST', `/v1/hypotheses/${hypothesisId}/votes`, { direction });
  }

  submitEvidence(
    hypothesisId: string,
    body: { url: string; argument_text: string; argument_kind: string; polarity: string; tier: number },
  ): Promise<EvidenceResponse> {
    return this.request('POST', `/v1/hypotheses/${hypothesisId}/evidence`, body);
  }

  dashboard(thetaBelief: number, thetaEvidence: number, sort = 'recency'): Promise<DashboardResponse> {
    const query = new URLSearchParams({
      theta_b: String(thetaBelief),
      theta_e: String(thetaEvidence),
      sort,
    });
    return this.request('GET', `/v1/dashboard?${query}`);
  }
}
