// Thin typed client for the rental-harmony session API.  The UI never
// computes division logic; every number it shows comes from these responses.

export interface PriceVector {
  rationals: string[];
  decimals: string[];
}

export interface PendingQuery {
  agent: number;
  prices: PriceVector;
}

export interface Certificate {
  prices: string[];
  prices_decimal: string[];
  assignment: number[];
  envy_gaps: number[];
  queries: number;
}

export interface AnswerRecord {
  agent: number;
  prices: string[];
  rooms: number[];
}

export interface SessionState {
  id: string;
  n: number;
  room_names: string[];
  mode: string;
  state: string;
  answers: AnswerRecord[];
  pending_query: PendingQuery | null;
  result: Certificate | null;
  error: string | null;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class HarmonyClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (res.status >= 400) {
      let detail = res.statusText;
      try {
        detail = (await res.json()).detail ?? detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(res.status, detail);
    }
    return res;
  }

  async createSession(
    n: number,
    mode = "interactive",
    roomNames?: string[],
  ): Promise<string> {
    const res = await this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ n, mode, room_names: roomNames }),
    });
    return (await res.json()).id;
  }

  async getSession(id: string): Promise<SessionState> {
    return (await this.request(`/sessions/${id}`)).json();
  }

  /** Pending query, or null when the solver is not waiting (204). */
  async getQuery(id: string): Promise<PendingQuery | null> {
    const res = await this.request(`/sessions/${id}/query`);
    if (res.status === 204) return null;
    return res.json();
  }

  async answer(
    id: string,
    agent: number,
    room: number | number[],
  ): Promise<{ status: string; state: string }> {
    const res = await this.request(`/sessions/${id}/answer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ agent, room }),
    });
    return res.json();
  }

  async getResult(id: string): Promise<Certificate | null> {
    try {
      return await (await this.request(`/sessions/${id}/result`)).json();
    } catch (e) {
      if (e instanceof ApiError && e.status === 404) return null;
      throw e;
    }
  }
}
