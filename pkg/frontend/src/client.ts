/**
 * Thin HTTP client over the portal endpoints. No inference happens here:
 * the server owns visibility, widget choice and recommendations.
 */

export interface SessionInfo {
  id: string;
  instance: string;
  ontology: string;
}

export interface PortalErrorBody {
  category: string;
  message: string;
  location?: { line: number; col: number };
}

export class PortalRequestError extends Error {
  constructor(public status: number, public body: PortalErrorBody) {
    super(`${body.category}: ${body.message}`);
  }
}

export type ValueLiteral = string | number | boolean;

async function errorBody(response: Response): Promise<PortalErrorBody> {
  try {
    const payload = (await response.json()) as PortalErrorBody;
    if (typeof payload.category === "string" && typeof payload.message === "string") return payload;
  } catch {
    // not JSON: fall through
  }
  return { category: "http-error", message: `unexpected status ${response.status}` };
}

export class PortalClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw new PortalRequestError(response.status, await errorBody(response));
    }
    return response;
  }

  async createSession(ontology: string, initialClass?: string): Promise<SessionInfo> {
    const body: Record<string, string> = { ontology };
    if (initialClass) body["initial_class"] = initialClass;
    const response = await this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await response.json()) as SessionInfo;
  }

  async getFormXml(sessionId: string): Promise<string> {
    const response = await this.request(`/sessions/${sessionId}/form`);
    return response.text();
  }

  /** POST one value; resolves to the new form XML (the full replacement). */
  async postValue(sessionId: string, property: string, value: ValueLiteral): Promise<string> {
    const response = await this.request(`/sessions/${sessionId}/values`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ property, value }),
    });
    return response.text();
  }

  async getRecommendations(sessionId: string): Promise<string[][]> {
    const response = await this.request(`/sessions/${sessionId}/recommendations`);
    return (await response.json()) as string[][];
  }
}
