// Typed client for the refactoring service. The UI never manipulates the
// AST: every payload is pretty-printed text plus a span map.

export interface Span {
  loc: string;
  start: number;
  end: number;
}

export interface Rendering {
  text: string;
  spans: Span[];
  focus: string | null;
}

export interface SessionOpened extends Rendering {
  sessionId: string;
  diagnostics: Diagnostic[];
}

export interface Diagnostic {
  code: string;
  message: string;
  line: number;
  column: number;
}

export interface Todo {
  fun: string;
  equation: number;
  path: number[];
  loc: string;
}

export interface ApplyResult extends Rendering {
  changed: string[];
  todos: Todo[];
}

export interface OpTemplate {
  op: string;
  args: Record<string, string>;
  line: string;
}

export interface OpsResponse {
  ops: OpTemplate[];
  declaredTypes: string[];
  focus: string | null;
}

export interface Refusal {
  code: string;
  detail: string;
  locations: string[];
  step?: number;
}

export interface FoldPayload {
  range: string;
  typeName: string;
  kind: "type" | "newtype" | "data";
  consName?: string;
  introduce?: boolean;
}

export class RefusalError extends Error {
  constructor(readonly refusal: Refusal) {
    super(`${refusal.code}: ${refusal.detail}`);
  }
}

export class ServiceError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`service error ${status}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const payload = await response.json().catch(() => ({}));
    if (response.status === 409) {
      throw new RefusalError(payload as Refusal);
    }
    if (!response.ok) {
      const detail =
        typeof payload === "object" && payload !== null && "detail" in payload
          ? String((payload as { detail: unknown }).detail)
          : JSON.stringify(payload);
      throw new ServiceError(response.status, detail);
    }
    return payload as T;
  }

  openSession(source: string): Promise<SessionOpened> {
    return this.request("POST", "/session", { source });
  }

  getSource(sessionId: string): Promise<Rendering> {
    return this.request("GET", `/session/${sessionId}/source`);
  }

  setFocus(sessionId: string, selector: string | null): Promise<Rendering> {
    return this.request("POST", `/session/${sessionId}/focus`, { selector });
  }

  getOps(sessionId: string): Promise<OpsResponse> {
    return this.request("GET", `/session/${sessionId}/ops`);
  }

  apply(sessionId: string, invocation: string): Promise<ApplyResult> {
    return this.request("POST", `/session/${sessionId}/apply`, { opInvocation: invocation });
  }

  fold(sessionId: string, payload: FoldPayload): Promise<ApplyResult> {
    return this.request("POST", `/session/${sessionId}/fold`, payload);
  }

  getTodos(sessionId: string): Promise<{ todos: Todo[] }> {
    return this.request("GET", `/session/${sessionId}/todos`);
  }

  getHistory(sessionId: string): Promise<{ history: string[] }> {
    return this.request("GET", `/session/${sessionId}/history`);
  }

  undo(sessionId: string): Promise<Rendering> {
    return this.request("POST", `/session/${sessionId}/undo`);
  }

  occurrences(sessionId: string, equalsType: string): Promise<{ selectors: string[] }> {
    const q = new URLSearchParams({ equalsType });
    return this.request("GET", `/session/${sessionId}/occurrences?${q.toString()}`);
  }
}
