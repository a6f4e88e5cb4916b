/**
 * Typed client for the game service. Server errors surface verbatim as
 * ApiError with the stable machine-readable code ("NotNested", "WrongTurn",
 * "UnknownPreset", ...); network failures become code "ConnectionFailed".
 */

export interface ServerMove {
  round: number;
  player: "P1" | "P2";
  center: string[];
  radius: string;
  note: Record<string, string>;
}

export interface ServerSpace {
  kind: string;
  dim: number;
  region: "all" | string[][];
}

export interface ServerState {
  id: string;
  preset: string;
  human_role: "P1" | "P2";
  rounds: number;
  status: "open" | "finished";
  turn: "human" | "machine" | "finished";
  space: ServerSpace;
  moves: ServerMove[];
  /** recurrence sessions: the open set E, one [c1..cn, radius] per ball */
  e_arcs?: string[][];
  /** recurrence sessions: human-readable system descriptor */
  system?: string;
}

export interface MoveResponse {
  accepted: ServerMove;
  reply: ServerMove | null;
  state: ServerState;
}

export interface SessionConfig {
  preset: string;
  rounds?: number;
  human_role?: "P1" | "P2";
  system?: string;
  open_set?: string;
  presentation?: string;
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function request(
  base: string,
  method: "GET" | "POST",
  path: string,
  body?: unknown,
): Promise<Response> {
  let response: Response;
  try {
    response = await fetch(`${base}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  } catch (err) {
    throw new ApiError("ConnectionFailed", `service unreachable at ${base}`, 0);
  }
  if (!response.ok) {
    let code = "HttpError";
    let message = `${response.status}`;
    try {
      const payload = (await response.json()) as {
        error?: { code?: string; message?: string };
      };
      code = payload.error?.code ?? code;
      message = payload.error?.message ?? message;
    } catch {
      // non-JSON error body: keep the generic code
    }
    throw new ApiError(code, message, response.status);
  }
  return response;
}

export async function fetchPresets(base: string): Promise<Record<string, string>> {
  const response = await request(base, "GET", "/presets");
  const payload = (await response.json()) as { presets: Record<string, string> };
  return payload.presets;
}

export async function createSession(
  base: string,
  config: SessionConfig,
): Promise<ServerState> {
  const response = await request(base, "POST", "/sessions", config);
  return (await response.json()) as ServerState;
}

export async function fetchState(base: string, id: string): Promise<ServerState> {
  const response = await request(base, "GET", `/sessions/${id}`);
  return (await response.json()) as ServerState;
}

export async function postMove(
  base: string,
  id: string,
  center: string[],
  radius: string,
): Promise<MoveResponse> {
  const response = await request(base, "POST", `/sessions/${id}/moves`, {
    center,
    radius,
  });
  return (await response.json()) as MoveResponse;
}

export async function fetchCertificate(base: string, id: string): Promise<string> {
  const response = await request(base, "GET", `/sessions/${id}/certificate`);
  return await response.text();
}

export async function fetchTranscript(base: string, id: string): Promise<string> {
  const response = await request(base, "GET", `/sessions/${id}/transcript`);
  return await response.text();
}
