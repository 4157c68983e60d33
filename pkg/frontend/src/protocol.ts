/**
 * Wire protocol shared with the game server.  All terms travel as canonical
 * text; the client never parses game rules, only renders what it receives.
 */

export interface JoinedMessage {
  type: "joined";
  role: string;
}

export interface RulesMessage {
  type: "rules";
  source: string;
}

export interface InitMessage {
  type: "init";
  facts: string[];
  accounts: Record<string, number>;
}

export interface ChrononMessage {
  type: "chronon";
  number: number;
  deadline_ms: number;
}

export interface AckMessage {
  type: "ack";
  switch: string;
}

export interface RejectMessage {
  type: "reject";
  switch: string;
  reason: string;
  detail?: string;
}

export interface DeltaMessage {
  type: "delta";
  created: string[];
  deleted: string[];
}

export interface AccountsMessage {
  type: "accounts";
  accounts: Record<string, number>;
}

export interface EndMessage {
  type: "end";
  accounts: Record<string, number>;
}

export type ServerMessage =
  | JoinedMessage
  | RulesMessage
  | InitMessage
  | ChrononMessage
  | AckMessage
  | RejectMessage
  | DeltaMessage
  | AccountsMessage
  | EndMessage;

export interface JoinMessage {
  type: "join";
  role: string;
}

export interface ActMessage {
  type: "act";
  switch: string;
  action: string;
}

export type ClientMessage = JoinMessage | ActMessage;

const SERVER_TYPES = new Set([
  "joined", "rules", "init", "chronon", "ack", "reject",
  "delta", "accounts", "end",
]);

/** Parse one frame off the socket; null for anything malformed or unknown. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const type = (data as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) return null;
  return data as ServerMessage;
}
