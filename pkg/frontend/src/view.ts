/**
 * Client-side session state.  A pure reducer over server messages: the view
 * renders only what the wire delivered and never infers hidden words.  Acked
 * submissions stay "pending" until the chronon that carried them closes.
 */

import { ServerMessage } from "./protocol.js";
import { isGroundTermText } from "./terms.js";

export type Phase = "connecting" | "joined" | "running" | "ended" | "error";

export interface PendingAction {
  switch: string;
  action: string;
}

export interface HistoryEntry {
  chronon: number;
  text: string;
}

export interface ClientView {
  phase: Phase;
  role: string | null;
  rules: string;
  facts: string[];
  accounts: Record<string, number>;
  chronon: number;
  deadlineMs: number;
  chrononOpenedAt: number | null;
  pending: PendingAction[];
  resolved: PendingAction[];
  history: HistoryEntry[];
  error: string | null;
}

export function emptyView(): ClientView {
  return {
    phase: "connecting",
    role: null,
    rules: "",
    facts: [],
    accounts: {},
    chronon: 0,
    deadlineMs: 0,
    chrononOpenedAt: null,
    pending: [],
    resolved: [],
    history: [],
    error: null,
  };
}

function note(view: ClientView, text: string): HistoryEntry[] {
  return [...view.history, { chronon: view.chronon, text }];
}

/** The submission the view is waiting on for a switch, if any. */
export function pendingFor(
  view: ClientView,
  switchText: string,
): PendingAction | undefined {
  return view.pending.find((p) => p.switch === switchText);
}

export function applyMessage(
  view: ClientView,
  message: ServerMessage,
  now: number = Date.now(),
): ClientView {
  switch (message.type) {
    case "joined":
      return { ...view, phase: "joined", role: message.role };

    case "rules":
      return { ...view, rules: message.source };

    case "init":
      return {
        ...view,
        facts: message.facts.filter(isGroundTermText),
        accounts: { ...message.accounts },
      };

    case "chronon":
      // a fresh chronon: whatever was pending has been resolved by now
      return {
        ...view,
        phase: "running",
        chronon: message.number,
        deadlineMs: message.deadline_ms,
        chrononOpenedAt: now,
        resolved: view.pending,
        pending: [],
        history: note(view, `chronon ${message.number} opened`),
      };

    case "ack": {
      // the client records the action alongside the act it sent; see recordAct
      return {
        ...view,
        history: note(view, `ack ${message.switch}`),
      };
    }

    case "reject": {
      const reason = message.detail
        ? `${message.reason} (${message.detail})`
        : message.reason;
      if (view.phase === "connecting") {
        return { ...view, phase: "error", error: reason };
      }
      return {
        ...view,
        pending: view.pending.filter((p) => p.switch !== message.switch),
        history: note(view, `reject ${message.switch}: ${reason}`),
      };
    }

    case "delta": {
      const deleted = new Set(message.deleted);
      const created = message.created.filter(isGroundTermText);
      const kept = view.facts.filter((f) => !deleted.has(f));
      return {
        ...view,
        facts: [...kept, ...created.filter((f) => !kept.includes(f))],
        history: note(
          view,
          `delta +[${message.created.join("; ")}] -[${message.deleted.join("; ")}]`,
        ),
      };
    }

    case "accounts":
      return { ...view, accounts: { ...message.accounts } };

    case "end":
      return {
        ...view,
        phase: "ended",
        accounts: { ...message.accounts },
        pending: [],
        history: note(view, "game over"),
      };
  }
}

/**
 * Remember an acked submission as pending.  A second ack for the same switch
 * replaces the first: last valid submission wins, exactly like the server.
 */
export function recordAck(
  view: ClientView,
  switchText: string,
  actionText: string,
): ClientView {
  return {
    ...view,
    pending: [
      ...view.pending.filter((p) => p.switch !== switchText),
      { switch: switchText, action: actionText },
    ],
  };
}
