/**
 * One socket, one role.  Wraps a WebSocket-shaped transport so tests can
 * drive the client with scripted message sequences.
 */

import { ActMessage, ClientMessage, parseServerMessage } from "./protocol.js";
import { ClientView, applyMessage, emptyView, recordAck } from "./view.js";

export interface WireSocket {
  send(data: string): void;
  close(): void;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((event: unknown) => void) | null;
}

export type SocketFactory = (url: string) => WireSocket;

export interface GameClientOptions {
  serverUrl: string;
  sessionId: string;
  socketFactory?: SocketFactory;
  onChange?: (view: ClientView) => void;
  now?: () => number;
}

export function sessionSocketUrl(serverUrl: string, sessionId: string): string {
  const base = serverUrl.replace(/^http/, "ws").replace(/\/+$/, "");
  return `${base}/session/${sessionId}`;
}

export class GameClient {
  private socket: WireSocket;
  private readonly onChange: (view: ClientView) => void;
  private readonly now: () => number;
  private lastAct: ActMessage | null = null;
  view: ClientView = emptyView();

  constructor(options: GameClientOptions) {
    const factory =
      options.socketFactory ??
      ((url: string) => new WebSocket(url) as unknown as WireSocket);
    this.onChange = options.onChange ?? (() => undefined);
    this.now = options.now ?? Date.now;
    this.socket = factory(sessionSocketUrl(options.serverUrl, options.sessionId));
    this.socket.onmessage = (event) => this.receive(event.data);
    this.socket.onclose = () => this.handleClose();
    this.socket.onerror = () => this.handleClose();
  }

  private update(view: ClientView): void {
    this.view = view;
    this.onChange(view);
  }

  private receive(raw: string): void {
    const message = parseServerMessage(raw);
    if (message === null) return; // ignore frames we do not understand
    let view = applyMessage(this.view, message, this.now());
    if (message.type === "ack" && this.lastAct !== null &&
        this.lastAct.switch === message.switch) {
      view = recordAck(view, this.lastAct.switch, this.lastAct.action);
    }
    this.update(view);
  }

  private handleClose(): void {
    if (this.view.phase !== "ended" && this.view.phase !== "error") {
      this.update({
        ...this.view,
        phase: "error",
        error: "connection lost",
      });
    }
  }

  private send(message: ClientMessage): void {
    this.socket.send(JSON.stringify(message));
  }

  join(role: string): void {
    this.send({ type: "join", role });
  }

  act(switchText: string, actionText: string): void {
    this.lastAct = { type: "act", switch: switchText, action: actionText };
    this.send(this.lastAct);
  }

  close(): void {
    this.socket.close();
  }
}
