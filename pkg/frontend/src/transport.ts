/**
 * Socket plumbing: a thin Transport interface so the session model can be
 * test-driven with a fake, plus the WebSocket implementation with
 * auto-reconnect used in the browser (and under node with the `ws`
 * package's constructor injected).
 */

export interface Transport {
  send(text: string): void;
  close(): void;
  onMessage(fn: (text: string) => void): void;
  onOpen(fn: () => void): void;
  onClose(fn: () => void): void;
}

/** The subset of the WebSocket API the transport needs. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: string, listener: (event: any) => void): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface WebSocketTransportOptions {
  /** Injectable constructor; defaults to the global WebSocket (browser). */
  factory?: SocketFactory;
  /** Delay before reconnecting after an unexpected close; 0 disables. */
  reconnectMs?: number;
}

export class WebSocketTransport implements Transport {
  private url: string;
  private factory: SocketFactory;
  private reconnectMs: number;
  private socket: SocketLike | null = null;
  private closed = false;
  private messageHandlers: ((text: string) => void)[] = [];
  private openHandlers: (() => void)[] = [];
  private closeHandlers: (() => void)[] = [];

  constructor(url: string, options: WebSocketTransportOptions = {}) {
    this.url = url;
    this.factory =
      options.factory ??
      ((u: string) => new (globalThis as any).WebSocket(u) as SocketLike);
    this.reconnectMs = options.reconnectMs ?? 1000;
    this.connect();
  }

  private connect(): void {
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.addEventListener("open", () => {
      for (const fn of this.openHandlers) fn();
    });
    socket.addEventListener("message", (event: any) => {
      const text = typeof event.data === "string" ? event.data : String(event.data);
      for (const fn of this.messageHandlers) fn(text);
    });
    socket.addEventListener("close", () => {
      for (const fn of this.closeHandlers) fn();
      if (!this.closed && this.reconnectMs > 0) {
        setTimeout(() => {
          if (!this.closed) this.connect();
        }, this.reconnectMs);
      }
    });
  }

  send(text: string): void {
    this.socket?.send(text);
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }

  onMessage(fn: (text: string) => void): void {
    this.messageHandlers.push(fn);
  }

  onOpen(fn: () => void): void {
    this.openHandlers.push(fn);
  }

  onClose(fn: () => void): void {
    this.closeHandlers.push(fn);
  }
}
