/**
 * Session model: the single source of UI state.
 *
 * Everything displayed originates from protocol messages; the model
 * computes nothing semantic. It correlates requests with responses,
 * folds pushes into the latest-known state, keeps an auditable event log
 * (exactly one entry per protocol message, each UI action is one verb),
 * and collects applied-edit events into a command log whose lines are
 * CLI-replayable (`intentsim run ... --replay`).
 */

import {
  AppliedEdit,
  ErrorBody,
  Explanation,
  Frame,
  PushEvent,
  Request,
  Response,
  ServerError,
  Snapshot,
  TickReport,
  Verb,
  isPush,
} from "./protocol.js";
import { Transport } from "./transport.js";

export type ConnectionState = "connecting" | "connected" | "disconnected";

export interface LogEntry {
  dir: "send" | "recv" | "push" | "info";
  summary: string;
  detail?: unknown;
}

export interface SessionState {
  connection: ConnectionState;
  serverVerbs: Verb[];
  tick: number;
  paused: boolean | null;
  snapshot: Snapshot | null;
  lastReport: TickReport | null;
  droppedTotal: number;
  explanations: Record<string, Explanation>;
  selectedAgent: string | null;
}

export class SessionModel {
  readonly state: SessionState = {
    connection: "connecting",
    serverVerbs: [],
    tick: 0,
    paused: null,
    snapshot: null,
    lastReport: null,
    droppedTotal: 0,
    explanations: {},
    selectedAgent: null,
  };

  readonly eventLog: LogEntry[] = [];
  readonly commandLog: AppliedEdit[] = [];

  private transport: Transport;
  private nextId = 1;
  private pending = new Map<number, {
    resolve: (payload: Record<string, unknown>) => void;
    reject: (err: Error) => void;
  }>();
  private listeners: (() => void)[] = [];

  constructor(transport: Transport) {
    this.transport = transport;
    transport.onOpen(() => {
      this.state.connection = "connected";
      this.log({ dir: "info", summary: "connected" });
      // session resume: refresh the world without touching the run
      this.snapshot().catch(() => undefined);
    });
    transport.onClose(() => {
      this.state.connection = "disconnected";
      this.log({ dir: "info", summary: "disconnected" });
      for (const [, waiter] of this.pending) {
        waiter.reject(new Error("connection closed"));
      }
      this.pending.clear();
    });
    transport.onMessage((text) => this.receive(text));
  }

  onChange(fn: () => void): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn();
  }

  private log(entry: LogEntry): void {
    this.eventLog.push(entry);
  }

  // --- outgoing ---------------------------------------------------------

  request(verb: Verb, payload: Record<string, unknown> = {}): Promise<Record<string, unknown>> {
    const id = this.nextId++;
    const request: Request = { id, verb, payload };
    this.log({ dir: "send", summary: `${verb} #${id}`, detail: payload });
    this.transport.send(JSON.stringify(request));
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      this.notify();
    });
  }

  hello() {
    return this.request("hello");
  }

  async snapshot(): Promise<Snapshot> {
    const snap = (await this.request("snapshot")) as unknown as Snapshot;
    this.state.snapshot = snap;
    this.state.tick = snap.tick;
    this.state.paused = snap.paused;
    this.notify();
    return snap;
  }

  async step(n = 1) {
    return this.request("step", { n });
  }

  async pause() {
    const got = await this.request("pause");
    this.state.paused = true;
    this.notify();
    return got;
  }

  async resume() {
    const got = await this.request("resume");
    this.state.paused = false;
    this.notify();
    return got;
  }

  setSpeed(tps: number) {
    return this.request("set_speed", { tps });
  }

  spawn(className: string, name?: string, at?: [number, number]) {
    const payload: Record<string, unknown> = { class: className };
    if (name) payload.name = name;
    if (at) payload.at = at;
    return this.request("spawn", payload);
  }

  addEffect(target: string, action: string, tendency: string, property: string) {
    return this.request("add_effect", { agent: target, action, tendency, property });
  }

  removeEffect(target: string, action: string, property: string) {
    return this.request("remove_effect", { agent: target, action, property });
  }

  assertClause(target: string, text: string) {
    return this.request("assert_clause", { agent: target, text });
  }

  retractClause(target: string, text: string) {
    return this.request("retract_clause", { agent: target, text });
  }

  setProperty(target: string, name: string, value: unknown) {
    return this.request("set_property", { agent: target, name, value });
  }

  async explain(agent: string): Promise<Explanation> {
    const explanation = (await this.request("explain", { agent })) as unknown as Explanation;
    this.state.explanations[agent] = explanation;
    this.notify();
    return explanation;
  }

  getSource(className: string) {
    return this.request("get_source", { class: className });
  }

  selectAgent(name: string | null): void {
    this.state.selectedAgent = name;
    this.notify();
  }

  close(): void {
    this.transport.close();
  }

  /** JSON-lines command schedule, replayable via `intentsim run --replay`. */
  exportCommandLog(): string {
    return this.commandLog.map((entry) => JSON.stringify(entry)).join("\n") + "\n";
  }

  // --- incoming ------------------------------------------------------------

  private receive(text: string): void {
    let frame: Frame;
    try {
      frame = JSON.parse(text) as Frame;
    } catch {
      this.log({ dir: "info", summary: `unparseable frame: ${text.slice(0, 80)}` });
      return;
    }
    if (isPush(frame)) {
      this.receivePush(frame);
    } else {
      this.receiveResponse(frame);
    }
    this.notify();
  }

  private receiveResponse(response: Response): void {
    const id = response.id;
    const waiter = id === null ? undefined : this.pending.get(id);
    if (id !== null) this.pending.delete(id);
    if (response.ok) {
      this.log({ dir: "recv", summary: `ok #${id}`, detail: response.payload });
      waiter?.resolve(response.payload ?? {});
    } else {
      const body: ErrorBody = response.error ?? { code: "unknown", message: "no error body" };
      this.log({ dir: "recv", summary: `error #${id}: ${body.code} ${body.message}` });
      waiter?.reject(new ServerError(body));
    }
  }

  private receivePush(push: PushEvent): void {
    switch (push.event) {
      case "hello":
        this.state.serverVerbs = push.verbs;
        this.log({ dir: "push", summary: `hello v${push.version}` });
        break;
      case "tick_report": {
        this.state.tick = push.tick;
        this.state.droppedTotal += push.dropped;
        this.state.lastReport = push.payload;
        const suffix = push.dropped > 0 ? ` (${push.dropped} dropped)` : "";
        this.log({ dir: "push", summary: `tick ${push.tick}${suffix}` });
        break;
      }
      case "edit_applied":
        this.commandLog.push(push.payload);
        this.log({
          dir: "push",
          summary: `edit applied at tick ${push.tick}: ${String(push.payload.edit.kind)}` +
            (push.payload.ok ? "" : ` FAILED: ${push.payload.error}`),
        });
        break;
      case "log":
        this.log({ dir: "push", summary: "server log", detail: push.payload });
        break;
    }
  }
}
