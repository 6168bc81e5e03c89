/**
 * Wire types for the intentsim control protocol (docs/protocol.md).
 *
 * The console displays what the server says and nothing more; these types
 * mirror the server's JSON schemas and carry no behaviour.
 */

export type Verb =
  | "hello"
  | "snapshot"
  | "step"
  | "pause"
  | "resume"
  | "set_speed"
  | "spawn"
  | "set_property"
  | "assert_clause"
  | "retract_clause"
  | "add_effect"
  | "remove_effect"
  | "explain"
  | "list_agents"
  | "get_source";

export interface Request {
  id: number;
  verb: Verb;
  payload: Record<string, unknown>;
}

export interface ErrorBody {
  code: string;
  message: string;
  line?: number;
  col?: number;
}

export interface Response {
  id: number | null;
  ok: boolean;
  payload?: Record<string, unknown>;
  error?: ErrorBody;
}

/** [eid, kind, x, y, alive] */
export type EntityRow = [number, string, number, number, boolean];

export interface AgentTickData {
  alive: boolean;
  cycle_completed: boolean;
  steps: number;
  main_status: string | null;
  direct: string[];
  intentions: [string, string][];
  blocked: [string, string][];
  solved: string[];
  scores: Record<string, number>;
  exact: boolean;
  intend_truncated: boolean;
  actions_run: string[];
  perceptions_run: string[];
  deltas: Record<string, [unknown, unknown]>;
  errors: string[];
}

export interface AppliedEdit {
  tick: number;
  seq: number;
  target: string;
  scope: "agent" | "class";
  edit: Record<string, unknown>;
  ok: boolean;
  error: string | null;
}

export interface TickReport {
  tick: number;
  agents: Record<string, AgentTickData>;
  edits: AppliedEdit[];
  entities: EntityRow[];
}

export interface SnapshotAgent {
  class: string;
  alive: boolean;
  pos: [number, number] | null;
  props: Record<string, unknown>;
  last_selection: { direct: string[]; solved: string[] } | null;
  cycle_status: string | null;
  clauses: string[];
  annotations: Record<string, [string, string][]>;
}

export interface Snapshot {
  tick: number;
  world: { width: number; height: number; entities: EntityRow[] };
  agents: Record<string, SnapshotAgent>;
  paused: boolean;
  tick_rate: number;
}

export interface Explanation {
  agent: string;
  tick: number;
  main_status: string;
  proof: unknown;
  blocked: { property: string; polarity: string; rule: string | null }[];
  intentions: { tendency: string; property: string; origin: string }[];
  selection: {
    direct: string[];
    solved: string[];
    scores: Record<string, number>;
    served: Record<string, { tendency: string; property: string; origin: string }[]>;
    exact: boolean;
  };
  errors: string[];
  text: string;
}

export type PushEvent =
  | { event: "hello"; version: number; verbs: Verb[] }
  | { event: "tick_report"; tick: number; dropped: number; payload: TickReport }
  | { event: "edit_applied"; tick: number; payload: AppliedEdit }
  | { event: "log"; payload: unknown };

export type Frame = Response | PushEvent;

export function isPush(frame: Frame): frame is PushEvent {
  return typeof (frame as PushEvent).event === "string";
}

/** Thrown when the server answers ok=false; carries the parser span if any. */
export class ServerError extends Error {
  code: string;
  line?: number;
  col?: number;

  constructor(body: ErrorBody) {
    super(body.message);
    this.code = body.code;
    this.line = body.line;
    this.col = body.col;
  }
}
