/**
 * Browser bootstrap: wire the session model to the DOM panels.
 *
 * Every control maps to exactly one protocol verb; server-side errors
 * (including parser spans for clause text) are shown inline next to the
 * control that caused them.
 */

import { ServerError } from "./protocol.js";
import {
  renderAgentList,
  renderAgentPanel,
  renderEventLog,
  renderExplanation,
  renderWorld,
} from "./render.js";
import { SessionModel } from "./session.js";
import { WebSocketTransport } from "./transport.js";

function el<T extends HTMLElement>(id: string): T {
  const got = document.getElementById(id);
  if (!got) throw new Error(`missing element #${id}`);
  return got as T;
}

function showError(target: HTMLElement, err: unknown): void {
  if (err instanceof ServerError) {
    const span = err.line !== undefined ? ` (line ${err.line}, col ${err.col})` : "";
    target.textContent = `${err.code}: ${err.message}${span}`;
  } else {
    target.textContent = String(err);
  }
}

function start(): void {
  const url =
    new URLSearchParams(location.search).get("server") ?? "ws://127.0.0.1:8765";
  const transport = new WebSocketTransport(url);
  const model = new SessionModel(transport);

  const canvas = el<HTMLCanvasElement>("world");
  const banner = el<HTMLElement>("banner");
  const editError = el<HTMLElement>("edit-error");
  const clauseError = el<HTMLElement>("clause-error");

  const redraw = () => {
    banner.textContent =
      model.state.connection === "connected"
        ? ""
        : `socket ${model.state.connection} (${url}) — retrying`;
    renderWorld(canvas, model);
    renderAgentList(el("agents"), model);
    renderAgentPanel(el("inspector"), model);
    renderExplanation(el("explanation"), model);
    renderEventLog(el("eventlog"), model);
  };
  model.onChange(redraw);
  redraw();

  canvas.addEventListener("click", (event) => {
    const snap = model.state.snapshot;
    if (!snap) return;
    const cell = Math.floor(
      Math.min(canvas.width / snap.world.width, canvas.height / snap.world.height)
    );
    const x = Math.floor(event.offsetX / cell);
    const y = Math.floor(event.offsetY / cell);
    for (const [name, agent] of Object.entries(snap.agents)) {
      if (agent.pos && agent.pos[0] === x && agent.pos[1] === y) {
        model.selectAgent(name);
        return;
      }
    }
  });

  el("btn-step").addEventListener("click", () => {
    model.step(1).then(() => model.snapshot()).catch((e) => showError(banner, e));
  });
  el("btn-pause").addEventListener("click", () => void model.pause());
  el("btn-resume").addEventListener("click", () => void model.resume());
  el("btn-explain").addEventListener("click", () => {
    const agent = model.state.selectedAgent;
    if (agent) model.explain(agent).catch((e) => showError(banner, e));
  });

  el("btn-add-effect").addEventListener("click", () => {
    editError.textContent = "";
    const agent = model.state.selectedAgent;
    if (!agent) return;
    const action = el<HTMLInputElement>("effect-action").value.trim();
    const tendency = el<HTMLSelectElement>("effect-tendency").value;
    const property = el<HTMLInputElement>("effect-property").value.trim();
    model.addEffect(agent, action, tendency, property).catch((e) => showError(editError, e));
  });

  el("btn-remove-effect").addEventListener("click", () => {
    editError.textContent = "";
    const agent = model.state.selectedAgent;
    if (!agent) return;
    const action = el<HTMLInputElement>("effect-action").value.trim();
    const property = el<HTMLInputElement>("effect-property").value.trim();
    model.removeEffect(agent, action, property).catch((e) => showError(editError, e));
  });

  el("btn-assert").addEventListener("click", () => {
    clauseError.textContent = "";
    const agent = model.state.selectedAgent;
    if (!agent) return;
    const text = el<HTMLTextAreaElement>("clause-text").value;
    model.assertClause(agent, text).catch((e) => showError(clauseError, e));
  });

  el("btn-retract").addEventListener("click", () => {
    clauseError.textContent = "";
    const agent = model.state.selectedAgent;
    if (!agent) return;
    const text = el<HTMLTextAreaElement>("clause-text").value;
    model.retractClause(agent, text).catch((e) => showError(clauseError, e));
  });

  el("btn-export-log").addEventListener("click", () => {
    const blob = new Blob([model.exportCommandLog()], { type: "application/jsonl" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "session-commands.jsonl";
    a.click();
  });
}

start();
