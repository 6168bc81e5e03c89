/**
 * Rendering: a canvas viewport for the grid world and DOM panels for the
 * selected agent. Pure projection of SessionModel state; no semantics.
 */

import { EntityRow, TickReport } from "./protocol.js";
import { SessionModel } from "./session.js";

const KIND_COLORS = ["#2f6db3", "#c2571a", "#3f8f4e", "#8a4fb0", "#b03a51", "#6b6b1f"];

function colorFor(kind: string): string {
  let hash = 0;
  for (const ch of kind) hash = (hash * 31 + ch.charCodeAt(0)) >>> 0;
  return KIND_COLORS[hash % KIND_COLORS.length];
}

export function renderWorld(canvas: HTMLCanvasElement, model: SessionModel): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const snap = model.state.snapshot;
  const width = snap?.world.width ?? 16;
  const height = snap?.world.height ?? 16;
  const entities: EntityRow[] =
    model.state.lastReport?.entities ?? snap?.world.entities ?? [];

  const cell = Math.floor(Math.min(canvas.width / width, canvas.height / height));
  ctx.fillStyle = "#fbf8f1";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#ddd6c6";
  ctx.lineWidth = 1;
  for (let x = 0; x <= width; x++) {
    ctx.beginPath();
    ctx.moveTo(x * cell + 0.5, 0);
    ctx.lineTo(x * cell + 0.5, height * cell);
    ctx.stroke();
  }
  for (let y = 0; y <= height; y++) {
    ctx.beginPath();
    ctx.moveTo(0, y * cell + 0.5);
    ctx.lineTo(width * cell, y * cell + 0.5);
    ctx.stroke();
  }

  const selected = model.state.selectedAgent;
  const selectedPos = selected ? snap?.agents[selected]?.pos : null;
  for (const [eid, kind, x, y, alive] of entities) {
    ctx.globalAlpha = alive ? 1 : 0.25;
    ctx.fillStyle = colorFor(kind);
    ctx.beginPath();
    ctx.arc((x + 0.5) * cell, (y + 0.5) * cell, cell * 0.33, 0, Math.PI * 2);
    ctx.fill();
    ctx.globalAlpha = 1;
    ctx.fillStyle = "#222";
    ctx.font = `${Math.max(9, cell * 0.4)}px sans-serif`;
    ctx.textAlign = "center";
    ctx.fillText(kind[0] ?? "?", (x + 0.5) * cell, (y + 0.5) * cell + cell * 0.15);
    void eid;
  }
  if (selectedPos) {
    ctx.strokeStyle = "#d9a400";
    ctx.lineWidth = 2;
    ctx.strokeRect(selectedPos[0] * cell + 1, selectedPos[1] * cell + 1, cell - 2, cell - 2);
  }

  ctx.fillStyle = "#222";
  ctx.font = "12px sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(`tick ${model.state.tick}`, 4, height * cell + 14);
  if (model.state.paused) {
    ctx.fillStyle = "#a33";
    ctx.fillText("paused", 64, height * cell + 14);
  }
}

function h(tag: string, text?: string, className?: string): HTMLElement {
  const el = document.createElement(tag);
  if (text !== undefined) el.textContent = text;
  if (className) el.className = className;
  return el;
}

export function renderAgentPanel(root: HTMLElement, model: SessionModel): void {
  root.replaceChildren();
  const name = model.state.selectedAgent;
  const snap = model.state.snapshot;
  if (!name || !snap || !(name in snap.agents)) {
    root.append(h("p", "select an agent in the viewport or the agent list", "hint"));
    return;
  }
  const agent = snap.agents[name];
  root.append(h("h3", `${name} (${agent.class}${agent.alive ? "" : ", dead"})`));

  const props = h("table", undefined, "props");
  for (const [key, value] of Object.entries(agent.props)) {
    const row = h("tr");
    row.append(h("td", key), h("td", JSON.stringify(value)));
    props.append(row);
  }
  root.append(h("h4", "properties"), props);

  const tick: TickReport | null = model.state.lastReport;
  const data = tick?.agents[name];
  if (data) {
    root.append(h("h4", "last tick"));
    root.append(h("p", `cycle ${data.cycle_completed ? "completed" : data.main_status ?? "pending"}`));
    root.append(h("p", `intentions: ${data.intentions.map(([t, p]) => `${t} ${p}`).join(", ") || "none"}`));
    root.append(h("p", `blocked: ${data.blocked.map(([p, pol]) => `${p} ${pol}`).join(", ") || "none"}`));
    root.append(h("p", `direct: ${data.direct.join(", ") || "none"} | solved: ${data.solved.join(", ") || "none"}`));
    root.append(
      h("p", `scores: ${Object.entries(data.scores).map(([a, s]) => `${a}=${s}`).join(" ")}`)
    );
  }

  root.append(h("h4", "clauses"));
  const clauses = h("ul", undefined, "clauses");
  for (const clause of agent.clauses) clauses.append(h("li", clause));
  root.append(clauses);

  root.append(h("h4", "annotations"));
  const ann = h("table", undefined, "annotations");
  for (const [action, effects] of Object.entries(agent.annotations)) {
    const row = h("tr");
    row.append(
      h("td", action),
      h("td", effects.map(([t, p]) => `${t} ${p}`).join(", ") || "(none)")
    );
    ann.append(row);
  }
  root.append(ann);
}

export function renderExplanation(root: HTMLElement, model: SessionModel): void {
  root.replaceChildren();
  const name = model.state.selectedAgent;
  if (!name) {
    root.append(h("p", "no agent selected", "hint"));
    return;
  }
  const explanation = model.state.explanations[name];
  if (!explanation) {
    root.append(h("p", "no explanation yet — press 'explain'", "hint"));
    return;
  }
  const pre = h("pre", explanation.text, "explanation");
  root.append(pre);
}

export function renderEventLog(root: HTMLElement, model: SessionModel): void {
  root.replaceChildren();
  const list = h("ul", undefined, "log");
  for (const entry of model.eventLog.slice(-40)) {
    list.append(h("li", `[${entry.dir}] ${entry.summary}`));
  }
  root.append(list);
}

export function renderAgentList(root: HTMLElement, model: SessionModel): void {
  root.replaceChildren();
  const snap = model.state.snapshot;
  if (!snap) return;
  for (const [name, agent] of Object.entries(snap.agents)) {
    const btn = h("button", `${name} (${agent.class})`, "agent-button");
    if (name === model.state.selectedAgent) btn.classList.add("selected");
    btn.addEventListener("click", () => model.selectAgent(name));
    root.append(btn);
  }
}
