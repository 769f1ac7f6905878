/** The tutor console: DOM wiring around the pure model/scene/composer modules.
 *
 * One WebSocket per open session; the server is authoritative for every
 * domain fact.  The shell only fetches, applies, and renders.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  composeExpression,
  describeExpression,
  emptyComposer,
  type ComposerState,
} from "./composer.js";
import {
  applyEvent,
  applyGraph,
  applyState,
  fromSnapshot,
  logIsGapless,
  type ViewModel,
} from "./model.js";
import { renderSceneSVG } from "./scene.js";
import { renderSparkline } from "./sparkline.js";
import type { EventFrame, InstructionResponse } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let api = new ApiClient(defaultBase());
let model: ViewModel | null = null;
let socket: WebSocket | null = null;
let composer: ComposerState = emptyComposer();
let renderQueued = false;
let fetchingGraph = false;
let fetchingState = false;

function defaultBase(): string {
  const fromQuery = new URLSearchParams(location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8000";
}

// --- session lifecycle ----------------------------------------------------

async function createSession(): Promise<void> {
  api = new ApiClient(($("api-base") as HTMLInputElement).value);
  const config: Record<string, unknown> = {
    episodes: intInput("cfg-episodes"),
    beta: floatInput("cfg-beta"),
    epsilon: floatInput("cfg-epsilon"),
    seed: intInput("cfg-seed"),
  };
  try {
    const created = await api.createSession(config);
    await attachSession(created.id);
  } catch (error) {
    banner(error);
  }
}

async function attachSession(id: string): Promise<void> {
  socket?.close();
  const [state, graph] = await Promise.all([api.state(id), api.graph(id, true)]);
  model = fromSnapshot(state, graph);
  $("session-id").textContent = id;
  openSocket(0);
  scheduleRender();
}

function openSocket(since: number): void {
  if (!model) return;
  socket = api.openEvents(model.sessionId, since);
  socket.onmessage = (message) => {
    if (!model) return;
    applyEvent(model, JSON.parse(message.data) as EventFrame);
    if (model.needsResync) void resync();
    scheduleRender();
  };
  socket.onclose = () => {
    $("ws-status").textContent = "disconnected";
  };
  socket.onopen = () => {
    $("ws-status").textContent = "live";
  };
}

/** A sequence gap: refetch the authoritative snapshots, then resume the log
 * from the last applied frame; the append-only history replays the rest. */
async function resync(): Promise<void> {
  if (!model) return;
  socket?.close();
  const [state, graph] = await Promise.all([
    api.state(model.sessionId),
    api.graph(model.sessionId, true),
  ]);
  applyState(model, state);
  applyGraph(model, graph);
  model.needsResync = false;
  openSocket(model.lastSeq);
  scheduleRender();
}

// --- actions ---------------------------------------------------------------

async function runEpisodes(): Promise<void> {
  if (!model) return;
  const mode = ($("episode-mode") as HTMLSelectElement).value;
  const count = intInput("episode-count");
  await act(async () => {
    const result = await api.episodes(model!.sessionId, mode, count);
    if (result.reason) banner(`stopped after ${result.completed}: ${result.reason}`);
  });
}

async function setScene(kind: string): Promise<void> {
  if (!model) return;
  const intervention =
    kind === "pre_stacked_2"
      ? { kind: "pre_stacked", k: 2 }
      : kind === "pre_stacked_3"
        ? { kind: "pre_stacked", k: 3 }
        : { kind: "random_scatter" };
  await act(() => api.setSceneIntervention(model!.sessionId, intervention));
}

async function proposeHme(): Promise<void> {
  if (!model) return;
  await act(async () => {
    const proposal = await api.hmePropose(model!.sessionId);
    const target = $("hme-result");
    if (!proposal.pair) {
      target.textContent = proposal.reason ?? "nothing to propose";
      return;
    }
    target.innerHTML =
      `tutor proposes frontier <code>${proposal.pair.frontier}</code> ` +
      `then beyond <code>${proposal.pair.beyond}</code> ` +
      `<button data-goal="${proposal.pair.frontier}">demonstrate frontier</button> ` +
      `<button data-goal="${proposal.pair.beyond}">then beyond</button>`;
    target.querySelectorAll("button").forEach((button) => {
      button.addEventListener("click", () => void instructGoal(button.dataset.goal!));
    });
  });
}

async function instructGoal(goal: string): Promise<void> {
  if (!model) return;
  await act(async () => {
    const response = await api.instructGoal(model!.sessionId, goal, intInput("attempts"));
    showInstructionResult(response, `goal ${goal}`);
  });
}

async function submitInstruction(): Promise<void> {
  if (!model) return;
  const expression = composeExpression(composer);
  if (!expression) return;
  const attempts = intInput("attempts");
  const languageMode = ($("language-mode") as HTMLSelectElement).value;
  await act(async () => {
    const response = await api.instruct(model!.sessionId, expression, attempts, languageMode);
    showInstructionResult(response, describeExpression(expression));
  });
}

function showInstructionResult(response: InstructionResponse, label: string): void {
  const lines = response.outcomes.map(
    (outcome, index) =>
      `<li>attempt ${index + 1}: goal <code>${outcome.goal}</code>, ` +
      `${outcome.moves_used} moves, ${outcome.success ? "reached" : "missed"}</li>`,
  );
  $("instruction-result").innerHTML =
    `<p>${label}: <b>${response.success ? "success" : "failed"}</b>` +
    (response.reason ? ` (${response.reason})` : "") +
    `</p><ul>${lines.join("")}</ul>`;
  if (model) {
    model.scene = response.scene;
    model.sceneStale = false;
  }
  scheduleRender();
}

/** Run a mutation; a 409 means another writer holds the session. */
async function act(action: () => Promise<unknown>): Promise<void> {
  try {
    banner(null);
    await action();
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      banner(`busy: ${error.message}`);
    } else {
      banner(error);
    }
  } finally {
    scheduleRender();
  }
}

function banner(error: unknown): void {
  const el = $("error-banner");
  if (error === null) {
    el.hidden = true;
    return;
  }
  el.hidden = false;
  el.textContent = error instanceof Error ? error.message : String(error);
}

// --- composer wiring --------------------------------------------------------

function addSentenceRow(): void {
  composer.selections.push({ text: ($("sentence-input") as HTMLInputElement).value, negated: false });
  ($("sentence-input") as HTMLInputElement).value = "";
  renderComposer();
}

function renderComposer(): void {
  const list = $("composer-rows");
  list.innerHTML = "";
  composer.selections.forEach((selection, index) => {
    const row = document.createElement("li");
    const negate = document.createElement("input");
    negate.type = "checkbox";
    negate.checked = selection.negated;
    negate.title = "negate";
    negate.addEventListener("change", () => {
      selection.negated = negate.checked;
      renderComposer();
    });
    const text = document.createElement("span");
    text.textContent = (selection.negated ? "not " : "") + `"${selection.text}"`;
    const remove = document.createElement("button");
    remove.textContent = "x";
    remove.addEventListener("click", () => {
      composer.selections.splice(index, 1);
      renderComposer();
    });
    row.append(negate, text, remove);
    list.append(row);
  });
  const expression = composeExpression(composer);
  ($("submit-instruction") as HTMLButtonElement).disabled = expression === null || !model;
  $("composer-preview").textContent = expression ? describeExpression(expression) : "(empty)";
}

// --- rendering ---------------------------------------------------------------

function scheduleRender(): void {
  if (renderQueued) return;
  renderQueued = true;
  requestAnimationFrame(() => {
    renderQueued = false;
    render();
  });
}

function render(): void {
  if (!model) return;
  if (model.graphStale && !fetchingGraph) {
    fetchingGraph = true;
    api
      .graph(model.sessionId, true)
      .then((graph) => model && applyGraph(model, graph))
      .finally(() => {
        fetchingGraph = false;
        scheduleRender();
      });
  }
  if (model.sceneStale && !fetchingState) {
    fetchingState = true;
    api
      .state(model.sessionId)
      .then((state) => model && applyState(model, state))
      .finally(() => {
        fetchingState = false;
        scheduleRender();
      });
  }

  $("scene-panel").innerHTML = model.scene ? renderSceneSVG(model.scene) : "";
  $("graph-panel").innerHTML = renderGraphSVG();
  bindGraphClicks();
  $("sparks").innerHTML =
    renderSparkline(model.series.discovered, "discovered") +
    renderSparkline(model.series.successRate, "success rate");
  $("counters").textContent =
    `episodes ${model.episodesRun} | discovered ${model.discovered.size}` +
    ` | grounded ${model.sentencesGrounded} | log ${model.log.length}` +
    ` (${logIsGapless(model) ? "gapless" : "GAPPED"})`;
  renderLog();
}

function renderGraphSVG(): string {
  if (!model?.graph) return "";
  const all = model.graph.full?.nodes ?? model.graph.nodes;
  const size = 360;
  const radius = size / 2 - 28;
  const center = size / 2;
  const position = new Map<string, [number, number]>();
  all.forEach((node, index) => {
    const angle = (2 * Math.PI * index) / all.length - Math.PI / 2;
    position.set(node, [center + radius * Math.cos(angle), center + radius * Math.sin(angle)]);
  });
  const frontier = new Set(model.graph.frontier);
  const edges = (model.graph.full?.edges ?? model.graph.edges)
    .map(([u, v]) => {
      const [x1, y1] = position.get(u)!;
      const [x2, y2] = position.get(v)!;
      const known = model!.discovered.has(u) && model!.discovered.has(v);
      return `<line x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" class="${known ? "edge-on" : "edge"}"/>`;
    })
    .join("");
  const nodes = all
    .map((node) => {
      const [x, y] = position.get(node)!;
      const classes = ["node"];
      if (model!.discovered.has(node)) classes.push("on");
      if (frontier.has(node)) classes.push("frontier");
      if (node === model!.currentConfig) classes.push("current");
      return (
        `<circle cx="${x}" cy="${y}" r="7" class="${classes.join(" ")}" data-goal="${node}">` +
        `<title>${node}</title></circle>`
      );
    })
    .join("");
  return `<svg width="${size}" height="${size}" viewBox="0 0 ${size} ${size}">${edges}${nodes}</svg>`;
}

function bindGraphClicks(): void {
  $("graph-panel")
    .querySelectorAll("circle[data-goal]")
    .forEach((circle) => {
      circle.addEventListener("click", () => {
        const goal = (circle as SVGCircleElement).dataset.goal!;
        if (confirm(`set ${goal} as the learner's goal?`)) void instructGoal(goal);
      });
    });
}

function renderLog(): void {
  if (!model) return;
  const list = $("event-log");
  const recent = model.log.slice(-200);
  list.innerHTML = recent
    .map((frame) => {
      const detail = summarizeEvent(frame);
      return `<li><code>${frame.seq}</code> ${frame.type}${detail ? `: ${detail}` : ""}</li>`;
    })
    .join("");
  list.scrollTop = list.scrollHeight;
}

function summarizeEvent(frame: EventFrame): string {
  const p = frame.payload;
  switch (frame.type) {
    case "episode_started":
      return `#${p.episode} (${p.mode})`;
    case "move_executed":
      return `${p.from} -> ${p.to}`;
    case "goal_discovered":
      return `${p.goal}`;
    case "pair_internalized":
      return `${p.frontier} / ${p.beyond}`;
    case "episode_finished":
      return `goal ${p.goal || "(none)"} ${p.success ? "ok" : "miss"}`;
    case "scene_set":
      return `${p.configuration}`;
    default:
      return "";
  }
}

// --- bootstrapping -----------------------------------------------------------

function intInput(id: string): number {
  return parseInt(($(id) as HTMLInputElement).value, 10);
}

function floatInput(id: string): number {
  return parseFloat(($(id) as HTMLInputElement).value);
}

function wire(): void {
  $("create-session").addEventListener("click", () => void createSession());
  $("attach-session").addEventListener("click", () => {
    api = new ApiClient(($("api-base") as HTMLInputElement).value);
    void attachSession(($("existing-id") as HTMLInputElement).value).catch(banner);
  });
  $("run-episodes").addEventListener("click", () => void runEpisodes());
  $("scene-scatter").addEventListener("click", () => void setScene("random_scatter"));
  $("scene-stack2").addEventListener("click", () => void setScene("pre_stacked_2"));
  $("scene-stack3").addEventListener("click", () => void setScene("pre_stacked_3"));
  $("hme-propose").addEventListener("click", () => void proposeHme());
  $("add-sentence").addEventListener("click", addSentenceRow);
  $("sentence-input").addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") addSentenceRow();
  });
  $("connective").addEventListener("change", () => {
    composer.connective = ($("connective") as HTMLSelectElement).value as "and" | "or";
    renderComposer();
  });
  $("negate-root").addEventListener("change", () => {
    composer.negateRoot = ($("negate-root") as HTMLInputElement).checked;
    renderComposer();
  });
  $("submit-instruction").addEventListener("click", () => void submitInstruction());
  $("clear-composer").addEventListener("click", () => {
    composer = emptyComposer();
    ($("connective") as HTMLSelectElement).value = "and";
    ($("negate-root") as HTMLInputElement).checked = false;
    renderComposer();
  });
  renderComposer();
}

wire();
