/** The console's view model: a snapshot plus a gapless replayed event log.
 *
 * Two kinds of facts live here and never mix:
 *  - replayed facts accumulate from events (discovered goals, episode and
 *    success counters, the metric series);
 *  - fetched facts are set wholesale from server responses (scene, graph
 *    edges, frontier, current node) and are only ever refreshed, so a resync
 *    cannot double-count anything.
 *
 * Nothing in this module computes world semantics; every value shown comes
 * from the service.
 */

import type {
  EventFrame,
  GraphSnapshot,
  SceneJson,
  SessionState,
} from "./types.js";

export interface Series {
  episodes: number[];
  discovered: number[];
  successRate: number[];
}

export interface ViewModel {
  sessionId: string;
  config: Record<string, unknown>;
  log: EventFrame[];
  lastSeq: number;
  needsResync: boolean;
  discovered: Set<string>;
  episodesRun: number;
  baseEpisodes: number; // episodes already run when the snapshot was taken
  successes: number;
  scene: SceneJson | null;
  sceneStale: boolean;
  currentConfig: string | null;
  graph: GraphSnapshot | null;
  graphStale: boolean;
  sentencesGrounded: number;
  series: Series;
}

export function fromSnapshot(state: SessionState, graph: GraphSnapshot): ViewModel {
  const model: ViewModel = {
    sessionId: state.id,
    config: state.config,
    log: [],
    lastSeq: 0,
    needsResync: false,
    discovered: new Set(graph.nodes),
    episodesRun: state.episodes_run,
    baseEpisodes: state.episodes_run,
    successes: 0,
    scene: state.scene,
    sceneStale: false,
    currentConfig: graph.current,
    graph,
    graphStale: false,
    sentencesGrounded: state.sentences_grounded,
    series: { episodes: [], discovered: [], successRate: [] },
  };
  return model;
}

/** Apply one event frame in place.
 *
 * Frames at or below the cursor are duplicates from a resync overlap and are
 * ignored; a frame past the next expected sequence number marks the model as
 * needing a resync and is dropped (the reconnect replays it).
 */
export function applyEvent(model: ViewModel, frame: EventFrame): void {
  if (frame.seq <= model.lastSeq) return;
  if (frame.seq !== model.lastSeq + 1) {
    model.needsResync = true;
    return;
  }
  model.lastSeq = frame.seq;
  model.log.push(frame);

  const payload = frame.payload;
  switch (frame.type) {
    case "session_created":
      model.sessionId = payload.id as string;
      model.config = payload.config as Record<string, unknown>;
      break;
    case "scene_set":
      model.scene = payload.scene as SceneJson;
      model.sceneStale = false;
      model.currentConfig = payload.configuration as string;
      break;
    case "move_executed":
      // the scene's structure detail is not in the event, only the move
      model.sceneStale = true;
      break;
    case "goal_discovered":
      model.discovered.add(payload.goal as string);
      model.graphStale = true;
      break;
    case "episode_finished":
      model.episodesRun += 1;
      if (payload.success) model.successes += 1;
      // rate over the episodes this log actually covers
      model.series.successRate.push(model.successes / (model.episodesRun - model.baseEpisodes));
      model.sceneStale = true;
      break;
    case "metric_update":
      model.series.episodes.push(payload.episode as number);
      model.series.discovered.push(payload.discovered as number);
      break;
    default:
      // episode_started, pair_internalized: shown in the log, no state change
      break;
  }
}

/** Refresh the fetched facts from a new graph response. */
export function applyGraph(model: ViewModel, graph: GraphSnapshot): void {
  model.graph = graph;
  model.graphStale = false;
  model.currentConfig = graph.current;
  for (const node of graph.nodes) model.discovered.add(node);
}

/** Refresh the fetched facts from a new state response. */
export function applyState(model: ViewModel, state: SessionState): void {
  model.scene = state.scene;
  model.sceneStale = false;
  model.sentencesGrounded = state.sentences_grounded;
}

/** The log is gapless and ordered exactly when seq runs 1..lastSeq. */
export function logIsGapless(model: ViewModel): boolean {
  return model.log.every((frame, index) => frame.seq === index + 1);
}
