/** Wire types mirroring the service's JSON, nothing invented client-side. */

export interface SingleJson {
  kind: "single";
  block: string;
}

export interface StackJson {
  kind: "stack";
  blocks: string[]; // bottom to top
}

export interface PyramidJson {
  kind: "pyramid";
  top: string;
  base: string[];
}

export type StructureJson = SingleJson | StackJson | PyramidJson;

export interface SceneJson {
  structures: StructureJson[];
  clusters: number[][]; // structure indices grouped by proximity
}

export interface LearnerJson {
  n_blocks: number;
  seed: number;
  epsilon: number;
  scene: SceneJson;
  current: string;
  discovered: string[];
  [extra: string]: unknown;
}

export interface SessionState {
  id: string;
  config: Record<string, unknown>;
  episodes_run: number;
  learner: LearnerJson;
  scene: SceneJson;
  sentences_grounded: number;
  fully_discovered: boolean;
}

export interface GraphSnapshot {
  nodes: string[];
  edges: [string, string][];
  frontier: string[];
  current: string;
  full?: { nodes: string[]; edges: [string, string][] };
}

export interface EpisodeRecord {
  episode: number;
  mode: string;
  goal: string;
  success: boolean;
  moves: number;
  discovered: number;
  newly: number;
}

export interface EpisodesResponse {
  requested: number;
  completed: number;
  records: EpisodeRecord[];
  reason: string | null;
}

export interface OutcomeJson {
  goal: string;
  success: boolean;
  trajectory: string[];
  moves_used: number;
  newly_discovered: string[];
}

export interface InstructionResponse {
  success: boolean;
  attempts_used: number;
  outcomes: OutcomeJson[];
  record: EpisodeRecord;
  reason: string | null;
  scene: SceneJson;
}

export interface SceneResponse {
  scene: SceneJson;
  configuration: string;
}

export interface HmeProposal {
  pair: { frontier: string; beyond: string } | null;
  reason: string | null;
}

export type ExpressionJson =
  | { op: "leaf"; text: string }
  | { op: "and" | "or"; children: ExpressionJson[] }
  | { op: "not"; children: ExpressionJson[] };

export interface EventFrame {
  seq: number;
  type: string;
  payload: Record<string, unknown>;
}
