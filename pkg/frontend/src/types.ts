/**
 * Wire types for the session HTTP API. These mirror the engine's JSON
 * exactly; the client never derives any of these numbers itself.
 */

export interface SignalParams {
  intensity: number;
  balance: number;
  rhythm: number;
  grain: number;
}

export interface Pulse {
  start_ms: number;
  duration_ms: number;
  left: number;
  right: number;
}

export interface PulseTimeline {
  total_ms: number;
  pulses: Pulse[];
}

export interface SignalOption {
  params: SignalParams;
  timeline: PulseTimeline;
}

export type Phase = "learning" | "validation" | "adjustment" | "complete";

export interface SessionInfo {
  session_id: string;
  seed: number;
  budget: number;
}

export interface QueryView {
  round: number;
  budget: number;
  pair: { A: SignalOption; B: SignalOption };
}

export interface ResponseResult {
  round_completed: number;
  phase: Phase;
  next_round: number | null;
}

export interface Recommendation {
  params: SignalParams;
  timeline: PulseTimeline;
  posterior_mean: number;
  point: number[];
}

export type ValidationTag =
  | "anchor_easy"
  | "anchor_medium"
  | "global_tradeoff"
  | "consistency_check";

export interface ValidationView {
  index: number;
  total: number;
  tag: ValidationTag;
  pair: { A: SignalOption; B: SignalOption };
}

export interface ValidationResult {
  tag: ValidationTag;
  matches_model: boolean;
  phase: Phase;
  remaining: number;
  consistency_ok: boolean | null;
}

export interface FavoriteResult {
  count: number;
  phase: Phase;
  posterior_percentile: number;
}

export interface PreviewResult {
  params: SignalParams;
  timeline: PulseTimeline;
}

/** Exact engine slider ranges; the adjustment panel must not widen or narrow them. */
export const PARAM_RANGES: Record<keyof SignalParams, [number, number]> = {
  intensity: [0.2, 1.0],
  balance: [0.0, 1.0],
  rhythm: [0.6, 4.0],
  grain: [0.1, 0.7],
};

export const CONFIDENCE_LABELS: ReadonlyArray<string> = [
  "Very Unsure",
  "Unsure",
  "Neutral",
  "Sure",
  "Very Sure",
];
