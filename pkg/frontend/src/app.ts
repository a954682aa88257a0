/**
 * Session flow orchestration: fetch state from the engine, render the
 * matching view, route playback through one shared scheduler, and push
 * answers back. Pure glue; every number on screen or on the actuators
 * originated in an engine response.
 */

import { EngineClient, EngineError } from "./api.js";
import { FallbackActuator } from "./fallback.js";
import { GamepadActuator } from "./gamepad.js";
import {
  compilePlan,
  PlaybackScheduler,
  type Actuator,
  type PlaybackOutcome,
} from "./playback.js";
import type { PulseTimeline, Recommendation, SignalParams } from "./types.js";
import { createAdjustmentView } from "./views/adjustment.js";
import { createComparisonView } from "./views/comparison.js";
import { createCompleteView } from "./views/complete.js";
import { createValidationView } from "./views/validation.js";

export interface AppOptions {
  root: HTMLElement;
  client: EngineClient;
  budget?: number;
  seed?: number;
  swapMotors?: boolean;
  scheduler?: PlaybackScheduler;
  gamepad?: GamepadActuator;
}

export class SessionApp {
  private readonly root: HTMLElement;
  private readonly client: EngineClient;
  private readonly scheduler: PlaybackScheduler;
  private readonly gamepad: GamepadActuator;
  private readonly fallbackBar: HTMLElement;
  private readonly fallback: FallbackActuator;
  private readonly options: AppOptions;
  private sessionId = "";
  private swapMotors: boolean;
  /** True when the last playback ran on the fallback preview. */
  usedFallback = false;

  constructor(options: AppOptions) {
    this.options = options;
    this.root = options.root;
    this.client = options.client;
    this.swapMotors = options.swapMotors ?? false;
    this.scheduler = options.scheduler ?? new PlaybackScheduler();
    this.gamepad =
      options.gamepad ?? new GamepadActuator(undefined, () => this.scheduler.abort());
    this.fallbackBar = document.createElement("div");
    this.fallback = new FallbackActuator(this.fallbackBar);
  }

  setSwapMotors(on: boolean): void {
    this.swapMotors = on;
  }

  async start(): Promise<void> {
    const info = await this.client.createSession({
      budget: this.options.budget,
      seed: this.options.seed,
    });
    this.sessionId = info.session_id;
    await this.showLearning();
  }

  /** Play a timeline on the pad when present, otherwise on the preview. */
  async playTimeline(timeline: PulseTimeline): Promise<PlaybackOutcome> {
    const plan = compilePlan(timeline, this.swapMotors);
    let actuator: Actuator;
    if (this.gamepad.available) {
      actuator = this.gamepad;
      this.usedFallback = false;
    } else {
      actuator = this.fallback;
      this.usedFallback = true;
    }
    return this.scheduler.play(plan, actuator);
  }

  private clearRoot(): void {
    this.root.replaceChildren(this.fallbackBar);
  }

  private showError(err: unknown): void {
    const line = document.createElement("p");
    line.className = "error";
    line.textContent = err instanceof EngineError ? err.message : String(err);
    this.root.appendChild(line);
  }

  private async showLearning(): Promise<void> {
    const query = await this.client.getQuery(this.sessionId);
    this.clearRoot();
    let fallbackUsed = false;
    const view = createComparisonView(query, {
      onPlay: async (side) => {
        const outcome = await this.playTimeline(query.pair[side].timeline);
        if (outcome === "completed") {
          fallbackUsed = fallbackUsed || this.usedFallback;
          view.markPlayed(side);
        }
      },
      onSubmit: async (choice, confidence) => {
        try {
          const result = await this.client.postResponse(
            this.sessionId,
            choice,
            confidence,
            query.round,
            fallbackUsed,
          );
          if (result.phase === "learning") {
            await this.showLearning();
          } else {
            await this.showValidation();
          }
        } catch (err) {
          this.showError(err);
        }
      },
    });
    this.root.appendChild(view.element);
  }

  private async showValidation(): Promise<void> {
    let result;
    try {
      result = await this.client.getValidation(this.sessionId);
    } catch (err) {
      this.showError(err);
      return;
    }
    const validation = result;
    this.clearRoot();
    const view = createValidationView(validation, {
      onPlay: async (side) => {
        const outcome = await this.playTimeline(validation.pair[side].timeline);
        if (outcome === "completed") {
          view.markPlayed(side);
        }
      },
      onChoose: async (side) => {
        try {
          const answer = await this.client.postValidationResponse(
            this.sessionId,
            validation.tag,
            side,
            this.usedFallback,
          );
          if (answer.phase === "validation") {
            await this.showValidation();
          } else {
            await this.showAdjustment();
          }
        } catch (err) {
          this.showError(err);
        }
      },
    });
    this.root.appendChild(view.element);
  }

  private async showAdjustment(): Promise<void> {
    const recommendation = await this.client.getRecommendation(this.sessionId);
    this.clearRoot();
    const view = createAdjustmentView(recommendation.params, {
      onPreview: async (params: SignalParams) => {
        try {
          const preview = await this.client.postPreview(this.sessionId, params);
          await this.playTimeline(preview.timeline);
        } catch (err) {
          this.showError(err);
        }
      },
      onSave: async (params: SignalParams) => {
        try {
          const saved = await this.client.postFavorite(this.sessionId, params);
          view.setSavedCount(saved.count);
          if (saved.phase === "complete") {
            await this.showComplete(recommendation);
          }
        } catch (err) {
          this.showError(err);
        }
      },
    });
    this.root.appendChild(view.element);
  }

  private async showComplete(recommendation: Recommendation): Promise<void> {
    this.clearRoot();
    const view = createCompleteView(recommendation, () => {
      void this.playTimeline(recommendation.timeline);
    });
    this.root.appendChild(view.element);
  }
}
