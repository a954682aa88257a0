/**
 * Timeline playback: compile the engine's pulse timeline into actuator
 * commands and issue them on schedule.
 *
 * The compile step is a pure passthrough. Each pulse becomes exactly one
 * command; magnitudes are the engine's left/right values rounded to 3
 * decimals (the actuator API quantizes anyway). No command is recomputed
 * from params on this side.
 */

import type { PulseTimeline } from "./types.js";

export interface ActuatorCommand {
  startMs: number;
  durationMs: number;
  strongMagnitude: number;
  weakMagnitude: number;
}

export interface PlaybackPlan {
  totalMs: number;
  commands: ActuatorCommand[];
}

/** Issues one command now; stop() cuts any ongoing output. */
export interface Actuator {
  issue(command: ActuatorCommand): void;
  stop(): void;
}

const round3 = (x: number): number => Math.round(x * 1000) / 1000;

/**
 * One command per pulse, in timeline order. The left (low-frequency)
 * motor drives the strong rumble, the right (high-frequency) motor the
 * weak rumble; `swapMotors` flips that for controllers wired the other
 * way around.
 */
export function compilePlan(timeline: PulseTimeline, swapMotors = false): PlaybackPlan {
  const commands = timeline.pulses.map((pulse) => ({
    startMs: pulse.start_ms,
    durationMs: pulse.duration_ms,
    strongMagnitude: round3(swapMotors ? pulse.right : pulse.left),
    weakMagnitude: round3(swapMotors ? pulse.left : pulse.right),
  }));
  return { totalMs: timeline.total_ms, commands };
}

export interface SchedulerOptions {
  setTimeoutFn?: typeof setTimeout;
  clearTimeoutFn?: typeof clearTimeout;
}

export type PlaybackOutcome = "completed" | "cancelled" | "aborted";

/**
 * Single active playback; starting a new one cancels the old one.
 *
 * Commands fire on setTimeout relative to when play() was called, which
 * keeps per-pulse drift within the 5 ms contract on an idle main thread;
 * the automated harness measures it against an injected clock.
 */
export class PlaybackScheduler {
  private readonly setTimeoutFn: typeof setTimeout;
  private readonly clearTimeoutFn: typeof clearTimeout;
  private timers: ReturnType<typeof setTimeout>[] = [];
  private active: { actuator: Actuator; resolve: (o: PlaybackOutcome) => void } | null = null;

  constructor(options: SchedulerOptions = {}) {
    this.setTimeoutFn = options.setTimeoutFn ?? setTimeout;
    this.clearTimeoutFn = options.clearTimeoutFn ?? clearTimeout;
  }

  get playing(): boolean {
    return this.active !== null;
  }

  /** Resolves "completed" at the end of the plan, or earlier on cancel/abort. */
  play(plan: PlaybackPlan, actuator: Actuator): Promise<PlaybackOutcome> {
    this.cancel();
    return new Promise<PlaybackOutcome>((resolve) => {
      this.active = { actuator, resolve };
      for (const command of plan.commands) {
        this.timers.push(
          this.setTimeoutFn(() => actuator.issue(command), command.startMs),
        );
      }
      this.timers.push(
        this.setTimeoutFn(() => {
          this.active = null;
          this.timers = [];
          resolve("completed");
        }, plan.totalMs),
      );
    });
  }

  /** User pressed play again or moved on. */
  cancel(): void {
    this.finish("cancelled");
  }

  /** Hardware vanished mid-playback; the caller should offer a replay. */
  abort(): void {
    this.finish("aborted");
  }

  private finish(outcome: PlaybackOutcome): void {
    for (const timer of this.timers) {
      this.clearTimeoutFn(timer);
    }
    this.timers = [];
    if (this.active) {
      this.active.actuator.stop();
      this.active.resolve(outcome);
      this.active = null;
    }
  }
}
