/**
 * Hardware-free preview: a visual pulse bar plus an audio click train.
 *
 * Runs through the same Actuator interface and the same scheduler as the
 * gamepad path, so its timing is identical by construction; only the
 * output medium differs. Sessions played this way are flagged to the
 * engine (fallback=true) so hardware-free rounds stay distinguishable.
 */

import type { Actuator, ActuatorCommand } from "./playback.js";

interface AudioContextLike {
  currentTime: number;
  destination: unknown;
  createOscillator(): {
    frequency: { value: number };
    connect(node: unknown): void;
    start(when?: number): void;
    stop(when?: number): void;
  };
  createGain(): {
    gain: { value: number };
    connect(node: unknown): void;
  };
}

export class FallbackActuator implements Actuator {
  private readonly bar: HTMLElement;
  private readonly audio: AudioContextLike | null;
  private clearTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(bar: HTMLElement, audio: AudioContextLike | null = null) {
    this.bar = bar;
    this.audio = audio;
    this.bar.classList.add("pulse-bar");
    this.bar.style.transformOrigin = "left";
    this.bar.style.transform = "scaleX(0)";
  }

  issue(command: ActuatorCommand): void {
    // Bar width tracks the stronger channel; a data attribute carries both
    // magnitudes so the harness (and CSS) can read exact values back.
    const level = Math.max(command.strongMagnitude, command.weakMagnitude);
    this.bar.style.transform = `scaleX(${level})`;
    this.bar.dataset.strong = command.strongMagnitude.toFixed(3);
    this.bar.dataset.weak = command.weakMagnitude.toFixed(3);
    this.bar.dataset.active = "1";
    if (this.clearTimer !== null) {
      clearTimeout(this.clearTimer);
    }
    this.clearTimer = setTimeout(() => {
      this.bar.style.transform = "scaleX(0)";
      this.bar.dataset.active = "0";
      this.clearTimer = null;
    }, command.durationMs);

    if (this.audio) {
      const osc = this.audio.createOscillator();
      const gain = this.audio.createGain();
      gain.gain.value = 0.25 * level;
      osc.frequency.value = 80 + 340 * command.weakMagnitude;
      osc.connect(gain);
      gain.connect(this.audio.destination);
      const t = this.audio.currentTime;
      osc.start(t);
      osc.stop(t + command.durationMs / 1000);
    }
  }

  stop(): void {
    if (this.clearTimer !== null) {
      clearTimeout(this.clearTimer);
      this.clearTimer = null;
    }
    this.bar.style.transform = "scaleX(0)";
    this.bar.dataset.active = "0";
  }
}
