/**
 * Dual-rumble output through the standard Gamepad API.
 *
 * The engine's left (low-frequency) channel drives strongMagnitude and
 * the right (high-frequency) channel weakMagnitude; the swap toggle in
 * compilePlan covers controllers with the opposite wiring, this module
 * just pushes commands to whatever pad is connected.
 */

import type { Actuator, ActuatorCommand } from "./playback.js";

interface DualRumbleActuatorLike {
  playEffect(
    type: "dual-rumble",
    params: {
      startDelay: number;
      duration: number;
      strongMagnitude: number;
      weakMagnitude: number;
    },
  ): Promise<unknown>;
  reset?(): Promise<unknown>;
}

interface GamepadLike {
  connected: boolean;
  id: string;
  vibrationActuator?: DualRumbleActuatorLike;
}

type GamepadSource = () => ReadonlyArray<GamepadLike | null>;

const defaultSource: GamepadSource = () =>
  typeof navigator !== "undefined" && typeof navigator.getGamepads === "function"
    ? (navigator.getGamepads() as ReadonlyArray<GamepadLike | null>)
    : [];

/** First connected pad that can rumble, or null. */
export function findRumblePad(source: GamepadSource = defaultSource): GamepadLike | null {
  for (const pad of source()) {
    if (pad && pad.connected && pad.vibrationActuator) {
      return pad;
    }
  }
  return null;
}

export class GamepadActuator implements Actuator {
  private readonly source: GamepadSource;
  private onLost: (() => void) | null;

  constructor(source: GamepadSource = defaultSource, onLost: (() => void) | null = null) {
    this.source = source;
    this.onLost = onLost;
  }

  get available(): boolean {
    return findRumblePad(this.source) !== null;
  }

  issue(command: ActuatorCommand): void {
    const pad = findRumblePad(this.source);
    if (!pad || !pad.vibrationActuator) {
      // Disconnected mid-playback: report once so the UI can abort and
      // offer a replay instead of silently dropping pulses.
      const lost = this.onLost;
      this.onLost = null;
      if (lost) lost();
      return;
    }
    void pad.vibrationActuator.playEffect("dual-rumble", {
      startDelay: 0,
      duration: command.durationMs,
      strongMagnitude: command.strongMagnitude,
      weakMagnitude: command.weakMagnitude,
    });
  }

  stop(): void {
    const pad = findRumblePad(this.source);
    if (pad?.vibrationActuator?.reset) {
      void pad.vibrationActuator.reset();
    } else if (pad?.vibrationActuator) {
      void pad.vibrationActuator.playEffect("dual-rumble", {
        startDelay: 0,
        duration: 1,
        strongMagnitude: 0,
        weakMagnitude: 0,
      });
    }
  }
}
