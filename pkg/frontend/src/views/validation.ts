/**
 * Validation round screen: same A/B playback as learning, but the answer
 * is just a side; no confidence rating. The engine decides pair order
 * and content, the view only renders what it was given.
 */

import type { ValidationView } from "../types.js";

export interface ValidationViewHandles {
  element: HTMLElement;
  playButtons: { A: HTMLButtonElement; B: HTMLButtonElement };
  chooseButtons: { A: HTMLButtonElement; B: HTMLButtonElement };
  markPlayed(side: "A" | "B"): void;
}

export interface ValidationCallbacks {
  onPlay(side: "A" | "B"): void;
  onChoose(side: "A" | "B"): void;
}

const TAG_TITLES: Record<string, string> = {
  anchor_easy: "Which feels better?",
  anchor_medium: "Which feels better?",
  global_tradeoff: "Which feels better?",
  consistency_check: "One more: which feels better?",
};

export function createValidationView(
  view: ValidationView,
  callbacks: ValidationCallbacks,
): ValidationViewHandles {
  const played = { A: false, B: false };

  const element = document.createElement("section");
  element.className = "validation-view";

  const header = document.createElement("h2");
  header.textContent = `Check ${view.index + 1} of ${view.total}`;
  element.appendChild(header);

  const prompt = document.createElement("p");
  prompt.textContent = TAG_TITLES[view.tag] ?? "Which feels better?";
  element.appendChild(prompt);

  const playButtons = {} as { A: HTMLButtonElement; B: HTMLButtonElement };
  const chooseButtons = {} as { A: HTMLButtonElement; B: HTMLButtonElement };

  const row = document.createElement("div");
  row.className = "options";
  for (const side of ["A", "B"] as const) {
    const card = document.createElement("div");
    card.className = "option-card";

    const play = document.createElement("button");
    play.textContent = `Play ${side}`;
    play.addEventListener("click", () => callbacks.onPlay(side));
    playButtons[side] = play;
    card.appendChild(play);

    const choose = document.createElement("button");
    choose.textContent = `Prefer ${side}`;
    choose.disabled = true;
    choose.addEventListener("click", () => {
      if (!choose.disabled) callbacks.onChoose(side);
    });
    chooseButtons[side] = choose;
    card.appendChild(choose);

    row.appendChild(card);
  }
  element.appendChild(row);

  function refresh(): void {
    const both = played.A && played.B;
    chooseButtons.A.disabled = !both;
    chooseButtons.B.disabled = !both;
  }

  return {
    element,
    playButtons,
    chooseButtons,
    markPlayed(side) {
      played[side] = true;
      refresh();
    },
  };
}
