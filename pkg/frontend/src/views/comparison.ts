/**
 * One A/B comparison screen: play either side as often as you like,
 * pick a side, rate your confidence, submit.
 *
 * Submission stays locked until both options were played at least once
 * AND a confidence is chosen; there is no default confidence, so every
 * rating is an explicit act.
 */

import { CONFIDENCE_LABELS, type QueryView } from "../types.js";

export interface ComparisonViewHandles {
  element: HTMLElement;
  playButtons: { A: HTMLButtonElement; B: HTMLButtonElement };
  confidenceButtons: HTMLButtonElement[];
  submitButton: HTMLButtonElement;
  statusLine: HTMLElement;
  /** Called by the app when a playback actually finished for a side. */
  markPlayed(side: "A" | "B"): void;
  state(): { played: { A: boolean; B: boolean }; choice: "A" | "B" | null; confidence: number | null };
}

export interface ComparisonCallbacks {
  onPlay(side: "A" | "B"): void;
  onSubmit(choice: "A" | "B", confidence: number): void;
}

export function createComparisonView(
  query: QueryView,
  callbacks: ComparisonCallbacks,
): ComparisonViewHandles {
  const played = { A: false, B: false };
  let choice: "A" | "B" | null = null;
  let confidence: number | null = null;

  const element = document.createElement("section");
  element.className = "comparison-view";

  const header = document.createElement("h2");
  header.textContent = `Comparison ${query.round} of ${query.budget}`;
  element.appendChild(header);

  const optionRow = document.createElement("div");
  optionRow.className = "options";
  const playButtons = {} as { A: HTMLButtonElement; B: HTMLButtonElement };
  const chooseButtons = {} as { A: HTMLButtonElement; B: HTMLButtonElement };

  for (const side of ["A", "B"] as const) {
    const card = document.createElement("div");
    card.className = "option-card";

    const title = document.createElement("h3");
    title.textContent = `Option ${side}`;
    card.appendChild(title);

    const play = document.createElement("button");
    play.textContent = `Play ${side}`;
    play.addEventListener("click", () => callbacks.onPlay(side));
    playButtons[side] = play;
    card.appendChild(play);

    const choose = document.createElement("button");
    choose.textContent = `Prefer ${side}`;
    choose.addEventListener("click", () => {
      choice = side;
      chooseButtons.A.classList.toggle("selected", side === "A");
      chooseButtons.B.classList.toggle("selected", side === "B");
      refresh();
    });
    chooseButtons[side] = choose;
    card.appendChild(choose);

    optionRow.appendChild(card);
  }
  element.appendChild(optionRow);

  const confidenceRow = document.createElement("div");
  confidenceRow.className = "confidence";
  const confidenceButtons: HTMLButtonElement[] = [];
  CONFIDENCE_LABELS.forEach((label, i) => {
    const button = document.createElement("button");
    button.textContent = `${i + 1} · ${label}`;
    button.addEventListener("click", () => {
      confidence = i + 1;
      confidenceButtons.forEach((b, j) => b.classList.toggle("selected", j === i));
      refresh();
    });
    confidenceButtons.push(button);
    confidenceRow.appendChild(button);
  });
  element.appendChild(confidenceRow);

  const submitButton = document.createElement("button");
  submitButton.className = "submit";
  submitButton.textContent = "Submit";
  submitButton.disabled = true;
  submitButton.addEventListener("click", () => {
    if (!submitButton.disabled && choice !== null && confidence !== null) {
      callbacks.onSubmit(choice, confidence);
    }
  });
  element.appendChild(submitButton);

  const statusLine = document.createElement("p");
  statusLine.className = "status";
  element.appendChild(statusLine);

  function refresh(): void {
    const ready = played.A && played.B && choice !== null && confidence !== null;
    submitButton.disabled = !ready;
    if (!played.A || !played.B) {
      statusLine.textContent = "Play both options before answering.";
    } else if (choice === null) {
      statusLine.textContent = "Pick the option you prefer.";
    } else if (confidence === null) {
      statusLine.textContent = "How sure are you?";
    } else {
      statusLine.textContent = "";
    }
  }
  refresh();

  return {
    element,
    playButtons,
    confidenceButtons,
    submitButton,
    statusLine,
    markPlayed(side) {
      played[side] = true;
      refresh();
    },
    state: () => ({ played: { ...played }, choice, confidence }),
  };
}
