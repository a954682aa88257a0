/**
 * Completion screen: thanks the participant and offers playback of the
 * final recommendation one more time.
 */

import type { Recommendation } from "../types.js";

export interface CompleteViewHandles {
  element: HTMLElement;
  replayButton: HTMLButtonElement;
}

export function createCompleteView(
  recommendation: Recommendation,
  onReplay: () => void,
): CompleteViewHandles {
  const element = document.createElement("section");
  element.className = "complete-view";

  const header = document.createElement("h2");
  header.textContent = "All done";
  element.appendChild(header);

  const text = document.createElement("p");
  const p = recommendation.params;
  text.textContent =
    "Your learned favorite: " +
    `intensity ${p.intensity.toFixed(3)}, balance ${p.balance.toFixed(3)}, ` +
    `rhythm ${p.rhythm.toFixed(3)}, grain ${p.grain.toFixed(3)}.`;
  element.appendChild(text);

  const replayButton = document.createElement("button");
  replayButton.textContent = "Play it again";
  replayButton.addEventListener("click", onReplay);
  element.appendChild(replayButton);

  return { element, replayButton };
}
