/**
 * Phase-2 fine-tuning panel: four sliders wired to the engine's exact
 * parameter ranges, a preview button that plays the engine-compiled
 * timeline, and a save button. Three saves finish the session.
 *
 * The sliders make out-of-range values impossible by construction; the
 * panel never renders a timeline it computed itself.
 */

import { PARAM_RANGES, type SignalParams } from "../types.js";

export interface AdjustmentViewHandles {
  element: HTMLElement;
  sliders: Record<keyof SignalParams, HTMLInputElement>;
  previewButton: HTMLButtonElement;
  saveButton: HTMLButtonElement;
  savedLine: HTMLElement;
  currentParams(): SignalParams;
  setParams(params: SignalParams): void;
  setSavedCount(count: number): void;
}

export interface AdjustmentCallbacks {
  onPreview(params: SignalParams): void;
  onSave(params: SignalParams): void;
}

const SLIDER_STEP = 0.001;
const PARAM_ORDER: ReadonlyArray<keyof SignalParams> = [
  "intensity",
  "balance",
  "rhythm",
  "grain",
];

export function createAdjustmentView(
  initial: SignalParams,
  callbacks: AdjustmentCallbacks,
): AdjustmentViewHandles {
  const element = document.createElement("section");
  element.className = "adjustment-view";

  const header = document.createElement("h2");
  header.textContent = "Fine-tune your signal";
  element.appendChild(header);

  const sliders = {} as Record<keyof SignalParams, HTMLInputElement>;
  for (const name of PARAM_ORDER) {
    const [lo, hi] = PARAM_RANGES[name];
    const row = document.createElement("label");
    row.className = "slider-row";

    const caption = document.createElement("span");
    caption.textContent = name;
    row.appendChild(caption);

    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = String(lo);
    slider.max = String(hi);
    slider.step = String(SLIDER_STEP);
    slider.value = String(initial[name]);
    slider.name = name;
    row.appendChild(slider);

    const value = document.createElement("output");
    value.textContent = Number(slider.value).toFixed(3);
    slider.addEventListener("input", () => {
      value.textContent = Number(slider.value).toFixed(3);
    });
    row.appendChild(value);

    sliders[name] = slider;
    element.appendChild(row);
  }

  function currentParams(): SignalParams {
    return {
      intensity: Number(sliders.intensity.value),
      balance: Number(sliders.balance.value),
      rhythm: Number(sliders.rhythm.value),
      grain: Number(sliders.grain.value),
    };
  }

  const buttonRow = document.createElement("div");
  buttonRow.className = "actions";

  const previewButton = document.createElement("button");
  previewButton.textContent = "Preview";
  previewButton.addEventListener("click", () => callbacks.onPreview(currentParams()));
  buttonRow.appendChild(previewButton);

  const saveButton = document.createElement("button");
  saveButton.textContent = "Save favorite";
  saveButton.addEventListener("click", () => callbacks.onSave(currentParams()));
  buttonRow.appendChild(saveButton);

  element.appendChild(buttonRow);

  const savedLine = document.createElement("p");
  savedLine.className = "saved";
  savedLine.textContent = "Favorites saved: 0 of 3";
  element.appendChild(savedLine);

  return {
    element,
    sliders,
    previewButton,
    saveButton,
    savedLine,
    currentParams,
    setParams(params) {
      for (const name of PARAM_ORDER) {
        sliders[name].value = String(params[name]);
        sliders[name].dispatchEvent(new Event("input"));
      }
    },
    setSavedCount(count) {
      savedLine.textContent = `Favorites saved: ${count} of 3`;
      saveButton.disabled = count >= 3;
    },
  };
}
