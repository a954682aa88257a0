import { describe, expect, it, vi } from "vitest";

import { createComparisonView } from "../src/views/comparison.js";
import { CONFIDENCE_LABELS, type QueryView } from "../src/types.js";

import queryFixture from "./fixtures/query_round1.json";

const query = queryFixture as unknown as QueryView;

describe("createComparisonView", () => {
  it("locks submission until both options played and confidence chosen", () => {
    const onSubmit = vi.fn();
    const view = createComparisonView(query, { onPlay: () => undefined, onSubmit });

    expect(view.submitButton.disabled).toBe(true);
    view.submitButton.click();
    expect(onSubmit).not.toHaveBeenCalled();

    // choose + rate, but option B never played: still locked
    view.element.querySelectorAll("button").forEach((b) => {
      if (b.textContent === "Prefer A") b.click();
    });
    view.confidenceButtons[4].click();
    view.markPlayed("A");
    expect(view.submitButton.disabled).toBe(true);
    expect(view.statusLine.textContent).toBe("Play both options before answering.");

    view.markPlayed("B");
    expect(view.submitButton.disabled).toBe(false);

    view.submitButton.click();
    expect(onSubmit).toHaveBeenCalledWith("A", 5);
  });

  it("has no default confidence", () => {
    const view = createComparisonView(query, { onPlay: () => undefined, onSubmit: () => undefined });
    view.markPlayed("A");
    view.markPlayed("B");
    view.element.querySelectorAll("button").forEach((b) => {
      if (b.textContent === "Prefer B") b.click();
    });
    expect(view.state().confidence).toBeNull();
    expect(view.submitButton.disabled).toBe(true);
    expect(view.statusLine.textContent).toBe("How sure are you?");
  });

  it("renders the five verbal confidence anchors", () => {
    const view = createComparisonView(query, { onPlay: () => undefined, onSubmit: () => undefined });
    expect(view.confidenceButtons.length).toBe(5);
    view.confidenceButtons.forEach((button, i) => {
      expect(button.textContent).toContain(CONFIDENCE_LABELS[i]);
      expect(button.textContent).toContain(String(i + 1));
    });
    expect(view.confidenceButtons[0].textContent).toContain("Very Unsure");
    expect(view.confidenceButtons[4].textContent).toContain("Very Sure");
  });

  it("shows the round progress from the engine payload", () => {
    const view = createComparisonView(query, { onPlay: () => undefined, onSubmit: () => undefined });
    const header = view.element.querySelector("h2");
    expect(header?.textContent).toBe(`Comparison ${query.round} of ${query.budget}`);
  });

  it("replay stays allowed after playing", () => {
    const onPlay = vi.fn();
    const view = createComparisonView(query, { onPlay, onSubmit: () => undefined });
    view.playButtons.A.click();
    view.markPlayed("A");
    view.playButtons.A.click();
    expect(onPlay).toHaveBeenCalledTimes(2);
    expect(view.playButtons.A.disabled).toBe(false);
  });
});
