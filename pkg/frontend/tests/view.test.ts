/** Turn-limit UX: with the server at its turn cap, the input is disabled
 * and the server's own 429 message is what the user sees. The fixture was
 * recorded from a real session driven to 20/20 turns. */

import { describe, expect, it } from "vitest";

import { apiErrorFromBody, surfaceError } from "../src/client.js";
import { deriveView, rebuildState } from "../src/state.js";
import type { EventFrame, SessionDescriptor } from "../src/types.js";
import fixture from "./fixtures/turn-limit.json";

const frames = fixture.frames as EventFrame[];
const descriptor = fixture.descriptor as SessionDescriptor;
const rejection = fixture.rejection as { error: { code: string; message: string } };

describe("turn-limit UX", () => {
  it("the recorded session really sits at its cap", () => {
    expect(descriptor.turn_count).toBe(20);
    expect(descriptor.max_turns).toBe(20);
  });

  it("disables the chat input at 20/20 turns", () => {
    const state = rebuildState(descriptor.session_id, frames);
    expect(state.turnCount).toBe(20);
    expect(state.maxTurns).toBe(20);
    const view = deriveView(state);
    expect(view.turnLimitReached).toBe(true);
    expect(view.inputDisabled).toBe(true);
    expect(view.canAskQuestions).toBe(false);
    expect(view.canSubmitCode).toBe(false);
    expect(view.turnLabel).toBe("20/20");
    expect(view.banner).toContain("20/20");
  });

  it("keeps the input enabled below the cap", () => {
    const state = rebuildState(descriptor.session_id, frames.slice(0, frames.length - 2));
    expect(state.turnCount).toBe(19);
    const view = deriveView(state);
    expect(view.turnLimitReached).toBe(false);
    expect(view.inputDisabled).toBe(false);
    expect(view.canAskQuestions).toBe(true);
  });

  it("still allows the report at the cap", () => {
    const state = rebuildState(descriptor.session_id, frames);
    expect(deriveView(state).canGenerateReport).toBe(true);
  });

  it("surfaces the server's 429 verbatim", () => {
    const error = apiErrorFromBody(429, rejection);
    expect(error.status).toBe(429);
    expect(error.code).toBe("turn_limit");
    expect(error.isTurnLimit).toBe(true);
    expect(error.message).toBe(rejection.error.message);
    expect(surfaceError(error)).toContain(rejection.error.message);
  });
});
