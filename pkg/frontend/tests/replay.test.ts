/** Replay determinism over a session log recorded from the real server:
 * rebuilding state from frames 1..n must equal applying the same frames
 * incrementally, field for field, at every prefix length. */

import { describe, expect, it } from "vitest";

import {
  applyFrame,
  initialState,
  rebuildState,
  SequenceGapError,
  type UiSessionState,
} from "../src/state.js";
import type { EventFrame, SessionDescriptor } from "../src/types.js";
import fixture from "./fixtures/session-events.json";

const frames = fixture.frames as EventFrame[];
const descriptor = fixture.descriptor as SessionDescriptor;
const SID = descriptor.session_id;

function fieldForField(a: UiSessionState, b: UiSessionState): void {
  const keys = new Set([...Object.keys(a), ...Object.keys(b)]);
  for (const key of keys) {
    expect(b[key as keyof UiSessionState], `field ${key}`).toEqual(
      a[key as keyof UiSessionState],
    );
  }
}

describe("recorded session log", () => {
  it("holds exactly 50 frames with contiguous sequence numbers", () => {
    expect(frames).toHaveLength(50);
    frames.forEach((frame, index) => {
      expect(frame.sequence_number).toBe(index + 1);
    });
  });

  it("rebuild equals incremental application, field for field", () => {
    const rebuilt = rebuildState(SID, frames);
    let incremental = initialState(SID);
    for (const frame of frames) {
      incremental = applyFrame(incremental, frame);
    }
    fieldForField(rebuilt, incremental);
    expect(incremental).toEqual(rebuilt);
  });

  it("holds at every prefix length, not just the full log", () => {
    let incremental = initialState(SID);
    for (let n = 1; n <= frames.length; n += 1) {
      incremental = applyFrame(incremental, frames[n - 1]!);
      const rebuilt = rebuildState(SID, frames.slice(0, n));
      fieldForField(rebuilt, incremental);
    }
  });

  it("is insensitive to chunk boundaries (replay + live tail splits)", () => {
    const full = rebuildState(SID, frames);
    for (const splitAt of [1, 7, 25, 49]) {
      let state = rebuildState(SID, frames.slice(0, splitAt));
      for (const frame of frames.slice(splitAt)) {
        state = applyFrame(state, frame);
      }
      fieldForField(full, state);
    }
  });

  it("applies duplicated frames exactly once (reconnect overlap)", () => {
    const once = rebuildState(SID, frames);
    let overlapped = initialState(SID);
    for (const frame of frames) {
      overlapped = applyFrame(overlapped, frame);
      overlapped = applyFrame(overlapped, frame); // duplicate delivery
    }
    fieldForField(once, overlapped);
  });

  it("refuses sequence gaps", () => {
    let state = initialState(SID);
    state = applyFrame(state, frames[0]!);
    expect(() => applyFrame(state, frames[2]!)).toThrow(SequenceGapError);
  });

  it("matches the server's own descriptor after the full fold", () => {
    const state = rebuildState(SID, frames);
    expect(state.turnCount).toBe(descriptor.turn_count);
    expect(state.maxTurns).toBe(descriptor.max_turns);
    expect(state.phase).toBe(descriptor.phase);
    expect(state.eventCount).toBe(descriptor.event_count);
    expect(state.reportReady).toBe(descriptor.has_report);
    expect(state.material !== null).toBe(descriptor.has_material);
    expect(state.exerciseId).toBe(descriptor.exercises[0]);
    expect(state.stepIndex).toBe(descriptor.current_steps[state.exerciseId ?? ""]);
  });

  it("carries the whole workflow: materials, chat, submissions, report", () => {
    const state = rebuildState(SID, frames);
    expect(state.materialCount).toBe(2);
    expect(state.chat.filter((entry) => entry.role === "student")).toHaveLength(16);
    expect(state.chat.filter((entry) => entry.role === "tutor")).toHaveLength(16);
    expect(state.submissions).toHaveLength(7);
    expect(state.exerciseComplete).toBe(true);
    expect(state.lastFeedback?.nextAction).toBe("retry_step");
    expect(state.reportReady).toBe(true);
  });

  it("never lets applyFrame mutate its input state", () => {
    const before = rebuildState(SID, frames.slice(0, 10));
    const snapshot = JSON.parse(JSON.stringify(before));
    applyFrame(before, frames[10]!);
    expect(before).toEqual(snapshot);
  });
});
