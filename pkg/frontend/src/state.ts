/** Session state as a pure fold over the server's event log.
 *
 * The UI owns no business logic: every durable fact on screen is derived by
 * applying event frames, strictly in sequence-number order, to an initial
 * state. Rebuilding from frames 1..n and applying the same frames
 * incrementally must give identical states (replay determinism) -- the
 * tests enforce that field-for-field.
 */

import type { EventFrame, Phase } from "./types.js";

export type ConnectionStatus = "idle" | "connecting" | "live" | "closed" | "error";

/** Which pane an event updates; the DOM layer repaints only that pane. */
export type Pane = "meta" | "material" | "chat" | "exercise" | "report";

export interface UiEvent {
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
  pane: Pane;
}

export interface ChatEntry {
  role: "student" | "tutor";
  text: string;
  turn: number;
  needsUserInput: boolean;
}

export interface MaterialSectionView {
  heading: string;
  body: string;
  sourceRefs: string[];
}

export interface MaterialView {
  topic: string;
  sections: MaterialSectionView[];
}

export interface SubmissionView {
  exerciseId: string;
  stepIndex: number;
  source: string;
  turn: number;
}

export interface FeedbackView {
  exerciseId: string;
  stepIndex: number;
  verdicts: boolean[];
  suggestions: string[];
  nextAction: string;
  turn: number;
}

export interface ProfileView {
  background: string;
  goals: string;
  selfReportedLevel: string;
  preferredTopics: string[];
}

export interface UiSessionState {
  sessionId: string;
  /** Derived from events; null until the intake event arrives. */
  phase: Phase | null;
  turnCount: number;
  maxTurns: number;
  profile: ProfileView | null;
  /** Latest generated material (the render tree for the material pane). */
  material: MaterialView | null;
  materialCount: number;
  chat: ChatEntry[];
  /** Exercise the student is working, as far as the log shows. */
  exerciseId: string | null;
  stepIndex: number;
  exerciseComplete: boolean;
  submissions: SubmissionView[];
  lastFeedback: FeedbackView | null;
  reportReady: boolean;
  /** Sequence number of the last applied frame; 0 before any. */
  lastSeq: number;
  /** Count of applied frames (equals lastSeq while the log is gap-free). */
  eventCount: number;
  /** Transport status; never touched by applyFrame. */
  connection: ConnectionStatus;
}

export function initialState(sessionId: string): UiSessionState {
  return {
    sessionId,
    phase: null,
    turnCount: 0,
    maxTurns: 0,
    profile: null,
    material: null,
    materialCount: 0,
    chat: [],
    exerciseId: null,
    stepIndex: 0,
    exerciseComplete: false,
    submissions: [],
    lastFeedback: null,
    reportReady: false,
    lastSeq: 0,
    eventCount: 0,
    connection: "idle",
  };
}

export class SequenceGapError extends Error {
  constructor(expected: number, got: number) {
    super(`event stream gap: expected sequence ${expected}, got ${got}`);
    this.name = "SequenceGapError";
  }
}

const PANE_BY_KIND: Record<string, Pane> = {
  intake: "meta",
  material: "material",
  question: "chat",
  answer: "chat",
  submission: "exercise",
  feedback: "exercise",
  report: "report",
};

export function decodeFrame(frame: EventFrame): UiEvent {
  return {
    seq: frame.sequence_number,
    kind: frame.event.kind,
    payload: frame.event.payload ?? {},
    pane: PANE_BY_KIND[frame.event.kind] ?? "meta",
  };
}

function str(value: unknown, fallback = ""): string {
  return typeof value === "string" ? value : fallback;
}

function num(value: unknown, fallback = 0): number {
  return typeof value === "number" && Number.isFinite(value) ? value : fallback;
}

function strings(value: unknown): string[] {
  return Array.isArray(value) ? value.map((item) => str(item)) : [];
}

function bools(value: unknown): boolean[] {
  return Array.isArray(value) ? value.map((item) => Boolean(item)) : [];
}

/** Apply one frame. Duplicates (seq <= lastSeq) are ignored so replays and
 * reconnects stay exactly-once; a gap is a protocol violation and throws. */
export function applyFrame(state: UiSessionState, frame: EventFrame): UiSessionState {
  const event = decodeFrame(frame);
  if (event.seq <= state.lastSeq) {
    return state;
  }
  if (event.seq !== state.lastSeq + 1) {
    throw new SequenceGapError(state.lastSeq + 1, event.seq);
  }

  const next: UiSessionState = {
    ...state,
    lastSeq: event.seq,
    eventCount: state.eventCount + 1,
  };
  const payload = event.payload;

  switch (event.kind) {
    case "intake": {
      next.phase = "studying";
      next.maxTurns = num(payload["max_turns"]);
      next.profile = {
        background: str(payload["background"]),
        goals: str(payload["goals"]),
        selfReportedLevel: str(payload["self_reported_level"]),
        preferredTopics: strings(payload["preferred_topics"]),
      };
      break;
    }
    case "material": {
      next.phase = "studying";
      next.materialCount = state.materialCount + 1;
      const sections = Array.isArray(payload["sections"]) ? payload["sections"] : [];
      next.material = {
        topic: str(payload["topic"]),
        sections: sections.map((section) => {
          const item = (section ?? {}) as Record<string, unknown>;
          return {
            heading: str(item["heading"]),
            body: str(item["body"]),
            sourceRefs: strings(item["source_refs"]),
          };
        }),
      };
      break;
    }
    case "question": {
      next.turnCount = num(payload["turn"], state.turnCount);
      next.chat = [
        ...state.chat,
        { role: "student", text: str(payload["text"]), turn: num(payload["turn"]), needsUserInput: false },
      ];
      break;
    }
    case "answer": {
      next.chat = [
        ...state.chat,
        {
          role: "tutor",
          text: str(payload["text"]),
          turn: num(payload["turn"]),
          needsUserInput: Boolean(payload["needs_user_input"]),
        },
      ];
      break;
    }
    case "submission": {
      next.phase = "exercising";
      next.turnCount = num(payload["turn"], state.turnCount);
      next.exerciseId = str(payload["exercise_id"], state.exerciseId ?? "");
      next.stepIndex = num(payload["step_index"], state.stepIndex);
      next.submissions = [
        ...state.submissions,
        {
          exerciseId: str(payload["exercise_id"]),
          stepIndex: num(payload["step_index"]),
          source: str(payload["source"]),
          turn: num(payload["turn"]),
        },
      ];
      break;
    }
    case "feedback": {
      next.phase = "exercising";
      const stepIndex = num(payload["step_index"]);
      const nextAction = str(payload["next_action"]);
      next.lastFeedback = {
        exerciseId: str(payload["exercise_id"]),
        stepIndex,
        verdicts: bools(payload["verdicts"]),
        suggestions: strings(payload["suggestions"]),
        nextAction,
        turn: num(payload["turn"]),
      };
      if (nextAction === "advance_step") {
        next.stepIndex = stepIndex + 1;
      } else if (nextAction === "exercise_complete") {
        next.exerciseComplete = true;
      }
      break;
    }
    case "report": {
      next.phase = "reporting";
      next.reportReady = true;
      break;
    }
    default:
      // Unknown kinds advance the cursor but change nothing (forward compat).
      break;
  }
  return next;
}

/** Fold an entire recorded log into a fresh state (full replay). */
export function rebuildState(sessionId: string, frames: readonly EventFrame[]): UiSessionState {
  let state = initialState(sessionId);
  for (const frame of frames) {
    state = applyFrame(state, frame);
  }
  return state;
}

export function setConnection(state: UiSessionState, connection: ConnectionStatus): UiSessionState {
  if (state.connection === connection) {
    return state;
  }
  return { ...state, connection };
}

/** Everything the DOM layer needs to enable/disable controls. */
export interface ViewFlags {
  turnLabel: string;
  turnLimitReached: boolean;
  /** Chat input: disabled outside studying/exercising or at the turn cap. */
  inputDisabled: boolean;
  canAskQuestions: boolean;
  canGenerateMaterial: boolean;
  canBeginExercise: boolean;
  canSubmitCode: boolean;
  canGenerateReport: boolean;
  canDownloadReport: boolean;
  banner: string | null;
}

export function deriveView(state: UiSessionState): ViewFlags {
  const phase = state.phase;
  const chatPhase = phase === "studying" || phase === "exercising";
  const turnLimitReached = state.maxTurns > 0 && state.turnCount >= state.maxTurns;
  return {
    turnLabel: `${state.turnCount}/${state.maxTurns}`,
    turnLimitReached,
    inputDisabled: !chatPhase || turnLimitReached,
    canAskQuestions: chatPhase && !turnLimitReached,
    canGenerateMaterial: phase === "studying",
    canBeginExercise: phase === "studying",
    canSubmitCode: phase === "exercising" && !turnLimitReached,
    canGenerateReport: chatPhase,
    canDownloadReport: state.reportReady,
    banner: turnLimitReached
      ? `Turn limit reached (${state.turnCount}/${state.maxTurns}). Generate your learning report to wrap up.`
      : null,
  };
}
