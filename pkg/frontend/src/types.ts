/** Wire types for the coding-education service HTTP API. */

/** One record in the server's append-only session event log. */
export interface EventRecord {
  ts: string;
  kind: string;
  payload: Record<string, unknown>;
}

/** One frame from `GET /sessions/{id}/events` (decoded SSE `data:` JSON). */
export interface EventFrame {
  sequence_number: number;
  event: EventRecord;
}

export type Phase = "intake" | "studying" | "exercising" | "reporting" | "closed";

/** Response of `POST /sessions` and `GET /sessions/{id}`. */
export interface SessionDescriptor {
  session_id: string;
  phase: Phase;
  turn_count: number;
  max_turns: number;
  has_material: boolean;
  exercises: string[];
  current_steps: Record<string, number>;
  has_report: boolean;
  event_count: number;
}

export interface IntakeForm {
  background: string;
  goals: string;
  self_reported_level: string;
  preferred_topics: string[];
}

/** Response of `POST /sessions/{id}/messages`. */
export interface MessageResponse {
  answer: string;
  turn_count: number;
  needs_user_input: boolean;
}

export interface MaterialSectionWire {
  heading: string;
  body: string;
  source_refs: string[];
}

/** Response of `POST /sessions/{id}/material`. */
export interface MaterialResponse {
  topic: string;
  generated_for: string;
  sections: MaterialSectionWire[];
}

export interface ExerciseStepWire {
  index: number;
  prompt: string;
  hint: string;
  case_count: number;
}

/** Response of `POST /sessions/{id}/exercises` (expected outputs stay server-side). */
export interface ExerciseResponse {
  exercise_id: string;
  statement: string;
  topics: string[];
  current_step: number;
  steps: ExerciseStepWire[];
}

/** Response of `POST /sessions/{id}/exercises/{eid}/submissions`. */
export interface SubmissionResponse {
  exercise_id: string;
  step_index: number;
  verdicts: boolean[];
  passed_count: number;
  case_count: number;
  all_passed: boolean;
  suggestions: string[];
  next_action: "advance_step" | "exercise_complete" | "retry_step" | string;
  turn_count: number;
  current_step: number | null;
}

/** Response of `POST /sessions/{id}/report`. */
export interface ReportInfo {
  phase: Phase;
  filename: string;
  size_bytes: number;
}

/** Error envelope every non-2xx response carries. */
export interface ApiErrorBody {
  error: {
    code: string;
    message: string;
    detail?: unknown;
  };
}
