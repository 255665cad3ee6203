/** DOM wiring: binds the pure state fold, the API client, and the event
 * stream to the page. All durable UI state flows through applyFrame; REST
 * responses only trigger repaints, never merge into the replayed state
 * (exercise details are session-scoped resources fetched by id).
 */

import { ApiClient, ApiError, reportBlob, surfaceError } from "./client.js";
import {
  applyFrame,
  deriveView,
  initialState,
  setConnection,
  type ConnectionStatus,
  type UiSessionState,
} from "./state.js";
import {
  renderChat,
  renderExercisePanel,
  renderFeedback,
  renderMaterial,
  renderSubmissionHistory,
} from "./render.js";
import { EventStreamController } from "./stream.js";
import type { EventFrame, ExerciseResponse } from "./types.js";

interface AppOptions {
  baseUrl?: string;
}

export function mount(root: HTMLElement, options: AppOptions = {}): void {
  const client = new ApiClient(options.baseUrl ?? "");
  root.innerHTML = LAYOUT;

  const el = {
    intake: must(root, "#intake-view"),
    session: must(root, "#session-view"),
    intakeForm: must(root, "#intake-form") as HTMLFormElement,
    intakeError: must(root, "#intake-error"),
    phase: must(root, "#phase-badge"),
    turns: must(root, "#turn-counter"),
    connection: must(root, "#connection-dot"),
    banner: must(root, "#banner"),
    toast: must(root, "#toast"),
    material: must(root, "#material-pane"),
    materialTopic: must(root, "#material-topic") as HTMLInputElement,
    materialButton: must(root, "#material-button") as HTMLButtonElement,
    chat: must(root, "#chat-pane"),
    chatInput: must(root, "#chat-input") as HTMLTextAreaElement,
    chatSend: must(root, "#chat-send") as HTMLButtonElement,
    exercise: must(root, "#exercise-pane"),
    beginButton: must(root, "#begin-button") as HTMLButtonElement,
    editor: must(root, "#code-editor") as HTMLTextAreaElement,
    submitButton: must(root, "#submit-button") as HTMLButtonElement,
    feedback: must(root, "#feedback-pane"),
    history: must(root, "#history-pane"),
    reportButton: must(root, "#report-button") as HTMLButtonElement,
    downloadButton: must(root, "#download-button") as HTMLButtonElement,
  };

  let state: UiSessionState | null = null;
  let exercise: ExerciseResponse | null = null;
  let pendingQuestions: string[] = [];
  let stream: EventStreamController | null = null;

  function repaint(): void {
    if (state === null) {
      el.intake.classList.remove("hidden");
      el.session.classList.add("hidden");
      return;
    }
    el.intake.classList.add("hidden");
    el.session.classList.remove("hidden");
    const view = deriveView(state);

    el.phase.textContent = state.phase ?? "connecting";
    el.turns.textContent = `turns ${view.turnLabel}`;
    el.connection.dataset["status"] = state.connection;
    el.connection.title = `event stream: ${state.connection}`;

    el.banner.textContent = view.banner ?? "";
    el.banner.classList.toggle("hidden", view.banner === null);

    el.material.innerHTML = renderMaterial(state.material);
    el.materialButton.disabled = !view.canGenerateMaterial;

    el.chat.innerHTML = renderChat(state.chat, pendingQuestions);
    el.chat.scrollTop = el.chat.scrollHeight;
    el.chatInput.disabled = view.inputDisabled;
    el.chatSend.disabled = view.inputDisabled;
    el.chatInput.placeholder = view.turnLimitReached
      ? "Turn limit reached - the tutor cannot take more questions."
      : "Ask the tutor a question…";

    el.beginButton.disabled = !view.canBeginExercise;
    el.exercise.innerHTML = renderExercisePanel(exercise, state.stepIndex, state.exerciseComplete);
    const editorOn = view.canSubmitCode && exercise !== null && !state.exerciseComplete;
    el.editor.disabled = !editorOn;
    el.submitButton.disabled = !editorOn;
    el.feedback.innerHTML = renderFeedback(state.lastFeedback);
    el.history.innerHTML = renderSubmissionHistory(state);

    el.reportButton.disabled = !view.canGenerateReport;
    el.downloadButton.disabled = !view.canDownloadReport;
    el.downloadButton.title = view.canDownloadReport
      ? "Download the learning report"
      : "Generate the report first";
  }

  function toast(message: string): void {
    el.toast.textContent = message;
    el.toast.classList.remove("hidden");
    setTimeout(() => el.toast.classList.add("hidden"), 4000);
  }

  function fail(error: unknown): void {
    if (error instanceof ApiError && error.isTurnLimit && state !== null) {
      // Surface the server's own 429 words, not a client guess.
      el.banner.textContent = `Turn limit: ${error.message}`;
      el.banner.classList.remove("hidden");
      el.chatInput.disabled = true;
      el.chatSend.disabled = true;
      return;
    }
    toast(surfaceError(error));
  }

  function onFrame(frame: EventFrame): void {
    if (state === null) {
      return;
    }
    state = applyFrame(state, frame);
    const kind = frame.event.kind;
    if (kind === "question" || kind === "answer") {
      const text = String(frame.event.payload["text"] ?? "");
      pendingQuestions = pendingQuestions.filter((pending) => pending !== text);
    }
    repaint();
  }

  function onStatus(status: ConnectionStatus): void {
    if (state !== null) {
      state = setConnection(state, status);
      repaint();
    }
  }

  function attachSession(sessionId: string): void {
    state = initialState(sessionId);
    exercise = null;
    pendingQuestions = [];
    window.location.hash = `sid=${encodeURIComponent(sessionId)}`;
    stream?.stop();
    // One stream per tab; replay starts at frame 1 and rebuilds everything.
    stream = new EventStreamController({
      urlFor: (fromSeq) => client.eventsUrl(sessionId, fromSeq),
      getLastSeq: () => state?.lastSeq ?? 0,
      onFrame,
      onStatus: (status) => onStatus(status === "connecting" ? "connecting" : status),
    });
    stream.connect();
    repaint();
  }

  el.intakeForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(el.intakeForm);
    const topics = String(data.get("preferred_topics") ?? "")
      .split(",")
      .map((topic) => topic.trim())
      .filter((topic) => topic.length > 0);
    client
      .createSession({
        background: String(data.get("background") ?? ""),
        goals: String(data.get("goals") ?? ""),
        self_reported_level: String(data.get("self_reported_level") ?? "medium"),
        preferred_topics: topics,
      })
      .then((descriptor) => {
        el.intakeError.textContent = "";
        attachSession(descriptor.session_id);
      })
      .catch((error) => {
        el.intakeError.textContent = surfaceError(error);
      });
  });

  el.chatSend.addEventListener("click", () => {
    if (state === null) {
      return;
    }
    const text = el.chatInput.value.trim();
    if (text.length === 0) {
      return;
    }
    pendingQuestions = [...pendingQuestions, text];
    el.chatInput.value = "";
    repaint();
    client.sendMessage(state.sessionId, text).catch((error) => {
      pendingQuestions = pendingQuestions.filter((pending) => pending !== text);
      repaint();
      fail(error);
    });
  });

  el.chatInput.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !event.shiftKey) {
      event.preventDefault();
      el.chatSend.click();
    }
  });

  el.materialButton.addEventListener("click", () => {
    if (state === null) {
      return;
    }
    const topic = el.materialTopic.value.trim();
    el.materialButton.disabled = true;
    client
      .generateMaterial(state.sessionId, topic.length > 0 ? topic : undefined)
      .catch(fail)
      .finally(repaint);
  });

  el.beginButton.addEventListener("click", () => {
    if (state === null) {
      return;
    }
    client
      .beginExercise(state.sessionId)
      .then((response) => {
        exercise = response;
        repaint();
      })
      .catch(fail);
  });

  // Plain textarea editor: Tab inserts spaces instead of moving focus.
  el.editor.addEventListener("keydown", (event) => {
    if (event.key === "Tab") {
      event.preventDefault();
      const start = el.editor.selectionStart;
      const end = el.editor.selectionEnd;
      el.editor.value = `${el.editor.value.slice(0, start)}    ${el.editor.value.slice(end)}`;
      el.editor.selectionStart = start + 4;
      el.editor.selectionEnd = start + 4;
    }
  });

  el.submitButton.addEventListener("click", () => {
    if (state === null || exercise === null) {
      return;
    }
    const source = el.editor.value;
    if (source.trim().length === 0) {
      toast("Write some code before submitting.");
      return;
    }
    el.submitButton.disabled = true;
    client
      .submitCode(state.sessionId, exercise.exercise_id, state.stepIndex, source)
      .catch(fail)
      .finally(repaint);
  });

  el.reportButton.addEventListener("click", () => {
    if (state === null) {
      return;
    }
    el.reportButton.disabled = true;
    client.generateReport(state.sessionId).catch(fail).finally(repaint);
  });

  el.downloadButton.addEventListener("click", () => {
    if (state === null) {
      return;
    }
    client
      .fetchReportBytes(state.sessionId)
      .then((bytes) => {
        // Downloaded bytes are exactly the GET /report response body.
        const url = URL.createObjectURL(reportBlob(bytes));
        const anchor = document.createElement("a");
        anchor.href = url;
        anchor.download = `report-${state?.sessionId ?? "session"}.md`;
        anchor.click();
        URL.revokeObjectURL(url);
      })
      .catch(fail);
  });

  // Refresh/bookmark: rebuild the whole session from the event stream.
  const hashMatch = /sid=([^&]+)/.exec(window.location.hash);
  if (hashMatch?.[1]) {
    const sessionId = decodeURIComponent(hashMatch[1]);
    client
      .getSession(sessionId)
      .then(() => attachSession(sessionId))
      .catch(() => {
        window.location.hash = "";
        repaint();
      });
  } else {
    repaint();
  }
}

function must(root: HTMLElement, selector: string): HTMLElement {
  const element = root.querySelector<HTMLElement>(selector);
  if (element === null) {
    throw new Error(`layout is missing ${selector}`);
  }
  return element;
}

const LAYOUT = `
<div id="intake-view">
  <h1>Coding Tutor</h1>
  <p>Tell the tutor where you are starting from.</p>
  <form id="intake-form">
    <label>Background
      <input name="background" required placeholder="e.g. first-year student, some scripting">
    </label>
    <label>Goals
      <input name="goals" required placeholder="e.g. get comfortable with Python basics">
    </label>
    <label>Self-reported level
      <select name="self_reported_level">
        <option value="low">low</option>
        <option value="medium" selected>medium</option>
        <option value="high">high</option>
      </select>
    </label>
    <label>Preferred topics (comma separated)
      <input name="preferred_topics" placeholder="basics, strings">
    </label>
    <button type="submit">Start session</button>
    <p id="intake-error" class="error" role="alert"></p>
  </form>
</div>
<div id="session-view" class="hidden">
  <header>
    <span id="phase-badge"></span>
    <span id="turn-counter"></span>
    <span id="connection-dot" data-status="idle"></span>
  </header>
  <div id="banner" class="banner hidden" role="status"></div>
  <main>
    <aside class="column">
      <h2>Material</h2>
      <div class="controls">
        <input id="material-topic" placeholder="topic (optional)">
        <button id="material-button">Generate material</button>
      </div>
      <div id="material-pane" class="pane"></div>
    </aside>
    <section class="column">
      <h2>Tutor chat</h2>
      <div id="chat-pane" class="pane chat"></div>
      <div class="controls">
        <textarea id="chat-input" rows="2"></textarea>
        <button id="chat-send">Send</button>
      </div>
    </section>
    <section class="column">
      <h2>Exercise</h2>
      <div class="controls"><button id="begin-button">Begin exercise</button></div>
      <div id="exercise-pane" class="pane"></div>
      <textarea id="code-editor" rows="10" spellcheck="false"
        placeholder="# write your solution here"></textarea>
      <div class="controls"><button id="submit-button">Submit code</button></div>
      <div id="feedback-pane" class="pane"></div>
      <div id="history-pane" class="pane"></div>
    </section>
  </main>
  <footer>
    <button id="report-button">Generate report</button>
    <button id="download-button" disabled>Download report</button>
  </footer>
</div>
<div id="toast" class="toast hidden" role="alert"></div>
`;
