/** HTML builders for the content panes.
 *
 * Every interpolated value -- questions, answers, material, suggestions,
 * code -- is untrusted text and passes through escapeHtml. Code is rendered
 * inside <pre><code> blocks, never evaluated.
 */

import type { ChatEntry, FeedbackView, MaterialView, UiSessionState } from "./state.js";
import type { ExerciseResponse } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderChat(entries: readonly ChatEntry[], pending: readonly string[]): string {
  const bubbles = entries.map((entry) => {
    const roleClass = entry.role === "student" ? "bubble student" : "bubble tutor";
    const ask = entry.needsUserInput
      ? '<div class="needs-input">The tutor needs more detail from you.</div>'
      : "";
    return (
      `<div class="${roleClass}">` +
      `<span class="turn">turn ${entry.turn}</span>` +
      `<div class="text">${escapeHtml(entry.text)}</div>${ask}</div>`
    );
  });
  for (const text of pending) {
    bubbles.push(
      `<div class="bubble student pending"><span class="turn">sending…</span>` +
        `<div class="text">${escapeHtml(text)}</div></div>`,
    );
  }
  if (bubbles.length === 0) {
    return '<p class="placeholder">Ask the tutor anything about the material.</p>';
  }
  return bubbles.join("");
}

export function renderMaterial(material: MaterialView | null): string {
  if (material === null) {
    return '<p class="placeholder">No material yet. Generate some to start studying.</p>';
  }
  const sections = material.sections
    .map(
      (section) =>
        `<section><h3>${escapeHtml(section.heading)}</h3>` +
        `<p>${escapeHtml(section.body)}</p>` +
        `<p class="sources">Sources: ${section.sourceRefs.map(escapeHtml).join(", ")}</p></section>`,
    )
    .join("");
  return `<h2>${escapeHtml(material.topic)}</h2>${sections}`;
}

export function renderExercisePanel(
  exercise: ExerciseResponse | null,
  stepIndex: number,
  complete: boolean,
): string {
  if (exercise === null) {
    return '<p class="placeholder">Begin an exercise when you feel ready.</p>';
  }
  const total = exercise.steps.length;
  const shown = Math.min(stepIndex, total - 1);
  const steps = exercise.steps
    .map((step) => {
      if (step.index > shown) {
        return `<li class="step locked">Step ${step.index + 1} unlocks after the current step.</li>`;
      }
      const state = step.index < shown || complete ? "done" : "active";
      return (
        `<li class="step ${state}">` +
        `<strong>Step ${step.index + 1}/${total}:</strong> ${escapeHtml(step.prompt)}` +
        `<div class="hint">Hint: ${escapeHtml(step.hint)}</div>` +
        `<div class="cases">${step.case_count} hidden test cases</div></li>`
      );
    })
    .join("");
  const banner = complete
    ? '<div class="complete">Exercise complete — every case passes. Generate your report!</div>'
    : "";
  return (
    `<h2>${escapeHtml(exercise.exercise_id)}</h2>` +
    `<p>${escapeHtml(exercise.statement)}</p><ol class="steps">${steps}</ol>${banner}`
  );
}

export function renderFeedback(feedback: FeedbackView | null): string {
  if (feedback === null) {
    return "";
  }
  const rows = feedback.verdicts
    .map(
      (passed, index) =>
        `<tr class="${passed ? "pass" : "fail"}"><td>case ${index + 1}</td>` +
        `<td>${passed ? "pass" : "fail"}</td></tr>`,
    )
    .join("");
  const passed = feedback.verdicts.filter(Boolean).length;
  const suggestions = feedback.suggestions.length
    ? `<ul class="suggestions">${feedback.suggestions
        .map((suggestion) => `<li>${escapeHtml(suggestion)}</li>`)
        .join("")}</ul>`
    : "";
  return (
    `<h3>Step ${feedback.stepIndex + 1} verdict: ${passed}/${feedback.verdicts.length} passed</h3>` +
    `<table class="verdicts"><tbody>${rows}</tbody></table>` +
    `${suggestions}<p class="next-action ${escapeHtml(feedback.nextAction)}">` +
    `${escapeHtml(describeNextAction(feedback.nextAction))}</p>`
  );
}

function describeNextAction(nextAction: string): string {
  switch (nextAction) {
    case "advance_step":
      return "Step solved — the next step is unlocked.";
    case "exercise_complete":
      return "All steps solved. The exercise is complete.";
    case "retry_step":
      return "Not yet — adjust your code and submit again.";
    default:
      return nextAction;
  }
}

export function renderSubmissionHistory(state: UiSessionState): string {
  if (state.submissions.length === 0) {
    return "";
  }
  const items = state.submissions
    .map(
      (submission) =>
        `<details><summary>turn ${submission.turn}: step ${submission.stepIndex + 1}</summary>` +
        `<pre><code>${escapeHtml(submission.source)}</code></pre></details>`,
    )
    .join("");
  return `<h3>Submission history</h3>${items}`;
}
