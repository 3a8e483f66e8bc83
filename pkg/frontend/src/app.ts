/**
 * DOM wiring for the annotation wizard. Renders the current ScreenState,
 * feeds user input through `advance`, posts the finished record, and
 * fetches the next task (optimistically; a 409 conflict surfaces as a
 * notice and triggers a re-fetch). Explanations are labeled only
 * "Explanation 1" / "Explanation 2"; the client never learns sources.
 */

import { ApiClient } from "./api.js";
import {
  PROTOCOL_NOTE,
  ScreenState,
  advance,
  initialState,
  recordPayload,
  visibleExplanations,
} from "./state.js";
import {
  NEGATIVE_LABELS,
  PublicTask,
  Preference,
  RATING_LABELS,
  RATING_LABEL_TEXT,
  RatingLabel,
  SHORTCOMINGS,
  SHORTCOMING_TEXT,
  Shortcoming,
} from "./types.js";

let client: ApiClient | null = null;
let state: ScreenState | null = null;
let notice = "";

const app = () => document.getElementById("app") as HTMLElement;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderTokenScreen(): void {
  const root = app();
  root.replaceChildren();
  const box = el("div", "card");
  box.append(el("h2", undefined, "Annotator sign-in"));
  box.append(el("p", undefined, "Enter the annotator token you were given."));
  const input = el("input");
  input.id = "token-input";
  input.placeholder = "token";
  const button = el("button", "primary", "Start");
  button.id = "token-start";
  button.onclick = () => {
    if (!input.value.trim()) return;
    client = new ApiClient("", input.value.trim());
    void loadNextTask();
  };
  box.append(input, button);
  root.append(box);
}

async function loadNextTask(): Promise<void> {
  if (!client) return;
  try {
    const task = await client.nextTask();
    if (task === null) {
      renderFinished();
      return;
    }
    state = initialState(task);
    render();
  } catch (err) {
    renderFatal(String(err));
  }
}

function renderFinished(): void {
  const root = app();
  root.replaceChildren();
  const box = el("div", "card");
  box.append(el("h2", undefined, "All done"));
  box.append(el("p", undefined, "There are no more tasks for you. Thank you!"));
  root.append(box);
}

function renderFatal(message: string): void {
  const root = app();
  root.replaceChildren();
  const box = el("div", "card error");
  box.append(el("h2", undefined, "Something went wrong"));
  box.append(el("p", undefined, message));
  root.append(box);
}

function imagePanel(task: PublicTask): HTMLElement {
  const panel = el("div", "image-panel");
  const image = el("img");
  image.src = `/images/${task.image.path}`;
  image.alt = "task image";
  panel.append(image);
  // boxes are a visual cue only; drawn once the natural size is known
  if (task.boxes && task.image.width > 0 && task.image.height > 0) {
    image.addEventListener("load", () => {
      const scaleX = image.clientWidth / task.image.width;
      const scaleY = image.clientHeight / task.image.height;
      for (const [label, box] of Object.entries(task.boxes ?? {})) {
        const overlay = el("div", "box-overlay", label);
        overlay.style.left = `${box.x1 * scaleX}px`;
        overlay.style.top = `${box.y1 * scaleY}px`;
        overlay.style.width = `${(box.x2 - box.x1) * scaleX}px`;
        overlay.style.height = `${(box.y2 - box.y1) * scaleY}px`;
        panel.append(overlay);
      }
    });
  }
  return panel;
}

function answerEntry(current: ScreenState): HTMLElement {
  const box = el("div", "card");
  box.append(el("h3", undefined, "Step 1 — answer the task"));
  box.append(el("p", "prompt", current.task.prompt));
  if (current.task.answer_options) {
    for (const option of current.task.answer_options) {
      const button = el("button", "option", option);
      button.dataset.answer = option;
      button.onclick = () => dispatch({ kind: "answer", answer: option });
      box.append(button);
    }
  } else {
    const input = el("input");
    input.id = "answer-input";
    input.placeholder = "your answer";
    const button = el("button", "primary", "Continue");
    button.id = "answer-continue";
    button.onclick = () => dispatch({ kind: "answer", answer: input.value });
    box.append(input, button);
  }
  return box;
}

function ratingForm(position: number): HTMLElement {
  const box = el("div", "card");
  box.append(el("h3", undefined, `Step ${position + 2} — rate Explanation ${position + 1}`));
  box.append(el("p", undefined, "Does the explanation justify the answer?"));

  let chosen: RatingLabel | null = null;
  const selected = new Set<Shortcoming>();

  const shortcomingRow = el("div", "shortcomings hidden");
  shortcomingRow.append(el("p", undefined, "What is wrong with it? (pick at least one)"));
  for (const shortcoming of SHORTCOMINGS) {
    const label = el("label");
    const checkbox = el("input");
    checkbox.type = "checkbox";
    checkbox.dataset.shortcoming = shortcoming;
    checkbox.onchange = () =>
      checkbox.checked ? selected.add(shortcoming) : selected.delete(shortcoming);
    label.append(checkbox, document.createTextNode(" " + SHORTCOMING_TEXT[shortcoming]));
    shortcomingRow.append(label);
  }

  const buttons = el("div", "rating-buttons");
  for (const label of RATING_LABELS) {
    const button = el("button", "option", RATING_LABEL_TEXT[label]);
    button.dataset.rating = label;
    button.onclick = () => {
      chosen = label;
      for (const other of Array.from(buttons.children)) {
        other.classList.toggle("selected", other === button);
      }
      // shortcoming choices appear only for weak no / no
      const negative = NEGATIVE_LABELS.includes(label);
      shortcomingRow.classList.toggle("hidden", !negative);
      if (!negative) {
        selected.clear();
        shortcomingRow
          .querySelectorAll("input")
          .forEach((c) => ((c as HTMLInputElement).checked = false));
      }
    };
    buttons.append(button);
  }

  const submit = el("button", "primary", "Continue");
  submit.id = "rating-continue";
  submit.onclick = () =>
    dispatch({ kind: "rating", label: chosen, shortcomings: [...selected] });
  box.append(buttons, shortcomingRow, submit);
  return box;
}

function preferenceForm(): HTMLElement {
  const box = el("div", "card");
  box.append(el("h3", undefined, "Step 4 — which explanation do you prefer?"));
  const choices: [Preference, string][] = [
    ["prefer_a", "Explanation 1"],
    ["prefer_b", "Explanation 2"],
    ["equal", "They are equal"],
  ];
  for (const [choice, text] of choices) {
    const button = el("button", "option", text);
    button.dataset.preference = choice;
    button.onclick = () => dispatch({ kind: "preference", choice });
    box.append(button);
  }
  return box;
}

function explanationCards(current: ScreenState): HTMLElement {
  const wrap = el("div", "explanations");
  for (const index of visibleExplanations(current)) {
    const card = el("div", "card explanation");
    card.append(el("h4", undefined, `Explanation ${index + 1}`));
    card.append(el("p", undefined, current.task.explanations[index]));
    wrap.append(card);
  }
  return wrap;
}

function render(): void {
  if (!state) return;
  const root = app();
  root.replaceChildren();

  if (notice) {
    root.append(el("div", "notice", notice));
    notice = "";
  }

  root.append(imagePanel(state.task));
  if (state.phase !== "answer_entry") {
    root.append(el("p", "prompt", state.task.prompt));
    root.append(
      el("p", "answered", `Your task answer: ${state.taskAnswer ?? ""}`),
    );
    root.append(explanationCards(state));
  }

  switch (state.phase) {
    case "answer_entry":
      root.append(answerEntry(state));
      break;
    case "rate_explanation_a":
      root.append(ratingForm(0));
      break;
    case "rate_explanation_b":
      root.append(ratingForm(1));
      break;
    case "preference":
      root.append(preferenceForm());
      break;
    case "done":
      root.append(el("div", "card", "Submitting..."));
      break;
  }

  if (state.error) {
    root.append(el("div", "validation-error", state.error));
  }
  root.append(el("footer", "protocol-note", PROTOCOL_NOTE));
}

function dispatch(input: Parameters<typeof advance>[1]): void {
  if (!state) return;
  const previousPhase = state.phase;
  state = advance(state, input);
  if (state.phase === previousPhase) {
    // invalid input: message appears in place, the form keeps its entries
    showValidationError(state.error);
    return;
  }
  if (state.phase === "done") {
    void submitAndContinue();
  }
  render();
}

function showValidationError(message: string | null): void {
  const root = app();
  let node = root.querySelector<HTMLElement>(".validation-error");
  if (!message) {
    node?.remove();
    return;
  }
  if (!node) {
    node = el("div", "validation-error");
    const footer = root.querySelector("footer");
    root.insertBefore(node, footer);
  }
  node.textContent = message;
}

async function submitAndContinue(): Promise<void> {
  if (!client || !state) return;
  try {
    const outcome = await client.submit(recordPayload(state));
    if (outcome === "conflict") {
      notice = "This task was already submitted elsewhere; fetching the next one.";
    }
  } catch (err) {
    notice = `Submission failed: ${String(err)}`;
  }
  await loadNextTask();
}

export function start(): void {
  renderTokenScreen();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
