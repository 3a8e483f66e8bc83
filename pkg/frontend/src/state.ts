/**
 * Pure wizard state machine for one annotation session.
 *
 * Phase order is fixed: the annotator first answers the task themselves,
 * then rates each explanation in turn ("does the explanation justify the
 * answer"), then states a preference. Explanation texts stay hidden until
 * the task answer is in; a weak-no/no rating cannot proceed without at
 * least one shortcoming, so an invalid record can never be constructed
 * client-side. Explanations are rated one at a time and shown side by
 * side only for the preference question.
 */

import {
  NEGATIVE_LABELS,
  Preference,
  PublicTask,
  RatingLabel,
  RatingRecordBody,
  Shortcoming,
} from "./types.js";

export type Phase =
  | "answer_entry"
  | "rate_explanation_a"
  | "rate_explanation_b"
  | "preference"
  | "done";

export interface RatingDraft {
  label: RatingLabel;
  shortcomings: Shortcoming[];
}

export interface ScreenState {
  phase: Phase;
  task: PublicTask;
  taskAnswer: string | null;
  ratings: [RatingDraft | null, RatingDraft | null];
  preference: Preference | null;
  /** validation message for the current phase; cleared on success */
  error: string | null;
}

export type UserInput =
  | { kind: "answer"; answer: string }
  | { kind: "rating"; label: RatingLabel | null; shortcomings: Shortcoming[] }
  | { kind: "preference"; choice: Preference | null };

// shown with the report so readers know how explanations were presented
export const PROTOCOL_NOTE =
  "explanations were rated sequentially and shown together only for the preference question";

export function initialState(task: PublicTask): ScreenState {
  return {
    phase: "answer_entry",
    task,
    taskAnswer: null,
    ratings: [null, null],
    preference: null,
    error: null,
  };
}

/** Explanation indices the annotator may see in the current phase. */
export function visibleExplanations(state: ScreenState): number[] {
  switch (state.phase) {
    case "answer_entry":
      return [];
    case "rate_explanation_a":
      return [0];
    case "rate_explanation_b":
      return [1];
    case "preference":
    case "done":
      return [0, 1];
  }
}

function invalid(state: ScreenState, message: string): ScreenState {
  return { ...state, error: message };
}

function checkRating(input: {
  label: RatingLabel | null;
  shortcomings: Shortcoming[];
}): string | null {
  if (input.label === null) {
    return "pick one of the four rating options";
  }
  const negative = NEGATIVE_LABELS.includes(input.label);
  if (negative && input.shortcomings.length === 0) {
    return "a weak no / no rating needs at least one shortcoming";
  }
  if (!negative && input.shortcomings.length > 0) {
    return "shortcomings only apply to weak no / no ratings";
  }
  return null;
}

/** Deterministic phase transition; invalid input keeps the phase and sets error. */
export function advance(state: ScreenState, input: UserInput): ScreenState {
  switch (state.phase) {
    case "answer_entry": {
      if (input.kind !== "answer") {
        return invalid(state, "answer the task question first");
      }
      const answer = input.answer.trim();
      if (!answer) {
        return invalid(state, "enter the task answer");
      }
      if (state.task.answer_options && !state.task.answer_options.includes(answer)) {
        return invalid(state, "pick one of the listed answer options");
      }
      return { ...state, phase: "rate_explanation_a", taskAnswer: answer, error: null };
    }
    case "rate_explanation_a":
    case "rate_explanation_b": {
      if (input.kind !== "rating") {
        return invalid(state, "rate the explanation shown");
      }
      const problem = checkRating(input);
      if (problem) {
        return invalid(state, problem);
      }
      const draft: RatingDraft = {
        label: input.label as RatingLabel,
        shortcomings: [...input.shortcomings],
      };
      if (state.phase === "rate_explanation_a") {
        return {
          ...state,
          phase: "rate_explanation_b",
          ratings: [draft, state.ratings[1]],
          error: null,
        };
      }
      return {
        ...state,
        phase: "preference",
        ratings: [state.ratings[0], draft],
        error: null,
      };
    }
    case "preference": {
      if (input.kind !== "preference" || input.choice === null) {
        return invalid(state, "choose which explanation you prefer (or equal)");
      }
      return { ...state, phase: "done", preference: input.choice, error: null };
    }
    case "done":
      return invalid(state, "this task is already complete");
  }
}

/**
 * The record to POST once the wizard reaches "done". Only display
 * positions appear; source identity never exists client-side.
 */
export function recordPayload(state: ScreenState): RatingRecordBody {
  if (
    state.phase !== "done" ||
    state.taskAnswer === null ||
    state.ratings[0] === null ||
    state.ratings[1] === null ||
    state.preference === null
  ) {
    throw new Error("record requested before the session completed");
  }
  return {
    task_id: state.task.task_id,
    annotator_task_answer: state.taskAnswer,
    ratings: [
      { label: state.ratings[0].label, shortcomings: [...state.ratings[0].shortcomings] },
      { label: state.ratings[1].label, shortcomings: [...state.ratings[1].shortcomings] },
    ],
    preference: state.preference,
  };
}
