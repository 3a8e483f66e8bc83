/**
 * Wire types mirroring the collection service's JSON payloads
 * field-for-field. The client only ever sees the blinded task view:
 * two explanations in display order, no source identities, no correct
 * answer.
 */

export type RatingLabel = "yes" | "weak_yes" | "weak_no" | "no";

export type Shortcoming =
  | "confusing_sentence"
  | "insufficient_justification"
  | "incorrect_image_description";

export type Preference = "prefer_a" | "prefer_b" | "equal";

export interface ImageRef {
  path: string;
  width: number;
  height: number;
}

export interface BoxCorners {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

/** Blinded task payload from GET /api/tasks/next. */
export interface PublicTask {
  task_id: string;
  image: ImageRef;
  prompt: string;
  explanations: [string, string];
  answer_options: string[] | null;
  boxes?: Record<string, BoxCorners>;
  lease_expires?: number | null;
}

export interface ExplanationRatingBody {
  label: RatingLabel;
  shortcomings: Shortcoming[];
}

/** Body of POST /api/ratings (annotator_id is filled in by the server from the token). */
export interface RatingRecordBody {
  task_id: string;
  annotator_task_answer: string;
  ratings: [ExplanationRatingBody, ExplanationRatingBody];
  preference: Preference;
}

export const RATING_LABELS: RatingLabel[] = ["yes", "weak_yes", "weak_no", "no"];

export const NEGATIVE_LABELS: RatingLabel[] = ["weak_no", "no"];

export const SHORTCOMINGS: Shortcoming[] = [
  "confusing_sentence",
  "insufficient_justification",
  "incorrect_image_description",
];

export const RATING_LABEL_TEXT: Record<RatingLabel, string> = {
  yes: "yes",
  weak_yes: "weak yes",
  weak_no: "weak no",
  no: "no",
};

export const SHORTCOMING_TEXT: Record<Shortcoming, string> = {
  confusing_sentence: "confusing sentence",
  insufficient_justification: "insufficient justification",
  incorrect_image_description: "incorrect description of image",
};
