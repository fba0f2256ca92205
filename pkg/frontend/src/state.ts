/** View state and request sequencing. */

export type SortMode =
  | "overall"
  | "education"
  | "work"
  | "skills"
  | "scorechart"
  | `skill:${string}`;

export type ViewName = "cards" | "table" | "chart" | "profile";

export interface ViewState {
  jobId: string | null;
  minYears: string;
  degrees: Set<string>;
  skills: string[];
  sort: SortMode;
  view: ViewName;
  selectedCandidate: string | null;
}

export function initialState(): ViewState {
  return {
    jobId: null,
    minYears: "",
    degrees: new Set(),
    skills: [],
    sort: "overall",
    view: "cards",
    selectedCandidate: null,
  };
}

/** Discards responses that arrive after a newer one was already applied. */
export class RequestSequencer {
  private issued = 0;
  private applied = 0;

  next(): number {
    return ++this.issued;
  }

  accept(sequence: number): boolean {
    if (sequence <= this.applied) {
      return false;
    }
    this.applied = sequence;
    return true;
  }
}
