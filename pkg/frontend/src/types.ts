/** Typed mirrors of the server's JSON payloads. */

export interface SkillMatch {
  desired: string;
  matched: string | null;
  distance: number;
  score: number;
}

export interface EducationEvidence {
  institution?: string;
  institution_key?: string;
  degree?: string;
  degree_points?: number;
  university_the?: number | null;
  university_qs?: number | null;
  university_score?: number;
  capped?: boolean;
}

export interface WorkEvidenceEntry {
  employer: string;
  employer_key: string;
  months: number;
  weight: number;
  employer_score: number;
}

export interface WorkEvidence {
  experience_points?: number;
  weighted_employer_average?: number;
  entries?: WorkEvidenceEntry[];
}

export interface ScoreCard {
  candidate_id: string;
  job_id: string;
  education_score: number;
  work_score: number;
  skills_score: number;
  overall_score: number;
  skill_matches: SkillMatch[];
  education_evidence: EducationEvidence;
  work_evidence: WorkEvidence;
  weights: number[];
}

export interface CandidateRow {
  rank: number;
  candidate_id: string;
  name: string | null;
  bookmarked: boolean;
  most_recent_degree: string | null;
  scorecard: ScoreCard;
  top_decile: Record<string, boolean>;
}

export interface CandidateListResponse {
  job_id: string;
  sort: string;
  columns: string[];
  candidates: CandidateRow[];
  snapshot_version: string;
}

export interface SpanPayload {
  start: string;
  end: string | null;
  open_ended: boolean;
  resolved_end: string;
}

export interface EducationPayload {
  institution_raw: string;
  institution_key: string;
  degree: string;
  field_of_study: string | null;
  span: SpanPayload | null;
  source_blocks: number[];
}

export interface WorkPayload {
  employer_raw: string;
  employer_key: string;
  title: string | null;
  span: SpanPayload | null;
  source_blocks: number[];
}

/** [raw, token, source block indices] */
export type SkillMentionPayload = [string, string, number[]];

export interface ProfilePayload {
  candidate_id: string;
  source_document: string;
  reference_date: string;
  name: string | null;
  email: string | null;
  phone: string | null;
  location: string | null;
  educations: EducationPayload[];
  works: WorkPayload[];
  skills: SkillMentionPayload[];
  provenance: Record<string, number[]>;
  warnings: string[];
}

/** [text, page, x, y, width, height, font_size, bold, font_name] */
export type BlockPayload = [string, number, number, number, number, number, number, number, string];

export interface DocumentPayload {
  source_id: string;
  blocks: BlockPayload[];
}

export interface RelatedSkill {
  token: string;
  similarity: number;
}

export interface JobScore {
  job_id: string;
  name: string;
  overall_score: number;
}

export interface DetailResponse {
  candidate: ProfilePayload;
  document: DocumentPayload;
  scorecard: ScoreCard;
  related_skills: Record<string, RelatedSkill[]>;
  job_scores: JobScore[];
  bookmarked: boolean;
  snapshot_version: string;
}

export interface JobPayload {
  job_id: string;
  name: string;
  desired_skills: string[];
  min_experience_years: number | null;
  required_degrees: string[] | null;
  weight_overrides: number[] | null;
}

export interface JobsResponse {
  jobs: JobPayload[];
  snapshot_version: string;
}

export interface Suggestion {
  token: string;
  frequency: number;
}

export interface AutocompleteResponse {
  suggestions: Suggestion[];
  snapshot_version: string;
}

export interface ApiError {
  code: string;
  message: string;
}
