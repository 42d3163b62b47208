// Wire types mirroring the service's report JSON schema. The client renders
// these values verbatim and never recomputes scores or bands.

export type BandLabel = "Low" | "Medium" | "Medium-High" | "High";

export const BAND_ORDER: BandLabel[] = ["Low", "Medium", "Medium-High", "High"];

export interface BloomInfo {
  weights: number[];
  dominant: string;
  matched_terms?: [string, string][];
  low_confidence?: boolean;
}

export interface Subscores {
  judge: number | null;
  bloom: number | null;
  semantic: number | null;
  lexical: number | null;
}

export interface QuestionRow {
  index: number;
  text: string;
  bloom: BloomInfo;
  subscores: Subscores;
  score: number;
  band: BandLabel;
  features?: {
    mean_tfidf?: number | null;
    max_boilerplate_similarity?: number | null;
    nearest_prompt?: string | null;
    judge_rationale?: string | null;
  };
  flags?: string[];
}

export interface Recommendation {
  question_index: number;
  kind: string;
  text: string;
  trigger: string;
}

export interface Report {
  id: string;
  title: string;
  created_at: string;
  tool_version: string;
  config_hash: string;
  questions: QuestionRow[];
  assignment: { score: number; band: BandLabel; judge_mean?: number | null };
  strengths: string[];
  weaknesses: string[];
  recommendations: Recommendation[];
  ranking?: number[];
  notices?: string[];
}

export interface AnalysisResponse {
  analysis_id: string;
  report: Report;
  parent_id?: string | null;
}

export interface Delta {
  question_index: number;
  old_score: number;
  new_score: number;
  old_band: BandLabel;
  new_band: BandLabel;
  old_text?: string;
  new_text?: string;
}

export interface RescoreResponse extends AnalysisResponse {
  delta: Delta;
}

export interface JobAccepted {
  job_id: string;
  poll_url: string;
}

export type AnalysisOutcome =
  | { kind: "done"; result: AnalysisResponse }
  | { kind: "accepted"; job: JobAccepted };

export interface HistogramResponse {
  counts: Record<BandLabel, number>;
  total: number;
}

export interface LineageEntry {
  analysis_id: string;
  parent_id: string | null;
  created_at: string;
  score: number | null;
  band: BandLabel | null;
}

export interface AnalysisSummary {
  analysis_id: string;
  title: string;
  created_at: string;
  parent_id: string | null;
  score: number | null;
  band: BandLabel | null;
  question_count: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}
