export type Sensitivity = "low" | "medium" | "high";

export type Verdict = "useful" | "not-useful" | "copied" | "deleted";

export interface Provenance {
  repo: string;
  commit: string;
  path: string;
  comment: string;
}

export interface RecommendationPayload {
  recommendation_id: string;
  rhs_cluster: number;
  code: string;
  lhs_signatures: string[];
  confidence: number;
  support: number;
  provenance: Provenance;
}

export interface BufferResponse {
  recommendations: RecommendationPayload[];
  unchanged: boolean;
}

export interface SessionInfo {
  session_id: string;
  sensitivity: Sensitivity;
}

export interface FeedbackResponse {
  recorded: boolean;
  verdict: Verdict;
  snippet?: string;
}
