// API response shapes (versioned /v1 endpoints). The client renders these
// verbatim: every metric shown on screen comes from a server response.

export type HorseColor = 'white' | 'pink' | 'blue' | 'black';
export type QuadrantName = 'green' | 'red' | 'amber' | 'white_contentious';
export type VoteDirection = 'up' | 'down';

export interface BeliefEstimate {
  mean: number;
  ci_low: number;
  ci_high: number;
  n_votes: number;
  display: string;
}

export interface WoeResult {
  support_weight: number;
  refute_weight: number;
  total: number;
  balance: number | null;
  n_items: number;
  n_ratings: number;
}

export interface HypothesisSummary {
  hypothesis_id: string;
  title: string;
  description: string;
  tag: string;
  author_display: string;
  added_on: string;
  up_votes: number;
  down_votes: number;
  dob: BeliefEstimate;
  woe: WoeResult;
  horse: HorseColor;
  n_refuting: number;
  viewer_vote: VoteDirection | null;
}

export interface Thresholds {
  theta_belief: number;
  theta_evidence: number;
}

export interface DashboardEntry {
  hypothesis: HypothesisSummary;
  dob: BeliefEstimate;
  woe: WoeResult;
  horse: HorseColor;
  quadrant: QuadrantName;
}

export interface DashboardResponse {
  thresholds: Thresholds;
  entries: DashboardEntry[];
}

export interface HypothesesResponse {
  hypotheses: HypothesisSummary[];
}

export interface VoteResponse {
  dob: BeliefEstimate;
  horse: HorseColor;
  up_votes: number;
  down_votes: number;
}

export interface EvidenceResponse {
  evidence_id: string;
  polarity: 'supports' | 'refutes';
  initial_rating: number;
  woe: WoeResult;
}

export interface SessionResponse {
  token: string;
  user_id: string;
  expires_at: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
