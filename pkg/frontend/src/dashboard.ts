// Decision dashboard state: threshold sliders plus the four bucket panels.
//
// Bucket membership is never computed client-side: every entry lands in the
// panel named by the server's `quadrant` field, and moving a slider issues a
// fresh dashboard request on release.

import type { DashboardEntry, DashboardResponse, QuadrantName } from './types.js';

export const QUADRANTS: readonly QuadrantName[] = ['green', 'red', 'amber', 'white_contentious'];

export const BELIEF_SLIDER = { min: 0, max: 1, step: 0.1 };
export const EVIDENCE_SLIDER_STEP = 0.1;

export interface ScatterPoint {
  hypothesisId: string;
  x: number; // degree of belief
  y: number; // weight of evidence
  quadrant: QuadrantName;
}

export interface DashboardView {
  thresholds: { thetaBelief: number; thetaEvidence: number };
  buckets: Record<QuadrantName, DashboardEntry[]>;
  scatter: ScatterPoint[];
  evidenceSliderMax: number;
}

export function groupByQuadrant(entries: DashboardEntry[]): Record<QuadrantName, DashboardEntry[]> {
  const buckets: Record<QuadrantName, DashboardEntry[]> = {
    green: [],
    red: [],
    amber: [],
    white_contentious: [],
  };
  for (const entry of entries) {
    buckets[entry.quadrant].push(entry);
  }
  return buckets;
}

export function evidenceSliderMax(entries: DashboardEntry[]): number {
  const top = entries.reduce((acc, e) => Math.max(acc, e.woe.total), 0);
  return Math.ceil(top / EVIDENCE_SLIDER_STEP) * EVIDENCE_SLIDER_STEP;
}

export function buildDashboardView(response: DashboardResponse): DashboardView {
  return {
    thresholds: {
      thetaBelief: response.thresholds.theta_belief,
      thetaEvidence: response.thresholds.theta_evidence,
    },
    buckets: groupByQuadrant(response.entries),
    scatter: response.entries.map((e) => ({
      hypothesisId: e.hypothesis.hypothesis_id,
      x: e.dob.mean,
      y: e.woe.total,
      quadrant: e.quadrant,
    })),
    evidenceSliderMax: evidenceSliderMax(response.entries),
  };
}

export type DashboardFetcher = (thetaBelief: number, thetaEvidence: number) => Promise<DashboardResponse>;

/** Tracks slider state and re-queries the server on every release. */
export class DashboardController {
  view: DashboardView | null = null;
  private pendingBelief: number;
  private pendingEvidence: number;

  constructor(
    private readonly fetcher: DashboardFetcher,
    initialBelief = 0.7,
    initialEvidence = 5.0,
  ) {
    this.pendingBelief = initialBelief;
    this.pendingEvidence = initialEvidence;
  }

  /** Slider drag: update the pending value only; no request, no re-bucketing. */
  moveSliders(thetaBelief: number, thetaEvidence: number): void {
    this.pendingBelief = clamp(thetaBelief, BELIEF_SLIDER.min, BELIEF_SLIDER.max);
    this.pendingEvidence = Math.max(0, thetaEvidence);
  }

  /** Slider release: one request; buckets come back from the server. */
  async release(): Promise<DashboardView> {
    const response = await this.fetcher(this.pendingBelief, this.pendingEvidence);
    this.view = buildDashboardView(response);
    return this.view;
  }
}

function clamp(value: number, min: number, max: number): number {
  return Math.min(max, Math.max(min, value));
}
