// Feed card view-model. The only computation allowed here is display
// mapping: position is linear in the server's posterior mean, the color is
// the server's classification, metric strings are copied verbatim.

import { mapDobToPosition } from './position.js';
import type { HorseColor, HypothesisSummary, VoteDirection } from './types.js';

// The four named colors with accessible-contrast render values.
export const HORSE_PALETTE: Record<HorseColor, { fill: string; outline: string }> = {
  white: { fill: '#f8f8f6', outline: '#8a8a85' },
  pink: { fill: '#e86a9c', outline: '#7c2347' },
  blue: { fill: '#6aa0e8', outline: '#1f3e77' },
  black: { fill: '#2b2b2e', outline: '#000000' },
};

export interface HorseCardView {
  hypothesisId: string;
  title: string;
  authorDisplay: string;
  tag: string;
  addedOn: string;
  dobText: string;
  woeText: string;
  xPositionPercent: number;
  color: HorseColor;
  upVotes: number;
  downVotes: number;
  viewerVote: VoteDirection | null;
  upActive: boolean;
  downActive: boolean;
}

export function buildHorseCard(summary: HypothesisSummary): HorseCardView {
  return {
    hypothesisId: summary.hypothesis_id,
    title: summary.title,
    authorDisplay: summary.author_display,
    tag: summary.tag,
    addedOn: summary.added_on,
    dobText: `DOB: ${summary.dob.display}`,
    woeText: `WOE: ${summary.woe.total.toFixed(2)}`,
    xPositionPercent: mapDobToPosition(summary.dob.mean),
    color: summary.horse,
    upVotes: summary.up_votes,
    downVotes: summary.down_votes,
    viewerVote: summary.viewer_vote,
    upActive: summary.viewer_vote === 'up',
    downActive: summary.viewer_vote === 'down',
  };
}

export function renderHorseCard(card: HorseCardView): string {
  const palette = HORSE_PALETTE[card.color];
  return [
    `<article class="horse-card" data-id="${card.hypothesisId}">`,
    `  <header><span class="tag">${escapeHtml(card.tag)}</span>` +
      `<time>${escapeHtml(card.addedOn)}</time></header>`,
    `  <h3>${escapeHtml(card.title)}</h3>`,
    `  <div class="racing-box">`,
    `    <span class="horse horse-${card.color}" style="left:${card.xPositionPercent.toFixed(1)}%;` +
      `background:${palette.fill};border-color:${palette.outline}"></span>`,
    `  </div>`,
    `  <p class="metrics">${escapeHtml(card.dobText)} | ${escapeHtml(card.woeText)}</p>`,
    `  <footer>`,
    `    <button class="vote-up${card.upActive ? ' active' : ''}" data-id="${card.hypothesisId}">` +
      `&#128077; ${card.upVotes}</button>`,
    `    <button class="vote-down${card.downActive ? ' active' : ''}" data-id="${card.hypothesisId}">` +
      `&#128078; ${card.downVotes}</button>`,
    `    <span class="author">${escapeHtml(card.authorDisplay)}</span>`,
    `  </footer>`,
    `</article>`,
  ].join('\n');
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}
